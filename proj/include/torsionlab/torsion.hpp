#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "torsionlab/geometry.hpp"

namespace torsionlab {

// Thread-safe memo of flows keyed by word, for one word table.
class FlowCache {
 public:
  explicit FlowCache(const WordTable& table) : table_(table) {}
  const FlowMap& flow(const Word& w);
  const WordTable& table() const { return table_; }

 private:
  const WordTable& table_;
  std::mutex mu_;
  std::map<Word, std::unique_ptr<FlowMap>> flows_;
};

// Composition of flows along words w_1..w_n, applied innermost first:
// map(x, t) = exp(t_n X_{w_n}) o ... o exp(t_1 X_{w_1})(x).
// Variables are (x_1..x_n, t_1..t_n).
struct IterFlowMap {
  std::vector<Word> words;
  std::size_t n = 0;
  std::vector<RatPoly> map;
  RatPoly jac_det;  // det of the derivative in t
};

IterFlowMap iter_flow(const WordTable& table, const std::vector<Word>& words);
IterFlowMap iter_flow(FlowCache& cache, const std::vector<Word>& words);

enum class Pattern { Alternating12, Alternating21 };

// (1,2,1,2,...) or (2,1,2,1,...) of length n.
std::vector<Word> pattern_words(std::size_t n, Pattern pattern);

// beta! times the t^beta coefficient of the Jacobian determinant: a
// polynomial in x only.
RatPoly jacobian_derivative(const IterFlowMap& psi, const std::vector<unsigned>& beta);

struct TorsionProfile {
  std::vector<unsigned> beta;
  Pattern pattern = Pattern::Alternating12;
  std::array<int, 2> b{0, 0};
  std::array<Rat, 2> p;
  RatPoly J;
  Rat rho_exponent;  // 1 / (b1 + b2 - 1)
};

// b counts (1 + beta_j) over positions flowing along X1 and X2 respectively.
std::array<int, 2> torsion_degree(const std::vector<unsigned>& beta, Pattern pattern);
std::array<Rat, 2> exponent_pair(const std::array<int, 2>& b);

TorsionProfile torsion_profile(const WordTable& table, const std::vector<unsigned>& beta,
                               Pattern pattern = Pattern::Alternating12);
TorsionProfile torsion_profile(FlowCache& cache, const std::vector<unsigned>& beta,
                               Pattern pattern = Pattern::Alternating12);

// Jacobian determinant of a square polynomial map; throws NonConstantJacobian
// unless it is a nonzero constant.
Rat constant_jacobian(const PolyMap& f);

// Profile for the pair (G1 o pi1 o F, G2 o pi2 o F) computed from the old
// one by the change-of-variables rule. F, G1, G2 need constant nonzero
// Jacobians. When an inverse of F is supplied it is checked.
TorsionProfile weight_transform(const TorsionProfile& profile, const PolyMap& f, const PolyMap& g1, const PolyMap& g2,
                                const PolyMap* f_inverse = nullptr);

// The transformed projections themselves.
std::array<PolyMap, 2> transform_pair(const PolyMap& pi1, const PolyMap& pi2, const PolyMap& f, const PolyMap& g1,
                                      const PolyMap& g2);

}  // namespace torsionlab
