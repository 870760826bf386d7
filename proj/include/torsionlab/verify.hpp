#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "torsionlab/catalog.hpp"
#include "torsionlab/numeric.hpp"
#include "torsionlab/torsion.hpp"

namespace torsionlab {

// Axis-parallel box with rational corners. Membership is half-open,
// lo <= y < hi, so adjacent boxes do not double count.
class Box {
 public:
  Box() = default;
  Box(std::vector<Rat> lo, std::vector<Rat> hi);
  std::size_t dim() const { return lo_.size(); }
  const std::vector<Rat>& lo() const { return lo_; }
  const std::vector<Rat>& hi() const { return hi_; }
  const std::vector<double>& lo_d() const { return dlo_; }
  const std::vector<double>& hi_d() const { return dhi_; }
  Rat volume() const;
  bool contains(std::span<const double> y) const;
  bool overlaps(const Box& o) const;  // open interiors meet

 private:
  std::vector<Rat> lo_, hi_;
  std::vector<double> dlo_, dhi_;
};

// Finite union of boxes with pairwise disjoint interiors.
class BoxUnion {
 public:
  BoxUnion() = default;
  explicit BoxUnion(std::vector<Box> boxes);
  const std::vector<Box>& boxes() const { return boxes_; }
  bool empty() const { return boxes_.empty(); }
  Rat volume() const;
  bool contains(std::span<const double> y) const;

 private:
  std::vector<Box> boxes_;
};

// Projections, their fiber fields and the weight rho_beta, compiled once.
struct InequalitySetup {
  std::size_t n = 0;
  PolyMap pi1, pi2;
  TorsionProfile profile;
  CompiledMap cpi1, cpi2;
  CompiledPoly J;
  double rho_exponent = 0;
  std::array<double, 2> p{0, 0};

  static InequalitySetup build(const ProjectionPair& pair, const std::vector<unsigned>& beta,
                               Pattern pattern = Pattern::Alternating12, int cap = -1);
  double rho(std::span<const double> x) const;
};

struct RegionSpec {
  Box domain;
  std::optional<int> band;  // rho_beta in [2^m, 2^(m+1))
  std::optional<BoxUnion> e1, e2;
  void validate(std::size_t n) const;
  bool contains(const InequalitySetup& s, std::span<const double> x) const;
};

struct Estimate {
  double value = 0;
  double stderr_ = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

Estimate measure(const InequalitySetup& setup, const RegionSpec& region, std::uint64_t samples, std::uint64_t seed);

struct RwtReport {
  Estimate omega;
  double e1 = 0, e2 = 0;  // |E_j|
  double ratio = 0;       // |Omega| / (|E1|^(1/p1) |E2|^(1/p2))
  // alpha_j = |Omega| / |E_j|; alpha1^b1 alpha2^b2 / |Omega| equals
  // ratio^(b1 + b2 - 1).
  double alpha1 = 0, alpha2 = 0, alpha_form = 0;
  bool degenerate = false;  // some measure vanished
};

// Both E_j must be present in the region.
RwtReport rwt_ratio(const InequalitySetup& setup, const RegionSpec& region, std::uint64_t samples,
                    std::uint64_t seed);

// f = sum of c_k chi_{E_k}, sets pairwise disjoint.
class StepFunction {
 public:
  struct Level {
    Rat coef;
    BoxUnion set;
  };
  StepFunction() = default;
  explicit StepFunction(std::vector<Level> levels);
  const std::vector<Level>& levels() const { return levels_; }
  double operator()(std::span<const double> y) const;
  // (sum |c_k|^p |E_k|)^(1/p) from exact box volumes.
  double norm(double p) const;
  bool is_zero() const;

 private:
  std::vector<Level> levels_;
};

struct BilinearReport {
  Estimate form;
  double norm1 = 0, norm2 = 0;
  double ratio = 0;  // form / (norm1 norm2), 0 when a norm vanishes
};

// QMC estimate of the integral of f1(pi1) f2(pi2) rho_beta over the domain.
BilinearReport bilinear_form(const InequalitySetup& setup, const StepFunction& f1, const StepFunction& f2,
                             const Box& domain, std::uint64_t samples, std::uint64_t seed);

struct ScaleProfile {
  std::vector<int> bands;
  std::vector<Estimate> per_band;
  double total = 0;
  double norm1 = 0, norm2 = 0;
  double total_ratio = 0;  // total / (norm1 norm2)
  double theta = 0;
  double theta_sum = 0;  // sum of B_m^theta
  std::size_t nonempty = 0;
};

ScaleProfile scale_profile(const InequalitySetup& setup, const StepFunction& f1, const StepFunction& f2,
                           const Box& domain, int m0, int m1, std::uint64_t samples, std::uint64_t seed);

// ---- planar power counterexample ----

enum class CounterexampleKind { LogWeighted, Indicator };

struct CounterexampleRow {
  double delta = 0;
  Estimate form;
  double oracle_form = 0;  // closed form or quadrature
  double norm2 = 0;        // ||f2||_k by quadrature
  double ratio = 0;        // form / (||f1||_1 ||f2||_k)
};

struct CounterexampleReport {
  unsigned k = 0;
  double cutoff = 0;  // f2 supported on (delta, cutoff]
  double rho = 0;
  std::vector<CounterexampleRow> rows;
  bool strictly_increasing = false;
  double growth = 0;  // last ratio / first ratio
};

// pi1 = x1, pi2 = x2^k with f1 = chi_[0,1] and f2(y) = (y^(1/k) |log y|)^-1
// (or chi) on (delta, cutoff], over x1 in [0,1], x2 > 0.
CounterexampleReport counterexample_2d(unsigned k, const std::vector<double>& deltas, std::uint64_t samples,
                                       std::uint64_t seed, CounterexampleKind kind = CounterexampleKind::LogWeighted,
                                       double cutoff = 0.125);

// 2^-4, ..., 2^-(3 + count).
std::vector<double> dyadic_deltas(unsigned count = 16);

// ---- coarea ----

struct CoareaReport {
  double direct = 0;
  Estimate fiber;
  double rel_error = 0;
};

// |box| against the integral over pi_j(box) of the time integral curves of
// X_j spend in the box. The slice x_n = 0 serves as section, so the last
// component of X_j must be a nonzero constant.
CoareaReport coarea_check(const ProjectionPair& pair, int j, const Box& box, std::uint64_t samples,
                          std::uint64_t seed);

// Interval enclosure of a polynomial over a box.
std::array<double, 2> enclose(const RatPoly& p, std::span<const double> lo, std::span<const double> hi);

}  // namespace torsionlab
