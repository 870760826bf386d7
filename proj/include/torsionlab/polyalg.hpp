#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "torsionlab/polynomial.hpp"
#include "torsionlab/upoly.hpp"

namespace torsionlab {

struct Interval {
  Rat lo, hi;
  Rat length() const { return hi - lo; }
};

// Finite union of disjoint open rational intervals, sorted.
class IntervalSet {
 public:
  IntervalSet() = default;
  // Throws ValidationError unless the intervals are nonempty, sorted and
  // pairwise disjoint.
  explicit IntervalSet(std::vector<Interval> intervals);
  const std::vector<Interval>& intervals() const { return iv_; }
  bool empty() const { return iv_.empty(); }
  Rat measure() const;
  Rat measure_in(const Rat& lo, const Rat& hi) const;
  IntervalSet clip(const Rat& lo, const Rat& hi) const;
  Interval hull() const;

 private:
  std::vector<Interval> iv_;
};

// ---- two-term extraction ----

enum class TwoTermKind { SingleTerm, Pair, Fail };

struct TwoTermResult {
  TwoTermKind kind = TwoTermKind::Fail;
  bool holds = false;  // t^k <= p(t) for all t > 0, decided exactly
  int n1 = -1, n2 = -1;
  // For a pair: whether the weighted geometric mean is at least 1, and the
  // smallest C with t^k <= C (a_n1 t^n1 + a_n2 t^n2) on t > 0.
  bool mean_at_least_one = false;
  double constant = 0;
  std::optional<Rat> witness;  // t > 0 with t^k > p(t) when the bound fails
};

TwoTermResult extract_two_terms(const std::vector<Rat>& coeffs, unsigned k);

// ---- interval refinement ----

struct RefineOptions {
  Rat c = make_rat(1, 2);         // exponent in the lower bound for S in K
  Rat c_prime = make_rat(1, 64);  // discard threshold
  unsigned max_steps = 100000;
};

struct RefineLevel {
  Interval start;  // interval the stopping time ran in
  Interval stop;   // interval at the stopping time
  Interval J, K;
  Rat set_measure;  // |S| restricted to start
  Rat mass_J, mass_K;
  unsigned steps = 0;
  double ratio_J = 0;  // |S cap J| / |S|
  double ratio_K = 0;  // |S cap K| / ((|S| / |K|)^c |S|)
  Rat dist_over_length;
};

struct RefineResult {
  std::vector<RefineLevel> levels;
  Interval J, K;  // from the last level
  bool completed = false;
};

// Runs the quarter-splitting stopping time N times, each inside the
// previous J.
RefineResult refine_interval(const IntervalSet& s, unsigned n_levels, const RefineOptions& options = {});

struct RefinementBound {
  double lhs = 0;  // integral of |P| over S
  double rhs = 0;
  double ratio = 0;
  std::vector<double> terms;  // one per derivative order
};

RefinementBound check_refinement_bound(const IntervalSet& s, const UPoly& p, const Interval& j, double eps);

// ---- sublevel sets ----

struct SublevelPoint {
  double eps = 0;
  double measure = 0;
  double stderr_ = 0;
};

struct SublevelResult {
  double sup_norm = 0;
  std::vector<SublevelPoint> points;
  double fitted_exponent = 0;  // least-squares slope of log measure against log eps
  bool exact = false;
};

// |{x in [-1,1]^n : |P(x)| < eps ||P||}| across eps = 2^-1, ..., 2^-levels.
// Univariate P is handled exactly through real roots; otherwise QMC.
SublevelResult sublevel_measure(const RatPoly& p, unsigned levels, std::uint64_t samples = 200000,
                                std::uint64_t seed = 1);

// ---- monomialization ----

struct MonomialPiece {
  std::optional<Rat> lo, hi;  // empty for an infinite end
  Rat center;
  std::vector<unsigned> k;  // dominant Taylor order per group
};

struct MonomialCover {
  Rat epsilon;
  std::vector<MonomialPiece> pieces;
  // Isolating intervals of irrational real roots: these points must be
  // piece boundaries, which rational endpoints cannot represent.
  std::vector<Interval> root_cells;
  std::size_t breakpoints = 0;
  std::size_t bisections = 0;
};

// A group is dominated as a vector: |T_k| <= eps |T_j| with the Euclidean norm
// over its components.
using PolyGroup = std::vector<UPoly>;

// Whether some order dominates every other on the piece, using the exact
// monotonicity of each ratio in |t - center|.
std::optional<unsigned> dominant_order(const PolyGroup& g, const MonomialPiece& piece, const Rat& eps);

MonomialCover monomialize_groups(const std::vector<PolyGroup>& groups, const Rat& eps);
MonomialCover monomialize(const std::vector<UPoly>& polys, const Rat& eps);
MonomialCover curve_monomialize(const std::vector<UPoly>& gamma, const Rat& eps);

// ---- tangency and scale counting ----

struct TangencyResult {
  bool found = false;
  std::size_t index = 0;
  std::vector<double> ratios;  // |g ^ g'| / (|g||g'|) per time
};

// Throws HypothesisNotMet unless |g(t_i)| < delta |g(t_{i+1})| throughout.
TangencyResult tangency_scan(const std::vector<UPoly>& gamma, const std::vector<double>& times, double delta,
                             double eps);

struct ScaleCount {
  std::vector<int> feasible;
  std::size_t count() const { return feasible.size(); }
};

// Integers k in [k_lo, k_hi] for which some t has |p1(t)| in
// [2^(a1 k - 1), 2^(a1 k + 1)] and |p2(t)| in [2^(-a2 k - 1), 2^(-a2 k + 1)].
// Undecided roots count as feasible, so the count is an upper bound.
ScaleCount scale_count(const UPoly& p1, const UPoly& p2, int a1, int a2, int k_lo, int k_hi);

}  // namespace torsionlab
