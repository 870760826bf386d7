#pragma once

#include <string>
#include <vector>

#include "torsionlab/geometry.hpp"

namespace torsionlab {

// A pair of projections pi_j: R^n -> R^{n-1} and their fiber fields.
struct ProjectionPair {
  std::string name;
  PolyMap pi1, pi2;
  std::size_t dim() const { return pi1.nvars(); }
  VectorField x1() const { return hodge_star_field(pi1); }
  VectorField x2() const { return hodge_star_field(pi2); }
  WordTable table(int cap) const { return build_word_table(x1(), x2(), cap); }
};

// pi1(x, t) = x and pi2(x, t) = x - gamma(t) on R^d x R, for gamma given by
// univariate polynomials in t.
ProjectionPair curve_pair(const std::vector<RatPoly>& gamma, std::string name = "curve");

// gamma(t) = (t, t^2, ..., t^d).
ProjectionPair moment_curve(unsigned d);

// pi1 = x1 and pi2 = x2^k on R^2.
ProjectionPair planar_power(unsigned k);

// Parses a curve such as "t, t^2 + a t^3" component by component.
std::vector<RatPoly> parse_curve(const std::vector<std::string>& components);

}  // namespace torsionlab
