#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "torsionlab/geometry.hpp"
#include "torsionlab/linalg.hpp"

namespace torsionlab {

// Element of a Lie algebra with polynomial coefficients in a common ring.
using LieElement = std::vector<RatPoly>;

// Finite-dimensional nilpotent Lie algebra given by structure constants,
// together with a realization of each basis element as a vector field.
struct AbstractNilpotent {
  std::size_t dim = 0;
  int step = 0;
  std::vector<std::string> labels;
  std::vector<VectorField> basis_fields;
  std::vector<Rat> constants;  // [e_i, e_j] = sum_k constants[(i*dim + j)*dim + k] e_k

  const Rat& c(std::size_t i, std::size_t j, std::size_t k) const { return constants[(i * dim + j) * dim + k]; }
  RatVec bracket(const RatVec& a, const RatVec& b) const;
  LieElement bracket(const LieElement& a, const LieElement& b) const;
  VectorField realize(const RatVec& v) const;
  // Same vector space with the bracket negated.
  AbstractNilpotent opposite() const;
  // Length of the lower central series.
  int nilpotency_class() const;
  bool satisfies_jacobi() const;
};

// Basis of the span of the table's fields with its structure constants.
// Throws DependentBracket if a bracket leaves the span.
AbstractNilpotent abstract_algebra(const WordTable& table);

// log(exp(a) exp(b)) truncated after brackets of length `step`.
RatVec bch(const AbstractNilpotent& alg, const RatVec& a, const RatVec& b, int step);
LieElement bch(const AbstractNilpotent& alg, const LieElement& a, const LieElement& b, int step);

// Basis e_1..e_N whose tail spans span(e_k..e_N) are subalgebras, each an
// ideal in the previous one, with span(e_{n+1}..e_N) = z.
struct MalcevBasis {
  AbstractNilpotent algebra;    // structure constants in the new basis
  std::vector<RatVec> vectors;  // new basis in the original coordinates
  std::size_t n = 0;            // codimension of z
};

MalcevBasis weak_malcev(const AbstractNilpotent& alg, const std::vector<RatVec>& z_spanning);

// Second-kind coordinates: psi(x) = exp(x_1 e_1) ... exp(x_N e_N).
// q solves exp(x2 . e) psi(x1) = psi(q(x1, x2)); r solves psi(x1) exp(x2 . e)
// = psi(r(x1, x2)). Polynomials in (x1_1..x1_N, x2_1..x2_N).
struct GroupLaw {
  std::size_t N = 0;
  std::vector<RatPoly> q, r;
};

GroupLaw group_law(const MalcevBasis& basis);

// Second-kind coordinates of exp(Z) for Z with polynomial coefficients.
LieElement second_kind_coordinates(const AbstractNilpotent& alg, LieElement z);

// Orbit map y -> exp(y_1 E_1) o ... o exp(y_n E_n)(x0) for the Malcev basis
// through the isotropy algebra of x0. The group law is that of the opposite
// algebra, which matches composition of flows.
struct CoveringMap {
  AbstractNilpotent algebra;
  MalcevBasis basis;
  GroupLaw law;
  std::vector<Rat> x0;
  std::vector<RatVec> isotropy;
  std::vector<RatPoly> phi;  // polynomials in y_1..y_n
};

CoveringMap covering_map(const WordTable& table, const std::vector<Rat>& x0);

}  // namespace torsionlab
