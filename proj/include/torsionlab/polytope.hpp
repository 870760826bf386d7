#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "torsionlab/geometry.hpp"
#include "torsionlab/numeric.hpp"
#include "torsionlab/torsion.hpp"

namespace torsionlab {

using Lattice2 = std::array<int, 2>;

struct Point2 {
  Rat x, y;
  bool operator==(const Point2& o) const { return x == o.x && y == o.y; }
};

// Words whose fields agree up to sign within one bidegree, with the least
// word as representative.
struct WordClass {
  Word representative;
  std::vector<Word> members;
  VectorField field;
  Lattice2 degree;
};

std::vector<WordClass> word_classes(const WordTable& table);

struct LambdaEntry {
  std::vector<Word> words;  // one representative per class, increasing
  RatPoly lambda;           // det of the fields as columns
  Lattice2 degree;
};

struct LambdaOptions {
  std::size_t max_tuples = 500000;
  // Skip tuples whose degree lies in the quadrant of an existing generator.
  // Sound for the union polytope only.
  bool prune_dominated = false;
};

struct LambdaTable {
  std::vector<WordClass> classes;
  std::vector<LambdaEntry> entries;  // nonzero determinants only
  std::size_t tuples_examined = 0;
  std::size_t tuples_pruned = 0;
};

LambdaTable lambda_table(const WordTable& table, const LambdaOptions& options = {});

// Convex hull of finitely many points plus the positive quadrant, stored by
// its extreme points ordered by increasing x (and so decreasing y).
class Polytope2D {
 public:
  Polytope2D() = default;
  static Polytope2D from_points(const std::vector<Point2>& points);
  static Polytope2D from_generators(const std::vector<Lattice2>& generators);

  bool empty() const { return extreme_.empty(); }
  const std::vector<Point2>& extreme_points() const { return extreme_; }
  const std::vector<Lattice2>& generators() const { return generators_; }

  bool contains(const Point2& p) const;
  bool subset_of(const Polytope2D& other) const;
  Polytope2D intersect(const Polytope2D& other) const;
  // Lattice points on the lower-left boundary chain.
  std::vector<Lattice2> minimal_lattice_points() const;
  bool operator==(const Polytope2D& o) const { return extreme_ == o.extreme_; }

 private:
  std::vector<Point2> extreme_;
  std::vector<Lattice2> generators_;
};

enum class NewtonFlavor { Union, Point, Intersection };

// Union: degrees of all nonvanishing determinants. Point: those nonzero at
// x0. Intersection: intersection of the point polytopes over the samples.
Polytope2D newton_polytope(const LambdaTable& table, NewtonFlavor flavor,
                           const std::vector<std::vector<Rat>>& points = {});

struct ExtremeAndMinimal {
  std::vector<Point2> extreme;
  std::vector<Lattice2> minimal;
};
ExtremeAndMinimal extreme_and_minimal(const Polytope2D& p);

// w_b(x) = sum over determinants of degree b of |lambda(x)|^(1/(b1+b2-1)).
struct WeightSpec {
  Lattice2 b{0, 0};
  std::vector<RatPoly> summands;
  Rat exponent;
  std::array<Rat, 2> p;
  std::vector<CompiledPoly> compiled;
  double evaluate(std::span<const double> x) const;
};

WeightSpec weight_spec(const LambdaTable& table, const Lattice2& b);

struct PolytopeViaJ {
  Polytope2D polytope;
  std::vector<std::pair<std::vector<unsigned>, Lattice2>> contributions;  // beta and its degree
  bool truncated = false;  // some multi-index exceeded the budget
};

// Hull of b(beta) + quadrant over beta with J_beta(x0) != 0 for both
// alternation patterns. max_beta_per_var < 0 means no budget.
PolytopeViaJ polytope_via_J(const WordTable& table, const std::vector<Rat>& x0, int max_beta_per_var = -1);

// Same, reusing precomputed flow compositions for both patterns.
PolytopeViaJ polytope_via_J(const IterFlowMap& psi12, const IterFlowMap& psi21, const std::vector<Rat>& x0,
                            int max_beta_per_var = -1);

}  // namespace torsionlab
