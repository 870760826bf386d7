#pragma once

#include <utility>
#include <vector>

#include "torsionlab/polynomial.hpp"
#include "torsionlab/rational.hpp"

namespace torsionlab {

// Dense univariate polynomial over Q, coefficients from degree 0 upward.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rat> coeffs);
  static UPoly from_poly(const RatPoly& p);  // p must have exactly one variable
  static UPoly monomial(unsigned k, const Rat& c);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rat>& coeffs() const { return c_; }
  Rat coeff(unsigned k) const { return k < c_.size() ? c_[k] : Rat(0); }
  Rat leading() const { return c_.empty() ? Rat(0) : c_.back(); }

  Rat eval(const Rat& t) const;
  double eval(double t) const;
  UPoly derivative() const;
  // Taylor coefficients at b: p(t) = sum_k c_k (t-b)^k.
  std::vector<Rat> taylor(const Rat& b) const;
  RatPoly to_poly() const;

  UPoly operator+(const UPoly& o) const;
  UPoly operator-(const UPoly& o) const;
  UPoly operator*(const UPoly& o) const;
  UPoly operator*(const Rat& s) const;
  bool operator==(const UPoly& o) const { return c_ == o.c_; }

 private:
  std::vector<Rat> c_;
  void trim();
  friend std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);
};

std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);
UPoly gcd(UPoly a, UPoly b);  // monic, or zero
UPoly squarefree_part(const UPoly& p);

// Closed rational interval; lo == hi marks an exact rational root.
struct RootInterval {
  Rat lo, hi;
};

// Isolates the distinct real roots of p in increasing order. Each interval
// contains exactly one root and the intervals are pairwise disjoint.
std::vector<RootInterval> isolate_real_roots(const UPoly& p);
// Shrinks an isolating interval of a root of squarefree q to width <= width.
RootInterval refine_root(const UPoly& q, RootInterval iv, const Rat& width);

// Enclosure of p over [lo, hi] by rational interval arithmetic.
std::pair<Rat, Rat> interval_eval(const UPoly& p, const Rat& lo, const Rat& hi);

// Number of distinct real roots of squarefree p in the half-open (a, b].
int sturm_count(const std::vector<UPoly>& chain, const Rat& a, const Rat& b);
std::vector<UPoly> sturm_chain(const UPoly& p);

}  // namespace torsionlab
