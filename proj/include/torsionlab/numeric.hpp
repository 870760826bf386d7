#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "torsionlab/polynomial.hpp"
#include "torsionlab/upoly.hpp"

namespace torsionlab {

// Floating-point evaluator for a RatPoly.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const RatPoly& p);
  std::size_t nvars() const { return nvars_; }
  double operator()(std::span<const double> x) const;
  double operator()(std::initializer_list<double> x) const {
    return (*this)(std::span<const double>(x.begin(), x.size()));
  }

 private:
  std::size_t nvars_ = 0;
  unsigned max_degree_ = 0;
  std::vector<double> coeffs_;
  std::vector<unsigned> exps_;  // nvars_ entries per term
};

// Compiled vector of polynomials sharing a ring.
class CompiledMap {
 public:
  CompiledMap() = default;
  explicit CompiledMap(const std::vector<RatPoly>& comps);
  std::size_t size() const { return comps_.size(); }
  void eval(std::span<const double> x, std::span<double> out) const;
  std::vector<double> operator()(std::span<const double> x) const;
  const CompiledPoly& operator[](std::size_t i) const { return comps_[i]; }

 private:
  std::vector<CompiledPoly> comps_;
};

struct CertifiedRoot {
  std::complex<double> z;
  double radius;  // a root of the polynomial lies in the closed disk
};

// Complex roots of a squarefree polynomial via simultaneous iteration,
// each certified by the n|p/p'| inclusion disk. Throws RootIsolationFailure
// when the disks overlap or iteration does not settle.
std::vector<CertifiedRoot> complex_roots(const UPoly& p);

// Real roots of a polynomial with double coefficients inside [a, b], sorted.
std::vector<double> real_roots_in(const std::vector<double>& coeffs, double a, double b);

// Adaptive Gauss-Kronrod quadrature on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                 double* error = nullptr);

std::vector<double> to_doubles(std::span<const Rat> v);

}  // namespace torsionlab
