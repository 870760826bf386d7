#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "torsionlab/rational.hpp"

namespace torsionlab {

using Exponent = std::vector<unsigned>;

unsigned total_degree(const Exponent& e);

// Graded lexicographic order with x1 > x2 > ... > xn.
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

// Sparse multivariate polynomial with rational coefficients. Terms with zero
// coefficient are never stored, so structural equality is polynomial equality.
class RatPoly {
 public:
  using TermMap = std::map<Exponent, Rat, GrlexLess>;

  RatPoly() = default;
  explicit RatPoly(std::size_t nvars) : nvars_(nvars) {}

  static RatPoly constant(std::size_t nvars, const Rat& c);
  static RatPoly variable(std::size_t nvars, std::size_t index);
  static RatPoly monomial(const Exponent& e, const Rat& c);

  // Infix syntax with + - * ^ and parentheses. Variables are x1..xn unless
  // explicit names are given. Coefficients may be fractions or decimals.
  static RatPoly parse(std::string_view text, std::size_t nvars);
  static RatPoly parse(std::string_view text, const std::vector<std::string>& names);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rat constant_term() const;
  Rat coefficient(const Exponent& e) const;

  // -1 for the zero polynomial.
  int total_degree() const;
  unsigned degree_in(std::size_t var) const;

  // Leading term in grlex order. Undefined on zero.
  const Exponent& leading_exponent() const { return terms_.rbegin()->first; }
  const Rat& leading_coefficient() const { return terms_.rbegin()->second; }

  void add_term(const Exponent& e, const Rat& c);

  RatPoly& operator+=(const RatPoly& o);
  RatPoly& operator-=(const RatPoly& o);
  RatPoly& operator*=(const RatPoly& o);
  RatPoly& operator*=(const Rat& c);
  RatPoly operator-() const;
  friend RatPoly operator+(RatPoly a, const RatPoly& b) { return a += b; }
  friend RatPoly operator-(RatPoly a, const RatPoly& b) { return a -= b; }
  friend RatPoly operator*(const RatPoly& a, const RatPoly& b);
  friend RatPoly operator*(RatPoly a, const Rat& c) { return a *= c; }
  friend RatPoly operator*(const Rat& c, RatPoly a) { return a *= c; }
  friend bool operator==(const RatPoly& a, const RatPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  RatPoly pow(unsigned k) const;
  Rat eval(std::span<const Rat> point) const;
  RatPoly partial(std::size_t var) const;

  // Substitutes maps[i] for variable i. All maps share one variable count.
  RatPoly compose(std::span<const RatPoly> maps) const;

  // Renames variable i to target[i] in a ring with new_nvars variables.
  RatPoly embed(std::size_t new_nvars, std::span<const std::size_t> target) const;

  // Fixes variables var[i] to values[i]; the result keeps the remaining
  // variables in their original order.
  RatPoly restrict(std::span<const std::size_t> vars, std::span<const Rat> values) const;

  // Groups terms by the exponents of the trailing k variables; each value is
  // a polynomial in the leading nvars-k variables.
  std::map<Exponent, RatPoly, GrlexLess> split_tail(std::size_t k) const;

  std::string to_string() const;
  std::string to_string(const std::vector<std::string>& names) const;

 private:
  std::size_t nvars_ = 0;
  TermMap terms_;
};

std::vector<std::string> default_names(std::size_t nvars, std::string_view stem = "x");

// Exact quotient a / b. Throws ValidationError if b does not divide a.
RatPoly divide_exact(const RatPoly& a, const RatPoly& b);

}  // namespace torsionlab
