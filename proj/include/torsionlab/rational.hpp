#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace torsionlab {

using Rat = mpq_class;
using Int = mpz_class;

// Accepts "p", "p/q" and finite decimals such as "-0.125".
Rat parse_rational(std::string_view text);
std::string to_string(const Rat& r);

// n/d in lowest terms.
inline Rat make_rat(long n, long d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

Rat factorial(unsigned k);
Rat pow(const Rat& base, int exponent);
int sign(const Rat& r);

// Exact value of a finite double.
Rat rational_from_double(double x);

// Exact comparison of a^(1/n) against b for a, b >= 0.
bool root_at_least(const Rat& a, unsigned n, const Rat& b);

}  // namespace torsionlab
