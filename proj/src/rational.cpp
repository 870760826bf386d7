#include "torsionlab/rational.hpp"

#include <cmath>

#include "torsionlab/errors.hpp"

namespace torsionlab {

Rat parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw ValidationError("empty rational literal");
  auto dot = s.find('.');
  try {
    if (dot != std::string::npos) {
      if (s.find('/') != std::string::npos) throw ValidationError("mixed decimal and fraction: " + s);
      std::string whole = s.substr(0, dot);
      std::string frac = s.substr(dot + 1);
      bool neg = !whole.empty() && whole[0] == '-';
      if (neg || (!whole.empty() && whole[0] == '+')) whole.erase(whole.begin());
      if (whole.empty()) whole = "0";
      for (char c : whole + frac)
        if (!std::isdigit(static_cast<unsigned char>(c))) throw ValidationError("bad rational literal: " + s);
      Int num(whole + frac, 10);
      Int den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
      Rat r(num, den);
      r.canonicalize();
      return neg ? Rat(-r) : r;
    }
    if (!s.empty() && s[0] == '+') s.erase(s.begin());
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/' && c != '-')
        throw ValidationError("bad rational literal: " + s);
    Rat r(s, 10);
    if (r.get_den() == 0) throw ValidationError("zero denominator: " + s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw ValidationError("bad rational literal: " + s);
  }
}

std::string to_string(const Rat& r) { return r.get_str(); }

Rat factorial(unsigned k) {
  Int f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return Rat(f);
}

Rat pow(const Rat& base, int exponent) {
  Rat result = 1;
  Rat b = exponent >= 0 ? base : Rat(1 / base);
  unsigned e = static_cast<unsigned>(exponent >= 0 ? exponent : -exponent);
  while (e) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

int sign(const Rat& r) { return sgn(r); }

Rat rational_from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("non-finite value");
  return Rat(x);
}

bool root_at_least(const Rat& a, unsigned n, const Rat& b) {
  if (b <= 0) return true;
  return a >= pow(b, static_cast<int>(n));
}

}  // namespace torsionlab
