#pragma once

#include <random>
#include <vector>

#include "torsionlab/polyalg.hpp"
#include "torsionlab/polynomial.hpp"

namespace testing_support {

using torsionlab::Rat;
using torsionlab::RatPoly;

inline Rat random_rational(std::mt19937_64& rng, int range = 5, int max_den = 4) {
  std::uniform_int_distribution<int> num(-range * max_den, range * max_den);
  std::uniform_int_distribution<int> den(1, max_den);
  Rat r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline std::vector<Rat> random_point(std::mt19937_64& rng, std::size_t n, int range = 3, int max_den = 5) {
  std::vector<Rat> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(random_rational(rng, range, max_den));
  return x;
}

inline RatPoly random_poly(std::mt19937_64& rng, std::size_t nvars, unsigned max_deg, int terms) {
  RatPoly p(nvars);
  std::uniform_int_distribution<unsigned> deg(0, max_deg);
  for (int k = 0; k < terms; ++k) {
    torsionlab::Exponent e(nvars, 0);
    unsigned budget = deg(rng);
    for (unsigned b = 0; b < budget; ++b) e[std::uniform_int_distribution<std::size_t>(0, nvars - 1)(rng)] += 1;
    p.add_term(e, random_rational(rng, 3, 3));
  }
  return p;
}

// 64 rational sample points inside a piece; unbounded ends are sampled on a
// geometric scale away from the finite end.
inline std::vector<Rat> piece_samples(const torsionlab::MonomialPiece& piece) {
  std::vector<Rat> out;
  for (int i = 0; i < 64; ++i) {
    if (piece.lo && piece.hi) {
      out.push_back(*piece.lo + (*piece.hi - *piece.lo) * Rat(2 * i + 1, 128));
    } else {
      Rat step = torsionlab::pow(Rat(2), i / 2 - 8) * Rat(i % 2 ? 3 : 2, 2);
      out.push_back(piece.lo ? Rat(*piece.lo + step) : Rat(*piece.hi - step));
    }
  }
  return out;
}

// Checks |T_j(t)| <= eps |T_k(t)| for j != k, where T_j is the j-th Taylor term
// of the group at the center, using derivatives of the multivariate ring.
inline bool dominated_at(const std::vector<torsionlab::UPoly>& group, const Rat& center, unsigned k, const Rat& t,
                         const Rat& eps) {
  std::vector<Rat> norms;
  for (const auto& u : group) {
    RatPoly p = u.to_poly();
    std::vector<Rat> at{center};
    Rat s = t - center;
    for (unsigned j = 0; !p.is_zero(); ++j) {
      Rat term = p.eval(at) / torsionlab::factorial(j) * torsionlab::pow(s, static_cast<int>(j));
      if (norms.size() <= j) norms.resize(j + 1, Rat(0));
      norms[j] += term * term;
      p = p.partial(0);
    }
  }
  Rat top = k < norms.size() ? norms[k] : Rat(0);
  for (std::size_t j = 0; j < norms.size(); ++j)
    if (j != k && norms[j] > eps * eps * top) return false;
  return true;
}

}  // namespace testing_support
