#include "torsionlab/numeric.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "torsionlab/errors.hpp"

namespace torsionlab {

CompiledPoly::CompiledPoly(const RatPoly& p) : nvars_(p.nvars()) {
  for (const auto& [e, c] : p.terms()) {
    coeffs_.push_back(c.get_d());
    for (unsigned v : e) {
      exps_.push_back(v);
      max_degree_ = std::max(max_degree_, v);
    }
  }
}

double CompiledPoly::operator()(std::span<const double> x) const {
  if (coeffs_.empty()) return 0.0;
  // Power table on the stack for typical sizes.
  const std::size_t stride = max_degree_ + 1;
  double local[256];
  std::vector<double> heap;
  double* pw = local;
  if (nvars_ * stride > 256) {
    heap.resize(nvars_ * stride);
    pw = heap.data();
  }
  for (std::size_t i = 0; i < nvars_; ++i) {
    pw[i * stride] = 1.0;
    for (std::size_t k = 1; k < stride; ++k) pw[i * stride + k] = pw[i * stride + k - 1] * x[i];
  }
  double sum = 0.0;
  const unsigned* e = exps_.data();
  for (double c : coeffs_) {
    double t = c;
    for (std::size_t i = 0; i < nvars_; ++i) t *= pw[i * stride + e[i]];
    sum += t;
    e += nvars_;
  }
  return sum;
}

CompiledMap::CompiledMap(const std::vector<RatPoly>& comps) {
  for (const auto& p : comps) comps_.emplace_back(p);
}

void CompiledMap::eval(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i](x);
}

std::vector<double> CompiledMap::operator()(std::span<const double> x) const {
  std::vector<double> out(comps_.size());
  eval(x, out);
  return out;
}

namespace {

using cld = std::complex<long double>;

cld horner(const std::vector<cld>& c, cld z) {
  cld acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

std::vector<CertifiedRoot> complex_roots(const UPoly& p) {
  int n = p.degree();
  std::vector<CertifiedRoot> out;
  if (n <= 0) return out;
  std::vector<cld> c, dc;
  for (const auto& r : p.coeffs()) c.emplace_back(static_cast<long double>(r.get_d()), 0.0L);
  for (int k = 1; k <= n; ++k) dc.push_back(c[static_cast<std::size_t>(k)] * static_cast<long double>(k));
  if (n == 1) {
    cld z = -c[0] / c[1];
    out.push_back({std::complex<double>(static_cast<double>(z.real()), static_cast<double>(z.imag())), 0.0});
    return out;
  }
  // Initial guesses on a circle of radius from the coefficient bound.
  long double rad = 0;
  for (int k = 0; k < n; ++k) rad = std::max(rad, std::abs(c[static_cast<std::size_t>(k)] / c[static_cast<std::size_t>(n)]));
  rad = std::pow(rad + 1.0L, 1.0L / n);
  std::vector<cld> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    long double ang = 2.0L * 3.14159265358979323846L * (k + 0.25L) / n + 0.4L;
    z[static_cast<std::size_t>(k)] = std::polar(rad, ang);
  }
  bool settled = false;
  for (int iter = 0; iter < 500 && !settled; ++iter) {
    settled = true;
    for (int k = 0; k < n; ++k) {
      auto& zk = z[static_cast<std::size_t>(k)];
      cld pv = horner(c, zk), dv = horner(dc, zk);
      if (pv == cld(0)) continue;
      cld ratio = pv / dv;
      cld sum = 0;
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0L / (zk - z[static_cast<std::size_t>(j)]);
      cld step = ratio / (1.0L - ratio * sum);
      zk -= step;
      if (std::abs(step) > 1e-18L * (1.0L + std::abs(zk))) settled = false;
    }
  }
  for (int k = 0; k < n; ++k) {
    cld zk = z[static_cast<std::size_t>(k)];
    cld pv = horner(c, zk), dv = horner(dc, zk);
    // Newton polish.
    for (int it = 0; it < 3 && dv != cld(0) && pv != cld(0); ++it) {
      zk -= pv / dv;
      pv = horner(c, zk);
      dv = horner(dc, zk);
    }
    long double r = (dv == cld(0)) ? (pv == cld(0) ? 0.0L : INFINITY) : n * std::abs(pv / dv);
    // Floating evaluation noise floor.
    long double scale = 0;
    for (std::size_t j = 0; j < c.size(); ++j) scale += std::abs(c[j]) * std::pow(std::abs(zk), static_cast<long double>(j));
    long double noise = n * 4e-19L * scale / std::max(std::abs(dv), 1e-300L);
    r = std::max(r, noise);
    out.push_back({std::complex<double>(static_cast<double>(zk.real()), static_cast<double>(zk.imag())),
                   static_cast<double>(r)});
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i].radius)) throw RootIsolationFailure("root iteration did not converge");
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (std::abs(out[i].z - out[j].z) <= out[i].radius + out[j].radius)
        throw RootIsolationFailure("inclusion disks of distinct roots overlap");
  }
  return out;
}

std::vector<double> real_roots_in(const std::vector<double>& coeffs, double a, double b) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<double> roots;
  if (c.size() <= 1) return roots;
  if (c.size() == 2) {
    double r = -c[0] / c[1];
    if (r >= a && r <= b) roots.push_back(r);
    return roots;
  }
  // Critical points split [a, b] into monotone pieces.
  std::vector<double> d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
  std::vector<double> cuts{a};
  for (double r : real_roots_in(d, a, b))
    if (r > cuts.back()) cuts.push_back(r);
  if (b > cuts.back()) cuts.push_back(b);
  auto f = [&](double t) {
    double acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) {
      if (roots.empty() || roots.back() != lo) roots.push_back(lo);
      continue;
    }
    if (fhi == 0.0) continue;  // picked up as the next piece's left end
    if ((flo < 0) == (fhi < 0)) continue;
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0) == (flo < 0))
        lo = mid, flo = fm;
      else
        hi = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  if (f(b) == 0.0 && (roots.empty() || roots.back() != b)) roots.push_back(b);
  return roots;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, double* error) {
  if (a == b) {
    if (error) *error = 0;
    return 0;
  }
  double err = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol, &err);
  if (error) *error = err;
  return v;
}

std::vector<double> to_doubles(std::span<const Rat> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(r.get_d());
  return out;
}

}  // namespace torsionlab
