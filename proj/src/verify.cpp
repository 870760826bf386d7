#include "torsionlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torsionlab/errors.hpp"
#include "torsionlab/qmc.hpp"

namespace torsionlab {

namespace {

void check_sizes(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(got) + ", expected " +
                            std::to_string(want));
}

double vol_d(const Box& b) { return b.volume().get_d(); }

// Point of the box from a unit-cube point.
void to_box(const Box& b, const double* u, double* x) {
  for (std::size_t i = 0; i < b.dim(); ++i) x[i] = b.lo_d()[i] + u[i] * (b.hi_d()[i] - b.lo_d()[i]);
}

}  // namespace

Box::Box(std::vector<Rat> lo, std::vector<Rat> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw DimensionMismatch("box corners differ in dimension");
  for (std::size_t i = 0; i < lo_.size(); ++i)
    if (!(lo_[i] < hi_[i])) throw ValidationError("box is degenerate in coordinate " + std::to_string(i + 1));
  dlo_ = to_doubles(lo_);
  dhi_ = to_doubles(hi_);
}

Rat Box::volume() const {
  Rat v = 1;
  for (std::size_t i = 0; i < lo_.size(); ++i) v *= hi_[i] - lo_[i];
  return v;
}

bool Box::contains(std::span<const double> y) const {
  for (std::size_t i = 0; i < dlo_.size(); ++i)
    if (!(y[i] >= dlo_[i] && y[i] < dhi_[i])) return false;
  return true;
}

bool Box::overlaps(const Box& o) const {
  for (std::size_t i = 0; i < lo_.size(); ++i)
    if (!(lo_[i] < o.hi_[i] && o.lo_[i] < hi_[i])) return false;
  return true;
}

BoxUnion::BoxUnion(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (boxes_[i].dim() != boxes_[0].dim()) throw DimensionMismatch("boxes in a union differ in dimension");
    for (std::size_t j = 0; j < i; ++j)
      if (boxes_[i].overlaps(boxes_[j])) throw ValidationError("boxes in a union must be disjoint");
  }
}

Rat BoxUnion::volume() const {
  Rat v = 0;
  for (const auto& b : boxes_) v += b.volume();
  return v;
}

bool BoxUnion::contains(std::span<const double> y) const {
  for (const auto& b : boxes_)
    if (b.contains(y)) return true;
  return false;
}

InequalitySetup InequalitySetup::build(const ProjectionPair& pair, const std::vector<unsigned>& beta, Pattern pattern,
                                       int cap) {
  InequalitySetup s;
  s.n = pair.dim();
  if (s.n < 2 || s.n > 32) throw ValidationError("verification supports dimensions 2 to 32");
  s.pi1 = pair.pi1;
  s.pi2 = pair.pi2;
  WordTable table = pair.table(cap < 0 ? 2 : cap);
  s.profile = torsion_profile(table, beta, pattern);
  s.cpi1 = CompiledMap(s.pi1.comps);
  s.cpi2 = CompiledMap(s.pi2.comps);
  s.J = CompiledPoly(s.profile.J);
  s.rho_exponent = s.profile.rho_exponent.get_d();
  s.p = {s.profile.p[0].get_d(), s.profile.p[1].get_d()};
  return s;
}

double InequalitySetup::rho(std::span<const double> x) const { return std::pow(std::abs(J(x)), rho_exponent); }

void RegionSpec::validate(std::size_t n) const {
  check_sizes(domain.dim(), n, "region domain");
  if (e1 && !e1->empty()) check_sizes(e1->boxes()[0].dim(), n - 1, "E1");
  if (e2 && !e2->empty()) check_sizes(e2->boxes()[0].dim(), n - 1, "E2");
}

bool RegionSpec::contains(const InequalitySetup& s, std::span<const double> x) const {
  double y[32];
  if (e1) {
    s.cpi1.eval(x, std::span<double>(y, s.n - 1));
    if (!e1->contains(std::span<const double>(y, s.n - 1))) return false;
  }
  if (e2) {
    s.cpi2.eval(x, std::span<double>(y, s.n - 1));
    if (!e2->contains(std::span<const double>(y, s.n - 1))) return false;
  }
  if (band) {
    double r = s.rho(x);
    double lo = std::ldexp(1.0, *band);
    if (!(r >= lo && r < 2 * lo)) return false;
  }
  return true;
}

Estimate measure(const InequalitySetup& setup, const RegionSpec& region, std::uint64_t samples, std::uint64_t seed) {
  region.validate(setup.n);
  const double v = vol_d(region.domain);
  if (!(v > 0)) throw ValidationError("region domain has zero volume");
  auto acc = qmc_mean(setup.n, seed, samples, [&](const double* u) {
    double x[32];
    to_box(region.domain, u, x);
    return region.contains(setup, std::span<const double>(x, setup.n)) ? 1.0 : 0.0;
  });
  return {v * acc.mean(), v * acc.stderr_of_mean(), samples, seed};
}

RwtReport rwt_ratio(const InequalitySetup& setup, const RegionSpec& region, std::uint64_t samples,
                    std::uint64_t seed) {
  if (!region.e1 || !region.e2) throw ValidationError("restricted weak type ratio needs both E1 and E2");
  RwtReport rep;
  rep.e1 = region.e1->volume().get_d();
  rep.e2 = region.e2->volume().get_d();
  rep.omega = measure(setup, region, samples, seed);
  if (!(rep.e1 > 0) || !(rep.e2 > 0) || !(rep.omega.value > 0)) {
    rep.degenerate = true;
    return rep;
  }
  rep.ratio = rep.omega.value / (std::pow(rep.e1, 1 / setup.p[0]) * std::pow(rep.e2, 1 / setup.p[1]));
  rep.alpha1 = rep.omega.value / rep.e1;
  rep.alpha2 = rep.omega.value / rep.e2;
  rep.alpha_form = std::pow(rep.alpha1, setup.profile.b[0]) * std::pow(rep.alpha2, setup.profile.b[1]) /
                   rep.omega.value;
  return rep;
}

StepFunction::StepFunction(std::vector<Level> levels) : levels_(std::move(levels)) {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      for (const auto& a : levels_[i].set.boxes())
        for (const auto& b : levels_[j].set.boxes()) {
          if (a.dim() != b.dim()) throw DimensionMismatch("step function levels differ in dimension");
          if (a.overlaps(b)) throw ValidationError("step function level sets must be disjoint");
        }
}

double StepFunction::operator()(std::span<const double> y) const {
  for (const auto& l : levels_)
    if (l.set.contains(y)) return l.coef.get_d();
  return 0.0;
}

double StepFunction::norm(double p) const {
  if (!(p >= 1)) throw ValidationError("norm exponent must be at least 1");
  double s = 0;
  for (const auto& l : levels_) s += std::pow(std::abs(l.coef.get_d()), p) * l.set.volume().get_d();
  return std::pow(s, 1 / p);
}

bool StepFunction::is_zero() const {
  for (const auto& l : levels_)
    if (l.coef != 0 && !l.set.empty()) return false;
  return true;
}

BilinearReport bilinear_form(const InequalitySetup& setup, const StepFunction& f1, const StepFunction& f2,
                             const Box& domain, std::uint64_t samples, std::uint64_t seed) {
  check_sizes(domain.dim(), setup.n, "bilinear domain");
  BilinearReport rep;
  rep.norm1 = f1.norm(setup.p[0]);
  rep.norm2 = f2.norm(setup.p[1]);
  const double v = vol_d(domain);
  const std::size_t n = setup.n;
  auto acc = qmc_mean(n, seed, samples, [&](const double* u) {
    double x[32], y[32];
    to_box(domain, u, x);
    std::span<const double> xs(x, n);
    std::span<double> ys(y, n - 1);
    setup.cpi1.eval(xs, ys);
    double a = f1(ys);
    if (a == 0) return 0.0;
    setup.cpi2.eval(xs, ys);
    double b = f2(ys);
    if (b == 0) return 0.0;
    return a * b * setup.rho(xs);
  });
  rep.form = {v * acc.mean(), v * acc.stderr_of_mean(), samples, seed};
  if (rep.norm1 > 0 && rep.norm2 > 0) rep.ratio = rep.form.value / (rep.norm1 * rep.norm2);
  return rep;
}

ScaleProfile scale_profile(const InequalitySetup& setup, const StepFunction& f1, const StepFunction& f2,
                           const Box& domain, int m0, int m1, std::uint64_t samples, std::uint64_t seed) {
  check_sizes(domain.dim(), setup.n, "profile domain");
  if (m1 < m0) throw ValidationError("band range is empty");
  ScaleProfile prof;
  const std::size_t bands = static_cast<std::size_t>(m1 - m0 + 1);
  const std::size_t n = setup.n;
  const double v = vol_d(domain);
  auto accs = qmc_means(n, seed, samples, bands, [&](const double* u, double* out) {
    std::fill(out, out + bands, 0.0);
    double x[32], y[32];
    to_box(domain, u, x);
    std::span<const double> xs(x, n);
    std::span<double> ys(y, n - 1);
    setup.cpi1.eval(xs, ys);
    double a = f1(ys);
    if (a == 0) return;
    setup.cpi2.eval(xs, ys);
    double b = f2(ys);
    if (b == 0) return;
    double r = setup.rho(xs);
    if (!(r > 0)) return;
    int m = static_cast<int>(std::floor(std::log2(r)));
    // Guard against rounding at exact powers of two.
    if (std::ldexp(1.0, m + 1) <= r) ++m;
    if (std::ldexp(1.0, m) > r) --m;
    if (m < m0 || m > m1) return;
    out[m - m0] = a * b * r;
  });
  prof.norm1 = f1.norm(setup.p[0]);
  prof.norm2 = f2.norm(setup.p[1]);
  prof.theta = 1 / (1 / setup.p[0] + 1 / setup.p[1]);
  for (std::size_t k = 0; k < bands; ++k) {
    Estimate e{v * accs[k].mean(), v * accs[k].stderr_of_mean(), samples, seed};
    prof.bands.push_back(m0 + static_cast<int>(k));
    prof.per_band.push_back(e);
    prof.total += e.value;
    if (e.value > 0) {
      ++prof.nonempty;
      prof.theta_sum += std::pow(e.value, prof.theta);
    }
  }
  if (prof.norm1 > 0 && prof.norm2 > 0) prof.total_ratio = prof.total / (prof.norm1 * prof.norm2);
  return prof;
}

std::vector<double> dyadic_deltas(unsigned count) {
  std::vector<double> d;
  for (unsigned i = 0; i < count; ++i) d.push_back(std::ldexp(1.0, -4 - static_cast<int>(i)));
  return d;
}

CounterexampleReport counterexample_2d(unsigned k, const std::vector<double>& deltas, std::uint64_t samples,
                                       std::uint64_t seed, CounterexampleKind kind, double cutoff) {
  if (k < 1) throw ValidationError("counterexample power must be positive");
  if (!(cutoff > 0 && cutoff < 1)) throw ValidationError("counterexample cutoff must lie in (0, 1)");
  CounterexampleReport rep;
  rep.k = k;
  rep.cutoff = cutoff;
  std::vector<unsigned> beta{k - 1, 0};
  auto setup = InequalitySetup::build(planar_power(k), beta);
  const double kd = k;
  const bool logw = kind == CounterexampleKind::LogWeighted;
  auto f2 = [&](double y) { return logw ? 1.0 / (std::pow(y, 1 / kd) * std::abs(std::log(y))) : 1.0; };

  for (double delta : deltas) {
    if (!(delta > 0 && delta < cutoff)) throw ValidationError("truncation must lie in (0, cutoff)");
    CounterexampleRow row;
    row.delta = delta;
    // x2 = e^v with v uniform over the support of f2(x2^k).
    const double v0 = std::log(delta) / kd, v1 = std::log(cutoff) / kd;
    auto acc = qmc_mean(2, seed, samples, [&](const double* u) {
      double x[2] = {u[0], std::exp(v0 + u[1] * (v1 - v0))};
      double y = std::pow(x[1], kd);
      if (!(y > delta && y <= cutoff)) return 0.0;
      return f2(y) * x[1] * setup.rho(std::span<const double>(x, 2));
    });
    row.form = {(v1 - v0) * acc.mean(), (v1 - v0) * acc.stderr_of_mean(), samples, seed};
    // Same integral in y = x2^k, dx2 = y^(1/k - 1) / k dy, in log y.
    const double r = setup.rho(std::vector<double>{0.5, 0.5});
    rep.rho = r;
    const double ld = std::log(delta), lc = std::log(cutoff);
    if (logw)
      row.oracle_form = r * (std::log(std::abs(ld)) - std::log(std::abs(lc))) / kd;
    else
      row.oracle_form = r * (std::pow(cutoff, 1 / kd) - std::pow(delta, 1 / kd));
    double nk = integrate([&](double s) {
      double y = std::exp(s);
      return std::pow(f2(y), kd) * y;
    }, ld, lc, 1e-12);
    row.norm2 = std::pow(nk, 1 / kd);
    row.ratio = row.form.value / row.norm2;  // ||f1||_1 = 1
    rep.rows.push_back(row);
  }
  rep.strictly_increasing = !rep.rows.empty();
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    rep.strictly_increasing = rep.strictly_increasing && rep.rows[i].ratio > rep.rows[i - 1].ratio;
  if (!rep.rows.empty() && rep.rows.front().ratio > 0) rep.growth = rep.rows.back().ratio / rep.rows.front().ratio;
  return rep;
}

std::array<double, 2> enclose(const RatPoly& p, std::span<const double> lo, std::span<const double> hi) {
  check_sizes(lo.size(), p.nvars(), "enclosure box");
  double a = 0, b = 0;
  for (const auto& [e, c] : p.terms()) {
    double tl = c.get_d(), th = tl;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      double pl = std::pow(lo[i], e[i]), ph = std::pow(hi[i], e[i]);
      double mn = std::min(pl, ph), mx = std::max(pl, ph);
      if (e[i] % 2 == 0 && lo[i] < 0 && hi[i] > 0) mn = 0;
      double c1 = tl * mn, c2 = tl * mx, c3 = th * mn, c4 = th * mx;
      tl = std::min({c1, c2, c3, c4});
      th = std::max({c1, c2, c3, c4});
    }
    a += tl;
    b += th;
  }
  return {a, b};
}

CoareaReport coarea_check(const ProjectionPair& pair, int j, const Box& box, std::uint64_t samples,
                          std::uint64_t seed) {
  if (j != 1 && j != 2) throw ValidationError("fiber index must be 1 or 2");
  const std::size_t n = pair.dim();
  check_sizes(box.dim(), n, "coarea box");
  const PolyMap& pi = j == 1 ? pair.pi1 : pair.pi2;
  VectorField x = j == 1 ? pair.x1() : pair.x2();
  const RatPoly& last = x.comps[n - 1];
  if (!last.is_constant() || last.is_zero())
    throw HypothesisNotMet("the slice x_n = 0 is a section only when the last component of the field is a nonzero constant");
  FlowMap flow = lie_series_flow(x);

  // Section: solve pi(x', 0) = y for x' by Newton, starting from the last root.
  std::vector<RatPoly> slice;
  std::vector<std::size_t> fix{n - 1};
  std::vector<Rat> zero{Rat(0)};
  for (const auto& c : pi.comps) slice.push_back(c.restrict(fix, zero));
  CompiledMap cslice(slice);
  std::vector<CompiledPoly> dslice;
  for (const auto& c : slice)
    for (std::size_t i = 0; i + 1 < n; ++i) dslice.emplace_back(c.partial(i));

  // Flow coordinates as polynomials in s with x-dependent coefficients.
  std::vector<std::vector<CompiledPoly>> coef(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto parts = flow.map[i].split_tail(1);
    unsigned deg = 0;
    for (const auto& [e, _] : parts) deg = std::max(deg, e[0]);
    coef[i].assign(deg + 1, CompiledPoly(RatPoly(n)));
    for (const auto& [e, q] : parts) coef[i][e[0]] = CompiledPoly(q);
  }

  // Image enclosure of the box.
  std::vector<double> ylo(n - 1), yhi(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto iv = enclose(pi.comps[i], box.lo_d(), box.hi_d());
    double pad = 1e-9 * (1 + iv[1] - iv[0]);
    ylo[i] = iv[0] - pad;
    yhi[i] = iv[1] + pad;
  }
  double yvol = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) yvol *= yhi[i] - ylo[i];

  const std::size_t m = n - 1;
  auto acc = qmc_mean(m, seed, samples, [&](const double* u) {
    std::vector<double> y(m), xs(n, 0.0), f(m), jac(m * m);
    for (std::size_t i = 0; i < m; ++i) y[i] = ylo[i] + u[i] * (yhi[i] - ylo[i]);
    // Newton on the slice.
    for (std::size_t i = 0; i < m; ++i) xs[i] = y[i];
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      std::span<const double> xin(xs.data(), m);
      cslice.eval(xin, f);
      double res = 0;
      for (std::size_t i = 0; i < m; ++i) {
        f[i] -= y[i];
        res = std::max(res, std::abs(f[i]));
      }
      if (res < 1e-13 * (1 + std::abs(y[0]))) {
        ok = true;
        break;
      }
      for (std::size_t k = 0; k < m * m; ++k) jac[k] = dslice[k](xin);
      // Gaussian elimination with partial pivoting.
      std::vector<double> a = jac, b(m);
      for (std::size_t i = 0; i < m; ++i) b[i] = -f[i];
      bool singular = false;
      for (std::size_t c = 0; c < m && !singular; ++c) {
        std::size_t pv = c;
        for (std::size_t r = c + 1; r < m; ++r)
          if (std::abs(a[r * m + c]) > std::abs(a[pv * m + c])) pv = r;
        if (a[pv * m + c] == 0) {
          singular = true;
          break;
        }
        if (pv != c) {
          for (std::size_t k = 0; k < m; ++k) std::swap(a[c * m + k], a[pv * m + k]);
          std::swap(b[c], b[pv]);
        }
        for (std::size_t r = c + 1; r < m; ++r) {
          double g = a[r * m + c] / a[c * m + c];
          for (std::size_t k = c; k < m; ++k) a[r * m + k] -= g * a[c * m + k];
          b[r] -= g * b[c];
        }
      }
      if (singular) break;
      for (std::size_t i = m; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < m; ++k) s -= a[i * m + k] * b[k];
        b[i] = s / a[i * m + i];
      }
      for (std::size_t i = 0; i < m; ++i) xs[i] += b[i];
    }
    if (!ok) return 0.0;
    xs[n - 1] = 0;
    // Time the curve s -> flow(xs, s) spends in the box.
    std::vector<std::vector<double>> polys(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& c : coef[i]) polys[i].push_back(c(xs));
    std::vector<double> cuts;
    double bound = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (double side : {box.lo_d()[i], box.hi_d()[i]}) {
        std::vector<double> q = polys[i];
        q[0] -= side;
        while (q.size() > 1 && q.back() == 0) q.pop_back();
        if (q.size() < 2) continue;
        double cb = 0;
        for (std::size_t k = 0; k + 1 < q.size(); ++k) cb = std::max(cb, std::abs(q[k] / q.back()));
        bound = std::max(bound, 1 + cb);
        for (double r : real_roots_in(q, -1 - cb, 1 + cb)) cuts.push_back(r);
      }
    }
    cuts.push_back(-bound - 1);
    cuts.push_back(bound + 1);
    std::sort(cuts.begin(), cuts.end());
    double time = 0;
    std::vector<double> pt(n);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      double a = cuts[k], b = cuts[k + 1];
      if (!(b > a)) continue;
      double mid = 0.5 * (a + b);
      bool in = true;
      for (std::size_t i = 0; i < n && in; ++i) {
        double v = 0;
        for (auto it = polys[i].rbegin(); it != polys[i].rend(); ++it) v = v * mid + *it;
        in = v > box.lo_d()[i] && v < box.hi_d()[i];
      }
      if (in) time += b - a;
    }
    return time;
  });
  CoareaReport rep;
  rep.direct = box.volume().get_d();
  rep.fiber = {yvol * acc.mean(), yvol * acc.stderr_of_mean(), samples, seed};
  rep.rel_error = std::abs(rep.fiber.value - rep.direct) / rep.direct;
  return rep;
}

}  // namespace torsionlab
