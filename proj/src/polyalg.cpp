#include "torsionlab/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>

#include "torsionlab/errors.hpp"
#include "torsionlab/numeric.hpp"
#include "torsionlab/qmc.hpp"

namespace torsionlab {

// ---------------------------------------------------------------- intervals

IntervalSet::IntervalSet(std::vector<Interval> intervals) : iv_(std::move(intervals)) {
  for (std::size_t i = 0; i < iv_.size(); ++i) {
    if (!(iv_[i].lo < iv_[i].hi)) throw ValidationError("interval set: empty interval");
    if (i > 0 && iv_[i].lo < iv_[i - 1].hi) throw ValidationError("interval set: intervals overlap or are unsorted");
  }
}

Rat IntervalSet::measure() const {
  Rat m = 0;
  for (const auto& iv : iv_) m += iv.length();
  return m;
}

Rat IntervalSet::measure_in(const Rat& lo, const Rat& hi) const {
  Rat m = 0;
  for (const auto& iv : iv_) {
    Rat a = std::max(lo, iv.lo), b = std::min(hi, iv.hi);
    if (a < b) m += b - a;
  }
  return m;
}

IntervalSet IntervalSet::clip(const Rat& lo, const Rat& hi) const {
  std::vector<Interval> out;
  for (const auto& iv : iv_) {
    Rat a = std::max(lo, iv.lo), b = std::min(hi, iv.hi);
    if (a < b) out.push_back({a, b});
  }
  return IntervalSet(std::move(out));
}

Interval IntervalSet::hull() const {
  if (iv_.empty()) throw ValidationError("interval set is empty");
  return {iv_.front().lo, iv_.back().hi};
}

// ---------------------------------------------------------------- two terms

namespace {

UPoly from_coeffs(const std::vector<Rat>& c) { return UPoly(c); }

// Smallest C with t^k <= C (a t^n1 + b t^n2) for t > 0, n1 < k < n2.
double two_term_constant(double log_a, double log_b, int n1, int n2, int k) {
  double alpha = k - n1, beta = n2 - k;
  // a t^-alpha + b t^beta is minimal where alpha a t^-alpha = beta b t^beta.
  double log_t = (std::log(alpha) + log_a - std::log(beta) - log_b) / (alpha + beta);
  double v = std::exp(log_a - alpha * log_t) + std::exp(log_b + beta * log_t);
  return 1.0 / v;
}

double log_rat(const Rat& r) {
  // Avoids overflow in get_d for huge numerators or denominators.
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, r.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, r.get_den_mpz_t());
  return std::log(std::abs(mn)) - std::log(md) + static_cast<double>(en - ed) * std::log(2.0);
}

}  // namespace

TwoTermResult extract_two_terms(const std::vector<Rat>& coeffs, unsigned k) {
  for (const auto& a : coeffs)
    if (a < 0) throw ValidationError("extract_two_terms: coefficients must be nonnegative");
  std::vector<Rat> a = coeffs;
  if (a.size() <= k) a.resize(k + 1, Rat(0));
  TwoTermResult res;

  // q = p - t^k keeps a constant sign between consecutive positive roots.
  std::vector<Rat> qc = a;
  qc[k] -= 1;
  UPoly q = from_coeffs(qc);
  res.holds = true;
  if (!q.is_zero()) {
    UPoly sf = squarefree_part(q);
    std::vector<RootInterval> pos;
    for (auto iv : isolate_real_roots(sf)) {
      if (iv.hi <= 0) continue;
      if (iv.lo == iv.hi) {
        pos.push_back(iv);
        continue;
      }
      if (iv.lo < 0 || iv.lo == 0) {
        if (sf.eval(Rat(0)) == 0) continue;  // the root is 0 itself
        while (iv.lo <= 0 && iv.hi > 0 && iv.lo != iv.hi) iv = refine_root(sf, iv, (iv.hi - iv.lo) / 2);
        if (iv.hi <= 0) continue;
      }
      pos.push_back(iv);
    }
    std::vector<Rat> probes;
    if (pos.empty()) {
      probes.push_back(Rat(1));
    } else {
      probes.push_back(pos.front().lo / 2);
      for (std::size_t i = 0; i + 1 < pos.size(); ++i) probes.push_back((pos[i].hi + pos[i + 1].lo) / 2);
      probes.push_back(pos.back().hi + 1);
    }
    for (const auto& t : probes) {
      if (t <= 0) continue;
      if (q.eval(t) < 0) {
        res.holds = false;
        res.witness = t;
        break;
      }
    }
  }
  if (!res.holds) {
    res.kind = TwoTermKind::Fail;
    return res;
  }
  if (a[k] >= 1) {
    res.kind = TwoTermKind::SingleTerm;
    res.constant = 1.0 / a[k].get_d();
    return res;
  }
  // Pick the pair with the largest weighted geometric mean.
  double best = -std::numeric_limits<double>::infinity();
  for (int n1 = 0; n1 < static_cast<int>(k); ++n1) {
    if (a[static_cast<std::size_t>(n1)] == 0) continue;
    for (int n2 = static_cast<int>(k) + 1; n2 < static_cast<int>(a.size()); ++n2) {
      if (a[static_cast<std::size_t>(n2)] == 0) continue;
      double la = log_rat(a[static_cast<std::size_t>(n1)]), lb = log_rat(a[static_cast<std::size_t>(n2)]);
      double lm = ((n2 - static_cast<int>(k)) * la + (static_cast<int>(k) - n1) * lb) / (n2 - n1);
      if (lm > best) {
        best = lm;
        res.n1 = n1;
        res.n2 = n2;
        res.constant = two_term_constant(la, lb, n1, n2, static_cast<int>(k));
      }
    }
  }
  if (res.n1 < 0) throw Error("extract_two_terms: bound holds but no admissible pair");
  res.kind = TwoTermKind::Pair;
  // a1^(n2-k) a2^(k-n1) >= 1, exactly.
  Rat lhs = pow(a[static_cast<std::size_t>(res.n1)], res.n2 - static_cast<int>(k)) *
            pow(a[static_cast<std::size_t>(res.n2)], static_cast<int>(k) - res.n1);
  res.mean_at_least_one = lhs >= 1;
  return res;
}

// ---------------------------------------------------------------- refinement

namespace {

// Least integer m with (4/3)^m >= r, for r > 0.
int ceil_log43(const Rat& r) {
  const Rat q = make_rat(4, 3);
  int m = 0;
  Rat pw = 1;
  if (r <= 1) {
    // Step down while (4/3)^(m-1) >= r.
    while (pw / q >= r) {
      pw /= q;
      --m;
    }
  } else {
    while (pw < r) {
      pw *= q;
      ++m;
    }
  }
  return m;
}

// mass > c' 2^(-c m) total, decided exactly for rational c = num/den.
bool heavy(const Rat& mass, const Rat& total, int m, const RefineOptions& o) {
  if (mass <= 0) return false;
  long num = o.c.get_num().get_si();
  long den = o.c.get_den().get_si();
  Rat x = mass / (o.c_prime * total);
  return pow(x, static_cast<int>(den)) > pow(Rat(2), static_cast<int>(-num * m));
}

}  // namespace

RefineResult refine_interval(const IntervalSet& s, unsigned n_levels, const RefineOptions& options) {
  if (s.empty() || s.measure() <= 0) throw ValidationError("refine_interval: set has zero measure");
  if (options.c <= 0 || options.c_prime <= 0) throw ValidationError("refine_interval: constants must be positive");
  RefineResult res;
  Interval current = s.hull();
  for (unsigned level = 0; level < n_levels; ++level) {
    IntervalSet sl = s.clip(current.lo, current.hi);
    Rat total = sl.measure();
    if (total <= 0) return res;
    RefineLevel lv;
    lv.start = current;
    lv.set_measure = total;
    Interval ii = current;
    bool stopped = false;
    while (lv.steps < options.max_steps) {
      ++lv.steps;
      Rat len = ii.length();
      Rat mass = sl.measure_in(ii.lo, ii.hi);
      int m = ceil_log43(len / total);
      Rat qlen = len / 4;
      std::array<Interval, 4> quarters;
      std::array<Rat, 4> mu;
      for (int j = 0; j < 4; ++j) {
        quarters[static_cast<std::size_t>(j)] = {ii.lo + j * qlen, ii.lo + (j + 1) * qlen};
        mu[static_cast<std::size_t>(j)] =
            sl.measure_in(quarters[static_cast<std::size_t>(j)].lo, quarters[static_cast<std::size_t>(j)].hi);
      }
      bool h1 = heavy(mu[0], mass, m, options), h4 = heavy(mu[3], mass, m, options);
      if (h1 && h4) {
        std::size_t jbest = 0;
        for (std::size_t j = 1; j < 4; ++j)
          if (mu[j] > mu[jbest]) jbest = j;
        std::size_t kk = jbest <= 1 ? 3 : 0;
        lv.stop = ii;
        lv.J = quarters[jbest];
        lv.K = quarters[kk];
        lv.mass_J = mu[jbest];
        lv.mass_K = mu[kk];
        long gap = static_cast<long>(jbest > kk ? jbest - kk : kk - jbest) - 1;
        lv.dist_over_length = Rat(gap);
        stopped = true;
        break;
      }
      if (!h1)
        ii = {ii.lo + qlen, ii.hi};
      else
        ii = {ii.lo, ii.hi - qlen};
    }
    if (!stopped) return res;
    lv.ratio_J = Rat(lv.mass_J / total).get_d();
    Rat kl = lv.K.length();
    double scale = std::pow(Rat(total / kl).get_d(), options.c.get_d()) * total.get_d();
    lv.ratio_K = lv.mass_K.get_d() / scale;
    res.levels.push_back(lv);
    current = lv.J;
  }
  if (!res.levels.empty()) {
    res.J = res.levels.back().J;
    res.K = res.levels.back().K;
  }
  res.completed = res.levels.size() == n_levels;
  return res;
}

namespace {

double sup_on(const UPoly& p, double a, double b) {
  double m = std::max(std::abs(p.eval(a)), std::abs(p.eval(b)));
  UPoly d = p.derivative();
  if (d.degree() >= 1)
    for (double r : real_roots_in(to_doubles(d.coeffs()), a, b)) m = std::max(m, std::abs(p.eval(r)));
  return m;
}

double integral_abs(const UPoly& p, double a, double b) {
  std::vector<double> cuts{a};
  if (p.degree() >= 1)
    for (double r : real_roots_in(to_doubles(p.coeffs()), a, b))
      if (r > cuts.back()) cuts.push_back(r);
  if (b > cuts.back()) cuts.push_back(b);
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += std::abs(integrate([&](double t) { return p.eval(t); }, cuts[i], cuts[i + 1], 1e-10));
  return total;
}

}  // namespace

RefinementBound check_refinement_bound(const IntervalSet& s, const UPoly& p, const Interval& j, double eps) {
  RefinementBound out;
  for (const auto& iv : s.intervals()) out.lhs += integral_abs(p, iv.lo.get_d(), iv.hi.get_d());
  double sm = s.measure().get_d();
  double jl = j.length().get_d();
  UPoly d = p;
  for (int order = 0; order <= std::max(p.degree(), 0); ++order) {
    double term = sup_on(d, j.lo.get_d(), j.hi.get_d()) * std::pow(jl / sm, (1 - eps) * order) * std::pow(sm, order + 1);
    out.terms.push_back(term);
    out.rhs += term;
    d = d.derivative();
  }
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : std::numeric_limits<double>::infinity();
  return out;
}

// ---------------------------------------------------------------- sublevel

namespace {

double fit_slope(const std::vector<SublevelPoint>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : pts) {
    if (p.measure <= 0) continue;
    double x = std::log(p.eps), y = std::log(p.measure);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

SublevelResult sublevel_measure(const RatPoly& p, unsigned levels, std::uint64_t samples, std::uint64_t seed) {
  if (p.is_zero()) throw ValidationError("sublevel_measure: polynomial is zero");
  SublevelResult res;
  const std::size_t n = p.nvars();
  if (n == 1) {
    UPoly u = UPoly::from_poly(p);
    res.exact = true;
    res.sup_norm = sup_on(u, -1, 1);
    for (unsigned i = 1; i <= levels; ++i) {
      double eps = std::ldexp(1.0, -static_cast<int>(i));
      double eta = eps * res.sup_norm;
      std::vector<double> cuts{-1.0, 1.0};
      for (double sgn : {-1.0, 1.0}) {
        auto c = to_doubles(u.coeffs());
        if (c.empty()) c.push_back(0);
        c[0] -= sgn * eta;
        for (double r : real_roots_in(c, -1, 1)) cuts.push_back(r);
      }
      std::sort(cuts.begin(), cuts.end());
      double m = 0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        if (std::abs(u.eval(mid)) < eta) m += cuts[k + 1] - cuts[k];
      }
      res.points.push_back({eps, m, 0});
    }
  } else {
    CompiledPoly cp(p);
    // Sup norm from the corners and the sample points themselves.
    ScrambledHalton seq(n, seed);
    std::vector<double> x(n);
    double sup = 0;
    for (std::uint64_t c = 0; c < (1ull << n); ++c) {
      for (std::size_t i = 0; i < n; ++i) x[i] = (c >> i) & 1 ? 1.0 : -1.0;
      sup = std::max(sup, std::abs(cp(x)));
    }
    for (std::uint64_t i = 0; i < samples; ++i) {
      seq.point(i, x.data());
      for (auto& v : x) v = 2 * v - 1;
      sup = std::max(sup, std::abs(cp(x)));
    }
    res.sup_norm = sup;
    double vol = std::ldexp(1.0, static_cast<int>(n));
    auto acc = qmc_means(n, seed, samples, levels, [&](const double* u, double* out) {
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = 2 * u[i] - 1;
      double v = std::abs(cp(y));
      for (unsigned l = 0; l < levels; ++l) out[l] = v < std::ldexp(sup, -static_cast<int>(l + 1)) ? 1.0 : 0.0;
    });
    for (unsigned l = 0; l < levels; ++l)
      res.points.push_back({std::ldexp(1.0, -static_cast<int>(l + 1)), vol * acc[l].mean(),
                            vol * acc[l].stderr_of_mean()});
  }
  res.fitted_exponent = fit_slope(res.points);
  return res;
}

// ---------------------------------------------------------------- monomialization

namespace {

// x rounded to `bits` significant bits, as an exact rational.
Rat round_sig(double x, int bits = 40) {
  if (x == 0) return Rat(0);
  int e = 0;
  double m = std::frexp(x, &e);
  double scaled = std::nearbyint(std::ldexp(m, bits));
  Rat r(scaled);
  if (e - bits >= 0)
    r *= pow(Rat(2), e - bits);
  else
    r /= pow(Rat(2), bits - e);
  r.canonicalize();
  return r;
}

struct SRange {
  Rat lo;                 // distance from the center, >= 0
  std::optional<Rat> hi;  // empty: unbounded
};

SRange distance_range(const MonomialPiece& piece) {
  const Rat& b = piece.center;
  if (piece.lo && b <= *piece.lo) return {*piece.lo - b, piece.hi ? std::optional<Rat>(*piece.hi - b) : std::nullopt};
  if (piece.hi && b >= *piece.hi) return {b - *piece.hi, piece.lo ? std::optional<Rat>(b - *piece.lo) : std::nullopt};
  throw ValidationError("monomial piece contains its center");
}

// Squared norms of the Taylor coefficient vectors of a group at b.
std::vector<Rat> taylor_norms(const PolyGroup& g, const Rat& b) {
  std::vector<Rat> n;
  for (const auto& p : g) {
    auto t = p.taylor(b);
    if (t.size() > n.size()) n.resize(t.size(), Rat(0));
    for (std::size_t k = 0; k < t.size(); ++k) n[k] += t[k] * t[k];
  }
  return n;
}

std::optional<unsigned> dominant_from_norms(const std::vector<Rat>& norms, const SRange& s, const Rat& eps) {
  const Rat eps2 = eps * eps;
  bool any = false;
  for (const auto& v : norms) any = any || v != 0;
  if (!any) return 0u;
  for (std::size_t k = 0; k < norms.size(); ++k) {
    if (norms[k] == 0) continue;
    bool ok = true;
    for (std::size_t j = 0; j < norms.size() && ok; ++j) {
      if (j == k || norms[j] == 0) continue;
      // |T_j| s^j <= eps |T_k| s^k; the ratio is monotone in s.
      if (j > k) {
        if (!s.hi) {
          ok = false;
          break;
        }
        ok = norms[j] * pow(*s.hi, 2 * static_cast<int>(j - k)) <= eps2 * norms[k];
      } else {
        if (s.lo == 0) {
          ok = false;
          break;
        }
        ok = norms[j] <= eps2 * norms[k] * pow(s.lo, 2 * static_cast<int>(k - j));
      }
    }
    if (ok) return static_cast<unsigned>(k);
  }
  return std::nullopt;
}

struct RootInfo {
  std::complex<double> z;
  Rat re;  // center used for this root
};

class Builder {
 public:
  Builder(const std::vector<PolyGroup>& groups, const Rat& eps) : groups_(groups), eps_(eps) {
    cover_.epsilon = eps;
  }

  MonomialCover run() {
    collect_roots();
    collect_breakpoints();
    std::vector<Rat> bp(breakpoints_.begin(), breakpoints_.end());
    cover_.breakpoints = bp.size();
    for (std::size_t i = 0; i <= bp.size(); ++i) {
      MonomialPiece piece;
      if (i > 0) piece.lo = bp[i - 1];
      if (i < bp.size()) piece.hi = bp[i];
      if (piece.lo && piece.hi && in_root_cell(*piece.lo, *piece.hi)) continue;
      piece.center = nearest_center(piece);
      process(piece);
    }
    std::sort(cover_.pieces.begin(), cover_.pieces.end(), [](const MonomialPiece& a, const MonomialPiece& b) {
      if (!a.lo) return static_cast<bool>(b.lo);
      if (!b.lo) return false;
      return *a.lo < *b.lo;
    });
    return cover_;
  }

 private:
  const std::vector<PolyGroup>& groups_;
  Rat eps_;
  MonomialCover cover_;
  std::vector<RootInfo> roots_;
  std::vector<Rat> exact_roots_;
  std::set<Rat> breakpoints_;

  bool in_root_cell(const Rat& lo, const Rat& hi) const {
    for (const auto& c : cover_.root_cells)
      if (c.lo == lo && c.hi == hi) return true;
    return false;
  }

  bool strictly_inside_cell(const Rat& x) const {
    for (const auto& c : cover_.root_cells)
      if (c.lo < x && x < c.hi) return true;
    return false;
  }

  void collect_roots() {
    // Points where a group vanishes must be exact piece boundaries.
    for (const auto& g : groups_) {
      UPoly common;
      for (const auto& p : g) common = gcd(common, p);
      if (common.degree() < 1) continue;
      UPoly sf = squarefree_part(common);
      for (auto iv : isolate_real_roots(sf)) {
        if (iv.lo == iv.hi) {
          exact_roots_.push_back(iv.lo);
          breakpoints_.insert(iv.lo);
          continue;
        }
        iv = refine_root(sf, iv, pow(Rat(2), -60));
        if (iv.lo == iv.hi) {
          exact_roots_.push_back(iv.lo);
          breakpoints_.insert(iv.lo);
          continue;
        }
        cover_.root_cells.push_back({iv.lo, iv.hi});
        breakpoints_.insert(iv.lo);
        breakpoints_.insert(iv.hi);
      }
    }
    // Complex zeros of every component and all its nonconstant derivatives.
    for (const auto& g : groups_)
      for (const auto& p : g)
        for (UPoly d = p; d.degree() >= 1; d = d.derivative())
          for (const auto& r : complex_roots(squarefree_part(d))) roots_.push_back({r.z, snap(r.z)});
  }

  Rat snap(std::complex<double> z) const {
    double tol = 1e-9 * (1 + std::abs(z));
    if (std::abs(z.imag()) <= tol) {
      for (const auto& r : exact_roots_)
        if (std::abs(r.get_d() - z.real()) <= tol) return r;
      for (const auto& c : cover_.root_cells)
        if (std::abs(c.lo.get_d() - z.real()) <= tol) return c.lo;
    }
    return round_sig(z.real());
  }

  double nearest_distance(double t) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : roots_) best = std::min(best, std::abs(std::complex<double>(t, 0) - r.z));
    return best;
  }

  void add_breakpoint(double t, bool check_owner, std::complex<double> owner) {
    if (!std::isfinite(t)) return;
    if (check_owner) {
      double d = std::abs(std::complex<double>(t, 0) - owner);
      if (d > nearest_distance(t) * (1 + 1e-9) + 1e-12) return;
    }
    double tol = 1e-9 * (1 + std::abs(t));
    for (const auto& r : exact_roots_)
      if (std::abs(r.get_d() - t) <= tol) return;
    for (const auto& c : cover_.root_cells)
      if (std::abs(c.lo.get_d() - t) <= tol || std::abs(c.hi.get_d() - t) <= tol) return;
    Rat x = round_sig(t);
    if (strictly_inside_cell(x)) return;
    auto it = breakpoints_.lower_bound(x);
    if (it != breakpoints_.end() && std::abs(it->get_d() - t) <= tol) return;
    if (it != breakpoints_.begin() && std::abs(std::prev(it)->get_d() - t) <= tol) return;
    breakpoints_.insert(x);
  }

  void collect_breakpoints() {
    for (const auto& r : roots_) {
      if (!strictly_inside_cell(r.re)) {
        bool dup = false;
        double tol = 1e-9 * (1 + std::abs(r.re.get_d()));
        for (const auto& b : breakpoints_)
          if (std::abs(b.get_d() - r.re.get_d()) <= tol) dup = true;
        if (!dup) breakpoints_.insert(r.re);
      }
      double im = std::abs(r.z.imag());
      if (im > 1e-9 * (1 + std::abs(r.z))) {
        add_breakpoint(r.z.real() - im, false, r.z);
        add_breakpoint(r.z.real() + im, false, r.z);
      }
    }
    for (std::size_t i = 0; i < roots_.size(); ++i)
      for (std::size_t j = 0; j < roots_.size(); ++j) {
        if (i == j) continue;
        auto zi = roots_[i].z, zj = roots_[j].z;
        double dre = zj.real() - zi.real();
        // Boundary between the nearest-root cells of zi and zj.
        if (i < j && std::abs(dre) > 1e-12)
          add_breakpoint((std::norm(zj) - std::norm(zi)) / (2 * dre), true, zi);
        // Dyadic annuli around zi.
        double h = 0.5 * std::abs(zi - zj);
        if (h > 1e-12) {
          add_breakpoint(zi.real() - h, true, zi);
          add_breakpoint(zi.real() + h, true, zi);
        }
      }
    if (breakpoints_.empty()) breakpoints_.insert(Rat(0));
  }

  Rat nearest_center(const MonomialPiece& piece) const {
    double t;
    if (piece.lo && piece.hi)
      t = 0.5 * (piece.lo->get_d() + piece.hi->get_d());
    else if (piece.lo)
      t = piece.lo->get_d() + 1;
    else
      t = piece.hi->get_d() - 1;
    const RootInfo* best = nullptr;
    double bd = std::numeric_limits<double>::infinity();
    for (const auto& r : roots_) {
      double d = std::abs(std::complex<double>(t, 0) - r.z);
      if (d < bd) bd = d, best = &r;
    }
    Rat c = best ? best->re : Rat(0);
    // Move an irrational-root center to the cell end facing the piece.
    for (const auto& cell : cover_.root_cells)
      if (c == cell.lo && piece.lo && *piece.lo >= cell.hi) c = cell.hi;
    bool inside = (!piece.lo || *piece.lo < c) && (!piece.hi || c < *piece.hi);
    if (inside) c = piece.lo ? *piece.lo : *piece.hi;
    return c;
  }

  bool verify(MonomialPiece& piece) const {
    SRange s = distance_range(piece);
    piece.k.clear();
    for (const auto& g : groups_) {
      auto k = dominant_from_norms(taylor_norms(g, piece.center), s, eps_);
      if (!k) return false;
      piece.k.push_back(*k);
    }
    return true;
  }

  // Maps a distance range from the center back to a piece on the center's side.
  MonomialPiece piece_at(const Rat& center, int dir, const Rat& s0, const std::optional<Rat>& s1) const {
    MonomialPiece p;
    p.center = center;
    if (dir > 0) {
      p.lo = center + s0;
      if (s1) p.hi = center + *s1;
    } else {
      p.hi = center - s0;
      if (s1) p.lo = center - *s1;
    }
    return p;
  }

  void process(MonomialPiece piece) {
    if (verify(piece)) {
      cover_.pieces.push_back(piece);
      return;
    }
    const Rat b = piece.center;
    int dir = piece.lo && b <= *piece.lo ? 1 : -1;
    SRange s = distance_range(piece);
    // Ranges of log distance on which one Taylor term dominates, per group.
    using U = std::pair<double, double>;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<U> common{{-inf, inf}};
    const double leps = std::log(eps_.get_d());
    for (const auto& g : groups_) {
      auto norms = taylor_norms(g, b);
      std::vector<double> lm(norms.size(), -inf);
      for (std::size_t k = 0; k < norms.size(); ++k)
        if (norms[k] != 0) lm[k] = 0.5 * log_rat(norms[k]);
      std::vector<U> dom;
      for (std::size_t k = 0; k < norms.size(); ++k) {
        if (!std::isfinite(lm[k])) continue;
        double lo = -inf, hi = inf;
        for (std::size_t j = 0; j < norms.size(); ++j) {
          if (j == k || !std::isfinite(lm[j])) continue;
          double bound = (leps + lm[k] - lm[j]) / (static_cast<double>(j) - static_cast<double>(k));
          if (j > k)
            hi = std::min(hi, bound);
          else
            lo = std::max(lo, bound);
        }
        if (lo < hi) dom.push_back({lo, hi});
      }
      if (dom.empty()) dom.push_back({-inf, inf});  // identically zero group
      std::vector<U> next;
      for (const auto& a : common)
        for (const auto& d : dom) {
          double lo = std::max(a.first, d.first), hi = std::min(a.second, d.second);
          if (lo < hi) next.push_back({lo, hi});
        }
      common = std::move(next);
    }
    std::sort(common.begin(), common.end());
    double ulo = s.lo > 0 ? log_rat(s.lo) : -inf;
    double uhi = s.hi ? log_rat(*s.hi) : inf;
    // Walk the distance range, emitting dominated stretches and filling gaps.
    Rat cursor = s.lo;
    for (const auto& [a, c] : common) {
      double lo = std::max(a, ulo), hi = std::min(c, uhi);
      if (!(lo < hi)) continue;
      Rat r0 = lo == ulo ? s.lo : round_sig(std::exp(lo) * (1 + 1e-9));
      std::optional<Rat> r1;
      if (hi == uhi)
        r1 = s.hi;
      else
        r1 = round_sig(std::exp(hi) * (1 - 1e-9));
      if (r1 && *r1 <= r0) continue;
      if (r0 < cursor) continue;
      MonomialPiece cand = piece_at(b, dir, r0, r1);
      if (!verify(cand)) continue;
      if (cursor < r0) fill(b, dir, cursor, r0);
      cover_.pieces.push_back(cand);
      if (!r1) return;
      cursor = *r1;
    }
    if (!s.hi) throw BudgetExceeded("monomialize: unbounded piece without a dominant term");
    if (cursor < *s.hi) fill(b, dir, cursor, *s.hi);
  }

  // Transition zone at distances (s0, s1) from b: a grid of spacing eps^2
  // relative to the far end, with centers at cell ends.
  void fill(const Rat& b, int dir, const Rat& s0, const Rat& s1) {
    Rat h = eps_ * eps_ * s1;
    Rat minh = (s1 - s0) / 1024;
    if (h < minh) h = minh;
    Rat a = s0;
    while (a < s1) {
      Rat e = a + h;
      if (e > s1) e = s1;
      MonomialPiece cell = piece_at(b, dir, a, e);
      settle(cell, 0);
      a = e;
    }
  }

  void settle(MonomialPiece cell, int depth) {
    const Rat lo = *cell.lo, hi = *cell.hi;
    // Nearer end to the old center first, as in the grid construction.
    for (const Rat* c : {&lo, &hi}) {
      cell.center = *c;
      if (verify(cell)) {
        cover_.pieces.push_back(cell);
        return;
      }
    }
    if (depth > 96) throw BudgetExceeded("monomialize: a cell did not verify");
    ++cover_.bisections;
    Rat mid = (lo + hi) / 2;
    MonomialPiece left, right;
    left.lo = lo;
    left.hi = mid;
    right.lo = mid;
    right.hi = hi;
    settle(left, depth + 1);
    settle(right, depth + 1);
  }
};

}  // namespace

std::optional<unsigned> dominant_order(const PolyGroup& g, const MonomialPiece& piece, const Rat& eps) {
  return dominant_from_norms(taylor_norms(g, piece.center), distance_range(piece), eps);
}

MonomialCover monomialize_groups(const std::vector<PolyGroup>& groups, const Rat& eps) {
  if (!(eps > 0 && eps < 1)) throw ValidationError("monomialize: eps must lie in (0, 1)");
  for (const auto& g : groups) {
    bool nonzero = false;
    for (const auto& p : g) nonzero = nonzero || !p.is_zero();
    if (!nonzero) throw ValidationError("monomialize: zero polynomial");
  }
  return Builder(groups, eps).run();
}

MonomialCover monomialize(const std::vector<UPoly>& polys, const Rat& eps) {
  std::vector<PolyGroup> groups;
  for (const auto& p : polys) groups.push_back({p});
  return monomialize_groups(groups, eps);
}

MonomialCover curve_monomialize(const std::vector<UPoly>& gamma, const Rat& eps) {
  return monomialize_groups({gamma}, eps);
}

// ---------------------------------------------------------------- tangency

TangencyResult tangency_scan(const std::vector<UPoly>& gamma, const std::vector<double>& times, double delta,
                             double eps) {
  auto norm_at = [&](const std::vector<UPoly>& g, double t) {
    double s = 0;
    for (const auto& c : g) s += c.eval(t) * c.eval(t);
    return std::sqrt(s);
  };
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(norm_at(gamma, times[i]) < delta * norm_at(gamma, times[i + 1])))
      throw HypothesisNotMet("tangency_scan: |g(t_i)| < delta |g(t_i+1)| fails at i = " + std::to_string(i));
  std::vector<UPoly> d;
  for (const auto& c : gamma) d.push_back(c.derivative());
  TangencyResult res;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double t = times[i];
    double gg = 0, dd = 0, gd = 0;
    for (std::size_t c = 0; c < gamma.size(); ++c) {
      double a = gamma[c].eval(t), b = d[c].eval(t);
      gg += a * a;
      dd += b * b;
      gd += a * b;
    }
    double wedge = std::sqrt(std::max(0.0, gg * dd - gd * gd));
    double denom = std::sqrt(gg * dd);
    double ratio = denom > 0 ? wedge / denom : 0;
    res.ratios.push_back(ratio);
    if (!res.found && ratio < eps) {
      res.found = true;
      res.index = i;
    }
  }
  return res;
}

// ---------------------------------------------------------------- scale count

namespace {

// Whether f(r) >= 0 at the unique root r of sf in iv.
bool nonneg_at_root(const UPoly& f, const UPoly& sf, RootInterval iv) {
  if (iv.lo == iv.hi) return f.eval(iv.lo) >= 0;
  UPoly g = gcd(f, sf);
  if (g.degree() >= 1) {
    if (g.eval(iv.lo) == 0) return true;
    if (sturm_count(sturm_chain(g), iv.lo, iv.hi) > 0) return true;
  }
  // f(r) != 0: refine until the enclosure excludes zero.
  for (int it = 0; it < 400; ++it) {
    auto [a, b] = interval_eval(f, iv.lo, iv.hi);
    if (a > 0) return true;
    if (b < 0) return false;
    iv = refine_root(sf, iv, (iv.hi - iv.lo) / 2);
    if (iv.lo == iv.hi) return f.eval(iv.lo) >= 0;
  }
  return true;  // undecided: counted as feasible
}

// A nonempty closed semialgebraic subset of R either is all of R or has a
// boundary point, which is a root of one of the conditions.
bool feasible(const std::vector<UPoly>& conds) {
  std::vector<UPoly> live;
  for (const auto& f : conds) {
    if (f.degree() <= 0) {
      if (f.leading() < 0) return false;
      continue;
    }
    live.push_back(f);
  }
  bool at_zero = true;
  for (const auto& f : live) at_zero = at_zero && f.eval(Rat(0)) >= 0;
  if (at_zero) return true;
  for (const auto& f : live) {
    UPoly sf = squarefree_part(f);
    for (const auto& iv : isolate_real_roots(sf)) {
      bool all = true;
      for (const auto& g : live)
        if (!nonneg_at_root(g, sf, iv)) {
          all = false;
          break;
        }
      if (all) return true;
    }
  }
  return false;
}

}  // namespace

ScaleCount scale_count(const UPoly& p1, const UPoly& p2, int a1, int a2, int k_lo, int k_hi) {
  if (a1 <= 0 || a2 <= 0) throw ValidationError("scale_count: exponents must be positive integers");
  ScaleCount out;
  UPoly s1 = p1 * p1, s2 = p2 * p2;
  for (int k = k_lo; k <= k_hi; ++k) {
    auto sq = [](int e) { return UPoly({pow(Rat(2), 2 * e)}); };
    std::vector<UPoly> conds{s1 - sq(a1 * k - 1), sq(a1 * k + 1) - s1, s2 - sq(-a2 * k - 1), sq(-a2 * k + 1) - s2};
    if (feasible(conds)) out.feasible.push_back(k);
  }
  return out;
}

}  // namespace torsionlab
