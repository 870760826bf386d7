#include "torsionlab/ccballs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "torsionlab/errors.hpp"
#include "torsionlab/poly_matrix.hpp"
#include "torsionlab/qmc.hpp"

namespace torsionlab {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

// Solves a x = b in place for small dense a (row-major). False if singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (!(std::abs(a[piv * n + col]) > 1e-300)) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / a[col * n + col];
      if (f == 0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * b[c];
    b[i] = s / a[i * n + i];
  }
  return true;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// QMC point of the box |t_i| < r_i.
void box_point(const ScrambledHalton& h, std::uint64_t index, std::span<const double> radii, double* t) {
  h.point(index, t);
  for (std::size_t i = 0; i < radii.size(); ++i) t[i] = (2 * t[i] - 1) * radii[i];
}

struct Bounds {
  std::vector<double> lo, hi;
  bool overlaps(const Bounds& o) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (hi[i] < o.lo[i] || o.hi[i] < lo[i]) return false;
    return true;
  }
  bool contains(std::span<const double> y) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (y[i] < lo[i] || y[i] > hi[i]) return false;
    return true;
  }
};

// Images of the center, the box corners and QMC points, plus their
// bounding box inflated by `pad` of its size.
struct SampledBall {
  std::vector<std::vector<double>> images;
  Bounds bounds;
};

SampledBall sample_ball(const BallMap& map, std::span<const double> x, double r, std::uint64_t samples,
                        std::uint64_t seed, double pad) {
  const std::size_t n = map.dim();
  SampledBall out;
  std::vector<double> t(n), y(n), radii(n, r);
  auto push = [&] {
    map.eval(x, t, y);
    out.images.push_back(y);
  };
  std::fill(t.begin(), t.end(), 0.0);
  push();
  if (n <= 10) {
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i) t[i] = (mask >> i & 1) ? r : -r;
      push();
    }
  }
  ScrambledHalton h(n, seed);
  for (std::uint64_t k = 0; k < samples; ++k) {
    box_point(h, k, radii, t.data());
    push();
  }
  out.bounds.lo.assign(n, std::numeric_limits<double>::infinity());
  out.bounds.hi.assign(n, -std::numeric_limits<double>::infinity());
  for (const auto& p : out.images)
    for (std::size_t i = 0; i < n; ++i) {
      out.bounds.lo[i] = std::min(out.bounds.lo[i], p[i]);
      out.bounds.hi[i] = std::max(out.bounds.hi[i], p[i]);
    }
  for (std::size_t i = 0; i < n; ++i) {
    double w = (out.bounds.hi[i] - out.bounds.lo[i]) * pad + 1e-12;
    out.bounds.lo[i] -= w;
    out.bounds.hi[i] += w;
  }
  return out;
}

}  // namespace

void BallSpec::validate(std::size_t n) const {
  if (center.size() != n) throw DimensionMismatch("ball center must have " + std::to_string(n) + " coordinates");
  if (words.size() != n) throw DimensionMismatch("ball needs " + std::to_string(n) + " words");
  for (const auto& w : words)
    if (w.empty()) throw ValidationError("ball words must be nonempty");
  if (alpha[0] <= 0 || alpha[1] <= 0) throw ValidationError("ball alpha must be positive");
}

std::vector<double> box_radii(const std::vector<Word>& words, const std::array<Rat, 2>& alpha) {
  std::vector<double> r;
  for (const auto& w : words) {
    auto d = bidegree(w);
    r.push_back(Rat(pow(alpha[0], d[0]) * pow(alpha[1], d[1])).get_d());
  }
  return r;
}

BallMap::BallMap(FlowCache& cache, std::vector<Word> words) : words_(std::move(words)) {
  psi_ = iter_flow(cache, words_);
  n_ = psi_.n;
  map_ = CompiledMap(psi_.map);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) jac_.emplace_back(psi_.map[i].partial(n_ + j));
  det_ = CompiledPoly(psi_.jac_det);
}

void BallMap::eval(std::span<const double> x, std::span<const double> t, std::span<double> out) const {
  double buf[64];
  std::vector<double> heap;
  double* xt = buf;
  if (2 * n_ > 64) {
    heap.resize(2 * n_);
    xt = heap.data();
  }
  std::copy(x.begin(), x.end(), xt);
  std::copy(t.begin(), t.end(), xt + n_);
  map_.eval(std::span<const double>(xt, 2 * n_), out);
}

double BallMap::jac_det(std::span<const double> x, std::span<const double> t) const {
  std::vector<double> xt(x.begin(), x.end());
  xt.insert(xt.end(), t.begin(), t.end());
  return det_(xt);
}

void BallMap::jacobian(std::span<const double> x, std::span<const double> t, std::span<double> out) const {
  std::vector<double> xt(x.begin(), x.end());
  xt.insert(xt.end(), t.begin(), t.end());
  for (std::size_t k = 0; k < jac_.size(); ++k) out[k] = jac_[k](xt);
}

PreimageResult BallMap::preimage(std::span<const double> x, std::span<const double> y, std::span<const double> radii,
                                 const PreimageOptions& options) const {
  const std::size_t n = n_;
  PreimageResult result;
  ScrambledHalton h(n, 0x5eedULL);
  std::vector<double> t(n), f(n), trial(n), ftrial(n), jac(n * n), step(n);
  bool any_converged = false;
  auto residual = [&](const std::vector<double>& tt, std::vector<double>& out) {
    eval(x, tt, out);
    for (std::size_t i = 0; i < n; ++i) out[i] -= y[i];
    return inf_norm(out);
  };
  for (unsigned s = 0; s < options.starts; ++s) {
    if (s == 0) {
      std::fill(t.begin(), t.end(), 0.0);
    } else {
      box_point(h, s - 1, radii, t.data());
      for (auto& v : t) v *= 0.9;
    }
    double fn = residual(t, f);
    bool converged = false;
    for (unsigned it = 0; it < options.max_iter && std::isfinite(fn); ++it) {
      jacobian(x, t, jac);
      for (std::size_t i = 0; i < n; ++i) step[i] = -f[i];
      if (!solve_dense(jac, step, n)) break;
      double lam = 1;
      double ft = 0;
      for (;;) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = t[i] + lam * step[i];
        ft = residual(trial, ftrial);
        if (ft <= (1 - 1e-4 * lam) * fn || lam < 1.0 / 1024) break;
        lam /= 2;
      }
      t = trial;
      f = ftrial;
      fn = ft;
      if (lam * inf_norm(step) <= options.tol * (1 + inf_norm(t))) {
        converged = fn <= 1e-8 * (1 + inf_norm(y));
        break;
      }
    }
    if (!converged) continue;
    any_converged = true;
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) inside = inside && std::abs(t[i]) < radii[i];
    if (inside) {
      result.status = Membership::Inside;
      result.t = t;
      return result;
    }
    if (result.t.empty()) result.t = t;
  }
  result.status = any_converged ? Membership::Outside : Membership::Failed;
  return result;
}

BallSample ball_sample(const BallMap& map, const BallSpec& spec, std::uint64_t samples, std::uint64_t seed) {
  const std::size_t n = map.dim();
  spec.validate(n);
  if (spec.words != map.words()) throw ValidationError("ball spec words differ from the compiled map");
  if (samples < 1) throw ValidationError("ball sampling needs at least one sample");
  BallSample out;
  out.spec = spec;
  std::vector<double> x = to_doubles(spec.center);
  std::vector<double> radii = box_radii(spec.words, spec.alpha);
  for (double r : radii)
    if (!(r > 0)) throw ValidationError("ball box radii must be positive");
  out.box_measure = 1;
  for (double r : radii) out.box_measure *= 2 * r;
  std::vector<double> zero(n, 0.0);
  out.lambda = std::abs(map.jac_det(x, zero));

  ScrambledHalton h(n, seed);
  std::vector<double> t(n), y(n);
  std::vector<std::vector<double>> images;
  images.reserve(samples);
  MeanAccumulator acc;
  double dmin = std::numeric_limits<double>::infinity(), dmax = -dmin;
  for (std::uint64_t k = 0; k < samples; ++k) {
    box_point(h, k, radii, t.data());
    map.eval(x, t, y);
    images.push_back(y);
    double d = map.jac_det(x, t);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    acc.add(std::abs(d));
  }
  out.jac_min = (dmin > 0 || dmax < 0) ? std::min(std::abs(dmin), std::abs(dmax)) : 0.0;
  out.jac_max = std::max(std::abs(dmin), std::abs(dmax));

  if (dmin > 0 || dmax < 0) {
    out.method = "change_of_variables";
    out.volume = out.box_measure * acc.mean();
    out.stderr_ = out.box_measure * acc.stderr_of_mean();
  } else {
    out.method = "occupancy";
    std::vector<double> lo(n, std::numeric_limits<double>::infinity()), hi(n, -lo[0]);
    for (const auto& p : images)
      for (std::size_t i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
    double cell = 1;
    bool flat = false;
    const auto g = static_cast<std::size_t>(
        std::max(2.0, std::floor(std::pow(static_cast<double>(samples) / 8.0, 1.0 / static_cast<double>(n)))));
    for (std::size_t i = 0; i < n; ++i) {
      if (!(hi[i] - lo[i] > 1e-14 * (1 + std::abs(hi[i])))) flat = true;
      cell *= (hi[i] - lo[i]) / static_cast<double>(g);
    }
    if (flat) {
      out.volume = 0;
    } else {
      std::set<std::vector<std::size_t>> hit;
      std::vector<std::size_t> key(n);
      for (const auto& p : images) {
        for (std::size_t i = 0; i < n; ++i) {
          auto c = static_cast<std::size_t>((p[i] - lo[i]) / (hi[i] - lo[i]) * static_cast<double>(g));
          key[i] = std::min(c, g - 1);
        }
        hit.insert(key);
      }
      out.volume = static_cast<double>(hit.size()) * cell;
    }
    out.stderr_ = 0;
  }
  std::size_t keep = std::min<std::size_t>(images.size(), 1000);
  out.points.assign(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(keep));
  double scale = 1;
  for (const auto& w : spec.words) {
    auto d = bidegree(w);
    scale *= Rat(pow(spec.alpha[0], d[0]) * pow(spec.alpha[1], d[1])).get_d();
  }
  if (out.lambda > 0) {
    out.sandwich_ratio = out.volume / (out.box_measure * out.lambda);
    out.raw_ratio = out.volume / (scale * out.lambda);
  }
  return out;
}

TupleChoice best_tuple(const LambdaTable& table, std::span<const double> x) {
  TupleChoice best;
  for (const auto& e : table.entries) {
    double v = std::abs(CompiledPoly(e.lambda)(x));
    if (best.words.empty() || v > best.lambda) {
      best.words = e.words;
      best.lambda = v;
    }
    best.max_lambda = std::max(best.max_lambda, v);
  }
  return best;
}

TupleChoice tuple_at(const LambdaTable& table, const std::vector<Word>& words, std::span<const double> x) {
  TupleChoice out;
  out.words = words;
  bool found = false;
  for (const auto& e : table.entries) {
    double v = std::abs(CompiledPoly(e.lambda)(x));
    out.max_lambda = std::max(out.max_lambda, v);
    if (e.words == words) {
      out.lambda = v;
      found = true;
    }
  }
  if (!found) {
    // Not a stored representative: fall back to zero unless the words are a
    // permutation of one, in which case |lambda| agrees.
    auto sorted = words;
    std::sort(sorted.begin(), sorted.end(), word_less);
    for (const auto& e : table.entries)
      if (e.words == sorted) out.lambda = std::abs(CompiledPoly(e.lambda)(x));
  }
  return out;
}

DoublingReport doubling_check(const BallMap& b1, const BallMap& b2, std::span<const double> x1,
                              std::span<const double> x2, const TupleChoice& tuple1, const TupleChoice& tuple2,
                              double rho, const DoublingOptions& options) {
  const std::size_t n = b1.dim();
  if (b2.dim() != n || x1.size() != n || x2.size() != n) throw DimensionMismatch("doubling check dimensions differ");
  if (!(rho > 0)) throw ValidationError("doubling radius must be positive");
  DoublingReport rep;
  rep.rho = rho;
  rep.c = options.c;
  rep.delta = options.delta;
  rep.ratio1 = tuple1.ratio();
  rep.ratio2 = tuple2.ratio();
  if (!(rho < options.c * options.delta)) {
    rep.reason = "rho must be below c*delta";
    return rep;
  }
  if (rep.ratio1 < options.delta || rep.ratio2 < options.delta) {
    rep.reason = "lambda hypothesis fails at a center";
    return rep;
  }
  const double small = options.c * options.delta * rho;
  std::vector<double> rs(n, small), rl(n, rho);

  // Do the small balls meet?
  bool meet = false;
  {
    auto s1 = sample_ball(b1, x1, small, 256, options.seed, 0.05);
    auto s2 = sample_ball(b2, x2, small, 256, options.seed + 1, 0.05);
    if (s1.bounds.overlaps(s2.bounds)) {
      for (const auto& y : s1.images) {
        if (!s2.bounds.contains(y)) continue;
        if (b2.preimage(x2, y, rs, options.newton).status == Membership::Inside) {
          meet = true;
          break;
        }
      }
      for (std::size_t k = 0; !meet && k < s2.images.size(); ++k) {
        const auto& y = s2.images[k];
        if (!s1.bounds.contains(y)) continue;
        if (b1.preimage(x1, y, rs, options.newton).status == Membership::Inside) meet = true;
      }
    }
  }
  if (!meet) {
    rep.reason = "balls of radius c*delta*rho do not meet";
    return rep;
  }
  rep.applicable = true;

  std::optional<SampledBall> cloud;
  ScrambledHalton h(n, options.seed + 2);
  std::vector<double> t(n), y(n);
  for (std::uint64_t k = 0; k < options.samples; ++k) {
    box_point(h, k, rs, t.data());
    b1.eval(x1, t, y);
    ++rep.tested;
    auto res = b2.preimage(x2, y, rl, options.newton);
    if (res.status == Membership::Inside) {
      ++rep.inside;
    } else if (res.status == Membership::Outside) {
      ++rep.outside;
    } else {
      if (!cloud) cloud = sample_ball(b2, x2, rho, options.fallback_samples, options.seed + 3, 0.0);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : cloud->images) best = std::min(best, distance(p, y));
      if (best <= options.fallback_tol)
        ++rep.fallback_inside;
      else
        ++rep.inconclusive;
    }
  }
  if (rep.tested) {
    rep.pass_fraction = static_cast<double>(rep.inside + rep.fallback_inside) / static_cast<double>(rep.tested);
    rep.inconclusive_fraction = static_cast<double>(rep.inconclusive) / static_cast<double>(rep.tested);
  }
  rep.passed = rep.pass_fraction >= 0.99;
  return rep;
}

CoverReport vitali_cover(FlowCache& cache, const LambdaTable& table, std::span<const double> lo,
                         std::span<const double> hi, double rho, const CoverOptions& options) {
  const std::size_t n = cache.table().dim();
  if (lo.size() != n || hi.size() != n) throw DimensionMismatch("cover region must have dimension " + std::to_string(n));
  if (!(rho > 0)) throw ValidationError("cover radius must be positive");
  if (options.grid == 0) throw ValidationError("cover grid must be positive");
  CoverReport rep;
  rep.region_volume = 1;
  for (std::size_t i = 0; i < n; ++i) rep.region_volume *= std::max(0.0, hi[i] - lo[i]);
  if (!(rep.region_volume > 0)) return rep;

  // Grid of cell centers in lexicographic order.
  std::vector<std::vector<double>> grid;
  std::vector<unsigned> idx(n, 0);
  for (;;) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i)
      p[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / static_cast<double>(options.grid);
    grid.push_back(p);
    std::size_t i = n;
    while (i-- > 0) {
      if (++idx[i] < options.grid) break;
      idx[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  rep.grid_points = grid.size();

  std::map<std::vector<Word>, std::unique_ptr<BallMap>> maps;
  auto map_for = [&](const std::vector<Word>& w) -> const BallMap& {
    auto it = maps.find(w);
    if (it == maps.end()) it = maps.emplace(w, std::make_unique<BallMap>(cache, w)).first;
    return *it->second;
  };

  struct Center {
    std::vector<double> x;
    const BallMap* map;
    SampledBall small, large;
  };
  const double rs = options.c * rho;
  std::vector<double> rsv(n, rs), rlv(n, rho);
  std::vector<const BallMap*> grid_map(grid.size(), nullptr);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    TupleChoice tc = options.words.empty() ? best_tuple(table, grid[g]) : tuple_at(table, options.words, grid[g]);
    if (!(tc.lambda > 0)) continue;
    ++rep.eligible;
    grid_map[g] = &map_for(tc.words);
  }

  std::vector<Center> chosen;
  MeanAccumulator vol;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!grid_map[g]) continue;
    const BallMap& m = *grid_map[g];
    SampledBall s = sample_ball(m, grid[g], rs, options.ball_samples, options.seed, 0.05);
    bool disjoint = true;
    for (const auto& c : chosen) {
      if (!s.bounds.overlaps(c.small.bounds)) continue;
      for (const auto& y : s.images) {
        if (c.small.bounds.contains(y) && c.map->preimage(c.x, y, rsv, options.newton).status == Membership::Inside) {
          disjoint = false;
          break;
        }
      }
      for (std::size_t k = 0; disjoint && k < c.small.images.size(); ++k) {
        const auto& y = c.small.images[k];
        if (s.bounds.contains(y) && m.preimage(grid[g], y, rsv, options.newton).status == Membership::Inside)
          disjoint = false;
      }
      if (!disjoint) break;
    }
    if (!disjoint) continue;
    // Volume of the isotropic ball by change of variables.
    ScrambledHalton h(n, options.seed);
    std::vector<double> t(n);
    MeanAccumulator det;
    for (std::uint64_t k = 0; k < 1024; ++k) {
      box_point(h, k, rsv, t.data());
      det.add(std::abs(m.jac_det(grid[g], t)));
    }
    vol.add(det.mean() * std::pow(2 * rs, static_cast<double>(n)));
    chosen.push_back({grid[g], &m, std::move(s), sample_ball(m, grid[g], rho, options.ball_samples, options.seed, 0.1)});
  }

  std::size_t covered = 0, tested = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!grid_map[g]) continue;
    ++tested;
    for (const auto& c : chosen) {
      if (!c.large.bounds.contains(grid[g])) continue;
      if (c.x == grid[g] || c.map->preimage(c.x, grid[g], rlv, options.newton).status == Membership::Inside) {
        ++covered;
        break;
      }
    }
  }
  for (const auto& c : chosen) rep.centers.push_back(c.x);
  rep.covered_fraction = tested ? static_cast<double>(covered) / static_cast<double>(tested) : 0.0;
  rep.mean_ball_volume = vol.mean();
  if (rep.mean_ball_volume > 0) rep.volume_oracle = rep.region_volume / rep.mean_ball_volume;
  return rep;
}

}  // namespace torsionlab
