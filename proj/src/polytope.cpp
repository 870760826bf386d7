#include "torsionlab/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "torsionlab/errors.hpp"
#include "torsionlab/poly_matrix.hpp"

namespace torsionlab {

std::vector<WordClass> word_classes(const WordTable& table) {
  std::vector<WordClass> classes;
  for (const auto& e : table.entries()) {
    bool placed = false;
    for (auto& c : classes) {
      if (c.degree != e.degree) continue;
      if (c.field == e.field || c.field == -e.field) {
        c.members.push_back(e.word);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({e.word, {e.word}, e.field, e.degree});
  }
  return classes;
}

namespace {

double binomial(std::size_t m, std::size_t k) {
  double r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * static_cast<double>(m - i) / static_cast<double>(i + 1);
  return r;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t m) {
  std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < m - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

LambdaTable lambda_table(const WordTable& table, const LambdaOptions& options) {
  LambdaTable out;
  out.classes = word_classes(table);
  const std::size_t n = table.dim(), m = out.classes.size();
  if (m < n) return out;
  if (binomial(m, n) > static_cast<double>(options.max_tuples))
    throw BudgetExceeded("determinant table would need " + std::to_string(static_cast<long long>(binomial(m, n))) +
                         " tuples; budget is " + std::to_string(options.max_tuples));
  struct Candidate {
    std::vector<std::size_t> idx;
    Lattice2 degree;
  };
  std::vector<Candidate> cands;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  do {
    Lattice2 d{0, 0};
    for (auto i : idx) {
      d[0] += out.classes[i].degree[0];
      d[1] += out.classes[i].degree[1];
    }
    cands.push_back({idx, d});
  } while (next_combination(idx, m));
  if (options.prune_dominated)
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.degree[0] + a.degree[1] < b.degree[0] + b.degree[1];
    });
  std::vector<Lattice2> found;
  for (const auto& c : cands) {
    if (options.prune_dominated) {
      bool dominated = std::any_of(found.begin(), found.end(), [&](const Lattice2& g) {
        return c.degree[0] >= g[0] && c.degree[1] >= g[1];
      });
      if (dominated) {
        ++out.tuples_pruned;
        continue;
      }
    }
    ++out.tuples_examined;
    PolyMatrix mat(n, n, n);
    for (std::size_t col = 0; col < n; ++col)
      for (std::size_t row = 0; row < n; ++row) mat(row, col) = out.classes[c.idx[col]].field.comps[row];
    RatPoly det = determinant(mat);
    if (det.is_zero()) continue;
    LambdaEntry e;
    for (auto i : c.idx) e.words.push_back(out.classes[i].representative);
    e.lambda = std::move(det);
    e.degree = c.degree;
    found.push_back(c.degree);
    out.entries.push_back(std::move(e));
  }
  return out;
}

namespace {

Rat cross(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
}

// a*X + b*Y >= c with a, b >= 0.
struct HalfPlane {
  Rat a, b, c;
};

std::vector<HalfPlane> halfplanes(const std::vector<Point2>& ext) {
  std::vector<HalfPlane> hs;
  hs.push_back({1, 0, ext.front().x});
  hs.push_back({0, 1, ext.back().y});
  for (std::size_t k = 0; k + 1 < ext.size(); ++k) {
    Rat a = ext[k].y - ext[k + 1].y, b = ext[k + 1].x - ext[k].x;
    hs.push_back({a, b, a * ext[k].x + b * ext[k].y});
  }
  return hs;
}

}  // namespace

Polytope2D Polytope2D::from_points(const std::vector<Point2>& points) {
  Polytope2D poly;
  if (points.empty()) return poly;
  std::vector<Point2> pts = points;
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  std::vector<Point2> front;
  for (const auto& p : pts)
    if (front.empty() || p.y < front.back().y) front.push_back(p);
  std::vector<Point2> hull;
  for (const auto& p : front) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
    hull.push_back(p);
  }
  poly.extreme_ = std::move(hull);
  return poly;
}

Polytope2D Polytope2D::from_generators(const std::vector<Lattice2>& generators) {
  std::vector<Point2> pts;
  std::set<Lattice2> uniq(generators.begin(), generators.end());
  for (const auto& g : uniq) pts.push_back({Rat(g[0]), Rat(g[1])});
  Polytope2D p = from_points(pts);
  p.generators_.assign(uniq.begin(), uniq.end());
  return p;
}

bool Polytope2D::contains(const Point2& p) const {
  if (empty()) return false;
  for (const auto& h : halfplanes(extreme_))
    if (h.a * p.x + h.b * p.y < h.c) return false;
  return true;
}

bool Polytope2D::subset_of(const Polytope2D& other) const {
  if (empty()) return true;
  return std::all_of(extreme_.begin(), extreme_.end(), [&](const Point2& p) { return other.contains(p); });
}

Polytope2D Polytope2D::intersect(const Polytope2D& other) const {
  if (empty() || other.empty()) return Polytope2D();
  auto hs = halfplanes(extreme_);
  auto ho = halfplanes(other.extreme_);
  hs.insert(hs.end(), ho.begin(), ho.end());
  std::vector<Point2> cands;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      Rat det = hs[i].a * hs[j].b - hs[i].b * hs[j].a;
      if (det == 0) continue;
      Point2 p{(hs[i].c * hs[j].b - hs[i].b * hs[j].c) / det, (hs[i].a * hs[j].c - hs[i].c * hs[j].a) / det};
      if (contains(p) && other.contains(p)) cands.push_back(p);
    }
  }
  return from_points(cands);
}

std::vector<Lattice2> Polytope2D::minimal_lattice_points() const {
  std::set<Lattice2> out;
  auto lattice = [](const Point2& p) -> std::optional<Lattice2> {
    if (p.x.get_den() != 1 || p.y.get_den() != 1) return std::nullopt;
    return Lattice2{static_cast<int>(p.x.get_num().get_si()), static_cast<int>(p.y.get_num().get_si())};
  };
  for (std::size_t k = 0; k < extreme_.size(); ++k) {
    if (auto l = lattice(extreme_[k])) out.insert(*l);
    if (k + 1 == extreme_.size()) break;
    const Point2 &a = extreme_[k], &b = extreme_[k + 1];
    Int xs;
    mpz_cdiv_q(xs.get_mpz_t(), a.x.get_num_mpz_t(), a.x.get_den_mpz_t());
    for (Rat x(xs); x <= b.x; x += 1) {
      Rat y = a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
      if (auto l = lattice({x, y})) out.insert(*l);
    }
  }
  return {out.begin(), out.end()};
}

Polytope2D newton_polytope(const LambdaTable& table, NewtonFlavor flavor, const std::vector<std::vector<Rat>>& points) {
  auto at_point = [&](const std::vector<Rat>& x) {
    std::vector<Lattice2> gens;
    for (const auto& e : table.entries)
      if (e.lambda.eval(x) != 0) gens.push_back(e.degree);
    return Polytope2D::from_generators(gens);
  };
  switch (flavor) {
    case NewtonFlavor::Union: {
      std::vector<Lattice2> gens;
      for (const auto& e : table.entries) gens.push_back(e.degree);
      return Polytope2D::from_generators(gens);
    }
    case NewtonFlavor::Point:
      if (points.size() != 1) throw ValidationError("point polytope needs exactly one point");
      return at_point(points[0]);
    case NewtonFlavor::Intersection: {
      if (points.empty()) throw ValidationError("intersection polytope needs sample points");
      Polytope2D acc = at_point(points[0]);
      for (std::size_t i = 1; i < points.size(); ++i) acc = acc.intersect(at_point(points[i]));
      return acc;
    }
  }
  return {};
}

ExtremeAndMinimal extreme_and_minimal(const Polytope2D& p) { return {p.extreme_points(), p.minimal_lattice_points()}; }

double WeightSpec::evaluate(std::span<const double> x) const {
  double e = exponent.get_d(), sum = 0;
  for (const auto& c : compiled) sum += std::pow(std::fabs(c(x)), e);
  return sum;
}

WeightSpec weight_spec(const LambdaTable& table, const Lattice2& b) {
  WeightSpec w;
  w.b = b;
  w.p = exponent_pair(b);
  w.exponent = make_rat(1, b[0] + b[1] - 1);
  for (const auto& e : table.entries)
    if (e.degree == b) {
      w.summands.push_back(e.lambda);
      w.compiled.emplace_back(e.lambda);
    }
  return w;
}

PolytopeViaJ polytope_via_J(const IterFlowMap& psi12, const IterFlowMap& psi21, const std::vector<Rat>& x0,
                            int max_beta_per_var) {
  const std::size_t n = psi12.n;
  if (x0.size() != n) throw DimensionMismatch("base point has wrong dimension");
  PolytopeViaJ out;
  std::vector<Lattice2> gens;
  auto scan = [&](const IterFlowMap& psi, Pattern pattern) {
    for (const auto& [texp, coeff] : psi.jac_det.split_tail(n)) {
      std::vector<unsigned> beta(texp.begin(), texp.end());
      if (max_beta_per_var >= 0 &&
          std::any_of(beta.begin(), beta.end(), [&](unsigned v) { return static_cast<int>(v) > max_beta_per_var; })) {
        out.truncated = true;
        continue;
      }
      if (coeff.eval(x0) == 0) continue;
      Lattice2 b = torsion_degree(beta, pattern);
      gens.push_back(b);
      out.contributions.push_back({beta, b});
    }
  };
  scan(psi12, Pattern::Alternating12);
  scan(psi21, Pattern::Alternating21);
  out.polytope = Polytope2D::from_generators(gens);
  return out;
}

PolytopeViaJ polytope_via_J(const WordTable& table, const std::vector<Rat>& x0, int max_beta_per_var) {
  FlowCache cache(table);
  IterFlowMap a = iter_flow(cache, pattern_words(table.dim(), Pattern::Alternating12));
  IterFlowMap b = iter_flow(cache, pattern_words(table.dim(), Pattern::Alternating21));
  return polytope_via_J(a, b, x0, max_beta_per_var);
}

}  // namespace torsionlab
