#include "torsionlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "torsionlab/ccballs.hpp"
#include "torsionlab/errors.hpp"
#include "torsionlab/json_io.hpp"
#include "torsionlab/nilpotent.hpp"
#include "torsionlab/polyalg.hpp"
#include "torsionlab/polytope.hpp"
#include "torsionlab/scene.hpp"
#include "torsionlab/verify.hpp"

namespace torsionlab {

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> samples;
  std::string out;
  std::uint64_t samples_or(std::uint64_t d) const { return samples.value_or(d); }
};

Json words_json(const std::vector<Word>& words) {
  Json a = Json::array();
  for (const auto& w : words) a.push_back(word_label(w));
  return a;
}


Json estimate_json(const Estimate& e) {
  Json o;
  o["estimate"] = e.value;
  o["stderr"] = e.stderr_;
  o["samples"] = e.samples;
  o["seed"] = e.seed;
  return o;
}

Json interval_json(const Interval& iv) { return Json::array({to_json(iv.lo), to_json(iv.hi)}); }

// Optional section of the scene.
Json section(const Scene& s, const std::string& key) {
  if (!s.raw.contains(key)) return Json::object();
  const auto& j = s.raw[key];
  if (!j.is_object()) throw SchemaError("/" + key, "expected an object");
  return j;
}

Box box_from_json(const Json& j, const std::string& ptr) {
  auto lo = rats_from_json(require(j, "lo", ptr), child(ptr, "lo"));
  auto hi = rats_from_json(require(j, "hi", ptr), child(ptr, "hi"));
  try {
    return Box(lo, hi);
  } catch (const ValidationError& e) {
    throw SchemaError(ptr, e.what());
  }
}

BoxUnion boxes_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of boxes");
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < j.size(); ++i) boxes.push_back(box_from_json(j[i], child(ptr, i)));
  try {
    return BoxUnion(boxes);
  } catch (const ValidationError& e) {
    throw SchemaError(ptr, e.what());
  }
}

StepFunction step_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of levels {\"coef\", \"boxes\"}");
  std::vector<StepFunction::Level> lv;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto ip = child(ptr, i);
    lv.push_back({rat_from_json(require(j[i], "coef", ip), child(ip, "coef")),
                  boxes_from_json(require(j[i], "boxes", ip), child(ip, "boxes"))});
  }
  try {
    return StepFunction(lv);
  } catch (const ValidationError& e) {
    throw SchemaError(ptr, e.what());
  }
}

Box unit_box(std::size_t n) { return Box(std::vector<Rat>(n, Rat(0)), std::vector<Rat>(n, Rat(1))); }

// [0,1]^(n-1) x [-1,1].
Box default_domain(std::size_t n) {
  std::vector<Rat> lo(n, Rat(0)), hi(n, Rat(1));
  lo[n - 1] = -1;
  return Box(lo, hi);
}

void write_output(const Json& j, const Globals& g, std::ostream& out) {
  std::string text = j.dump(2) + "\n";
  if (g.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + g.out);
  f << text;
}


// ---- subcommands ----

Json cmd_fields(const Scene& s) {
  Json o;
  o["scene"] = s.name;
  o["dim"] = s.dim();
  o["vars"] = s.names;
  Json pi1 = Json::array(), pi2 = Json::array();
  for (const auto& c : s.pair.pi1.comps) pi1.push_back(c.to_string(s.names));
  for (const auto& c : s.pair.pi2.comps) pi2.push_back(c.to_string(s.names));
  o["pi1"] = pi1;
  o["pi2"] = pi2;
  auto x1 = s.pair.x1(), x2 = s.pair.x2();
  o["X1"] = to_json(x1, s.names);
  o["X2"] = to_json(x2, s.names);
  o["divergence"] = {divergence(x1).to_string(s.names), divergence(x2).to_string(s.names)};
  WordTable table = s.pair.table(s.cap);
  Json words = Json::array();
  for (const auto& e : table.entries()) {
    Json w;
    w["word"] = word_label(e.word);
    w["degree"] = e.degree;
    w["field"] = to_json(e.field, s.names);
    words.push_back(w);
  }
  o["cap"] = s.cap;
  o["words"] = words;
  auto nil = nilpotency_step(table);
  o["nilpotent"] = nil.nilpotent;
  if (nil.nilpotent) o["step"] = nil.step;
  return o;
}

std::vector<unsigned> parse_beta(const std::string& text) {
  std::vector<unsigned> beta;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      long v = std::stol(part, &used);
      if (used != part.size() || v < 0) throw std::invalid_argument(part);
      beta.push_back(static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw ValidationError("--beta expects nonnegative integers separated by commas, got '" + text + "'");
    }
  }
  return beta;
}

Json cmd_torsion(const Scene& s, const std::string& beta_flag, const std::string& pattern_flag) {
  std::vector<unsigned> beta;
  if (!beta_flag.empty())
    beta = parse_beta(beta_flag);
  else if (s.beta)
    beta = *s.beta;
  else
    throw ValidationError("torsion needs a multi-index: pass --beta or set \"beta\" in the scene");
  if (beta.size() != s.dim())
    throw DimensionMismatch("beta needs " + std::to_string(s.dim()) + " entries, got " + std::to_string(beta.size()));
  Pattern pattern = pattern_flag.empty() ? s.pattern : pattern_from_string(pattern_flag, "--pattern");
  WordTable table = s.pair.table(2);
  auto prof = torsion_profile(table, beta, pattern);
  Json o;
  o["scene"] = s.name;
  o["beta"] = beta;
  o["pattern"] = pattern_label(pattern);
  o["b"] = prof.b;
  o["p"] = {to_json(prof.p[0]), to_json(prof.p[1])};
  o["J"] = to_json(prof.J, s.names);
  o["rho_exponent"] = to_json(prof.rho_exponent);
  if (s.point) {
    Rat v = prof.J.eval(*s.point);
    o["point"] = to_json(*s.point);
    o["J_at_point"] = to_json(v);
    o["rho_at_point"] = std::pow(std::abs(v.get_d()), prof.rho_exponent.get_d());
  }
  return o;
}

Json cmd_polytope(const Scene& s, const std::string& flavor) {
  WordTable table = s.pair.table(s.cap);
  auto lt = lambda_table(table);
  NewtonFlavor fl = NewtonFlavor::Union;
  std::vector<std::vector<Rat>> pts;
  if (flavor == "point") {
    fl = NewtonFlavor::Point;
    pts.push_back(s.point.value_or(std::vector<Rat>(s.dim(), Rat(0))));
  } else if (flavor != "union") {
    throw ValidationError("--flavor must be union or point");
  }
  auto poly = newton_polytope(lt, fl, pts);
  auto em = extreme_and_minimal(poly);
  Json o;
  o["scene"] = s.name;
  o["flavor"] = flavor;
  if (!pts.empty()) o["point"] = to_json(pts[0]);
  Json entries = Json::array();
  for (const auto& e : lt.entries) {
    Json j;
    j["words"] = words_json(e.words);
    j["degree"] = e.degree;
    j["lambda"] = e.lambda.to_string(s.names);
    entries.push_back(j);
  }
  o["lambda"] = entries;
  o["generators"] = poly.generators();
  Json ext = Json::array();
  for (const auto& p : em.extreme) ext.push_back({to_json(p.x), to_json(p.y)});
  o["extreme"] = ext;
  o["minimal"] = em.minimal;
  Json weights = Json::array();
  for (const auto& b : em.minimal) {
    auto w = weight_spec(lt, b);
    if (w.summands.empty()) continue;
    Json j;
    j["b"] = b;
    j["p"] = {to_json(w.p[0]), to_json(w.p[1])};
    j["exponent"] = to_json(w.exponent);
    Json sm = Json::array();
    for (const auto& q : w.summands) sm.push_back(q.to_string(s.names));
    j["summands"] = sm;
    weights.push_back(j);
  }
  o["weights"] = weights;
  return o;
}

Json ball_json(const BallSample& b, bool with_points) {
  Json o;
  o["center"] = to_json(b.spec.center);
  o["words"] = words_json(b.spec.words);
  o["alpha"] = {to_json(b.spec.alpha[0]), to_json(b.spec.alpha[1])};
  o["method"] = b.method;
  o["volume"] = b.volume;
  o["stderr"] = b.stderr_;
  o["jac_range"] = {b.jac_min, b.jac_max};
  o["lambda"] = b.lambda;
  o["box_measure"] = b.box_measure;
  o["sandwich_ratio"] = b.sandwich_ratio;
  o["raw_ratio"] = b.raw_ratio;
  o["points_kept"] = b.points.size();
  if (with_points) o["points"] = b.points;
  return o;
}

Json cmd_ccball(const Scene& s, const Globals& g, const std::string& check, bool with_points) {
  const std::size_t n = s.dim();
  WordTable table = s.pair.table(s.cap);
  FlowCache cache(table);
  auto lt = lambda_table(table);
  Json ball = section(s, "ball");
  if (!s.raw.contains("ball") && s.raw.contains("center")) ball = s.raw;
  std::vector<Rat> center = ball.contains("center") ? rats_from_json(ball["center"], "/ball/center")
                                                    : s.point.value_or(std::vector<Rat>(n, Rat(0)));
  if (center.size() != n) throw SchemaError("/ball/center", "center needs " + std::to_string(n) + " coordinates");
  auto xc = to_doubles(center);
  std::vector<Word> words;
  if (ball.contains("words")) {
    words = words_from_json(ball["words"], "/ball/words");
  } else {
    auto tc = best_tuple(lt, xc);
    if (!(tc.lambda > 0)) throw HypothesisNotMet("no word tuple has nonzero determinant at the center");
    words = tc.words;
  }
  std::array<Rat, 2> alpha{Rat(1), Rat(1)};
  if (ball.contains("alpha")) {
    auto a = rats_from_json(ball["alpha"], "/ball/alpha");
    if (a.size() != 2) throw SchemaError("/ball/alpha", "alpha is a pair");
    alpha = {a[0], a[1]};
  }
  BallSpec spec{center, words, alpha};
  spec.validate(n);
  Json o;
  o["scene"] = s.name;
  o["check"] = check;
  if (check == "none") {
    BallMap map(cache, words);
    o["ball"] = ball_json(ball_sample(map, spec, g.samples_or(100000), g.seed), with_points);
    return o;
  }
  if (check == "doubling") {
    Json d = section(s, "doubling");
    DoublingOptions opt;
    opt.seed = g.seed;
    opt.samples = g.samples_or(2000);
    if (d.contains("c")) opt.c = double_from_json(d["c"], "/doubling/c");
    if (d.contains("delta")) opt.delta = double_from_json(d["delta"], "/doubling/delta");
    double rho = d.contains("rho") ? double_from_json(d["rho"], "/doubling/rho") : opt.c * opt.delta / 2;
    std::vector<double> x1 = xc, x2;
    if (d.contains("x2")) {
      auto r = rats_from_json(d["x2"], "/doubling/x2");
      if (r.size() != n) throw SchemaError("/doubling/x2", "x2 needs " + std::to_string(n) + " coordinates");
      x2 = to_doubles(r);
    } else {
      // Default second center: flow along X1 by half the small radius.
      double step = opt.c * opt.delta * rho / 2;
      CompiledMap flow(cache.flow({1}).map);
      std::vector<double> xt = x1;
      xt.push_back(step);
      x2 = flow(xt);
    }
    auto w1 = words;
    auto w2 = d.contains("words2") ? words_from_json(d["words2"], "/doubling/words2") : words;
    BallMap m1(cache, w1), m2(cache, w2);
    auto rep = doubling_check(m1, m2, x1, x2, tuple_at(lt, w1, x1), tuple_at(lt, w2, x2), rho, opt);
    Json r;
    r["x1"] = x1;
    r["x2"] = x2;
    r["words1"] = words_json(w1);
    r["words2"] = words_json(w2);
    r["rho"] = rep.rho;
    r["c"] = rep.c;
    r["delta"] = rep.delta;
    r["lambda_ratio"] = {rep.ratio1, rep.ratio2};
    r["applicable"] = rep.applicable;
    if (!rep.applicable) r["reason"] = rep.reason;
    r["tested"] = rep.tested;
    r["inside"] = rep.inside;
    r["outside"] = rep.outside;
    r["fallback_inside"] = rep.fallback_inside;
    r["inconclusive"] = rep.inconclusive;
    r["pass_fraction"] = rep.pass_fraction;
    r["inconclusive_fraction"] = rep.inconclusive_fraction;
    r["verdict"] = !rep.applicable ? "not_applicable" : rep.passed ? "pass" : "fail";
    o["doubling"] = r;
    return o;
  }
  if (check == "cover") {
    Json c = section(s, "cover");
    std::vector<double> lo(n, 0.0), hi(n, 1.0);
    if (c.contains("lo")) lo = to_doubles(rats_from_json(c["lo"], "/cover/lo"));
    if (c.contains("hi")) hi = to_doubles(rats_from_json(c["hi"], "/cover/hi"));
    if (lo.size() != n || hi.size() != n) throw SchemaError("/cover", "region corners need " + std::to_string(n) + " coordinates");
    CoverOptions opt;
    opt.seed = g.seed;
    if (c.contains("c")) opt.c = double_from_json(c["c"], "/cover/c");
    if (c.contains("grid")) opt.grid = static_cast<unsigned>(int_from_json(c["grid"], "/cover/grid"));
    if (c.contains("words")) opt.words = words_from_json(c["words"], "/cover/words");
    double rho = c.contains("rho") ? double_from_json(c["rho"], "/cover/rho") : 0.25;
    auto rep = vitali_cover(cache, lt, lo, hi, rho, opt);
    Json r;
    r["rho"] = rho;
    r["c"] = opt.c;
    r["grid_points"] = rep.grid_points;
    r["eligible"] = rep.eligible;
    r["count"] = rep.centers.size();
    r["centers"] = rep.centers;
    r["covered_fraction"] = rep.covered_fraction;
    r["region_volume"] = rep.region_volume;
    r["mean_ball_volume"] = rep.mean_ball_volume;
    r["volume_oracle"] = rep.volume_oracle;
    o["cover"] = r;
    return o;
  }
  throw ValidationError("--check must be none, doubling or cover");
}

Json cmd_malcev(const Scene& s) {
  WordTable table = s.pair.table(s.cap);
  auto x0 = s.point.value_or(std::vector<Rat>(s.dim(), Rat(0)));
  auto cov = covering_map(table, x0);
  Json o;
  o["scene"] = s.name;
  o["point"] = to_json(x0);
  const auto& alg = cov.algebra;
  o["dim"] = alg.dim;
  o["step"] = alg.step;
  o["labels"] = alg.labels;
  Json sc = Json::array();
  for (std::size_t i = 0; i < alg.dim; ++i)
    for (std::size_t j = i + 1; j < alg.dim; ++j)
      for (std::size_t k = 0; k < alg.dim; ++k)
        if (alg.c(i, j, k) != 0) sc.push_back({i + 1, j + 1, k + 1, to_json(alg.c(i, j, k))});
  o["structure_constants"] = sc;  // [i, j, k, c] for [e_i, e_j] = c e_k + ...
  Json basis = Json::array();
  for (const auto& v : cov.basis.vectors) basis.push_back(to_json(v));
  o["malcev_basis"] = basis;
  o["orbit_dim"] = cov.basis.n;
  Json iso = Json::array();
  for (const auto& v : cov.isotropy) iso.push_back(to_json(v));
  o["isotropy"] = iso;
  auto law_names = default_names(cov.law.N, "a");
  auto b = default_names(cov.law.N, "b");
  law_names.insert(law_names.end(), b.begin(), b.end());
  Json q = Json::array(), r = Json::array();
  for (const auto& p : cov.law.q) q.push_back(p.to_string(law_names));
  for (const auto& p : cov.law.r) r.push_back(p.to_string(law_names));
  o["group_law"] = {{"q", q}, {"r", r}};
  Json phi = Json::array();
  auto y = default_names(cov.basis.n, "y");
  for (const auto& p : cov.phi) phi.push_back(p.to_string(y));
  o["covering_map"] = phi;
  return o;
}

UPoly upoly_from_json(const Json& j, const std::string& ptr) {
  return UPoly::from_poly(poly_from_json(j, {"t"}, ptr));
}

std::vector<UPoly> upolys_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected a nonempty array of polynomials in t");
  std::vector<UPoly> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(upoly_from_json(j[i], child(ptr, i)));
  return out;
}

Json cover_json(const MonomialCover& c) {
  Json o;
  o["epsilon"] = to_json(c.epsilon);
  Json pieces = Json::array();
  for (const auto& p : c.pieces) {
    Json j;
    j["lo"] = p.lo ? to_json(*p.lo) : Json("-inf");
    j["hi"] = p.hi ? to_json(*p.hi) : Json("inf");
    j["center"] = to_json(p.center);
    j["orders"] = p.k;
    pieces.push_back(j);
  }
  o["pieces"] = pieces;
  Json cells = Json::array();
  for (const auto& iv : c.root_cells) cells.push_back(interval_json(iv));
  o["root_cells"] = cells;
  o["breakpoints"] = c.breakpoints;
  o["bisections"] = c.bisections;
  return o;
}

Json cmd_polyalg(const Json& in, const Globals& g) {
  const std::string op = string_from_json(require(in, "op", ""), "/op");
  Json o;
  o["op"] = op;
  if (op == "two-terms") {
    auto coeffs = rats_from_json(require(in, "coeffs", ""), "/coeffs");
    auto k = int_from_json(require(in, "k", ""), "/k");
    if (k < 0) throw SchemaError("/k", "k must be nonnegative");
    auto r = extract_two_terms(coeffs, static_cast<unsigned>(k));
    o["kind"] = r.kind == TwoTermKind::SingleTerm ? "single" : r.kind == TwoTermKind::Pair ? "pair" : "fail";
    o["holds"] = r.holds;
    o["n1"] = r.n1;
    o["n2"] = r.n2;
    o["mean_at_least_one"] = r.mean_at_least_one;
    o["constant"] = r.constant;
    if (r.witness) o["witness"] = to_json(*r.witness);
  } else if (op == "refine") {
    const auto& ivs = require(in, "intervals", "");
    if (!ivs.is_array()) throw SchemaError("/intervals", "expected an array of [lo, hi] pairs");
    std::vector<Interval> v;
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      auto p = rats_from_json(ivs[i], child("/intervals", i));
      if (p.size() != 2) throw SchemaError(child("/intervals", i), "expected [lo, hi]");
      v.push_back({p[0], p[1]});
    }
    auto levels = in.contains("levels") ? int_from_json(in["levels"], "/levels") : 1;
    if (levels < 1 || levels > 64) throw SchemaError("/levels", "levels must lie in 1..64");
    IntervalSet set;
    try {
      set = IntervalSet(v);
    } catch (const ValidationError& e) {
      throw SchemaError("/intervals", e.what());
    }
    auto r = refine_interval(set, static_cast<unsigned>(levels));
    Json lv = Json::array();
    for (const auto& l : r.levels) {
      Json j;
      j["start"] = interval_json(l.start);
      j["stop"] = interval_json(l.stop);
      j["J"] = interval_json(l.J);
      j["K"] = interval_json(l.K);
      j["steps"] = l.steps;
      j["ratio_J"] = l.ratio_J;
      j["ratio_K"] = l.ratio_K;
      j["dist_over_length"] = to_json(l.dist_over_length);
      lv.push_back(j);
    }
    o["levels"] = lv;
    o["J"] = interval_json(r.J);
    o["K"] = interval_json(r.K);
    o["completed"] = r.completed;
  } else if (op == "sublevel") {
    auto nv = in.contains("nvars") ? int_from_json(in["nvars"], "/nvars") : 1;
    if (nv < 1 || nv > 8) throw SchemaError("/nvars", "nvars must lie in 1..8");
    auto names = nv == 1 ? std::vector<std::string>{"t"} : default_names(static_cast<std::size_t>(nv));
    auto p = poly_from_json(require(in, "poly", ""), names, "/poly");
    auto levels = in.contains("levels") ? int_from_json(in["levels"], "/levels") : 12;
    if (levels < 1 || levels > 40) throw SchemaError("/levels", "levels must lie in 1..40");
    auto r = sublevel_measure(p, static_cast<unsigned>(levels), g.samples_or(200000), g.seed);
    o["sup_norm"] = r.sup_norm;
    o["exact"] = r.exact;
    Json pts = Json::array();
    for (const auto& q : r.points) pts.push_back({{"eps", q.eps}, {"measure", q.measure}, {"stderr", q.stderr_}});
    o["points"] = pts;
    o["fitted_exponent"] = r.fitted_exponent;
  } else if (op == "monomialize" || op == "curve-monomialize") {
    Rat eps = rat_from_json(require(in, "eps", ""), "/eps");
    if (op == "monomialize")
      o["cover"] = cover_json(monomialize(upolys_from_json(require(in, "polys", ""), "/polys"), eps));
    else
      o["cover"] = cover_json(curve_monomialize(upolys_from_json(require(in, "curve", ""), "/curve"), eps));
  } else if (op == "tangency") {
    auto gamma = upolys_from_json(require(in, "curve", ""), "/curve");
    const auto& tj = require(in, "times", "");
    if (!tj.is_array()) throw SchemaError("/times", "expected an array of numbers");
    std::vector<double> times;
    for (std::size_t i = 0; i < tj.size(); ++i) times.push_back(double_from_json(tj[i], child("/times", i)));
    double delta = double_from_json(require(in, "delta", ""), "/delta");
    double eps = double_from_json(require(in, "eps", ""), "/eps");
    auto r = tangency_scan(gamma, times, delta, eps);
    o["found"] = r.found;
    if (r.found) o["index"] = r.index;
    o["ratios"] = r.ratios;
  } else if (op == "scale-count") {
    auto p1 = upoly_from_json(require(in, "p1", ""), "/p1");
    auto p2 = upoly_from_json(require(in, "p2", ""), "/p2");
    auto geti = [&](const char* k) { return static_cast<int>(int_from_json(require(in, k, ""), std::string("/") + k)); };
    auto r = scale_count(p1, p2, geti("a1"), geti("a2"), geti("k_lo"), geti("k_hi"));
    o["feasible"] = r.feasible;
    o["count"] = r.count();
  } else {
    throw SchemaError("/op",
                      "unknown op '" + op +
                          "'; expected two-terms, refine, sublevel, monomialize, curve-monomialize, tangency or "
                          "scale-count");
  }
  return o;
}

InequalitySetup setup_for(const Scene& s) {
  if (!s.beta) throw ValidationError("verification needs \"beta\" in the scene");
  if (s.beta->size() != s.dim()) throw SchemaError("/beta", "beta needs " + std::to_string(s.dim()) + " entries");
  return InequalitySetup::build(s.pair, *s.beta, s.pattern);
}

Json cmd_verify(const Scene& s, const Globals& g, const std::string& mode) {
  Json v = section(s, "verify");
  const std::size_t n = s.dim();
  const std::uint64_t samples = g.samples_or(1 << 16);
  Json o;
  o["scene"] = s.name;
  o["mode"] = mode;
  o["seed"] = g.seed;
  o["samples"] = samples;
  auto unit_union = [&] { return BoxUnion({unit_box(n - 1)}); };
  if (mode == "measure" || mode == "rwt") {
    auto setup = setup_for(s);
    RegionSpec region{v.contains("domain") ? box_from_json(v["domain"], "/verify/domain") : unit_box(n), {}, {}, {}};
    if (v.contains("band")) region.band = static_cast<int>(int_from_json(v["band"], "/verify/band"));
    if (v.contains("e1")) region.e1 = boxes_from_json(v["e1"], "/verify/e1");
    if (v.contains("e2")) region.e2 = boxes_from_json(v["e2"], "/verify/e2");
    if (mode == "measure") {
      auto e = measure(setup, region, samples, g.seed);
      o.update(estimate_json(e));
      o["verdict"] = "ok";
      return o;
    }
    if (!region.e1) region.e1 = unit_union();
    if (!region.e2) region.e2 = unit_union();
    auto r = rwt_ratio(setup, region, samples, g.seed);
    o.update(estimate_json(r.omega));
    o["E1"] = r.e1;
    o["E2"] = r.e2;
    o["p"] = setup.p;
    o["ratio"] = r.ratio;
    o["alpha"] = {r.alpha1, r.alpha2};
    o["alpha_form"] = r.alpha_form;
    o["verdict"] = r.degenerate ? "degenerate" : "finite";
    return o;
  }
  if (mode == "strong" || mode == "scales") {
    auto setup = setup_for(s);
    Box domain = v.contains("domain") ? box_from_json(v["domain"], "/verify/domain") : default_domain(n);
    auto indicator = StepFunction({{Rat(1), unit_union()}});
    auto f1 = v.contains("f1") ? step_from_json(v["f1"], "/verify/f1") : indicator;
    auto f2 = v.contains("f2") ? step_from_json(v["f2"], "/verify/f2") : indicator;
    if (mode == "strong") {
      auto r = bilinear_form(setup, f1, f2, domain, samples, g.seed);
      o.update(estimate_json(r.form));
      o["p"] = setup.p;
      o["norms"] = {r.norm1, r.norm2};
      o["ratio"] = r.ratio;
      o["verdict"] = "finite";
      return o;
    }
    int m0 = -8, m1 = 3;
    if (v.contains("bands")) {
      const auto& b = v["bands"];
      if (!b.is_array() || b.size() != 2) throw SchemaError("/verify/bands", "expected [m0, m1]");
      m0 = static_cast<int>(int_from_json(b[0], "/verify/bands/0"));
      m1 = static_cast<int>(int_from_json(b[1], "/verify/bands/1"));
    }
    auto prof = scale_profile(setup, f1, f2, domain, m0, m1, samples, g.seed);
    Json rows = Json::array();
    for (std::size_t k = 0; k < prof.bands.size(); ++k)
      rows.push_back({{"m", prof.bands[k]}, {"estimate", prof.per_band[k].value}, {"stderr", prof.per_band[k].stderr_}});
    o["bands"] = rows;
    o["estimate"] = prof.total;
    o["norms"] = {prof.norm1, prof.norm2};
    o["ratio"] = prof.total_ratio;
    o["theta"] = prof.theta;
    o["theta_sum"] = prof.theta_sum;
    o["nonempty"] = prof.nonempty;
    o["verdict"] = "finite";
    return o;
  }
  if (mode == "counterexample2d") {
    if (!s.raw.contains("planar_power")) throw ValidationError("counterexample2d needs a planar_power scene");
    auto k = static_cast<unsigned>(s.raw["planar_power"].get<long long>());
    unsigned count = v.contains("deltas") ? static_cast<unsigned>(int_from_json(v["deltas"], "/verify/deltas")) : 16;
    if (count < 2 || count > 40) throw SchemaError("/verify/deltas", "delta count must lie in 2..40");
    auto kind = CounterexampleKind::LogWeighted;
    if (v.contains("kind")) {
      auto kk = string_from_json(v["kind"], "/verify/kind");
      if (kk == "indicator")
        kind = CounterexampleKind::Indicator;
      else if (kk != "log")
        throw SchemaError("/verify/kind", "kind must be log or indicator");
    }
    double cutoff = v.contains("cutoff") ? double_from_json(v["cutoff"], "/verify/cutoff") : 0.125;
    auto r = counterexample_2d(k, dyadic_deltas(count), g.samples_or(1 << 14), g.seed, kind, cutoff);
    o["samples"] = g.samples_or(1 << 14);
    o["k"] = k;
    o["cutoff"] = r.cutoff;
    o["rho"] = r.rho;
    Json rows = Json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"delta", row.delta},
                      {"estimate", row.form.value},
                      {"stderr", row.form.stderr_},
                      {"oracle", row.oracle_form},
                      {"norm_f2", row.norm2},
                      {"ratio", row.ratio}});
    o["rows"] = rows;
    o["strictly_increasing"] = r.strictly_increasing;
    o["growth"] = r.growth;
    o["verdict"] = r.strictly_increasing ? "increasing" : "not_increasing";
    return o;
  }
  if (mode == "coarea") {
    Box b = v.contains("box") ? box_from_json(v["box"], "/verify/box") : unit_box(n);
    int j = v.contains("j") ? static_cast<int>(int_from_json(v["j"], "/verify/j")) : 2;
    auto r = coarea_check(s.pair, j, b, samples, g.seed);
    o["j"] = j;
    o["direct"] = r.direct;
    o.update(estimate_json(r.fiber));
    o["rel_error"] = r.rel_error;
    o["verdict"] = r.rel_error < 0.01 ? "pass" : "fail";
    return o;
  }
  throw ValidationError("verify mode must be rwt, strong, scales, counterexample2d, coarea or measure");
}

struct GeometryFlags {
  std::string scene, spec, pi1, pi2, x0;
  std::optional<int> cap;
};

Json polymap_file(const std::string& path) {
  Json j = read_json_file(path);
  if (j.is_object() && j.contains("components")) return j["components"];
  if (!j.is_array()) throw SchemaError("", path + ": expected {\"components\": [...]} or an array of polynomials");
  return j;
}

// Scene from --scene/--spec or from a --pi1/--pi2 pair, with flag overrides.
Scene load_geometry(const GeometryFlags& f) {
  Json raw;
  std::string source;
  if (!f.scene.empty() || !f.spec.empty()) {
    source = f.scene.empty() ? f.spec : f.scene;
    raw = read_json_file(source);
    if (!raw.is_object()) throw SchemaError("", "scene must be an object");
  } else if (!f.pi1.empty()) {
    source = f.pi1;
    raw["pi1"] = polymap_file(f.pi1);
    raw["pi2"] = polymap_file(f.pi2);
  } else {
    throw ValidationError("geometry needed: pass --scene or --pi1 and --pi2");
  }
  if (f.cap) raw["cap"] = *f.cap;
  if (!f.x0.empty()) {
    Json pt = Json::array();
    std::stringstream ss(f.x0);
    std::string part;
    while (std::getline(ss, part, ',')) pt.push_back(part);
    raw["point"] = pt;
  }
  return scene_from_json(raw, source);
}

struct PolyalgFlags {
  std::string op, poly, eps, set;
  std::optional<int> levels;
};

Json polyalg_task(const PolyalgFlags& f) {
  if (f.op.empty()) throw ValidationError("polyalg needs an op or --input");
  Json t;
  t["op"] = f.op;
  if (!f.poly.empty()) {
    Json p = read_json_file(f.poly);
    bool list = p.is_array() || (p.is_object() && p.contains("components"));
    if (list) p = p.is_array() ? p : p["components"];
    if (f.op == "monomialize") t["polys"] = list ? p : Json::array({p});
    else if (f.op == "curve-monomialize") t["curve"] = p;
    else t["poly"] = p;
  }
  if (!f.eps.empty()) t["eps"] = f.eps;
  if (!f.set.empty()) {
    // Decimal literals on the command line are exact: 0.001 means 1/1000.
    Json set = parse_json_text(f.set, "--set");
    if (set.is_array())
      for (auto& iv : set)
        if (iv.is_array())
          for (auto& x : iv)
            if (x.is_number_float()) x = x.dump();
    t["intervals"] = set;
  }
  if (f.levels) t["levels"] = *f.levels;
  return t;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbolic-numeric toolkit for torsion weights, polytopes and Carnot-Caratheodory balls",
               "torsion-lab"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t samples = 0;
  app.add_option("--seed", g.seed, "seed for the scrambled low-discrepancy sequences")->capture_default_str();
  auto* samples_opt = app.add_option("--samples", samples, "sample budget")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "write the JSON report to this file");
  app.fallthrough();

  std::string beta, pattern, flavor = "union", check = "none", mode, input;
  GeometryFlags geo;
  bool with_points = false;
  auto add_scene = [&](CLI::App* sub) {
    auto* sc = sub->add_option("--scene", geo.scene, "scene file");
    auto* p1 = sub->add_option("--pi1", geo.pi1, "polynomial map file for the first projection");
    auto* p2 = sub->add_option("--pi2", geo.pi2, "polynomial map file for the second projection");
    p1->needs(p2);
    p2->needs(p1);
    sc->excludes(p1);
    sub->add_option("--cap", geo.cap, "word length budget");
    sub->add_option("--x0", geo.x0, "base point such as 0,0,0");
    return sc;
  };

  auto* fields = app.add_subcommand("fields", "fiber fields, bracket words and nilpotency step");
  add_scene(fields);
  auto* torsion = app.add_subcommand("torsion", "torsion functional J_beta, b(beta) and exponents");
  add_scene(torsion);
  torsion->add_option("--beta", beta, "multi-index such as 0,1,0");
  torsion->add_option("--pattern", pattern, "alternation pattern 12 or 21");
  auto* polytope = app.add_subcommand("polytope", "determinant table and Newton polytope");
  add_scene(polytope);
  polytope->add_option("--flavor", flavor, "union or point")->capture_default_str();
  auto* ccball = app.add_subcommand("ccball", "Carnot-Caratheodory ball sampling and checks");
  add_scene(ccball)->excludes(ccball->add_option("--spec", geo.spec, "scene file whose top level is the ball"));
  ccball->add_option("--check", check, "none, doubling or cover")->capture_default_str();
  ccball->add_flag("--points", with_points, "include sampled image points");
  auto* malcev = app.add_subcommand("malcev", "nilpotent algebra, Malcev basis and covering map");
  add_scene(malcev);
  auto* polyalg = app.add_subcommand("polyalg", "univariate polynomial algorithms");
  PolyalgFlags pf;
  polyalg->add_option("op", pf.op, "two-terms, refine, sublevel, monomialize, curve-monomialize, tangency or scale-count");
  polyalg->add_option("--input", input, "task file with an \"op\" field");
  polyalg->add_option("--poly", pf.poly, "polynomial file");
  polyalg->add_option("--eps", pf.eps, "accuracy parameter");
  polyalg->add_option("--set", pf.set, "interval union as JSON, e.g. [[0,\"1/1000\"],[\"999/1000\",1]]");
  polyalg->add_option("--N", pf.levels, "refinement levels");
  auto* verify = app.add_subcommand("verify", "numeric inequality checks");
  verify->add_option("mode", mode, "rwt, strong, scales, counterexample2d, coarea or measure")->required();
  add_scene(verify);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "{\"error\": \"usage\", \"message\": " << Json(std::string(e.what())).dump() << "}\n";
    return 2;
  }
  if (samples_opt->count()) g.samples = samples;

  auto fail = [&](const char* kind, const std::string& msg, int code) {
    Json e;
    e["error"] = kind;
    e["message"] = msg;
    err << e.dump() << "\n";
    return code;
  };
  try {
    Json result;
    if (*polyalg) {
      result = cmd_polyalg(input.empty() ? polyalg_task(pf) : read_json_file(input), g);
    } else {
      Scene s = load_geometry(geo);
      if (*fields)
        result = cmd_fields(s);
      else if (*torsion)
        result = cmd_torsion(s, beta, pattern);
      else if (*polytope)
        result = cmd_polytope(s, flavor);
      else if (*ccball)
        result = cmd_ccball(s, g, check, with_points);
      else if (*malcev)
        result = cmd_malcev(s);
      else
        result = cmd_verify(s, g, mode);
    }
    write_output(result, g, out);
    return 0;
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), 2);
  } catch (const InconclusiveError& e) {
    return fail("inconclusive", e.what(), 3);
  } catch (const BudgetExceeded& e) {
    return fail("budget", e.what(), 3);
  } catch (const Error& e) {
    // Hypotheses of the construction fail for this input.
    return fail("unsupported", e.what(), 2);
  } catch (const nlohmann::json::exception& e) {
    return fail("validation", e.what(), 2);
  }
}

}  // namespace torsionlab
