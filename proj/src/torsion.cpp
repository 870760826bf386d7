#include "torsionlab/torsion.hpp"

#include "torsionlab/errors.hpp"
#include "torsionlab/poly_matrix.hpp"

namespace torsionlab {

const FlowMap& FlowCache::flow(const Word& w) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = flows_.find(w);
    if (it != flows_.end()) return *it->second;
  }
  auto f = std::make_unique<FlowMap>(lie_series_flow(table_.field(w)));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = flows_.try_emplace(w, std::move(f));
  return *it->second;
}

IterFlowMap iter_flow(FlowCache& cache, const std::vector<Word>& words) {
  const std::size_t n = cache.table().dim();
  if (words.size() != n)
    throw DimensionMismatch("flow composition needs " + std::to_string(n) + " words, got " +
                            std::to_string(words.size()));
  IterFlowMap out;
  out.words = words;
  out.n = n;
  for (std::size_t i = 0; i < n; ++i) out.map.push_back(RatPoly::variable(2 * n, i));
  for (std::size_t i = 0; i < n; ++i) {
    const FlowMap& flow = cache.flow(words[i]);
    out.map = apply_flow(flow, out.map, RatPoly::variable(2 * n, n + i));
  }
  std::vector<std::size_t> tvars;
  for (std::size_t i = 0; i < n; ++i) tvars.push_back(n + i);
  out.jac_det = determinant(jacobian(out.map, tvars));
  return out;
}

IterFlowMap iter_flow(const WordTable& table, const std::vector<Word>& words) {
  FlowCache cache(table);
  return iter_flow(cache, words);
}

std::vector<Word> pattern_words(std::size_t n, Pattern pattern) {
  std::vector<Word> w;
  int first = pattern == Pattern::Alternating12 ? 1 : 2;
  for (std::size_t i = 0; i < n; ++i) w.push_back({i % 2 == 0 ? first : 3 - first});
  return w;
}

RatPoly jacobian_derivative(const IterFlowMap& psi, const std::vector<unsigned>& beta) {
  if (beta.size() != psi.n) throw DimensionMismatch("multi-index length must equal the dimension");
  Exponent e(2 * psi.n, 0);
  Rat scale = 1;
  for (std::size_t i = 0; i < psi.n; ++i) {
    e[psi.n + i] = beta[i];
    scale *= factorial(beta[i]);
  }
  std::vector<std::size_t> tvars;
  std::vector<Rat> zeros(psi.n, Rat(0));
  RatPoly out(psi.n);
  // Collect the t^beta coefficient as a polynomial in x.
  for (const auto& [exp, c] : psi.jac_det.terms()) {
    bool match = true;
    for (std::size_t i = 0; i < psi.n && match; ++i) match = exp[psi.n + i] == beta[i];
    if (!match) continue;
    out.add_term(Exponent(exp.begin(), exp.begin() + static_cast<std::ptrdiff_t>(psi.n)), c * scale);
  }
  return out;
}

std::array<int, 2> torsion_degree(const std::vector<unsigned>& beta, Pattern pattern) {
  std::array<int, 2> b{0, 0};
  for (std::size_t j = 0; j < beta.size(); ++j) {
    bool first_field = (j % 2 == 0) == (pattern == Pattern::Alternating12);
    b[first_field ? 0 : 1] += 1 + static_cast<int>(beta[j]);
  }
  return b;
}

std::array<Rat, 2> exponent_pair(const std::array<int, 2>& b) {
  if (b[0] <= 0 || b[1] <= 0) throw ValidationError("exponent pair needs both degrees positive");
  int s = b[0] + b[1] - 1;
  return {make_rat(s, b[0]), make_rat(s, b[1])};
}

TorsionProfile torsion_profile(FlowCache& cache, const std::vector<unsigned>& beta, Pattern pattern) {
  IterFlowMap psi = iter_flow(cache, pattern_words(cache.table().dim(), pattern));
  TorsionProfile prof;
  prof.beta = beta;
  prof.pattern = pattern;
  prof.b = torsion_degree(beta, pattern);
  prof.p = exponent_pair(prof.b);
  prof.J = jacobian_derivative(psi, beta);
  prof.rho_exponent = make_rat(1, prof.b[0] + prof.b[1] - 1);
  return prof;
}

TorsionProfile torsion_profile(const WordTable& table, const std::vector<unsigned>& beta, Pattern pattern) {
  FlowCache cache(table);
  return torsion_profile(cache, beta, pattern);
}

Rat constant_jacobian(const PolyMap& f) {
  f.validate();
  if (f.size() != f.nvars()) throw DimensionMismatch("Jacobian determinant of a non-square map");
  std::vector<std::size_t> vars(f.nvars());
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i] = i;
  RatPoly d = determinant(jacobian(f.comps, vars));
  if (!d.is_constant() || d.is_zero()) throw NonConstantJacobian("map Jacobian is not a nonzero constant");
  return d.constant_term();
}

static PolyMap compose_maps(const PolyMap& outer, const PolyMap& inner) {
  PolyMap out;
  for (const auto& c : outer.comps) out.comps.push_back(c.compose(inner.comps));
  return out;
}

TorsionProfile weight_transform(const TorsionProfile& profile, const PolyMap& f, const PolyMap& g1, const PolyMap& g2,
                                const PolyMap* f_inverse) {
  const std::size_t n = profile.J.nvars();
  if (f.nvars() != n || f.size() != n) throw DimensionMismatch("F must map R^n to itself");
  if (g1.size() != n - 1 || g1.nvars() != n - 1 || g2.size() != n - 1 || g2.nvars() != n - 1)
    throw DimensionMismatch("G1 and G2 must map R^(n-1) to itself");
  Rat df = constant_jacobian(f), dg1 = constant_jacobian(g1), dg2 = constant_jacobian(g2);
  if (f_inverse) {
    PolyMap id = compose_maps(f, *f_inverse);
    for (std::size_t i = 0; i < n; ++i)
      if (!(id.comps[i] == RatPoly::variable(n, i))) throw ValidationError("supplied inverse does not invert F");
  }
  TorsionProfile out = profile;
  int s = profile.b[0] + profile.b[1] - 1;
  Rat factor = pow(df, s) * pow(dg1, profile.b[0]) * pow(dg2, profile.b[1]);
  out.J = profile.J.compose(f.comps) * factor;
  return out;
}

std::array<PolyMap, 2> transform_pair(const PolyMap& pi1, const PolyMap& pi2, const PolyMap& f, const PolyMap& g1,
                                      const PolyMap& g2) {
  return {compose_maps(g1, compose_maps(pi1, f)), compose_maps(g2, compose_maps(pi2, f))};
}

}  // namespace torsionlab
