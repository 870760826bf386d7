#include "torsionlab/nilpotent.hpp"

#include <functional>
#include <map>
#include <mutex>

#include "torsionlab/errors.hpp"
#include "torsionlab/poly_matrix.hpp"

namespace torsionlab {

RatVec AbstractNilpotent::bracket(const RatVec& a, const RatVec& b) const {
  RatVec out(dim, Rat(0));
  for (std::size_t i = 0; i < dim; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      if (b[j] == 0 || i == j) continue;
      Rat f = a[i] * b[j];
      for (std::size_t k = 0; k < dim; ++k)
        if (c(i, j, k) != 0) out[k] += f * c(i, j, k);
    }
  }
  return out;
}

LieElement AbstractNilpotent::bracket(const LieElement& a, const LieElement& b) const {
  std::size_t m = a.empty() ? 0 : a[0].nvars();
  LieElement out(dim, RatPoly(m));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      bool first = !a[i].is_zero() && !b[j].is_zero();
      bool second = !a[j].is_zero() && !b[i].is_zero();
      if (!first && !second) continue;
      RatPoly f(m);
      if (first) f += a[i] * b[j];
      if (second) f -= a[j] * b[i];
      if (f.is_zero()) continue;
      for (std::size_t k = 0; k < dim; ++k)
        if (c(i, j, k) != 0) out[k] += f * c(i, j, k);
    }
  }
  return out;
}

VectorField AbstractNilpotent::realize(const RatVec& v) const {
  if (basis_fields.empty()) throw ValidationError("algebra has no realization");
  VectorField f = VectorField::zero(basis_fields[0].dim());
  for (std::size_t k = 0; k < dim; ++k)
    if (v[k] != 0) f = f + basis_fields[k] * v[k];
  return f;
}

AbstractNilpotent AbstractNilpotent::opposite() const {
  AbstractNilpotent o = *this;
  for (auto& x : o.constants) x = -x;
  return o;
}

int AbstractNilpotent::nilpotency_class() const {
  // g^1 = g, g^{k+1} = [g, g^k].
  std::vector<RatVec> current;
  for (std::size_t i = 0; i < dim; ++i) {
    RatVec e(dim, Rat(0));
    e[i] = 1;
    current.push_back(e);
  }
  int cls = 0;
  while (!current.empty()) {
    ++cls;
    SubspaceBasis next(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      RatVec e(dim, Rat(0));
      e[i] = 1;
      for (const auto& v : current) next.add(bracket(e, v));
    }
    current = next.vectors();
    if (cls > static_cast<int>(dim) + 1) throw ValidationError("algebra is not nilpotent");
  }
  return cls;
}

bool AbstractNilpotent::satisfies_jacobi() const {
  auto e = [&](std::size_t i) {
    RatVec v(dim, Rat(0));
    v[i] = 1;
    return v;
  };
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t k = 0; k < dim; ++k) {
        RatVec a = bracket(e(i), bracket(e(j), e(k)));
        RatVec b = bracket(e(j), bracket(e(k), e(i)));
        RatVec c3 = bracket(e(k), bracket(e(i), e(j)));
        for (std::size_t m = 0; m < dim; ++m)
          if (a[m] + b[m] + c3[m] != 0) return false;
      }
  return true;
}

namespace {

// Coordinates of fields as vectors indexed by (component, monomial).
class FieldFlattener {
 public:
  void observe(const VectorField& f) {
    for (std::size_t i = 0; i < f.dim(); ++i)
      for (const auto& [e, c] : f.comps[i].terms()) index_.try_emplace({i, e}, index_.size());
  }
  std::size_t size() const { return index_.size(); }
  std::optional<RatVec> flatten(const VectorField& f) const {
    RatVec v(index_.size(), Rat(0));
    for (std::size_t i = 0; i < f.dim(); ++i)
      for (const auto& [e, c] : f.comps[i].terms()) {
        auto it = index_.find({i, e});
        if (it == index_.end()) return std::nullopt;
        v[it->second] = c;
      }
    return v;
  }

 private:
  std::map<std::pair<std::size_t, Exponent>, std::size_t> index_;
};

}  // namespace

AbstractNilpotent abstract_algebra(const WordTable& table) {
  NilpotencyResult nil = nilpotency_step(table);
  if (!nil.nilpotent) throw ValidationError("fields are not nilpotent within the word cap");
  FieldFlattener flat;
  for (const auto& e : table.entries()) flat.observe(e.field);
  AbstractNilpotent alg;
  alg.step = nil.step;
  SubspaceBasis span(flat.size());
  for (const auto& e : table.entries()) {
    if (span.add(*flat.flatten(e.field))) {
      alg.labels.push_back(word_label(e.word));
      alg.basis_fields.push_back(e.field);
    }
  }
  alg.dim = alg.basis_fields.size();
  alg.constants.assign(alg.dim * alg.dim * alg.dim, Rat(0));
  for (std::size_t i = 0; i < alg.dim; ++i) {
    for (std::size_t j = i + 1; j < alg.dim; ++j) {
      VectorField b = bracket(alg.basis_fields[i], alg.basis_fields[j]);
      auto flatv = flat.flatten(b);
      std::optional<RatVec> coords = flatv ? span.coordinates(*flatv) : std::nullopt;
      if (!coords)
        throw DependentBracket("bracket of " + alg.labels[i] + " and " + alg.labels[j] + " leaves the span");
      for (std::size_t k = 0; k < alg.dim; ++k) {
        alg.constants[(i * alg.dim + j) * alg.dim + k] = (*coords)[k];
        alg.constants[(j * alg.dim + i) * alg.dim + k] = -(*coords)[k];
      }
    }
  }
  return alg;
}

namespace {

// Dynkin's series grouped by letter word: 0 stands for a, 1 for b. Each word
// w contributes coefficient * [w_1, [w_2, ... [w_{m-1}, w_m]]].
const std::map<std::vector<int>, Rat>& dynkin_terms(int step) {
  static std::mutex mu;
  static std::map<int, std::map<std::vector<int>, Rat>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(step);
  if (it != cache.end()) return it->second;
  std::map<std::vector<int>, Rat> terms;
  std::vector<std::pair<int, int>> seq;
  std::function<void(int)> rec = [&](int total) {
    if (!seq.empty()) {
      std::vector<int> word;
      Rat denom = total;
      for (auto [r, s] : seq) {
        word.insert(word.end(), static_cast<std::size_t>(r), 0);
        word.insert(word.end(), static_cast<std::size_t>(s), 1);
        denom *= factorial(static_cast<unsigned>(r)) * factorial(static_cast<unsigned>(s));
      }
      std::size_t m = word.size();
      bool vanishes = m >= 2 && word[m - 1] == word[m - 2];
      if (!vanishes) {
        int k = static_cast<int>(seq.size());
        Rat coef = make_rat(k % 2 == 1 ? 1 : -1, k) / denom;
        terms[word] += coef;
      }
    }
    for (int r = 0; total + r <= step; ++r)
      for (int s = 0; total + r + s <= step; ++s) {
        if (r + s == 0) continue;
        seq.push_back({r, s});
        rec(total + r + s);
        seq.pop_back();
      }
  };
  rec(0);
  for (auto t = terms.begin(); t != terms.end();)
    t = t->second == 0 ? terms.erase(t) : std::next(t);
  return cache.emplace(step, std::move(terms)).first->second;
}

template <class Elem, class Bracket, class Add>
Elem bch_generic(const Elem& a, const Elem& b, int step, Elem zero, Bracket br, Add add_scaled) {
  Elem out = zero;
  // Memo of right-nested brackets by suffix.
  std::map<std::vector<int>, Elem> memo;
  std::function<const Elem&(const std::vector<int>&)> nested = [&](const std::vector<int>& w) -> const Elem& {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    Elem v;
    if (w.size() == 1) {
      v = w[0] == 0 ? a : b;
    } else {
      std::vector<int> tail(w.begin() + 1, w.end());
      v = br(w[0] == 0 ? a : b, nested(tail));
    }
    return memo.emplace(w, std::move(v)).first->second;
  };
  for (const auto& [word, coef] : dynkin_terms(step)) add_scaled(out, nested(word), coef);
  return out;
}

}  // namespace

RatVec bch(const AbstractNilpotent& alg, const RatVec& a, const RatVec& b, int step) {
  return bch_generic<RatVec>(
      a, b, step, RatVec(alg.dim, Rat(0)), [&](const RatVec& x, const RatVec& y) { return alg.bracket(x, y); },
      [](RatVec& acc, const RatVec& v, const Rat& c) {
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += c * v[k];
      });
}

LieElement bch(const AbstractNilpotent& alg, const LieElement& a, const LieElement& b, int step) {
  std::size_t m = a.empty() ? 0 : a[0].nvars();
  return bch_generic<LieElement>(
      a, b, step, LieElement(alg.dim, RatPoly(m)),
      [&](const LieElement& x, const LieElement& y) { return alg.bracket(x, y); },
      [](LieElement& acc, const LieElement& v, const Rat& c) {
        for (std::size_t k = 0; k < acc.size(); ++k)
          if (!v[k].is_zero()) acc[k] += v[k] * c;
      });
}

namespace {

RatVec unit(std::size_t dim, std::size_t i) {
  RatVec v(dim, Rat(0));
  v[i] = 1;
  return v;
}

bool in_span(const SubspaceBasis& h, const RatVec& v) { return h.contains(v); }

// Some v in the normalizer of h within t, not in h.
RatVec normalizer_step(const AbstractNilpotent& alg, const SubspaceBasis& h, const std::vector<RatVec>& t_basis) {
  for (auto it = t_basis.rbegin(); it != t_basis.rend(); ++it) {
    if (in_span(h, *it)) continue;
    bool normalizes = true;
    for (const auto& hv : h.vectors())
      if (!in_span(h, alg.bracket(*it, hv))) {
        normalizes = false;
        break;
      }
    if (normalizes) return *it;
  }
  // General case: solve sum_i a_i [t_i, h_j] - sum_k mu_jk h_k = 0.
  std::size_t nt = t_basis.size(), nh = h.size(), d = alg.dim;
  std::size_t unknowns = nt + nh * nh;
  RatMatrix m(nh * d, unknowns);
  for (std::size_t j = 0; j < nh; ++j) {
    for (std::size_t i = 0; i < nt; ++i) {
      RatVec br = alg.bracket(t_basis[i], h.vectors()[j]);
      for (std::size_t r = 0; r < d; ++r) m(j * d + r, i) = br[r];
    }
    for (std::size_t k = 0; k < nh; ++k)
      for (std::size_t r = 0; r < d; ++r) m(j * d + r, nt + j * nh + k) = -h.vectors()[k][r];
  }
  for (const auto& sol : m.nullspace()) {
    RatVec v(d, Rat(0));
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t r = 0; r < d; ++r) v[r] += sol[i] * t_basis[i][r];
    if (!in_span(h, v)) return v;
  }
  throw ValidationError("normalizer chain stalled; algebra is not nilpotent");
}

}  // namespace

MalcevBasis weak_malcev(const AbstractNilpotent& alg, const std::vector<RatVec>& z_spanning) {
  const std::size_t d = alg.dim;
  SubspaceBasis z(d);
  for (const auto& v : z_spanning) {
    if (v.size() != d) throw DimensionMismatch("subalgebra vector has wrong length");
    z.add(v);
  }
  for (const auto& a : z.vectors())
    for (const auto& b : z.vectors())
      if (!z.contains(alg.bracket(a, b))) throw NotASubalgebra("given subspace is not closed under the bracket");
  std::vector<RatVec> added;
  SubspaceBasis h(d);
  while (h.size() < z.size()) {
    RatVec v = normalizer_step(alg, h, z.vectors());
    h.add(v);
    added.push_back(v);
  }
  std::vector<RatVec> all;
  for (std::size_t i = 0; i < d; ++i) all.push_back(unit(d, i));
  while (h.size() < d) {
    RatVec v = normalizer_step(alg, h, all);
    h.add(v);
    added.push_back(v);
  }
  MalcevBasis mb;
  mb.vectors.assign(added.rbegin(), added.rend());
  mb.n = d - z.size();
  // Structure constants in the new basis.
  AbstractNilpotent& na = mb.algebra;
  na.dim = d;
  na.step = alg.step;
  RatMatrix p = RatMatrix::from_columns(mb.vectors, d);
  for (std::size_t i = 0; i < d; ++i) {
    na.labels.push_back("E" + std::to_string(i + 1));
    if (!alg.basis_fields.empty()) na.basis_fields.push_back(alg.realize(mb.vectors[i]));
  }
  na.constants.assign(d * d * d, Rat(0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      auto coords = p.solve(alg.bracket(mb.vectors[i], mb.vectors[j]));
      for (std::size_t k = 0; k < d; ++k) na.constants[(i * d + j) * d + k] = (*coords)[k];
    }
  return mb;
}

LieElement second_kind_coordinates(const AbstractNilpotent& alg, LieElement z) {
  const std::size_t d = alg.dim;
  std::size_t m = z.empty() ? 0 : z[0].nvars();
  LieElement coords;
  for (std::size_t k = 0; k < d; ++k) {
    // z lies in span(e_k..e_N) and that span mod span(e_{k+1}..e_N) is one
    // dimensional, so the e_k coordinate of z is the exponent.
    RatPoly xk = z[k];
    coords.push_back(xk);
    LieElement step(d, RatPoly(m));
    step[k] = -xk;
    z = bch(alg, step, z, alg.step);
    if (!z[k].is_zero()) throw ValidationError("basis is not a Malcev basis");
  }
  for (const auto& v : z)
    if (!v.is_zero()) throw ValidationError("second-kind coordinates did not exhaust the element");
  return coords;
}

GroupLaw group_law(const MalcevBasis& basis) {
  const AbstractNilpotent& alg = basis.algebra;
  const std::size_t d = alg.dim, m = 2 * d;
  auto x1 = [&](std::size_t i) { return RatPoly::variable(m, i); };
  auto x2 = [&](std::size_t i) { return RatPoly::variable(m, d + i); };
  LieElement psi(d, RatPoly(m));
  for (std::size_t i = 0; i < d; ++i) {
    LieElement factor(d, RatPoly(m));
    factor[i] = x1(i);
    psi = i == 0 ? factor : bch(alg, psi, factor, alg.step);
  }
  LieElement lin(d, RatPoly(m));
  for (std::size_t i = 0; i < d; ++i) lin[i] = x2(i);
  GroupLaw law;
  law.N = d;
  law.q = second_kind_coordinates(alg, bch(alg, lin, psi, alg.step));
  law.r = second_kind_coordinates(alg, bch(alg, psi, lin, alg.step));
  return law;
}

CoveringMap covering_map(const WordTable& table, const std::vector<Rat>& x0) {
  const std::size_t n = table.dim();
  if (x0.size() != n) throw DimensionMismatch("base point has wrong dimension");
  CoveringMap cov;
  cov.x0 = x0;
  cov.algebra = abstract_algebra(table).opposite();
  const std::size_t d = cov.algebra.dim;
  RatMatrix eval(n, d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < n; ++i) eval(i, k) = cov.algebra.basis_fields[k].comps[i].eval(x0);
  cov.isotropy = eval.nullspace();
  if (d - cov.isotropy.size() != n)
    throw SingularAtOrigin("fields span a " + std::to_string(d - cov.isotropy.size()) +
                           "-dimensional space at the base point, need " + std::to_string(n));
  cov.basis = weak_malcev(cov.algebra, cov.isotropy);
  cov.law = group_law(cov.basis);
  std::vector<RatPoly> point;
  for (std::size_t i = 0; i < n; ++i) point.push_back(RatPoly::constant(n, x0[i]));
  for (std::size_t k = n; k-- > 0;) {
    FlowMap f = lie_series_flow(cov.basis.algebra.basis_fields[k]);
    point = apply_flow(f, point, RatPoly::variable(n, k));
  }
  cov.phi = point;
  std::vector<std::size_t> vars(n);
  for (std::size_t i = 0; i < n; ++i) vars[i] = i;
  std::vector<Rat> origin(n, Rat(0));
  if (determinant(jacobian(cov.phi, vars)).eval(origin) == 0)
    throw SingularAtOrigin("orbit map is singular at the origin");
  return cov;
}

}  // namespace torsionlab
