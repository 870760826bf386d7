#include "torsionlab/geometry.hpp"

#include <algorithm>

#include "torsionlab/errors.hpp"
#include "torsionlab/poly_matrix.hpp"

namespace torsionlab {

void PolyMap::validate() const {
  if (comps.empty()) throw ValidationError("map has no components");
  for (const auto& c : comps)
    if (c.nvars() != comps[0].nvars()) throw DimensionMismatch("map components live in different rings");
}

bool VectorField::is_zero() const {
  return std::all_of(comps.begin(), comps.end(), [](const RatPoly& p) { return p.is_zero(); });
}

VectorField VectorField::zero(std::size_t n) { return VectorField{std::vector<RatPoly>(n, RatPoly(n))}; }

void VectorField::validate() const {
  for (const auto& c : comps)
    if (c.nvars() != comps.size()) throw DimensionMismatch("vector field must have one component per variable");
}

VectorField VectorField::operator+(const VectorField& o) const {
  if (o.dim() != dim()) throw DimensionMismatch("field dimension mismatch");
  VectorField r = *this;
  for (std::size_t i = 0; i < dim(); ++i) r.comps[i] += o.comps[i];
  return r;
}

VectorField VectorField::operator-(const VectorField& o) const { return *this + o * Rat(-1); }

VectorField VectorField::operator*(const Rat& s) const {
  VectorField r = *this;
  for (auto& c : r.comps) c *= s;
  return r;
}

VectorField hodge_star_field(const PolyMap& pi) {
  pi.validate();
  std::size_t n = pi.nvars();
  if (pi.size() + 1 != n)
    throw DimensionMismatch("fiber field needs a map R^n -> R^(n-1); got " + std::to_string(n) + " variables and " +
                            std::to_string(pi.size()) + " components");
  std::vector<std::size_t> vars(n);
  for (std::size_t i = 0; i < n; ++i) vars[i] = i;
  PolyMatrix jac = jacobian(pi.comps, vars);
  VectorField x;
  for (std::size_t i = 0; i < n; ++i) {
    RatPoly minor = determinant(jac.without_column(i));
    x.comps.push_back(i % 2 == 0 ? minor : -minor);
  }
  return x;
}

RatPoly apply(const VectorField& x, const RatPoly& f) {
  if (f.nvars() != x.dim()) throw DimensionMismatch("field and function dimension mismatch");
  RatPoly out(f.nvars());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (x.comps[i].is_zero()) continue;
    RatPoly d = f.partial(i);
    if (!d.is_zero()) out += x.comps[i] * d;
  }
  return out;
}

VectorField bracket(const VectorField& x, const VectorField& y) {
  if (x.dim() != y.dim()) throw DimensionMismatch("bracket of fields on different spaces");
  VectorField z;
  for (std::size_t i = 0; i < x.dim(); ++i) z.comps.push_back(apply(x, y.comps[i]) - apply(y, x.comps[i]));
  return z;
}

RatPoly divergence(const VectorField& x) {
  RatPoly d(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) d += x.comps[i].partial(i);
  return d;
}

std::vector<RatPoly> pushforward(const PolyMap& pi, const VectorField& x) {
  std::vector<RatPoly> out;
  for (const auto& c : pi.comps) out.push_back(apply(x, c));
  return out;
}

std::array<int, 2> bidegree(const Word& w) {
  std::array<int, 2> d{0, 0};
  for (int l : w) ++d[l == 1 ? 0 : 1];
  return d;
}

std::string word_label(const Word& w) {
  std::string s;
  for (int l : w) s += static_cast<char>('0' + l);
  return s;
}

Word parse_word(const std::string& label) {
  Word w;
  for (char c : label) {
    if (c != '1' && c != '2') throw ValidationError("word letters must be 1 or 2: '" + label + "'");
    w.push_back(c - '0');
  }
  if (w.empty()) throw ValidationError("empty word");
  return w;
}

bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

WordTable::WordTable(VectorField x1, VectorField x2, int cap) : x1_(std::move(x1)), x2_(std::move(x2)), cap_(cap) {
  x1_.validate();
  x2_.validate();
  if (x1_.dim() != x2_.dim()) throw DimensionMismatch("generators act on different spaces");
  if (cap < 1) throw ValidationError("word length cap must be at least 1");
  std::vector<std::size_t> previous;
  for (int i = 1; i <= 2; ++i) {
    const VectorField& f = i == 1 ? x1_ : x2_;
    if (f.is_zero()) continue;
    index_[{i}] = entries_.size();
    previous.push_back(entries_.size());
    entries_.push_back({{i}, f, bidegree({i})});
  }
  for (int len = 2; len <= cap && !previous.empty(); ++len) {
    std::vector<std::size_t> current;
    for (int i = 1; i <= 2; ++i) {
      for (std::size_t idx : previous) {
        Word w{i};
        w.insert(w.end(), entries_[idx].word.begin(), entries_[idx].word.end());
        VectorField f = bracket(generator(i), entries_[idx].field);
        if (f.is_zero()) continue;
        index_[w] = entries_.size();
        current.push_back(entries_.size());
        entries_.push_back({w, std::move(f), bidegree(w)});
      }
    }
    previous = std::move(current);
  }
}

VectorField WordTable::field(const Word& w) const {
  for (int l : w)
    if (l != 1 && l != 2) throw ValidationError("word letters must be 1 or 2");
  if (static_cast<int>(w.size()) > cap_)
    throw BudgetExceeded("word " + word_label(w) + " is longer than the table cap " + std::to_string(cap_));
  auto it = index_.find(w);
  if (it == index_.end()) return VectorField::zero(dim());
  return entries_[it->second].field;
}

int WordTable::longest_nonzero() const {
  int m = 0;
  for (const auto& e : entries_) m = std::max(m, static_cast<int>(e.word.size()));
  return m;
}

WordTable build_word_table(const VectorField& x1, const VectorField& x2, int cap) { return WordTable(x1, x2, cap); }

NilpotencyResult nilpotency_step(const WordTable& table) {
  int s = table.longest_nonzero();
  if (s < table.cap()) return {true, s};
  return {false, 0};
}

FlowMap lie_series_flow(const VectorField& x, unsigned max_terms) {
  x.validate();
  std::size_t n = x.dim();
  FlowMap flow;
  flow.field = x;
  std::vector<std::size_t> lift(n);
  for (std::size_t i = 0; i < n; ++i) lift[i] = i;
  RatPoly t = RatPoly::variable(n + 1, n);
  for (std::size_t i = 0; i < n; ++i) {
    RatPoly g = RatPoly::variable(n, i);
    RatPoly series(n + 1);
    RatPoly tpow = RatPoly::constant(n + 1, 1);
    unsigned k = 0;
    while (!g.is_zero()) {
      if (k > max_terms)
        throw NonTerminatingSeries("Lie series of component " + std::to_string(i + 1) + " did not terminate within " +
                                   std::to_string(max_terms) + " terms");
      series += g.embed(n + 1, lift) * tpow * Rat(1 / factorial(k));
      flow.terms = std::max(flow.terms, k);
      g = apply(x, g);
      tpow *= t;
      ++k;
    }
    flow.map.push_back(std::move(series));
  }
  return flow;
}

std::vector<RatPoly> apply_flow(const FlowMap& flow, const std::vector<RatPoly>& point, const RatPoly& time) {
  std::vector<RatPoly> args = point;
  args.push_back(time);
  std::vector<RatPoly> out;
  for (const auto& c : flow.map) out.push_back(c.compose(args));
  return out;
}

}  // namespace torsionlab
