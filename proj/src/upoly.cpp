#include "torsionlab/upoly.hpp"

#include <algorithm>

#include "torsionlab/errors.hpp"

namespace torsionlab {

UPoly::UPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

void UPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

UPoly UPoly::from_poly(const RatPoly& p) {
  if (p.nvars() != 1) throw DimensionMismatch("expected a univariate polynomial");
  std::vector<Rat> c(p.is_zero() ? 0 : p.degree_in(0) + 1, Rat(0));
  for (const auto& [e, v] : p.terms()) c[e[0]] = v;
  return UPoly(std::move(c));
}

UPoly UPoly::monomial(unsigned k, const Rat& c) {
  std::vector<Rat> v(k + 1, Rat(0));
  v[k] = c;
  return UPoly(std::move(v));
}

Rat UPoly::eval(const Rat& t) const {
  Rat acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double UPoly::eval(double t) const {
  double acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + it->get_d();
  return acc;
}

UPoly UPoly::derivative() const {
  if (c_.size() <= 1) return UPoly();
  std::vector<Rat> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<unsigned long>(k);
  return UPoly(std::move(d));
}

std::vector<Rat> UPoly::taylor(const Rat& b) const {
  // Repeated synthetic division by (t - b).
  std::vector<Rat> a = c_;
  std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = n - 1; j > k; --j) a[j - 1] += b * a[j];
  return a;
}

RatPoly UPoly::to_poly() const {
  RatPoly p(1);
  for (std::size_t k = 0; k < c_.size(); ++k) p.add_term({static_cast<unsigned>(k)}, c_[k]);
  return p;
}

UPoly UPoly::operator+(const UPoly& o) const {
  std::vector<Rat> r(std::max(c_.size(), o.c_.size()), Rat(0));
  for (std::size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return UPoly(std::move(r));
}

UPoly UPoly::operator-(const UPoly& o) const { return *this + o * Rat(-1); }

UPoly UPoly::operator*(const UPoly& o) const {
  if (is_zero() || o.is_zero()) return UPoly();
  std::vector<Rat> r(c_.size() + o.c_.size() - 1, Rat(0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return UPoly(std::move(r));
}

UPoly UPoly::operator*(const Rat& s) const {
  std::vector<Rat> r = c_;
  for (auto& x : r) x *= s;
  return UPoly(std::move(r));
}

std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
  if (b.is_zero()) throw ValidationError("division by the zero polynomial");
  std::vector<Rat> r = a.c_;
  int db = b.degree();
  if (a.degree() < db) return {UPoly(), a};
  std::vector<Rat> q(static_cast<std::size_t>(a.degree() - db + 1), Rat(0));
  Rat lb = b.leading();
  for (int k = a.degree(); k >= db; --k) {
    Rat f = r[static_cast<std::size_t>(k)] / lb;
    q[static_cast<std::size_t>(k - db)] = f;
    if (f == 0) continue;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= f * b.c_[static_cast<std::size_t>(j)];
  }
  return {UPoly(std::move(q)), UPoly(std::move(r))};
}

UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a * Rat(1 / a.leading());
}

UPoly squarefree_part(const UPoly& p) {
  if (p.degree() <= 0) return p;
  UPoly g = gcd(p, p.derivative());
  UPoly q = divmod(p, g).first;
  return q * Rat(1 / q.leading());
}

std::vector<UPoly> sturm_chain(const UPoly& p) {
  std::vector<UPoly> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    UPoly r = divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(r * Rat(-1));
  }
  if (chain.back().is_zero()) chain.pop_back();
  return chain;
}

static int sign_changes(const std::vector<UPoly>& chain, const Rat& x) {
  int changes = 0, last = 0;
  for (const auto& p : chain) {
    int s = sgn(p.eval(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int sturm_count(const std::vector<UPoly>& chain, const Rat& a, const Rat& b) {
  return sign_changes(chain, a) - sign_changes(chain, b);
}

// Cauchy bound on the absolute value of real roots.
static Rat root_bound(const UPoly& p) {
  Rat m = 0;
  Rat lead = abs(p.leading());
  for (int k = 0; k < p.degree(); ++k) m = std::max(m, Rat(abs(p.coeff(static_cast<unsigned>(k))) / lead));
  return m + 1;
}

std::vector<RootInterval> isolate_real_roots(const UPoly& p) {
  std::vector<RootInterval> out;
  if (p.degree() <= 0) return out;
  UPoly q = squarefree_part(p);
  auto chain = sturm_chain(q);
  Rat bound = root_bound(q);
  struct Job {
    Rat lo, hi;
  };
  // Roots in (lo, hi]; the bound makes -bound itself a non-root.
  std::vector<Job> stack{{-bound, bound}};
  while (!stack.empty()) {
    Job j = stack.back();
    stack.pop_back();
    int n = sturm_count(chain, j.lo, j.hi);
    if (n == 0) continue;
    if (q.eval(j.hi) == 0 && n == 1) {
      out.push_back({j.hi, j.hi});
      continue;
    }
    if (n == 1) {
      out.push_back({j.lo, j.hi});
      continue;
    }
    Rat mid = (j.lo + j.hi) / 2;
    stack.push_back({j.lo, mid});
    stack.push_back({mid, j.hi});
  }
  std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) { return a.hi < b.hi; });
  // Turn (lo, hi] intervals into closed ones that exclude neighbouring roots.
  for (auto& iv : out) {
    if (iv.lo == iv.hi) continue;
    if (q.eval(iv.hi) == 0) {
      iv.lo = iv.hi;
      continue;
    }
    while (q.eval(iv.lo) == 0) {
      Rat mid = (iv.lo + iv.hi) / 2;
      if (sturm_count(chain, iv.lo, mid) == 0)
        iv.lo = mid;
      else
        iv.hi = mid;
    }
  }
  return out;
}

RootInterval refine_root(const UPoly& q, RootInterval iv, const Rat& width) {
  if (iv.lo == iv.hi) return iv;
  int slo = sgn(q.eval(iv.lo));
  if (slo == 0) return {iv.lo, iv.lo};
  while (iv.hi - iv.lo > width) {
    Rat mid = (iv.lo + iv.hi) / 2;
    int sm = sgn(q.eval(mid));
    if (sm == 0) return {mid, mid};
    if (sm == slo)
      iv.lo = mid;
    else
      iv.hi = mid;
  }
  return iv;
}

std::pair<Rat, Rat> interval_eval(const UPoly& p, const Rat& lo, const Rat& hi) {
  Rat a = 0, b = 0;
  const auto& c = p.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    Rat x1 = a * lo, x2 = a * hi, x3 = b * lo, x4 = b * hi;
    a = std::min({x1, x2, x3, x4}) + *it;
    b = std::max({x1, x2, x3, x4}) + *it;
  }
  return {a, b};
}

}  // namespace torsionlab
