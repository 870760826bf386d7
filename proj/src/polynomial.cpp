#include "torsionlab/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "torsionlab/errors.hpp"

namespace torsionlab {

unsigned total_degree(const Exponent& e) {
  unsigned d = 0;
  for (unsigned v : e) d += v;
  return d;
}

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  unsigned da = torsionlab::total_degree(a), db = torsionlab::total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

RatPoly RatPoly::constant(std::size_t nvars, const Rat& c) {
  RatPoly p(nvars);
  p.add_term(Exponent(nvars, 0), c);
  return p;
}

RatPoly RatPoly::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw DimensionMismatch("variable index out of range");
  Exponent e(nvars, 0);
  e[index] = 1;
  return monomial(e, 1);
}

RatPoly RatPoly::monomial(const Exponent& e, const Rat& c) {
  RatPoly p(e.size());
  p.add_term(e, c);
  return p;
}

bool RatPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && torsionlab::total_degree(terms_.begin()->first) == 0);
}

Rat RatPoly::constant_term() const { return coefficient(Exponent(nvars_, 0)); }

Rat RatPoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rat(0) : it->second;
}

int RatPoly::total_degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(torsionlab::total_degree(terms_.rbegin()->first));
}

unsigned RatPoly::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

void RatPoly::add_term(const Exponent& e, const Rat& c) {
  if (e.size() != nvars_) throw DimensionMismatch("exponent length does not match variable count");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

static void check_same(const RatPoly& a, const RatPoly& b) {
  if (a.nvars() != b.nvars())
    throw DimensionMismatch("polynomials live in rings with " + std::to_string(a.nvars()) + " and " +
                            std::to_string(b.nvars()) + " variables");
}

RatPoly& RatPoly::operator+=(const RatPoly& o) {
  check_same(*this, o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

RatPoly& RatPoly::operator-=(const RatPoly& o) {
  check_same(*this, o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

RatPoly operator*(const RatPoly& a, const RatPoly& b) {
  check_same(a, b);
  RatPoly out(a.nvars_);
  Exponent e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

RatPoly& RatPoly::operator*=(const RatPoly& o) {
  *this = *this * o;
  return *this;
}

RatPoly& RatPoly::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

RatPoly RatPoly::operator-() const {
  RatPoly out = *this;
  for (auto& [e, v] : out.terms_) v = -v;
  return out;
}

RatPoly RatPoly::pow(unsigned k) const {
  RatPoly result = constant(nvars_, 1);
  RatPoly base = *this;
  while (k) {
    if (k & 1u) result *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return result;
}

Rat RatPoly::eval(std::span<const Rat> point) const {
  if (point.size() != nvars_) throw DimensionMismatch("evaluation point has wrong dimension");
  std::vector<std::vector<Rat>> powers(nvars_, std::vector<Rat>{Rat(1)});
  Rat sum = 0;
  for (const auto& [e, c] : terms_) {
    Rat term = c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      auto& pw = powers[i];
      while (pw.size() <= e[i]) pw.push_back(pw.back() * point[i]);
      term *= pw[e[i]];
    }
    sum += term;
  }
  return sum;
}

RatPoly RatPoly::partial(std::size_t var) const {
  if (var >= nvars_) throw DimensionMismatch("partial derivative index out of range");
  RatPoly out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent d = e;
    d[var] -= 1;
    out.add_term(d, c * e[var]);
  }
  return out;
}

RatPoly RatPoly::compose(std::span<const RatPoly> maps) const {
  if (maps.size() != nvars_) throw DimensionMismatch("composition needs one polynomial per variable");
  std::size_t m = maps.empty() ? 0 : maps[0].nvars();
  for (const auto& p : maps) check_same(p, maps[0]);
  std::vector<std::vector<RatPoly>> powers(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) powers[i].push_back(constant(m, 1));
  RatPoly out(m);
  for (const auto& [e, c] : terms_) {
    RatPoly term = constant(m, c);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      auto& pw = powers[i];
      while (pw.size() <= e[i]) pw.push_back(pw.back() * maps[i]);
      term *= pw[e[i]];
    }
    out += term;
  }
  return out;
}

RatPoly RatPoly::embed(std::size_t new_nvars, std::span<const std::size_t> target) const {
  if (target.size() != nvars_) throw DimensionMismatch("embedding needs one target per variable");
  RatPoly out(new_nvars);
  for (const auto& [e, c] : terms_) {
    Exponent f(new_nvars, 0);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (target[i] >= new_nvars) throw DimensionMismatch("embedding target out of range");
      f[target[i]] += e[i];
    }
    out.add_term(f, c);
  }
  return out;
}

RatPoly RatPoly::restrict(std::span<const std::size_t> vars, std::span<const Rat> values) const {
  if (vars.size() != values.size()) throw DimensionMismatch("restriction needs one value per variable");
  std::vector<int> fixed(nvars_, -1);
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (vars[k] >= nvars_) throw DimensionMismatch("restriction index out of range");
    fixed[vars[k]] = static_cast<int>(k);
  }
  std::size_t keep = nvars_ - vars.size();
  RatPoly out(keep);
  for (const auto& [e, c] : terms_) {
    Rat coef = c;
    Exponent f;
    f.reserve(keep);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (fixed[i] >= 0)
        coef *= torsionlab::pow(values[static_cast<std::size_t>(fixed[i])], static_cast<int>(e[i]));
      else
        f.push_back(e[i]);
    }
    out.add_term(f, coef);
  }
  return out;
}

std::map<Exponent, RatPoly, GrlexLess> RatPoly::split_tail(std::size_t k) const {
  if (k > nvars_) throw DimensionMismatch("cannot split more variables than exist");
  std::size_t head = nvars_ - k;
  std::map<Exponent, RatPoly, GrlexLess> out;
  for (const auto& [e, c] : terms_) {
    Exponent tail(e.begin() + static_cast<std::ptrdiff_t>(head), e.end());
    Exponent lead(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(head));
    auto [it, inserted] = out.try_emplace(tail, RatPoly(head));
    it->second.add_term(lead, c);
  }
  return out;
}

std::vector<std::string> default_names(std::size_t nvars, std::string_view stem) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nvars; ++i) names.push_back(std::string(stem) + std::to_string(i + 1));
  return names;
}

std::string RatPoly::to_string() const { return to_string(default_names(nvars_)); }

std::string RatPoly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rat mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool constant_term = torsionlab::total_degree(e) == 0;
    bool wrote = false;
    if (mag != 1 || constant_term) {
      os << mag.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (wrote) os << "*";
      os << names.at(i);
      if (e[i] > 1) os << "^" << e[i];
      wrote = true;
    }
  }
  return os.str();
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& names) : s_(text), names_(names) {}

  RatPoly run() {
    RatPoly p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return p;
  }

 private:
  std::string_view s_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("polynomial syntax error at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RatPoly expr() {
    RatPoly acc(names_.size());
    bool negate = false;
    if (eat('-'))
      negate = true;
    else
      eat('+');
    RatPoly t = term();
    acc += negate ? -t : t;
    while (true) {
      if (eat('+'))
        acc += term();
      else if (eat('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }

  RatPoly term() {
    RatPoly acc = power();
    while (true) {
      if (eat('*')) {
        acc *= power();
      } else if (eat('/')) {
        RatPoly d = power();
        if (!d.is_constant() || d.is_zero()) fail("division only by nonzero constants");
        acc *= Rat(1 / d.constant_term());
      } else {
        break;
      }
    }
    return acc;
  }

  RatPoly power() {
    RatPoly base = atom();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start)))));
    }
    return base;
  }

  RatPoly atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RatPoly inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (c == '-') {
      ++pos_;
      return -power();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      return RatPoly::constant(names_.size(), parse_rational(s_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string_view name = s_.substr(start, pos_ - start);
      for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return RatPoly::variable(names_.size(), i);
      pos_ = start;
      fail("unknown variable '" + std::string(name) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

RatPoly RatPoly::parse(std::string_view text, std::size_t nvars) {
  return parse(text, default_names(nvars));
}

RatPoly RatPoly::parse(std::string_view text, const std::vector<std::string>& names) {
  return Parser(text, names).run();
}

RatPoly divide_exact(const RatPoly& a, const RatPoly& b) {
  if (b.is_zero()) throw ValidationError("division by zero polynomial");
  if (a.nvars() != b.nvars()) throw DimensionMismatch("division across rings");
  RatPoly q(a.nvars());
  RatPoly r = a;
  const Exponent& lb = b.leading_exponent();
  const Rat& cb = b.leading_coefficient();
  Exponent shift(a.nvars());
  while (!r.is_zero()) {
    const Exponent& lr = r.leading_exponent();
    for (std::size_t i = 0; i < shift.size(); ++i) {
      if (lr[i] < lb[i]) throw ValidationError("polynomial division is not exact");
      shift[i] = lr[i] - lb[i];
    }
    RatPoly step = RatPoly::monomial(shift, r.leading_coefficient() / cb);
    q += step;
    r -= step * b;
  }
  return q;
}

}  // namespace torsionlab
