#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "torsionlab/polynomial.hpp"

namespace torsionlab {

// Polynomial map R^n -> R^m, all components in the same n-variable ring.
struct PolyMap {
  std::vector<RatPoly> comps;
  std::size_t nvars() const { return comps.empty() ? 0 : comps[0].nvars(); }
  std::size_t size() const { return comps.size(); }
  void validate() const;
};

// Polynomial vector field on R^n: comps[i] is the coefficient of d/dx_i.
struct VectorField {
  std::vector<RatPoly> comps;
  std::size_t dim() const { return comps.size(); }
  bool is_zero() const;
  bool operator==(const VectorField& o) const { return comps == o.comps; }
  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField operator*(const Rat& s) const;
  VectorField operator-() const { return *this * Rat(-1); }
  static VectorField zero(std::size_t n);
  void validate() const;
};

// Fiber-tangent field of pi: R^n -> R^{n-1}; component i is the signed
// maximal minor of the Jacobian with column i removed.
VectorField hodge_star_field(const PolyMap& pi);

RatPoly apply(const VectorField& x, const RatPoly& f);
VectorField bracket(const VectorField& x, const VectorField& y);
RatPoly divergence(const VectorField& x);
// Components of d(pi)(X).
std::vector<RatPoly> pushforward(const PolyMap& pi, const VectorField& x);

// Word over {1, 2}; the field of (i, w) is [X_i, X_w].
using Word = std::vector<int>;
std::array<int, 2> bidegree(const Word& w);
std::string word_label(const Word& w);
Word parse_word(const std::string& label);
// Length first, then lexicographic.
bool word_less(const Word& a, const Word& b);

struct WordEntry {
  Word word;
  VectorField field;
  std::array<int, 2> degree;
};

// Right-nested brackets of X1, X2 up to length cap. Words whose field
// vanishes are not stored and are never extended.
class WordTable {
 public:
  WordTable(VectorField x1, VectorField x2, int cap);
  int cap() const { return cap_; }
  std::size_t dim() const { return x1_.dim(); }
  const VectorField& generator(int i) const { return i == 1 ? x1_ : x2_; }
  const std::vector<WordEntry>& entries() const { return entries_; }
  // Zero field for words known to vanish; throws for words longer than cap.
  VectorField field(const Word& w) const;
  int longest_nonzero() const;

 private:
  VectorField x1_, x2_;
  int cap_;
  std::vector<WordEntry> entries_;
  std::map<Word, std::size_t> index_;
};

WordTable build_word_table(const VectorField& x1, const VectorField& x2, int cap);

struct NilpotencyResult {
  bool nilpotent = false;
  int step = 0;  // valid when nilpotent
};

// Step(s): every word longer than s vanishes. Certified when the table
// reaches at least length s+1; otherwise not nilpotent within the cap.
NilpotencyResult nilpotency_step(const WordTable& table);

// Flow of X as a polynomial in (x_1..x_n, t) with t last.
struct FlowMap {
  VectorField field;
  std::vector<RatPoly> map;
  unsigned terms = 0;  // highest nonvanishing power of X in the Lie series
};

FlowMap lie_series_flow(const VectorField& x, unsigned max_terms = 64);

// Replaces the time variable by `time` and x by `point`; all of them must
// share one ring.
std::vector<RatPoly> apply_flow(const FlowMap& flow, const std::vector<RatPoly>& point, const RatPoly& time);

}  // namespace torsionlab
