#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "torsionlab/catalog.hpp"
#include "torsionlab/errors.hpp"
#include "torsionlab/nilpotent.hpp"
#include "torsionlab/poly_matrix.hpp"

using namespace torsionlab;
using testing_support::random_rational;

namespace {

// Strictly upper triangular 4x4 matrices, basis E_ij for i < j.
struct UpperTriangular {
  static constexpr std::size_t M = 4;
  using Mat = std::array<std::array<Rat, M>, M>;
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  AbstractNilpotent alg;

  UpperTriangular() {
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = i + 1; j < M; ++j) idx.push_back({i, j});
    alg.dim = idx.size();
    alg.step = 3;
    alg.constants.assign(alg.dim * alg.dim * alg.dim, Rat(0));
    for (std::size_t a = 0; a < alg.dim; ++a)
      for (std::size_t b = 0; b < alg.dim; ++b) {
        Mat c = sub(mul(unit(a), unit(b)), mul(unit(b), unit(a)));
        RatVec v = flatten(c);
        for (std::size_t k = 0; k < alg.dim; ++k) alg.constants[(a * alg.dim + b) * alg.dim + k] = v[k];
      }
  }
  Mat zero() const { return Mat{}; }
  Mat unit(std::size_t a) const {
    Mat m{};
    m[idx[a].first][idx[a].second] = 1;
    return m;
  }
  Mat from(const RatVec& v) const {
    Mat m{};
    for (std::size_t a = 0; a < idx.size(); ++a) m[idx[a].first][idx[a].second] = v[a];
    return m;
  }
  RatVec flatten(const Mat& m) const {
    RatVec v;
    for (auto [i, j] : idx) v.push_back(m[i][j]);
    return v;
  }
  static Mat mul(const Mat& a, const Mat& b) {
    Mat c{};
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j)
        for (std::size_t k = 0; k < M; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
  }
  static Mat sub(const Mat& a, const Mat& b) {
    Mat c = a;
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j) c[i][j] -= b[i][j];
    return c;
  }
  static Mat add_scaled(const Mat& a, const Mat& b, const Rat& s) {
    Mat c = a;
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j) c[i][j] += s * b[i][j];
    return c;
  }
  static Mat identity() {
    Mat m{};
    for (std::size_t i = 0; i < M; ++i) m[i][i] = 1;
    return m;
  }
  static Mat exp(const Mat& a) {
    Mat acc = identity(), power = identity();
    for (unsigned k = 1; k < M; ++k) {
      power = mul(power, a);
      acc = add_scaled(acc, power, Rat(1) / factorial(k));
    }
    return acc;
  }
  static Mat log(const Mat& g) {
    Mat n = sub(g, identity()), acc{}, power = identity();
    for (unsigned k = 1; k < M; ++k) {
      power = mul(power, n);
      acc = add_scaled(acc, power, Rat(k % 2 ? 1 : -1, k));
    }
    return acc;
  }
};

RatVec random_vec(std::mt19937_64& rng, std::size_t d) {
  RatVec v;
  for (std::size_t i = 0; i < d; ++i) v.push_back(random_rational(rng, 2, 3));
  return v;
}

AbstractNilpotent heisenberg() {
  AbstractNilpotent h;
  h.dim = 3;
  h.step = 2;
  h.labels = {"X", "Y", "Z"};
  h.constants.assign(27, Rat(0));
  h.constants[(0 * 3 + 1) * 3 + 2] = 1;
  h.constants[(1 * 3 + 0) * 3 + 2] = -1;
  return h;
}

}  // namespace

TEST(AbstractAlgebra, MomentCurvePlaneIsHeisenberg) {
  auto alg = abstract_algebra(moment_curve(2).table(4));
  EXPECT_EQ(alg.dim, 3u);
  EXPECT_EQ(alg.step, 2);
  EXPECT_EQ(alg.labels, (std::vector<std::string>{"1", "2", "12"}));
  EXPECT_EQ(alg.c(0, 1, 2), 1);
  EXPECT_EQ(alg.c(1, 0, 2), -1);
  EXPECT_TRUE(alg.satisfies_jacobi());
  EXPECT_EQ(alg.nilpotency_class(), 2);
}

TEST(AbstractAlgebra, MomentCurveSpaceHasDimensionFour) {
  auto alg = abstract_algebra(moment_curve(3).table(6));
  EXPECT_EQ(alg.dim, 4u);
  EXPECT_EQ(alg.step, 3);
  EXPECT_EQ(alg.nilpotency_class(), 3);
  EXPECT_TRUE(alg.satisfies_jacobi());
}

TEST(Bch, MatchesMatrixLogarithmOfProduct) {
  UpperTriangular ut;
  ASSERT_TRUE(ut.alg.satisfies_jacobi());
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    RatVec a = random_vec(rng, ut.alg.dim), b = random_vec(rng, ut.alg.dim);
    RatVec expected = ut.flatten(UpperTriangular::log(UpperTriangular::mul(UpperTriangular::exp(ut.from(a)),
                                                                           UpperTriangular::exp(ut.from(b)))));
    EXPECT_EQ(bch(ut.alg, a, b, 3), expected);
  }
}

TEST(Bch, GroupAxioms) {
  UpperTriangular ut;
  std::mt19937_64 rng(42);
  RatVec zero(ut.alg.dim, Rat(0));
  for (int trial = 0; trial < 10; ++trial) {
    RatVec a = random_vec(rng, ut.alg.dim), b = random_vec(rng, ut.alg.dim), c = random_vec(rng, ut.alg.dim);
    EXPECT_EQ(bch(ut.alg, bch(ut.alg, a, b, 3), c, 3), bch(ut.alg, a, bch(ut.alg, b, c, 3), 3));
    EXPECT_EQ(bch(ut.alg, a, zero, 3), a);
    RatVec neg = a;
    for (auto& v : neg) v = -v;
    EXPECT_EQ(bch(ut.alg, a, neg, 3), zero);
  }
}

TEST(Bch, PolynomialCoefficientsAgreeWithRationalSpecialization) {
  auto h = heisenberg();
  LieElement a{RatPoly::parse("x1", 2), RatPoly::parse("x2", 2), RatPoly(2)};
  LieElement b{RatPoly::parse("2", 2), RatPoly::parse("x1*x2", 2), RatPoly::parse("1", 2)};
  auto z = bch(h, a, b, 2);
  EXPECT_EQ(z[2], RatPoly::parse("1 + 1/2*x1^2*x2 - x2", 2));
}

TEST(Malcev, ChainOfIdealsThroughSubalgebra) {
  UpperTriangular ut;
  // z = span(E_12, E_13): a subalgebra, not an ideal.
  std::vector<RatVec> z{ut.flatten(ut.unit(0)), ut.flatten(ut.unit(1))};
  auto mb = weak_malcev(ut.alg, z);
  EXPECT_EQ(mb.n, 4u);
  const auto& na = mb.algebra;
  const std::size_t d = na.dim;
  for (std::size_t k = 0; k < d; ++k) {
    // span(e_k..e_N) is a subalgebra and span(e_{k+1}..e_N) is an ideal in it.
    for (std::size_t i = k; i < d; ++i)
      for (std::size_t j = k; j < d; ++j)
        for (std::size_t m = 0; m < k; ++m) EXPECT_EQ(na.c(i, j, m), 0);
    for (std::size_t i = k; i < d; ++i)
      for (std::size_t j = k + 1; j < d; ++j)
        for (std::size_t m = 0; m <= k; ++m) EXPECT_EQ(na.c(i, j, m), 0);
  }
  SubspaceBasis tail(d), zspan(d);
  for (std::size_t k = mb.n; k < d; ++k) tail.add(mb.vectors[k]);
  for (const auto& v : z) zspan.add(v);
  for (const auto& v : z) EXPECT_TRUE(tail.contains(v));
  EXPECT_EQ(tail.size(), zspan.size());
}

TEST(Malcev, RejectsNonSubalgebra) {
  auto h = heisenberg();
  EXPECT_THROW(weak_malcev(h, {{1, 0, 0}, {0, 1, 0}}), NotASubalgebra);
}

TEST(GroupLaw, AbelianIsAddition) {
  AbstractNilpotent ab;
  ab.dim = 2;
  ab.step = 1;
  ab.constants.assign(8, Rat(0));
  auto law = group_law(weak_malcev(ab, {}));
  EXPECT_EQ(law.q[0], RatPoly::parse("x1 + x3", 4));
  EXPECT_EQ(law.q[1], RatPoly::parse("x2 + x4", 4));
}

TEST(GroupLaw, TriangularWithUnitJacobian) {
  UpperTriangular ut;
  auto mb = weak_malcev(ut.alg, {});
  auto law = group_law(mb);
  const std::size_t d = law.N;
  std::vector<std::size_t> x1vars;
  for (std::size_t i = 0; i < d; ++i) x1vars.push_back(i);
  EXPECT_EQ(determinant(jacobian(law.q, x1vars)), RatPoly::constant(2 * d, 1));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) EXPECT_EQ(law.q[i].degree_in(j), 0u) << i << " " << j;
}

TEST(GroupLaw, SecondKindCoordinatesRecompose) {
  UpperTriangular ut;
  auto mb = weak_malcev(ut.alg, {});
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    RatVec z = random_vec(rng, mb.algebra.dim);
    LieElement zp;
    for (const auto& v : z) zp.push_back(RatPoly::constant(0, v));
    auto coords = second_kind_coordinates(mb.algebra, zp);
    RatVec acc(mb.algebra.dim, Rat(0));
    for (std::size_t k = 0; k < coords.size(); ++k) {
      RatVec f(mb.algebra.dim, Rat(0));
      f[k] = coords[k].constant_term();
      acc = bch(mb.algebra, acc, f, mb.algebra.step);
    }
    EXPECT_EQ(acc, z);
  }
}

TEST(Flows, CompositionFollowsReversedBch) {
  auto pair = moment_curve(2);
  auto alg = abstract_algebra(pair.table(4));
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 5; ++trial) {
    RatVec a = random_vec(rng, alg.dim), b = random_vec(rng, alg.dim);
    FlowMap fa = lie_series_flow(alg.realize(a)), fb = lie_series_flow(alg.realize(b));
    FlowMap fab = lie_series_flow(alg.realize(bch(alg, b, a, alg.step)));
    const std::size_t n = pair.dim();
    std::vector<RatPoly> x;
    for (std::size_t i = 0; i < n; ++i) x.push_back(RatPoly::variable(n, i));
    RatPoly one = RatPoly::constant(n, 1);
    // exp(A) o exp(B) applies B first.
    EXPECT_EQ(apply_flow(fa, apply_flow(fb, x, one), one), apply_flow(fab, x, one));
  }
}

namespace {

std::vector<Rat> eval_all(const std::vector<RatPoly>& ps, const std::vector<Rat>& x) {
  std::vector<Rat> out;
  for (const auto& p : ps) out.push_back(p.eval(x));
  return out;
}

void check_pullback(const CoveringMap& cov, std::mt19937_64& rng) {
  const std::size_t n = cov.x0.size(), d = cov.basis.algebra.dim;
  EXPECT_EQ(eval_all(cov.phi, std::vector<Rat>(n, Rat(0))), cov.x0);
  for (int trial = 0; trial < 4; ++trial) {
    RatVec xi = random_vec(rng, d);
    Rat s = random_rational(rng, 1, 3);
    std::vector<Rat> y = testing_support::random_point(rng, n, 2, 3);
    std::vector<Rat> args(2 * d, Rat(0));
    for (std::size_t i = 0; i < n; ++i) args[i] = y[i];
    for (std::size_t k = 0; k < d; ++k) args[d + k] = s * xi[k];
    std::vector<Rat> qv = eval_all(cov.law.q, args);
    std::vector<Rat> lhs = eval_all(cov.phi, std::vector<Rat>(qv.begin(), qv.begin() + static_cast<long>(n)));
    FlowMap f = lie_series_flow(cov.basis.algebra.realize(xi));
    std::vector<Rat> pt = eval_all(cov.phi, y);
    pt.push_back(s);
    EXPECT_EQ(lhs, eval_all(f.map, pt));
  }
}

}  // namespace

TEST(CoveringMap, PullbackOfFlowsIsTheGroupLaw) {
  std::mt19937_64 rng(45);
  auto cov = covering_map(moment_curve(2).table(4), {Rat(1, 2), Rat(-1), Rat(2)});
  EXPECT_TRUE(cov.isotropy.empty());
  check_pullback(cov, rng);
  auto cov3 = covering_map(moment_curve(3).table(6), {Rat(0), Rat(1), Rat(0), Rat(1, 3)});
  check_pullback(cov3, rng);
}

TEST(CoveringMap, IsotropyActsTrivially) {
  std::mt19937_64 rng(46);
  auto cov = covering_map(planar_power(2).table(5), {Rat(0), Rat(0)});
  ASSERT_EQ(cov.isotropy.size(), 1u);
  check_pullback(cov, rng);
  const std::size_t n = 2, d = cov.basis.algebra.dim;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<Rat> args(2 * d, Rat(0));
    args[0] = random_rational(rng);
    args[1] = random_rational(rng);
    for (std::size_t k = n; k < d; ++k) args[d + k] = random_rational(rng);
    auto rv = eval_all(cov.law.r, args);
    EXPECT_EQ(eval_all(cov.phi, {rv[0], rv[1]}), eval_all(cov.phi, {args[0], args[1]}));
  }
}

TEST(CoveringMap, DegenerateSpanIsSingular) {
  PolyMap pi1{{RatPoly::parse("x1", 3), RatPoly::parse("x2", 3)}};
  PolyMap pi2{{RatPoly::parse("x1", 3), RatPoly::parse("x2 - x1*x3", 3)}};
  auto table = build_word_table(hodge_star_field(pi1), hodge_star_field(pi2), 4);
  EXPECT_THROW(covering_map(table, {Rat(1), Rat(0), Rat(0)}), SingularAtOrigin);
}
