#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "torsionlab/errors.hpp"
#include "torsionlab/linalg.hpp"
#include "torsionlab/numeric.hpp"
#include "torsionlab/poly_matrix.hpp"
#include "torsionlab/polynomial.hpp"
#include "torsionlab/upoly.hpp"

using namespace torsionlab;
using testing_support::random_point;
using testing_support::random_poly;

TEST(Rational, ParsesFractionsAndDecimals) {
  EXPECT_EQ(parse_rational("3/6"), Rat(1, 2));
  EXPECT_EQ(parse_rational("-0.125"), Rat(-1, 8));
  EXPECT_EQ(parse_rational("7"), Rat(7));
  EXPECT_THROW(parse_rational("1/0"), ValidationError);
  EXPECT_THROW(parse_rational("abc"), ValidationError);
  EXPECT_EQ(rational_from_double(0.375), Rat(3, 8));
}

TEST(RatPoly, ParseAndPrintRoundTrip) {
  RatPoly p = RatPoly::parse("x1^2*x2 - 3/2*x2 + 4", 2);
  EXPECT_EQ(p.to_string(), "x1^2*x2 - 3/2*x2 + 4");
  EXPECT_EQ(RatPoly::parse(p.to_string(), 2), p);
  EXPECT_EQ(p.total_degree(), 3);
  EXPECT_EQ(p.degree_in(1), 1u);
  EXPECT_THROW(RatPoly::parse("x3", 2), ValidationError);
  EXPECT_THROW(RatPoly::parse("x1 +", 2), ValidationError);
}

TEST(RatPoly, LeadingTermIsGrlexMaximal) {
  RatPoly p = RatPoly::parse("x2^3 + x1*x2^2 + x1^2", 2);
  EXPECT_EQ(p.leading_exponent(), (Exponent{1, 2}));
  EXPECT_EQ(p.to_string(), "x1*x2^2 + x2^3 + x1^2");
}

TEST(RatPoly, RingIdentitiesOnRandomPolynomials) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    RatPoly a = random_poly(rng, 3, 4, 5), b = random_poly(rng, 3, 4, 5), c = random_poly(rng, 3, 3, 4);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_TRUE((a - a).is_zero());
    if (!b.is_zero()) EXPECT_EQ(divide_exact(a * b, b), a);
  }
}

TEST(RatPoly, EvaluationIsARingMorphism) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    RatPoly a = random_poly(rng, 3, 4, 5), b = random_poly(rng, 3, 4, 5);
    auto x = random_point(rng, 3);
    EXPECT_EQ((a * b).eval(x), a.eval(x) * b.eval(x));
    EXPECT_EQ((a + b).eval(x), a.eval(x) + b.eval(x));
    EXPECT_EQ(a.pow(3).eval(x), a.eval(x) * a.eval(x) * a.eval(x));
  }
}

TEST(RatPoly, CompositionCommutesWithEvaluation) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    RatPoly p = random_poly(rng, 2, 3, 4);
    std::vector<RatPoly> maps{random_poly(rng, 3, 2, 3), random_poly(rng, 3, 2, 3)};
    auto x = random_point(rng, 3);
    std::vector<Rat> inner{maps[0].eval(x), maps[1].eval(x)};
    EXPECT_EQ(p.compose(maps).eval(x), p.eval(inner));
  }
}

TEST(RatPoly, PartialDerivativeSatisfiesProductRule) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    RatPoly a = random_poly(rng, 3, 4, 5), b = random_poly(rng, 3, 4, 5);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ((a * b).partial(i), a.partial(i) * b + a * b.partial(i));
  }
  EXPECT_EQ(RatPoly::parse("x1^3*x2", 2).partial(0), RatPoly::parse("3*x1^2*x2", 2));
}

TEST(RatPoly, SplitTailAndRestrict) {
  RatPoly p = RatPoly::parse("x1*x3^2 + 2*x2*x3^2 - x3 + 5*x1", 3);
  auto parts = p.split_tail(1);
  EXPECT_EQ(parts.at({2}), RatPoly::parse("x1 + 2*x2", 2));
  EXPECT_EQ(parts.at({1}), RatPoly::parse("-1", 2));
  EXPECT_EQ(parts.at({0}), RatPoly::parse("5*x1", 2));
  std::vector<std::size_t> vars{2};
  std::vector<Rat> vals{Rat(2)};
  EXPECT_EQ(p.restrict(vars, vals), RatPoly::parse("9*x1 + 8*x2 - 2", 2));
}

TEST(RatPoly, DivisionRejectsNonDivisors) {
  EXPECT_THROW(divide_exact(RatPoly::parse("x1^2 + 1", 1), RatPoly::parse("x1", 1)), ValidationError);
}

TEST(Determinant, BareissAgreesWithCofactorExpansion) {
  std::mt19937_64 rng(15);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      PolyMatrix m(n, n, 2);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m(r, c) = random_poly(rng, 2, 2, trial % 2 ? 1 : 3);
      EXPECT_EQ(determinant(m), determinant_cofactor(m));
    }
  }
}

TEST(Determinant, MultiplicativeOnPolynomialMatrices) {
  std::mt19937_64 rng(16);
  PolyMatrix a(3, 3, 2), b(3, 3, 2);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      a(r, c) = random_poly(rng, 2, 2, 2);
      b(r, c) = random_poly(rng, 2, 2, 2);
    }
  EXPECT_EQ(determinant(a * b), determinant(a) * determinant(b));
}

TEST(Determinant, ZeroPivotNeedsRowSwap) {
  PolyMatrix m(2, 2, 1);
  m(0, 1) = RatPoly::parse("x1", 1);
  m(1, 0) = RatPoly::parse("2", 1);
  EXPECT_EQ(determinant(m), RatPoly::parse("-2*x1", 1));
}

TEST(LinearAlgebra, NullspaceAndRank) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    RatMatrix a(3, 5);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 5; ++c) a(r, c) = testing_support::random_rational(rng, 2, 2);
    auto ns = a.nullspace();
    EXPECT_EQ(a.rank() + ns.size(), 5u);
    for (const auto& v : ns)
      for (const auto& x : a.apply(v)) EXPECT_EQ(x, 0);
    RatVec x0(5);
    for (auto& v : x0) v = testing_support::random_rational(rng);
    auto sol = a.solve(a.apply(x0));
    ASSERT_TRUE(sol.has_value());
    EXPECT_EQ(a.apply(*sol), a.apply(x0));
  }
}

TEST(LinearAlgebra, SubspaceCoordinates) {
  SubspaceBasis s(3);
  EXPECT_TRUE(s.add({1, 1, 0}));
  EXPECT_TRUE(s.add({0, 1, 1}));
  EXPECT_FALSE(s.add({1, 2, 1}));
  auto c = s.coordinates({2, 5, 3});
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ((*c)[0], 2);
  EXPECT_EQ((*c)[1], 3);
  EXPECT_FALSE(s.coordinates({1, 0, 0}).has_value());
}

TEST(UPoly, GcdAndSquarefreePart) {
  UPoly p = UPoly::from_poly(RatPoly::parse("(x1-1)^3*(x1+2)", 1));
  UPoly sf = squarefree_part(p);
  EXPECT_EQ(sf, UPoly::from_poly(RatPoly::parse("(x1-1)*(x1+2)", 1)));
  EXPECT_EQ(gcd(p, p.derivative()), UPoly::from_poly(RatPoly::parse("(x1-1)^2", 1)));
}

TEST(UPoly, TaylorCoefficientsReconstructPolynomial) {
  UPoly p = UPoly::from_poly(RatPoly::parse("x1^4 - 3*x1 + 2", 1));
  Rat b(3, 2);
  auto c = p.taylor(b);
  for (Rat t : {Rat(0), Rat(1), Rat(-5, 3)}) {
    Rat acc = 0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * pow(t - b, static_cast<int>(k));
    EXPECT_EQ(acc, p.eval(t));
  }
}

TEST(UPoly, RealRootIsolationSeparatesKnownRoots) {
  UPoly p = UPoly::from_poly(RatPoly::parse("(x1-1)^2*(x1-2)*(x1^2-2)", 1));
  auto roots = isolate_real_roots(p);
  ASSERT_EQ(roots.size(), 4u);
  std::vector<double> expected{-std::sqrt(2.0), 1.0, std::sqrt(2.0), 2.0};
  UPoly sf = squarefree_part(p);
  for (std::size_t i = 0; i < 4; ++i) {
    auto iv = refine_root(sf, roots[i], Rat(1, 1 << 30));
    EXPECT_NEAR(iv.lo.get_d(), expected[i], 1e-8);
    EXPECT_NEAR(iv.hi.get_d(), expected[i], 1e-8);
  }
}

TEST(UPoly, IntervalEvaluationEncloses) {
  UPoly p = UPoly::from_poly(RatPoly::parse("x1^3 - x1", 1));
  auto [lo, hi] = interval_eval(p, Rat(-1, 2), Rat(1, 3));
  for (int k = 0; k <= 10; ++k) {
    Rat t = Rat(-1, 2) + Rat(k, 10) * Rat(5, 6);
    EXPECT_LE(lo, p.eval(t));
    EXPECT_GE(hi, p.eval(t));
  }
}

TEST(Numeric, ComplexRootsAreCertified) {
  UPoly p = UPoly::from_poly(RatPoly::parse("(x1^2+1)*(x1-3)*(x1+1/2)", 1));
  auto roots = complex_roots(p);
  ASSERT_EQ(roots.size(), 4u);
  std::vector<std::complex<double>> expected{{0, 1}, {0, -1}, {3, 0}, {-0.5, 0}};
  for (const auto& e : expected) {
    bool found = false;
    for (const auto& r : roots)
      if (std::abs(r.z - e) <= r.radius + 1e-12 && std::abs(r.z - e) < 1e-9) found = true;
    EXPECT_TRUE(found) << e;
  }
}

TEST(Numeric, CompiledPolynomialMatchesExact) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    RatPoly p = random_poly(rng, 3, 5, 6);
    auto x = random_point(rng, 3);
    CompiledPoly c(p);
    auto xd = to_doubles(x);
    EXPECT_NEAR(c(xd), p.eval(x).get_d(), 1e-9 * (1 + std::fabs(p.eval(x).get_d())));
  }
}

TEST(Numeric, RealRootsAndQuadrature) {
  auto roots = real_roots_in({-2, 0, 1}, -3, 3);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0], -std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(roots[1], std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(integrate([](double t) { return t * t; }, 0, 3), 9.0, 1e-12);
}
