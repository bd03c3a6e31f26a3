#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace deformatics;
using namespace deformatics::jet;
using testsupport::star_f;

TEST(TotalDerivative, LiftsFieldVariable) {
  EXPECT_EQ(total_derivative(A(0, 1), 0), dA(0, 1, {0}));
}

TEST(TotalDerivative, CoordinateDerivative) {
  EXPECT_EQ(total_derivative(x(1), 1), Poly(1));
  EXPECT_TRUE(total_derivative(x(1), 0).is_zero());
  EXPECT_TRUE(total_derivative(x(1), 2).is_zero());
}

TEST(TotalDerivative, ChainRuleOnSquare) {
  Poly f = A(0, 0) * A(0, 0);
  EXPECT_EQ(total_derivative(f, 2), Rational(2) * A(0, 0) * dA(0, 0, {2}));
}

TEST(TotalDerivative, OverflowIsAnError) {
  DmaxScope scope(2);
  Poly f = dA(0, 0, {1, 2});
  EXPECT_THROW(total_derivative(f, 0), DerivativeOrderOverflow);
}

TEST(TotalDerivative, RigidParametersAreConstant) {
  EXPECT_TRUE(total_derivative(rigid(0) * Rational(3), 1).is_zero());
  EXPECT_EQ(total_derivative(rigid(0) * A(0, 0), 1), rigid(0) * dA(0, 0, {1}));
}

TEST(EulerLagrange, DivergenceIsAnnihilated) {
  Poly g = A(0, 1) * dA(1, 2, {0}) + zeta(1, 0) * A(1, 0);
  Poly f = total_derivative(g, 0) + total_derivative(g * A(0, 0), 1) + total_derivative(g, 2);
  EXPECT_TRUE(is_zero(euler_lagrange(f, Family::A, 2)));
  EXPECT_TRUE(is_zero(euler_lagrange(f, Family::Z1, 2)));
}

TEST(EulerLagrange, KineticTermGivesWaveOperator) {
  Poly f;
  for (int mu = 0; mu < 3; ++mu) f += Rational(Background::eta(mu, mu), 2) * dA(0, 0, {mu}) * dA(0, 0, {mu});
  Poly expected;
  for (int mu = 0; mu < 3; ++mu) expected -= Rational(Background::eta(mu, mu)) * dA(0, 0, {mu, mu});
  auto E = euler_lagrange(f, Family::A, 1);
  EXPECT_EQ(E({0, 0}), expected);
  EXPECT_TRUE(E({0, 1}).is_zero());
  EXPECT_TRUE(E({0, 2}).is_zero());
}

TEST(EulerLagrange, ChernSimonsTermGivesMassTerm) {
  // n = 2, k = diag(1, 3), m = 5.
  Rational m = 5;
  Rational k[2] = {1, 3};
  Poly f;
  for (int a = 0; a < 2; ++a)
    for (int mu = 0; mu < 3; ++mu) f += m / 2 * k[a] * Rational(Background::eta(mu, mu)) * A(a, mu) * star_f(a, mu);
  auto E = euler_lagrange(f, Family::A, 2);
  for (int a = 0; a < 2; ++a)
    for (int mu = 0; mu < 3; ++mu) EXPECT_EQ(E({a, mu}), m * k[a] * Rational(Background::eta(mu, mu)) * star_f(a, mu));
}

TEST(Divergence, ExplicitDivergence) {
  Poly f = total_derivative(A(0, 1) * A(1, 2), 0);
  EXPECT_TRUE(is_total_divergence(f).is_divergence);
}

TEST(Divergence, SingleFieldIsNot) {
  auto r = is_total_divergence(A(0, 0));
  EXPECT_FALSE(r.is_divergence);
  ASSERT_EQ(r.witness.size(), 1u);
  EXPECT_EQ(r.witness[0].first, "A1_0");
  EXPECT_EQ(r.witness[0].second, Poly(1));
}

TEST(Divergence, WitnessReconstructs) {
  Poly g0 = A(0, 1) * dA(1, 2, {0}) * x(2);
  Poly g1 = zeta(1, 0) * dA(0, 0, {1});
  Poly f = total_derivative(g0, 0) + total_derivative(g1, 1) + x(0) * x(1) + Rational(3);
  auto theta = divergence_witness(f);
  EXPECT_EQ(divergence(theta), f);
  EXPECT_THROW(divergence_witness(A(0, 0)), PreconditionError);
}

TEST(Vary, ConstantIsInvariant) {
  EXPECT_TRUE(vary(Poly(7), abelian_variation(1)).is_zero());
}

TEST(Vary, FieldStrengthIsAbelianInvariant) {
  auto d = abelian_variation(2);
  for (int a = 0; a < 2; ++a)
    for (int mu = 0; mu < 3; ++mu) EXPECT_TRUE(vary(star_f(a, mu), d).is_zero());
}

TEST(Vary, SingleComponent) {
  EXPECT_EQ(vary(A(0, 0), abelian_variation(1)), dzeta(1, 0, {0}));
}

TEST(Vary, GradeCapDropsHighTerms) {
  FieldVariation d(1);
  d(0, 0) = A(0, 0) * zeta(1, 0);
  Poly f = A(0, 0) * A(0, 0) + A(0, 0);
  EXPECT_EQ(vary(f, d, 1), A(0, 0) * zeta(1, 0));
}

TEST(LieDerivative, ZeroCovector) {
  EXPECT_TRUE(is_zero(lie_derivative_covector(make_covector(2), abelian_variation(2))));
}

TEST(LieDerivative, LinearFieldEquationIsInvariant) {
  Poly L;
  for (int mu = 0; mu < 3; ++mu)
    L += Rational(Background::eta(mu, mu), 2) * star_f(0, mu) * star_f(0, mu) +
         Rational(Background::eta(mu, mu), 2) * A(0, mu) * star_f(0, mu);
  auto E = euler_lagrange(L, Family::A, 1);
  EXPECT_TRUE(is_zero(lie_derivative_covector(E, abelian_variation(1))));
}

TEST(LieDerivative, AdjointTermPresent) {
  // δA = A ζ on a single component: L_δ E = δE + E ζ for E = A.
  FieldVariation d(1);
  d(0, 0) = A(0, 0) * zeta(1, 0);
  auto E = make_covector(1);
  E({0, 0}) = A(0, 0);
  auto r = lie_derivative_covector(E, d);
  EXPECT_EQ(r({0, 0}), Rational(2) * A(0, 0) * zeta(1, 0));
}

TEST(IbpCurrent, FirstOrderLagrangian) {
  Poly f = A(0, 0) * dA(0, 2, {1}) + dA(0, 1, {0}) * dA(0, 1, {2});
  auto d = abelian_variation(1);
  auto ups = ibp_current(f, d);
  // Υ^μ = Σ δφ ∂f/∂(∂_μ φ) for first-order f.
  for (int mu = 0; mu < 3; ++mu) {
    Poly expected;
    for (int be = 0; be < 3; ++be) expected += d(0, be) * partial(f, dA(0, be, {mu}).terms()[0].mono[0]);
    EXPECT_EQ(ups[mu], expected) << mu;
  }
}

TEST(IbpCurrent, NoDerivativesMeansNoCurrent) {
  auto ups = ibp_current(A(0, 0) * A(0, 1), abelian_variation(1));
  for (const auto& u : ups) EXPECT_TRUE(u.is_zero());
}

TEST(IbpCurrent, QuadraticLagrangianCurrentIsCurlWitness) {
  Poly L;
  for (int mu = 0; mu < 3; ++mu) L += Rational(Background::eta(mu, mu), 2) * star_f(0, mu) * star_f(0, mu);
  auto d = abelian_variation(1);
  auto ups = ibp_current(L, d);
  Poly dL = vary(L, d);
  EXPECT_TRUE(is_total_divergence(dL).is_divergence);
  auto E = euler_lagrange(L, Family::A, 1);
  Poly lhs;
  for (int mu = 0; mu < 3; ++mu) lhs += d(0, mu) * E({0, mu});
  EXPECT_EQ(dL, lhs + divergence(ups));
}

TEST(Commutator, AbelianVariationsCommute) {
  auto c = commutator(abelian_variation(2, Family::Z1), abelian_variation(2, Family::Z2));
  EXPECT_TRUE(c.is_zero());
}

TEST(Commutator, SharedFamilyRejected) {
  auto d = abelian_variation(2, Family::Z1);
  EXPECT_THROW(commutator(d, d), PreconditionError);
}

TEST(Commutator, YangMillsClosesOnLieBracket) {
  auto eps = testsupport::epsilon3();
  auto make = [&](Family f) {
    FieldVariation v(3);
    int s = static_cast<int>(f);
    for (int a = 0; a < 3; ++a)
      for (int mu = 0; mu < 3; ++mu) {
        Poly p = dzeta(s, a, {mu});
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 3; ++c)
            if (eps({a, b, c}) != 0) p += eps({a, b, c}) * A(b, mu) * zeta(s, c);
        v(a, mu) = p;
      }
    return GaugeVariation(v, f);
  };
  auto c = commutator(make(Family::Z1), make(Family::Z2));
  std::vector<Poly> z3(3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc)
        if (eps({a, b, cc}) != 0) z3[a] += eps({a, b, cc}) * zeta(1, b) * zeta(2, cc);
  auto expected = make(Family::Z3).with_parameter(z3);
  EXPECT_EQ(c, expected);
}

TEST(GaugeVariation, RejectsNonlinearParameter) {
  FieldVariation v(1);
  v(0, 0) = zeta(1, 0) * zeta(1, 0);
  EXPECT_THROW(GaugeVariation(v, Family::Z1), PreconditionError);
  v(0, 0) = dzeta(1, 0, {0, 1});
  EXPECT_THROW(GaugeVariation(v, Family::Z1), PreconditionError);
}

TEST(Noether, AbelianIdentity) {
  Poly L;
  for (int mu = 0; mu < 3; ++mu) L += Rational(Background::eta(mu, mu), 2) * star_f(0, mu) * star_f(0, mu);
  auto E = euler_lagrange(L, Family::A, 1);
  EXPECT_TRUE(is_zero(noether_identity_residual(E, abelian_variation(1))));
}

TEST(Grading, Pieces) {
  EXPECT_TRUE(grade_by_field_power(Poly()).empty());
  Poly q = A(0, 0) * A(0, 1);
  auto g = grade_by_field_power(q);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].grade, 2);
  Poly f = q + A(0, 0) * q + Rational(2);
  auto h = grade_by_field_power(f);
  ASSERT_EQ(h.size(), 3u);
  Poly sum;
  for (auto& p : h) sum += p.poly;
  EXPECT_EQ(sum, f);
}

TEST(Serialization, CanonicalText) {
  Poly f = Rational(1, 2) * A(0, 1) * dA(1, 2, {0, 0}) - Rational(3) * zeta(2, 0) * x(1) * x(1) + rigid(2);
  std::string s = f.to_string();
  EXPECT_EQ(Poly::parse(s), f);
  EXPECT_EQ(Poly::parse(s).to_string(), s);
  EXPECT_EQ(Poly().to_string(), "0");
  EXPECT_EQ(Poly::parse("1/1*A1_0;12"), dA(0, 0, {1, 2}));
  EXPECT_EQ(Poly::parse("-2/3*x1^2"), Rational(-2, 3) * x(1) * x(1));
}

TEST(Serialization, RejectsMalformed) {
  EXPECT_THROW(Poly::parse(""), ParseError);
  EXPECT_THROW(Poly::parse("1/0*A1_0"), ParseError);
  EXPECT_THROW(Poly::parse("1/1*B1_0"), ParseError);
  EXPECT_THROW(Poly::parse("1/1*A1_3"), ParseError);
  EXPECT_THROW(Poly::parse("1/1*A1_0;3"), ParseError);
}
