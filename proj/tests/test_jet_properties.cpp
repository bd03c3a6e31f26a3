#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace deformatics;
using namespace deformatics::jet;
using namespace testsupport;

namespace {
constexpr uint64_t kSeed = 20240611;
}

TEST(JetProperties, TotalDerivativesCommute) {
  std::mt19937_64 rng(kSeed);
  for (int trial = 0; trial < 100; ++trial) {
    Poly f = random_poly(rng, 2, 2);
    for (int mu = 0; mu < 3; ++mu)
      for (int nu = mu + 1; nu < 3; ++nu)
        ASSERT_EQ(total_derivative(total_derivative(f, mu), nu), total_derivative(total_derivative(f, nu), mu));
  }
}

TEST(JetProperties, EulerLagrangeKillsDivergences) {
  std::mt19937_64 rng(kSeed + 1);
  const int order = dmax() - 1;
  // The Euler-Lagrange operator doubles the derivative order of its input.
  DmaxScope scope(2 * dmax());
  for (int trial = 0; trial < 100; ++trial) {
    std::array<Poly, 3> theta;
    for (auto& t : theta) t = random_poly(rng, 2, order, 3, 3);
    Poly f = divergence(theta);
    ASSERT_TRUE(is_zero(euler_lagrange(f, Family::A, 2))) << trial;
    ASSERT_TRUE(is_zero(euler_lagrange(f, Family::Z1, 2))) << trial;
    ASSERT_TRUE(is_total_divergence(f).is_divergence);
    ASSERT_EQ(divergence(divergence_witness(f)), f);
  }
}

TEST(JetProperties, VaryIsADerivation) {
  std::mt19937_64 rng(kSeed + 2);
  for (int trial = 0; trial < 100; ++trial) {
    Poly f = random_poly(rng, 2, 2, 3, 2, false), g = random_poly(rng, 2, 2, 3, 2, false);
    FieldVariation d = random_linear_variation(rng, 2, Family::Z1);
    ASSERT_EQ(vary(f * g, d), vary(f, d) * g + f * vary(g, d));
  }
}

TEST(JetProperties, VariationJacobiIdentity) {
  std::mt19937_64 rng(kSeed + 3);
  for (int trial = 0; trial < 30; ++trial) {
    auto d1 = random_linear_variation(rng, 2, Family::Z1);
    auto d2 = random_linear_variation(rng, 2, Family::Z2);
    auto d3 = random_linear_variation(rng, 2, Family::Z3);
    auto total = commutator(d1, commutator(d2, d3)) + commutator(d2, commutator(d3, d1)) +
                 commutator(d3, commutator(d1, d2));
    ASSERT_TRUE(total.is_zero()) << trial;
  }
}

TEST(JetProperties, IbpIdentity) {
  std::mt19937_64 rng(kSeed + 4);
  for (int trial = 0; trial < 100; ++trial) {
    Poly f = random_poly(rng, 2, 2, 4, 3, false);
    FieldVariation d = random_linear_variation(rng, 2, Family::Z1);
    // ibp_current asserts the identity internally; recheck from outside.
    auto ups = ibp_current(f, d);
    auto E = euler_lagrange(f, Family::A, 2);
    Poly rhs = divergence(ups);
    for (int i = 0; i < 6; ++i) rhs += d.flat(i) * E.flat(i);
    ASSERT_EQ(vary(f, d), rhs);
  }
}

TEST(JetProperties, CanonicalFormIsAFixedPoint) {
  std::mt19937_64 rng(kSeed + 5);
  for (int trial = 0; trial < 100; ++trial) {
    Poly f = random_poly(rng, 3, 3, 5, 4);
    std::string s = f.to_string();
    Poly g = Poly::parse(s);
    ASSERT_EQ(g, f);
    ASSERT_EQ(g.to_string(), s);
  }
}
