#include <gtest/gtest.h>

#include <chrono>

#include "deformatics/theories.hpp"
#include "test_support.hpp"

using namespace deformatics;
using namespace deformatics::jet;

namespace {

std::array<Rational, 3> vec3(int a, int b, int c) { return {Rational(a), Rational(b), Rational(c)}; }

BuildOptions unchecked() {
  BuildOptions o;
  o.checked = false;
  return o;
}

void print(const HierarchyReport& r) {
  for (const auto& o : r.orders) {
    std::cout << "  order " << o.order << ": lie " << o.lie_residual.size() << " curl " << o.curl_residual.size()
              << " closure " << closure_mode_name(o.closure);
    for (const auto& z : o.zeta3) std::cout << " [" << z.to_string() << "]";
    std::cout << "\n";
  }
}

}  // namespace

TEST(Hierarchy, LinearOrderZero) {
  auto r = verify_hierarchy(build_linear_abelian(InternalSpace::identity(2), 1), 0);
  EXPECT_TRUE(r.passed());
}

TEST(Hierarchy, YmCsSu2ThroughOrderTwo) {
  auto t = build_ym_cs(StructureConstants::su2(), InternalSpace::identity(3), 1, 3);
  auto r = verify_hierarchy(t, 2);
  print(r);
  EXPECT_TRUE(r.passed());
  // ζ3^a = c^a_{bc} ζ1^b ζ2^c
  for (int a = 0; a < 3; ++a) {
    Poly expect;
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) expect += zeta(1, b) * zeta(2, c) * StructureConstants::su2()(a, b, c);
    EXPECT_EQ(r.orders[0].zeta3[a], expect);
  }
}

TEST(Hierarchy, FtTranslationsDilation) {
  auto t = build_ft_truncated(StructureConstants::translations_dilation(), InternalSpace::identity(3), 1, 3);
  auto start = std::chrono::steady_clock::now();
  auto r = verify_hierarchy(t, 2);
  print(r);
  std::cout << "  seconds " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << "\n";
  EXPECT_TRUE(r.passed());
}

TEST(Hierarchy, MismatchedVariationFailsAtOrderOne) {
  auto ft = build_ft_truncated(StructureConstants::su2(), InternalSpace::identity(3), 1, 3);
  auto ym = build_ym_cs(StructureConstants::su2(), InternalSpace::identity(3), 1, 0);
  auto r = verify_hierarchy(with_variation(ft, ym.variation, "mismatch"), 2);
  print(r);
  EXPECT_EQ(r.first_failure(), 1);
  EXPECT_FALSE(r.orders[1].lie_passed());
}

namespace {

ComponentTensor builder_grade2(const TheorySpec& t) { return grade_part(t.field_equation, 2); }

void report_diff(const ComponentTensor& x, const ComponentTensor& y) {
  for (size_t i = 0; i < x.size(); ++i)
    if (x.flat(i) != y.flat(i))
      std::cout << label(x, i) << ": construct " << x.flat(i).to_string() << "\n   bld " << y.flat(i).to_string() << "\n";
}

}  // namespace

TEST(QuadraticConstruction, ZeroSeedGivesZero) {
  InternalSpace k = InternalSpace::identity(2);
  RMatrix H = linear_quadratic_form(k, TorsionPotential(2), Background{});
  auto r = theorem28_construct(Theorem28Seed::zero(2), H, k, 1);
  EXPECT_TRUE(is_zero(r.E2));
  EXPECT_TRUE(is_zero(r.U2));
  EXPECT_TRUE(is_zero(r.Omega2));
}

TEST(QuadraticConstruction, YangMillsSeed) {
  InternalSpace k = InternalSpace::identity(3);
  RMatrix H = linear_quadratic_form(k, TorsionPotential(3), Background{});
  for (int m : {0, 2}) {
    auto t = build_ym_cs(StructureConstants::su2(), k, 1, m);
    auto r = theorem28_construct(Theorem28Seed::yang_mills(StructureConstants::su2(), 1), H, k, m);
    report_diff(r.E2, builder_grade2(t));
    EXPECT_EQ(r.E2, builder_grade2(t));
  }
}

TEST(QuadraticConstruction, FreedmanTownsendSeed) {
  InternalSpace k = InternalSpace::identity(3);
  RMatrix H = linear_quadratic_form(k, TorsionPotential(3), Background{});
  auto b = StructureConstants::su2();
  auto t = build_ft_truncated(b, k, 1, 3);
  auto r = theorem28_construct(Theorem28Seed::freedman_townsend(b, k, 1), H, k, 0);
  // Equal up to terms vanishing on the linear solution space.
  ComponentTensor diff = builder_grade2(t);
  for (size_t i = 0; i < diff.size(); ++i) diff.flat(i) -= r.E2.flat(i);
  EXPECT_FALSE(is_zero(diff));
  EXPECT_TRUE(match_on_shell(diff, r.E1).matched);

  // A seed with the wrong coupling is not equivalent.
  auto wrong = theorem28_construct(Theorem28Seed::freedman_townsend(b, k, 2), H, k, 0);
  ComponentTensor d2 = builder_grade2(t);
  for (size_t i = 0; i < d2.size(); ++i) d2.flat(i) -= wrong.E2.flat(i);
  EXPECT_FALSE(match_on_shell(d2, wrong.E1).matched);
}

TEST(QuadraticConstruction, PrerequisitesChecked) {
  InternalSpace k = InternalSpace::identity(2);
  RMatrix H = linear_quadratic_form(k, TorsionPotential(2), Background{});
  auto s = Theorem28Seed::zero(2);
  s.u0({0, 0, 1}) = 1;
  EXPECT_THROW(theorem28_construct(s, H, k, 0), PrerequisiteViolated);
}

namespace {

TorsionPotential su2_bivector() { return TorsionPotential::bivector({1, 0, 0}, {0, 1, 0}); }

bool all_zero_components(const ComponentTensor& t) {
  for (size_t i = 0; i < t.size(); ++i)
    if (!t.flat(i).is_zero()) return false;
  return true;
}

}  // namespace

TEST(Noether, ResidualVanishesForPassingTheories) {
  auto k3 = InternalSpace::identity(3);
  auto su2 = StructureConstants::su2();
  EXPECT_TRUE(all_zero_components(noether_residual(build_linear_abelian(InternalSpace::identity(2), 1))));
  EXPECT_TRUE(all_zero_components(noether_residual(build_ym_cs(su2, k3, 1, 3))));
  EXPECT_TRUE(all_zero_components(noether_residual(build_ft_truncated(su2, k3, 1, 3))));
  EXPECT_TRUE(all_zero_components(noether_residual(build_torsion_ym_ft_cs(su2, su2_bivector(), vec3(0, 0, 1), k3, 2, 1, 2))));
  TorsionPotential p(2);
  p.set(0, 1, 1);
  auto kvs = KillingVectorSet::translations({vec3(1, 0, 0), vec3(0, 1, 0)});
  EXPECT_TRUE(all_zero_components(noether_residual(build_gravity_like(kvs, InternalSpace::identity(2), p, vec3(1, 2, 0), 1, 3))));
}

TEST(Noether, MismatchedVariationLeavesResidual) {
  auto ft = build_ft_truncated(StructureConstants::su2(), InternalSpace::identity(3), 1, 3);
  auto ym = build_ym_cs(StructureConstants::su2(), InternalSpace::identity(3), 1, 0);
  EXPECT_FALSE(all_zero_components(noether_residual(with_variation(ft, ym.variation, "mismatch"))));
}

TEST(Closure, YangMillsClosesOffShell) {
  auto t = build_ym_cs(StructureConstants::su2(), InternalSpace::identity(3), 1, 3);
  ClosureResult r0 = closure_residual(t, 0);
  EXPECT_EQ(r0.mode, ClosureMode::OffShell);
  EXPECT_TRUE(all_zero_components(r0.residual));
  ClosureResult r1 = closure_residual(t, 1);
  EXPECT_EQ(r1.mode, ClosureMode::OffShell);
  EXPECT_TRUE(all_zero_components(r1.residual));
}

TEST(Closure, OrderOutsideRangeRejected) {
  auto t = build_ym_cs(StructureConstants::su2(), InternalSpace::identity(3), 1, 3);
  EXPECT_THROW(closure_residual(t, 2), PreconditionError);
  auto ft = build_ft_truncated(StructureConstants::su2(), InternalSpace::identity(3), 1, 2);
  EXPECT_THROW(verify_hierarchy(ft, 2), PreconditionError);
}

TEST(Uniqueness, CubicInvariantsHaveNoFieldEquation) {
  UniquenessReport r = uniqueness_probe(3, 1);
  EXPECT_GT(r.invariant_dimension, 0);
  EXPECT_TRUE(r.unique());
  EXPECT_THROW(uniqueness_probe(3, 2), PreconditionError);
}

TEST(Hierarchy, TorsionObstructionViolationFailsAtOrderOne) {
  BuildOptions o = unchecked();
  o.kappa_ft = Rational(1);  // κ/m = 1/2 is required at m = 2, κ = 1
  auto t = build_torsion_ym_ft_cs(StructureConstants::su2(), su2_bivector(), vec3(0, 0, 1), InternalSpace::identity(3), 2, 1,
                                  2, o);
  auto r = verify_hierarchy(t, 1);
  print(r);
  EXPECT_EQ(r.first_failure(), 1);
  EXPECT_FALSE(r.orders[1].lie_passed());
  EXPECT_FALSE(check_gauge_invariance(t).passed);
}

TEST(Hierarchy, KappaOverrideNeedsUncheckedBuild) {
  BuildOptions o;
  o.kappa_ft = Rational(1);
  EXPECT_THROW(build_torsion_ym_ft_cs(StructureConstants::su2(), su2_bivector(), vec3(0, 0, 1), InternalSpace::identity(3), 2,
                                      1, 2, o),
               PreconditionError);
}

TEST(Hierarchy, GravityTranslations) {
  TorsionPotential p(2);
  p.set(0, 1, 1);
  auto kvs = KillingVectorSet::translations({vec3(1, 0, 0), vec3(0, 1, 0)});
  auto r = verify_hierarchy(build_gravity_like(kvs, InternalSpace::identity(2), p, vec3(1, 2, 0), 1, 3), 2);
  print(r);
  EXPECT_TRUE(r.passed());
}

TEST(Gravity, OffAxisVelocityIsObstructed) {
  TorsionPotential p(2);
  p.set(0, 1, 1);
  auto kvs = KillingVectorSet::rotation_translation(1, 1);
  EXPECT_THROW(build_gravity_like(kvs, InternalSpace::identity(2), p, vec3(0, 1, 0), 1, 3), ObstructionFailed);
  EXPECT_NO_THROW(build_gravity_like(kvs, InternalSpace::identity(2), p, vec3(1, 0, 0), 1, 3));
  // Without torsion the velocity is irrelevant.
  EXPECT_NO_THROW(build_gravity_like(kvs, InternalSpace::identity(2), TorsionPotential(2), vec3(0, 1, 0), 1, 3));
}

TEST(ZeroCouplings, BuildersReduceToLinearTheory) {
  auto k3 = InternalSpace::identity(3);
  TheorySpec lin = build_linear_abelian(k3, 0);
  auto same = [&](const TheorySpec& t) {
    EXPECT_EQ(t.lagrangian, lin.lagrangian) << t.name;
    EXPECT_EQ(t.variation.field(), lin.variation.field()) << t.name;
    ASSERT_EQ(t.field_equation.size(), lin.field_equation.size());
    for (size_t i = 0; i < t.field_equation.size(); ++i) EXPECT_EQ(t.field_equation.flat(i), lin.field_equation.flat(i));
  };
  same(build_ym_cs(StructureConstants::su2(), k3, 0, 0));
  same(build_ft_truncated(StructureConstants::su2(), k3, 0, 3));
  same(build_linear_abelian(k3, 0, std::make_pair(vec3(0, 0, 0), TorsionPotential(3))));
  BuildOptions o = unchecked();
  o.kappa_ft = Rational(0);
  same(build_torsion_ym_ft_cs(StructureConstants::su2(), TorsionPotential(3), vec3(0, 0, 0), k3, 0, 0, 3, o));
}

TEST(Currents, LinearAbelianRigidCurrentIsTrivial) {
  CurrentReport r = check_current_and_stress(build_linear_abelian(InternalSpace::identity(2), 1));
  EXPECT_TRUE(r.rigid_identity);
  for (const auto& j : r.rigid_current) EXPECT_TRUE(j.is_zero());
}

TEST(Currents, YangMillsChernSimonsRigidIdentity) {
  CurrentReport r = check_current_and_stress(build_ym_cs(StructureConstants::su2(), InternalSpace::identity(3), 1, 3));
  EXPECT_TRUE(r.rigid_identity);
  bool nonzero = false;
  for (const auto& j : r.rigid_current) nonzero |= !j.is_zero();
  EXPECT_TRUE(nonzero);
}

TEST(Currents, FreedmanTownsendRigidIdentity) {
  CurrentReport r = check_current_and_stress(build_ft_truncated(StructureConstants::su2(), InternalSpace::identity(3), 1, 2));
  EXPECT_TRUE(r.rigid_identity);
}

TEST(Currents, TorsionCurrentAndStress) {
  auto k3 = InternalSpace::identity(3);
  auto with = build_torsion_ym_ft_cs(StructureConstants::su2(), su2_bivector(), vec3(0, 0, 1), k3, 2, 1, 2);
  CurrentReport r = check_current_and_stress(with);
  for (const auto& note : r.notes) std::cout << "  " << note << "\n";
  EXPECT_TRUE(r.rigid_identity);
  EXPECT_TRUE(r.current_on_shell);
  EXPECT_TRUE(r.stress_on_shell);
  EXPECT_TRUE(r.torsion_present);
  EXPECT_FALSE(r.stress_symmetric);
  EXPECT_TRUE(r.notes.empty());

  auto without = build_torsion_ym_ft_cs(StructureConstants::su2(), TorsionPotential(3), vec3(0, 0, 1), k3, 2, 1, 2);
  CurrentReport s = check_current_and_stress(without);
  EXPECT_TRUE(s.rigid_identity);
  EXPECT_TRUE(s.current_on_shell);
  EXPECT_TRUE(s.stress_on_shell);
  EXPECT_FALSE(s.torsion_present);
  EXPECT_TRUE(s.stress_symmetric);
}

TEST(Currents, ObstructedTheoryHasNoConservedCurrent) {
  // With the obstruction violated by a κ_FT override, the rigid variation is no longer a symmetry.
  BuildOptions o = unchecked();
  o.kappa_ft = Rational(1);
  auto t = build_torsion_ym_ft_cs(StructureConstants::su2(), su2_bivector(), vec3(0, 0, 1), InternalSpace::identity(3), 2, 1,
                                  2, o);
  CurrentReport r = check_current_and_stress(t);
  EXPECT_FALSE(r.rigid_identity);
  EXPECT_FALSE(r.current_on_shell);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Currents, ExplicitFormulasNeedTorsionTheory) {
  EXPECT_THROW(torsion_current(build_linear_abelian(InternalSpace::identity(2), 1)), PreconditionError);
}
