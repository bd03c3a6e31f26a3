// One line per acceptance criterion; exit status is nonzero if any criterion fails or exceeds its time limit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "deformatics/jet.hpp"
#include "deformatics/scan.hpp"
#include "deformatics/theories.hpp"
#include "deformatics/waves.hpp"

using namespace deformatics;
using namespace deformatics::jet;

namespace {

// Pinned limits and tolerances.
constexpr double kLimit1 = 1;
constexpr double kLimit2 = 5;
constexpr double kLimit3 = 60;
constexpr double kLimit6 = 600;
constexpr double kLimit10 = 30;
constexpr double kShellTol = 1e-9;
constexpr double kAlignTol = 1e-8;
constexpr double kOddEps = 1e-4;
constexpr double kOddTol = 1e-6;
constexpr double kOddRelTol = 1e-2;  // odd defect is O(v^2) against an O(v) shift
constexpr double kSlopeTarget = 2.0;
constexpr double kSlopeTol = 0.1;
constexpr int kCampaignViolations = 200;
constexpr std::uint64_t kSeed = 20260101;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::array<Rational, 3> vec3(const Rational& a, const Rational& b, const Rational& c) { return {a, b, c}; }

Rational random_rational(std::mt19937_64& rng, int span = 3, int max_den = 3) {
  std::uniform_int_distribution<int> num(-span, span), den(1, max_den);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

Rational random_nonzero(std::mt19937_64& rng) {
  Rational r = 0;
  while (r == 0) r = random_rational(rng);
  return r;
}

TorsionPotential random_potential(std::mt19937_64& rng, int n) {
  TorsionPotential p(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) p.set(a, b, random_rational(rng));
  return p;
}

bool zero_components(const ComponentTensor& t) {
  for (size_t i = 0; i < t.size(); ++i)
    if (!t.flat(i).is_zero()) return false;
  return true;
}

BuildOptions unchecked() {
  BuildOptions o;
  o.checked = false;
  return o;
}

bool invariant(const TheorySpec& t) { return is_total_divergence(vary(t.lagrangian, t.variation.field())).is_divergence; }

// ---------------------------------------------------------------- criteria

void cartan_killing_su2(Outcome& o) {
  const StructureConstants c = StructureConstants::su2();
  RMatrix k = cartan_killing(c);
  // Oracle: K_ab = -c^d_{ae} c^e_{bd} by brute-force contraction.
  RMatrix oracle(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int d = 0; d < 3; ++d)
        for (int e = 0; e < 3; ++e) oracle(a, b) -= c(d, a, e) * c(e, b, d);
  RMatrix two(3, 3);
  for (int a = 0; a < 3; ++a) two(a, a) = 2;
  o.require(k == two, "Cartan-Killing = 2 identity");
  o.require(oracle == two, "oracle = 2 identity");
  o.require(all_zero(jacobi_defect(c)), "Jacobi defect zero");
  o.detail << "K = 2*I exactly, Jacobi defect 0";
}

void torsion_prop(Outcome& o) {
  std::mt19937_64 rng(kSeed + 2);
  const StructureConstants su2 = StructureConstants::su2();
  int zero = 0;
  for (int trial = 0; trial < 50; ++trial)
    zero += torsion_from_potential(random_potential(rng, 3), su2, InternalSpace::identity(3)).is_zero();
  o.require(zero == 50, "su(2) torsion vanishes for all potentials");
  const StructureConstants sum = StructureConstants::direct_sum(su2, su2);
  std::vector<Rational> u(6, 0), w(6, 0);
  u[0] = 1;
  w[3] = 1;
  TorsionTensor q = torsion_from_potential(TorsionPotential::bivector(u, w), sum, InternalSpace(cartan_killing(sum)));
  o.require(!q.is_zero(), "abelian-pair bivector gives Q != 0");
  o.detail << zero << "/50 random su(2) potentials give Q = 0; su(2)+su(2) with e1^e4 gives Q != 0";
}

void gauge_invariance(Outcome& o) {
  DmaxScope scope(4);
  const InternalSpace k3 = InternalSpace::identity(3);
  const TorsionPotential p = TorsionPotential::bivector({1, 0, 0}, {0, 1, 0});
  int passed = 0, total = 0;
  for (int m : {0, 2})
    for (bool torsion : {false, true}) {
      TheorySpec t = torsion ? build_linear_abelian(k3, m, std::make_pair(vec3(0, 0, 1), p)) : build_linear_abelian(k3, m);
      ++total;
      passed += invariant(t);
    }
  for (int m : {0, 3}) {
    ++total;
    passed += invariant(build_ym_cs(StructureConstants::su2(), k3, 1, m));
  }
  o.require(passed == total, "all linear and YM-CS Lagrangians invariant");
  StructureConstants flipped = StructureConstants::su2();
  flipped.set(0, 1, 2, -1);
  bool flipped_invariant = invariant(build_ym_cs(flipped, k3, 1, 2, unchecked()));
  o.require(!flipped_invariant, "flipped structure constant breaks invariance");
  o.detail << passed << "/" << total << " invariant at D_max 4, n = 3; flipped sign -> not a divergence";
}

void combined_compat(Outcome& o) {
  const StructureConstants su2 = StructureConstants::su2();
  const InternalSpace k(cartan_killing(su2));
  for (int m : {1, 2, 5})
    o.require(check_combined_compat(su2, su2, k, m, Rational(1, m)).passed(), "su(2) pair at kappa = 1/m");
  const StructureConstants td = StructureConstants::translations_dilation();
  const InternalSpace id = InternalSpace::identity(3);
  KappaSolution sol = solve_combined_kappa(su2, td, id, 0);
  o.require(sol.kind != KappaSolution::Kind::NoSolution, "kappa solvable for su(2) with translations+dilation");
  Rational kappa = sol.kind == KappaSolution::Kind::Unique ? sol.kappa : Rational(1);
  o.require(check_combined_compat(su2, td, id, 0, kappa).passed(), "su(2) with translations+dilation at m = 0");
  ResidualReport massless = check_combined_compat(su2, su2, k, 0, 1);
  o.require(!massless.passed(), "su(2) pair at m = 0 has nonzero residual");
  o.detail << "zero at m = 1, 2, 5; translations+dilation at m = 0 with kappa "
           << (sol.kind == KappaSolution::Kind::Unique ? format_rational(kappa) : "unconstrained")
           << "; su(2) pair at m = 0: " << massless.entries.size() << " nonzero components";
}

void torsion_obstruction(Outcome& o) {
  std::mt19937_64 rng(kSeed + 5);
  const StructureConstants su2 = StructureConstants::su2();
  int passed = 0;
  for (int m : {1, 2, 3})
    for (int trial = 0; trial < 20; ++trial)
      passed += check_torsion_obstruction(su2, su2, random_potential(rng, 3), m, Rational(1, m)).passed();
  o.require(passed == 60, "obstruction passes for kappa = 1/m");
  o.require(solve_torsion_obstruction_massless(su2).empty(), "massless su(2) space is {0}");
  auto basis = solve_torsion_obstruction_massless(
      StructureConstants::direct_sum(su2, StructureConstants::abelian(2)));
  bool abelian_bivector = basis.size() == 1 && basis[0](3, 4) != 0;
  if (abelian_bivector)
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b)
        if (!((a == 3 && b == 4) || (a == 4 && b == 3)) && basis[0](a, b) != 0) abelian_bivector = false;
  o.require(abelian_bivector, "su(2)+u(1)^2 massless space is the abelian bivector");
  o.detail << passed << "/60 potentials pass at m = 1, 2, 3; su(2) massless space {0}; su(2)+u(1)^2 space spanned by e4^e5";
}

void hierarchy(Outcome& o) {
  const StructureConstants su2 = StructureConstants::su2();
  const InternalSpace k3 = InternalSpace::identity(3);
  HierarchyReport ym = verify_hierarchy(build_ym_cs(su2, k3, 1, 3), 2);
  o.require(ym.passed(), "YM-CS orders 0-2");
  bool closure = !ym.orders.empty() && ym.orders[0].zeta3.size() == 3;
  for (int a = 0; closure && a < 3; ++a) {
    Poly expect;
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) expect += zeta(1, b) * zeta(2, c) * su2(a, b, c);
    closure = ym.orders[0].zeta3[a] == expect;
  }
  o.require(closure, "order-0 closure parameter c zeta1 zeta2");
  TheorySpec ft = build_ft_truncated(su2, k3, 1, 3);
  HierarchyReport fr = verify_hierarchy(ft, ft.supported_order());
  o.require(fr.passed() && fr.max_order == 2, "FT orders 0-2 at N = 3");
  TheorySpec tor = build_torsion_ym_ft_cs(su2, TorsionPotential::bivector({1, 0, 0}, {0, 1, 0}), vec3(0, 0, 1), k3, 2, 1, 3);
  HierarchyReport tr = verify_hierarchy(tor, tor.supported_order());
  o.require(tr.passed() && tr.max_order == 2, "torsion YM-FT-CS orders 0-2 at N = 3");
  o.detail << "YM-CS 0-2 " << (ym.passed() ? "pass" : "fail") << ", FT 0-" << fr.max_order << " "
           << (fr.passed() ? "pass" : "fail") << ", torsion 0-" << tr.max_order << " " << (tr.passed() ? "pass" : "fail")
           << ", zeta3 = c zeta1 zeta2";
}

void quadratic_construction(Outcome& o) {
  const StructureConstants su2 = StructureConstants::su2();
  const InternalSpace k = InternalSpace::identity(3);
  const RMatrix H = linear_quadratic_form(k, TorsionPotential(3), Background{});
  for (int m : {0, 2}) {
    TheorySpec t = build_ym_cs(su2, k, 1, m);
    Theorem28Result r = theorem28_construct(Theorem28Seed::yang_mills(su2, 1), H, k, m);
    o.require(r.E2 == grade_part(t.field_equation, 2), "YM seed equals YM-CS grade 2");
  }
  TheorySpec ft = build_ft_truncated(su2, k, 1, 3);
  Theorem28Result r = theorem28_construct(Theorem28Seed::freedman_townsend(su2, k, 1), H, k, 0);
  ComponentTensor diff = sub(grade_part(ft.field_equation, 2), r.E2);
  OnShellMatch match = match_on_shell(diff, r.E1);
  o.require(match.matched, "FT seed equals FT grade 2 up to multiples of E1");
  Theorem28Result wrong = theorem28_construct(Theorem28Seed::freedman_townsend(su2, k, 2), H, k, 0);
  o.require(!match_on_shell(sub(grade_part(ft.field_equation, 2), wrong.E2), wrong.E1).matched,
            "wrong FT coupling is not equivalent");
  o.detail << "YM seed exact at m = 0, 2; FT seed equal modulo A-linear multiples of E1"
           << (is_zero(diff) ? " (identical)" : "") << "; coupling 2 rejected";
}

void noether(Outcome& o) {
  const StructureConstants su2 = StructureConstants::su2();
  const InternalSpace k3 = InternalSpace::identity(3);
  const TorsionPotential biv = TorsionPotential::bivector({1, 0, 0}, {0, 1, 0});
  TorsionPotential p2(2);
  p2.set(0, 1, 1);
  std::vector<TheorySpec> theories{
      build_linear_abelian(InternalSpace::identity(2), 1),
      build_ym_cs(su2, k3, 1, 3),
      build_ft_truncated(su2, k3, 1, 3),
      build_torsion_ym_ft_cs(su2, biv, vec3(0, 0, 1), k3, 2, 1, 2),
      build_gravity_like(KillingVectorSet::translations({vec3(1, 0, 0), vec3(0, 1, 0)}), InternalSpace::identity(2), p2,
                         vec3(1, 2, 0), 1, 3)};
  int zero = 0;
  for (const auto& t : theories) zero += zero_components(noether_residual(t));
  o.require(zero == static_cast<int>(theories.size()), "Noether identity residual vanishes");
  CurrentReport ym = check_current_and_stress(theories[1]);
  o.require(ym.rigid_identity, "YM-CS rigid current identity");
  CurrentReport with = check_current_and_stress(theories[3]);
  o.require(with.rigid_identity && with.current_on_shell && with.stress_on_shell, "torsion current and stress");
  o.require(with.torsion_present && !with.stress_symmetric, "antisymmetric stress with p != 0");
  CurrentReport without = check_current_and_stress(build_torsion_ym_ft_cs(su2, TorsionPotential(3), vec3(0, 0, 1), k3, 2, 1, 2));
  o.require(without.stress_on_shell && without.stress_symmetric, "symmetric stress with p = 0");
  o.detail << zero << "/" << theories.size() << " Noether residuals zero; dJ = E.U for YM-CS; T^[mu nu] "
           << (with.stress_symmetric ? "= 0" : "!= 0") << " with p, " << (without.stress_symmetric ? "= 0" : "!= 0")
           << " without";
}

void gravity(Outcome& o) {
  std::mt19937_64 rng(kSeed + 9);
  const auto three = KillingVectorSet::translations({vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1)});
  int unobstructed = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Background bg;
    bg.v = vec3(random_rational(rng), random_rational(rng), random_rational(rng));
    unobstructed += check_gravity_obstruction(three, bg).passed();
  }
  o.require(unobstructed == 20, "three translations pass for random v");
  const auto rot = KillingVectorSet::rotation_translation(1, 1);
  Background axis, off;
  axis.v = vec3(random_nonzero(rng), 0, 0);
  off.v = vec3(0, 1, 0);
  o.require(check_gravity_obstruction(rot, axis).passed(), "rotation+translation with axis-aligned v");
  ResidualReport bad = check_gravity_obstruction(rot, off);
  o.require(!bad.passed(), "off-axis v obstructed");
  TorsionPotential p(2);
  p.set(0, 1, 1);
  bool threw = false;
  try {
    build_gravity_like(rot, InternalSpace::identity(2), p, off.v, 1, 3);
  } catch (const ObstructionFailed&) {
    threw = true;
  }
  o.require(threw, "builder rejects off-axis v");
  int cubic = 0;
  for (const TheorySpec& t : {build_gravity_like(rot, InternalSpace::identity(2), p, axis.v, 1, 3),
                              build_gravity_like(KillingVectorSet::translations({vec3(1, 0, 0), vec3(0, 1, 0)}),
                                                 InternalSpace::identity(2), p, vec3(1, 2, 0), 1, 3)}) {
    InvarianceReport r = check_gauge_invariance(t);
    cubic += r.passed && r.discarded_min_grade == 4;
  }
  o.require(cubic == 2, "cubic-order invariance modulo grades > 3");
  o.detail << unobstructed << "/20 random v pass with three translations; axis-aligned pass; off-axis residual "
           << (bad.max_entry() ? format_rational(bad.max_entry()->value) : "0") << "; cubic invariance " << cubic << "/2";
}

DispersionProblem twist_problem(double scale, std::array<double, 3> dir) {
  DispersionProblem q;
  q.n = 2;
  q.m = 1;
  q.p = Eigen::MatrixXd::Zero(2, 2);
  q.p(0, 1) = 1;
  q.p(1, 0) = -1;
  q.v = {scale * dir[0], scale * dir[1], scale * dir[2]};
  q.kvec = {0.3, 0.7};
  return q;
}

PlaneWave superposition(const DispersionProblem& q) {
  PlaneWave w;
  w.prob = q;
  double amp = 1;
  for (std::array<double, 2> k : {q.kvec, std::array<double, 2>{-0.5, 0.2}}) {
    DispersionProblem qk = q;
    qk.kvec = k;
    for (const auto& b : dispersion_branches(qk).branches) {
      w.modes.push_back(PlaneWave::mode(qk, b, amp));
      amp *= 0.8;
    }
  }
  return w;
}

void dispersion(Outcome& o) {
  std::mt19937_64 rng(kSeed + 10);
  std::uniform_real_distribution<double> mass(0.2, 3), wave(-2, 2);
  double shell = 0;
  for (int trial = 0; trial < 20; ++trial) {
    DispersionProblem q;
    q.n = 1 + trial % 3;
    q.m = mass(rng);
    q.p = Eigen::MatrixXd::Zero(q.n, q.n);
    q.kvec = {wave(rng), wave(rng)};
    const double k2 = q.kvec[0] * q.kvec[0] + q.kvec[1] * q.kvec[1];
    for (const auto& b : dispersion_branches(q).branches)
      shell = std::max(shell, std::abs(b.omega * b.omega - q.m * q.m - k2));
  }
  o.require(shell <= kShellTol, "v = 0 branches on the mass shell");

  double odd = 0, align = 0, smallest = 1;
  bool flips = true;
  for (std::array<double, 3> dir : {std::array<double, 3>{0, 0, 1}, {1, 0, 0}, {0.3, -0.5, 0.4}}) {
    TwistSummary s = twist_summary(twist_problem(kOddEps, dir));
    odd = std::max(odd, s.odd_defect);
    flips = flips && s.sign_flips;
    for (const auto& e : s.entries) smallest = std::min(smallest, std::abs(e.shift_plus));
    align = std::max(align, twist_summary(twist_problem(0.7, dir)).max_misalignment);
  }
  o.require(odd <= kOddTol && odd <= kOddRelTol * smallest && flips, "shift odd under v -> -v");
  o.require(align <= kAlignTol, "polarizations in P eigenspaces");

  double worst = 0;
  for (std::array<double, 3> dir : {std::array<double, 3>{1, 0, 0}, {0, 0, 1}, {0.3, -0.5, 0.4}}) {
    FdConvergence c = current_fd_check(superposition(twist_problem(0.6, dir)), 0.1);
    o.require(!c.exact_zero, "FD field is nontrivial");
    worst = std::max({worst, std::abs(c.current_slope - kSlopeTarget), std::abs(c.stress_slope - kSlopeTarget)});
  }
  o.require(worst <= kSlopeTol, "FD divergence converges at order h^2");
  o.detail << "shell deviation " << shell << "; odd defect " << odd << " vs |shift| >= " << smallest
           << "; misalignment " << align << "; FD slope within " << worst << " of 2";
}

void falsification(Outcome& o) {
  ScanOptions opt;
  opt.trials = kCampaignViolations;
  opt.count_violations = true;
  std::ostringstream parts;
  for (Campaign c : all_campaigns()) {
    ScanSummary s = run_campaign(c, kSeed, opt).summary();
    o.require(s.violations >= kCampaignViolations, campaign_name(c) + " reached 200 violations");
    o.require(s.spurious_passes == 0, campaign_name(c) + " spurious passes");
    o.require(s.control_failures == 0, campaign_name(c) + " control failures");
    parts << " " << campaign_name(c) << " " << s.violations << "/" << s.spurious_passes << "/" << s.controls;
  }
  o.detail << "violations/spurious/controls:" << parts.str();
}

struct Criterion {
  int id;
  const char* name;
  double limit;  // seconds; 0 when the criterion has no runtime bound
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Cartan-Killing and Jacobi for su(2)", kLimit1, cartan_killing_su2},
      {2, "torsion from potential", kLimit2, torsion_prop},
      {3, "exact gauge invariance", kLimit3, gauge_invariance},
      {4, "combined compatibility", 0, combined_compat},
      {5, "torsion obstruction", 0, torsion_obstruction},
      {6, "deformation hierarchy", kLimit6, hierarchy},
      {7, "cross-validation of the quadratic construction", 0, quadratic_construction},
      {8, "Noether identities, currents and stress", 0, noether},
      {9, "gravity-like obstruction", 0, gravity},
      {10, "plane-wave dispersion", kLimit10, dispersion},
      {11, "falsification campaigns", 0, falsification},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit > 0) o.require(secs < c.limit, "runtime limit");
    char timing[64];
    if (c.limit > 0) std::snprintf(timing, sizeof timing, "%.2fs < %gs", secs, c.limit);
    else std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::printf("%s %2d %s (%s): %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, timing, o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
