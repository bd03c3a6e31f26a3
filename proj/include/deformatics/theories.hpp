#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "deformatics/ansatz.hpp"
#include "deformatics/jet.hpp"
#include "deformatics/liealg.hpp"

namespace deformatics {

enum class Model { Linear, YmCs, Ft, TorsionYmFtCs, Gravity };
std::string model_name(Model m);

/// Commuting flat-space Killing vectors ξ^μ_a, affine in x.
struct KillingVectorSet {
  enum class Kind { Translations, RotationTranslation, BoostTranslation, Custom };
  Kind kind = Kind::Custom;
  std::vector<std::array<jet::Poly, jet::kDim>> xi;

  int n() const { return static_cast<int>(xi.size()); }
  /// One constant vector per internal index.
  static KillingVectorSet translations(const std::vector<std::array<Rational, jet::kDim>>& dirs);
  /// Rotation in the x1-x2 plane (axis x0) with rate w, and a translation t along x0.
  static KillingVectorSet rotation_translation(const Rational& w, const Rational& t);
  /// Boost in the x0-x1 plane (axis x2) with rate w, and a translation t along x2.
  static KillingVectorSet boost_translation(const Rational& w, const Rational& t);
  /// ∂_ν ξ^μ_a (constant for affine fields).
  Rational gradient(int a, int mu, int nu) const;
  /// Throws KillingCheckFailed unless affine, Killing and pairwise commuting.
  void validate() const;
};

/// v^β ∂_[α ξ_β]a for every (α, a); zero iff the gravity-like deformation is unobstructed.
ResidualReport check_gravity_obstruction(const KillingVectorSet& kvs, const jet::Background& bg);

struct TheorySpec {
  std::string name;
  Model model = Model::Linear;
  int n = 0;
  jet::Background background;
  InternalSpace k;
  StructureConstants a;  // YM / CS structure constants
  StructureConstants b;  // FT structure constants
  TorsionPotential p;
  Rational m = 0, kappa = 0, kappa_ft = 0;
  std::optional<KillingVectorSet> killing;

  jet::Poly lagrangian;                  // grades 2..N+1 (all grades when exact)
  jet::GaugeVariation variation;         // grades 0..N
  jet::ComponentTensor field_equation;   // EL of the Lagrangian, grades 1..N
  int truncation_order = -1;             // -1 for exact polynomial theories

  bool exact() const { return truncation_order < 0; }
  /// Highest hierarchy order whose equation only involves stored grades.
  int supported_order() const;
  std::vector<jet::GradedPiece> lagrangian_grades() const { return jet::grade_by_field_power(lagrangian); }
};

struct BuildOptions {
  bool checked = true;                      // run algebra preconditions
  std::optional<Rational> kappa_ft;         // override κ_FT = κ/m (unchecked runs only)
};

/// 3n×3n matrix C^{aν}_{μb} = δ^a_b δ^ν_μ + p^a_b v^ν_μ, rows a*3+μ, columns b*3+ν.
RMatrix torsion_frame(const InternalSpace& k, const TorsionPotential& p, const jet::Background& bg);
/// Quadratic form H with L = ½ *F·H·*F for the linear theory: H = (η⊗k) C⁻¹.
/// Throws DegenerateInnerProduct if C is singular.
RMatrix linear_quadratic_form(const InternalSpace& k, const TorsionPotential& p, const jet::Background& bg);
/// g̃ = η^{μν}k_{ab} + v^{μν}p_{ab} as a 3n×3n matrix (rows a*3+μ).
RMatrix torsion_inner_product(const InternalSpace& k, const TorsionPotential& p, const jet::Background& bg);

/// *F^a_μ = ε_μ^{αβ} ∂_α A^a_β, flat index a*3+μ.
std::vector<jet::Poly> dual_field_strength(int n);

TheorySpec build_linear_abelian(const InternalSpace& k, const Rational& m,
                                const std::optional<std::pair<std::array<Rational, 3>, TorsionPotential>>& torsion = {});
TheorySpec build_ym_cs(const StructureConstants& a, const InternalSpace& k, const Rational& kappa, const Rational& m,
                       const BuildOptions& opt = {});
TheorySpec build_ft_truncated(const StructureConstants& b, const InternalSpace& k, const Rational& kappa, int N,
                              const BuildOptions& opt = {});
TheorySpec build_torsion_ym_ft_cs(const StructureConstants& c, const TorsionPotential& p, const std::array<Rational, 3>& v,
                                  const InternalSpace& k, const Rational& m, const Rational& kappa, int N,
                                  const BuildOptions& opt = {});
TheorySpec build_gravity_like(const KillingVectorSet& kvs, const InternalSpace& k, const TorsionPotential& p,
                              const std::array<Rational, 3>& v, const Rational& m, int N, const BuildOptions& opt = {});

/// Replaces the variation of a theory (used for deliberate mismatch runs); E and L are kept.
TheorySpec with_variation(const TheorySpec& t, const jet::GaugeVariation& v, const std::string& name);

/// K̃ = Ỹ⁻¹ *F_A of the torsion YM-FT-CS theory (flat index a*3+μ), truncated at grade N.
std::vector<jet::Poly> torsion_connection(const TheorySpec& t);

// ---------------------------------------------------------------- verification

struct NamedResidual {
  std::string label;
  jet::Poly value;
};

enum class ClosureMode { OffShell, OnShell, Failed, Inconclusive };
std::string closure_mode_name(ClosureMode m);

struct OrderReport {
  int order = 0;
  std::vector<NamedResidual> lie_residual;      // nonzero components of the graded Lie-derivative equation
  std::vector<NamedResidual> curl_residual;     // nonzero components of the curl of the closure deviation
  ClosureMode closure = ClosureMode::Failed;
  std::vector<jet::Poly> zeta3;                 // extracted grade-`order` commutator parameter
  std::vector<NamedResidual> closure_residual;  // deviation left after reduction
  bool lie_passed() const { return lie_residual.empty(); }
  bool passed() const { return lie_passed() && (closure == ClosureMode::OffShell || closure == ClosureMode::OnShell); }
};

struct HierarchyReport {
  std::string theory;
  int max_order = 0;
  std::vector<OrderReport> orders;
  bool passed() const;
  /// First failing order or -1.
  int first_failure() const;
};

struct HierarchyOptions {
  int multiplier_degree = 2;
  size_t max_candidates = 40000;
};

/// Graded Lie-derivative and commutator determining equations at orders 0..max_order.
HierarchyReport verify_hierarchy(const TheorySpec& t, int max_order, const HierarchyOptions& opt = {});

struct ClosureResult {
  jet::ComponentTensor residual;   // shape {n, 3}, after reduction
  std::vector<jet::Poly> zeta3;    // grade-`order` part of ζ3
  ClosureMode mode = ClosureMode::Failed;
};
/// [δ1,δ2]A − δ_{ζ3}A at the given grade, reduced modulo field-equation multiples.
/// Throws MultiplierSearchInconclusive when no decomposition exists within the bounds.
ClosureResult closure_residual(const TheorySpec& t, int order, const HierarchyOptions& opt = {});

/// Grade-k part of vary(L, δ), checked for being a total divergence at every grade <= N.
struct InvarianceReport {
  bool passed = true;
  int failing_grade = -1;
  int discarded_min_grade = -1;  // minimum grade of the discarded remainder (truncated theories)
  std::vector<std::pair<std::string, jet::Poly>> witness;
};
InvarianceReport check_gauge_invariance(const TheorySpec& t);

/// Grade-graded Noether identity residual E_ζ(Σ E·δA) up to the checked grade.
jet::ComponentTensor noether_residual(const TheorySpec& t);

struct UniquenessReport {
  int monomials = 0;
  int invariant_dimension = 0;   // gauge-invariant cubic Lagrangians modulo nothing
  int nonzero_field_equations = 0;
  bool unique() const { return nonzero_field_equations == 0; }
};
/// Any δ⁽⁰⁾-invariant cubic Lagrangian with at most `weight` derivatives has identically vanishing EL.
UniquenessReport uniqueness_probe(int n, int weight = 1);

// ---------------------------------------------------------------- quadratic deformation construction at p = 1

/// u0^a_{bc} (index order a, b, c), skew in (b, c); u1^{α1α2 a}_{μ b c} (index order α1, α2, a, μ, b, c).
struct Theorem28Seed {
  RTensor u0;
  RTensor u1;
  static Theorem28Seed zero(int n);
  /// U1^a_{μb} = κ a^a_{cb} A^c_μ.
  static Theorem28Seed yang_mills(const StructureConstants& a, const Rational& kappa);
  /// U1^a_{μb} = κ B^a_{cb} *F^c_μ with B the co-adjoint tensor.
  static Theorem28Seed freedman_townsend(const StructureConstants& b, const InternalSpace& k, const Rational& kappa);
};

struct Theorem28Result {
  jet::ComponentTensor E1;      // {n, 3}: linear field equation
  jet::ComponentTensor E2;      // {n, 3}
  jet::ComponentTensor U1;      // {n, 3, n}: U1^a_{μb}
  jet::ComponentTensor U2;      // {n, 3, n}
  jet::ComponentTensor Omega2;  // {n, 3, 3}: Ω2^c_{α1α2}
  jet::GaugeVariation variation;  // ∂ζ + U1 ζ + U2 ζ
};

/// Decomposition of a quadratic field-equation difference into terms vanishing on E1 = 0.
struct OnShellMatch {
  bool matched = false;
  std::vector<jet::Poly> multiples;  // Σ M·E1 at index a*3+μ, M linear in undifferentiated A
};
/// Solves target = M·E1 with multipliers linear in undifferentiated A.
OnShellMatch match_on_shell(const jet::ComponentTensor& target, const jet::ComponentTensor& E1);

/// Curl Φ^c_{αβ} = ∂_[β A^c_α] in the construction's convention.
jet::Poly theorem28_curl(int c, int alpha, int beta);
/// Builds E⁽²⁾, U⁽²⁾, Ω⁽²⁾ for the linear theory with quadratic form H and CS mass m.
Theorem28Result theorem28_construct(const Theorem28Seed& seed, const RMatrix& H, const InternalSpace& k,
                                    const Rational& m);

// ---------------------------------------------------------------- currents

struct CurrentReport {
  bool rigid_identity = false;                 // ∂J = Σ E·U_rigid at checked grades
  std::array<jet::Poly, 3> rigid_current;
  bool current_on_shell = false;         // torsion theory only
  bool stress_on_shell = false;                // torsion theory only
  bool stress_symmetric = false;
  bool torsion_present = false;
  std::vector<std::string> notes;
};
/// Rigid Noether current identity; for the torsion theory also the explicit current and stress tensor.
CurrentReport check_current_and_stress(const TheorySpec& t, const HierarchyOptions& opt = {});

/// Explicit torsion-theory current J^μ_a = ½κ_FT c_{abc} ε^{μνα} K̃^b_ν K̃^c_α + m g̃^{μν}_{ab} K̃^b_ν (index a*3+μ)
/// and stress tensor T_{μν} (index μ*3+ν, divergence on the first index).
std::vector<jet::Poly> torsion_current(const TheorySpec& t);
std::vector<jet::Poly> torsion_stress(const TheorySpec& t);

}  // namespace deformatics
