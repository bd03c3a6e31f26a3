#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deformatics/errors.hpp"
#include "deformatics/liealg.hpp"

namespace deformatics {

/// Raised by strict dispersion solves when two root clusters are closer than the separation tolerance.
class RootConditioningWarning : public Error {
 public:
  using Error::Error;
};

/// Linear torsion theory data for plane waves F̃ = ε exp(i k_α x^α), k_α = (−ω, k1, k2).
struct DispersionProblem {
  int n = 1;
  double m = 0;
  std::array<double, 3> v{0, 0, 0};  // v^α, same convention as the exact background
  Eigen::MatrixXd p;                 // skew n×n, p_{ab}
  Eigen::MatrixXd k;                 // internal metric k_{ab}; identity when empty
  std::array<double, 2> kvec{0, 0};  // spatial wave vector

  /// Throws PreconditionError unless dimensions match and p is skew to 1e-12.
  void validate() const;
  Eigen::MatrixXd metric() const;
  /// P = k⁻¹p acting on internal indices.
  Eigen::MatrixXd internal_twist() const;
};

struct WaveTolerances {
  double residual = 1e-10;          // ‖M ε‖ ≤ residual·‖M‖
  double cluster = 1e-3;            // candidate degenerate cluster radius (relative), accepted only if the
                                    // null space has full dimension at the cluster mean
  double separation = 1e-8;         // unresolved roots closer than this raise a conditioning warning
  double coefficient_trim = 1e-11;  // relative cutoff for vanishing leading coefficients
};

/// 3n×3n matrix with M·ε = 0 iff F̃ = ε exp(i k·x) solves curl F̃ + m C F̃ = 0, where
/// C = 1 + P⊗v is the constant torsion frame. Rows and columns use the flat index a*3+μ.
Eigen::MatrixXcd planewave_operator(const DispersionProblem& prob, std::complex<double> omega);

/// Operator used for root finding and polarizations: M itself for m ≠ 0; for m = 0, M plus the
/// Lorenz term (ik_μ)(ik^ν) per internal index, which removes the pure-gauge kernel of the curl.
Eigen::MatrixXcd dispersion_operator(const DispersionProblem& prob, std::complex<double> omega);

/// Coefficients c_0..c_d (ascending) of det dispersion_operator(ω), from evaluation on a circle.
std::vector<std::complex<double>> determinant_polynomial(const DispersionProblem& prob, const WaveTolerances& tol = {});

struct Branch {
  std::complex<double> omega;
  Eigen::VectorXcd polarization;  // unit norm, flat index a*3+μ
  double residual = 0;            // ‖M ε‖ / ‖M‖
  double constraint = 0;          // |k^μ (C ε)_μ| summed over internal indices, relative to |k|
};

struct DispersionResult {
  std::vector<Branch> branches;  // sorted by real part of ω
  std::vector<std::complex<double>> coefficients;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;  // defective roots: fewer polarizations than the root multiplicity
};

/// All roots of det M(ω) with null-space polarizations. A degenerate root yields one branch per null vector.
/// With strict = true a conditioning warning is thrown as RootConditioningWarning.
DispersionResult dispersion_branches(const DispersionProblem& prob, const WaveTolerances& tol = {}, bool strict = false);

/// Relative norm of the polarization outside the P-eigenspace it is closest to (0 when aligned).
double polarization_misalignment(const DispersionProblem& prob, const Branch& b, std::complex<double>* eigenvalue = nullptr);

/// ω minus the untwisted shell root sign(Re ω)·sqrt(m² + |k⃗|²).
double twist_shift(const DispersionProblem& prob, const Branch& b);

/// Shift of the branches in one P-eigenspace with one frequency sign, at v and at −v.
struct TwistEntry {
  double eigenvalue = 0;  // Im of the P eigenvalue
  int omega_sign = 1;
  double shift_plus = 0;
  double shift_minus = 0;
  double slope = 0;       // d shift / d s along v → s v at s = 0
};

struct TwistSummary {
  std::vector<TwistEntry> entries;  // sorted by (eigenvalue, omega_sign)
  double odd_defect = 0;            // max |shift(v) + shift(−v)|, second order in v
  double max_misalignment = 0;
  /// Every nonzero shift changes sign under v → −v.
  bool sign_flips = true;
};

/// Twist shifts paired by eigenspace, with the slope from central differences of step `slope_step`.
TwistSummary twist_summary(const DispersionProblem& prob, double slope_step = 1e-6, const WaveTolerances& tol = {});

struct SweepRow {
  double knorm = 0;
  std::vector<double> omega;  // real parts, ascending
};
/// Branches for |k⃗| = kmax·i/steps along the direction of prob.kvec (x axis when zero).
std::vector<SweepRow> dispersion_sweep(const DispersionProblem& prob, double kmax, int steps, const WaveTolerances& tol = {});
/// CSV with header "k,omega_1,...,omega_d".
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Field data at one event for the Ỹ-map of the torsion YM-FT-CS theory.
struct PointState {
  StructureConstants c;
  InternalSpace k;
  TorsionPotential p;
  std::array<Rational, 3> v{0, 0, 0};
  double kappa_ft = 0;          // FT coupling κ/m
  std::vector<double> A;        // A^a_μ, flat index a*3+μ
  std::vector<double> star_f;   // *F_A sample, flat index a*3+μ
};

struct YmapSolution {
  std::vector<double> K;       // K̃ with Ỹ K̃ = *F_A
  double residual = 0;         // ‖Ỹ K̃ − *F_A‖
  double det = 0;              // det Ỹ
  std::vector<double> series;  // Neumann series Σ_{j≤order} (C⁻¹X)^j C⁻¹ *F_A
  double series_difference = 0;
};

/// Ỹ = C − X(A) with X^{aμ}_{bν} = κ_FT B^a_{bc} ε_μ^{να} A^c_α, B the co-adjoint tensor.
Eigen::MatrixXd ymap_matrix(const PointState& s);
/// Direct solve of Ỹ K̃ = *F_A with a Neumann cross-check. Throws SingularY when |det Ỹ| < det_tolerance.
YmapSolution ymap_invert(const PointState& s, int series_order = 6, double det_tolerance = 1e-12);

/// One plane wave ε exp(i k_α x^α) with k_α = (−ω, k⃗).
struct WaveMode {
  std::complex<double> omega;
  Eigen::VectorXcd polarization;
  std::array<double, 2> kvec{0, 0};
  double amplitude = 1;
};

/// Real superposition F̃ = Re Σ amplitude·ε exp(i k·x) of modes of the linear torsion theory.
/// A nonzero detune shifts every ω, which takes the family off shell.
struct PlaneWave {
  DispersionProblem prob;
  std::vector<WaveMode> modes;
  double detune = 0;
  /// Mode from a dispersion branch at prob.kvec.
  static WaveMode mode(const DispersionProblem& prob, const Branch& b, double amplitude = 1);
};

struct FdConvergence {
  std::vector<double> h;
  std::vector<double> current_divergence;  // max |∂_μ J^μ_a| over sample points
  std::vector<double> stress_divergence;   // max |∂^μ T_{μν}| over sample points
  double current_slope = 0;                // log2 ratio of the last two levels
  double stress_slope = 0;
  bool exact_zero = false;
  /// Both slopes within slope_tolerance of 2, or identically zero.
  bool converges(double slope_tolerance = 0.1) const;
};

/// Central-difference divergence of J^μ_a = m g̃^{μν}_{ab} F̃^b_ν and of
/// T_{μν} = k(F̃_μF̃_ν − ½η_{μν}F̃·F̃) − ½p_{ab}ε_μ^{αβ}v_ν F̃^a_αF̃^b_β at h0, h0/2, ..., h0/2^(levels−1).
FdConvergence current_fd_check(const PlaneWave& wave, double h0, int levels = 4);

}  // namespace deformatics
