#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deformatics/errors.hpp"
#include "deformatics/rational.hpp"
#include "deformatics/tensor.hpp"

namespace deformatics {

/// Internal vector space with metric k_{ab}. Indices are zero-based in code, one-based in reports.
class InternalSpace {
 public:
  InternalSpace() = default;
  /// Throws PreconditionError unless k is square, symmetric and nondegenerate.
  explicit InternalSpace(RMatrix k);
  static InternalSpace identity(int n);

  int n() const { return k_.rows(); }
  const RMatrix& k() const { return k_; }
  const RMatrix& k_inv() const { return kinv_; }
  const Rational& k(int a, int b) const { return k_(a, b); }
  const Rational& kinv(int a, int b) const { return kinv_(a, b); }

 private:
  RMatrix k_, kinv_;
};

/// c^a_{bc}, antisymmetric in the lower pair.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int n);
  /// Throws PreconditionError if c^a_{bc} != -c^a_{cb}.
  explicit StructureConstants(RTensor c);
  /// Skips the antisymmetry check. Used for falsification runs.
  static StructureConstants unchecked(RTensor c);

  static StructureConstants su2();
  static StructureConstants abelian(int n);
  /// [e1,e3] = e1, [e2,e3] = e2.
  static StructureConstants translations_dilation();
  static StructureConstants direct_sum(const StructureConstants& x, const StructureConstants& y);

  int n() const { return n_; }
  const Rational& operator()(int a, int b, int c) const { return c_({a, b, c}); }
  /// Sets c^a_{bc} and c^a_{cb} = -value.
  void set(int a, int b, int c, const Rational& value);
  const RTensor& tensor() const { return c_; }
  bool is_antisymmetric() const;
  StructureConstants scaled(const Rational& s) const;

 private:
  int n_ = 0;
  RTensor c_;
};

class TorsionPotential {
 public:
  TorsionPotential() = default;
  explicit TorsionPotential(int n) : p_(n, n) {}
  /// Throws PreconditionError unless antisymmetric.
  explicit TorsionPotential(RMatrix p);
  /// p = u ∧ w, i.e. p_{ab} = u_a w_b - w_a u_b.
  static TorsionPotential bivector(const std::vector<Rational>& u, const std::vector<Rational>& w);

  int n() const { return p_.rows(); }
  const RMatrix& matrix() const { return p_; }
  const Rational& operator()(int a, int b) const { return p_(a, b); }
  void set(int a, int b, const Rational& value);
  bool is_zero() const { return p_.is_zero(); }

 private:
  RMatrix p_;
};

class TorsionTensor {
 public:
  explicit TorsionTensor(RTensor q);
  int n() const { return q_.shape()[0]; }
  const Rational& operator()(int a, int b, int c) const { return q_({a, b, c}); }
  const RTensor& tensor() const { return q_; }
  bool is_zero() const { return all_zero(q_); }

 private:
  RTensor q_;
};

struct ResidualEntry {
  std::string relation;
  std::vector<int> index;  // one-based labels
  Rational value;
};

/// Nonzero residual components of one or more named relations.
struct ResidualReport {
  std::vector<std::string> relations;
  std::vector<ResidualEntry> entries;

  bool passed() const { return entries.empty(); }
  std::optional<ResidualEntry> max_entry() const;
  void add_tensor(const std::string& relation, const RTensor& t);
  void merge(const ResidualReport& other);
  std::string summary() const;
};

class AlgebraRejected : public Error {
 public:
  AlgebraRejected(const std::string& what, ResidualReport report)
      : Error(what + ": " + report.summary()), report_(std::move(report)) {}
  const ResidualReport& report() const { return report_; }

 private:
  ResidualReport report_;
};

class ObstructionFailed : public Error {
 public:
  ObstructionFailed(const std::string& what, ResidualReport report)
      : Error(what + ": " + report.summary()), report_(std::move(report)) {}
  const ResidualReport& report() const { return report_; }

 private:
  ResidualReport report_;
};

/// Full antisymmetrization with 1/k! weight over the listed tensor slots.
RTensor antisymmetrize(const RTensor& t, const std::vector<int>& slots);
/// Symmetrization with 1/k! weight.
RTensor symmetrize(const RTensor& t, const std::vector<int>& slots);

/// J^e_{abc} = c^d_{[bc} c^e_{a]d}, stored with index order (e, a, b, c).
RTensor jacobi_defect(const StructureConstants& c);
/// k_{ab} = -c^d_{ac} c^c_{bd}.
RMatrix cartan_killing(const StructureConstants& c);
/// c_{abc} = k_{ad} c^d_{bc}.
RTensor lower_first(const StructureConstants& c, const InternalSpace& k);

ResidualReport check_ym_relations(const StructureConstants& c, const InternalSpace& k);

/// Co-adjoint tensor of the FT structure constants f with respect to k:
/// B^a_{cd} = k^{ab} k_{de} f^e_{bc}. This is the tensor entering δA^a = κ B^a_{cd} K^c ζ^d.
RTensor ft_coadjoint(const StructureConstants& f, const InternalSpace& k);
/// Residuals of the FT relations for structure constants f on (V, k).
ResidualReport check_ft_relations(const StructureConstants& f, const InternalSpace& k);

TorsionTensor torsion_from_potential(const TorsionPotential& p, const StructureConstants& c,
                                     const InternalSpace& k);

/// Residual R_{abcd} of the combined YM/FT compatibility relation, index order (a, b, c, d).
RTensor combined_compat_residual(const StructureConstants& a, const StructureConstants& b,
                                 const InternalSpace& k, const Rational& m, const Rational& kappa);
ResidualReport check_combined_compat(const StructureConstants& a, const StructureConstants& b,
                                     const InternalSpace& k, const Rational& m, const Rational& kappa);

/// Outcome of solving the combined relation for κ.
struct KappaSolution {
  enum class Kind { Unique, Unconstrained, NoSolution } kind = Kind::NoSolution;
  Rational kappa;
};
KappaSolution solve_combined_kappa(const StructureConstants& a, const StructureConstants& b,
                                   const InternalSpace& k, const Rational& m);

/// R_{abc} = p_{d[a}(a^d_{b]c} - m κ b^d_{b]c}).
RTensor torsion_obstruction_residual(const StructureConstants& a, const StructureConstants& b,
                                     const TorsionPotential& p, const Rational& m, const Rational& kappa);
ResidualReport check_torsion_obstruction(const StructureConstants& a, const StructureConstants& b,
                                         const TorsionPotential& p, const Rational& m,
                                         const Rational& kappa);

/// Basis of { p antisymmetric : p_{d[a} a^d_{b]c} = 0 }.
std::vector<TorsionPotential> solve_torsion_obstruction_massless(const StructureConstants& a);

}  // namespace deformatics
