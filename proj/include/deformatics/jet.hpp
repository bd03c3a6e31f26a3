#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deformatics/errors.hpp"
#include "deformatics/rational.hpp"
#include "deformatics/tensor.hpp"

namespace deformatics::jet {

constexpr int kDim = 3;
constexpr int kMaxInternal = 32;
constexpr int kMaxDmax = 15;

/// Maximum derivative order of any jet variable; exceeding it raises DerivativeOrderOverflow.
int dmax();
void set_dmax(int d);

/// RAII override of D_max for the current scope (process-wide).
class DmaxScope {
 public:
  explicit DmaxScope(int d) : saved_(dmax()) { set_dmax(d); }
  ~DmaxScope() { set_dmax(saved_); }
  DmaxScope(const DmaxScope&) = delete;
  DmaxScope& operator=(const DmaxScope&) = delete;

 private:
  int saved_;
};

/// Field A, gauge parameters ζ1..ζ3, rigid (constant) parameter, coordinates x.
enum class Family : uint8_t { A = 0, Z1 = 1, Z2 = 2, Z3 = 3, Rigid = 4, X = 5 };

inline bool is_parameter(Family f) { return f == Family::Z1 || f == Family::Z2 || f == Family::Z3; }
inline Family zeta_family(int s) { return static_cast<Family>(s); }

/// A jet coordinate. form is the spacetime slot of A (and of x); counts[ν] is the number of ∂_ν.
struct Var {
  Family family = Family::A;
  int internal = 0;
  int form = 0;
  std::array<int, kDim> counts{0, 0, 0};

  int order() const { return counts[0] + counts[1] + counts[2]; }
  uint32_t key() const;
  static Var from_key(uint32_t key);
  /// Sorted derivative multi-index, e.g. {0,0,2}.
  std::vector<int> multi_index() const;
  std::string name() const;
  bool operator==(const Var& o) const { return key() == o.key(); }
};

inline Family key_family(uint32_t key) { return static_cast<Family>(key >> 24); }
/// Base key with derivative counts stripped.
uint32_t key_base(uint32_t key);
int key_order(uint32_t key);
std::array<int, kDim> key_counts(uint32_t key);
/// Key of ∂_ν applied to the variable; throws DerivativeOrderOverflow past D_max.
uint32_t key_lift(uint32_t key, int nu);
/// Weight used for ansatz bookkeeping: derivative order, or -1 for a coordinate.
int key_weight(uint32_t key);

/// Sorted multiset of jet-variable keys.
class Monomial {
 public:
  static constexpr int kCapacity = 16;

  Monomial() = default;
  static Monomial of(uint32_t key, int power = 1);

  int degree() const { return n_; }
  uint32_t operator[](int i) const { return k_[i]; }
  const uint32_t* begin() const { return k_.data(); }
  const uint32_t* end() const { return k_.data() + n_; }
  bool empty() const { return n_ == 0; }

  Monomial operator*(const Monomial& o) const;
  /// Removes one copy of key at position i.
  Monomial without(int i) const;
  Monomial with(uint32_t key) const;
  int count(uint32_t key) const;
  int grade() const;  // number of A-family factors
  int family_degree(Family f) const;
  int weight() const;
  bool has_family(Family f) const;

  bool operator==(const Monomial& o) const;
  bool operator<(const Monomial& o) const;
  size_t hash() const;

 private:
  uint8_t n_ = 0;
  std::array<uint32_t, kCapacity> k_{};
};

struct MonomialHash {
  size_t operator()(const Monomial& m) const { return m.hash(); }
};

struct Term {
  Monomial mono;
  Rational coef;
};

/// Sparse exact-rational polynomial in jet variables. Terms are kept sorted, no zero coefficients.
class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c);  // NOLINT(implicit)
  Poly(int c) : Poly(Rational(c)) {}  // NOLINT(implicit)
  static Poly variable(const Var& v);
  static Poly monomial(const Monomial& m, const Rational& c);
  /// Takes ownership of arbitrary terms and canonicalizes them.
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& c);
  Poly operator*(const Rational& c) const;

  int max_grade() const;  // -1 for zero
  int min_grade() const;  // -1 for zero
  Poly grade_part(int g) const;
  Poly truncate(int max_grade) const;
  Poly high_part(int min_grade) const;
  bool has_family(Family f) const;
  int max_family_degree(Family f) const;
  std::vector<uint32_t> variables() const;
  Rational coefficient(const Monomial& m) const;

  std::string to_string() const;
  static Poly parse(std::string_view text);
  double evaluate(const std::function<double(uint32_t)>& value) const;

  /// Applies a key map; keys mapped to 0 kill the term.
  Poly map_keys(const std::function<uint32_t(uint32_t)>& f) const;

 private:
  std::vector<Term> terms_;
};

inline Poly operator*(const Rational& c, const Poly& p) { return p * c; }

/// Product keeping only terms of grade <= max_grade (max_grade < 0 keeps all).
Poly mul_trunc(const Poly& a, const Poly& b, int max_grade);

/// Accumulates terms in a hash map; build() canonicalizes.
class PolyBuilder {
 public:
  void add(const Monomial& m, const Rational& c);
  void add(const Poly& p, const Rational& scale = 1);
  /// Adds scale * m * p, dropping terms above max_grade when max_grade >= 0.
  void add_product(const Monomial& m, const Rational& scale, const Poly& p, int max_grade = -1);
  void add_product(const Poly& a, const Poly& b, int max_grade = -1, const Rational& scale = 1);
  Poly build();
  bool empty() const;

 private:
  std::unordered_map<Monomial, Rational, MonomialHash> acc_;
};

// ---------------------------------------------------------------- variable helpers

Poly A(int a, int mu);
Poly dA(int a, int mu, std::initializer_list<int> dirs);
Poly zeta(int s, int a);
Poly dzeta(int s, int a, std::initializer_list<int> dirs);
Poly rigid(int a);
Poly x(int mu);

// ---------------------------------------------------------------- background

/// Flat 3D Minkowski background: η = diag(-1,1,1), ε_{012} = +1, constant torsion vector v^μ.
struct Background {
  std::array<Rational, kDim> v{0, 0, 0};

  static int eta(int mu, int nu) { return mu != nu ? 0 : (mu == 0 ? -1 : 1); }
  static int eta_inv(int mu, int nu) { return eta(mu, nu); }
  static int eps_lower(int mu, int nu, int al);
  static int eps_upper(int mu, int nu, int al) { return -eps_lower(mu, nu, al); }
  /// ε_μ^{αβ}
  static int eps_mixed(int mu, int al, int be) { return eps_lower(mu, al, be) * eta(al, al) * eta(be, be); }
  Rational v_lower(int mu) const { return v[mu] * eta(mu, mu); }
  /// v_{μν} = ε_{μνα} v^α
  Rational v2_lower(int mu, int nu) const;
  /// v^{μν} = ε^{μνα} v_α
  Rational v2_upper(int mu, int nu) const;
  /// v^ν_μ = g_{μα} v^{αν}
  Rational v2_mixed(int mu, int nu) const;
  bool v_is_zero() const { return v[0] == 0 && v[1] == 0 && v[2] == 0; }
};

// ---------------------------------------------------------------- tensors and variations

using ComponentTensor = DenseTensor<Poly>;

/// δA^a_μ for every field component, stored at index a*3 + μ.
class FieldVariation {
 public:
  FieldVariation() = default;
  explicit FieldVariation(int n) : n_(n), comp_(static_cast<size_t>(n) * kDim) {}

  int n() const { return n_; }
  Poly& operator()(int a, int mu) { return comp_[static_cast<size_t>(a) * kDim + mu]; }
  const Poly& operator()(int a, int mu) const { return comp_[static_cast<size_t>(a) * kDim + mu]; }
  Poly& flat(int i) { return comp_[i]; }
  const Poly& flat(int i) const { return comp_[i]; }
  int size() const { return static_cast<int>(comp_.size()); }

  bool is_zero() const;
  std::vector<Family> parameter_families() const;
  FieldVariation grade_part(int g) const;
  FieldVariation truncate(int max_grade) const;
  int max_grade() const;
  FieldVariation operator+(const FieldVariation& o) const;
  FieldVariation operator-(const FieldVariation& o) const;
  bool operator==(const FieldVariation& o) const { return n_ == o.n_ && comp_ == o.comp_; }
  FieldVariation map(const std::function<Poly(const Poly&)>& f) const;

 private:
  int n_ = 0;
  std::vector<Poly> comp_;
};

/// A gauge variation: linear in one ζ family with ζ-derivative order ≤ 1.
class GaugeVariation {
 public:
  GaugeVariation() = default;
  /// Validates linearity in `family` and the derivative bound; throws PreconditionError otherwise.
  GaugeVariation(FieldVariation v, Family family);

  const FieldVariation& field() const { return v_; }
  Family family() const { return family_; }
  int n() const { return v_.n(); }
  const Poly& operator()(int a, int mu) const { return v_(a, mu); }
  GaugeVariation with_family(Family f) const;
  GaugeVariation truncate(int max_grade) const;
  GaugeVariation grade_part(int g) const;
  /// Replaces each ∂_I ζ^c by ∂_I Z^c.
  FieldVariation with_parameter(const std::vector<Poly>& Z) const;
  /// Rigid version: ζ replaced by constant parameters, ζ derivatives dropped.
  FieldVariation rigid() const;

 private:
  FieldVariation v_;
  Family family_ = Family::Z1;
};

/// Abelian variation δA^a_μ = ∂_μ ζ^a in the given family.
GaugeVariation abelian_variation(int n, Family f = Family::Z1);

// ---------------------------------------------------------------- operators

Poly total_derivative(const Poly& f, int nu);
/// ∂_I f for a count vector.
Poly total_derivative(const Poly& f, const std::array<int, kDim>& counts);
Poly partial(const Poly& f, uint32_t key);

/// E_{A^a_μ}(f) with shape {n, 3}; E_{ζ^a}(f) with shape {n} for parameter families.
ComponentTensor euler_lagrange(const Poly& f, Family family, int n);

struct DivergenceCheck {
  bool is_divergence = true;
  std::vector<std::pair<std::string, Poly>> witness;  // nonzero EL components
};
DivergenceCheck is_total_divergence(const Poly& f);

/// Θ^μ with Σ_μ ∂_μ Θ^μ = f; throws PreconditionError if f is not a divergence.
std::array<Poly, kDim> divergence_witness(const Poly& f);
Poly divergence(const std::array<Poly, kDim>& theta);

Poly vary(const Poly& f, const FieldVariation& delta, int max_grade = -1);
inline Poly vary(const Poly& f, const GaugeVariation& delta, int max_grade = -1) {
  return vary(f, delta.field(), max_grade);
}

ComponentTensor lie_derivative_covector(const ComponentTensor& E, const FieldVariation& delta, int max_grade = -1);
inline ComponentTensor lie_derivative_covector(const ComponentTensor& E, const GaugeVariation& delta,
                                               int max_grade = -1) {
  return lie_derivative_covector(E, delta.field(), max_grade);
}

/// Υ^μ with vary(f, δ) = Σ δφ·E_φ(f) + ∂_μ Υ^μ; the identity is asserted before returning.
std::array<Poly, kDim> ibp_current(const Poly& f, const FieldVariation& delta);
inline std::array<Poly, kDim> ibp_current(const Poly& f, const GaugeVariation& delta) {
  return ibp_current(f, delta.field());
}

/// [δ1, δ2]φ = δ1(δ2 φ) − δ2(δ1 φ). Parameter families must be disjoint.
FieldVariation commutator(const FieldVariation& d1, const FieldVariation& d2, int max_grade = -1);
inline FieldVariation commutator(const GaugeVariation& d1, const GaugeVariation& d2, int max_grade = -1) {
  return commutator(d1.field(), d2.field(), max_grade);
}

/// E_ζ(Σ E·δA) over the variation's parameter family.
ComponentTensor noether_identity_residual(const ComponentTensor& E, const GaugeVariation& delta, int max_grade = -1);

struct GradedPiece {
  int grade;
  Poly poly;
};
std::vector<GradedPiece> grade_by_field_power(const Poly& f);

// ---------------------------------------------------------------- component tensor helpers

ComponentTensor make_covector(int n);
ComponentTensor grade_part(const ComponentTensor& t, int g);
ComponentTensor truncate(const ComponentTensor& t, int max_grade);
bool is_zero(const ComponentTensor& t);
int max_grade(const ComponentTensor& t);
ComponentTensor add(const ComponentTensor& x, const ComponentTensor& y);
ComponentTensor sub(const ComponentTensor& x, const ComponentTensor& y);
std::string label(const ComponentTensor& t, size_t flat_index);

}  // namespace deformatics::jet
