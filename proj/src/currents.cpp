#include "deformatics/ansatz.hpp"
#include "deformatics/theories.hpp"

namespace deformatics {

using namespace jet;

namespace {

constexpr int D = kDim;
inline int fi(int a, int mu) { return a * D + mu; }

std::vector<Poly> equation_list(const TheorySpec& t) {
  std::vector<Poly> eqs;
  for (size_t i = 0; i < t.field_equation.size(); ++i)
    if (!t.field_equation.flat(i).is_zero()) eqs.push_back(t.field_equation.flat(i));
  return eqs;
}

/// Highest grade at which a divergence built from K̃ is fully determined by the stored field equation.
int checked_grade(const TheorySpec& t) { return t.truncation_order; }

/// Solves target = Σ M ∂_I E with bounded multipliers.
Decomposition on_shell_decompose(const TheorySpec& t, const std::vector<Poly>& target, int max_grade,
                                 const HierarchyOptions& opt) {
  MultiplierProposer mult(prolonged_generators(equation_list(t), 1), opt.multiplier_degree, dmax(), max_grade);
  SearchLimits lim;
  lim.max_candidates = opt.max_candidates;
  return decompose(target, {&mult}, lim);
}

void require_torsion(const TheorySpec& t) {
  if (t.model != Model::TorsionYmFtCs) throw PreconditionError("explicit current and stress need a torsion YM-FT-CS theory");
}

}  // namespace

std::vector<Poly> torsion_current(const TheorySpec& t) {
  require_torsion(t);
  const int n = t.n;
  const int N = t.truncation_order;
  std::vector<Poly> K = torsion_connection(t);
  RTensor c = lower_first(t.a, t.k);
  const Rational half_ft = t.kappa_ft / 2;
  std::vector<Poly> J(static_cast<size_t>(n) * D);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      for (int b = 0; b < n; ++b)
        for (int e = 0; e < n; ++e) {
          const Rational& cabe = c({a, b, e});
          if (is_zero(cabe)) continue;
          for (int nu = 0; nu < D; ++nu)
            for (int al = 0; al < D; ++al) {
              int eps = Background::eps_upper(mu, nu, al);
              if (eps != 0) pb.add_product(K[fi(b, nu)], K[fi(e, al)], N, half_ft * cabe * eps);
            }
        }
      for (int b = 0; b < n; ++b)
        for (int nu = 0; nu < D; ++nu) {
          Rational g = Background::eta_inv(mu, nu) * t.k.k(a, b) + t.background.v2_upper(mu, nu) * t.p(a, b);
          if (!is_zero(g)) pb.add(K[fi(b, nu)], t.m * g);
        }
      J[fi(a, mu)] = pb.build();
    }
  return J;
}

std::vector<Poly> torsion_stress(const TheorySpec& t) {
  require_torsion(t);
  const int n = t.n;
  const int N = t.truncation_order;
  std::vector<Poly> K = torsion_connection(t);
  // K·K = η^{αβ} k_{ab} K^a_α K^b_β
  PolyBuilder kk;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (is_zero(t.k.k(a, b))) continue;
      for (int al = 0; al < D; ++al)
        kk.add_product(K[fi(a, al)], K[fi(b, al)], N, t.k.k(a, b) * Background::eta_inv(al, al));
    }
  Poly KK = kk.build();
  std::vector<Poly> T(D * D);
  for (int mu = 0; mu < D; ++mu)
    for (int nu = 0; nu < D; ++nu) {
      PolyBuilder pb;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (!is_zero(t.k.k(a, b))) pb.add_product(K[fi(a, mu)], K[fi(b, nu)], N, t.k.k(a, b));
          const Rational vn = t.background.v_lower(nu);
          if (is_zero(t.p(a, b)) || is_zero(vn)) continue;
          for (int al = 0; al < D; ++al)
            for (int be = 0; be < D; ++be) {
              int e = Background::eps_mixed(mu, al, be);
              if (e != 0) pb.add_product(K[fi(a, al)], K[fi(b, be)], N, -t.p(a, b) * vn * e / 2);
            }
        }
      if (mu == nu) pb.add(KK, Rational(-Background::eta(mu, nu), 2));
      T[mu * D + nu] = pb.build();
    }
  return T;
}

CurrentReport check_current_and_stress(const TheorySpec& t, const HierarchyOptions& opt) {
  CurrentReport rep;
  const int n = t.n;
  const int N = t.truncation_order;

  // Rigid Noether current J = Ψ − Υ with ∂Ψ = δ_rigid L and ∂Υ = δ_rigid L − Σ δ_rigid A·E.
  FieldVariation rigid = t.variation.rigid();
  Poly V = vary(t.lagrangian, rigid);
  Poly Vk = t.exact() ? V : V.truncate(N);
  if (!is_total_divergence(Vk).is_divergence) {
    rep.notes.push_back("rigid variation of the Lagrangian is not a total divergence");
    if (t.model == Model::TorsionYmFtCs) rep.torsion_present = !t.p.is_zero() && !t.background.v_is_zero();
    return rep;
  }
  std::array<Poly, D> psi = divergence_witness(Vk);
  std::array<Poly, D> ups = ibp_current(t.lagrangian, rigid);
  ComponentTensor E = euler_lagrange(t.lagrangian, Family::A, n);
  PolyBuilder rhs;
  for (int i = 0; i < rigid.size(); ++i) rhs.add_product(rigid.flat(i), E.flat(i), t.exact() ? -1 : N);
  for (int mu = 0; mu < D; ++mu) {
    Poly j = psi[mu] - ups[mu];
    rep.rigid_current[mu] = t.exact() ? j : j.truncate(N);
  }
  Poly lhs = divergence(rep.rigid_current);
  if (!t.exact()) lhs = lhs.truncate(N);
  rep.rigid_identity = (lhs - rhs.build()).is_zero();
  if (!rep.rigid_identity) rep.notes.push_back("rigid Noether identity fails");

  if (t.model != Model::TorsionYmFtCs) return rep;

  rep.torsion_present = !t.p.is_zero() && !t.background.v_is_zero();
  const int G = checked_grade(t);

  std::vector<Poly> J = torsion_current(t);
  std::vector<Poly> divJ(n);
  for (int a = 0; a < n; ++a) {
    std::array<Poly, D> comp{J[fi(a, 0)], J[fi(a, 1)], J[fi(a, 2)]};
    divJ[a] = divergence(comp).truncate(G);
  }
  Decomposition dj = on_shell_decompose(t, divJ, G, opt);
  rep.current_on_shell = dj.solved;
  if (!dj.solved) {
    if (dj.capped) throw MultiplierSearchInconclusive("current divergence: multiplier search hit the candidate cap");
    rep.notes.push_back("current divergence is not a combination of field-equation multiples");
  }

  std::vector<Poly> T = torsion_stress(t);
  std::vector<Poly> divT(D);
  for (int nu = 0; nu < D; ++nu) {
    PolyBuilder pb;
    for (int mu = 0; mu < D; ++mu) pb.add(total_derivative(T[mu * D + nu], mu), Background::eta_inv(mu, mu));
    divT[nu] = pb.build().truncate(G);
  }
  Decomposition dt = on_shell_decompose(t, divT, G, opt);
  rep.stress_on_shell = dt.solved;
  if (!dt.solved) {
    if (dt.capped) throw MultiplierSearchInconclusive("stress divergence: multiplier search hit the candidate cap");
    rep.notes.push_back("stress divergence is not a combination of field-equation multiples");
  }

  rep.stress_symmetric = true;
  for (int mu = 0; mu < D; ++mu)
    for (int nu = mu + 1; nu < D; ++nu)
      if (!(T[mu * D + nu] - T[nu * D + mu]).is_zero()) rep.stress_symmetric = false;
  if (rep.stress_symmetric == rep.torsion_present)
    rep.notes.push_back(rep.torsion_present ? "stress tensor is symmetric despite torsion"
                                            : "stress tensor is asymmetric without torsion");
  return rep;
}

}  // namespace deformatics
