#include <map>
#include <stdexcept>

#include "deformatics/linsolve.hpp"

#include "deformatics/theories.hpp"

namespace deformatics {

using namespace jet;

namespace {

constexpr int D = kDim;

RTensor antisymmetrized_u1(const RTensor& u1) {
  RTensor out(u1.shape());
  for (size_t i = 0; i < u1.size(); ++i) {
    auto idx = u1.unflatten(i);
    auto sw = idx;
    std::swap(sw[0], sw[1]);
    out.flat(i) = (u1.flat(i) - u1.at(sw)) / 2;
  }
  return out;
}

}  // namespace

Poly theorem28_curl(int c, int alpha, int beta) {
  return (dA(c, alpha, {beta}) - dA(c, beta, {alpha})) * Rational(1, 2);
}

Theorem28Seed Theorem28Seed::zero(int n) { return {RTensor({n, n, n}), RTensor({D, D, n, D, n, n})}; }

Theorem28Seed Theorem28Seed::yang_mills(const StructureConstants& a, const Rational& kappa) {
  int n = a.n();
  Theorem28Seed s = zero(n);
  for (int x = 0; x < n; ++x)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) s.u0({x, b, c}) = kappa * a(x, c, b);
  return s;
}

Theorem28Seed Theorem28Seed::freedman_townsend(const StructureConstants& b, const InternalSpace& k,
                                               const Rational& kappa) {
  int n = b.n();
  RTensor B = ft_coadjoint(b, k);
  Theorem28Seed s = zero(n);
  for (int al = 0; al < D; ++al)
    for (int be = 0; be < D; ++be)
      for (int mu = 0; mu < D; ++mu) {
        int e = Background::eps_mixed(mu, al, be);
        if (e == 0) continue;
        for (int a = 0; a < n; ++a)
          for (int x = 0; x < n; ++x)
            for (int c = 0; c < n; ++c) s.u1({al, be, a, mu, x, c}) = -kappa * B({a, c, x}) * e;
      }
  return s;
}

Theorem28Result theorem28_construct(const Theorem28Seed& seed, const RMatrix& H, const InternalSpace& k,
                                    const Rational& m) {
  const int n = k.n();
  if (seed.u0.shape() != std::vector<int>{n, n, n} || seed.u1.shape() != std::vector<int>{D, D, n, D, n, n})
    throw PreconditionError("quadratic construction seed has the wrong shape");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (seed.u0({a, b, c}) != -seed.u0({a, c, b}))
          throw PrerequisiteViolated("u0 is not skew in its lower internal indices");
  const RTensor u1 = antisymmetrized_u1(seed.u1);

  std::vector<Poly> phi(static_cast<size_t>(n) * D * D);
  auto Phi = [&](int c, int al, int be) -> const Poly& { return phi[(c * D + al) * D + be]; };
  for (int c = 0; c < n; ++c)
    for (int al = 0; al < D; ++al)
      for (int be = 0; be < D; ++be) phi[(c * D + al) * D + be] = theorem28_curl(c, al, be);

  Theorem28Result r;
  r.U1 = ComponentTensor({n, D, n});
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu)
      for (int b = 0; b < n; ++b) {
        PolyBuilder pb;
        for (int c = 0; c < n; ++c) {
          if (!is_zero(seed.u0({a, b, c}))) pb.add(A(c, mu), seed.u0({a, b, c}));
          for (int al = 0; al < D; ++al)
            for (int be = 0; be < D; ++be) {
              const Rational& u = u1({al, be, a, mu, b, c});
              if (!is_zero(u)) pb.add(Phi(c, al, be), u);
            }
        }
        r.U1({a, mu, b}) = pb.build();
      }

  // The curl of U1 must be invariant under the abelian gauge symmetry.
  GaugeVariation d0 = abelian_variation(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int mu = 0; mu < D; ++mu)
        for (int nu = mu + 1; nu < D; ++nu) {
          Poly curl = total_derivative(r.U1({a, nu, b}), mu) - total_derivative(r.U1({a, mu, b}), nu);
          if (!vary(curl, d0).is_zero())
            throw PrerequisiteViolated("curl of U1 is not invariant under the abelian gauge symmetry");
        }

  // Linear variation ∂ζ + U1 ζ and its lowest-order closure: the deviation must be an exact variation.
  FieldVariation lin(n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      pb.add(dzeta(1, a, {mu}));
      for (int b = 0; b < n; ++b) pb.add_product(r.U1({a, mu, b}), zeta(1, b));
      lin(a, mu) = pb.build();
    }
  GaugeVariation g1(lin, Family::Z1);
  FieldVariation comm0 = commutator(g1, g1.with_family(Family::Z2), 0);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu)
      for (int nu = mu + 1; nu < D; ++nu)
        if (!(total_derivative(comm0(a, nu), mu) - total_derivative(comm0(a, mu), nu)).is_zero())
          throw PrerequisiteViolated("lowest-order commutator of the linear deformation is not an exact variation");

  // Ω2^c_{α1α2} = −(W^c_{[α1|i} A^i_{|α2]}), W^c_{αi} = ½ u0^c_{ij} A^j_α + u1^{λ1λ2 c}_{α ij} Φ^j_{λ1λ2}
  std::vector<Poly> W(static_cast<size_t>(n) * D * n);
  for (int c = 0; c < n; ++c)
    for (int al = 0; al < D; ++al)
      for (int i = 0; i < n; ++i) {
        PolyBuilder pb;
        for (int j = 0; j < n; ++j) {
          if (!is_zero(seed.u0({c, i, j}))) pb.add(A(j, al), seed.u0({c, i, j}) / 2);
          for (int l1 = 0; l1 < D; ++l1)
            for (int l2 = 0; l2 < D; ++l2) {
              const Rational& u = u1({l1, l2, c, al, i, j});
              if (!is_zero(u)) pb.add(Phi(j, l1, l2), u);
            }
        }
        W[(c * D + al) * n + i] = pb.build();
      }
  r.Omega2 = ComponentTensor({n, D, D});
  for (int c = 0; c < n; ++c)
    for (int a1 = 0; a1 < D; ++a1)
      for (int a2 = 0; a2 < D; ++a2) {
        if (a1 == a2) continue;
        PolyBuilder pb;
        for (int i = 0; i < n; ++i) {
          pb.add_product(W[(c * D + a1) * n + i], A(i, a2), -1, Rational(-1, 2));
          pb.add_product(W[(c * D + a2) * n + i], A(i, a1), -1, Rational(1, 2));
        }
        r.Omega2({c, a1, a2}) = pb.build();
      }

  r.U2 = ComponentTensor({n, D, n});
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu)
      for (int b = 0; b < n; ++b) {
        PolyBuilder pb;
        for (int c = 0; c < n; ++c)
          for (int a1 = 0; a1 < D; ++a1)
            for (int a2 = 0; a2 < D; ++a2) {
              const Rational& u = u1({a1, a2, a, mu, b, c});
              if (!is_zero(u)) pb.add(r.Omega2({c, a1, a2}), u);
            }
        r.U2({a, mu, b}) = pb.build();
      }

  // Linear field equation E1^β_b = q^{βρσα}_{bc} ∂_α Φ^c_{ρσ} + p^{βρσ}_{bc} Φ^c_{ρσ}.
  auto q = [&](int be, int rho, int sg, int al, int b, int c) -> Rational {
    Rational s = 0;
    for (int nu = 0; nu < D; ++nu) {
      int e1 = Background::eps_mixed(nu, al, be);
      if (e1 == 0) continue;
      for (int la = 0; la < D; ++la) {
        int e2 = Background::eps_mixed(la, rho, sg);
        if (e2 != 0) s += H(b * D + nu, c * D + la) * (e1 * e2);
      }
    }
    return s;
  };
  auto p = [&](int be, int rho, int sg, int b, int c) -> Rational {
    return -m * k.k(b, c) * Background::eps_upper(be, rho, sg);
  };

  ComponentTensor E1({n, D});
  for (int b = 0; b < n; ++b)
    for (int be = 0; be < D; ++be) {
      PolyBuilder pb;
      for (int c = 0; c < n; ++c)
        for (int rho = 0; rho < D; ++rho)
          for (int sg = 0; sg < D; ++sg) {
            if (rho == sg) continue;
            Rational pc = p(be, rho, sg, b, c);
            if (pc != 0) pb.add(Phi(c, rho, sg), pc);
            for (int al = 0; al < D; ++al) {
              Rational qc = q(be, rho, sg, al, b, c);
              if (qc != 0) pb.add(total_derivative(Phi(c, rho, sg), al), qc);
            }
          }
      E1({b, be}) = pb.build();
    }
  {
    std::vector<Poly> s = dual_field_strength(n);
    PolyBuilder pb;
    for (int i = 0; i < H.rows(); ++i)
      for (int j = 0; j < H.cols(); ++j)
        if (!is_zero(H(i, j))) pb.add_product(s[i], s[j], -1, H(i, j) / 2);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int mu = 0; mu < D; ++mu)
          if (!is_zero(k.k(a, b))) pb.add_product(A(a, mu), s[b * D + mu], -1, m * k.k(a, b) * Background::eta(mu, mu) / 2);
    if (!(euler_lagrange(pb.build(), Family::A, n) == E1))
      throw std::logic_error("quadratic construction: coefficient form of the linear field equation is inconsistent");
  }

  // Linear part of the covariant derivative acting on Φ. The Φ-dependent part of U1 enters with weight ½,
  // as in the commutator of two field strengths.
  ComponentTensor DU({n, D, n});
  for (int b = 0; b < n; ++b)
    for (int al = 0; al < D; ++al)
      for (int c = 0; c < n; ++c) {
        PolyBuilder pb;
        for (int e = 0; e < n; ++e) {
          if (!is_zero(seed.u0({b, c, e}))) pb.add(A(e, al), seed.u0({b, c, e}));
          for (int l1 = 0; l1 < D; ++l1)
            for (int l2 = 0; l2 < D; ++l2) {
              const Rational& u = u1({l1, l2, b, al, c, e});
              if (!is_zero(u)) pb.add(Phi(e, l1, l2), u / 2);
            }
        }
        DU({b, al, c}) = pb.build();
      }

  r.E2 = ComponentTensor({n, D});
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      for (int b = 0; b < n; ++b)
        for (int n1 = 0; n1 < D; ++n1)
          for (int n2 = 0; n2 < D; ++n2) {
            if (n1 == n2) continue;
            Rational pc = p(mu, n1, n2, a, b);
            if (pc != 0) pb.add(r.Omega2({b, n1, n2}), pc);
            for (int al = 0; al < D; ++al) {
              Rational qc = q(mu, n1, n2, al, a, b);
              if (qc == 0) continue;
              pb.add(total_derivative(r.Omega2({b, n1, n2}), al), qc);
              for (int c = 0; c < n; ++c) pb.add_product(DU({b, al, c}), Phi(c, n1, n2), -1, qc);
            }
          }
      for (int b = 0; b < n; ++b)
        for (int nu = 0; nu < D; ++nu)
          for (int c = 0; c < n; ++c)
            for (int al = 0; al < D; ++al) {
              const Rational& u = u1({al, mu, b, nu, c, a});
              if (!is_zero(u)) pb.add_product(E1({b, nu}), A(c, al), -1, u);
            }
      r.E2({a, mu}) = pb.build();
    }

  FieldVariation full(n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      pb.add(lin(a, mu));
      for (int b = 0; b < n; ++b) pb.add_product(r.U2({a, mu, b}), zeta(1, b));
      full(a, mu) = pb.build();
    }
  r.variation = GaugeVariation(full, Family::Z1);
  r.E1 = std::move(E1);
  return r;
}

OnShellMatch match_on_shell(const ComponentTensor& target, const ComponentTensor& E1) {
  const int n = E1.shape()[0];
  const int S = n * D;
  struct Candidate {
    int slot;
    Poly value;
  };
  std::vector<Candidate> cands;
  for (int s = 0; s < S; ++s)
    for (int c = 0; c < n; ++c)
      for (int al = 0; al < D; ++al)
        for (int e = 0; e < S; ++e)
          if (!E1.flat(e).is_zero()) cands.push_back({s, A(c, al) * E1.flat(e)});

  SparseSystem sys(static_cast<int>(cands.size()));
  std::map<std::pair<int, Monomial>, std::pair<SparseVector, Rational>> rows;
  for (size_t j = 0; j < cands.size(); ++j)
    for (const auto& term : cands[j].value.terms())
      rows[{cands[j].slot, term.mono}].first.emplace_back(static_cast<int>(j), term.coef);
  for (size_t c = 0; c < target.size(); ++c)
    for (const auto& term : target.flat(c).terms()) rows[{static_cast<int>(c), term.mono}].second = term.coef;
  for (const auto& [key, row] : rows) sys.add_row(row.first, row.second);
  LinearSolution sol = sys.solve(false);

  OnShellMatch m;
  m.matched = sol.consistent;
  if (!m.matched) return m;
  m.multiples.assign(S, Poly());
  for (size_t j = 0; j < cands.size(); ++j)
    if (!deformatics::is_zero(sol.particular[j])) m.multiples[cands[j].slot] += cands[j].value * sol.particular[j];
  return m;
}

}  // namespace deformatics
