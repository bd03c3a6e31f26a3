#include <algorithm>

#include "deformatics/theories.hpp"

namespace deformatics {

using namespace jet;

namespace {

constexpr int D = kDim;
inline int fi(int a, int mu) { return a * D + mu; }

using Vec = std::vector<Poly>;

Vec apply_const(const RMatrix& M, const Vec& w) {
  Vec out(w.size());
  for (int i = 0; i < M.rows(); ++i) {
    PolyBuilder pb;
    for (int j = 0; j < M.cols(); ++j)
      if (!is_zero(M(i, j)) && !w[j].is_zero()) pb.add(w[j], M(i, j));
    out[i] = pb.build();
  }
  return out;
}

/// (X w)^a_μ = κ B^a_{bc} ε_μ^{να} A^c_α w^b_ν, truncated at max_grade.
Vec apply_X(const RTensor& B, const Rational& kappa, const Vec& w, int n, int max_grade) {
  Vec out(w.size());
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          const Rational& bc = B({a, b, c});
          if (is_zero(bc)) continue;
          for (int nu = 0; nu < D; ++nu)
            for (int al = 0; al < D; ++al) {
              int e = Background::eps_mixed(mu, nu, al);
              if (e == 0 || w[fi(b, nu)].is_zero()) continue;
              pb.add_product(A(c, al), w[fi(b, nu)], max_grade, kappa * bc * e);
            }
        }
      out[fi(a, mu)] = pb.build();
    }
  return out;
}

Vec add_vec(const Vec& x, const Vec& y) {
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

/// Σ_j (C⁻¹ X)^j C⁻¹ s, truncated at max_grade.
Vec neumann_connection(const RMatrix& Cinv, const RTensor& B, const Rational& kappa_ft, const Vec& source, int n,
                       int max_grade) {
  Vec term = apply_const(Cinv, source);
  for (auto& p : term) p = p.truncate(max_grade);
  Vec sum = term;
  if (kappa_ft == 0) return sum;
  for (int j = 1; j <= max_grade; ++j) {
    term = apply_const(Cinv, apply_X(B, kappa_ft, term, n, max_grade));
    bool zero = std::all_of(term.begin(), term.end(), [](const Poly& p) { return p.is_zero(); });
    if (zero) break;
    sum = add_vec(sum, term);
  }
  return sum;
}

/// ½ η^{μν} k_{ab} x^a_μ y^b_ν truncated at max_grade.
Poly half_pairing(const InternalSpace& k, const Vec& x, const Vec& y, int n, int max_grade) {
  PolyBuilder pb;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (is_zero(k.k(a, b))) continue;
      for (int mu = 0; mu < D; ++mu)
        pb.add_product(x[fi(a, mu)], y[fi(b, mu)], max_grade, Rational(1, 2) * k.k(a, b) * Background::eta(mu, mu));
    }
  return pb.build();
}

/// Linear CS mass term (m/2) η^{μν} k_{ab} A^a_μ *F^b_ν.
Poly cs_mass_term(const InternalSpace& k, const Rational& m, const Vec& starF, int n) {
  if (m == 0) return Poly();
  Vec a(static_cast<size_t>(n) * D);
  for (int c = 0; c < n; ++c)
    for (int mu = 0; mu < D; ++mu) a[fi(c, mu)] = A(c, mu);
  return half_pairing(k, a, starF, n, -1) * m;
}

/// Cubic CS completion (mκ/6) a_{abc} ε^{μνα} A^a_μ A^b_ν A^c_α.
Poly cs_cubic_term(const StructureConstants& a, const InternalSpace& k, const Rational& m, const Rational& kappa) {
  if (m == 0 || kappa == 0) return Poly();
  int n = a.n();
  RTensor low = lower_first(a, k);
  PolyBuilder pb;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        const Rational& c = low({x, y, z});
        if (is_zero(c)) continue;
        for (int mu = 0; mu < D; ++mu)
          for (int nu = 0; nu < D; ++nu)
            for (int al = 0; al < D; ++al) {
              int e = Background::eps_upper(mu, nu, al);
              if (e == 0) continue;
              pb.add_product(A(x, mu) * A(y, nu), A(z, al), -1, m * kappa * c * e / 6);
            }
      }
  return pb.build();
}

/// *F_A = *F + ½κ a^a_{bc} ε_μ^{αβ} A^b_α A^c_β.
Vec covariant_dual(const StructureConstants& a, const Rational& kappa, int n) {
  Vec s = dual_field_strength(n);
  if (kappa == 0) return s;
  for (int x = 0; x < n; ++x)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      pb.add(s[fi(x, mu)]);
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
          const Rational& c = a(x, y, z);
          if (is_zero(c)) continue;
          for (int al = 0; al < D; ++al)
            for (int be = 0; be < D; ++be) {
              int e = Background::eps_mixed(mu, al, be);
              if (e == 0) continue;
              pb.add_product(A(y, al), A(z, be), -1, kappa * c * e / 2);
            }
        }
      s[fi(x, mu)] = pb.build();
    }
  return s;
}

/// δA^a_μ = ∂_μ ζ^a + κ T^a_{bc} W^b_μ ζ^c, truncated at max_grade.
GaugeVariation connection_variation(int n, const RTensor& T, const Rational& kappa, const Vec& W, int max_grade) {
  FieldVariation fv(n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      pb.add(dzeta(1, a, {mu}));
      if (kappa != 0)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            const Rational& t = T({a, b, c});
            if (is_zero(t) || W[fi(b, mu)].is_zero()) continue;
            pb.add_product(W[fi(b, mu)], zeta(1, c), max_grade, kappa * t);
          }
      fv(a, mu) = pb.build();
    }
  return GaugeVariation(fv, Family::Z1);
}

Vec field_vector(int n) {
  Vec a(static_cast<size_t>(n) * D);
  for (int c = 0; c < n; ++c)
    for (int mu = 0; mu < D; ++mu) a[fi(c, mu)] = A(c, mu);
  return a;
}

void finalize(TheorySpec& t, Poly lagrangian, GaugeVariation variation, int N) {
  t.truncation_order = N;
  t.lagrangian = N >= 0 ? lagrangian.truncate(N + 1) : std::move(lagrangian);
  t.variation = N >= 0 ? variation.truncate(N) : std::move(variation);
  ComponentTensor E = euler_lagrange(t.lagrangian, Family::A, t.n);
  t.field_equation = N >= 0 ? truncate(E, N) : E;
}

void require(const ResidualReport& rep, const std::string& what) {
  if (!rep.passed()) throw AlgebraRejected(what, rep);
}

}  // namespace

std::string model_name(Model m) {
  switch (m) {
    case Model::Linear: return "linear";
    case Model::YmCs: return "ym_cs";
    case Model::Ft: return "ft";
    case Model::TorsionYmFtCs: return "torsion_ymftcs";
    case Model::Gravity: return "gravity";
  }
  return "unknown";
}

int TheorySpec::supported_order() const {
  if (exact()) return 1 << 20;
  return truncation_order - 1;
}

// ---------------------------------------------------------------- Killing vectors

KillingVectorSet KillingVectorSet::translations(const std::vector<std::array<Rational, D>>& dirs) {
  KillingVectorSet k;
  k.kind = Kind::Translations;
  for (const auto& d : dirs) k.xi.push_back({Poly(d[0]), Poly(d[1]), Poly(d[2])});
  return k;
}

KillingVectorSet KillingVectorSet::rotation_translation(const Rational& w, const Rational& t) {
  KillingVectorSet k;
  k.kind = Kind::RotationTranslation;
  k.xi.push_back({Poly(), -x(2) * w, x(1) * w});
  k.xi.push_back({Poly(t), Poly(), Poly()});
  return k;
}

KillingVectorSet KillingVectorSet::boost_translation(const Rational& w, const Rational& t) {
  KillingVectorSet k;
  k.kind = Kind::BoostTranslation;
  k.xi.push_back({x(1) * w, x(0) * w, Poly()});
  k.xi.push_back({Poly(), Poly(), Poly(t)});
  return k;
}

Rational KillingVectorSet::gradient(int a, int mu, int nu) const {
  return xi[a][mu].coefficient(Monomial::of(x(nu).terms()[0].mono[0]));
}

void KillingVectorSet::validate() const {
  for (int a = 0; a < n(); ++a)
    for (int mu = 0; mu < D; ++mu)
      for (const auto& t : xi[a][mu].terms()) {
        if (t.mono.degree() > 1 || (t.mono.degree() == 1 && key_family(t.mono[0]) != Family::X))
          throw KillingCheckFailed("Killing vector " + std::to_string(a + 1) + " is not affine in x");
      }
  for (int a = 0; a < n(); ++a)
    for (int mu = 0; mu < D; ++mu)
      for (int nu = mu; nu < D; ++nu) {
        Rational s = Background::eta(mu, mu) * gradient(a, mu, nu) + Background::eta(nu, nu) * gradient(a, nu, mu);
        if (s != 0)
          throw KillingCheckFailed("Killing equation fails for vector " + std::to_string(a + 1) + " at (" +
                                   std::to_string(mu) + "," + std::to_string(nu) + ")");
      }
  for (int a = 0; a < n(); ++a)
    for (int b = a + 1; b < n(); ++b)
      for (int mu = 0; mu < D; ++mu) {
        Poly br;
        for (int nu = 0; nu < D; ++nu)
          br += xi[a][nu] * gradient(b, mu, nu) - xi[b][nu] * gradient(a, mu, nu);
        if (!br.is_zero())
          throw KillingCheckFailed("Killing vectors " + std::to_string(a + 1) + " and " + std::to_string(b + 1) +
                                   " do not commute");
      }
}

ResidualReport check_gravity_obstruction(const KillingVectorSet& kvs, const Background& bg) {
  int n = kvs.n();
  RTensor r({D, n});
  for (int al = 0; al < D; ++al)
    for (int a = 0; a < n; ++a) {
      Rational s = 0;
      for (int be = 0; be < D; ++be) {
        if (bg.v[be] == 0) continue;
        // ∂_α ξ_β = η_ββ ∂_α ξ^β
        Rational d_ab = Background::eta(be, be) * kvs.gradient(a, be, al);
        Rational d_ba = Background::eta(al, al) * kvs.gradient(a, al, be);
        s += bg.v[be] * (d_ab - d_ba) / 2;
      }
      r({al, a}) = s;
    }
  ResidualReport rep;
  rep.add_tensor("gravity.obstruction", r);
  return rep;
}

// ---------------------------------------------------------------- shared pieces

std::vector<Poly> dual_field_strength(int n) {
  Vec s(static_cast<size_t>(n) * D);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      for (int al = 0; al < D; ++al)
        for (int be = 0; be < D; ++be) {
          int e = Background::eps_mixed(mu, al, be);
          if (e != 0) pb.add(dA(a, be, {al}), e);
        }
      s[fi(a, mu)] = pb.build();
    }
  return s;
}

RMatrix torsion_frame(const InternalSpace& k, const TorsionPotential& p, const Background& bg) {
  int n = k.n();
  RMatrix P = k.k_inv() * p.matrix();
  RMatrix C = RMatrix::identity(n * D);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (is_zero(P(a, b))) continue;
      for (int mu = 0; mu < D; ++mu)
        for (int nu = 0; nu < D; ++nu) C(fi(a, mu), fi(b, nu)) += P(a, b) * bg.v2_mixed(mu, nu);
    }
  return C;
}

RMatrix torsion_inner_product(const InternalSpace& k, const TorsionPotential& p, const Background& bg) {
  int n = k.n();
  RMatrix G(n * D, n * D);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int mu = 0; mu < D; ++mu)
        for (int nu = 0; nu < D; ++nu)
          G(fi(a, mu), fi(b, nu)) = Background::eta_inv(mu, nu) * k.k(a, b) + bg.v2_upper(mu, nu) * p(a, b);
  return G;
}

RMatrix linear_quadratic_form(const InternalSpace& k, const TorsionPotential& p, const Background& bg) {
  int n = k.n();
  RMatrix M0(n * D, n * D);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int mu = 0; mu < D; ++mu) M0(fi(a, mu), fi(b, mu)) = Background::eta(mu, mu) * k.k(a, b);
  if (p.is_zero() || bg.v_is_zero()) return M0;
  RMatrix C = torsion_frame(k, p, bg);
  if (C.determinant() == 0) throw DegenerateInnerProduct("torsion inner product g + v p is degenerate");
  return M0 * C.inverse();
}

// ---------------------------------------------------------------- builders

TheorySpec build_linear_abelian(const InternalSpace& k, const Rational& m,
                                const std::optional<std::pair<std::array<Rational, 3>, TorsionPotential>>& torsion) {
  TheorySpec t;
  t.name = "linear";
  t.model = Model::Linear;
  t.n = k.n();
  t.k = k;
  t.m = m;
  t.a = StructureConstants(t.n);
  t.b = StructureConstants(t.n);
  t.p = TorsionPotential(t.n);
  if (torsion) {
    t.background.v = torsion->first;
    if (torsion->second.n() != t.n) throw PreconditionError("torsion potential dimension mismatch");
    t.p = torsion->second;
  }
  RMatrix H = linear_quadratic_form(k, t.p, t.background);
  Vec s = dual_field_strength(t.n);
  PolyBuilder pb;
  for (int i = 0; i < H.rows(); ++i)
    for (int j = 0; j < H.cols(); ++j)
      if (!is_zero(H(i, j))) pb.add_product(s[i], s[j], -1, H(i, j) / 2);
  Poly L = pb.build() + cs_mass_term(k, m, s, t.n);
  finalize(t, L, abelian_variation(t.n), -1);
  return t;
}

TheorySpec build_ym_cs(const StructureConstants& a, const InternalSpace& k, const Rational& kappa, const Rational& m,
                       const BuildOptions& opt) {
  if (a.n() != k.n()) throw PreconditionError("structure constants vs metric dimension mismatch");
  if (opt.checked) require(check_ym_relations(a, k), "Yang-Mills relations");
  TheorySpec t;
  t.name = "ym_cs";
  t.model = Model::YmCs;
  t.n = k.n();
  t.k = k;
  t.a = a;
  t.b = StructureConstants(t.n);
  t.p = TorsionPotential(t.n);
  t.m = m;
  t.kappa = kappa;
  Vec s = dual_field_strength(t.n);
  Vec sA = covariant_dual(a, kappa, t.n);
  Poly L = half_pairing(k, sA, sA, t.n, -1) + cs_mass_term(k, m, s, t.n) + cs_cubic_term(a, k, m, kappa);
  finalize(t, L, connection_variation(t.n, a.tensor(), kappa, field_vector(t.n), -1), -1);
  return t;
}

TheorySpec build_ft_truncated(const StructureConstants& b, const InternalSpace& k, const Rational& kappa, int N,
                              const BuildOptions& opt) {
  if (b.n() != k.n()) throw PreconditionError("structure constants vs metric dimension mismatch");
  if (N < 2) throw PreconditionError("truncation order must be at least 2");
  if (opt.checked) require(check_ft_relations(b, k), "Freedman-Townsend relations");
  TheorySpec t;
  t.name = "ft";
  t.model = Model::Ft;
  t.n = k.n();
  t.k = k;
  t.a = StructureConstants(t.n);
  t.b = b;
  t.p = TorsionPotential(t.n);
  t.kappa = kappa;
  t.kappa_ft = kappa;
  RTensor B = ft_coadjoint(b, k);
  Vec s = dual_field_strength(t.n);
  Vec K = neumann_connection(RMatrix::identity(t.n * D), B, kappa, s, t.n, N);
  Poly L = half_pairing(k, K, s, t.n, N + 1);
  finalize(t, L, connection_variation(t.n, B, kappa, K, N), N);
  return t;
}

TheorySpec build_torsion_ym_ft_cs(const StructureConstants& c, const TorsionPotential& p, const std::array<Rational, 3>& v,
                                  const InternalSpace& k, const Rational& m, const Rational& kappa, int N,
                                  const BuildOptions& opt) {
  if (c.n() != k.n() || p.n() != k.n()) throw PreconditionError("algebra data dimension mismatch");
  if (N < 2) throw PreconditionError("truncation order must be at least 2");
  Rational kappa_ft;
  if (opt.kappa_ft) {
    if (opt.checked) throw PreconditionError("κ_FT override requires an unchecked build");
    kappa_ft = *opt.kappa_ft;
  } else {
    if (m == 0) throw PreconditionError("torsion YM-FT-CS theory requires m != 0");
    kappa_ft = kappa / m;
  }
  if (opt.checked) {
    require(check_ym_relations(c, k), "Yang-Mills relations");
    require(check_ft_relations(c, k), "Freedman-Townsend relations");
    if (kappa != 0) {
      Rational ratio = kappa_ft / kappa;
      require(check_combined_compat(c, c, k, m, ratio), "combined compatibility");
      if (!p.is_zero()) {
        ResidualReport rep = check_torsion_obstruction(c, c, p, m, ratio);
        if (!rep.passed()) throw ObstructionFailed("torsion obstruction", rep);
      }
    }
  }
  TheorySpec t;
  t.name = "torsion_ymftcs";
  t.model = Model::TorsionYmFtCs;
  t.n = k.n();
  t.k = k;
  t.a = c;
  t.b = c;
  t.p = p;
  t.m = m;
  t.kappa = kappa;
  t.kappa_ft = kappa_ft;
  t.background.v = v;
  t.truncation_order = N;
  Vec s = dual_field_strength(t.n);
  Vec sA = covariant_dual(c, kappa, t.n);
  Vec K = torsion_connection(t);
  Poly L = half_pairing(k, K, sA, t.n, N + 1) + cs_mass_term(k, m, s, t.n) + cs_cubic_term(c, k, m, kappa);
  // δA = ∂ζ + κ c (A + K̃/m) ζ; with an override the K̃ coefficient is κ_FT.
  Vec W = field_vector(t.n);
  FieldVariation fv = connection_variation(t.n, c.tensor(), kappa, W, N).field();
  GaugeVariation dK = connection_variation(t.n, c.tensor(), kappa_ft, K, N);
  FieldVariation sum(t.n);
  for (int i = 0; i < fv.size(); ++i) sum.flat(i) = fv.flat(i) + dK.field().flat(i) - dzeta(1, i / D, {i % D});
  finalize(t, L, GaugeVariation(sum, Family::Z1), N);
  return t;
}

std::vector<Poly> torsion_connection(const TheorySpec& t) {
  if (t.model != Model::TorsionYmFtCs) throw PreconditionError("torsion_connection needs a torsion YM-FT-CS theory");
  int N = t.truncation_order;
  RMatrix C = torsion_frame(t.k, t.p, t.background);
  if (C.determinant() == 0) throw DegenerateInnerProduct("constant part of the Y-map is singular");
  RMatrix Cinv = C.inverse();
  RTensor B = ft_coadjoint(t.a, t.k);
  Vec sA = covariant_dual(t.a, t.kappa, t.n);
  return neumann_connection(Cinv, B, t.kappa_ft, sA, t.n, N);
}

TheorySpec build_gravity_like(const KillingVectorSet& kvs, const InternalSpace& k, const TorsionPotential& p,
                              const std::array<Rational, 3>& v, const Rational& m, int N, const BuildOptions& opt) {
  int n = kvs.n();
  if (k.n() != n || p.n() != n) throw PreconditionError("Killing set vs metric dimension mismatch");
  if (N < 2) throw PreconditionError("truncation order must be at least 2");
  TheorySpec t;
  t.name = "gravity";
  t.model = Model::Gravity;
  t.n = n;
  t.k = k;
  t.a = StructureConstants(n);
  t.b = StructureConstants(n);
  t.p = p;
  t.m = m;
  t.background.v = v;
  t.killing = kvs;
  if (opt.checked) {
    kvs.validate();
    if (!p.is_zero()) {
      ResidualReport rep = check_gravity_obstruction(kvs, t.background);
      if (!rep.passed()) throw ObstructionFailed("gravity-like obstruction", rep);
    }
  }

  // Y^α_μ = δ^α_μ + ξ^α_c A^c_μ
  std::array<std::array<Poly, D>, D> Y;
  for (int al = 0; al < D; ++al)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      if (al == mu) pb.add(Poly(1));
      for (int c = 0; c < n; ++c)
        if (!kvs.xi[c][al].is_zero()) pb.add_product(kvs.xi[c][al], A(c, mu));
      Y[al][mu] = pb.build();
    }
  auto congruence = [&](auto metric) {
    std::array<std::array<Poly, D>, D> out;
    for (int mu = 0; mu < D; ++mu)
      for (int nu = 0; nu < D; ++nu) {
        PolyBuilder pb;
        for (int al = 0; al < D; ++al)
          for (int be = 0; be < D; ++be) {
            Rational g = metric(al, be);
            if (g != 0) pb.add_product(Y[al][mu], Y[be][nu], -1, g);
          }
        out[mu][nu] = pb.build();
      }
    return out;
  };
  auto ghat = congruence([](int al, int be) { return Rational(Background::eta(al, be)); });
  auto vhat = congruence([&](int al, int be) { return t.background.v2_lower(al, be); });

  // 1/det Y as a geometric series in (det Y − 1).
  Poly det = Y[0][0] * (Y[1][1] * Y[2][2] - Y[1][2] * Y[2][1]) - Y[0][1] * (Y[1][0] * Y[2][2] - Y[1][2] * Y[2][0]) +
             Y[0][2] * (Y[1][0] * Y[2][1] - Y[1][1] * Y[2][0]);
  Poly u = Poly(1) - det;  // 1/det = Σ u^j
  Poly inv = 1, power = 1;
  for (int j = 1; j <= N - 1; ++j) {
    power = mul_trunc(power, u, N - 1);
    if (power.is_zero()) break;
    inv += power;
  }

  // *F^μ_a = k_{ab} ε^{μνα} ∂_ν A^b_α
  std::vector<std::array<Poly, D>> sF(n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      for (int b = 0; b < n; ++b) {
        if (is_zero(k.k(a, b))) continue;
        for (int nu = 0; nu < D; ++nu)
          for (int al = 0; al < D; ++al) {
            int e = Background::eps_upper(mu, nu, al);
            if (e != 0) pb.add(dA(b, al, {nu}), k.k(a, b) * e);
          }
      }
      sF[a][mu] = pb.build();
    }
  RMatrix pup = k.k_inv() * p.matrix() * k.k_inv();
  PolyBuilder quad;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Rational& kab = k.kinv(a, b);
      const Rational& pab = pup(a, b);
      if (is_zero(kab) && is_zero(pab)) continue;
      for (int mu = 0; mu < D; ++mu)
        for (int nu = 0; nu < D; ++nu) {
          Poly g = ghat[mu][nu] * kab + vhat[mu][nu] * pab;
          if (g.is_zero()) continue;
          quad.add_product(g, mul_trunc(sF[a][mu], sF[b][nu], -1), N + 1, Rational(1, 2));
        }
    }
  Poly L = mul_trunc(inv, quad.build(), N + 1);
  if (m != 0) {
    PolyBuilder cs;
    for (int a = 0; a < n; ++a)
      for (int mu = 0; mu < D; ++mu) cs.add_product(A(a, mu), sF[a][mu], -1, m / 2);
    L += cs.build();
  }

  // δA^a_μ = ∂_μ ζ^a + X^ν ∂_ν A^a_μ + A^a_ν ∂_μ X^ν with X^ν = ζ^c ξ^ν_c.
  std::array<Poly, D> X;
  for (int nu = 0; nu < D; ++nu) {
    PolyBuilder pb;
    for (int c = 0; c < n; ++c)
      if (!kvs.xi[c][nu].is_zero()) pb.add_product(zeta(1, c), kvs.xi[c][nu]);
    X[nu] = pb.build();
  }
  FieldVariation fv(n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      PolyBuilder pb;
      pb.add(dzeta(1, a, {mu}));
      for (int nu = 0; nu < D; ++nu) {
        pb.add_product(X[nu], dA(a, mu, {nu}));
        pb.add_product(A(a, nu), total_derivative(X[nu], mu));
      }
      fv(a, mu) = pb.build();
    }
  // The variation is exact; the Lagrangian is truncated.
  t.truncation_order = N;
  t.lagrangian = L.truncate(N + 1);
  t.variation = GaugeVariation(fv, Family::Z1);
  t.field_equation = truncate(euler_lagrange(t.lagrangian, Family::A, n), N);
  return t;
}

TheorySpec with_variation(const TheorySpec& t, const GaugeVariation& v, const std::string& name) {
  TheorySpec out = t;
  out.name = name;
  out.variation = t.exact() ? v : v.truncate(t.truncation_order);
  return out;
}

}  // namespace deformatics
