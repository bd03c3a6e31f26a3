#pragma once

#include <ostream>
#include <random>
#include <vector>

#include "deformatics/jet.hpp"
#include "deformatics/liealg.hpp"

namespace deformatics::jet {
inline void PrintTo(const Poly& p, std::ostream* os) { *os << p.to_string(); }
}  // namespace deformatics::jet

namespace testsupport {

using deformatics::Rational;
using namespace deformatics::jet;

inline Rational random_rational(std::mt19937_64& rng, int span = 3, int max_den = 3) {
  std::uniform_int_distribution<int> num(-span, span), den(1, max_den);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline Rational random_nonzero(std::mt19937_64& rng, int span = 3, int max_den = 3) {
  Rational r;
  do r = random_rational(rng, span, max_den);
  while (r == 0);
  return r;
}

/// ε_{abc} as structure constants (independent of the library's su2 builder).
inline deformatics::RTensor epsilon3() {
  deformatics::RTensor t({3, 3, 3});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) t({a, b, c}) = Background::eps_lower(a, b, c);
  return t;
}

/// *F^a_μ = ε_μ^{αβ} ∂_α A^a_β, written out by hand.
inline Poly star_f(int a, int mu) {
  Poly s;
  for (int al = 0; al < 3; ++al)
    for (int be = 0; be < 3; ++be) {
      int e = Background::eps_mixed(mu, al, be);
      if (e) s += dA(a, be, {al}) * Rational(e);
    }
  return s;
}

/// A random jet variable of bounded order in the given families.
inline Poly random_variable(std::mt19937_64& rng, int n, int max_order, bool allow_zeta = true) {
  std::uniform_int_distribution<int> fam(0, allow_zeta ? 4 : 2), a(0, n - 1), mu(0, 2), ord(0, max_order);
  int f = fam(rng);
  Var v;
  if (f <= 2) {
    v.family = Family::A;
    v.form = mu(rng);
  } else if (f == 3) {
    v.family = Family::Z1;
  } else {
    v.family = Family::X;
    v.form = mu(rng);
    return Poly::variable(v);
  }
  v.internal = a(rng);
  int o = ord(rng);
  for (int i = 0; i < o; ++i) ++v.counts[mu(rng)];
  return Poly::variable(v);
}

/// Random polynomial with a few terms of degree ≤ max_degree.
inline Poly random_poly(std::mt19937_64& rng, int n, int max_order, int terms = 4, int max_degree = 3,
                        bool allow_zeta = true) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  Poly p;
  for (int t = 0; t < terms; ++t) {
    Poly m = random_rational(rng);
    int d = deg(rng);
    for (int i = 0; i < d; ++i) m = m * random_variable(rng, n, max_order, allow_zeta);
    p += m;
  }
  return p;
}

/// Random variation linear in ζ of the given family, field-dependent at first power.
inline FieldVariation random_linear_variation(std::mt19937_64& rng, int n, Family fam) {
  FieldVariation v(n);
  std::uniform_int_distribution<int> pick(0, 3), idx(0, n - 1), mu(0, 2);
  for (int a = 0; a < n; ++a)
    for (int m = 0; m < 3; ++m) {
      Poly s;
      for (int t = 0; t < 2; ++t) {
        Var z;
        z.family = fam;
        z.internal = idx(rng);
        if (pick(rng) == 0) ++z.counts[mu(rng)];
        s += random_rational(rng) * A(idx(rng), mu(rng)) * Poly::variable(z);
      }
      v(a, m) = s;
    }
  return v;
}

}  // namespace testsupport
