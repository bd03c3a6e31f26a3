#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "deformatics/jet.hpp"

namespace deformatics::jet {

namespace {

bool is_dependent(Family f) { return f == Family::A || is_parameter(f); }

uint32_t key_lower(uint32_t key, int nu) {
  Var v = Var::from_key(key);
  --v.counts[nu];
  return v.key();
}

int first_direction(uint32_t key) {
  auto c = key_counts(key);
  for (int nu = 0; nu < kDim; ++nu)
    if (c[nu] > 0) return nu;
  return -1;
}

/// ∂f/∂v for every variable v whose family passes the filter, in a single pass over f.
template <class Filter>
std::map<uint32_t, Poly> partials_by_key(const Poly& f, Filter keep) {
  std::map<uint32_t, PolyBuilder> acc;
  for (const auto& t : f.terms()) {
    const Monomial& m = t.mono;
    for (int j = 0; j < m.degree();) {
      int e = 1;
      while (j + e < m.degree() && m[j + e] == m[j]) ++e;
      if (keep(key_family(m[j]))) acc[m[j]].add(m.without(j), t.coef * e);
      j += e;
    }
  }
  std::map<uint32_t, Poly> out;
  for (auto& [k, b] : acc) {
    Poly p = b.build();
    if (!p.is_zero()) out.emplace(k, std::move(p));
  }
  return out;
}

/// Component index of a dependent variable's base: a*3+μ for A, a for parameters.
int component_of(uint32_t key) {
  Var v = Var::from_key(key);
  return v.family == Family::A ? v.internal * kDim + v.form : v.internal;
}

/// Sweeps coefficients P_I of ∂_I u from the highest order down using
/// P·D_j D_{J'} Q = D_j(P·D_{J'}Q) − D_j P·D_{J'}Q. On return `by_key` holds only order-0 entries,
/// which equal the Euler-Lagrange expressions. If `upsilon` is set, D_{J'}Q·P is added to Υ^j
/// using `dq(key)` for D_{J'}Q.
template <class DQ>
void sweep(std::map<uint32_t, Poly>& by_key, std::array<PolyBuilder, kDim>* upsilon, DQ dq) {
  int top = 0;
  for (const auto& [k, p] : by_key) top = std::max(top, key_order(k));
  for (int r = top; r >= 1; --r) {
    std::vector<uint32_t> keys;
    for (const auto& [k, p] : by_key)
      if (key_order(k) == r) keys.push_back(k);
    for (uint32_t k : keys) {
      Poly P = std::move(by_key[k]);
      by_key.erase(k);
      int j = first_direction(k);
      uint32_t lower = key_lower(k, j);
      if (upsilon) {
        const Poly& q = dq(lower);
        if (!q.is_zero()) (*upsilon)[j].add_product(P, q);
      }
      Poly dP = total_derivative(P, j);
      auto it = by_key.find(lower);
      if (it == by_key.end())
        by_key.emplace(lower, -dP);
      else
        it->second -= dP;
    }
  }
}

struct IbpResult {
  std::array<Poly, kDim> upsilon;
  std::map<uint32_t, Poly> el;  // base key -> E
};

/// Generic integration by parts for a variation given on base keys of dependent variables.
IbpResult ibp_general(const Poly& f, const std::map<uint32_t, Poly>& delta) {
  auto parts = partials_by_key(f, [](Family fam) { return is_dependent(fam); });
  std::map<uint32_t, Poly> cache;
  auto dq = [&](uint32_t key) -> const Poly& {
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    static const Poly zero;
    auto d = delta.find(key_base(key));
    if (d == delta.end()) return zero;
    return cache[key] = total_derivative(d->second, key_counts(key));
  };
  std::array<PolyBuilder, kDim> ups;
  sweep(parts, &ups, dq);
  IbpResult r;
  for (int mu = 0; mu < kDim; ++mu) r.upsilon[mu] = ups[mu].build();
  r.el = std::move(parts);
  return r;
}

Poly vary_general(const Poly& f, const std::map<uint32_t, Poly>& delta, int max_grade) {
  std::map<uint32_t, Poly> cache;
  PolyBuilder pb;
  for (const auto& t : f.terms()) {
    const Monomial& m = t.mono;
    for (int j = 0; j < m.degree();) {
      int e = 1;
      while (j + e < m.degree() && m[j + e] == m[j]) ++e;
      uint32_t k = m[j];
      if (is_dependent(key_family(k))) {
        auto it = cache.find(k);
        if (it == cache.end()) {
          auto d = delta.find(key_base(k));
          Poly dk = d == delta.end() ? Poly() : total_derivative(d->second, key_counts(k));
          it = cache.emplace(k, std::move(dk)).first;
        }
        if (!it->second.is_zero()) pb.add_product(m.without(j), t.coef * e, it->second, max_grade);
      }
      j += e;
    }
  }
  return pb.build();
}

std::map<uint32_t, Poly> field_delta_map(const FieldVariation& delta) {
  std::map<uint32_t, Poly> out;
  for (int a = 0; a < delta.n(); ++a)
    for (int mu = 0; mu < kDim; ++mu)
      if (!delta(a, mu).is_zero()) {
        Var v;
        v.family = Family::A;
        v.internal = a;
        v.form = mu;
        out.emplace(v.key(), delta(a, mu));
      }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- derivatives

Poly total_derivative(const Poly& f, int nu) {
  PolyBuilder pb;
  for (const auto& t : f.terms()) {
    const Monomial& m = t.mono;
    for (int j = 0; j < m.degree();) {
      int e = 1;
      while (j + e < m.degree() && m[j + e] == m[j]) ++e;
      uint32_t k = m[j];
      Family fam = key_family(k);
      if (fam == Family::X) {
        if (Var::from_key(k).form == nu) pb.add(m.without(j), t.coef * e);
      } else if (fam != Family::Rigid) {
        pb.add(m.without(j).with(key_lift(k, nu)), t.coef * e);
      }
      j += e;
    }
  }
  return pb.build();
}

Poly total_derivative(const Poly& f, const std::array<int, kDim>& counts) {
  Poly r = f;
  for (int nu = 0; nu < kDim; ++nu)
    for (int i = 0; i < counts[nu] && !r.is_zero(); ++i) r = total_derivative(r, nu);
  return r;
}

Poly partial(const Poly& f, uint32_t key) {
  PolyBuilder pb;
  for (const auto& t : f.terms()) {
    const Monomial& m = t.mono;
    for (int j = 0; j < m.degree(); ++j)
      if (m[j] == key) {
        pb.add(m.without(j), t.coef * m.count(key));
        break;
      }
  }
  return pb.build();
}

// ---------------------------------------------------------------- Euler-Lagrange

ComponentTensor euler_lagrange(const Poly& f, Family family, int n) {
  if (family == Family::X) throw PreconditionError("coordinates have no Euler-Lagrange operator");
  ComponentTensor out = family == Family::A ? ComponentTensor({n, kDim}) : ComponentTensor({n});
  auto parts = partials_by_key(f, [family](Family fam) { return fam == family; });
  for (const auto& [k, p] : parts)
    if (Var::from_key(k).internal >= n) throw PreconditionError("variable internal index exceeds n");
  if (family != Family::Rigid) sweep(parts, nullptr, [](uint32_t) -> const Poly& { static Poly z; return z; });
  for (auto& [k, p] : parts) out.flat(component_of(k)) += p;
  return out;
}

DivergenceCheck is_total_divergence(const Poly& f) {
  DivergenceCheck r;
  auto parts = partials_by_key(f, [](Family fam) { return is_dependent(fam); });
  sweep(parts, nullptr, [](uint32_t) -> const Poly& { static Poly z; return z; });
  for (auto& [k, p] : parts) {
    if (p.is_zero()) continue;
    r.is_divergence = false;
    r.witness.emplace_back(Var::from_key(k).name(), std::move(p));
  }
  return r;
}

Poly divergence(const std::array<Poly, kDim>& theta) {
  Poly s;
  for (int mu = 0; mu < kDim; ++mu) s += total_derivative(theta[mu], mu);
  return s;
}

std::array<Poly, kDim> divergence_witness(const Poly& f) {
  auto check = is_total_divergence(f);
  if (!check.is_divergence) throw PreconditionError("not a total divergence");
  // Split by total degree in dependent variables.
  std::map<int, std::vector<Term>> by_degree;
  for (const auto& t : f.terms()) {
    int g = 0;
    for (uint32_t k : t.mono)
      if (is_dependent(key_family(k))) ++g;
    by_degree[g].push_back(t);
  }
  std::array<PolyBuilder, kDim> theta;
  for (auto& [g, terms] : by_degree) {
    Poly fg = Poly::from_terms(std::move(terms));
    if (g == 0) {
      // Field-free: integrate in x^0.
      uint32_t x0 = x(0).terms()[0].mono[0];
      for (const auto& t : fg.terms()) {
        int e = t.mono.count(x0);
        theta[0].add(t.mono.with(x0), t.coef / (e + 1));
      }
      continue;
    }
    // Scaling variation u -> u on every dependent base variable present.
    std::map<uint32_t, Poly> delta;
    for (uint32_t k : fg.variables())
      if (is_dependent(key_family(k))) {
        uint32_t b = key_base(k);
        if (!delta.count(b)) delta.emplace(b, Poly::variable(Var::from_key(b)));
      }
    auto r = ibp_general(fg, delta);
    for (int mu = 0; mu < kDim; ++mu) theta[mu].add(r.upsilon[mu], Rational(1, g));
  }
  std::array<Poly, kDim> out;
  for (int mu = 0; mu < kDim; ++mu) out[mu] = theta[mu].build();
  if (divergence(out) != f) throw std::logic_error("divergence witness failed its identity check");
  return out;
}

// ---------------------------------------------------------------- variations

Poly vary(const Poly& f, const FieldVariation& delta, int max_grade) {
  return vary_general(f, field_delta_map(delta), max_grade);
}

ComponentTensor lie_derivative_covector(const ComponentTensor& E, const FieldVariation& delta, int max_grade) {
  const int n = delta.n();
  if (E.shape() != std::vector<int>{n, kDim}) throw PreconditionError("covector shape mismatch");
  auto dmap = field_delta_map(delta);
  ComponentTensor out({n, kDim});
  for (int i = 0; i < n * kDim; ++i) out.flat(i) = vary_general(E.flat(i), dmap, max_grade);
  // Adjoint term: Σ_ψ Σ_I (−D)_I (∂δψ/∂(∂_I φ) E_ψ).
  std::map<uint32_t, PolyBuilder> acc;
  for (int i = 0; i < n * kDim; ++i) {
    if (E.flat(i).is_zero() || delta.flat(i).is_zero()) continue;
    auto parts = partials_by_key(delta.flat(i), [](Family fam) { return fam == Family::A; });
    for (const auto& [k, p] : parts) acc[k].add_product(p, E.flat(i), max_grade);
  }
  std::map<uint32_t, Poly> by_key;
  for (auto& [k, b] : acc) {
    Poly p = b.build();
    if (!p.is_zero()) by_key.emplace(k, std::move(p));
  }
  sweep(by_key, nullptr, [](uint32_t) -> const Poly& { static Poly z; return z; });
  for (auto& [k, p] : by_key) out.flat(component_of(k)) += p;
  return out;
}

std::array<Poly, kDim> ibp_current(const Poly& f, const FieldVariation& delta) {
  auto dmap = field_delta_map(delta);
  auto r = ibp_general(f, dmap);
  // Identity check: vary(f) = Σ δφ E_φ + ∂_μ Υ^μ. Only A-family EL terms carry a variation.
  PolyBuilder rhs;
  for (const auto& [k, e] : r.el) {
    auto d = dmap.find(k);
    if (d != dmap.end()) rhs.add_product(d->second, e);
  }
  Poly lhs = vary_general(f, dmap, -1);
  if (lhs != rhs.build() + divergence(r.upsilon)) throw std::logic_error("ibp_current identity check failed");
  return r.upsilon;
}

FieldVariation commutator(const FieldVariation& d1, const FieldVariation& d2, int max_grade) {
  if (d1.n() != d2.n()) throw PreconditionError("commutator: dimension mismatch");
  auto f1 = d1.parameter_families(), f2 = d2.parameter_families();
  for (Family f : f1)
    if (std::find(f2.begin(), f2.end(), f) != f2.end())
      throw PreconditionError("commutator: variations must use distinct parameter families");
  auto m1 = field_delta_map(d1), m2 = field_delta_map(d2);
  FieldVariation out(d1.n());
  for (int i = 0; i < out.size(); ++i)
    out.flat(i) = vary_general(d2.flat(i), m1, max_grade) - vary_general(d1.flat(i), m2, max_grade);
  return out;
}

ComponentTensor noether_identity_residual(const ComponentTensor& E, const GaugeVariation& delta, int max_grade) {
  const int n = delta.n();
  if (E.shape() != std::vector<int>{n, kDim}) throw PreconditionError("covector shape mismatch");
  PolyBuilder pb;
  for (int i = 0; i < n * kDim; ++i) pb.add_product(E.flat(i), delta.field().flat(i), max_grade);
  return euler_lagrange(pb.build(), delta.family(), n);
}

std::vector<GradedPiece> grade_by_field_power(const Poly& f) {
  std::map<int, std::vector<Term>> by;
  for (const auto& t : f.terms()) by[t.mono.grade()].push_back(t);
  std::vector<GradedPiece> out;
  for (auto& [g, terms] : by) out.push_back({g, Poly::from_terms(std::move(terms))});
  return out;
}

// ---------------------------------------------------------------- component tensors

ComponentTensor make_covector(int n) { return ComponentTensor({n, kDim}); }

namespace {
ComponentTensor map_tensor(const ComponentTensor& t, const std::function<Poly(const Poly&)>& f) {
  ComponentTensor r(t.shape());
  for (size_t i = 0; i < t.size(); ++i) r.flat(i) = f(t.flat(i));
  return r;
}
}  // namespace

ComponentTensor grade_part(const ComponentTensor& t, int g) {
  return map_tensor(t, [g](const Poly& p) { return p.grade_part(g); });
}

ComponentTensor truncate(const ComponentTensor& t, int max_grade) {
  return map_tensor(t, [max_grade](const Poly& p) { return p.truncate(max_grade); });
}

bool is_zero(const ComponentTensor& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](const Poly& p) { return p.is_zero(); });
}

int max_grade(const ComponentTensor& t) {
  int g = -1;
  for (const auto& p : t.data()) g = std::max(g, p.max_grade());
  return g;
}

ComponentTensor add(const ComponentTensor& x, const ComponentTensor& y) {
  if (x.shape() != y.shape()) throw PreconditionError("tensor shape mismatch");
  ComponentTensor r = x;
  for (size_t i = 0; i < r.size(); ++i) r.flat(i) += y.flat(i);
  return r;
}

ComponentTensor sub(const ComponentTensor& x, const ComponentTensor& y) {
  if (x.shape() != y.shape()) throw PreconditionError("tensor shape mismatch");
  ComponentTensor r = x;
  for (size_t i = 0; i < r.size(); ++i) r.flat(i) -= y.flat(i);
  return r;
}

std::string label(const ComponentTensor& t, size_t flat_index) {
  auto idx = t.unflatten(flat_index);
  std::string s = "(";
  for (size_t d = 0; d < idx.size(); ++d) {
    if (d) s += ",";
    // Leading slot is internal (one-based); remaining slots are spacetime.
    s += std::to_string(d == 0 ? idx[d] + 1 : idx[d]);
  }
  return s + ")";
}

}  // namespace deformatics::jet
