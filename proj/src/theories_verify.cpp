#include <algorithm>
#include <map>

#include "deformatics/linsolve.hpp"
#include "deformatics/theories.hpp"

namespace deformatics {

using namespace jet;

namespace {

constexpr int D = kDim;

std::vector<NamedResidual> nonzero_entries(const ComponentTensor& t) {
  std::vector<NamedResidual> out;
  for (size_t i = 0; i < t.size(); ++i)
    if (!t.flat(i).is_zero()) out.push_back({label(t, i), t.flat(i)});
  return out;
}

ComponentTensor from_variation(const FieldVariation& v) {
  ComponentTensor t({v.n(), D});
  for (int i = 0; i < v.size(); ++i) t.flat(i) = v.flat(i);
  return t;
}

std::vector<Poly> equation_list(const TheorySpec& t) {
  std::vector<Poly> eqs;
  for (size_t i = 0; i < t.field_equation.size(); ++i)
    if (!t.field_equation.flat(i).is_zero()) eqs.push_back(t.field_equation.flat(i));
  return eqs;
}

/// State carried across orders of the commutator equation.
struct ClosureState {
  const TheorySpec* theory = nullptr;
  FieldVariation comm;                 // [δ1, δ2]A through max_order
  std::vector<Poly> zeta3;             // accumulated ζ3 (all grades so far)
  bool off_shell_so_far = true;
};

ClosureState start_closure(const TheorySpec& t, int max_order) {
  ClosureState s;
  s.theory = &t;
  GaugeVariation d1 = t.variation.with_family(Family::Z1);
  GaugeVariation d2 = t.variation.with_family(Family::Z2);
  s.comm = commutator(d1, d2, max_order);
  s.zeta3.assign(t.n, Poly());
  return s;
}

/// Deviation [δ1,δ2]A − δ_{ζ3}A through grade k.
FieldVariation deviation(const ClosureState& s, int k) {
  FieldVariation dz = s.theory->variation.with_parameter(s.zeta3).truncate(k);
  return s.comm.truncate(k) - dz;
}

OrderReport closure_step(ClosureState& s, int k, const HierarchyOptions& opt, bool& capped) {
  const TheorySpec& t = *s.theory;
  OrderReport rep;
  rep.order = k;
  capped = false;
  FieldVariation dev = deviation(s, k);
  FieldVariation Rk = dev.grade_part(k);

  ComponentTensor curl({t.n, D, D});
  for (int a = 0; a < t.n; ++a)
    for (int mu = 0; mu < D; ++mu)
      for (int nu = mu + 1; nu < D; ++nu)
        curl({a, mu, nu}) = total_derivative(Rk(a, nu), mu) - total_derivative(Rk(a, mu), nu);
  rep.curl_residual = nonzero_entries(curl);

  std::vector<Poly> target;
  GradientProposer grad(k);
  grad.kind = 0;
  SearchLimits lim;
  lim.max_candidates = opt.max_candidates;

  if (rep.curl_residual.empty() && s.off_shell_so_far) {
    for (int i = 0; i < Rk.size(); ++i) target.push_back(Rk.flat(i));
    Decomposition d = decompose(target, {&grad}, lim);
    if (d.solved) {
      rep.closure = ClosureMode::OffShell;
      rep.zeta3.assign(t.n, Poly());
      for (int a = 0; a < t.n; ++a) {
        rep.zeta3[a] = collect(d, 0, a);
        s.zeta3[a] += rep.zeta3[a];
      }
      return rep;
    }
  }

  // On-shell: deviation through grade k = ∂ζ3' + Σ M ∂_I E.
  target.clear();
  for (int i = 0; i < dev.size(); ++i) target.push_back(dev.flat(i));
  MultiplierProposer mult(prolonged_generators(equation_list(t), 1), opt.multiplier_degree, dmax(), k);
  mult.kind = 1;
  Decomposition d = decompose(target, {&grad, &mult}, lim);
  capped = d.capped;
  if (d.solved) {
    rep.closure = ClosureMode::OnShell;
    s.off_shell_so_far = false;
    rep.zeta3.assign(t.n, Poly());
    for (int a = 0; a < t.n; ++a) {
      Poly z = collect(d, 0, a);
      s.zeta3[a] += z;
      rep.zeta3[a] = z.grade_part(k);
    }
    return rep;
  }
  rep.closure = d.capped ? ClosureMode::Inconclusive : ClosureMode::Failed;
  rep.closure_residual = nonzero_entries(from_variation(Rk));
  return rep;
}

void check_order(const TheorySpec& t, int order) {
  if (order < 0) throw PreconditionError("hierarchy order must be nonnegative");
  if (order > t.supported_order())
    throw PreconditionError("order " + std::to_string(order) + " exceeds the truncation-supported order " +
                            std::to_string(t.supported_order()));
}

}  // namespace

std::string closure_mode_name(ClosureMode m) {
  switch (m) {
    case ClosureMode::OffShell: return "off-shell";
    case ClosureMode::OnShell: return "on-shell";
    case ClosureMode::Failed: return "failed";
    case ClosureMode::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

bool HierarchyReport::passed() const {
  return std::all_of(orders.begin(), orders.end(), [](const OrderReport& o) { return o.passed(); });
}

int HierarchyReport::first_failure() const {
  for (const auto& o : orders)
    if (!o.passed()) return o.order;
  return -1;
}

HierarchyReport verify_hierarchy(const TheorySpec& t, int max_order, const HierarchyOptions& opt) {
  check_order(t, max_order);
  HierarchyReport rep;
  rep.theory = t.name;
  rep.max_order = max_order;
  ComponentTensor lie = lie_derivative_covector(t.field_equation, t.variation, max_order);
  ClosureState s = start_closure(t, max_order);
  for (int k = 0; k <= max_order; ++k) {
    bool capped = false;
    OrderReport o = closure_step(s, k, opt, capped);
    o.lie_residual = nonzero_entries(grade_part(lie, k));
    rep.orders.push_back(std::move(o));
  }
  return rep;
}

ClosureResult closure_residual(const TheorySpec& t, int order, const HierarchyOptions& opt) {
  if (order != 0 && order != 1) throw PreconditionError("closure_residual supports orders 0 and 1");
  check_order(t, order);
  ClosureState s = start_closure(t, order);
  OrderReport last;
  for (int k = 0; k <= order; ++k) {
    bool capped = false;
    last = closure_step(s, k, opt, capped);
    if (last.closure == ClosureMode::Failed || last.closure == ClosureMode::Inconclusive)
      throw MultiplierSearchInconclusive("closure at order " + std::to_string(k) +
                                         " has no decomposition within the multiplier bound");
  }
  ClosureResult r;
  r.mode = last.closure;
  r.zeta3 = last.zeta3;
  // Residual after removing ∂ζ3: zero off shell, or a combination of field-equation multiples.
  FieldVariation dev = deviation(s, order).grade_part(order);
  r.residual = from_variation(dev);
  return r;
}

InvarianceReport check_gauge_invariance(const TheorySpec& t) {
  InvarianceReport rep;
  if (t.exact()) {
    Poly v = vary(t.lagrangian, t.variation);
    DivergenceCheck c = is_total_divergence(v);
    rep.passed = c.is_divergence;
    rep.witness = c.witness;
    if (!c.is_divergence)
      for (const auto& g : grade_by_field_power(v))
        if (!is_total_divergence(g.poly).is_divergence) {
          rep.failing_grade = g.grade;
          break;
        }
    return rep;
  }
  int N = t.truncation_order;
  Poly v = vary(t.lagrangian, t.variation, N + 1);
  Poly kept = v.truncate(N);
  Poly discarded = v.high_part(N + 1);
  rep.discarded_min_grade = discarded.min_grade();
  for (const auto& g : grade_by_field_power(kept)) {
    DivergenceCheck c = is_total_divergence(g.poly);
    if (!c.is_divergence) {
      rep.passed = false;
      rep.failing_grade = g.grade;
      rep.witness = c.witness;
      break;
    }
  }
  return rep;
}

ComponentTensor noether_residual(const TheorySpec& t) {
  return noether_identity_residual(t.field_equation, t.variation, t.exact() ? -1 : t.truncation_order);
}

UniquenessReport uniqueness_probe(int n, int weight) {
  if (weight < 0 || weight > 1) throw PreconditionError("uniqueness probe supports derivative weight 0 or 1");
  std::vector<uint32_t> vars;
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) {
      vars.push_back(A(a, mu).terms()[0].mono[0]);
      if (weight >= 1)
        for (int nu = 0; nu < D; ++nu) vars.push_back(dA(a, mu, {nu}).terms()[0].mono[0]);
    }
  std::sort(vars.begin(), vars.end());
  std::vector<Monomial> monos;
  const int V = static_cast<int>(vars.size());
  for (int i = 0; i < V; ++i)
    for (int j = i; j < V; ++j)
      for (int l = j; l < V; ++l) {
        Monomial m = Monomial::of(vars[i]).with(vars[j]).with(vars[l]);
        if (m.weight() <= weight) monos.push_back(m);
      }

  GaugeVariation d0 = abelian_variation(n);
  SparseSystem sys(static_cast<int>(monos.size()));
  std::vector<ComponentTensor> el(monos.size());
  std::map<std::pair<int, Monomial>, SparseVector> by_row;
  for (size_t j = 0; j < monos.size(); ++j) {
    Poly q = Poly::monomial(monos[j], 1);
    ComponentTensor g = euler_lagrange(vary(q, d0), Family::Z1, n);
    for (size_t c = 0; c < g.size(); ++c)
      for (const auto& term : g.flat(c).terms())
        by_row[{static_cast<int>(c), term.mono}].emplace_back(static_cast<int>(j), term.coef);
    el[j] = euler_lagrange(q, Family::A, n);
  }
  for (const auto& [key, row] : by_row) sys.add_row(row, 0);
  LinearSolution sol = sys.solve(true);

  UniquenessReport rep;
  rep.monomials = static_cast<int>(monos.size());
  rep.invariant_dimension = static_cast<int>(sol.null_basis.size());
  for (const auto& vec : sol.null_basis) {
    bool zero = true;
    for (size_t c = 0; c < static_cast<size_t>(n) * D && zero; ++c) {
      PolyBuilder pb;
      for (const auto& [j, coef] : vec) pb.add(el[j].flat(c), coef);
      if (!pb.build().is_zero()) zero = false;
    }
    if (!zero) ++rep.nonzero_field_equations;
  }
  return rep;
}

}  // namespace deformatics
