#include "deformatics/ansatz.hpp"

#include <deque>
#include <map>
#include <unordered_map>

#include "deformatics/linsolve.hpp"

namespace deformatics::jet {

bool CandidateKey::operator<(const CandidateKey& o) const {
  if (kind != o.kind) return kind < o.kind;
  if (slot != o.slot) return slot < o.slot;
  if (gen != o.gen) return gen < o.gen;
  return mono < o.mono;
}

bool divide_monomial(const Monomial& t, const Monomial& g, Monomial& q) {
  Monomial r;
  int i = 0, j = 0;
  while (i < t.degree()) {
    if (j < g.degree() && t[i] == g[j]) {
      ++i;
      ++j;
    } else if (j < g.degree() && g[j] < t[i]) {
      return false;
    } else {
      r = r.with(t[i]);
      ++i;
    }
  }
  if (j < g.degree()) return false;
  q = r;
  return true;
}

namespace {

struct RowKey {
  int comp;
  Monomial mono;
  bool operator==(const RowKey& o) const { return comp == o.comp && mono == o.mono; }
};
struct RowKeyHash {
  size_t operator()(const RowKey& r) const { return r.mono.hash() * 31 + static_cast<size_t>(r.comp); }
};

}  // namespace

Decomposition decompose(const std::vector<Poly>& target, const std::vector<const Proposer*>& proposers,
                        const SearchLimits& limits) {
  Decomposition out;
  std::unordered_map<RowKey, int, RowKeyHash> rows;
  std::vector<RowKey> row_list;
  std::deque<int> pending;
  auto row_of = [&](int comp, const Monomial& m) {
    auto [it, inserted] = rows.try_emplace(RowKey{comp, m}, static_cast<int>(row_list.size()));
    if (inserted) {
      row_list.push_back({comp, m});
      pending.push_back(it->second);
    }
    return it->second;
  };

  for (size_t c = 0; c < target.size(); ++c)
    for (const auto& t : target[c].terms()) row_of(static_cast<int>(c), t.mono);

  std::map<CandidateKey, int> cand_index;
  std::vector<CandidateKey> cand_list;
  std::vector<std::vector<std::pair<int, Rational>>> columns;  // (row, value)
  std::vector<CandidateKey> proposals;

  while (!pending.empty()) {
    int r = pending.front();
    pending.pop_front();
    if (out.capped) continue;
    RowKey rk = row_list[r];
    for (const Proposer* p : proposers) {
      proposals.clear();
      p->propose(rk.comp, rk.mono, proposals);
      for (auto& key : proposals) {
        key.kind = p->kind;
        if (cand_index.count(key)) continue;
        if (cand_list.size() >= limits.max_candidates) {
          out.capped = true;
          break;
        }
        cand_index.emplace(key, static_cast<int>(cand_list.size()));
        cand_list.push_back(key);
        std::vector<std::pair<int, Rational>> col;
        for (const auto& [comp, poly] : p->column(key))
          for (const auto& t : poly.terms()) col.emplace_back(row_of(comp, t.mono), t.coef);
        columns.push_back(std::move(col));
      }
      if (out.capped) break;
    }
  }

  // Transpose into equations per row.
  std::vector<SparseVector> eqs(row_list.size());
  for (size_t j = 0; j < columns.size(); ++j)
    for (const auto& [r, v] : columns[j]) eqs[r].emplace_back(static_cast<int>(j), v);
  std::vector<Rational> rhs(row_list.size());
  for (size_t c = 0; c < target.size(); ++c)
    for (const auto& t : target[c].terms()) rhs[rows.at(RowKey{static_cast<int>(c), t.mono})] = t.coef;

  SparseSystem sys(static_cast<int>(cand_list.size()));
  for (size_t r = 0; r < eqs.size(); ++r) sys.add_row(eqs[r], rhs[r]);
  out.candidates = cand_list.size();
  out.equations = eqs.size();
  LinearSolution sol = sys.solve(false);
  out.solved = sol.consistent;
  if (sol.consistent)
    for (size_t j = 0; j < cand_list.size(); ++j)
      if (!deformatics::is_zero(sol.particular[j])) out.coefficients.emplace_back(cand_list[j], sol.particular[j]);
  return out;
}

MultiplierProposer::MultiplierProposer(std::vector<Poly> generators, int max_degree, int max_order, int max_grade)
    : gens_(std::move(generators)), max_degree_(max_degree), max_order_(max_order), max_grade_(max_grade) {
  int g = 1 << 20;
  for (const auto& p : gens_)
    if (!p.is_zero()) g = std::min(g, p.min_grade());
  min_gen_grade_ = g == (1 << 20) ? 0 : g;
}

void MultiplierProposer::propose(int comp, const Monomial& t, std::vector<CandidateKey>& out) const {
  Monomial q;
  for (size_t j = 0; j < gens_.size(); ++j) {
    for (const auto& term : gens_[j].terms()) {
      if (!divide_monomial(t, term.mono, q)) continue;
      if (q.grade() > max_degree_) continue;
      if (max_grade_ >= 0 && q.grade() + min_gen_grade_ > max_grade_) continue;
      bool ok = true;
      for (uint32_t k : q)
        if (key_order(k) > max_order_) ok = false;
      if (!ok) continue;
      out.push_back({kind, comp, static_cast<int>(j), q});
    }
  }
}

SparseColumn MultiplierProposer::column(const CandidateKey& key) const {
  return {{key.slot, mul_trunc(Poly::monomial(key.mono, 1), gens_[key.gen], max_grade_)}};
}

void GradientProposer::propose(int comp, const Monomial& t, std::vector<CandidateKey>& out) const {
  int a = comp / kDim, mu = comp % kDim;
  for (int i = 0; i < t.degree(); ++i) {
    if (i > 0 && t[i] == t[i - 1]) continue;
    Family f = key_family(t[i]);
    if (f == Family::X || f == Family::Rigid) continue;
    auto c = key_counts(t[i]);
    if (c[mu] == 0) continue;
    Var v = Var::from_key(t[i]);
    --v.counts[mu];
    Monomial q = t.without(i).with(v.key());
    // Gradients of variables at D_max leave the jet space, so such candidates cannot appear.
    bool representable = true;
    for (int j = 0; j < q.degree() && representable; ++j) {
      auto cj = key_counts(q[j]);
      if (cj[0] + cj[1] + cj[2] >= dmax()) representable = false;
    }
    if (representable) out.push_back({kind, a, 0, q});
  }
}

SparseColumn GradientProposer::column(const CandidateKey& key) const {
  SparseColumn col;
  Poly q = Poly::monomial(key.mono, 1);
  for (int nu = 0; nu < kDim; ++nu) col.emplace_back(key.slot * kDim + nu, total_derivative(q, nu).truncate(max_grade_));
  return col;
}

std::vector<Poly> prolonged_generators(const std::vector<Poly>& equations, int order) {
  std::vector<Poly> out;
  for (const auto& e : equations) {
    for (int o = 0; o <= order; ++o)
      for (int c0 = o; c0 >= 0; --c0)
        for (int c1 = o - c0; c1 >= 0; --c1) {
          int c2 = o - c0 - c1;
          out.push_back(total_derivative(e, std::array<int, kDim>{c0, c1, c2}));
        }
  }
  return out;
}

Poly collect(const Decomposition& d, int kind, int slot) {
  PolyBuilder pb;
  for (const auto& [key, v] : d.coefficients)
    if (key.kind == kind && key.slot == slot) pb.add(key.mono, v);
  return pb.build();
}

}  // namespace deformatics::jet
