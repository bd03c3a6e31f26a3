#include "deformatics/linsolve.hpp"

#include <algorithm>
#include <map>

namespace deformatics {

namespace {

using Row = std::vector<std::pair<int, Rational>>;  // sorted by column

Row canonical(const SparseVector& v) {
  std::map<int, Rational> acc;
  for (const auto& [c, x] : v) acc[c] += x;
  Row out;
  out.reserve(acc.size());
  for (auto& [c, x] : acc)
    if (!is_zero(x)) out.emplace_back(c, std::move(x));
  return out;
}

// r -= f * p, both sorted.
Row axpy(const Row& r, const Rational& f, const Row& p) {
  Row out;
  out.reserve(r.size() + p.size());
  size_t i = 0, j = 0;
  while (i < r.size() || j < p.size()) {
    if (j == p.size() || (i < r.size() && r[i].first < p[j].first)) {
      out.push_back(r[i++]);
    } else if (i == r.size() || p[j].first < r[i].first) {
      out.emplace_back(p[j].first, -f * p[j].second);
      ++j;
    } else {
      Rational v = r[i].second - f * p[j].second;
      if (!is_zero(v)) out.emplace_back(r[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

void SparseSystem::add_row(const SparseVector& coeffs, const Rational& rhs) { rows_.emplace_back(coeffs, rhs); }

LinearSolution SparseSystem::solve(bool want_null_basis) const {
  // Pivot rows have leading coefficient 1 at their pivot column; the right-hand side rides along
  // as column `unknowns_`.
  std::vector<Row> pivots;
  std::vector<int> pivot_of(unknowns_, -1);
  LinearSolution sol;
  const int rhs_col = unknowns_;

  for (const auto& [coeffs, rhs] : rows_) {
    Row r = canonical(coeffs);
    if (!is_zero(rhs)) r.emplace_back(rhs_col, rhs);
    size_t pos = 0;
    while (pos < r.size() && r[pos].first < rhs_col) {
      int c = r[pos].first;
      int p = pivot_of[c];
      if (p < 0) {
        ++pos;
        continue;
      }
      Rational f = r[pos].second;
      r = axpy(r, f, pivots[p]);
      // Entries before pos are untouched because the pivot row starts at c.
    }
    // Find first entry that is not eliminated.
    int lead = -1;
    for (const auto& [c, x] : r) {
      if (c < rhs_col && pivot_of[c] < 0) {
        lead = c;
        break;
      }
    }
    if (lead < 0) {
      if (!r.empty()) sol.consistent = false;
      continue;
    }
    // Rows only contain non-pivot columns now; normalize at the lead.
    Rational inv;
    for (const auto& [c, x] : r)
      if (c == lead) inv = 1 / x;
    Row normalized;
    normalized.reserve(r.size());
    for (const auto& [c, x] : r)
      if (c >= lead) normalized.emplace_back(c, x * inv);
    // Entries before lead cannot exist: all of them were pivot columns and got eliminated.
    pivot_of[lead] = static_cast<int>(pivots.size());
    pivots.push_back(std::move(normalized));
  }

  sol.rank = static_cast<int>(pivots.size());
  if (!sol.consistent) return sol;

  // Back substitution in decreasing pivot column order.
  std::vector<int> order;
  for (int c = 0; c < unknowns_; ++c)
    if (pivot_of[c] >= 0) order.push_back(c);
  std::reverse(order.begin(), order.end());

  auto back_substitute = [&](std::vector<Rational>& x, bool with_rhs) {
    for (int c : order) {
      const Row& row = pivots[pivot_of[c]];
      Rational v = 0;
      for (const auto& [j, a] : row) {
        if (j == c) continue;
        if (j == rhs_col) {
          if (with_rhs) v += a;
        } else if (!is_zero(x[j])) {
          v -= a * x[j];
        }
      }
      x[c] = v;
    }
  };

  sol.particular.assign(unknowns_, Rational(0));
  back_substitute(sol.particular, true);

  if (want_null_basis) {
    for (int f = 0; f < unknowns_; ++f) {
      if (pivot_of[f] >= 0) continue;
      std::vector<Rational> x(unknowns_, Rational(0));
      x[f] = 1;
      back_substitute(x, false);
      SparseVector v;
      for (int j = 0; j < unknowns_; ++j)
        if (!is_zero(x[j])) v.emplace_back(j, x[j]);
      sol.null_basis.push_back(std::move(v));
    }
  }
  return sol;
}

}  // namespace deformatics
