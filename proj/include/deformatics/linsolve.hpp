#pragma once

#include <utility>
#include <vector>

#include "deformatics/rational.hpp"

namespace deformatics {

/// Sparse row as (column, value) pairs; order is irrelevant on input.
using SparseVector = std::vector<std::pair<int, Rational>>;

struct LinearSolution {
  bool consistent = true;
  int rank = 0;
  std::vector<Rational> particular;      // free unknowns set to zero
  std::vector<SparseVector> null_basis;  // one vector per free unknown
};

/// Exact sparse Gaussian elimination over the rationals.
class SparseSystem {
 public:
  explicit SparseSystem(int unknowns) : unknowns_(unknowns) {}

  int unknowns() const { return unknowns_; }
  size_t rows() const { return rows_.size(); }
  void add_row(const SparseVector& coeffs, const Rational& rhs = 0);
  LinearSolution solve(bool want_null_basis = false) const;

 private:
  int unknowns_;
  std::vector<std::pair<SparseVector, Rational>> rows_;
};

}  // namespace deformatics
