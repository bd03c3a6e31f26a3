#pragma once

#include <array>
#include <utility>
#include <vector>

#include "deformatics/jet.hpp"

namespace deformatics::jet {

/// Identifies one unknown coefficient: proposer kind, slot (component or internal index),
/// generator index and monomial.
struct CandidateKey {
  int kind = 0;
  int slot = 0;
  int gen = 0;
  Monomial mono;
  bool operator<(const CandidateKey& o) const;
};

/// Column contribution of a candidate: (target component, polynomial).
using SparseColumn = std::vector<std::pair<int, Poly>>;

/// Proposes candidate unknowns able to produce a given monomial in a given target component.
class Proposer {
 public:
  virtual ~Proposer() = default;
  virtual void propose(int comp, const Monomial& t, std::vector<CandidateKey>& out) const = 0;
  virtual SparseColumn column(const CandidateKey& key) const = 0;
  int kind = 0;
};

struct SearchLimits {
  size_t max_candidates = 40000;
};

struct Decomposition {
  bool solved = false;
  bool capped = false;
  size_t candidates = 0;
  size_t equations = 0;
  std::vector<std::pair<CandidateKey, Rational>> coefficients;
};

/// Finds coefficients u with target = Σ u_key column(key), closing the candidate set under
/// "every monomial of every column is explained". The result is exact whenever solved.
Decomposition decompose(const std::vector<Poly>& target, const std::vector<const Proposer*>& proposers,
                        const SearchLimits& limits = {});

/// Multiplier candidates q·G_j placed in any target component, q a monomial.
class MultiplierProposer : public Proposer {
 public:
  /// max_degree bounds the field (A-family) degree of q; max_order bounds derivative orders in q;
  /// products are truncated at max_grade when it is nonnegative.
  MultiplierProposer(std::vector<Poly> generators, int max_degree, int max_order, int max_grade);
  void propose(int comp, const Monomial& t, std::vector<CandidateKey>& out) const override;
  SparseColumn column(const CandidateKey& key) const override;
  const std::vector<Poly>& generators() const { return gens_; }

 private:
  std::vector<Poly> gens_;
  int max_degree_, max_order_, max_grade_;
  int min_gen_grade_ = 0;
};

/// Candidates ∂_ν q placed in components a*3+ν: pure-gauge terms ∂_μ Z^a with Z^a = Σ u q.
class GradientProposer : public Proposer {
 public:
  explicit GradientProposer(int max_grade) : max_grade_(max_grade) {}
  void propose(int comp, const Monomial& t, std::vector<CandidateKey>& out) const override;
  SparseColumn column(const CandidateKey& key) const override;

 private:
  int max_grade_;
};

/// ∂_I E_j for every component j and every multi-index |I| <= order.
std::vector<Poly> prolonged_generators(const std::vector<Poly>& equations, int order);

/// Monomial quotient t / g when g divides t.
bool divide_monomial(const Monomial& t, const Monomial& g, Monomial& q);

/// Sums coefficient·monomial for the given kind and slot.
Poly collect(const Decomposition& d, int kind, int slot);

}  // namespace deformatics::jet
