#include "deformatics/liealg.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace deformatics {

Rational parse_rational(std::string_view s) {
  std::string t(s);
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char ch) { return std::isspace(ch); }), t.end());
  auto valid_int = [](std::string_view v) {
    size_t i = 0;
    if (!v.empty() && (v[0] == '-' || v[0] == '+')) i = 1;
    if (i == v.size()) return false;
    for (; i < v.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(v[i]))) return false;
    return true;
  };
  auto slash = t.find('/');
  std::string num = t.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den)) throw ParseError("malformed rational '" + t + "'");
  if (num[0] == '+') num.erase(0, 1);
  if (den[0] == '+') den.erase(0, 1);
  mpz_class n(num), d(den);
  if (d == 0) throw ParseError("zero denominator in '" + t + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// ---------------------------------------------------------------- RMatrix

RMatrix RMatrix::identity(int n) {
  RMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RMatrix RMatrix::operator*(const RMatrix& o) const {
  RMatrix out(r_, o.c_);
  for (int i = 0; i < r_; ++i)
    for (int k = 0; k < c_; ++k) {
      const Rational& x = (*this)(i, k);
      if (x == 0) continue;
      for (int j = 0; j < o.c_; ++j)
        if (o(k, j) != 0) out(i, j) += x * o(k, j);
    }
  return out;
}

RMatrix RMatrix::operator+(const RMatrix& o) const {
  RMatrix out = *this;
  for (size_t i = 0; i < d_.size(); ++i) out.d_[i] += o.d_[i];
  return out;
}

RMatrix RMatrix::operator-(const RMatrix& o) const {
  RMatrix out = *this;
  for (size_t i = 0; i < d_.size(); ++i) out.d_[i] -= o.d_[i];
  return out;
}

RMatrix RMatrix::transpose() const {
  RMatrix out(c_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

Rational RMatrix::determinant() const {
  if (r_ != c_) throw PreconditionError("determinant of non-square matrix");
  RMatrix a = *this;
  Rational det = 1;
  for (int col = 0; col < r_; ++col) {
    int piv = -1;
    for (int r = col; r < r_; ++r)
      if (a(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      for (int j = 0; j < c_; ++j) std::swap(a(piv, j), a(col, j));
      det = -det;
    }
    det *= a(col, col);
    for (int r = col + 1; r < r_; ++r) {
      if (a(r, col) == 0) continue;
      Rational f = a(r, col) / a(col, col);
      for (int j = col; j < c_; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

RMatrix RMatrix::inverse() const {
  if (r_ != c_) throw PreconditionError("inverse of non-square matrix");
  int n = r_;
  RMatrix a = *this, inv = identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (a(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw PreconditionError("singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    Rational p = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) /= p;
      inv(col, j) /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      Rational f = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

bool RMatrix::is_symmetric() const {
  if (r_ != c_) return false;
  for (int i = 0; i < r_; ++i)
    for (int j = i + 1; j < c_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool RMatrix::is_antisymmetric() const {
  if (r_ != c_) return false;
  for (int i = 0; i < r_; ++i)
    for (int j = i; j < c_; ++j)
      if ((*this)(i, j) != -(*this)(j, i)) return false;
  return true;
}

bool RMatrix::is_zero() const {
  return std::all_of(d_.begin(), d_.end(), [](const Rational& x) { return x == 0; });
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RMatrix& a) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < a.cols() && row < a.rows(); ++col) {
    int piv = -1;
    for (int r = row; r < a.rows(); ++r)
      if (a(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(row, j));
    Rational p = a(row, col);
    for (int j = 0; j < a.cols(); ++j) a(row, j) /= p;
    for (int r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, col) == 0) continue;
      Rational f = a(r, col);
      for (int j = 0; j < a.cols(); ++j) a(r, j) -= f * a(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

int RMatrix::rank() const {
  RMatrix a = *this;
  return static_cast<int>(rref(a).size());
}

std::vector<std::vector<Rational>> RMatrix::null_space() const {
  RMatrix a = *this;
  auto pivots = rref(a);
  std::vector<bool> is_pivot(c_, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (int f = 0; f < c_; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(c_);
    v[f] = 1;
    for (size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a(static_cast<int>(i), f);
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---------------------------------------------------------------- types

InternalSpace::InternalSpace(RMatrix k) : k_(std::move(k)) {
  if (k_.rows() <= 0 || k_.rows() != k_.cols()) throw PreconditionError("internal metric must be square, n > 0");
  if (!k_.is_symmetric()) throw PreconditionError("internal metric k must be symmetric");
  if (k_.determinant() == 0) throw PreconditionError("internal metric k is degenerate");
  kinv_ = k_.inverse();
}

InternalSpace InternalSpace::identity(int n) { return InternalSpace(RMatrix::identity(n)); }

StructureConstants::StructureConstants(int n) : n_(n), c_({n, n, n}) {}

StructureConstants::StructureConstants(RTensor c) : n_(c.shape().at(0)), c_(std::move(c)) {
  if (c_.rank() != 3 || c_.shape()[1] != n_ || c_.shape()[2] != n_)
    throw PreconditionError("structure constants must have shape n x n x n");
  if (!is_antisymmetric()) throw PreconditionError("structure constants must satisfy c^a_{bc} = -c^a_{cb}");
}

StructureConstants StructureConstants::unchecked(RTensor c) {
  StructureConstants s;
  s.n_ = c.shape().at(0);
  s.c_ = std::move(c);
  return s;
}

void StructureConstants::set(int a, int b, int c, const Rational& value) {
  c_({a, b, c}) = value;
  c_({a, c, b}) = -value;
}

bool StructureConstants::is_antisymmetric() const {
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = b; c < n_; ++c)
        if (c_({a, b, c}) != -c_({a, c, b})) return false;
  return true;
}

StructureConstants StructureConstants::scaled(const Rational& s) const {
  StructureConstants out = *this;
  for (auto& x : out.c_.data()) x *= s;
  return out;
}

StructureConstants StructureConstants::su2() {
  StructureConstants s(3);
  s.set(0, 1, 2, 1);
  s.set(1, 2, 0, 1);
  s.set(2, 0, 1, 1);
  return s;
}

StructureConstants StructureConstants::abelian(int n) { return StructureConstants(n); }

StructureConstants StructureConstants::translations_dilation() {
  StructureConstants s(3);
  s.set(0, 0, 2, 1);
  s.set(1, 1, 2, 1);
  return s;
}

StructureConstants StructureConstants::direct_sum(const StructureConstants& x, const StructureConstants& y) {
  int n = x.n() + y.n();
  StructureConstants s(n);
  for (int a = 0; a < x.n(); ++a)
    for (int b = 0; b < x.n(); ++b)
      for (int c = 0; c < x.n(); ++c) s.c_({a, b, c}) = x(a, b, c);
  int o = x.n();
  for (int a = 0; a < y.n(); ++a)
    for (int b = 0; b < y.n(); ++b)
      for (int c = 0; c < y.n(); ++c) s.c_({o + a, o + b, o + c}) = y(a, b, c);
  return s;
}

TorsionPotential::TorsionPotential(RMatrix p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols()) throw PreconditionError("torsion potential must be square");
  if (!p_.is_antisymmetric()) throw PreconditionError("torsion potential must be antisymmetric");
}

TorsionPotential TorsionPotential::bivector(const std::vector<Rational>& u, const std::vector<Rational>& w) {
  int n = static_cast<int>(u.size());
  RMatrix p(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) p(a, b) = u[a] * w[b] - w[a] * u[b];
  return TorsionPotential(p);
}

void TorsionPotential::set(int a, int b, const Rational& value) {
  if (a == b) throw PreconditionError("diagonal entries of a torsion potential are zero");
  p_(a, b) = value;
  p_(b, a) = -value;
}

TorsionTensor::TorsionTensor(RTensor q) : q_(std::move(q)) {
  int n = q_.shape().at(0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (q_({a, b, c}) != -q_({a, c, b})) throw PreconditionError("torsion tensor must be antisymmetric");
}

// ---------------------------------------------------------------- reports

std::optional<ResidualEntry> ResidualReport::max_entry() const {
  if (entries.empty()) return std::nullopt;
  auto it = std::max_element(entries.begin(), entries.end(),
                             [](const ResidualEntry& x, const ResidualEntry& y) { return abs(x.value) < abs(y.value); });
  return *it;
}

void ResidualReport::add_tensor(const std::string& relation, const RTensor& t) {
  relations.push_back(relation);
  for (size_t i = 0; i < t.size(); ++i) {
    if (t.flat(i) == 0) continue;
    auto idx = t.unflatten(i);
    for (auto& x : idx) ++x;
    entries.push_back({relation, idx, t.flat(i)});
  }
}

void ResidualReport::merge(const ResidualReport& other) {
  relations.insert(relations.end(), other.relations.begin(), other.relations.end());
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

std::string ResidualReport::summary() const {
  if (passed()) return "pass";
  std::ostringstream os;
  auto e = *max_entry();
  os << entries.size() << " nonzero residual component(s); max at " << e.relation << "[";
  for (size_t i = 0; i < e.index.size(); ++i) os << (i ? "," : "") << e.index[i];
  os << "] = " << format_rational(e.value);
  return os.str();
}

// ---------------------------------------------------------------- symmetrization

namespace {

void permutations_with_sign(int k, std::vector<std::pair<std::vector<int>, int>>& out) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    int inv = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inv;
    out.emplace_back(perm, inv % 2 ? -1 : 1);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

RTensor sym_impl(const RTensor& t, const std::vector<int>& slots, bool anti) {
  std::vector<std::pair<std::vector<int>, int>> perms;
  permutations_with_sign(static_cast<int>(slots.size()), perms);
  Rational weight(1, static_cast<long>(perms.size()));
  RTensor out(t.shape());
  for (size_t i = 0; i < t.size(); ++i) {
    auto idx = t.unflatten(i);
    Rational acc = 0;
    for (const auto& [perm, sign] : perms) {
      auto src = idx;
      for (size_t s = 0; s < slots.size(); ++s) src[slots[s]] = idx[slots[perm[s]]];
      const Rational& v = t.at(src);
      if (v == 0) continue;
      if (anti && sign < 0)
        acc -= v;
      else
        acc += v;
    }
    out.flat(i) = acc * weight;
  }
  return out;
}

}  // namespace

RTensor antisymmetrize(const RTensor& t, const std::vector<int>& slots) { return sym_impl(t, slots, true); }
RTensor symmetrize(const RTensor& t, const std::vector<int>& slots) { return sym_impl(t, slots, false); }

// ---------------------------------------------------------------- operations

RTensor jacobi_defect(const StructureConstants& c) {
  int n = c.n();
  RTensor t({n, n, n, n});  // (e, a, b, c): c^d_{bc} c^e_{ad}
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int cc = 0; cc < n; ++cc) {
          Rational s = 0;
          for (int d = 0; d < n; ++d) s += c(d, b, cc) * c(e, a, d);
          t({e, a, b, cc}) = s;
        }
  return antisymmetrize(t, {1, 2, 3});
}

RMatrix cartan_killing(const StructureConstants& c) {
  int n = c.n();
  RMatrix k(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Rational s = 0;
      for (int d = 0; d < n; ++d)
        for (int cc = 0; cc < n; ++cc) s += c(d, a, cc) * c(cc, b, d);
      k(a, b) = -s;
    }
  return k;
}

RTensor lower_first(const StructureConstants& c, const InternalSpace& k) {
  int n = c.n();
  RTensor out({n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc) {
        Rational s = 0;
        for (int d = 0; d < n; ++d) s += k.k(a, d) * c(d, b, cc);
        out({a, b, cc}) = s;
      }
  return out;
}

namespace {

void require_dims(int n1, int n2, const char* what) {
  if (n1 != n2) throw PreconditionError(std::string("dimension mismatch: ") + what);
}

}  // namespace

ResidualReport check_ym_relations(const StructureConstants& c, const InternalSpace& k) {
  require_dims(c.n(), k.n(), "structure constants vs metric");
  RTensor low = lower_first(c, k);
  ResidualReport rep;
  rep.add_tensor("ym.sym_bc", symmetrize(low, {1, 2}));
  rep.add_tensor("ym.sym_ab", symmetrize(low, {0, 1}));
  rep.add_tensor("ym.jacobi", jacobi_defect(c));
  return rep;
}

RTensor ft_coadjoint(const StructureConstants& f, const InternalSpace& k) {
  int n = f.n();
  require_dims(n, k.n(), "structure constants vs metric");
  RTensor kf({n, n, n});  // k_{de} f^e_{bc} as (d, b, c)
  for (int d = 0; d < n; ++d)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Rational s = 0;
        for (int e = 0; e < n; ++e) s += k.k(d, e) * f(e, b, c);
        kf({d, b, c}) = s;
      }
  RTensor out({n, n, n});
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d) {
        Rational s = 0;
        for (int b = 0; b < n; ++b) s += k.kinv(a, b) * kf({d, b, c});
        out({a, c, d}) = s;
      }
  return out;
}

ResidualReport check_ft_relations(const StructureConstants& f, const InternalSpace& k) {
  int n = f.n();
  require_dims(n, k.n(), "structure constants vs metric");
  ResidualReport rep;
  rep.add_tensor("ft.lower_antisymmetry", symmetrize(f.tensor(), {1, 2}));
  RTensor B = ft_coadjoint(f, k);
  RTensor Blow({n, n, n});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Rational s = 0;
        for (int d = 0; d < n; ++d) s += k.k(a, d) * B({d, b, c});
        Blow({a, b, c}) = s;
      }
  rep.add_tensor("ft.coadjoint_skew", symmetrize(Blow, {0, 1}));
  // Integrability: B_{xa}^e B_{bc}^x antisymmetrized over (a, b, c), with the last slot raised by k^{-1}.
  // Since B_{bc}^x = f^x_{bc}, this vanishes exactly when f satisfies the Jacobi identity.
  RTensor Bup({n, n, n});  // B_{bc}^e = B_{bcd} k^{de}
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c)
      for (int e = 0; e < n; ++e) {
        Rational s = 0;
        for (int d = 0; d < n; ++d) s += Blow({b, c, d}) * k.kinv(d, e);
        Bup({b, c, e}) = s;
      }
  RTensor t({n, n, n, n});  // (e, a, b, c): B_{xa}^e B_{bc}^x
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          Rational s = 0;
          for (int x = 0; x < n; ++x) s += Bup({x, a, e}) * Bup({b, c, x});
          t({e, a, b, c}) = s;
        }
  rep.add_tensor("ft.integrability", antisymmetrize(t, {1, 2, 3}));
  return rep;
}

TorsionTensor torsion_from_potential(const TorsionPotential& p, const StructureConstants& c,
                                     const InternalSpace& k) {
  int n = c.n();
  require_dims(n, k.n(), "structure constants vs metric");
  require_dims(n, p.n(), "structure constants vs torsion potential");
  RTensor t({n, n, n});  // (e, b, c): p_{de} c^d_{bc}
  for (int e = 0; e < n; ++e)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc) {
        Rational s = 0;
        for (int d = 0; d < n; ++d) s += p(d, e) * c(d, b, cc);
        t({e, b, cc}) = s;
      }
  RTensor alt = antisymmetrize(t, {0, 1, 2});
  RTensor q({n, n, n});
  Rational w(3, 2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc) {
        Rational s = 0;
        for (int e = 0; e < n; ++e) s += k.kinv(a, e) * alt({e, b, cc});
        q({a, b, cc}) = w * s;
      }
  return TorsionTensor(std::move(q));
}

namespace {

struct CompatParts {
  RTensor mixed;  // 4 a_{e[c|[a} B^e_{b]|d]} + a^e_{cd} B_{abe}
  RTensor quad;   // -2 B^e_{[b|c} B_{e|a]d}
};

CompatParts compat_parts(const StructureConstants& a, const StructureConstants& b, const InternalSpace& k) {
  int n = a.n();
  require_dims(n, b.n(), "a vs b");
  require_dims(n, k.n(), "algebra vs metric");
  RTensor B = ft_coadjoint(b, k);
  RTensor alow = lower_first(a, k);
  RTensor Blow({n, n, n});
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        Rational s = 0;
        for (int d = 0; d < n; ++d) s += k.k(x, d) * B({d, y, z});
        Blow({x, y, z}) = s;
      }
  RTensor t1({n, n, n, n}), t2({n, n, n, n}), t3({n, n, n, n});
  for (int ia = 0; ia < n; ++ia)
    for (int ib = 0; ib < n; ++ib)
      for (int ic = 0; ic < n; ++ic)
        for (int id = 0; id < n; ++id) {
          Rational s1 = 0, s2 = 0, s3 = 0;
          for (int e = 0; e < n; ++e) {
            s1 += alow({e, ic, ia}) * B({e, ib, id});
            s2 += a(e, ic, id) * Blow({ia, ib, e});
            s3 += B({e, ib, ic}) * Blow({e, ia, id});
          }
          t1({ia, ib, ic, id}) = s1;
          t2({ia, ib, ic, id}) = s2;
          t3({ia, ib, ic, id}) = s3;
        }
  RTensor alt1 = antisymmetrize(antisymmetrize(t1, {0, 1}), {2, 3});
  RTensor alt3 = antisymmetrize(t3, {0, 1});
  CompatParts parts{RTensor({n, n, n, n}), RTensor({n, n, n, n})};
  for (size_t i = 0; i < alt1.size(); ++i) {
    parts.mixed.flat(i) = 4 * alt1.flat(i) + t2.flat(i);
    parts.quad.flat(i) = -2 * alt3.flat(i);
  }
  return parts;
}

}  // namespace

RTensor combined_compat_residual(const StructureConstants& a, const StructureConstants& b,
                                 const InternalSpace& k, const Rational& m, const Rational& kappa) {
  auto parts = compat_parts(a, b, k);
  RTensor out = parts.mixed;
  for (size_t i = 0; i < out.size(); ++i) out.flat(i) += m * kappa * parts.quad.flat(i);
  return out;
}

ResidualReport check_combined_compat(const StructureConstants& a, const StructureConstants& b,
                                     const InternalSpace& k, const Rational& m, const Rational& kappa) {
  if (kappa == 0) throw PreconditionError("coupling ratio kappa must be nonzero");
  ResidualReport rep;
  rep.add_tensor("combined.compat", combined_compat_residual(a, b, k, m, kappa));
  return rep;
}

KappaSolution solve_combined_kappa(const StructureConstants& a, const StructureConstants& b,
                                   const InternalSpace& k, const Rational& m) {
  auto parts = compat_parts(a, b, k);
  KappaSolution sol;
  std::optional<Rational> kappa;
  bool quad_zero = true;
  for (size_t i = 0; i < parts.mixed.size(); ++i) {
    Rational coeff = m * parts.quad.flat(i);
    const Rational& rhs = parts.mixed.flat(i);
    if (coeff == 0) {
      if (rhs != 0) return {KappaSolution::Kind::NoSolution, 0};
      continue;
    }
    quad_zero = false;
    Rational cand = -rhs / coeff;
    if (kappa && *kappa != cand) return {KappaSolution::Kind::NoSolution, 0};
    kappa = cand;
  }
  if (quad_zero) return {KappaSolution::Kind::Unconstrained, 0};
  if (*kappa == 0) return {KappaSolution::Kind::NoSolution, 0};
  return {KappaSolution::Kind::Unique, *kappa};
}

RTensor torsion_obstruction_residual(const StructureConstants& a, const StructureConstants& b,
                                     const TorsionPotential& p, const Rational& m, const Rational& kappa) {
  int n = a.n();
  require_dims(n, b.n(), "a vs b");
  require_dims(n, p.n(), "algebra vs torsion potential");
  RTensor t({n, n, n});
  Rational mk = m * kappa;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        Rational s = 0;
        for (int d = 0; d < n; ++d) {
          if (p(d, x) == 0) continue;
          s += p(d, x) * (a(d, y, z) - mk * b(d, y, z));
        }
        t({x, y, z}) = s;
      }
  return antisymmetrize(t, {0, 1});
}

ResidualReport check_torsion_obstruction(const StructureConstants& a, const StructureConstants& b,
                                         const TorsionPotential& p, const Rational& m,
                                         const Rational& kappa) {
  ResidualReport rep;
  rep.add_tensor("torsion.obstruction", torsion_obstruction_residual(a, b, p, m, kappa));
  return rep;
}

std::vector<TorsionPotential> solve_torsion_obstruction_massless(const StructureConstants& a) {
  int n = a.n();
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  int rows = n * n * n;
  RMatrix m(rows, static_cast<int>(pairs.size()));
  StructureConstants zero(n);
  for (size_t col = 0; col < pairs.size(); ++col) {
    TorsionPotential p(n);
    p.set(pairs[col].first, pairs[col].second, 1);
    RTensor r = torsion_obstruction_residual(a, zero, p, 0, 0);
    for (int i = 0; i < rows; ++i) m(i, static_cast<int>(col)) = r.flat(i);
  }
  std::vector<TorsionPotential> basis;
  for (const auto& v : m.null_space()) {
    TorsionPotential p(n);
    for (size_t col = 0; col < pairs.size(); ++col)
      if (v[col] != 0) p.set(pairs[col].first, pairs[col].second, v[col]);
    basis.push_back(p);
  }
  return basis;
}

}  // namespace deformatics
