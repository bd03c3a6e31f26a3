#include "deformatics/waves.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "deformatics/jet.hpp"
#include "deformatics/theories.hpp"

namespace deformatics {

namespace {

using cd = std::complex<double>;
using jet::Background;
constexpr int D = jet::kDim;
inline int fi(int a, int mu) { return a * D + mu; }

double eta(int mu) { return mu == 0 ? -1.0 : 1.0; }

double v_lower(const std::array<double, 3>& v, int mu) { return eta(mu) * v[mu]; }

/// v^{μν} = ε^{μνα} v_α
double v2_upper(const std::array<double, 3>& v, int mu, int nu) {
  double s = 0;
  for (int al = 0; al < D; ++al) s += Background::eps_upper(mu, nu, al) * v_lower(v, al);
  return s;
}

/// C = 1 + P ⊗ v^ν_μ with v^ν_μ = η_{μμ} v^{μν}.
Eigen::MatrixXd frame(const DispersionProblem& prob) {
  const int n = prob.n;
  Eigen::MatrixXd P = prob.internal_twist();
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(3 * n, 3 * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int mu = 0; mu < D; ++mu)
        for (int nu = 0; nu < D; ++nu) C(fi(a, mu), fi(b, nu)) += P(a, b) * eta(mu) * v2_upper(prob.v, mu, nu);
  return C;
}

std::array<cd, 3> wave_covector(const DispersionProblem& prob, cd omega) {
  return {-omega, cd(prob.kvec[0]), cd(prob.kvec[1])};
}

double scale_radius(const DispersionProblem& prob) {
  double k2 = prob.kvec[0] * prob.kvec[0] + prob.kvec[1] * prob.kvec[1];
  double vn = std::sqrt(prob.v[0] * prob.v[0] + prob.v[1] * prob.v[1] + prob.v[2] * prob.v[2]);
  double pn = prob.n ? prob.internal_twist().norm() : 0.0;
  return 1.0 + std::sqrt(prob.m * prob.m + k2) + std::abs(prob.m) * pn * vn;
}

/// Newton steps on det M(ω) with d/dω log det M = tr(M⁻¹ M'); steps leaving the trust radius are refused.
cd polish_root(const DispersionProblem& prob, cd w, double radius);

}  // namespace

void DispersionProblem::validate() const {
  if (n <= 0) throw PreconditionError("dispersion problem needs n >= 1");
  if (p.rows() != n || p.cols() != n) throw PreconditionError("torsion potential must be n×n");
  if (k.size() != 0 && (k.rows() != n || k.cols() != n)) throw PreconditionError("internal metric must be n×n");
  if ((p + p.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw PreconditionError("torsion potential is not antisymmetric");
  if (!std::isfinite(m) || !std::isfinite(p.sum())) throw PreconditionError("dispersion data must be finite");
  if (std::abs(metric().determinant()) < 1e-14) throw PreconditionError("internal metric is degenerate");
}

Eigen::MatrixXd DispersionProblem::metric() const {
  return k.size() == 0 ? Eigen::MatrixXd::Identity(n, n) : k;
}

Eigen::MatrixXd DispersionProblem::internal_twist() const { return metric().inverse() * p; }

Eigen::MatrixXcd planewave_operator(const DispersionProblem& prob, cd omega) {
  prob.validate();
  const int n = prob.n;
  auto kl = wave_covector(prob, omega);
  Eigen::MatrixXcd M = prob.m * frame(prob).cast<cd>();
  const cd I(0, 1);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu)
      for (int al = 0; al < D; ++al)
        for (int be = 0; be < D; ++be) {
          int e = Background::eps_mixed(mu, al, be);
          if (e != 0) M(fi(a, mu), fi(a, be)) += I * kl[al] * double(e);
        }
  return M;
}

Eigen::MatrixXcd dispersion_operator(const DispersionProblem& prob, cd omega) {
  Eigen::MatrixXcd M = planewave_operator(prob, omega);
  if (prob.m != 0) return M;
  auto kl = wave_covector(prob, omega);
  for (int a = 0; a < prob.n; ++a)
    for (int mu = 0; mu < D; ++mu)
      for (int nu = 0; nu < D; ++nu) M(fi(a, mu), fi(a, nu)) -= kl[mu] * eta(nu) * kl[nu];
  return M;
}

std::vector<cd> determinant_polynomial(const DispersionProblem& prob, const WaveTolerances& tol) {
  prob.validate();
  const int bound = (prob.m != 0 ? 3 : 4) * prob.n;
  const int S = bound + 1;
  const double R = scale_radius(prob);
  std::vector<cd> f(S);
  for (int j = 0; j < S; ++j) {
    cd z = std::polar(R, 2 * std::numbers::pi * j / S);
    f[j] = dispersion_operator(prob, z).determinant();
  }
  // c_l R^l = (1/S) Σ_j f_j e^{-2πi jl/S}
  std::vector<cd> scaled(S);
  double biggest = 0;
  for (int l = 0; l < S; ++l) {
    cd s = 0;
    for (int j = 0; j < S; ++j) s += f[j] * std::polar(1.0, -2 * std::numbers::pi * j * l / S);
    scaled[l] = s / double(S);
    biggest = std::max(biggest, std::abs(scaled[l]));
  }
  if (biggest == 0) throw PreconditionError("dispersion determinant vanishes identically");
  int deg = S - 1;
  while (deg > 0 && std::abs(scaled[deg]) < tol.coefficient_trim * biggest) --deg;
  std::vector<cd> c(deg + 1);
  for (int l = 0; l <= deg; ++l) c[l] = scaled[l] / std::pow(R, l);
  return c;
}

namespace {

cd polish_root(const DispersionProblem& prob, cd w, double radius) {
  const cd start = w;
  for (int it = 0; it < 8; ++it) {
    // M is at most quadratic in ω, so the symmetric difference with unit step is exact.
    Eigen::MatrixXcd M = dispersion_operator(prob, w);
    Eigen::MatrixXcd dM = (dispersion_operator(prob, w + 1.0) - dispersion_operator(prob, w - 1.0)) / 2.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    cd trace = (lu.solve(dM)).trace();
    if (!std::isfinite(std::abs(trace)) || trace == 0.0) break;
    cd next = w - 1.0 / trace;
    if (std::abs(next - start) > radius) break;
    bool done = std::abs(next - w) <= 1e-15 * std::max(1.0, std::abs(w));
    w = next;
    if (done) break;
  }
  return w;
}

}  // namespace

DispersionResult dispersion_branches(const DispersionProblem& prob, const WaveTolerances& tol, bool strict) {
  DispersionResult res;
  res.coefficients = determinant_polynomial(prob, tol);
  const int deg = static_cast<int>(res.coefficients.size()) - 1;
  if (deg == 0) return res;

  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -res.coefficients[i] / res.coefficients[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cd> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  std::sort(roots.begin(), roots.end(),
            [](cd x, cd y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); });

  // Degenerate roots come back split by about eps^(1/k). Candidate clusters are accepted when the
  // operator at their mean has a null space of full dimension; otherwise the roots stay separate.
  std::vector<std::vector<cd>> loose;
  for (cd r : roots) {
    if (!loose.empty() && std::abs(r - loose.back().back()) <= tol.cluster * std::max(1.0, std::abs(r)))
      loose.back().push_back(r);
    else
      loose.push_back({r});
  }

  Eigen::MatrixXd C = frame(prob);
  auto emit = [&](cd omega, int mult, const Eigen::MatrixXcd& M, const Eigen::JacobiSVD<Eigen::MatrixXcd>& svd) {
    const auto& sv = svd.singularValues();
    const int dim = static_cast<int>(sv.size());
    const double norm = std::max(sv(0), 1e-300);
    auto kl = wave_covector(prob, omega);
    double kn = std::max(1.0, std::abs(kl[0]) + std::abs(kl[1]) + std::abs(kl[2]));
    Eigen::MatrixXcd Mw = planewave_operator(prob, omega);
    double mnorm = std::max(Mw.norm(), 1e-300);
    for (int j = 0; j < mult; ++j) {
      Branch br;
      br.omega = omega;
      br.polarization = svd.matrixV().col(dim - 1 - j);
      br.residual = std::max((M * br.polarization).norm() / norm, (Mw * br.polarization).norm() / mnorm);
      Eigen::VectorXcd ce = C.cast<cd>() * br.polarization;
      for (int a = 0; a < prob.n; ++a) {
        cd s = 0;
        for (int mu = 0; mu < D; ++mu) s += eta(mu) * kl[mu] * ce(fi(a, mu));
        br.constraint += std::abs(s) / kn;
      }
      res.branches.push_back(std::move(br));
    }
  };
  auto warn = [&](const char* what, cd omega) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s at omega = %.12g%+.12gi", what, omega.real(), omega.imag());
    res.warnings.emplace_back(buf);
    if (strict) throw RootConditioningWarning(buf);
  };

  for (const auto& cl : loose) {
    const int mult = static_cast<int>(cl.size());
    cd mean = 0;
    for (cd x : cl) mean += x;
    mean /= double(mult);
    Eigen::MatrixXcd M = dispersion_operator(prob, mean);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int nullity = 0;
    while (nullity < mult && sv(sv.size() - 1 - nullity) <= tol.residual * std::max(sv(0), 1e-300)) ++nullity;
    if (nullity > 0) {
      emit(mean, nullity, M, svd);
      if (nullity < mult) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "defective root at omega = %.12g%+.12gi: multiplicity %d, %d polarizations",
                      mean.real(), mean.imag(), mult, nullity);
        res.notes.emplace_back(buf);
      }
      continue;
    }
    for (int i = 0; i < mult; ++i) {
      if (i > 0 && std::abs(cl[i] - cl[i - 1]) < tol.separation * std::max(1.0, std::abs(cl[i])))
        warn("unresolved root cluster", cl[i]);
      double gap = std::numeric_limits<double>::infinity();
      for (int j = 0; j < mult; ++j)
        if (j != i) gap = std::min(gap, std::abs(cl[i] - cl[j]));
      cd w = polish_root(prob, cl[i], gap / 2);
      Eigen::MatrixXcd Mi = dispersion_operator(prob, w);
      Eigen::JacobiSVD<Eigen::MatrixXcd> si(Mi, Eigen::ComputeFullV);
      emit(w, 1, Mi, si);
    }
  }
  std::stable_sort(res.branches.begin(), res.branches.end(),
                   [](const Branch& x, const Branch& y) { return x.omega.real() < y.omega.real(); });
  return res;
}

double polarization_misalignment(const DispersionProblem& prob, const Branch& b, cd* eigenvalue) {
  const int n = prob.n;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(prob.internal_twist().cast<cd>());
  const Eigen::MatrixXcd& V = es.eigenvectors();
  Eigen::MatrixXcd Vinv = V.inverse();
  Eigen::MatrixXcd E(n, D);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < D; ++mu) E(a, mu) = b.polarization(fi(a, mu));
  Eigen::MatrixXcd coords = Vinv * E;
  const double total = E.norm();
  if (total == 0) return 0;

  std::vector<bool> done(n, false);
  double best = 1;
  for (int i = 0; i < n; ++i) {
    if (done[i]) continue;
    cd lam = es.eigenvalues()(i);
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(n, D);
    for (int j = 0; j < n; ++j)
      if (std::abs(es.eigenvalues()(j) - lam) <= 1e-9 * std::max(1.0, std::abs(lam))) {
        done[j] = true;
        proj += V.col(j) * coords.row(j);
      }
    double off = (E - proj).norm() / total;
    if (off < best) {
      best = off;
      if (eigenvalue) *eigenvalue = lam;
    }
  }
  return best;
}

double twist_shift(const DispersionProblem& prob, const Branch& b) {
  double shell = std::sqrt(prob.m * prob.m + prob.kvec[0] * prob.kvec[0] + prob.kvec[1] * prob.kvec[1]);
  return b.omega.real() - (b.omega.real() >= 0 ? shell : -shell);
}

namespace {

using ShiftKey = std::pair<double, int>;

/// Shifts grouped by (rounded Im λ, sign Re ω); within a group they are sorted.
std::map<ShiftKey, std::vector<double>> grouped_shifts(const DispersionProblem& prob, const WaveTolerances& tol,
                                                       double* misalignment) {
  std::map<ShiftKey, std::vector<double>> out;
  for (const auto& b : dispersion_branches(prob, tol).branches) {
    std::complex<double> lam;
    double mis = polarization_misalignment(prob, b, &lam);
    if (misalignment) *misalignment = std::max(*misalignment, mis);
    double key = std::round(lam.imag() * 1e6) / 1e6;
    out[{key == 0 ? 0.0 : key, b.omega.real() >= 0 ? 1 : -1}].push_back(twist_shift(prob, b));
  }
  for (auto& [k, v] : out) std::sort(v.begin(), v.end());
  return out;
}

DispersionProblem scaled_velocity(const DispersionProblem& prob, double s) {
  DispersionProblem q = prob;
  for (auto& x : q.v) x *= s;
  return q;
}

}  // namespace

TwistSummary twist_summary(const DispersionProblem& prob, double slope_step, const WaveTolerances& tol) {
  prob.validate();
  TwistSummary out;
  auto plus = grouped_shifts(prob, tol, &out.max_misalignment);
  auto minus = grouped_shifts(scaled_velocity(prob, -1), tol, &out.max_misalignment);
  auto up = grouped_shifts(scaled_velocity(prob, slope_step), tol, nullptr);
  auto down = grouped_shifts(scaled_velocity(prob, -slope_step), tol, nullptr);
  for (const auto& [key, shifts] : plus) {
    auto find = [&](const std::map<ShiftKey, std::vector<double>>& m, size_t i) {
      auto it = m.find(key);
      return it != m.end() && i < it->second.size() ? it->second[i] : std::nan("");
    };
    for (size_t i = 0; i < shifts.size(); ++i) {
      TwistEntry e;
      e.eigenvalue = key.first;
      e.omega_sign = key.second;
      e.shift_plus = shifts[i];
      // Under v → −v a sorted group reverses order, so pair the i-th with the mirrored entry.
      auto it = minus.find(key);
      e.shift_minus = it != minus.end() && i < it->second.size() ? it->second[it->second.size() - 1 - i] : std::nan("");
      double hi = find(up, i);
      auto dn = down.find(key);
      double lo = dn != down.end() && i < dn->second.size() ? dn->second[dn->second.size() - 1 - i] : std::nan("");
      e.slope = (hi - lo) / (2 * slope_step);
      double odd = std::abs(e.shift_plus + e.shift_minus);
      out.odd_defect = std::isnan(odd) ? odd : std::max(out.odd_defect, odd);
      if (std::isnan(e.shift_minus) || (std::abs(e.shift_plus) > tol.residual && e.shift_plus * e.shift_minus >= 0))
        out.sign_flips = false;
      out.entries.push_back(e);
    }
  }
  return out;
}

std::vector<SweepRow> dispersion_sweep(const DispersionProblem& prob, double kmax, int steps, const WaveTolerances& tol) {
  if (steps < 0) throw PreconditionError("sweep needs a nonnegative step count");
  double kn = std::hypot(prob.kvec[0], prob.kvec[1]);
  std::array<double, 2> dir = kn > 0 ? std::array<double, 2>{prob.kvec[0] / kn, prob.kvec[1] / kn}
                                     : std::array<double, 2>{1, 0};
  std::vector<SweepRow> rows;
  for (int i = 0; i <= steps; ++i) {
    DispersionProblem q = prob;
    double s = steps == 0 ? 0 : kmax * i / steps;
    q.kvec = {s * dir[0], s * dir[1]};
    SweepRow row;
    row.knorm = s;
    for (const auto& b : dispersion_branches(q, tol).branches) row.omega.push_back(b.omega.real());
    std::sort(row.omega.begin(), row.omega.end());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.omega.size());
  std::ostringstream os;
  os << "k";
  for (size_t i = 1; i <= width; ++i) os << ",omega_" << i;
  os << "\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g", r.knorm);
    os << buf;
    for (size_t i = 0; i < width; ++i) {
      os << ",";
      if (i < r.omega.size()) {
        std::snprintf(buf, sizeof buf, "%.12g", r.omega[i]);
        os << buf;
      }
    }
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- Ỹ map

namespace {

Eigen::MatrixXd to_eigen(const RMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).get_d();
  return out;
}

void validate_point(const PointState& s) {
  const int n = s.k.n();
  if (n == 0 || s.c.n() != n || s.p.n() != n) throw PreconditionError("point state algebra dimensions disagree");
  if (static_cast<int>(s.A.size()) != 3 * n || static_cast<int>(s.star_f.size()) != 3 * n)
    throw PreconditionError("point state needs 3n values of A and *F");
  for (double x : s.A)
    if (!std::isfinite(x)) throw PreconditionError("point state A values must be finite");
  for (double x : s.star_f)
    if (!std::isfinite(x)) throw PreconditionError("point state *F values must be finite");
}

Eigen::MatrixXd point_frame(const PointState& s) {
  Background bg;
  bg.v = s.v;
  return to_eigen(torsion_frame(s.k, s.p, bg));
}

}  // namespace

Eigen::MatrixXd ymap_matrix(const PointState& s) {
  validate_point(s);
  const int n = s.k.n();
  Eigen::MatrixXd Y = point_frame(s);
  if (s.kappa_ft == 0) return Y;
  RTensor B = ft_coadjoint(s.c, s.k);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double bc = B({a, b, c}).get_d();
        if (bc == 0) continue;
        for (int mu = 0; mu < D; ++mu)
          for (int nu = 0; nu < D; ++nu)
            for (int al = 0; al < D; ++al) {
              int e = Background::eps_mixed(mu, nu, al);
              if (e != 0) Y(fi(a, mu), fi(b, nu)) -= s.kappa_ft * bc * e * s.A[fi(c, al)];
            }
      }
  return Y;
}

YmapSolution ymap_invert(const PointState& s, int series_order, double det_tolerance) {
  Eigen::MatrixXd Y = ymap_matrix(s);
  YmapSolution out;
  out.det = Y.determinant();
  if (!(std::abs(out.det) >= det_tolerance)) throw SingularY("Y-map is singular at this point", out.det);
  Eigen::Map<const Eigen::VectorXd> f(s.star_f.data(), static_cast<Eigen::Index>(s.star_f.size()));
  Eigen::VectorXd K = Y.fullPivLu().solve(f);
  out.residual = (Y * K - f).norm();
  out.K.assign(K.data(), K.data() + K.size());

  Eigen::MatrixXd C = point_frame(s);
  Eigen::MatrixXd Cinv = C.inverse();
  Eigen::MatrixXd X = C - Y;
  Eigen::VectorXd term = Cinv * f;
  Eigen::VectorXd sum = term;
  for (int j = 1; j <= series_order; ++j) {
    term = Cinv * (X * term);
    sum += term;
  }
  out.series.assign(sum.data(), sum.data() + sum.size());
  out.series_difference = (sum - K).cwiseAbs().maxCoeff();
  return out;
}

// ---------------------------------------------------------------- finite-difference currents

namespace {

struct FieldSampler {
  const PlaneWave& w;
  Eigen::MatrixXd kmat, pmat;

  explicit FieldSampler(const PlaneWave& wave) : w(wave), kmat(wave.prob.metric()), pmat(wave.prob.p) {}

  Eigen::VectorXd field(const std::array<double, 3>& x) const {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(3 * w.prob.n);
    for (const auto& md : w.modes) {
      cd k0 = -(md.omega + w.detune);
      cd phase = std::exp(cd(0, 1) * (k0 * x[0] + md.kvec[0] * x[1] + md.kvec[1] * x[2]));
      F += (md.amplitude * md.polarization * phase).real();
    }
    return F;
  }

  /// J^μ_a at x, index a*3+μ.
  Eigen::VectorXd current(const std::array<double, 3>& x) const {
    const int n = w.prob.n;
    Eigen::VectorXd F = field(x), J = Eigen::VectorXd::Zero(3 * n);
    for (int a = 0; a < n; ++a)
      for (int mu = 0; mu < D; ++mu)
        for (int b = 0; b < n; ++b)
          for (int nu = 0; nu < D; ++nu) {
            double g = (mu == nu ? eta(mu) : 0.0) * kmat(a, b) + v2_upper(w.prob.v, mu, nu) * pmat(a, b);
            J(fi(a, mu)) += w.prob.m * g * F(fi(b, nu));
          }
    return J;
  }

  /// T_{μν} at x, index μ*3+ν.
  Eigen::VectorXd stress(const std::array<double, 3>& x) const {
    const int n = w.prob.n;
    Eigen::VectorXd F = field(x), T = Eigen::VectorXd::Zero(9);
    double FF = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int al = 0; al < D; ++al) FF += kmat(a, b) * eta(al) * F(fi(a, al)) * F(fi(b, al));
    for (int mu = 0; mu < D; ++mu)
      for (int nu = 0; nu < D; ++nu) {
        double t = mu == nu ? -0.5 * eta(mu) * FF : 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            t += kmat(a, b) * F(fi(a, mu)) * F(fi(b, nu));
            double vn = v_lower(w.prob.v, nu);
            if (pmat(a, b) == 0 || vn == 0) continue;
            for (int al = 0; al < D; ++al)
              for (int be = 0; be < D; ++be) {
                int e = Background::eps_mixed(mu, al, be);
                if (e != 0) t -= 0.5 * pmat(a, b) * e * vn * F(fi(a, al)) * F(fi(b, be));
              }
          }
        T(mu * D + nu) = t;
      }
    return T;
  }
};

std::array<double, 3> shifted(std::array<double, 3> x, int mu, double d) {
  x[mu] += d;
  return x;
}

double slope(const std::vector<double>& e) {
  size_t L = e.size();
  if (L < 2 || e[L - 1] == 0 || e[L - 2] == 0) return 0;
  return std::log2(e[L - 2] / e[L - 1]);
}

}  // namespace

WaveMode PlaneWave::mode(const DispersionProblem& prob, const Branch& b, double amplitude) {
  return {b.omega, b.polarization, prob.kvec, amplitude};
}

bool FdConvergence::converges(double slope_tolerance) const {
  if (exact_zero) return true;
  return std::abs(current_slope - 2) <= slope_tolerance && std::abs(stress_slope - 2) <= slope_tolerance;
}

FdConvergence current_fd_check(const PlaneWave& wave, double h0, int levels) {
  wave.prob.validate();
  for (const auto& md : wave.modes)
    if (md.polarization.size() != 3 * wave.prob.n) throw PreconditionError("polarization must have 3n entries");
  if (!(h0 > 0) || levels < 2) throw PreconditionError("finite-difference check needs h0 > 0 and at least two levels");
  const std::array<std::array<double, 3>, 3> samples{{{0.3, -0.2, 0.5}, {1.1, 0.4, -0.7}, {-0.6, 0.9, 0.2}}};
  FieldSampler fs(wave);
  const int n = wave.prob.n;
  FdConvergence rep;
  double h = h0;
  for (int l = 0; l < levels; ++l, h /= 2) {
    double dj = 0, dt = 0;
    for (const auto& x : samples) {
      Eigen::VectorXd divJ = Eigen::VectorXd::Zero(n), divT = Eigen::VectorXd::Zero(3);
      for (int mu = 0; mu < D; ++mu) {
        Eigen::VectorXd Jp = fs.current(shifted(x, mu, h)), Jm = fs.current(shifted(x, mu, -h));
        for (int a = 0; a < n; ++a) divJ(a) += (Jp(fi(a, mu)) - Jm(fi(a, mu))) / (2 * h);
        Eigen::VectorXd Tp = fs.stress(shifted(x, mu, h)), Tm = fs.stress(shifted(x, mu, -h));
        for (int nu = 0; nu < D; ++nu) divT(nu) += eta(mu) * (Tp(mu * D + nu) - Tm(mu * D + nu)) / (2 * h);
      }
      dj = std::max(dj, divJ.cwiseAbs().maxCoeff());
      dt = std::max(dt, divT.cwiseAbs().maxCoeff());
    }
    rep.h.push_back(h);
    rep.current_divergence.push_back(dj);
    rep.stress_divergence.push_back(dt);
  }
  rep.exact_zero = std::all_of(rep.current_divergence.begin(), rep.current_divergence.end(), [](double e) { return e == 0; }) &&
                   std::all_of(rep.stress_divergence.begin(), rep.stress_divergence.end(), [](double e) { return e == 0; });
  rep.current_slope = slope(rep.current_divergence);
  rep.stress_slope = slope(rep.stress_divergence);
  return rep;
}

}  // namespace deformatics
