#include "deformatics/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "deformatics/theories.hpp"

namespace deformatics {

namespace {

using Rng = std::mt19937_64;

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Rational nonzero_rational(Rng& rng, int span, int max_den) {
  int num = 0;
  while (num == 0) num = pick(rng, -span, span);
  Rational q(num, pick(rng, 1, max_den));
  q.canonicalize();
  return q;
}

std::string format_constants(const StructureConstants& c) {
  std::ostringstream os;
  os << "c:";
  for (int a = 0; a < c.n(); ++a)
    for (int b = 0; b < c.n(); ++b)
      for (int d = b + 1; d < c.n(); ++d)
        if (!is_zero(c(a, b, d))) os << " [" << a + 1 << "," << b + 1 << "," << d + 1 << "]=" << format_rational(c(a, b, d));
  return os.str();
}

std::string format_potential(const TorsionPotential& p) {
  std::ostringstream os;
  os << "p:";
  for (int a = 0; a < p.n(); ++a)
    for (int b = a + 1; b < p.n(); ++b)
      if (!is_zero(p(a, b))) os << " [" << a + 1 << "," << b + 1 << "]=" << format_rational(p(a, b));
  return os.str();
}

std::string format_vector(const std::array<Rational, 3>& v) {
  return "v: (" + format_rational(v[0]) + ", " + format_rational(v[1]) + ", " + format_rational(v[2]) + ")";
}

BuildOptions unchecked() {
  BuildOptions o;
  o.checked = false;
  return o;
}

/// Gauge invariance first; the hierarchy only runs on invariant theories.
void verify(const TheorySpec& t, int max_order, TrialResult& r) {
  r.gauge_invariant = check_gauge_invariance(t).passed;
  if (!r.gauge_invariant) return;
  HierarchyReport h = verify_hierarchy(t, max_order);
  r.first_failure = h.first_failure();
  r.passed = h.passed();
}

void gate(const ResidualReport& rep, TrialResult& r) {
  r.violated = !rep.passed();
  r.gate = rep.summary();
}

/// Drawn data plus the exact evaluation of the gate and the verification.
using Evaluation = std::function<void(TrialResult&)>;

StructureConstants random_constants(Rng& rng, int n) {
  StructureConstants c(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = b + 1; d < n; ++d) c.set(a, b, d, pick(rng, -1, 1));
  return c;
}

Evaluation jacobi_trial(Rng& rng, TrialResult& r) {
  StructureConstants c = random_constants(rng, 3);
  for (int attempt = 0; attempt < 64 && all_zero(jacobi_defect(c)); ++attempt) c = random_constants(rng, 3);
  const Rational m = pick(rng, 0, 2);
  r.data = format_constants(c) + "; m: " + format_rational(m);
  return [c, m](TrialResult& r) {
    InternalSpace k = InternalSpace::identity(3);
    gate(check_ym_relations(c, k), r);
    verify(build_ym_cs(c, k, 1, m, unchecked()), 2, r);
  };
}

Evaluation ym_trial(Rng& rng, TrialResult& r) {
  StructureConstants c = StructureConstants::su2();
  int a = pick(rng, 0, 2), b = pick(rng, 0, 1);
  int d = pick(rng, b + 1, 2);
  c.set(a, b, d, c(a, b, d) + nonzero_rational(rng, 2, 2));
  const Rational m = pick(rng, 0, 2);
  r.data = format_constants(c) + "; m: " + format_rational(m);
  return [c, m](TrialResult& r) {
    InternalSpace k = InternalSpace::identity(3);
    gate(check_ym_relations(c, k), r);
    verify(build_ym_cs(c, k, 1, m, unchecked()), 2, r);
  };
}

Evaluation ft_trial(Rng& rng, TrialResult& r) {
  // Up to three draws favour violations; a draw that still satisfies Jacobi is kept as a control.
  StructureConstants f;
  for (int attempt = 0; attempt < 3 && (attempt == 0 || all_zero(jacobi_defect(f))); ++attempt) {
    f = StructureConstants::translations_dilation();
    int changes = pick(rng, 1, 2);
    for (int i = 0; i < changes; ++i) {
      int a = pick(rng, 0, 2), b = pick(rng, 0, 1);
      f.set(a, b, pick(rng, b + 1, 2), pick(rng, -1, 1));
    }
  }
  RMatrix km(3, 3);
  for (int i = 0; i < 3; ++i) km(i, i) = pick(rng, 1, 3);
  r.data = format_constants(f) + "; k: diag(" + format_rational(km(0, 0)) + ", " + format_rational(km(1, 1)) + ", " +
           format_rational(km(2, 2)) + ")";
  return [f, km](TrialResult& r) {
    InternalSpace k(km);
    gate(check_ft_relations(f, k), r);
    // The FT integrability condition first appears at order 2, which needs N = 3.
    verify(build_ft_truncated(f, k, 1, 3, unchecked()), 2, r);
  };
}

Evaluation combined_trial(Rng& rng, TrialResult& r) {
  StructureConstants c = StructureConstants::su2();
  const Rational m = pick(rng, 1, 3);
  Rational ratio = 0;
  // The ratio must stay nonzero for the relation to be meaningful.
  while (ratio == 0) ratio = 1 / m + nonzero_rational(rng, 2, 3);
  r.data = "su2; m: " + format_rational(m) + "; kappa: 1/1; kappa_ft: " + format_rational(ratio);
  return [c, m, ratio](TrialResult& r) {
    InternalSpace k = InternalSpace::identity(3);
    gate(check_combined_compat(c, c, k, m, ratio), r);
    BuildOptions o = unchecked();
    o.kappa_ft = ratio;
    verify(build_torsion_ym_ft_cs(c, TorsionPotential(3), {0, 0, 0}, k, m, 1, 2, o), 1, r);
  };
}

Evaluation torsion_trial(Rng& rng, TrialResult& r) {
  StructureConstants c = StructureConstants::su2();
  TorsionPotential p(3);
  std::array<Rational, 3> v{0, 0, 0};
  // Redraw until the torsion frame is invertible so the theory exists.
  do {
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) p.set(a, b, pick(rng, -1, 1));
    v = {0, 0, 0};
    while (v[0] == 0 && v[1] == 0 && v[2] == 0)
      for (auto& x : v) x = pick(rng, -1, 1);
  } while (torsion_frame(InternalSpace::identity(3), p, jet::Background{v}).determinant() == 0);
  const Rational kappa = nonzero_rational(rng, 2, 2);
  r.data = "su2; m: 0/1; kappa: " + format_rational(kappa) + "; " + format_potential(p) + "; " + format_vector(v);
  return [c, p, v, kappa](TrialResult& r) {
    gate(check_torsion_obstruction(c, c, p, 0, 0), r);
    BuildOptions o = unchecked();
    o.kappa_ft = Rational(0);
    verify(build_torsion_ym_ft_cs(c, p, v, InternalSpace::identity(3), 0, kappa, 2, o), 1, r);
  };
}

Evaluation gravity_trial(Rng& rng, TrialResult& r) {
  const bool rotation = pick(rng, 0, 1) == 0;
  const Rational w = nonzero_rational(rng, 2, 2), t = nonzero_rational(rng, 2, 2);
  KillingVectorSet kvs =
      rotation ? KillingVectorSet::rotation_translation(w, t) : KillingVectorSet::boost_translation(w, t);
  std::array<Rational, 3> v{0, 0, 0};
  while (v[0] == 0 && v[1] == 0 && v[2] == 0)
    for (auto& x : v) x = pick(rng, -1, 1);
  TorsionPotential p(2);
  p.set(0, 1, nonzero_rational(rng, 2, 2));
  const Rational m = pick(rng, 0, 1);
  r.data = std::string(rotation ? "rotation" : "boost") + "-translation w: " + format_rational(w) +
           " t: " + format_rational(t) + "; " + format_potential(p) + "; " + format_vector(v) + "; m: " + format_rational(m);
  return [kvs, p, v, m](TrialResult& r) {
    jet::Background bg;
    bg.v = v;
    gate(check_gravity_obstruction(kvs, bg), r);
    verify(build_gravity_like(kvs, InternalSpace::identity(2), p, v, m, 2, unchecked()), 1, r);
  };
}

}  // namespace

std::string campaign_name(Campaign c) {
  switch (c) {
    case Campaign::Jacobi: return "jacobi";
    case Campaign::YangMills: return "ym";
    case Campaign::FreedmanTownsend: return "ft";
    case Campaign::Combined: return "combined";
    case Campaign::TorsionMassless: return "torsion";
    case Campaign::Gravity: return "gravity";
  }
  return "unknown";
}

const std::vector<Campaign>& all_campaigns() {
  static const std::vector<Campaign> all{Campaign::Jacobi,   Campaign::YangMills,       Campaign::FreedmanTownsend,
                                         Campaign::Combined, Campaign::TorsionMassless, Campaign::Gravity};
  return all;
}

Campaign parse_campaign(const std::string& name) {
  for (Campaign c : all_campaigns())
    if (campaign_name(c) == name) return c;
  throw PreconditionError("unknown campaign '" + name + "'");
}

ScanSummary ScanResult::summary() const {
  ScanSummary s;
  for (const auto& t : trials) {
    ++s.trials;
    if (t.violated) ++s.violations;
    else ++s.controls;
    if (t.spurious()) ++s.spurious_passes;
    if (t.missed()) ++s.control_failures;
  }
  return s;
}

std::uint64_t trial_seed(std::uint64_t seed, int index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

/// Results keyed by drawn data; trials are pure in their data, so repeated draws reuse them.
class TrialCache {
 public:
  std::optional<TrialResult> find(const std::string& data) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(data);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void insert(const TrialResult& r) {
    std::lock_guard<std::mutex> lock(mu_);
    map_.emplace(r.data, r);
  }

 private:
  std::mutex mu_;
  std::map<std::string, TrialResult> map_;
};

TrialResult evaluate_trial(Campaign c, std::uint64_t seed, int index, TrialCache* cache) {
  TrialResult r;
  r.index = index;
  r.sub_seed = trial_seed(seed, index);
  Rng rng(r.sub_seed);
  Evaluation eval;
  switch (c) {
    case Campaign::Jacobi: eval = jacobi_trial(rng, r); break;
    case Campaign::YangMills: eval = ym_trial(rng, r); break;
    case Campaign::FreedmanTownsend: eval = ft_trial(rng, r); break;
    case Campaign::Combined: eval = combined_trial(rng, r); break;
    case Campaign::TorsionMassless: eval = torsion_trial(rng, r); break;
    case Campaign::Gravity: eval = gravity_trial(rng, r); break;
  }
  if (cache) {
    if (auto hit = cache->find(r.data)) {
      hit->index = r.index;
      hit->sub_seed = r.sub_seed;
      return *hit;
    }
  }
  try {
    eval(r);
  } catch (const Error& e) {
    r.error = e.what();
    r.passed = false;
  }
  if (cache) cache->insert(r);
  return r;
}

}  // namespace

TrialResult run_trial(Campaign c, std::uint64_t seed, int index) { return evaluate_trial(c, seed, index, nullptr); }

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DEFORMATICS_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n > 0 ? n : cap, cap);
  }
  return std::max(n, 1);
}

ScanResult run_campaign(Campaign c, std::uint64_t seed, const ScanOptions& opt) {
  ScanResult res;
  res.campaign = c;
  res.seed = seed;
  if (opt.trials <= 0) return res;
  const int workers = worker_count(opt.threads);
  int counted = 0, next = 0;
  TrialCache cache;
  while (counted < opt.trials) {
    // Fixed-size batches keep the selected trial set independent of the worker count.
    const int batch = opt.count_violations ? 16 : opt.trials;
    std::vector<TrialResult> out(batch);
    std::atomic<int> cursor{0};
    auto work = [&] {
      for (int i; (i = cursor.fetch_add(1)) < batch;) out[i] = evaluate_trial(c, seed, next + i, &cache);
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < std::min(workers, batch); ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (auto& t : out) {
      if (counted == opt.trials) break;
      if (t.violated || !opt.count_violations) ++counted;
      res.trials.push_back(std::move(t));
    }
    next += batch;
    if (next > 1000 * opt.trials) throw PreconditionError("campaign draws too few violations");
  }
  return res;
}

}  // namespace deformatics
