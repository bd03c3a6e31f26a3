#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "deformatics/io.hpp"

using namespace deformatics;
using io::Json;

namespace {

enum Exit { kPass = 0, kFail = 1, kInputError = 2 };

struct Global {
  std::uint64_t seed = 0;
  std::optional<int> order;
  std::optional<int> dmax;
  std::string out;
  std::string format = "json";
};

struct Outcome {
  Json result = Json::object();
  bool passed = true;
  std::string summary;
};

const char* verdict(bool ok) { return ok ? "pass" : "fail"; }

// ---------------------------------------------------------------- fan-out

/// Runs independent sections on up to worker_count() threads; results keep declaration order.
std::vector<Json> run_sections(const std::vector<std::function<Json()>>& tasks) {
  std::vector<Json> out(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i; (i = next++) < tasks.size();) {
      try {
        out[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::min<int>(worker_count(), static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------- check-algebra

Json rational_matrix(const RMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(format_rational(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Outcome check_algebra(const io::AlgebraInput& in) {
  Outcome o;
  const StructureConstants& c = in.c;
  Json checks = Json::object();
  std::string line;
  auto add = [&](const std::string& key, const std::string& tag, const ResidualReport& rep) {
    checks[key] = io::to_json(rep);
    o.passed = o.passed && rep.passed();
    line += (line.empty() ? "" : ", ") + tag + ": " + verdict(rep.passed());
  };
  ResidualReport anti;
  anti.add_tensor("antisymmetry", symmetrize(c.tensor(), {1, 2}));
  add("antisymmetry", "antisymmetry", anti);
  ResidualReport jac;
  jac.add_tensor("jacobi", jacobi_defect(c));
  add("jacobi", "jacobi", jac);
  add("ym", "ym", check_ym_relations(c, in.k));
  add("ft", "ft", check_ft_relations(c, in.k));
  if (in.p) add("torsion_massless", "torsion-massless", check_torsion_obstruction(c, c, *in.p, 0, 0));

  RMatrix ck = cartan_killing(c);
  std::string space = io::format_space(solve_torsion_obstruction_massless(c));
  Json props{{"cartan_killing", rational_matrix(ck)},
             {"semisimple", ck.determinant() != 0},
             {"torsion_massless_space", space}};
  if (in.p) {
    TorsionTensor q = torsion_from_potential(*in.p, c, in.k);
    ResidualReport comps;
    comps.add_tensor("torsion", q.tensor());
    Json entries = Json::array();
    for (const auto& e : comps.entries) {
      Json idx = Json::array();
      for (int i : e.index) idx.push_back(i);
      entries.push_back({{"index", idx}, {"value", format_rational(e.value)}});
    }
    props["torsion_tensor"] = {{"zero", q.is_zero()}, {"components", entries}};
  }
  o.result = Json{{"n", in.n}, {"checks", checks}, {"properties", props}};
  o.summary = line + ", torsion-massless-space: " + space;
  return o;
}

// ---------------------------------------------------------------- verify-theory

Json build_json(const TheorySpec& t, const io::TheoryInput& in, int order) {
  Json v = Json::array();
  for (const auto& x : t.background.v) v.push_back(format_rational(x));
  return Json{{"status", "pass"},
              {"model", model_name(t.model)},
              {"n", t.n},
              {"m", format_rational(t.m)},
              {"kappa", format_rational(t.kappa)},
              {"kappa_ft", format_rational(t.kappa_ft)},
              {"v", v},
              {"truncation_order", t.truncation_order},
              {"checked", in.checked},
              {"hierarchy_order", order}};
}

Json noether_json(const TheorySpec& t) {
  jet::ComponentTensor r = noether_residual(t);
  Json entries = Json::array();
  for (size_t i = 0; i < r.size(); ++i)
    if (!r.flat(i).is_zero()) entries.push_back({{"component", jet::label(r, i)}, {"value", r.flat(i).to_string()}});
  return Json{{"status", verdict(entries.empty())}, {"entries", entries}};
}

Json currents_json(const io::TheoryInput& in, const TheorySpec& t) {
  // The explicit torsion current and stress are only stated at N = 2.
  std::optional<TheorySpec> reduced;
  if (t.model == Model::TorsionYmFtCs && t.truncation_order > 2) {
    io::TheoryInput low = in;
    low.N = 2;
    reduced = io::build_theory(low);
  }
  const TheorySpec& u = reduced ? *reduced : t;
  Json j;
  try {
    CurrentReport r = check_current_and_stress(u);
    bool ok = r.rigid_identity;
    if (u.model == Model::TorsionYmFtCs)
      ok = ok && r.current_on_shell && r.stress_on_shell && r.stress_symmetric != r.torsion_present;
    j = Json{{"status", verdict(ok)}, {"truncation_order", u.truncation_order}};
    j.update(io::to_json(r));
  } catch (const MultiplierSearchInconclusive& e) {
    j = Json{{"status", "inconclusive"}, {"truncation_order", u.truncation_order}, {"error", e.what()}};
  }
  return j;
}

Outcome verify_theory(const io::TheoryInput& in, const Global& g) {
  Outcome o;
  TheorySpec t;
  try {
    t = io::build_theory(in);
  } catch (const AlgebraRejected& e) {
    o.passed = false;
    o.result = Json{{"build", {{"status", "fail"}, {"error", e.what()}, {"residual", io::to_json(e.report())}}}};
    o.summary = "build: fail (algebra rejected)";
    return o;
  } catch (const ObstructionFailed& e) {
    o.passed = false;
    o.result = Json{{"build", {{"status", "fail"}, {"error", e.what()}, {"residual", io::to_json(e.report())}}}};
    o.summary = "build: fail (obstruction)";
    return o;
  }
  const int order = g.order ? *g.order : in.order ? *in.order : io::default_order(t);
  auto sections = run_sections({
      [&] { return io::to_json(check_gauge_invariance(t)); },
      [&] { return io::to_json(verify_hierarchy(t, order)); },
      [&] { return noether_json(t); },
      [&] { return currents_json(in, t); },
  });
  const char* names[] = {"gauge_invariance", "hierarchy", "noether", "currents"};
  o.result["build"] = build_json(t, in, order);
  std::string line = "build: pass";
  for (size_t i = 0; i < sections.size(); ++i) {
    std::string status = sections[i]["status"];
    o.passed = o.passed && status == "pass";
    line += std::string(", ") + names[i] + ": " + status;
    o.result[names[i]] = sections[i];
  }
  int first = sections[1]["first_failure"];
  if (first >= 0) line += " (first failing order " + std::to_string(first) + ")";
  o.summary = line;
  return o;
}

// ---------------------------------------------------------------- scan

Outcome scan(const std::string& campaign, int trials, bool violations, std::uint64_t seed) {
  Outcome o;
  std::vector<Campaign> list;
  if (campaign == "all") list = all_campaigns();
  else list.push_back(parse_campaign(campaign));
  ScanOptions opt;
  opt.trials = trials;
  opt.count_violations = violations;
  Json runs = Json::array();
  ScanSummary total;
  for (Campaign c : list) {
    ScanResult r = run_campaign(c, seed, opt);
    ScanSummary s = r.summary();
    total.trials += s.trials;
    total.violations += s.violations;
    total.controls += s.controls;
    total.spurious_passes += s.spurious_passes;
    total.control_failures += s.control_failures;
    runs.push_back(io::to_json(r));
  }
  o.passed = total.spurious_passes == 0 && total.control_failures == 0;
  o.result = Json{{"summary",
                   {{"trials", total.trials},
                    {"violations", total.violations},
                    {"controls", total.controls},
                    {"spurious_passes", total.spurious_passes},
                    {"control_failures", total.control_failures}}},
                  {"campaigns", runs}};
  o.summary = "trials: " + std::to_string(total.trials) + ", violations: " + std::to_string(total.violations) +
              ", spurious passes: " + std::to_string(total.spurious_passes) +
              ", control failures: " + std::to_string(total.control_failures);
  return o;
}

// ---------------------------------------------------------------- dispersion

constexpr double kShellTolerance = 1e-9;
constexpr double kAlignmentTolerance = 1e-8;

Outcome dispersion(const io::DispersionInput& in, const std::string& csv_path) {
  Outcome o;
  const DispersionProblem& prob = in.problem;
  DispersionResult at = dispersion_branches(prob, in.tolerances, in.strict);
  std::vector<SweepRow> rows = dispersion_sweep(prob, in.kmax, in.steps, in.tolerances);

  Json sweep = Json::array();
  for (const auto& r : rows) sweep.push_back({{"k", r.knorm}, {"omega", r.omega}});

  double worst = 0;
  for (const auto& b : at.branches) worst = std::max(worst, b.residual);
  bool residual_ok = worst <= in.tolerances.residual;
  o.result["branches"] = io::to_json(at, prob);
  o.result["residual"] = {{"status", verdict(residual_ok)}, {"max", worst}, {"tolerance", in.tolerances.residual}};
  o.passed = residual_ok;
  std::string line = std::string("residual: ") + verdict(residual_ok);

  const bool twisted = prob.p.size() > 0 && prob.p.norm() > 0 && (prob.v[0] || prob.v[1] || prob.v[2]);
  if (!twisted) {
    // Without torsion every branch lies on ω² = m² + |k|².
    double dev = 0;
    for (const auto& r : rows)
      for (double w : r.omega) dev = std::max(dev, std::abs(w * w - prob.m * prob.m - r.knorm * r.knorm));
    const double k2 = prob.kvec[0] * prob.kvec[0] + prob.kvec[1] * prob.kvec[1];
    for (const auto& b : at.branches)
      dev = std::max(dev, std::abs(b.omega * b.omega - prob.m * prob.m - k2));
    bool ok = dev <= kShellTolerance;
    o.result["shell"] = {{"status", verdict(ok)}, {"max_deviation", dev}, {"tolerance", kShellTolerance}};
    o.passed = o.passed && ok;
    line += std::string(", shell: ") + verdict(ok);
  } else {
    TwistSummary ts = twist_summary(prob, 1e-6, in.tolerances);
    Json entries = Json::array();
    for (const auto& e : ts.entries)
      entries.push_back({{"p_eigenvalue_im", e.eigenvalue},
                         {"omega_sign", e.omega_sign},
                         {"shift_plus", e.shift_plus},
                         {"shift_minus", e.shift_minus},
                         {"slope", e.slope}});
    bool aligned = ts.max_misalignment <= kAlignmentTolerance;
    bool ok = ts.sign_flips && aligned;
    o.result["twist"] = {{"status", verdict(ok)},
                         {"sign_flips", ts.sign_flips},
                         {"odd_defect", ts.odd_defect},
                         {"max_misalignment", ts.max_misalignment},
                         {"alignment_tolerance", kAlignmentTolerance},
                         {"entries", entries}};
    o.passed = o.passed && ok;
    line += std::string(", twist-sign-flip: ") + verdict(ts.sign_flips) + ", polarization: " + verdict(aligned);
  }
  o.result["sweep"] = {{"kmax", in.kmax}, {"steps", in.steps}, {"rows", sweep}};
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw ParseError("cannot write CSV file '" + csv_path + "'");
    f << sweep_csv(rows);
    o.result["sweep"]["csv"] = csv_path;
  }
  o.summary = line;
  return o;
}

// ---------------------------------------------------------------- rendering

std::string scalar_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return "-";
  return j.dump();
}

bool all_scalars(const Json& j) {
  for (const auto& x : j)
    if (x.is_structured()) return false;
  return true;
}

/// Indented projection of the JSON report.
void render_text(const Json& j, int indent, std::ostream& os) {
  const std::string pad(indent, ' ');
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (!value.is_structured()) {
        os << pad << key << ": " << scalar_text(value) << "\n";
      } else if (value.empty()) {
        os << pad << key << ": " << (value.is_array() ? "[]" : "{}") << "\n";
      } else if (value.is_array() && all_scalars(value)) {
        os << pad << key << ": [";
        for (size_t i = 0; i < value.size(); ++i) os << (i ? ", " : "") << scalar_text(value[i]);
        os << "]\n";
      } else {
        os << pad << key << ":\n";
        render_text(value, indent + 2, os);
      }
    }
  } else if (j.is_array()) {
    for (const auto& x : j) {
      if (x.is_structured()) {
        os << pad << "-\n";
        render_text(x, indent + 2, os);
      } else {
        os << pad << "- " << scalar_text(x) << "\n";
      }
    }
  }
}

void emit(const Json& report, const Global& g) {
  std::string text;
  if (g.format == "text") {
    std::ostringstream os;
    render_text(report, 0, os);
    text = os.str();
  } else {
    text = io::dump(report);
  }
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw ParseError("cannot write report file '" + g.out + "'");
  f << text;
}

Json base_config(const Global& g) {
  return Json{{"order", g.order ? Json(*g.order) : Json(nullptr)}, {"dmax", jet::dmax()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of gauge-theory deformations in three dimensions"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Seed for randomized campaigns (recorded verbatim)");
  app.add_option("--order", g.order, "Highest hierarchy order to verify");
  app.add_option("--dmax", g.dmax, "Maximum jet derivative order")->check(CLI::Range(1, jet::kMaxDmax));
  app.add_option("--out", g.out, "Write the report to FILE instead of stdout");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "text"}));

  std::string file, csv, campaign = "all";
  int trials = 200;
  bool violations = false;

  auto* alg = app.add_subcommand("check-algebra", "Run the algebraic checks on an algebra file");
  alg->add_option("file", file, "Algebra JSON")->required();
  auto* thy = app.add_subcommand("verify-theory", "Build a theory and verify its gauge structure");
  thy->add_option("file", file, "Theory JSON")->required();
  auto* scn = app.add_subcommand("scan", "Randomized falsification campaigns");
  scn->add_option("--campaign", campaign, "jacobi, ym, ft, combined, torsion, gravity or all");
  scn->add_option("--trials", trials, "Trials per campaign")->check(CLI::NonNegativeNumber);
  scn->add_flag("--violations", violations, "Count violating trials instead of all trials");
  auto* dsp = app.add_subcommand("dispersion", "Plane-wave branches and sweep of the linear torsion theory");
  dsp->add_option("file", file, "Dispersion JSON");
  dsp->add_option("--csv", csv, "Write the sweep as CSV with header k,omega_1,...,omega_d");
  dsp->footer("CSV columns: k is |k| along the wave-vector direction; omega_i are real branch frequencies, ascending.");
  dsp->callback([&] {
    if (file.empty()) throw CLI::RequiredError("file");
  });
  for (auto* sub : {alg, thy, scn, dsp}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Json config = base_config(g);
  try {
    std::optional<jet::DmaxScope> scope;
    if (g.dmax) scope.emplace(*g.dmax);
    config["dmax"] = jet::dmax();
    Outcome o;
    if (command == "check-algebra") {
      o = check_algebra(io::parse_algebra(io::read_file(file)));
    } else if (command == "verify-theory") {
      o = verify_theory(io::parse_theory(io::read_file(file)), g);
    } else if (command == "scan") {
      config["campaign"] = campaign;
      config["trials"] = trials;
      config["count_violations"] = violations;
      o = scan(campaign, trials, violations, g.seed);
    } else {
      config["csv"] = csv.empty() ? Json(nullptr) : Json(csv);
      o = dispersion(io::parse_dispersion(io::read_file(file)), csv);
    }
    Json report = io::envelope(command, file, g.seed, config);
    report["status"] = verdict(o.passed);
    report["summary"] = o.summary;
    report["result"] = o.result;
    emit(report, g);
    std::cerr << command << ": " << o.summary << "\n";
    return o.passed ? kPass : kFail;
  } catch (const RootConditioningWarning& e) {
    Json report = io::envelope(command, file, g.seed, config);
    report["status"] = "fail";
    report["error"] = {{"kind", "conditioning"}, {"message", e.what()}};
    emit(report, g);
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  } catch (const Error& e) {
    Json report = io::envelope(command, file, g.seed, config);
    report["status"] = "error";
    Json err{{"kind", "input"}, {"message", e.what()}};
    if (auto* pe = dynamic_cast<const ParseError*>(&e); pe && pe->line() > 0) {
      err["line"] = pe->line();
      err["column"] = pe->column();
    }
    report["error"] = err;
    try {
      emit(report, g);
    } catch (const Error&) {
    }
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
