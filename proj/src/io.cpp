#include "deformatics/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace deformatics::io {

namespace {

using Path = std::vector<std::variant<std::string, size_t>>;

std::pair<int, int> line_column(std::string_view text, size_t offset) {
  int line = 1, col = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

size_t skip_ws(std::string_view t, size_t i) {
  while (i < t.size() && (t[i] == ' ' || t[i] == '\t' || t[i] == '\n' || t[i] == '\r')) ++i;
  return i;
}

/// Position just past the string starting at t[i] == '"'.
size_t skip_string(std::string_view t, size_t i) {
  for (++i; i < t.size(); ++i) {
    if (t[i] == '\\') ++i;
    else if (t[i] == '"') return i + 1;
  }
  return t.size();
}

size_t skip_value(std::string_view t, size_t i) {
  i = skip_ws(t, i);
  if (i >= t.size()) return i;
  if (t[i] == '"') return skip_string(t, i);
  if (t[i] == '{' || t[i] == '[') {
    int depth = 0;
    for (; i < t.size(); ++i) {
      if (t[i] == '"') {
        i = skip_string(t, i) - 1;
      } else if (t[i] == '{' || t[i] == '[') {
        ++depth;
      } else if (t[i] == '}' || t[i] == ']') {
        if (--depth == 0) return i + 1;
      }
    }
    return i;
  }
  while (i < t.size() && t[i] != ',' && t[i] != '}' && t[i] != ']' && t[i] != ' ' && t[i] != '\n' && t[i] != '\r' &&
         t[i] != '\t')
    ++i;
  return i;
}

/// Offset of the value at `path` in well-formed JSON text, or of the deepest container found.
size_t locate(std::string_view t, const Path& path) {
  size_t i = skip_ws(t, 0);
  for (const auto& step : path) {
    if (i >= t.size()) return i;
    if (const auto* key = std::get_if<std::string>(&step)) {
      if (t[i] != '{') return i;
      size_t j = skip_ws(t, i + 1);
      bool found = false;
      while (j < t.size() && t[j] == '"') {
        size_t end = skip_string(t, j);
        std::string_view name = t.substr(j + 1, end - j - 2);
        j = skip_ws(t, end);
        if (j < t.size() && t[j] == ':') j = skip_ws(t, j + 1);
        if (name == *key) {
          found = true;
          break;
        }
        j = skip_ws(t, skip_value(t, j));
        if (j < t.size() && t[j] == ',') j = skip_ws(t, j + 1);
      }
      if (!found) return i;
      i = j;
    } else {
      size_t index = std::get<size_t>(step);
      if (t[i] != '[') return i;
      size_t j = skip_ws(t, i + 1);
      for (size_t k = 0; k < index && j < t.size() && t[j] != ']'; ++k) {
        j = skip_ws(t, skip_value(t, j));
        if (j < t.size() && t[j] == ',') j = skip_ws(t, j + 1);
      }
      if (j >= t.size() || t[j] == ']') return i;
      i = j;
    }
  }
  return i;
}

std::string path_string(const Path& path) {
  std::string s;
  for (const auto& step : path) {
    if (const auto* key = std::get_if<std::string>(&step)) s += "/" + *key;
    else s += "/" + std::to_string(std::get<size_t>(step));
  }
  return s.empty() ? "/" : s;
}

/// Parsed document plus its source, so semantic errors can point at the offending token.
class Doc {
 public:
  explicit Doc(std::string_view text) : text_(text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ParseError("empty input", 1, 1);
    try {
      root_ = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
      std::string what = e.what();
      auto colon = what.find("] ");
      throw ParseError("malformed JSON: " + (colon == std::string::npos ? what : what.substr(colon + 2)), line, col);
    }
  }
  const Json& root() const { return root_; }

  [[noreturn]] void fail(const Path& path, const std::string& what) const {
    auto [line, col] = line_column(text_, locate(text_, path));
    throw ParseError(what + " at " + path_string(path), line, col);
  }

  const Json& at(const Json& obj, const Path& path, const std::string& key) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing key '" + key + "'");
    return *it;
  }

  int integer(const Json& j, const Path& path) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    auto v = j.get<long long>();
    if (v < -1000000 || v > 1000000) fail(path, "integer out of range");
    return static_cast<int>(v);
  }

  Rational rational(const Json& j, const Path& path) const {
    if (j.is_string()) {
      try {
        return parse_rational(j.get<std::string>());
      } catch (const ParseError& e) {
        fail(path, e.what());
      }
    }
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
    fail(path, "expected a rational string \"num/den\"");
  }

  double real(const Json& j, const Path& path) const {
    if (j.is_number()) {
      double x = j.get<double>();
      if (!std::isfinite(x)) fail(path, "expected a finite number");
      return x;
    }
    if (j.is_string()) return rational(j, path).get_d();
    fail(path, "expected a number");
  }

  bool boolean(const Json& j, const Path& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  const Json& array(const Json& j, const Path& path, std::optional<size_t> size = {}) const {
    if (!j.is_array()) fail(path, "expected an array");
    if (size && j.size() != *size) fail(path, "expected an array of length " + std::to_string(*size));
    return j;
  }

  /// Rejects keys outside `allowed`, catching misspelt fields.
  void known_keys(const Json& obj, const Path& path, std::initializer_list<const char*> allowed) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) {
        Path p = path;
        p.emplace_back(it.key());
        fail(p, "unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  std::string_view text_;
  Json root_;
};

Path extend(Path p, std::variant<std::string, size_t> step) {
  p.push_back(std::move(step));
  return p;
}

int index_in_range(const Doc& d, const Json& j, const Path& path, int n) {
  int i = d.integer(j, path);
  if (i < 1 || i > n) d.fail(path, "index " + std::to_string(i) + " outside 1.." + std::to_string(n));
  return i - 1;
}

int dimension(const Doc& d, const Json& obj, const Path& path) {
  Path pn = extend(path, "n");
  int n = d.integer(d.at(obj, path, "n"), pn);
  if (n < 1) d.fail(pn, "dimension must be positive");
  if (n > 16) d.fail(pn, "dimension above 16 is not supported");
  return n;
}

/// Sparse rank-2 entries [a, b, value]; callers complete the mirrored entries.
template <class Value, class Read>
std::vector<std::vector<std::optional<Value>>> sparse_matrix(const Doc& d, const Json& list, const Path& path, int n,
                                                             Read read) {
  d.array(list, path);
  std::vector<std::vector<std::optional<Value>>> m(n, std::vector<std::optional<Value>>(n));
  for (size_t e = 0; e < list.size(); ++e) {
    Path pe = extend(path, e);
    const Json& entry = d.array(list[e], pe, 3);
    int a = index_in_range(d, entry[0], extend(pe, size_t{0}), n);
    int b = index_in_range(d, entry[1], extend(pe, size_t{1}), n);
    if (m[a][b]) d.fail(pe, "duplicate entry");
    m[a][b] = read(entry[2], extend(pe, size_t{2}));
  }
  return m;
}

AlgebraInput algebra_from(const Doc& d, const Json& obj, const Path& path) {
  d.known_keys(obj, path, {"n", "c", "k", "p", "name"});
  AlgebraInput in;
  in.n = dimension(d, obj, path);
  const int n = in.n;
  auto rat = [&](const Json& j, const Path& p) { return d.rational(j, p); };

  RTensor c({n, n, n});
  if (obj.contains("c")) {
    Path pc = extend(path, "c");
    const Json& list = d.array(obj["c"], pc);
    std::set<std::array<int, 3>> given;
    for (size_t e = 0; e < list.size(); ++e) {
      Path pe = extend(pc, e);
      const Json& entry = d.array(list[e], pe, 4);
      std::array<int, 3> idx{};
      for (size_t s = 0; s < 3; ++s) idx[s] = index_in_range(d, entry[s], extend(pe, s), n);
      if (!given.insert(idx).second) d.fail(pe, "duplicate entry");
      c({idx[0], idx[1], idx[2]}) = rat(entry[3], extend(pe, size_t{3}));
    }
    for (const auto& idx : given)
      if (idx[1] != idx[2] && !given.count({idx[0], idx[2], idx[1]})) c({idx[0], idx[2], idx[1]}) = -c({idx[0], idx[1], idx[2]});
  }
  in.c = StructureConstants::unchecked(c);

  if (obj.contains("k")) {
    Path pk = extend(path, "k");
    auto m = sparse_matrix<Rational>(d, obj["k"], pk, n, rat);
    RMatrix k(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) k(a, b) = m[a][b] ? *m[a][b] : m[b][a] ? *m[b][a] : Rational(0);
    try {
      in.k = InternalSpace(k);
    } catch (const PreconditionError& e) {
      d.fail(pk, e.what());
    }
  } else {
    in.k = InternalSpace::identity(n);
  }

  if (obj.contains("p")) {
    Path pp = extend(path, "p");
    auto m = sparse_matrix<Rational>(d, obj["p"], pp, n, rat);
    RMatrix p(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) p(a, b) = m[a][b] ? *m[a][b] : m[b][a] ? Rational(-*m[b][a]) : Rational(0);
    try {
      in.p = TorsionPotential(p);
    } catch (const PreconditionError& e) {
      d.fail(pp, e.what());
    }
  }
  return in;
}

std::array<Rational, 3> rational3(const Doc& d, const Json& j, const Path& path) {
  d.array(j, path, 3);
  return {d.rational(j[0], extend(path, size_t{0})), d.rational(j[1], extend(path, size_t{1})),
          d.rational(j[2], extend(path, size_t{2}))};
}

KillingVectorSet killing_from(const Doc& d, const Json& obj, const Path& path) {
  const Json& kind = d.at(obj, path, "kind");
  Path pk = extend(path, "kind");
  if (!kind.is_string()) d.fail(pk, "expected a string");
  const std::string k = kind.get<std::string>();
  try {
    if (k == "translations") {
      d.known_keys(obj, path, {"kind", "directions"});
      Path pd = extend(path, "directions");
      const Json& dirs = d.array(d.at(obj, path, "directions"), pd);
      if (dirs.empty()) d.fail(pd, "at least one direction is required");
      std::vector<std::array<Rational, 3>> v;
      for (size_t i = 0; i < dirs.size(); ++i) v.push_back(rational3(d, dirs[i], extend(pd, i)));
      return KillingVectorSet::translations(v);
    }
    if (k == "rotation_translation" || k == "boost_translation") {
      d.known_keys(obj, path, {"kind", "rate", "translation"});
      Rational w = d.rational(d.at(obj, path, "rate"), extend(path, "rate"));
      Rational t = d.rational(d.at(obj, path, "translation"), extend(path, "translation"));
      return k == "rotation_translation" ? KillingVectorSet::rotation_translation(w, t)
                                         : KillingVectorSet::boost_translation(w, t);
    }
  } catch (const KillingCheckFailed& e) {
    d.fail(path, e.what());
  }
  d.fail(pk, "unknown Killing set '" + k + "' (translations, rotation_translation, boost_translation)");
}

Model model_from(const Doc& d, const Json& j, const Path& path) {
  if (!j.is_string()) d.fail(path, "expected a string");
  const std::string s = j.get<std::string>();
  if (s == "linear") return Model::Linear;
  if (s == "ym_cs") return Model::YmCs;
  if (s == "ft") return Model::Ft;
  if (s == "torsion_ymftcs") return Model::TorsionYmFtCs;
  if (s == "gravity") return Model::Gravity;
  d.fail(path, "unknown model '" + s + "' (ym_cs, ft, torsion_ymftcs, gravity, linear)");
}

std::string rational_json(const Rational& q) { return format_rational(q); }

Json index_list(const std::vector<int>& idx) {
  Json j = Json::array();
  for (int i : idx) j.push_back(i);
  return j;
}

Json named_residuals(const std::vector<NamedResidual>& v) {
  Json j = Json::array();
  for (const auto& r : v) j.push_back({{"component", r.label}, {"value", r.value.to_string()}});
  return j;
}

Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

AlgebraInput parse_algebra(std::string_view text) {
  Doc d(text);
  return algebra_from(d, d.root(), {});
}

TheoryInput parse_theory(std::string_view text) {
  Doc d(text);
  const Json& r = d.root();
  const Path root;
  if (!r.is_object()) d.fail(root, "expected an object");
  d.known_keys(r, root, {"model", "algebra", "m", "kappa", "kappa_ft", "v", "N", "killing", "checked", "order", "name"});
  TheoryInput in;
  in.model = model_from(d, d.at(r, root, "model"), {"model"});
  in.algebra = algebra_from(d, d.at(r, root, "algebra"), {"algebra"});
  if (r.contains("m")) in.m = d.rational(r["m"], {"m"});
  if (r.contains("kappa")) in.kappa = d.rational(r["kappa"], {"kappa"});
  if (r.contains("kappa_ft")) in.kappa_ft = d.rational(r["kappa_ft"], {"kappa_ft"});
  if (r.contains("v")) in.v = rational3(d, r["v"], {"v"});
  if (r.contains("N")) {
    in.N = d.integer(r["N"], {"N"});
    if (in.N < 2) d.fail({"N"}, "truncation order must be at least 2");
  }
  if (r.contains("checked")) in.checked = d.boolean(r["checked"], {"checked"});
  if (r.contains("order")) {
    in.order = d.integer(r["order"], {"order"});
    if (*in.order < 0) d.fail({"order"}, "order must be nonnegative");
  }
  if (r.contains("killing")) in.killing = killing_from(d, r["killing"], {"killing"});
  if (in.model == Model::Gravity) {
    if (!in.killing) d.fail(root, "gravity model requires 'killing'");
    if (in.killing->n() != in.algebra.n)
      d.fail({"killing"}, "Killing set size " + std::to_string(in.killing->n()) + " differs from algebra dimension " +
                              std::to_string(in.algebra.n));
  }
  if (in.kappa_ft && in.model != Model::TorsionYmFtCs) d.fail({"kappa_ft"}, "kappa_ft applies to torsion_ymftcs only");
  return in;
}

DispersionInput parse_dispersion(std::string_view text) {
  Doc d(text);
  const Json& r = d.root();
  const Path root;
  if (!r.is_object()) d.fail(root, "expected an object");
  d.known_keys(r, root, {"n", "m", "v", "p", "k", "kvec", "sweep", "tolerances", "strict", "name"});
  DispersionInput in;
  DispersionProblem& prob = in.problem;
  prob.n = dimension(d, r, root);
  const int n = prob.n;
  auto real = [&](const Json& j, const Path& p) { return d.real(j, p); };
  if (r.contains("m")) prob.m = d.real(r["m"], {"m"});
  if (r.contains("v")) {
    d.array(r["v"], {"v"}, 3);
    for (size_t i = 0; i < 3; ++i) prob.v[i] = d.real(r["v"][i], {"v", i});
  }
  if (r.contains("kvec")) {
    d.array(r["kvec"], {"kvec"}, 2);
    for (size_t i = 0; i < 2; ++i) prob.kvec[i] = d.real(r["kvec"][i], {"kvec", i});
  }
  prob.p = Eigen::MatrixXd::Zero(n, n);
  if (r.contains("p")) {
    auto m = sparse_matrix<double>(d, r["p"], {"p"}, n, real);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) prob.p(a, b) = m[a][b] ? *m[a][b] : m[b][a] ? -*m[b][a] : 0.0;
  }
  if (r.contains("k")) {
    auto m = sparse_matrix<double>(d, r["k"], {"k"}, n, real);
    prob.k = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) prob.k(a, b) = m[a][b] ? *m[a][b] : m[b][a] ? *m[b][a] : 0.0;
  }
  try {
    prob.validate();
  } catch (const PreconditionError& e) {
    d.fail(root, e.what());
  }
  if (r.contains("sweep")) {
    const Json& s = r["sweep"];
    const Path ps{"sweep"};
    if (!s.is_object()) d.fail(ps, "expected an object");
    d.known_keys(s, ps, {"kmax", "steps"});
    if (s.contains("kmax")) in.kmax = d.real(s["kmax"], {"sweep", "kmax"});
    if (s.contains("steps")) in.steps = d.integer(s["steps"], {"sweep", "steps"});
    if (!(in.kmax > 0)) d.fail({"sweep", "kmax"}, "kmax must be positive");
    if (in.steps < 1 || in.steps > 100000) d.fail({"sweep", "steps"}, "steps must be in 1..100000");
  }
  if (r.contains("tolerances")) {
    const Json& t = r["tolerances"];
    const Path pt{"tolerances"};
    if (!t.is_object()) d.fail(pt, "expected an object");
    d.known_keys(t, pt, {"residual", "cluster", "separation", "coefficient_trim"});
    auto positive = [&](const char* key, double& out) {
      if (!t.contains(key)) return;
      out = d.real(t[key], {"tolerances", key});
      if (!(out > 0)) d.fail({"tolerances", key}, "tolerance must be positive");
    };
    positive("residual", in.tolerances.residual);
    positive("cluster", in.tolerances.cluster);
    positive("separation", in.tolerances.separation);
    positive("coefficient_trim", in.tolerances.coefficient_trim);
  }
  if (r.contains("strict")) in.strict = d.boolean(r["strict"], {"strict"});
  return in;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

TheorySpec build_theory(const TheoryInput& in) {
  const AlgebraInput& a = in.algebra;
  BuildOptions opt;
  opt.checked = in.checked;
  opt.kappa_ft = in.kappa_ft;
  const TorsionPotential p = a.p ? *a.p : TorsionPotential(a.n);
  switch (in.model) {
    case Model::Linear: {
      bool torsion = a.p && (in.v[0] != 0 || in.v[1] != 0 || in.v[2] != 0);
      if (torsion) return build_linear_abelian(a.k, in.m, std::make_pair(in.v, p));
      return build_linear_abelian(a.k, in.m);
    }
    case Model::YmCs: return build_ym_cs(a.c, a.k, in.kappa, in.m, opt);
    case Model::Ft: return build_ft_truncated(a.c, a.k, in.kappa, in.N, opt);
    case Model::TorsionYmFtCs: return build_torsion_ym_ft_cs(a.c, p, in.v, a.k, in.m, in.kappa, in.N, opt);
    case Model::Gravity: return build_gravity_like(*in.killing, a.k, p, in.v, in.m, in.N, opt);
  }
  throw PreconditionError("unknown model");
}

int default_order(const TheorySpec& t) { return t.exact() ? 2 : t.supported_order(); }

Json conventions() {
  return Json{{"signature", "(-,+,+)"},
              {"metric", "diag(-1,1,1)"},
              {"orientation", "eps_012 = +1"},
              {"antisymmetrization_weight", "1/k!"},
              {"index_base", 1},
              {"rational_format", "num/den"}};
}

Json envelope(const std::string& command, const std::string& input, std::uint64_t seed, const Json& config) {
  return Json{{"schema_version", kSchemaVersion}, {"tool", "deformatics"}, {"command", command},
              {"input", input},                   {"seed", seed},          {"config", config},
              {"conventions", conventions()}};
}

Json to_json(const ResidualReport& r) {
  Json j{{"status", r.passed() ? "pass" : "fail"}, {"relations", r.relations}};
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"relation", e.relation}, {"index", index_list(e.index)}, {"value", rational_json(e.value)}});
  if (auto m = r.max_entry())
    j["max"] = {{"relation", m->relation}, {"index", index_list(m->index)}, {"value", rational_json(m->value)}};
  else
    j["max"] = nullptr;
  j["entries"] = entries;
  return j;
}

Json to_json(const HierarchyReport& r) {
  Json orders = Json::array();
  for (const auto& o : r.orders) {
    Json zeta = Json::array();
    for (const auto& z : o.zeta3) zeta.push_back(z.to_string());
    orders.push_back({{"order", o.order},
                      {"status", o.passed() ? "pass" : "fail"},
                      {"lie_residual", named_residuals(o.lie_residual)},
                      {"closure", closure_mode_name(o.closure)},
                      {"zeta3", zeta},
                      {"curl_residual", named_residuals(o.curl_residual)},
                      {"closure_residual", named_residuals(o.closure_residual)}});
  }
  return Json{{"theory", r.theory},
              {"status", r.passed() ? "pass" : "fail"},
              {"max_order", r.max_order},
              {"first_failure", r.first_failure()},
              {"orders", orders}};
}

Json to_json(const InvarianceReport& r) {
  Json w = Json::array();
  for (const auto& [label, poly] : r.witness) w.push_back({{"component", label}, {"value", poly.to_string()}});
  return Json{{"status", r.passed ? "pass" : "fail"},
              {"failing_grade", r.failing_grade},
              {"discarded_min_grade", r.discarded_min_grade},
              {"witness", w}};
}

Json to_json(const CurrentReport& r) {
  Json cur = Json::array();
  for (const auto& c : r.rigid_current) cur.push_back(c.to_string());
  return Json{{"rigid_identity", r.rigid_identity},
              {"rigid_current", cur},
              {"torsion_present", r.torsion_present},
              {"current_on_shell", r.current_on_shell},
              {"stress_on_shell", r.stress_on_shell},
              {"stress_symmetric", r.stress_symmetric},
              {"notes", r.notes}};
}

Json to_json(const ScanResult& r) {
  Json trials = Json::array();
  for (const auto& t : r.trials) {
    Json j{{"index", t.index},
           {"sub_seed", t.sub_seed},
           {"data", t.data},
           {"violated", t.violated},
           {"gate", t.gate},
           {"gauge_invariant", t.gauge_invariant},
           {"first_failure", t.first_failure ? Json(*t.first_failure) : Json(nullptr)},
           {"passed", t.passed},
           {"verdict", t.spurious() ? "spurious-pass" : t.missed() ? "control-failure" : "ok"}};
    if (!t.error.empty()) j["error"] = t.error;
    trials.push_back(j);
  }
  ScanSummary s = r.summary();
  return Json{{"campaign", campaign_name(r.campaign)},
              {"seed", r.seed},
              {"summary",
               {{"trials", s.trials},
                {"violations", s.violations},
                {"controls", s.controls},
                {"spurious_passes", s.spurious_passes},
                {"control_failures", s.control_failures}}},
              {"trials", trials}};
}

Json to_json(const DispersionResult& r, const DispersionProblem& prob) {
  Json branches = Json::array();
  for (const auto& b : r.branches) {
    std::complex<double> lambda;
    double mis = polarization_misalignment(prob, b, &lambda);
    Json pol = Json::array();
    for (Eigen::Index i = 0; i < b.polarization.size(); ++i) pol.push_back(complex_json(b.polarization(i)));
    branches.push_back({{"omega", complex_json(b.omega)},
                        {"residual", b.residual},
                        {"constraint", b.constraint},
                        {"twist_shift", twist_shift(prob, b)},
                        {"p_eigenvalue", complex_json(lambda)},
                        {"misalignment", mis},
                        {"polarization", pol}});
  }
  Json coeffs = Json::array();
  for (auto c : r.coefficients) coeffs.push_back(complex_json(c));
  return Json{{"branches", branches}, {"coefficients", coeffs}, {"warnings", r.warnings}, {"notes", r.notes}};
}

std::string format_space(const std::vector<TorsionPotential>& basis) {
  if (basis.empty()) return "{0}";
  std::string s = "span{";
  for (size_t i = 0; i < basis.size(); ++i) {
    if (i) s += ", ";
    const TorsionPotential& p = basis[i];
    bool first = true;
    for (int a = 0; a < p.n(); ++a)
      for (int b = a + 1; b < p.n(); ++b) {
        const Rational& q = p(a, b);
        if (is_zero(q)) continue;
        std::string term = "e" + std::to_string(a + 1) + "^e" + std::to_string(b + 1);
        if (q == 1) s += (first ? "" : " + ") + term;
        else if (q == -1) s += (first ? "-" : " - ") + term;
        else s += (first ? "" : " + ") + format_rational(q) + " " + term;
        first = false;
      }
  }
  return s + "}";
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace deformatics::io
