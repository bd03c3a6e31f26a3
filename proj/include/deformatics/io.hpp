#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "deformatics/scan.hpp"
#include "deformatics/theories.hpp"
#include "deformatics/waves.hpp"

namespace deformatics::io {

/// Insertion-ordered JSON so reports keep declaration order and are byte-deterministic.
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Algebra document: {"n": int, "c": [[a,b,c,"q"],...], "k": [[a,b,"q"],...], "p": [[a,b,"q"],...]}.
/// Indices are one-based. A c entry also sets c^a_{cb} = -q unless (a,c,b) is listed; k entries are
/// mirrored and p entries antisymmetrized the same way. Without "k" the metric is the identity.
struct AlgebraInput {
  int n = 0;
  StructureConstants c;  // unchecked: antisymmetry is a reported check, not a parse error
  InternalSpace k;
  std::optional<TorsionPotential> p;
};

/// Theory document: {"model": "ym_cs"|"ft"|"torsion_ymftcs"|"gravity"|"linear", "algebra": {...},
/// "m": "q", "kappa": "q", "kappa_ft": "q", "v": ["q","q","q"], "N": int, "killing": {...},
/// "checked": bool, "order": int}.
struct TheoryInput {
  Model model = Model::Linear;
  AlgebraInput algebra;
  Rational m = 0, kappa = 1;
  std::optional<Rational> kappa_ft;
  std::array<Rational, 3> v{0, 0, 0};
  int N = 3;
  std::optional<KillingVectorSet> killing;
  bool checked = true;
  std::optional<int> order;  // hierarchy order; defaults to 2 (exact) or N-1 (truncated)
};

/// Dispersion document: {"n": int, "m": x, "v": [x,x,x], "p": [[a,b,x],...], "k": [[a,b,x],...],
/// "kvec": [x,x], "sweep": {"kmax": x, "steps": int}, "tolerances": {...}, "strict": bool}.
/// Numbers may be JSON numbers or rational strings.
struct DispersionInput {
  DispersionProblem problem;
  double kmax = 2;
  int steps = 20;
  WaveTolerances tolerances;
  bool strict = false;
};

/// All parsers throw ParseError with the line and column of the offending token.
AlgebraInput parse_algebra(std::string_view text);
TheoryInput parse_theory(std::string_view text);
DispersionInput parse_dispersion(std::string_view text);

/// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_file(const std::string& path);

/// Builds the theory; checked builds run the algebraic preconditions.
TheorySpec build_theory(const TheoryInput& in);
/// Hierarchy order used when the input does not fix one.
int default_order(const TheorySpec& t);

/// Signature, orientation and antisymmetrization weight used throughout.
Json conventions();
/// Common report envelope: schema version, command, input, seed, config and conventions.
Json envelope(const std::string& command, const std::string& input, std::uint64_t seed, const Json& config);

Json to_json(const ResidualReport& r);
Json to_json(const HierarchyReport& r);
Json to_json(const InvarianceReport& r);
Json to_json(const CurrentReport& r);
Json to_json(const ScanResult& r);
Json to_json(const DispersionResult& r, const DispersionProblem& prob);

/// Basis of potentials as "{0}" or "span{e1^e2, ...}".
std::string format_space(const std::vector<TorsionPotential>& basis);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace deformatics::io
