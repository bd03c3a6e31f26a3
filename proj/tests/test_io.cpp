#include <gtest/gtest.h>

#include <random>
#include <string>

#include "deformatics/io.hpp"
#include "test_support.hpp"

using namespace deformatics;
using deformatics::io::Json;

namespace {

constexpr std::uint64_t kSeed = 0x5eed10;

const char* kSu2 = R"({"n": 3, "c": [[1, 2, 3, "1"], [2, 3, 1, "1"], [3, 1, 2, "1"]]})";

template <class F>
ParseError parse_error_of(F f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ParseError";
  return ParseError("none");
}

}  // namespace

// ---------------------------------------------------------------- locations

TEST(ParseErrors, EmptyInputIsLineOne) {
  for (const char* text : {"", "   \n\t "}) {
    ParseError e = parse_error_of([&] { io::parse_algebra(text); });
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 1);
  }
}

TEST(ParseErrors, SyntaxErrorPointsAtToken) {
  ParseError e = parse_error_of([] { io::parse_algebra("{\"n\": 3,\n \"c\": [[1,2,3,\"1\"],]\n}"); });
  EXPECT_EQ(e.line(), 2);
  EXPECT_EQ(e.column(), 20);
}

TEST(ParseErrors, SemanticErrorsPointAtValue) {
  ParseError zero = parse_error_of([] { io::parse_algebra("{\n  \"n\": 0\n}"); });
  EXPECT_EQ(zero.line(), 2);
  EXPECT_EQ(zero.column(), 8);
  EXPECT_NE(std::string(zero.what()).find("/n"), std::string::npos);

  ParseError index = parse_error_of([] { io::parse_algebra("{\"n\": 2,\n\"c\": [[1, 2, 3, \"1\"]]}"); });
  EXPECT_EQ(index.line(), 2);
  EXPECT_EQ(index.column(), 14);

  ParseError rational = parse_error_of([] { io::parse_algebra("{\"n\": 2,\n\"c\": [[1, 1, 2, \"x/2\"]]}"); });
  EXPECT_EQ(rational.line(), 2);
  EXPECT_EQ(rational.column(), 17);
}

TEST(ParseErrors, UnknownKeyIsRejected) {
  ParseError e = parse_error_of([] { io::parse_algebra("{\"n\": 2,\n  \"structure\": []}"); });
  EXPECT_EQ(e.line(), 2);
  EXPECT_NE(std::string(e.what()).find("unknown key 'structure'"), std::string::npos);
}

TEST(ParseErrors, DuplicateEntryIsRejected) {
  EXPECT_THROW(io::parse_algebra(R"({"n": 2, "c": [[1, 1, 2, "1"], [1, 1, 2, "2"]]})"), ParseError);
  EXPECT_THROW(io::parse_algebra(R"({"n": 2, "p": [[1, 2, "1"], [1, 2, "1"]]})"), ParseError);
}

TEST(ParseErrors, DegenerateMetricIsAParseError) {
  ParseError e = parse_error_of([] { io::parse_algebra(R"({"n": 2, "k": [[1, 1, "1"], [1, 2, "1"], [2, 2, "1"]]})"); });
  EXPECT_NE(std::string(e.what()).find("/k"), std::string::npos);
}

TEST(ParseErrors, DispersionDimensionZero) {
  ParseError e = parse_error_of([] { io::parse_dispersion(R"({"n": 0, "m": 1})"); });
  EXPECT_EQ(e.line(), 1);
  EXPECT_NE(std::string(e.what()).find("dimension must be positive"), std::string::npos);
}

TEST(ParseErrors, MissingFile) { EXPECT_THROW(io::read_file("/nonexistent/deformatics.json"), ParseError); }

// ---------------------------------------------------------------- algebra documents

TEST(AlgebraInput, MirrorsEntriesAndDefaultsToIdentity) {
  io::AlgebraInput in = io::parse_algebra(kSu2);
  EXPECT_EQ(in.n, 3);
  EXPECT_TRUE(in.c.is_antisymmetric());
  EXPECT_EQ(in.c.tensor(), StructureConstants::su2().tensor());
  EXPECT_EQ(in.k.k(), RMatrix::identity(3));
  EXPECT_FALSE(in.p.has_value());
}

TEST(AlgebraInput, ExplicitEntryOverridesMirror) {
  // Listing both orders keeps the data as given, so antisymmetry becomes a reported check.
  io::AlgebraInput in = io::parse_algebra(R"({"n": 2, "c": [[1, 1, 2, "1"], [1, 2, 1, "1"]]})");
  EXPECT_FALSE(in.c.is_antisymmetric());
}

TEST(AlgebraInput, MetricAndPotentialCompletion) {
  io::AlgebraInput in =
      io::parse_algebra(R"({"n": 2, "k": [[1, 1, "2"], [1, 2, "1/2"], [2, 2, 3]], "p": [[2, 1, "-3/4"]]})");
  EXPECT_EQ(in.k.k()(0, 1), Rational(1, 2));
  EXPECT_EQ(in.k.k()(1, 0), Rational(1, 2));
  EXPECT_EQ(in.k.k()(1, 1), Rational(3));
  ASSERT_TRUE(in.p.has_value());
  EXPECT_EQ((*in.p)(0, 1), Rational(3, 4));
  EXPECT_EQ((*in.p)(1, 0), Rational(-3, 4));
}

TEST(AlgebraInput, RandomRoundTrip) {
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = dim(rng);
    RTensor c({n, n, n});
    Json entries = Json::array();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int d = b + 1; d < n; ++d) {
          Rational q = testsupport::random_rational(rng);
          if (q == 0) continue;
          c({a, b, d}) = q;
          c({a, d, b}) = -q;
          entries.push_back({a + 1, b + 1, d + 1, format_rational(q)});
        }
    Json doc{{"n", n}, {"c", entries}};
    io::AlgebraInput in = io::parse_algebra(doc.dump(trial % 2 ? 2 : -1));
    EXPECT_EQ(in.c.tensor(), c) << doc.dump();
  }
}

// ---------------------------------------------------------------- theory documents

TEST(TheoryInput, DefaultsAndBuild) {
  std::string text = std::string(R"({"model": "ym_cs", "m": "3", "algebra": )") + kSu2 + "}";
  io::TheoryInput in = io::parse_theory(text);
  EXPECT_EQ(in.model, Model::YmCs);
  EXPECT_EQ(in.m, Rational(3));
  EXPECT_EQ(in.kappa, Rational(1));
  EXPECT_EQ(in.N, 3);
  EXPECT_TRUE(in.checked);
  TheorySpec t = io::build_theory(in);
  EXPECT_EQ(t.model, Model::YmCs);
  EXPECT_TRUE(t.exact());
  EXPECT_EQ(io::default_order(t), 2);
}

TEST(TheoryInput, TruncatedDefaultOrder) {
  std::string text = std::string(R"({"model": "ft", "N": 3, "algebra": )") + kSu2 + "}";
  TheorySpec t = io::build_theory(io::parse_theory(text));
  EXPECT_EQ(io::default_order(t), t.supported_order());
}

TEST(TheoryInput, Rejections) {
  std::string alg = kSu2;
  EXPECT_THROW(io::parse_theory(R"({"model": "qcd", "algebra": )" + alg + "}"), ParseError);
  EXPECT_THROW(io::parse_theory(R"({"model": "ym_cs", "kappa_ft": "1", "algebra": )" + alg + "}"), ParseError);
  EXPECT_THROW(io::parse_theory(R"({"model": "ft", "N": 1, "algebra": )" + alg + "}"), ParseError);
  EXPECT_THROW(io::parse_theory(R"({"model": "gravity", "algebra": {"n": 2}})"), ParseError);
  EXPECT_THROW(io::parse_theory(
                   R"({"model": "gravity", "algebra": {"n": 3}, "killing": {"kind": "boost_translation", "rate": "1", "translation": "1"}})"),
               ParseError);
  EXPECT_THROW(io::parse_theory(R"({"model": "ym_cs", "algebra": )" + alg + R"(, "order": -1})"), ParseError);
}

TEST(TheoryInput, CheckedBuildRejectsBrokenAlgebra) {
  const char* text =
      R"({"model": "ym_cs", "m": "1", "algebra": {"n": 3, "c": [[1, 2, 3, "1"], [2, 3, 1, "1"], [3, 1, 2, "2"]]}})";
  EXPECT_THROW(io::build_theory(io::parse_theory(text)), AlgebraRejected);
}

TEST(TheoryInput, KillingKinds) {
  io::TheoryInput t = io::parse_theory(
      R"({"model": "gravity", "algebra": {"n": 2}, "killing": {"kind": "translations", "directions": [["1","0","0"],["0","1","0"]]}})");
  ASSERT_TRUE(t.killing.has_value());
  EXPECT_EQ(t.killing->kind, KillingVectorSet::Kind::Translations);
  EXPECT_EQ(t.killing->n(), 2);
}

// ---------------------------------------------------------------- dispersion documents

TEST(DispersionInput, NumbersAndRationalStrings) {
  io::DispersionInput in = io::parse_dispersion(
      R"({"n": 2, "m": "3/2", "v": [0, 0.25, 0], "p": [[1, 2, 1]], "kvec": [0.5, 0],
          "sweep": {"kmax": 4, "steps": 5}, "tolerances": {"residual": 1e-9}, "strict": true})");
  EXPECT_DOUBLE_EQ(in.problem.m, 1.5);
  EXPECT_DOUBLE_EQ(in.problem.v[1], 0.25);
  EXPECT_DOUBLE_EQ(in.problem.p(1, 0), -1.0);
  EXPECT_DOUBLE_EQ(in.kmax, 4);
  EXPECT_EQ(in.steps, 5);
  EXPECT_DOUBLE_EQ(in.tolerances.residual, 1e-9);
  EXPECT_TRUE(in.strict);
}

TEST(DispersionInput, Rejections) {
  EXPECT_THROW(io::parse_dispersion(R"({"n": 1, "sweep": {"kmax": 0}})"), ParseError);
  EXPECT_THROW(io::parse_dispersion(R"({"n": 1, "tolerances": {"residual": -1}})"), ParseError);
  EXPECT_THROW(io::parse_dispersion(R"({"n": 1, "kvec": [1]})"), ParseError);
  EXPECT_THROW(io::parse_dispersion(R"({"n": 1, "m": "inf"})"), ParseError);
}

// ---------------------------------------------------------------- reports

TEST(Reports, EnvelopeCarriesSchemaSeedAndConventions) {
  Json e = io::envelope("scan", "in.json", 18446744073709551615ULL, Json{{"trials", 3}});
  EXPECT_EQ(e["schema_version"], io::kSchemaVersion);
  EXPECT_EQ(e["seed"].get<std::uint64_t>(), 18446744073709551615ULL);
  EXPECT_EQ(e["conventions"]["signature"], "(-,+,+)");
  EXPECT_EQ(e["conventions"]["orientation"], "eps_012 = +1");
  EXPECT_EQ(e["conventions"]["antisymmetrization_weight"], "1/k!");
  std::vector<std::string> keys;
  for (const auto& [k, v] : e.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "tool", "command", "input", "seed", "config", "conventions"}));
}

TEST(Reports, ResidualReportIsLocated) {
  StructureConstants broken = StructureConstants::unchecked([] {
    RTensor c = StructureConstants::su2().tensor();
    c({0, 1, 2}) = 2;
    c({0, 2, 1}) = -2;
    return c;
  }());
  Json j = io::to_json(check_ym_relations(broken, InternalSpace::identity(3)));
  EXPECT_EQ(j["status"], "fail");
  ASSERT_FALSE(j["entries"].empty());
  EXPECT_EQ(j["max"]["index"].size(), j["entries"][0]["index"].size());
  for (const auto& idx : j["entries"][0]["index"]) {
    EXPECT_GE(idx.get<int>(), 1);
    EXPECT_LE(idx.get<int>(), 3);
  }
}

TEST(Reports, ByteDeterministic) {
  ScanOptions opt;
  opt.trials = 8;
  std::string a = io::dump(io::to_json(run_campaign(Campaign::TorsionMassless, 11, opt)));
  opt.threads = 1;
  std::string b = io::dump(io::to_json(run_campaign(Campaign::TorsionMassless, 11, opt)));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.back(), '\n');
  EXPECT_NE(a.find("\"sub_seed\""), std::string::npos);

  TheorySpec t = build_ym_cs(StructureConstants::su2(), InternalSpace::identity(3), 1, 3);
  EXPECT_EQ(io::dump(io::to_json(verify_hierarchy(t, 1))), io::dump(io::to_json(verify_hierarchy(t, 1))));
}

TEST(Reports, FormatSpace) {
  EXPECT_EQ(io::format_space({}), "{0}");
  TorsionPotential p(4);
  p.set(2, 3, 1);
  TorsionPotential q(4);
  q.set(0, 1, Rational(-1, 2));
  q.set(2, 3, -1);
  EXPECT_EQ(io::format_space({p, q}), "span{e3^e4, -1/2 e1^e2 - e3^e4}");
}
