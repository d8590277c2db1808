#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dincl/config.hpp"
#include "dincl/csv.hpp"
#include "dincl/error.hpp"
#include "dincl/run.hpp"

using namespace dincl;

namespace {

const char* kBase =
    "F.lo.branches = 0\n"
    "F.hi.branches = 1\n";

std::string config_error_key(const std::string& text) {
  try {
    load_config(parse_config_text(text));
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST(SplitList, RespectsParentheses) {
  EXPECT_EQ(split_list("a, b ,c"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(split_list("min(s, 1), 2"), (std::vector<std::string>{"min(s, 1)", "2"}));
  EXPECT_EQ(split_list("(1, 0, 1), (2, 3, 4)"), (std::vector<std::string>{"(1, 0, 1)", "(2, 3, 4)"}));
  EXPECT_TRUE(split_list("  ").empty());
}

TEST(ParseConfig, CommentsAndWhitespace) {
  const RawConfig raw = parse_config_text("# top\n\n  mesh.n = 9   # trailing\nF.odd=true\n");
  EXPECT_EQ(raw.size(), 2u);
  EXPECT_EQ(raw.at("mesh.n"), "9");
  EXPECT_EQ(raw.at("F.odd"), "true");
}

TEST(ParseConfig, MalformedLines) {
  EXPECT_THROW(parse_config_text("mesh.n 9\n"), ConfigError);
  EXPECT_THROW(parse_config_text("= 9\n"), ConfigError);
  try {
    parse_config_text("mesh.n = 9\nmesh.n = 10\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "mesh.n");
  }
}

TEST(LoadConfig, Defaults) {
  const ProblemConfig c = load_config(parse_config_text(kBase));
  EXPECT_EQ(c.length, 1.0);
  EXPECT_EQ(c.n, 199u);
  EXPECT_EQ(c.selection->strategy(), Strategy::TheoremApp);
  EXPECT_EQ(c.bump.xbar, 0.5);
  EXPECT_EQ(c.bump.rho, 0.1);
  EXPECT_EQ(c.verify_tol, c.solver.tol_mphi);
  EXPECT_FALSE(c.lambda.value || c.lambda.scale || c.lambda.sweep);
}

TEST(LoadConfig, CaseStudyMap) {
  const ProblemConfig c = load_config(parse_config_text(
      "F.odd = true\nF.lo.breaks = 1\nF.lo.branches = 0, ln(s)+1\nF.hi.breaks = 1\n"
      "F.hi.branches = ln(s^2+1), s^2\nF.point_values = (1, 0, 1)\nlambda.scale = 2\n"));
  EXPECT_EQ((*c.F)(1.0), (Interval{0.0, 1.0}));
  EXPECT_EQ((*c.F)(-1.0), (Interval{-1.0, 0.0}));
  EXPECT_EQ((*c.F)(2.0).hi, 4.0);
  EXPECT_EQ(*c.lambda.scale, 2.0);
}

TEST(LoadConfig, ErrorsNameTheKey) {
  const std::string b = kBase;
  EXPECT_EQ(config_error_key("F.lo.branches = 0\n"), "F.hi.branches");
  EXPECT_EQ(config_error_key("F.hi.branches = 1\n"), "F.lo.branches");
  EXPECT_EQ(config_error_key(b + "mesh.n = 0\n"), "mesh.n");
  EXPECT_EQ(config_error_key(b + "mesh.n = 1.5\n"), "mesh.n");
  EXPECT_EQ(config_error_key(b + "domain.length = -1\n"), "domain.length");
  EXPECT_EQ(config_error_key(b + "solver.armijo = 2\n"), "solver.armijo");
  EXPECT_EQ(config_error_key(b + "solver.path_points = 1\n"), "solver.path_points");
  EXPECT_EQ(config_error_key(b + "lambda = -3\n"), "lambda");
  EXPECT_EQ(config_error_key(b + "lambda = 1\nlambda.scale = 2\n"), "lambda");
  EXPECT_EQ(config_error_key(b + "lambda.sweep = 1, 2, 0\n"), "lambda.sweep");
  EXPECT_EQ(config_error_key(b + "lambda.sweep = 1, 2\n"), "lambda.sweep");
  EXPECT_EQ(config_error_key(b + "selection.strategy = best\n"), "selection.strategy");
  EXPECT_EQ(config_error_key(b + "selection.strategy = custom\n"), "selection.custom");
  EXPECT_EQ(config_error_key(b + "selection.strategy = custom\nselection.custom = 2\n"), "selection.custom");
  EXPECT_EQ(config_error_key(b + "bump.rho = 0.3\n"), "bump.rho");
  EXPECT_EQ(config_error_key(b + "colour = red\n"), "colour");
  EXPECT_EQ(config_error_key(b + "F.odd = maybe\n"), "F.odd");
  EXPECT_EQ(config_error_key(b + "plot.range = 2, -2\n"), "plot.range");
  EXPECT_EQ(config_error_key(b + "F.point_values = (0, 1)\n"), "F.point_values");
  EXPECT_EQ(config_error_key("F.lo.branches = 0, 1\nF.hi.branches = 1\n"), "F.lo");
  EXPECT_EQ(config_error_key("F.lo.branches = 1 +\nF.hi.branches = 1\n"), "F.lo.branches");
  EXPECT_EQ(config_error_key("F.lo.branches = 1\nF.hi.branches = 0\n"), "F");
}

TEST(LoadConfig, OverridesEnterTheCanonicalText) {
  RawConfig raw = parse_config_text(std::string(kBase) + "lambda.scale = 2\n");
  const ProblemConfig before = load_config(raw);
  Overrides o;
  o.lambda = 7.5;
  o.seed = 42;
  o.mesh = 11;
  o.out = "elsewhere";
  apply_overrides(raw, o);
  const ProblemConfig c = load_config(raw);
  EXPECT_EQ(*c.lambda.value, 7.5);
  EXPECT_FALSE(c.lambda.scale);
  EXPECT_EQ(c.solver.seed, 42u);
  EXPECT_EQ(c.n, 11u);
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_NE(fnv1a(before.canonical), fnv1a(c.canonical));
  EXPECT_EQ(fnv1a(c.canonical), fnv1a(load_config(raw).canonical));
}

TEST(Lambdas, ResolveAndSweep) {
  ProblemConfig c = load_config(parse_config_text(std::string(kBase) + "lambda.sweep.scale = 1, 3, 5\n"));
  EXPECT_THROW(resolve_lambda(c, 10.0), ConfigError);
  EXPECT_EQ(sweep_lambdas(c, 10.0), (std::vector<double>{10, 15, 20, 25, 30}));
  EXPECT_THROW(sweep_lambdas(c, std::nullopt), ConfigError);
  c.lambda.scale = 2.0;
  EXPECT_EQ(resolve_lambda(c, 10.0), 20.0);
  EXPECT_THROW(resolve_lambda(c, std::nullopt), ConfigError);
  c.lambda.sweep = Sweep{4.0, 9.0, 1, false};
  EXPECT_EQ(sweep_lambdas(c, std::nullopt), (std::vector<double>{4.0}));
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
}

TEST(Csv, FormatsWithSeventeenDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(-2.0), "-2");
  EXPECT_EQ(format_real(NAN), "nan");
  EXPECT_EQ(format_real(-INFINITY), "-inf");
}

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  CsvTable t;
  t.add_meta("lambda", 3.25);
  t.add_meta("note", "a: b");
  t.header = {"x", "u"};
  std::vector<double> xs, us;
  for (int i = 0; i < 500; ++i) {
    xs.push_back(std::ldexp(mant(rng), expo(rng)));
    us.push_back(mant(rng));
    t.rows.push_back({format_real(xs.back()), format_real(us.back())});
  }
  const CsvTable back = parse_csv(to_csv(t));
  EXPECT_EQ(back.meta_value("lambda"), "3.25");
  EXPECT_EQ(back.meta_value("note"), "a: b");
  EXPECT_EQ(back.meta_value("absent"), "");
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.column("x"), xs);
  EXPECT_EQ(back.column("u"), us);
  EXPECT_EQ(to_csv(back), to_csv(t));
}

TEST(Csv, Errors) {
  EXPECT_THROW(parse_csv("# only: meta\n"), std::runtime_error);
  EXPECT_THROW(parse_csv("a,b\n1\n"), std::runtime_error);
  const CsvTable t = parse_csv("a,b\n1,x\n");
  EXPECT_THROW(t.column("b"), std::runtime_error);
  EXPECT_THROW(t.column("c"), std::runtime_error);
  EXPECT_EQ(t.column("a"), (std::vector<double>{1.0}));
}
