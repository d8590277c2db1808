// Runs the dincl binary end to end on the shipped configs.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dincl/csv.hpp"

namespace fs = std::filesystem;
using dincl::CsvTable;
using dincl::read_csv;

namespace {

const std::string kBin = DINCL_BIN;
const std::string kConfigs = DINCL_CONFIGS;
const fs::path kWork = fs::path(DINCL_WORK) / "cli";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::string& args) {
  fs::create_directories(kWork);
  const fs::path o = kWork / "stdout.txt", e = kWork / "stderr.txt";
  const std::string cmd = kBin + " " + args + " >" + o.string() + " 2>" + e.string();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

std::string cfg(const std::string& name) { return "--config " + kConfigs + "/" + name + ".cfg"; }

std::string out(const std::string& name) { return " --out " + (kWork / name).string(); }

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / (name + ".cfg");
  std::ofstream(p) << text;
  return p;
}

const char* kCaseStudyMap =
    "F.odd = true\nF.lo.breaks = 1\nF.lo.branches = 0, ln(s)+1\nF.hi.breaks = 1\n"
    "F.hi.branches = ln(s^2+1), s^2\nF.point_values = (1, 0, 1)\n";

}  // namespace

TEST(CliCheck, CaseStudyPasses) {
  const CliRun r = run("check " + cfg("case_study") + out("check_cs"));
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("all checks pass"), std::string::npos);
  EXPECT_TRUE(fs::exists(kWork / "check_cs" / "check_report.json"));
}

TEST(CliCheck, ShrunkValueAtZeroIsAUscViolation) {
  const CliRun r = run("check " + cfg("usc_violation") + out("check_usc"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("violation at s=0"), std::string::npos) << r.out;
  EXPECT_NE(slurp(kWork / "check_usc" / "check_report.json").find("max_not_usc"), std::string::npos);
}

TEST(CliCheck, MissingUpperEnvelopeNamesTheKey) {
  const fs::path p = write_config("no_hi", "F.lo.branches = 0\nlambda = 1\n");
  const CliRun r = run("check --config " + p.string() + out("no_hi"));
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("F.hi.branches"), std::string::npos) << r.err;
}

TEST(CliPotential, SignJumpGivesAbsoluteValue) {
  const CliRun r = run("potential " + cfg("sign_jump") + out("pot_sj"));
  ASSERT_EQ(r.code, 0) << r.err;
  const CsvTable t = read_csv((kWork / "pot_sj" / "potential.csv").string());
  ASSERT_EQ(t.header, (std::vector<std::string>{"s", "f", "f_minus", "f_plus", "J_f", "aumann_min", "aumann_max"}));
  const auto s = t.column("s"), J = t.column("J_f"), lo = t.column("aumann_min"), hi = t.column("aumann_max");
  const auto fm = t.column("f_minus"), fp = t.column("f_plus");
  bool saw_zero = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(J[i], std::abs(s[i]), 1e-12) << s[i];
    if (s[i] == 0.0) {
      saw_zero = true;
      EXPECT_EQ(J[i], 0.0);
      EXPECT_EQ(lo[i], 0.0);
      EXPECT_EQ(hi[i], 0.0);
      EXPECT_EQ(fm[i], -1.0);
      EXPECT_EQ(fp[i], 1.0);
    }
  }
  EXPECT_TRUE(saw_zero);
}

TEST(CliPotential, CaseStudyAtOne) {
  const CliRun r = run("potential " + cfg("case_study") + out("pot_cs"));
  ASSERT_EQ(r.code, 0) << r.err;
  const CsvTable t = read_csv((kWork / "pot_cs" / "potential.csv").string());
  const auto s = t.column("s"), J = t.column("J_f");
  bool found = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 1.0) {
      found = true;
      EXPECT_NEAR(J[i], std::log(2.0) - 2.0 + M_PI / 2.0, 1e-9);
    }
  }
  EXPECT_TRUE(found);
}

TEST(CliPotential, SignSwitchPotentialIsTheAumannMinimum) {
  const CliRun r = run("potential " + cfg("constant") + out("pot_const"));
  ASSERT_EQ(r.code, 0) << r.err;
  const CsvTable t = read_csv((kWork / "pot_const" / "potential.csv").string());
  const auto J = t.column("J_f"), lo = t.column("aumann_min");
  for (std::size_t i = 0; i < J.size(); ++i) EXPECT_NEAR(J[i], lo[i], 1e-9);
}

TEST(CliSolve, CaseStudyRoundTrip) {
  const CliRun r = run("solve " + cfg("case_study") + out("solve_cs"));
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const fs::path sol = kWork / "solve_cs" / "solution.csv";
  const CsvTable t = read_csv(sol.string());
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "u1", "w1", "u2", "w2"}));
  EXPECT_EQ(t.rows.size(), 199u);
  EXPECT_LT(std::stod(t.meta_value("energy1")), 0.0);
  EXPECT_GT(std::stod(t.meta_value("energy2")), 0.0);
  EXPECT_TRUE(fs::exists(kWork / "solve_cs" / "run_record.json"));
  EXPECT_TRUE(fs::exists(kWork / "solve_cs" / "summary.txt"));

  EXPECT_EQ(run("verify " + cfg("case_study") + out("verify_cs") + " " + sol.string()).code, 0);

  // Same config and seed: byte-identical CSV.
  ASSERT_EQ(run("solve " + cfg("case_study") + out("solve_cs2")).code, 0);
  EXPECT_EQ(slurp(sol), slurp(kWork / "solve_cs2" / "solution.csv"));

  // u + 0.1 noise no longer solves the inclusion.
  CsvTable noisy = t;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (auto& row : noisy.rows) {
    row[1] = dincl::format_real(std::stod(row[1]) + 0.1 * d(rng));
    row[3] = dincl::format_real(std::stod(row[3]) + 0.1 * d(rng));
  }
  const fs::path noisy_path = kWork / "noisy.csv";
  dincl::write_csv(noisy_path.string(), noisy);
  EXPECT_EQ(run("verify " + cfg("case_study") + out("verify_noisy") + " --solution " + noisy_path.string()).code, 1);

  // The zero vector always solves it.
  CsvTable zero;
  zero.header = {"x", "u"};
  for (const auto& row : t.rows) zero.rows.push_back({row[0], "0"});
  const fs::path zero_path = kWork / "zero.csv";
  dincl::write_csv(zero_path.string(), zero);
  EXPECT_EQ(run("verify " + cfg("case_study") + out("verify_zero") + " " + zero_path.string()).code, 0);

  const CliRun bad = run("verify " + cfg("case_study") + " --mesh 50" + out("verify_bad") + " " + zero_path.string());
  EXPECT_EQ(bad.code, 4);
  EXPECT_NE(bad.err.find("dimension mismatch"), std::string::npos) << bad.err;
}

TEST(CliSolve, BelowLambdaStarWarns) {
  const CliRun r = run("solve " + cfg("case_study") + " --mesh 49 --lambda 40" + out("solve_low"));
  EXPECT_EQ(r.code, 2) << r.out << r.err;
  EXPECT_NE(r.out.find("theorem hypotheses unmet"), std::string::npos);
  EXPECT_TRUE(fs::exists(kWork / "solve_low" / "solution.csv"));
}

TEST(CliSolve, ZeroMapIsNotMultiple) {
  const CliRun r = run("solve " + cfg("zero_map") + out("solve_zero"));
  EXPECT_EQ(r.code, 3) << r.out << r.err;
  EXPECT_NE(r.out.find("multiplicity: false"), std::string::npos);
}

TEST(CliSweep, RowsAboveLambdaStarAreCertified) {
  const CliRun r = run("sweep " + cfg("case_study") + " --mesh 49" + out("sweep_cs"));
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const CsvTable t = read_csv((kWork / "sweep_cs" / "sweep.csv").string());
  ASSERT_EQ(t.rows.size(), 11u);
  const double ls = std::stod(t.meta_value("lambda_star"));
  const auto lambda = t.column("lambda"), e1 = t.column("energy1");
  std::size_t above = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (i > 0) EXPECT_GT(lambda[i], lambda[i - 1]);
    if (lambda[i] >= ls) {
      ++above;
      EXPECT_EQ(t.rows[i].back(), "true") << lambda[i];
      EXPECT_LT(e1[i], 0.0);
    }
  }
  EXPECT_GE(above, 9u);
}

TEST(CliSweep, SinglePointMatchesSolve) {
  const fs::path p = write_config("single", std::string(kCaseStudyMap) +
                                                "mesh.n = 49\nlambda.scale = 2\nlambda.sweep.scale = 2, 2, 1\n");
  ASSERT_EQ(run("sweep --config " + p.string() + out("single_sweep")).code, 0);
  ASSERT_EQ(run("solve --config " + p.string() + out("single_solve")).code, 0);
  const CsvTable sw = read_csv((kWork / "single_sweep" / "sweep.csv").string());
  const CsvTable so = read_csv((kWork / "single_solve" / "solution.csv").string());
  ASSERT_EQ(sw.rows.size(), 1u);
  EXPECT_EQ(sw.rows[0][0], so.meta_value("lambda"));
  EXPECT_EQ(sw.rows[0][1], so.meta_value("energy1"));
  EXPECT_EQ(sw.rows[0][2], so.meta_value("energy2"));
}

TEST(CliSweep, ZeroCountIsAConfigError) {
  const fs::path p = write_config("count0", std::string(kCaseStudyMap) + "lambda.sweep = 1, 2, 0\n");
  const CliRun r = run("sweep --config " + p.string() + out("count0"));
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("lambda.sweep"), std::string::npos) << r.err;
}

TEST(CliUsage, NoSubcommandFails) {
  EXPECT_NE(run("").code, 0);
  EXPECT_EQ(run("--help").code, 0);
}
