// dincl: check, tabulate and solve  -u'' in lambda F(u)  from a config file.

#include <iostream>

#include "CLI11.hpp"
#include "dincl/config.hpp"
#include "dincl/error.hpp"
#include "dincl/run.hpp"

namespace {

struct Flags {
  std::string config;
  std::string solution;
  dincl::Overrides over;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "problem file (key = value)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.over.out, "output directory (overrides output.dir)");
  sub->add_option("--lambda", f.over.lambda, "lambda (overrides lambda and lambda.scale)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.over.seed, "random seed (overrides solver.seed)");
  sub->add_option("--mesh", f.over.mesh, "interior nodes (overrides mesh.n)")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dincl: two nonzero solutions of -u'' in lambda F(u) on (0, L), u = 0 at both ends"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* check = app.add_subcommand("check", "u.s.c., growth and structural hypothesis checks on F");
  CLI::App* potential = app.add_subcommand("potential", "tabulate f, its limits, J_f and the Aumann integral");
  CLI::App* solve = app.add_subcommand("solve", "minimizer and mountain-pass point with certificates");
  CLI::App* sweep = app.add_subcommand("sweep", "solve over the lambda sweep");
  CLI::App* verify = app.add_subcommand("verify", "certify a solution CSV");
  for (CLI::App* sub : {check, potential, solve, sweep, verify}) add_common(sub, f);
  verify->add_option("--solution,solution", f.solution, "CSV with x and u / u1, u2 columns")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dincl::kExitInternal;
  }

  try {
    dincl::RawConfig raw = dincl::read_config_file(f.config);
    dincl::apply_overrides(raw, f.over);
    const dincl::ProblemConfig cfg = dincl::load_config(raw);
    if (check->parsed()) return dincl::cmd_check(cfg, std::cout);
    if (potential->parsed()) return dincl::cmd_potential(cfg, std::cout);
    if (solve->parsed()) return dincl::cmd_solve(cfg, std::cout);
    if (sweep->parsed()) return dincl::cmd_sweep(cfg, std::cout);
    return dincl::cmd_verify(cfg, f.solution, f.over.lambda, std::cout);
  } catch (const dincl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return dincl::kExitInternal;
}
