#pragma once

// The five front-end commands. Each writes its files into the output directory,
// prints a short summary to `log` and returns the process exit code.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dincl/config.hpp"
#include "dincl/verify.hpp"

namespace dincl {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,        // hypothesis or verification failure
  kExitPrecondition = 2,  // lambda below lambda*
  kExitNotMultiple = 3,
  kExitInternal = 4,      // bad input or anything unexpected
};

std::uint64_t fnv1a(const std::string& text);

// lambda* for the configured bump, or nullopt when J_f(sbar) <= 0.
std::optional<double> config_lambda_star(const ProblemConfig& cfg, const Mesh1D& mesh);

// The single lambda of the config (`lambda` or `lambda.scale` times lambda*).
// Throws ConfigError when neither is set or lambda* is unavailable for a scale.
double resolve_lambda(const ProblemConfig& cfg, const std::optional<double>& lambda_star);

// Lambdas of the sweep, in order. Same error behaviour as resolve_lambda.
std::vector<double> sweep_lambdas(const ProblemConfig& cfg, const std::optional<double>& lambda_star);

struct RunRecord {
  std::uint64_t config_hash = 0;
  double lambda = 0.0;
  TwoSolutions two;
  Certificate c1;
  Certificate c2;
  double wall_seconds = 0.0;
  int exit_code = kExitInternal;

  std::string to_json() const;
};

// Solves at `lambda` with everything else from the config and grades the result.
RunRecord run_solve(const ProblemConfig& cfg, double lambda);

int solve_exit_code(const RunRecord& r);

int cmd_check(const ProblemConfig& cfg, std::ostream& log);
int cmd_potential(const ProblemConfig& cfg, std::ostream& log);
int cmd_solve(const ProblemConfig& cfg, std::ostream& log);
int cmd_sweep(const ProblemConfig& cfg, std::ostream& log);
// lambda: explicit override, else the `lambda` metadata of the CSV, else the config.
int cmd_verify(const ProblemConfig& cfg, const std::string& solution_csv, std::optional<double> lambda,
               std::ostream& log);

}  // namespace dincl
