#ifndef BMTRUNC_TOOLS_CLI_HPP
#define BMTRUNC_TOOLS_CLI_HPP

#include "bmtrunc/bmtrunc.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bmtrunc::cli {

enum class Command { Validate, Truncate, Solve, Bound, Sweep };

struct RunConfig {
  Command command = Command::Validate;
  std::string model_path;
  std::string model2_path;
  Index n = 10;
  Index n_min = 5;
  Index n_max = 40;
  Index step = 5;
  std::vector<Index> levels;  // explicit list; overrides n_min/n_max/step
  std::optional<Index> n_ref;
  std::string style = "lc";
  std::string weights = "0=0.5,n=0.5";
  std::optional<double> beta;
  std::optional<double> t;
  double tol = 1e-12;
  int jobs = 1;
  unsigned seed = 42;
  std::string out_path;

  std::vector<Index> sweep_levels() const;
  /// Reference level for true errors: n_ref if set, else max(4 n_max, 200).
  Index reference_level() const;
};

/// Exit code for an exception escaping a run: 1 check, 2 input, 3 numerical.
int exit_code_for(const std::exception& e);

int run_validate(const RunConfig& cfg, std::ostream& out);
int run_truncate(const RunConfig& cfg, std::ostream& out);
int run_solve(const RunConfig& cfg, std::ostream& out);
int run_bound(const RunConfig& cfg, std::ostream& out);
int run_sweep(const RunConfig& cfg, std::ostream& out);
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Certificate with K = 0 for a loaded model, chosen by model kind.
DriftCertificate certify(const LoadedModel& m, std::optional<double> beta);

}  // namespace bmtrunc::cli

#endif  // BMTRUNC_TOOLS_CLI_HPP
