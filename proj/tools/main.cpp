#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using bmtrunc::cli::Command;
  bmtrunc::cli::RunConfig cfg;
  CLI::App app{"Block-augmented truncation of block-monotone Markov chains"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model_path, "model file (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", cfg.seed, "random seed")->default_val(42);
    sub->add_option("--out", cfg.out_path, "write results here instead of stdout");
    sub->add_option("--tol", cfg.tol, "uniformization tolerance")->default_val(1e-12);
  };
  auto add_truncation = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "truncation level")->default_val(10);
    sub->add_option("--style", cfg.style, "lc, fc or custom")->check(CLI::IsMember({"lc", "fc", "custom"}));
    sub->add_option("--weights", cfg.weights, "custom weights, e.g. 0=0.5,n=0.5");
  };
  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--n-min", cfg.n_min, "first level")->default_val(5);
    sub->add_option("--n-max", cfg.n_max, "last level")->default_val(40);
    sub->add_option("--step", cfg.step, "level step")->default_val(5);
    sub->add_option("--levels", cfg.levels, "explicit level list (overrides the range)")->delimiter(',');
    sub->add_option("--n-ref", cfg.n_ref, "reference truncation level");
    sub->add_option("--beta", cfg.beta, "fix the geometric rate of the Lyapunov function");
  };

  auto* validate = app.add_subcommand("validate", "check q-matrix, block monotonicity and dominance");
  add_common(validate);
  validate->add_option("--model2", cfg.model2_path, "model expected to dominate --model")->check(CLI::ExistingFile);

  auto* trunc = app.add_subcommand("truncate", "print a truncated generator");
  add_common(trunc);
  add_truncation(trunc);

  auto* solve = app.add_subcommand("solve", "stationary (and transient) law of a truncation");
  add_common(solve);
  add_truncation(solve);
  solve->add_option("--t", cfg.t, "also report the transient law at this time");

  auto* bound = app.add_subcommand("bound", "error bounds for last-column truncations");
  add_common(bound);
  add_range(bound);
  bound->add_option("--t", cfg.t, "also evaluate the bound at this time");

  auto* sweep = app.add_subcommand("sweep", "compare lc, fc and custom truncations over a level range");
  add_common(sweep);
  add_range(sweep);
  sweep->add_option("--weights", cfg.weights, "custom weights, e.g. 0=0.5,n=0.5");
  sweep->add_option("--jobs", cfg.jobs, "worker threads")->default_val(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (validate->parsed()) cfg.command = Command::Validate;
  if (trunc->parsed()) cfg.command = Command::Truncate;
  if (solve->parsed()) cfg.command = Command::Solve;
  if (bound->parsed()) cfg.command = Command::Bound;
  if (sweep->parsed()) cfg.command = Command::Sweep;
  return bmtrunc::cli::run(cfg, std::cout, std::cerr);
}
