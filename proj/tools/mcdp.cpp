#include <iostream>

#include "CLI11.hpp"
#include "mcdp/driver.hpp"

namespace {

int emit(const mcdp::cli::CommandResult& r) {
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}

void add_query_flags(CLI::App* cmd, mcdp::cli::QuerySpec& q) {
  cmd->add_option("model", q.model_path, "model file (.mcd)")->required();
  cmd->add_option("--f", q.assignments, "functionality value, axis=value[unit]");
  cmd->add_option("--max-iter", q.max_iter, "loop iteration cap (default 1000000, or MCDP_MAX_ITER)");
  cmd->add_option("--format", q.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--tolerance", q.tolerances, "tolerance injection, atom[/axis]=a1,a2,...");
  cmd->add_option("--relax-n", q.relax_n, "sample count for sampling relaxations")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone co-design problem solver with interval uncertainty"};
  app.require_subcommand(1);

  std::string check_path;
  auto* check = app.add_subcommand("check", "parse, type-check and spot-check a model");
  check->add_option("model", check_path, "model file (.mcd)")->required();

  std::string fmt_path;
  auto* fmt = app.add_subcommand("fmt", "print a model in canonical form");
  fmt->add_option("model", fmt_path, "model file (.mcd)")->required();

  mcdp::cli::QuerySpec solve_q;
  auto* solve = app.add_subcommand("solve", "solve one functionality query");
  add_query_flags(solve, solve_q);

  mcdp::cli::QuerySpec sweep_q;
  auto* sweep = app.add_subcommand("sweep", "solve a grid of queries");
  add_query_flags(sweep, sweep_q);
  sweep->add_option("--axis", sweep_q.axis, "functionality axis to sweep");
  sweep->add_option("--from", sweep_q.from, "first grid value");
  sweep->add_option("--to", sweep_q.to, "last grid value");
  sweep->add_option("--steps", sweep_q.steps, "number of grid points")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mcdp::cli::kExitError;
  }

  if (*check) return emit(mcdp::cli::run_check(check_path));
  if (*fmt) return emit(mcdp::cli::run_format(fmt_path));
  if (*solve) return emit(mcdp::cli::run_solve(solve_q));
  return emit(mcdp::cli::run_sweep(sweep_q));
}
