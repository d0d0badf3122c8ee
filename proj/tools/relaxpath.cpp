#include <CLI11.hpp>

#include <iostream>

#include "relaxpath/commands.hpp"

using namespace relaxpath::cli;

int main(int argc, char** argv) {
  CLI::App app{"Relaxation paths of relaxed maximum entropy problems"};
  app.require_subcommand(1);

  const std::vector<std::string> trackers{"local", "sparse", "uniform", "global", "auto"};
  const std::vector<std::string> objectives{"entropy", "squared"};
  std::string tracker = "auto";
  std::string objective = "entropy";

  PathOptions path_opt;
  auto* path = app.add_subcommand("path", "Compute the full relaxation path");
  path->add_option("--input", path_opt.input, "Instance JSON file")->required();
  path->add_option("--tracker", tracker)->check(CLI::IsMember(trackers));
  path->add_option("--objective", objective)->check(CLI::IsMember(objectives));
  path->add_option("--out", path_opt.out, "Output file (default stdout)");

  SolveOptions solve_opt;
  auto* solve = app.add_subcommand("solve", "Solve at a single relaxation value");
  solve->add_option("--input", solve_opt.input, "Instance JSON file")->required();
  solve->add_option("--nu", solve_opt.nu, "Relaxation parameter")->required();
  solve->add_option("--objective", objective)->check(CLI::IsMember(objectives));
  solve->add_option("--out", solve_opt.out, "Output file (default stdout)");

  SelectOptions select_opt;
  auto* select = app.add_subcommand("select", "Admissible-model table from validation counts");
  select->add_option("--input", select_opt.input, "Instance JSON file with \"r\"")->required();
  select->add_option("--path", select_opt.path, "Precomputed path file");
  select->add_option("--tracker", tracker)->check(CLI::IsMember(trackers));
  select->add_option("--lambda-min", select_opt.lambda_min, "Smallest lambda = 1/nu searched");
  select->add_option("--out", select_opt.out, "Output file (default stdout)");

  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Seeded Zipf path-complexity experiment (CSV)");
  sweep->add_option("--dist", sweep_opt.dist)->check(CLI::IsMember({"zipf"}));
  sweep->add_option("--n", sweep_opt.n, "Dimension");
  sweep->add_option("--samples", sweep_opt.samples, "Sample sizes (default n/4 n/2 n 2n)")
      ->delimiter(',');
  sweep->add_option("--seed", sweep_opt.seed);
  sweep->add_option("--repeats", sweep_opt.repeats);
  sweep->add_option("--prior-offset", sweep_opt.prior_offset, "u_j proportional to 1/(offset+j)");
  sweep->add_option("--zipf-exponent", sweep_opt.exponent, "base q_j proportional to 1/j^s");
  sweep->add_option("--out", sweep_opt.out, "Output file (default stdout)");

  CascadeOptions cascade_opt;
  auto* cascade = app.add_subcommand("cascade", "Chain of relaxed maxent solves");
  cascade->add_option("--input", cascade_opt.input, "Cascade JSON file")->required();
  cascade->add_option("--out", cascade_opt.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  path_opt.tracker = select_opt.tracker = parse_tracker(tracker);
  path_opt.objective = solve_opt.objective = parse_objective(objective);

  if (*path) return cmd_path(path_opt, std::cerr);
  if (*solve) return cmd_solve(solve_opt, std::cerr);
  if (*select) return cmd_select(select_opt, std::cerr);
  if (*sweep) return cmd_sweep(sweep_opt, std::cerr);
  return cmd_cascade(cascade_opt, std::cerr);
}
