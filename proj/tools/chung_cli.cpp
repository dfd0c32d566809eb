#include <iostream>

#include <CLI11.hpp>

#include "chung/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Chung-type recursion bounds and SGD / RR rate experiments"};
  app.set_version_flag("--version", chung::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  chung::GlobalOptions o;
  std::uint64_t seed = 0;
  long draws = 0, kmax = 0;
  app.add_option("--config", o.config, "JSON config file");
  app.add_option("--out", o.out, "output directory (default: stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized commands");
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--skip-verify", o.skip_verify, "run without checking the problem's PL claim");

  auto* sim = app.add_subcommand("simulate-recursion", "worst-case PL recursion over a K grid");
  auto* bound = app.add_subcommand("bound", "evaluate a convergence bound");
  auto* run = app.add_subcommand("run", "run GD / SGD / RR on a test problem");
  auto* verify = app.add_subcommand("verify", "run a property suite");
  auto* fit = app.add_subcommand("fit", "log-log slope per series of a CSV");
  auto* heat = app.add_subcommand("heatmap", "rate exponent over a (p, theta) grid");
  (void)sim;
  (void)bound;
  (void)run;

  verify->add_option("suite", o.positional, "chung | bounds | inequalities | assumptions")->required();
  auto* draws_opt = verify->add_option("--draws", draws, "draws per suite (samples for assumptions)");
  auto* kmax_opt = verify->add_option("--kmax", kmax, "largest K for the inequality suite");
  fit->add_option("input", o.positional, "CSV from simulate-recursion or run")->required();
  heat->add_option("--method", o.method, "sgd or rr")->check(CLI::IsMember({"sgd", "rr"}));
  heat->add_option("--p-cells", o.p_cells, "number of p values j/n, j = 1..n");
  heat->add_option("--theta-cells", o.theta_cells, "number of theta values on [1/2, 1]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : chung::exit_config;
  }
  if (*seed_opt) o.seed = seed;
  if (*draws_opt) o.draws = draws;
  if (*kmax_opt) o.kmax = kmax;
  return chung::dispatch(app.get_subcommands().front()->get_name(), o, std::cout, std::cerr);
}
