#include <CLI11.hpp>

#include <iostream>

#include "nonlocal/cli.hpp"

namespace {

void add_common(CLI::App* sub, nonlocal::cli::RunConfig& c) {
  sub->add_option("--op", c.op, "operator: rfl | sfl | classical")->check(CLI::IsMember({"rfl", "sfl", "classical"}));
  sub->add_option("--s", c.s, "order s");
  sub->add_option("--domain", c.domain, "interval | ball")->check(CLI::IsMember({"interval", "ball"}));
  sub->add_option("--n", c.n, "space dimension");
  sub->add_option("--r", c.r, "radius");
  sub->add_option("--N", c.N, "number of grid nodes");
  sub->add_option("--grade", c.grade, "boundary grading exponent");
  sub->add_option("--M", c.M, "SFL series truncation (default N)");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--seed", c.seed, "seed for randomized checks");
}

void add_problem(CLI::App* sub, nonlocal::cli::RunConfig& c) {
  sub->add_option("--g", c.g, "zero | one | delta_pow(a) | eigmode(j) | <table file>");
  sub->add_option("--h", c.h, "boundary values: one constant, or values at -r,+r")->delimiter(',');
  sub->add_option("--K-frac", c.K_frac, "compact set {delta >= frac * r}");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = nonlocal::cli;
  cli::RunConfig c;
  CLI::App app{"Spectral solver for nonlocal Dirichlet problems with large boundary data"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);

  auto* eigen = app.add_subcommand("eigen", "eigenpairs of the discrete operator");
  add_common(eigen, c);

  auto* solve = app.add_subcommand("solve", "large solution for one lambda");
  add_common(solve, c);
  add_problem(solve, c);
  double lambda = 0.0;
  solve->add_option("--lambda", lambda, "spectral parameter")->required();

  auto* sweep = app.add_subcommand("sweep", "lambda sweep toward an eigenvalue");
  add_common(sweep, c);
  add_problem(sweep, c);
  sweep->add_option("--lambda-list", c.lambda_list, "comma separated lambdas")->delimiter(',');
  sweep->add_option("--index", c.index, "eigenvalue index i (1-based)");

  auto* limit = app.add_subcommand("limit-s", "ladder s -> 1 for large solutions");
  add_common(limit, c);
  add_problem(limit, c);
  limit->add_option("--lambda", lambda, "spectral parameter (default 0)");
  limit->add_option("--s-list", c.s_list, "comma separated ladder")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "acceptance suite");
  add_common(verify, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::Ok : cli::BadConfig;
  }

  if (solve->parsed() || (limit->parsed() && limit->count("--lambda"))) c.lambda = lambda;
  return cli::guarded([&] {
    if (eigen->parsed()) return cli::cmd_eigen(c);
    if (solve->parsed()) return cli::cmd_solve(c);
    if (sweep->parsed()) return cli::cmd_sweep(c);
    if (limit->parsed()) return cli::cmd_limit_s(c);
    return cli::cmd_verify(c);
  });
}
