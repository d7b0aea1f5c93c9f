#include <iostream>

#include "CLI11.hpp"
#include "saddle/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"saddle solutions of fractional Allen-Cahn equations"};
  std::string sub, config, out = "out";
  saddle::cli::RunOptions opt;
  app.add_option("subcommand", sub, "layer, saddle, maximal, asymptotics, stability, hardy or all")->required();
  app.add_option("--config", config, "config file")->required();
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  auto* seed = app.add_option("--seed", opt.seed, "seed for random perturbations");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  opt.seed_set = seed->count() > 0;
  return saddle::cli::run(sub, config, out, opt);
}
