#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "saddle/cli.hpp"

using namespace saddle;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("saddle_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

std::string error_of(const std::string& text) {
  try {
    cli::parse_config(text, "x.cfg");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  const cli::Config c = cli::parse_config("# comment\n[model]\nm = 2  # trailing\n\n[grid]\nR=12\n", "x.cfg");
  CHECK(c.integer("model", "m") == 2);
  CHECK(c.real("grid", "R") == 12.0);
  CHECK(c.real("grid", "h") == 0.5);
  CHECK(c.str("model", "nonlinearity") == "allen_cahn");
  CHECK(c.lines.at("grid").at("R") == 6);
  CHECK(c.reals("saddle", "cylinders") == std::vector<double>{5, 10});

  CHECK(error_of("[model]\nm = 2\nm = 3\n") == "x.cfg:3: duplicate key model.m");
  CHECK(error_of("m = 2\n") == "x.cfg:1: key outside of a section");
  CHECK(error_of("[model]\n\nbogus = 1\n") == "x.cfg:3: unknown key model.bogus");
  CHECK(error_of("[nowhere]\n") == "x.cfg:1: unknown section [nowhere]");
  CHECK(error_of("[grid]\nR = twenty\n") == "x.cfg:2: bad real value for grid.R: twenty");
  CHECK(error_of("[grid]\nR 20\n") == "x.cfg:2: expected key = value");
  CHECK(error_of("[grid\n") == "x.cfg:1: unterminated section header");
  CHECK(error_of("[saddle]\ncylinders = 5, x\n").rfind("x.cfg:2: bad reals", 0) == 0);
  CHECK(error_of("[model]\nm = 1.5\n") == "x.cfg:2: bad int value for model.m: 1.5");

  for (const auto& e : cli::schema()) CHECK_FALSE(e.doc.empty());
}

TEST_CASE("hardy subcommand") {
  const fs::path d = scratch("hardy");
  const fs::path cfg = write_config(d, "[hardy]\nn = 8\nnodes = 400\n");
  REQUIRE(cli::run("hardy", cfg.string(), (d / "a").string()) == 0);
  const auto s = summary(d / "a");
  CHECK(s["status"] == "ok");
  CHECK(s["verdicts"]["hardy"] == "hardy_nonnegative");
  CHECK(s["config"]["hardy"]["nodes"] == "400");
  CHECK(s["config"]["grid"]["R"] == "20");  // defaults are embedded
  CHECK(s["results"]["hardy"]["hardy_constant"] == 6.25);

  REQUIRE(cli::run("hardy", cfg.string(), (d / "b").string()) == 0);
  CHECK(slurp(d / "a" / "hardy.csv") == slurp(d / "b" / "hardy.csv"));

  const fs::path cfg6 = write_config(d, "[hardy]\nn = 6\nnodes = 400\n");
  REQUIRE(cli::run("hardy", cfg6.string(), (d / "c").string()) == 0);
  CHECK(summary(d / "c")["verdicts"]["hardy"] == "negative_direction_exists");
}

TEST_CASE("layer subcommand reports the closed form error") {
  const fs::path d = scratch("layer");
  const fs::path cfg =
      write_config(d, "[model]\nnonlinearity = peierls_nabarro\n[layer]\nx_max = 10\nlambda_max = 20\nh = 0.1\n");
  REQUIRE(cli::run("layer", cfg.string(), d.string()) == 0);
  const auto s = summary(d);
  const auto& r = s["results"]["layer"];
  CHECK(r["closed_form_tol"] == 0.005);
  CHECK(r["closed_form_sup_error"].get<double>() > 0);
  CHECK(r["closed_form_pass"] == (r["closed_form_sup_error"].get<double>() <= 0.005));
  CHECK(fs::exists(d / "layer.csv"));
}

TEST_CASE("exit codes") {
  const fs::path d = scratch("codes");
  CHECK(cli::run("hardy", (d / "missing.cfg").string(), d.string()) == 2);
  const fs::path bad = write_config(d, "[hardy]\nn = eight\n");
  CHECK(cli::run("hardy", bad.string(), d.string()) == 2);
  const fs::path ok = write_config(d, "[hardy]\nn = 7\n");
  CHECK(cli::run("hardy", ok.string(), d.string()) == 2);
  CHECK(cli::run("bogus", ok.string(), d.string()) == 2);
  const fs::path stall = write_config(d, "[model]\nnonlinearity = peierls_nabarro\n[layer]\nx_max = 5\nlambda_max = 5\nh = 0.25\nmax_iter = 1\n");
  CHECK(cli::run("layer", stall.string(), d.string()) == 3);
  CHECK(summary(d)["status"] == "convergence_error");
}

TEST_CASE("saddle and maximal pipelines on a small grid") {
  const fs::path d = scratch("small");
  const fs::path cfg = write_config(d,
                                    "[run]\nseed = 4\n[grid]\nR = 8\nL = 6\nh = 0.5\n[saddle]\ncylinders = 5\n"
                                    "[maximal]\ncheck_minimizer = yes\n[asymptotics]\nradii = 2, 4\n"
                                    "[stability]\nrandom_samples = 3\n[model]\nm = 2\n[layer]\nh = 0.2\n");
  REQUIRE(cli::run("all", cfg.string(), (d / "a").string(), {2, 0, false}) == 0);
  const auto s = summary(d / "a");
  CHECK(s["threads"] == 2);
  CHECK(s["seed"] == 4);
  for (const char* k : {"saddle_below_zero_energy", "maximal_monotone_iteration", "maximality", "comparison"})
    CHECK(s["verdicts"][k] == "pass");
  CHECK(s["results"]["stability"]["rows"].get<int>() > 0);
  for (const char* f : {"saddle_field.csv", "maximal_field.csv", "monotone.csv", "asymptotic.csv", "gradient.csv",
                        "stability.csv", "hardy.csv", "layer.csv"})
    CHECK(fs::exists(d / "a" / f));

  REQUIRE(cli::run("maximal", cfg.string(), (d / "b").string(), {1, 4, true}) == 0);
  CHECK(slurp(d / "a" / "maximal_field.csv") == slurp(d / "b" / "maximal_field.csv"));
  CHECK(slurp(d / "a" / "monotone.csv") == slurp(d / "b" / "monotone.csv"));
}
