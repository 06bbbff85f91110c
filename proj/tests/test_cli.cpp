#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lowreg/cli.hpp"
#include "lowreg/config.hpp"

using namespace lowreg;

namespace {

struct CliResult {
  int status;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "lowreg");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const std::vector<std::string> tiny_converge{"converge",          "-O", "samples=2",     "-O", "steps=4,8",
                                             "-O",                "n_fine=32", "-O", "modes=8", "-O",
                                             "phi_amplitude=0.1", "-O", "data_amplitude=0.5"};

}  // namespace

TEST_CASE("config files parse with comments and reject unknown keys", "[cli]") {
  std::istringstream ok("# comment\n\nmodes = 12\n  scheme=nls-high  \n");
  const auto c = RunConfig::parse(ok);
  REQUIRE(c.get("modes") == "12");
  REQUIRE(c.get("scheme") == "nls-high");
  REQUIRE(c.get("lambda") == "-1");
  std::istringstream unknown("colour = blue\n");
  REQUIRE_THROWS_AS(RunConfig::parse(unknown), std::invalid_argument);
  std::istringstream malformed("modes 12\n");
  REQUIRE_THROWS_AS(RunConfig::parse(malformed), std::invalid_argument);
}

TEST_CASE("typed accessors and overrides", "[cli]") {
  auto c = RunConfig::defaults();
  c.apply_override("steps=2,4,8");
  REQUIRE(c.get_int_list("steps") == std::vector<long long>{2, 4, 8});
  c.apply_override("record_spectra=true");
  REQUIRE(c.get_bool("record_spectra"));
  c.apply_override("lambda=0.5");
  REQUIRE(c.get_double("lambda") == 0.5);
  REQUIRE_THROWS_AS(c.apply_override("no_equals_sign"), std::invalid_argument);
  REQUIRE_THROWS_AS(c.apply_override("bogus=1"), std::invalid_argument);
  c.set("modes", "x");
  REQUIRE_THROWS_AS(c.get_int("modes"), std::invalid_argument);
  const auto echo = c.echo();
  REQUIRE(echo.find("# lambda = 0.5\n") != std::string::npos);
  REQUIRE(echo.find("# steps = 2,4,8\n") != std::string::npos);
}

TEST_CASE("trees subcommand lists the decorated trees", "[cli]") {
  const auto r = run({"trees", "-O", "tree_order=1"});
  REQUIRE(r.status == 0);
  REQUIRE(r.out.find("name,order,symmetry,upsilon,bracket\n") != std::string::npos);
  REQUIRE(r.out.find("T1,1,2,2 vbar_{k1} v_{k2} v_{k3},") != std::string::npos);
  REQUIRE(r.out.find("T3,1,1,v_{k1},") != std::string::npos);
  REQUIRE(r.out.find("T4,") == std::string::npos);
  const auto full = run({"trees"});
  REQUIRE(full.out.find("T7,3/2,1,v_{k1},") != std::string::npos);
}

TEST_CASE("bad input exits with status 2 and a message", "[cli]") {
  const auto r = run({"converge", "-O", "no_such_key=1"});
  REQUIRE(r.status == 2);
  REQUIRE(r.err.rfind("error:", 0) == 0);
  REQUIRE(run({"trees", "-O", "tree_order=2"}).status == 2);
  REQUIRE(run({"converge", "--config", "/nonexistent/run.cfg"}).status == 2);
  REQUIRE(run({}).status != 0);
}

TEST_CASE("converge output is deterministic and echoes the configuration", "[cli]") {
  const auto a = run(tiny_converge);
  const auto b = run(tiny_converge);
  REQUIRE(a.status == 0);
  REQUIRE(a.out == b.out);
  REQUIRE(a.out.rfind("# ", 0) == 0);
  REQUIRE(a.out.find("# samples = 2\n") != std::string::npos);
  REQUIRE(a.out.find("# sigma_phi = 4\n") != std::string::npos);
  auto seeded = tiny_converge;
  seeded.insert(seeded.end(), {"--seed", "5"});
  const auto c = run(seeded);
  REQUIRE(c.out.find("# seed = 5\n") != std::string::npos);
  REQUIRE(c.out != a.out);
}

TEST_CASE("output file and config file round trip through the binary", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "lowreg_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "samples = 2\nsteps = 4,8\nn_fine = 32\nmodes = 8\nphi_amplitude = 0.1\ndata_amplitude = 0.5\n";
  }
  const auto out = dir / "out.csv";
  const std::string cmd =
      std::string(LOWREG_CLI_PATH) + " converge --config " + cfg.string() + " --out " + out.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const auto first = slurp(out);
  REQUIRE(first == run(tiny_converge).out);
  REQUIRE(std::system(cmd.c_str()) == 0);
  REQUIRE(slurp(out) == first);
  std::filesystem::remove_all(dir);
}

TEST_CASE("simulate reports norms per step", "[cli]") {
  const auto r = run({"simulate", "-O", "modes=4", "-O", "simulate_steps=4", "-O", "nonlinear=false", "-O",
                      "stochastic=false", "-O", "data=plane-wave"});
  REQUIRE(r.status == 0);
  REQUIRE(r.out.find("step,t,norm_l2,norm_h1,norm_h2\n0,0,1,") != std::string::npos);
  REQUIRE(r.out.find("\n4,1,") != std::string::npos);
}
