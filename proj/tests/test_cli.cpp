#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "quadromech/io.hpp"
#include "support.hpp"

using namespace quadromech;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("quadromech_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli(const std::string& args, const std::string& env = "") {
  const fs::path err = fs::temp_directory_path() / "quadromech_cli_stderr.txt";
  const std::string cmd = env + " " + std::string(QUADROMECH_CLI_PATH) + " " + args + " 2>" + err.string();
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) o.out += buf.data();
  const int status = pclose(pipe);
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.err = slurp(err);
  return o;
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

json small_custom(const fs::path& out) {
  return {{"axes", json::array({{{"parameter", "J"}, {"min", 0.3}, {"max", 0.6}, {"count", 4}}})},
          {"fixed", {{"epsilon", 0.05}, {"n_th", 1e-4}}},
          {"truncation", {{"n_photon_max", 2}, {"n_phonon_max", 6}}},
          {"output", {{"directory", out.string()}, {"formats", {"csv", "json"}}, {"basename", "small"}}}};
}

SweepResult handmade_result() {
  SweepResult r;
  r.spec.scenario = "custom";
  r.spec.axes = {{"J", 0.1, 0.2, 2, Spacing::Linear, {}}};
  r.coordinate_columns = {"J_over_gc"};
  r.value_columns = {"n_a"};
  r.rows = {{{0.1}, {0.5}, ""},
            {{0.2}, {std::numeric_limits<double>::quiet_NaN()}, "DEGENERACY: values 1e-20, \"2e-19\""}};
  r.provenance.code_version = "quadromech test";
  return r;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("CSV emission") {
  const SweepResult r = handmade_result();
  const std::string csv = to_csv(r);
  CHECK(csv ==
        "J_over_gc,n_a,error\n"
        "0.10000000000000001,0.5,\n"
        "0.20000000000000001,nan,\"DEGENERACY: values 1e-20, \"\"2e-19\"\"\"\n");
  SweepResult ok = r;
  ok.rows.pop_back();
  CHECK(to_csv(ok) == "J_over_gc,n_a\n0.10000000000000001,0.5\n");
}

TEST_CASE("JSON emission") {
  const json j = to_json(handmade_result());
  CHECK(j["rows"][1]["n_a"].is_null());
  CHECK(j["rows"][1]["error"].get<std::string>().rfind("DEGENERACY", 0) == 0);
  CHECK(j["failed_points"] == 1);
  CHECK(j["provenance"]["code_version"] == "quadromech test");
  CHECK(j["provenance"].contains("rtol"));
  CHECK(j["provenance"].contains("truncation"));
  // nlohmann::json objects are ordered maps, so keys come out sorted.
  const std::string text = j.dump();
  CHECK(text.find("\"columns\"") < text.find("\"failed_points\""));
  CHECK(text.find("\"failed_points\"") < text.find("\"provenance\""));
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_CODE(parse_run_config(json{{"scenario", "fig2a"}, {"bogus", 1}}), ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(parse_run_config(json{{"scenario", "fig9"}}), ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(parse_run_config(json{{"scenario", "fig2a"}, {"fixed", {{"J", "big"}}}}),
                    ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(parse_run_config(json{{"scenario", "fig2a"}, {"fixed", {{"omega", 1.0}}}}),
                    ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(parse_run_config(json{{"fixed", {{"J", 1.0}}}}), ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(parse_run_config(json{{"scenario", "fig2a"}, {"output", {{"formats", {"xml"}}}}}),
                    ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(parse_run_config(json{{"scenario", "fig2a"}, {"truncation", {{"n_photon_max", 1}}}}),
                    ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(parse_run_config(json{{"scenario", "fig2a"}, {"parallelism", 0}}), ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(
      parse_run_config(json{{"axes", json::array({{{"parameter", "J"}, {"min", 1.0}, {"max", 1.0}, {"count", 3}}})}}),
      ErrorCode::ConfigInvalid);
  CHECK_THROWS_CODE(load_run_config("/nonexistent/config.json"), ErrorCode::ConfigNotFound);

  const fs::path dir = scratch("badjson");
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_CODE(load_run_config(dir / "bad.json"), ErrorCode::ConfigInvalid);
}

TEST_CASE("config overrides a built-in scenario") {
  const RunConfig c = parse_run_config(json{{"scenario", "fig5"},
                                            {"fixed", {{"epsilon", 0.01}}},
                                            {"solver", {{"propagation", "rk45"}, {"convergence_tol", 1e-3}}},
                                            {"truncation", {{"n_phonon_max", 14}}},
                                            {"parallelism", 4},
                                            {"seed", 7}});
  CHECK(c.spec.scenario == "fig5");
  CHECK(c.spec.fixed.J.real() == 5.0);
  CHECK(c.spec.fixed.epsilon == 0.01);
  CHECK(c.spec.propagation.method == PropagationMethod::RungeKutta);
  CHECK(c.spec.convergence_tol == 1e-3);
  CHECK(c.spec.space == TruncatedSpace(3, 14));
  CHECK(c.parallelism == 4);
  CHECK(c.seed == 7);
  CHECK(c.formats == std::vector<std::string>{"csv"});
}

TEST_CASE("custom tau config") {
  const RunConfig c = parse_run_config(json{
      {"scenario", "custom"},
      {"axes", json::array({{{"parameter", "tau"}, {"min", 0.0}, {"max", 10.0}, {"count", 101}}})},
      {"fixed", {{"J", 5.0}, {"delta_m", 3.9}, {"delta", 7.8}, {"epsilon", 0.05}, {"n_th", 1e-4}}},
      {"outputs", {"g2_bb_tau"}}});
  CHECK(c.spec.has_tau_axis());
  CHECK(c.spec.outputs == std::vector<std::string>{"g2_bb_tau"});
  CHECK(c.spec.fixed.gamma_m == doctest::Approx(0.1));
}

TEST_CASE("cli jopt and spectrum") {
  const Outcome j = cli("jopt --gamma-c 1 --gamma-m 0.1");
  CHECK(j.exit_code == 0);
  CHECK(j.out == "0.40620\n");
  CHECK(cli("jopt --gamma-c 1 --gamma-m 1").out == "0.86603\n");
  const Outcome bad = cli("jopt --gamma-c 0");
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("error[INVALID_RATE]") == 0);

  const Outcome s = cli("spectrum --J 1 --manifold 2");
  CHECK(s.exit_code == 0);
  CHECK(s.out.find("E=-1.4142135624") != std::string::npos);
  CHECK(cli("spectrum --J 1 --manifold 7").exit_code == 1);
}

TEST_CASE("cli reports a missing config") {
  const Outcome o = cli("run --config missing.json");
  CHECK(o.exit_code == 1);
  CHECK(o.err.find("error[CONFIG_NOT_FOUND]") == 0);
  CHECK(cli("run").exit_code == 1);
  CHECK(cli("frobnicate").exit_code == 1);
}

TEST_CASE("cli run writes byte-identical files for any thread count") {
  const fs::path dir = scratch("run");
  const fs::path cfg = write_config(dir, small_custom(dir / "a"));
  const Outcome a = cli("run --config " + cfg.string() + " --threads 1");
  REQUIRE(a.exit_code == 0);
  const Outcome b = cli("run --config " + cfg.string() + " --out " + (dir / "b").string(), "QUADROMECH_THREADS=3");
  REQUIRE(b.exit_code == 0);
  const std::string csv = slurp(dir / "a" / "small.csv");
  CHECK(csv == slurp(dir / "b" / "small.csv"));
  CHECK(slurp(dir / "a" / "small.json") == slurp(dir / "b" / "small.json"));
  CHECK(csv.rfind("J_over_gc,n_a,n_b,g2_aa_0,g2_bb_0,g2_ab_0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  const json j = json::parse(slurp(dir / "a" / "small.json"));
  CHECK(j["provenance"]["truncation"]["n_phonon_max"] == 6);
  CHECK(j["rows"].size() == 4);

  CHECK(cli("run --config " + cfg.string(), "QUADROMECH_THREADS=zero").exit_code == 1);
}

TEST_CASE("cli exits 2 when points fail") {
  const fs::path dir = scratch("fail");
  json doc = small_custom(dir);
  doc["axes"] = json::array({{{"parameter", "epsilon"}, {"values", {0.0, 0.05}}}});
  const Outcome o = cli("run --config " + write_config(dir, doc).string());
  CHECK(o.exit_code == 2);
  const std::string csv = slurp(dir / "small.csv");
  CHECK(csv.rfind("epsilon_over_gc,n_a,n_b,g2_aa_0,g2_bb_0,g2_ab_0,error\n", 0) == 0);
  CHECK(csv.find("UNDEFINED_CORRELATION") != std::string::npos);
}

TEST_CASE("cli run of a built-in scenario") {
  const fs::path dir = scratch("fig2a");
  const Outcome o = cli("run --scenario fig2a --threads 2 --out " + dir.string());
  REQUIRE(o.exit_code == 0);
  const std::string csv = slurp(dir / "fig2a.csv");
  CHECK(csv.rfind("J_over_gc,n_a,n_b,g2_aa_0,g2_bb_0,g2_ab_0\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
}

TEST_CASE("cli validate") {
  const Outcome o = cli("validate");
  CHECK(o.exit_code == 0);
  CHECK(o.out.find("[FAIL]") == std::string::npos);
  CHECK(std::count(o.out.begin(), o.out.end(), '\n') == 7);
}
