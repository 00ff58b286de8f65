#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "catft/commands.hpp"
#include "doctest.h"

using namespace catft;

namespace {

std::string run(const std::string& cmd, const Json& cfg, RunOptions o = {}) {
  std::ostringstream out;
  run_subcommand(cmd, cfg, o, out);
  return out.str();
}

std::string config_error(const std::string& cmd, const Json& cfg) {
  try {
    run(cmd, cfg);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int shell(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string temp_path(const std::string& name) { return "catft_test_" + name; }

void write_file(const std::string& path, const std::string& s) { std::ofstream(path) << s; }

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

Json tiny_search() {
  return Json{{"optimize_alpha", false}, {"optimize_phi0", false}};
}
Json tiny_budget() { return Json{{"evaluations", 1}, {"shots_per_eval", 60}, {"final_shots", 120}, {"grid_points", 1}}; }

}  // namespace

TEST_CASE("unknown fields are rejected with their path") {
  CHECK(config_error("exrec", Json{{"alpha", 3}}) == "config.alpha: unknown field");
  CHECK(config_error("exrec", Json{{"truncation", {{"min_dimm", 3}}}}) == "config.truncation.min_dimm: unknown field");
  CHECK(config_error("sweep", Json{{"search", {{"alpha_inn", {1, 2}}}}}) == "config.search.alpha_inn: unknown field");
  CHECK(config_error("ft-check", Json{{"pattern", {{{"location", 3}, {"kk", 1}}}}}) ==
        "config.pattern[0].kk: unknown field");
}

TEST_CASE("type and range errors carry the field path") {
  CHECK(config_error("exrec", Json{{"shots", 1.5}}) == "config.shots: expected an integer");
  CHECK(config_error("exrec", Json{{"scheme", 3}}) == "config.scheme: expected a string");
  CHECK(config_error("sweep", Json{{"search", {{"wait_mult", {5, 2}}}}}) == "config.search.wait_mult: needs lo <= hi");
  CHECK(config_error("meas-error", Json{{"alphas", {1, "x"}}}) == "config.alphas[1]: expected a number");
  CHECK(!config_error("exrec", Json{{"scheme", "surface"}}).empty());
  CHECK(!config_error("exrec", Json{{"shots", 0}}).empty());
  CHECK(!config_error("exrec", Json::array()).empty());
  CHECK_THROWS_AS(run("teleport", Json::object()), ConfigError);
}

TEST_CASE("echoed config materializes every default and round-trips") {
  const Json echo = to_json(parse_exrec_config(Json::object()));
  for (const char* k : {"scheme", "N", "M", "alpha_in", "alpha_anc", "phi0_in", "phi0_anc", "squeeze_r", "gamma_loss_op",
                        "gamma_ph_op", "wait_mult", "shots", "seed", "truncation", "bootstrap_resamples"})
    CHECK(echo.contains(k));
  CHECK(to_json(parse_exrec_config(echo)) == echo);
  const Json sweep = to_json(parse_sweep_config(Json::object()));
  CHECK(sweep["search"]["phi0_in"][0].get<double>() == doctest::Approx(-kPi / 4));
  CHECK(to_json(parse_sweep_config(sweep)) == sweep);
  const Json ft = to_json(parse_ft_config(Json{{"pattern", {{{"location", 3}, {"k", 1}}}}}));
  CHECK(to_json(parse_ft_config(ft)) == ft);
  for (const Json& j : {to_json(parse_breakeven_config(Json::object())), to_json(parse_kl_config(Json::object())),
                        to_json(parse_meas_error_config(Json::object())), to_json(parse_codeword_config(Json::object()))})
    CHECK(j.contains("seed"));
}

TEST_CASE("seed flag overrides the config") {
  RunOptions o;
  o.seed = 99;
  const Json out = Json::parse(run("exrec", Json{{"seed", 3}, {"shots", 20}, {"alpha_in", 2}, {"alpha_anc", 2}}, o));
  CHECK(out["seed"] == 99);
  CHECK(out["config"]["seed"] == 99);
}

TEST_CASE("exrec with zero noise reports an undefined ratio") {
  const Json out = Json::parse(run("exrec", Json{{"shots", 400}, {"alpha_in", 3}, {"alpha_anc", 3}}));
  CHECK(out["command"] == "exrec");
  CHECK(out["result"]["R"].is_null());
  CHECK(out["result"]["F_ent"].get<double>() > 0.999);
}

TEST_CASE("codeword, kl-check, meas-error and ft-check outputs") {
  const Json cw = Json::parse(run("codeword", Json{{"N", 2}, {"alpha", 2.0}}));
  CHECK(cw["result"]["ket0"].size() == cw["result"]["dim"].get<std::size_t>());
  const Json kl = Json::parse(run("kl-check", Json{{"N", 2}, {"alphas", {1.5, 2.0}}}));
  CHECK(kl["result"]["fitted_decay_rate"].get<double>() < 0);
  const auto me = data_lines(run("meas-error", Json{{"N_list", {2}}, {"alphas", {2.0, 3.0}}}));
  REQUIRE(me.size() == 3);
  CHECK(me[0] == "N,alpha,r,p_err");
  CHECK(me[2].rfind("2,3,0,", 0) == 0);
  const Json ft = Json::parse(run("ft-check", Json{{"scheme", "hybrid"}, {"N", 3}, {"input", {{"k", 1}}}}));
  CHECK(ft["result"]["verdict"]["satisfied"] == true);
  CHECK(ft["result"]["verdict"]["k_hat"] == 1);
}

TEST_CASE("CSV schema and number format") {
  CHECK(csv_header() ==
        "scheme,N,M,gamma_loss,gamma_ph,wait_mult,alpha_in,alpha_anc,phi0_in,phi0_anc,squeeze_r,R,R_stderr,inF,inF_bm,"
        "shots,seed");
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0 / 3.0) == "0.333333333");
  CHECK(format_real(1.23456789012e-7) == "1.23456789e-07");
  CHECK(format_real(std::nan("")) == "nan");
  ExRecConfig p;
  p.seed = 4;
  const std::string row = format_csv_row(csv_row(p, 1e-3, 5e-4, 0.5, 0.01, 1e-4, 2e-4, 100));
  CHECK(row == "hybrid,2,1,0.001,0.0005,1,3,3,0,0,0,0.5,0.01,0.0001,0.0002,100,4");
}

TEST_CASE("sweep output is byte-identical across reruns and thread counts") {
  const Json cfg{{"alpha_in", 2.0},          {"alpha_anc", 2.0},           {"gamma_loss_list", {1e-3, 2e-3}},
                 {"gamma_ph_list", {1e-3}},  {"search", tiny_search()},    {"budget", tiny_budget()}};
  RunOptions a, b;
  a.threads = 1;
  b.threads = 2;
  std::ostringstream ha;
  a.history = &ha;
  const std::string x = run("sweep", cfg, a), y = run("sweep", cfg, b);
  CHECK(x == y);
  const auto rows = data_lines(x);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == csv_header());
  CHECK(x.find("# config: ") != std::string::npos);
  CHECK(x.find("# seed: 1") != std::string::npos);
}

TEST_CASE("breakeven writes one row per dephasing strength") {
  const Json cfg{{"alpha_in", 2.0},       {"alpha_anc", 2.0},     {"gamma_ph_list", {1e-3, 2e-3, 4e-3}},
                 {"bracket", {1e-3, 2e-3}}, {"search", tiny_search()}, {"budget", tiny_budget()}};
  const auto rows = data_lines(run("breakeven", cfg));
  CHECK(rows.size() == 4);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(DomainError("x")) == 2);
  CHECK(exit_code_for(DegenerateError("x")) == 3);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("command-line binary") {
  const std::string bin = CATFT_CLI_PATH;
  const std::string bad = temp_path("bad.json"), deg = temp_path("deg.json"), ok = temp_path("ok.json");
  const std::string out = temp_path("out.json");
  write_file(bad, R"({"N": 2, "bogus": 1})");
  write_file(deg, R"({"N": 2, "alpha": 0.0, "dim": 12})");
  write_file(ok, R"({"N": 2, "alpha": 1.5})");
  CHECK(shell(bin + " codeword --config " + bad + " 2>/dev/null") == 2);
  CHECK(shell(bin + " codeword --config " + deg + " 2>/dev/null") == 3);
  CHECK(shell(bin + " codeword --config missing.json 2>/dev/null") == 2);
  CHECK(shell(bin + " frobnicate 2>/dev/null >/dev/null") == 2);
  CHECK(shell(bin + " codeword --config " + ok + " --seed 12 --out " + out) == 0);
  std::ifstream in(out);
  const Json j = Json::parse(in);
  CHECK(j["seed"] == 12);
  for (const auto& p : {bad, deg, ok, out}) std::remove(p.c_str());
}
