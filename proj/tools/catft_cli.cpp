#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "catft/commands.hpp"

namespace {

catft::Json load_config(const std::string& path) {
  if (path.empty()) return catft::Json::object();
  std::ifstream in(path);
  if (!in) throw catft::ConfigError("cannot read config file '" + path + "'");
  try {
    return catft::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw catft::ConfigError(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cat-code error-correction gadget simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int threads = 0;
  std::optional<std::uint64_t> seed;

  for (const std::string& name : catft::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file (defaults if omitted)");
    sub->add_option("--out", out_path, "output file (stdout if omitted)");
    sub->add_option("--threads", threads, "worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "overrides the config seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const catft::Json cfg = load_config(config_path);
    catft::RunOptions opts;
    opts.threads = threads;
    opts.seed = seed;
    opts.progress = &std::cerr;

    // buffer so a failed run leaves no partial output file
    std::ostringstream body, history;
    if (!out_path.empty() && name == "sweep") opts.history = &history;
    catft::run_subcommand(name, cfg, opts, body);

    if (out_path.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream f(out_path);
      if (!f) throw catft::ConfigError("cannot write '" + out_path + "'");
      f << body.str();
      if (opts.history) {
        std::ofstream h(out_path + ".history.csv");
        h << history.str();
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "catft " << name << ": " << e.what() << std::endl;
    return catft::exit_code_for(e);
  }
}
