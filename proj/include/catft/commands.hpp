#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "catft/config.hpp"

namespace catft {

struct RunOptions {
  int threads = 0;                     // <= 0: runtime default
  std::optional<std::uint64_t> seed;  // overrides config.seed
  std::ostream* progress = nullptr;    // e.g. &std::cerr
  std::ostream* history = nullptr;     // sweep: every optimizer evaluation, CSV
};

const std::vector<std::string>& subcommand_names();

// Runs one subcommand on a raw JSON config, writing the result to out.
void run_subcommand(const std::string& name, const Json& config, const RunOptions& opts, std::ostream& out);

// 2 config error, 3 numerical degeneracy, 1 anything else.
int exit_code_for(const std::exception& e);

// Result table shared by sweep and breakeven.
const std::string& csv_header();
std::string format_real(double x);  // %.9g
struct CsvRow {
  Scheme scheme = Scheme::Hybrid;
  int N = 0, M = 0;
  double gamma_loss = 0, gamma_ph = 0, wait_mult = 0;
  double alpha_in = 0, alpha_anc = 0, phi0_in = 0, phi0_anc = 0, squeeze_r = 0;
  double R = 0, R_stderr = 0, inF = 0, inF_bm = 0;
  long shots = 0;
  std::uint64_t seed = 0;
};
CsvRow csv_row(const ExRecConfig& params, double gamma_loss, double gamma_ph, double R, double R_stderr, double inF,
               double inF_bm, long shots);
std::string format_csv_row(const CsvRow& r);

}  // namespace catft
