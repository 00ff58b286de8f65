#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "catft/codes.hpp"
#include "catft/ft_symbolic.hpp"
#include "catft/sweep.hpp"

namespace catft {

using Json = nlohmann::ordered_json;

// Strict object reader: every field is optional with a default, unknown
// fields are rejected by finish(), errors carry the field path.
class JsonReader {
 public:
  JsonReader(const Json& j, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key, double def);
  int integer(const std::string& key, int def);
  long long integer64(const std::string& key, long long def);
  std::uint64_t u64(const std::string& key, std::uint64_t def);
  bool boolean(const std::string& key, bool def);
  std::string string(const std::string& key, const std::string& def);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def);
  std::vector<int> integers(const std::string& key, const std::vector<int>& def);
  Range range(const std::string& key, Range def);
  JsonReader object(const std::string& key);  // missing key -> empty object
  const Json& array(const std::string& key);   // raw array, must exist
  std::string path(const std::string& key) const { return path_ + "." + key; }
  void finish() const;

 private:
  const Json* get(const std::string& key);
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
  static const Json kEmpty;
};

TruncationPolicy parse_truncation(JsonReader r);
Json to_json(const TruncationPolicy& p);

struct CodewordConfig {
  CodeSpec spec;
  TruncationPolicy truncation;
  std::uint64_t seed = 1;
};

struct KLCheckConfig {
  CodeSpec base;
  std::vector<double> alphas{1.5, 2.0, 2.5, 3.0};
  int theta_points = 8;
  std::vector<int> k_values;  // empty: all k < N
  TruncationPolicy truncation;
  std::uint64_t seed = 1;
};

struct MeasErrorConfig {
  std::vector<int> N_list{2, 3};
  std::vector<double> alphas{1.5, 2.0, 2.5, 3.0};
  std::vector<double> r_list{0.0};
  double phi0 = 0.0;
  double squeeze_varphi = kPi / 2;
  TruncationPolicy truncation;
  std::uint64_t seed = 1;
};

struct FtCheckConfig {
  Scheme scheme = Scheme::Hybrid;
  int N = 2;
  int M = 0;
  SymbolicFault input;
  FaultPattern pattern;
  bool exhaustive = false;
  std::vector<int> k_values{0, 1};
  std::vector<double> theta_values{0.0, -kPi / 8};
  bool audit = false;
  std::vector<int> audit_M_values{1, 2, 3};
  int audit_max_weight = 6;
  std::uint64_t seed = 1;

  int resolved_M() const { return M > 0 ? M : (scheme == Scheme::Knill ? N : 1); }
};

struct ExRecRunConfig {
  ExRecConfig exrec;
  int bootstrap_resamples = 200;
};

struct SweepConfig {
  ExRecConfig base;
  std::vector<double> gamma_loss_list{1e-3};
  std::vector<double> gamma_ph_list{1e-3};
  SearchSpace search;
  OptimBudget budget;
};

struct BreakevenConfig {
  ExRecConfig base;
  std::vector<double> gamma_ph_list{1e-3};
  Range bracket{1e-5, 1e-2};
  SearchSpace search;
  OptimBudget budget;
};

// Flat exRec fields (scheme, N, M, alpha_in, ..., truncation) read from r.
ExRecConfig parse_exrec_fields(JsonReader& r);
Json exrec_fields_json(const ExRecConfig& c);

CodewordConfig parse_codeword_config(const Json& j);
KLCheckConfig parse_kl_config(const Json& j);
MeasErrorConfig parse_meas_error_config(const Json& j);
FtCheckConfig parse_ft_config(const Json& j);
ExRecRunConfig parse_exrec_config(const Json& j);
SweepConfig parse_sweep_config(const Json& j);
BreakevenConfig parse_breakeven_config(const Json& j);

Json to_json(const CodewordConfig& c);
Json to_json(const KLCheckConfig& c);
Json to_json(const MeasErrorConfig& c);
Json to_json(const FtCheckConfig& c);
Json to_json(const ExRecRunConfig& c);
Json to_json(const SweepConfig& c);
Json to_json(const BreakevenConfig& c);

}  // namespace catft
