#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "catft/gadgets.hpp"

namespace catft {

struct ExRecConfig {
  GadgetSpec gadget;
  NoiseStrength op_noise;
  double wait_mult = 1.0;
  long shots = 1000;
  std::uint64_t seed = 1;
  bool include_input_noise = false;  // location 0 of the leading gadget
  int batches = 100;
  TruncationPolicy truncation;

  void validate() const;
};

// Running sum of |psi><psi| on (reference 2) x (output dim), kept per
// contiguous shot batch so that the reduction order never depends on threads.
struct ChoiAccumulator {
  int dim_out = 0;
  Matrix sum_density;
  long count = 0;
  std::vector<Matrix> batch_sums;
  std::vector<long> batch_counts;

  Matrix average() const;
};

// One trajectory of leading EC -> wait -> trailing EC; returns the
// frame-resolved (reference, output) state.
Vector exrec_shot(const GadgetContext& ctx, const ExRecConfig& cfg, std::uint64_t shot);

// OpenMP over batches; threads <= 0 uses the runtime default.
ChoiAccumulator run_exrec(const ExRecConfig& cfg, int threads = 0);
ChoiAccumulator run_exrec(const GadgetContext& ctx, const ExRecConfig& cfg, int threads = 0);
// Single-threaded shot-by-shot reference.
ChoiAccumulator run_exrec_serial(const ExRecConfig& cfg);

// Transpose-channel decoder built from a channel's Choi state (logical qubit -> mode).
class PetzDecoder {
 public:
  explicit PetzDecoder(const Matrix& choi, double cutoff = 1e-12);

  // F_ent of (this recovery) o (channel with the given Choi); linear in choi
  double entanglement_fidelity(const Matrix& choi) const;
  // (1 x R o E)(|Phi><Phi|) on qubit x qubit
  Eigen::Matrix4cd logical_choi(const Matrix& choi) const;
  int kraus_rank() const { return static_cast<int>(lam_.size()); }

 private:
  int dim_ = 0;
  Matrix s_;    // pseudo-inverse square root of E(1)
  Matrix w_;    // columns sqrt(lambda_j) (1 x S) v_j
  Vector lam_;
  Matrix vecs_;
};

struct PetzResult {
  Eigen::Matrix4cd logical_choi;
  double f_ent = 0.0;
};
PetzResult petz_decode(const Matrix& choi_avg, double cutoff = 1e-12);

double benchmark_entanglement_fidelity(double gamma_loss, double gamma_ph);
double benchmark_infidelity(double gamma_loss, double gamma_ph);

struct FidelityReport {
  double f_ent = 0.0;
  double inf = 0.0;
  double inf_bm = 0.0;
  std::optional<double> ratio;  // empty when inF and inF_bm both vanish
  double standard_error = 0.0;  // of inF
  double ratio_stderr = 0.0;
  long shots = 0;
};

FidelityReport fidelity_report(const ChoiAccumulator& acc, double inf_bm, int resamples = 200,
                               std::uint64_t seed = 1);

inline double infidelity_from_fent(double f_ent) { return 2.0 / 3.0 * (1.0 - f_ent); }

}  // namespace catft
