#pragma once

#include <span>
#include <string>
#include <vector>

#include "catft/codes.hpp"
#include "catft/noise.hpp"
#include "catft/phase_network.hpp"

namespace catft {

enum class Scheme { Knill, Hybrid };
enum class ModeRole { I, A, O };
enum class LocationKind { Input, Prep, GateSide, Wait, Meas };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct Location {
  int id;
  ModeRole mode;
  LocationKind kind;
};
using LocationTable = std::vector<Location>;

// Knill: 0 input I; 1 prep A; 2 prep O; 3,4 CZ(A,O) on A,O; 5,6 CZ(I,A) on I,A;
// 7 wait O; 8 meas I; 9 meas A; 10 wait O.
// Hybrid: 0 input I; 1 prep A; 2 prep O; 3,4 CROT(A,I) on A,I; 5 meas A;
// 6,7 CZ(I,O) on I,O; 8 meas I; 9 wait O.
LocationTable location_table(Scheme s);

struct CodeRole {
  double alpha = 3.0;
  double squeeze_r = 0.0;
  double squeeze_varphi = kPi / 2;
};

struct GadgetSpec {
  Scheme scheme = Scheme::Hybrid;
  int N = 2;
  int M = 0;  // 0: N for Knill, 1 for hybrid
  CodeRole input, ancilla;
  double phi0_in = 0.0, phi0_anc = 0.0;
  int dim_in = 0, dim_anc = 0;  // 0: chosen by ensure_dim

  int ancilla_order() const;
  void validate() const;
};

struct GadgetNoise {
  NoiseStrength input, prep, gate, wait, meas;

  static GadgetNoise uniform(const NoiseStrength& op, bool include_input = false);
  const NoiseStrength& at(LocationKind k) const;
};

struct InjectedFault {
  int location_id = 0;
  int loss_count = 0;
  double angle = 0.0;
};

using Frame = Eigen::Matrix2cd;
Frame pauli_x();
Frame pauli_z();
Frame hadamard();

inline constexpr int kModeRef = 0, kModeIn = 1, kModeAnc = 2, kModeOut = 3;
int mode_label(ModeRole r);

// Immutable per-spec data shared by all trajectories.
class GadgetContext {
 public:
  explicit GadgetContext(const GadgetSpec& spec, const TruncationPolicy& policy = {});

  const GadgetSpec& spec() const { return spec_; }
  int M() const { return spec_.ancilla_order(); }
  const Codewords& data_code() const { return data_; }
  const Codewords& ancilla_code() const { return anc_; }
  const LocationTable& locations() const { return table_; }
  int grid_size() const { return grid_; }
  double gate_angle_a() const;  // first entangling gate
  double gate_angle_b() const;  // second entangling gate

 private:
  GadgetSpec spec_;
  Codewords data_, anc_;
  LocationTable table_;
  int grid_;
};

struct GadgetOutcomes {
  double phi_in = 0.0, phi_anc = 0.0;
  int bin_in = 0, bin_anc = 0;
  int x1 = 0, x2 = 0;  // Knill: x1 from I, x2 from A; hybrid: x2 from I
  int k_hat = 0;       // hybrid loss estimate
};

struct GadgetTrace {
  GadgetOutcomes outcomes;
  Frame frame = Frame::Identity();
  std::vector<FaultRecord> faults;
};

// Loss sampling then dephasing sampling on one network mode.
FaultRecord apply_network_noise(PhaseNetwork& net, int mode, const NoiseStrength& s, Rng& rng, int location_id = -1);

// The network carries the input on kModeIn (and whatever else, e.g. the
// reference).  On return I and A are measured away and the output is on kModeOut.
// frame is the logical correction C to apply to the output.
GadgetTrace run_gadget_network(const GadgetContext& ctx, PhaseNetwork& net, const GadgetNoise& noise, Rng& rng,
                               std::span<const InjectedFault> faults = {}, bool record_faults = false);

// All gates and faults with the measurements deferred to the end (they act on
// modes nothing later touches); dense state over (R, I, A, O).
FockVector pre_measurement_state(const GadgetContext& ctx, const FockVector& ref_input,
                                 std::span<const InjectedFault> faults = {});

struct GadgetRunResult {
  FockVector output_state;  // (reference, output)
  GadgetOutcomes outcomes;
  Frame pauli_frame;
  std::vector<FaultRecord> fault_log;
};

// ref_input has shape {2, dim_in}
GadgetRunResult run_gadget(const GadgetContext& ctx, const FockVector& ref_input, const GadgetNoise& noise, Rng& rng,
                           std::span<const InjectedFault> faults = {});

int decode_xbar_outcome(int bin, int N);
struct HybridDecode {
  int k_hat = 0;
  double angle = 0.0;
};
int hybrid_dp_bins(int N, int M);
HybridDecode hybrid_dp_decode(int bin, int N, int M);

// (|0>|0bar> + |1>|1bar>)/sqrt2 with shape {2, dim}
FockVector choi_input(const Codewords& cw);
// Applies B = C^T to the reference of a (2, D) state: undoes the frame C on the output.
void apply_frame_to_reference(FockVector& ref_out, const Frame& c);

}  // namespace catft
