#include "catft/gadgets.hpp"

#include <algorithm>
#include <cmath>

#include "catft/phase_meas.hpp"

namespace catft {

std::string to_string(Scheme s) { return s == Scheme::Knill ? "knill" : "hybrid"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "knill") return Scheme::Knill;
  if (s == "hybrid") return Scheme::Hybrid;
  throw ConfigError("unknown scheme '" + s + "' (expected knill or hybrid)");
}

LocationTable location_table(Scheme s) {
  using K = LocationKind;
  using R = ModeRole;
  if (s == Scheme::Knill)
    return {{0, R::I, K::Input},    {1, R::A, K::Prep},     {2, R::O, K::Prep},     {3, R::A, K::GateSide},
            {4, R::O, K::GateSide}, {5, R::I, K::GateSide}, {6, R::A, K::GateSide}, {7, R::O, K::Wait},
            {8, R::I, K::Meas},     {9, R::A, K::Meas},     {10, R::O, K::Wait}};
  return {{0, R::I, K::Input},    {1, R::A, K::Prep},     {2, R::O, K::Prep}, {3, R::A, K::GateSide},
          {4, R::I, K::GateSide}, {5, R::A, K::Meas},     {6, R::I, K::GateSide},
          {7, R::O, K::GateSide}, {8, R::I, K::Meas},     {9, R::O, K::Wait}};
}

int GadgetSpec::ancilla_order() const {
  if (M > 0) return M;
  return scheme == Scheme::Knill ? N : 1;
}

void GadgetSpec::validate() const {
  if (N < 1) throw DomainError("N must be >= 1");
  if (M < 0) throw DomainError("M must be >= 0");
  if (!std::isfinite(phi0_in) || !std::isfinite(phi0_anc)) throw DomainError("offsets must be finite");
  if (dim_in < 0 || dim_anc < 0) throw DomainError("dims must be >= 0");
}

GadgetNoise GadgetNoise::uniform(const NoiseStrength& op, bool include_input) {
  GadgetNoise g;
  g.input = include_input ? op : NoiseStrength{};
  g.prep = g.gate = g.wait = g.meas = op;
  return g;
}

const NoiseStrength& GadgetNoise::at(LocationKind k) const {
  switch (k) {
    case LocationKind::Input:
      return input;
    case LocationKind::Prep:
      return prep;
    case LocationKind::GateSide:
      return gate;
    case LocationKind::Wait:
      return wait;
    case LocationKind::Meas:
      return meas;
  }
  return input;
}

Frame pauli_x() {
  Frame f;
  f << 0, 1, 1, 0;
  return f;
}

Frame pauli_z() {
  Frame f;
  f << 1, 0, 0, -1;
  return f;
}

Frame hadamard() {
  Frame f;
  f << 1, 1, 1, -1;
  return f / std::sqrt(2.0);
}

int mode_label(ModeRole r) {
  switch (r) {
    case ModeRole::I:
      return kModeIn;
    case ModeRole::A:
      return kModeAnc;
    case ModeRole::O:
      return kModeOut;
  }
  return kModeIn;
}

namespace {

CodeSpec role_spec(int order, const CodeRole& r, int dim) {
  CodeSpec s;
  s.N = order;
  s.alpha = r.alpha;
  s.squeeze_r = r.squeeze_r;
  s.squeeze_varphi = r.squeeze_varphi;
  s.dim = dim;
  return s;
}

}  // namespace

GadgetContext::GadgetContext(const GadgetSpec& spec, const TruncationPolicy& policy) : spec_(spec) {
  spec_.validate();
  spec_.M = spec_.ancilla_order();
  data_ = make_codewords(role_spec(spec_.N, spec_.input, spec_.dim_in), policy);
  anc_ = make_codewords(role_spec(spec_.M, spec_.ancilla, spec_.dim_anc), policy);
  spec_.dim_in = data_.dim;
  spec_.dim_anc = anc_.dim;
  table_ = location_table(spec_.scheme);
  grid_ = std::max(kDefaultPhaseGrid, 4 * std::max(data_.dim, anc_.dim));
}

double GadgetContext::gate_angle_a() const {
  const double nm = static_cast<double>(spec_.N) * M();
  return spec_.scheme == Scheme::Knill ? kPi / nm : 2.0 * kPi / nm;
}

double GadgetContext::gate_angle_b() const {
  const double n = spec_.N;
  return spec_.scheme == Scheme::Knill ? kPi / (n * M()) : kPi / (n * n);
}

int decode_xbar_outcome(int bin, int N) {
  if (bin < 0 || bin >= 2 * N) throw DomainError("X-bar bin out of range");
  return bin % 2;
}

int hybrid_dp_bins(int N, int M) { return N * M; }

HybridDecode hybrid_dp_decode(int bin, int N, int M) {
  if (N * M < 1 || bin < 0 || bin >= hybrid_dp_bins(N, M)) throw DomainError("DP bin out of range");
  // k input losses rotate the ancilla by -2 pi k / (N M), i.e. into bin -k
  HybridDecode d;
  d.k_hat = ((-bin) % N + N) % N;
  d.angle = d.k_hat * kPi / (static_cast<double>(N) * N);
  return d;
}

FockVector choi_input(const Codewords& cw) {
  Vector v(2 * cw.dim);
  v.head(cw.dim) = cw.ket0.amplitudes() / std::sqrt(2.0);
  v.tail(cw.dim) = cw.ket1.amplitudes() / std::sqrt(2.0);
  return FockVector({2, cw.dim}, std::move(v));
}

void apply_frame_to_reference(FockVector& s, const Frame& c) {
  if (s.shape().size() != 2 || s.shape()[0] != 2) throw InvalidDimension("frame needs a (2, D) state");
  const long d = s.shape()[1];
  Vector& v = s.amplitudes();
  const Vector r0 = v.head(d), r1 = v.tail(d);
  // B = C^T, B_{r' r} = C_{r r'}
  v.head(d) = c(0, 0) * r0 + c(1, 0) * r1;
  v.tail(d) = c(0, 1) * r0 + c(1, 1) * r1;
}

FaultRecord apply_network_noise(PhaseNetwork& net, int mode, const NoiseStrength& st, Rng& rng, int location_id) {
  FaultRecord rec{location_id, 0, 0.0};
  if (st.gamma_loss > 0.0) {
    const int d = net.dim(mode);
    const std::vector<double> w = loss_weights(net.populations(mode), st.gamma_loss);
    rec.loss_count = sample_from_weights(w, rng);
    net.apply_lowering(mode, rec.loss_count, loss_coefficients(st.gamma_loss, rec.loss_count, d));
  }
  if (st.gamma_ph > 0.0) {
    rec.dephasing_angle = sample_dephasing_angle(st.gamma_ph, rng);
    net.rotate(mode, rec.dephasing_angle);
  }
  return rec;
}

namespace {

Vector pure_lowering(int k, int dim) {
  Vector c(std::max(dim - k, 0));
  for (int n = 0; n + k < dim; ++n) {
    double x = 1.0;
    for (int j = 1; j <= k; ++j) x *= std::sqrt(static_cast<double>(n + j));
    c[n] = x;
  }
  return c;
}

class Runner {
 public:
  Runner(const GadgetContext& ctx, PhaseNetwork& net, const GadgetNoise& noise, Rng& rng,
         std::span<const InjectedFault> faults, bool record)
      : ctx_(ctx), net_(net), noise_(noise), rng_(rng), faults_(faults), record_(record) {}

  GadgetTrace run(bool defer) {
    const GadgetSpec& s = ctx_.spec();
    loc(0);
    net_.add_factor({kModeAnc}, ctx_.ancilla_code().plus);
    loc(1);
    net_.add_factor({kModeOut}, ctx_.data_code().plus);
    loc(2);
    if (s.scheme == Scheme::Knill) {
      net_.add_edge(kModeAnc, kModeOut, ctx_.gate_angle_a());
      loc(3);
      loc(4);
      net_.add_edge(kModeIn, kModeAnc, ctx_.gate_angle_b());
      loc(5);
      loc(6);
      loc(7);
      loc(8);
      loc(9);
      if (!defer) {
        const auto mi = net_.measure_phase(kModeIn, rng_, ctx_.grid_size());
        trace_.outcomes.phi_in = mi.phi;
        trace_.outcomes.bin_in = bin_phase(mi.phi, 2 * s.N, s.phi0_in);
        trace_.outcomes.x1 = decode_xbar_outcome(trace_.outcomes.bin_in, s.N);
        const auto ma = net_.measure_phase(kModeAnc, rng_, ctx_.grid_size());
        trace_.outcomes.phi_anc = ma.phi;
        trace_.outcomes.bin_anc = bin_phase(ma.phi, 2 * ctx_.M(), s.phi0_anc);
        trace_.outcomes.x2 = decode_xbar_outcome(trace_.outcomes.bin_anc, ctx_.M());
      }
      loc(10);
      const Frame z = trace_.outcomes.x1 ? pauli_z() : Frame::Identity();
      const Frame x = trace_.outcomes.x2 ? pauli_x() : Frame::Identity();
      trace_.frame = z * x;
    } else {
      net_.add_edge(kModeAnc, kModeIn, ctx_.gate_angle_a());
      loc(3);
      loc(4);
      loc(5);
      HybridDecode dec;
      if (!defer) {
        const int bins = hybrid_dp_bins(s.N, ctx_.M());
        const auto ma = net_.measure_phase(kModeAnc, rng_, ctx_.grid_size());
        trace_.outcomes.phi_anc = ma.phi;
        trace_.outcomes.bin_anc = bin_phase(ma.phi, bins, s.phi0_anc);
        dec = hybrid_dp_decode(trace_.outcomes.bin_anc, s.N, ctx_.M());
        trace_.outcomes.k_hat = dec.k_hat;
      }
      net_.add_edge(kModeIn, kModeOut, ctx_.gate_angle_b());
      loc(6);
      loc(7);
      loc(8);
      if (!defer) {
        const auto mi = net_.measure_phase(kModeIn, rng_, ctx_.grid_size());
        trace_.outcomes.phi_in = mi.phi;
        trace_.outcomes.bin_in = bin_phase(mi.phi, 2 * s.N, s.phi0_in);
        trace_.outcomes.x2 = decode_xbar_outcome(trace_.outcomes.bin_in, s.N);
      }
      loc(9);
      if (!defer) net_.rotate(kModeOut, dec.angle);
      const Frame x = trace_.outcomes.x2 ? pauli_x() : Frame::Identity();
      trace_.frame = hadamard() * x;
    }
    return std::move(trace_);
  }

 private:
  void loc(int id) {
    const Location& l = ctx_.locations()[id];
    const int mode = mode_label(l.mode);
    const NoiseStrength& st = noise_.at(l.kind);
    FaultRecord rec = apply_network_noise(net_, mode, st, rng_, id);
    for (const auto& f : faults_) {
      if (f.location_id != id) continue;
      if (f.loss_count > 0) {
        net_.apply_lowering(mode, f.loss_count, pure_lowering(f.loss_count, net_.dim(mode)));
        rec.loss_count += f.loss_count;
      }
      if (f.angle != 0.0) {
        net_.rotate(mode, f.angle);
        rec.dephasing_angle += f.angle;
      }
    }
    if (record_) trace_.faults.push_back(rec);
  }

  const GadgetContext& ctx_;
  PhaseNetwork& net_;
  const GadgetNoise& noise_;
  Rng& rng_;
  std::span<const InjectedFault> faults_;
  bool record_;
  GadgetTrace trace_;
};

void check_faults(const GadgetContext& ctx, std::span<const InjectedFault> faults) {
  for (const auto& f : faults)
    if (f.location_id < 0 || f.location_id >= static_cast<int>(ctx.locations().size()) || f.loss_count < 0)
      throw DomainError("injected fault outside the location table");
}

}  // namespace

GadgetTrace run_gadget_network(const GadgetContext& ctx, PhaseNetwork& net, const GadgetNoise& noise, Rng& rng,
                               std::span<const InjectedFault> faults, bool record_faults) {
  check_faults(ctx, faults);
  if (net.dim(kModeIn) != ctx.data_code().dim) throw InvalidDimension("input mode dimension differs from the code");
  return Runner(ctx, net, noise, rng, faults, record_faults).run(false);
}

FockVector pre_measurement_state(const GadgetContext& ctx, const FockVector& ref_input,
                                 std::span<const InjectedFault> faults) {
  check_faults(ctx, faults);
  PhaseNetwork net;
  net.add_factor({kModeRef, kModeIn}, ref_input);
  Rng rng(0);
  GadgetNoise none;
  Runner(ctx, net, none, rng, faults, false).run(true);
  return net.to_dense({kModeRef, kModeIn, kModeAnc, kModeOut});
}

GadgetRunResult run_gadget(const GadgetContext& ctx, const FockVector& ref_input, const GadgetNoise& noise, Rng& rng,
                           std::span<const InjectedFault> faults) {
  if (ref_input.num_modes() != 2 || ref_input.dim(0) != 2) throw InvalidDimension("input must have shape {2, D}");
  PhaseNetwork net;
  net.add_factor({kModeRef, kModeIn}, ref_input);
  GadgetTrace t = run_gadget_network(ctx, net, noise, rng, faults, true);
  GadgetRunResult r;
  r.output_state = net.to_dense({kModeRef, kModeOut});
  r.outcomes = t.outcomes;
  r.pauli_frame = t.frame;
  r.fault_log = std::move(t.faults);
  return r;
}

}  // namespace catft
