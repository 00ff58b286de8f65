#pragma once

#include <utility>
#include <vector>

#include "catft/fock.hpp"
#include "catft/rng.hpp"

namespace catft {

// Phase states: <n|phi> = e^{i n phi} / sqrt(2 pi)

struct DPMeasSpec {
  int K = 1;
  double phi0 = 0.0;
  int dim = 1;

  void validate() const;
};

// Bin k covers ((k - 1/2) w + phi0, (k + 1/2) w + phi0], w = 2 pi / K; result mod K.
int bin_phase(double phi, int K, double phi0);
FockOperator dp_povm_element(const DPMeasSpec& spec, int k);
// (Pi_plus, Pi_minus): even / odd bins of the 2N-bin measurement
std::pair<FockOperator, FockOperator> xbar_povm(int N, double phi0, int dim);

// q(phi) = (1/2pi) sum_{|m| < L} c_m e^{-i m phi} with c_{-m} = conj(c_m)
class PhaseDensity {
 public:
  explicit PhaseDensity(std::vector<cplx> coeffs);

  const std::vector<cplx>& coeffs() const { return c_; }
  double total() const { return c_[0].real(); }
  double density(double phi) const;
  // integral of q over [a, b]
  double mass(double a, double b) const;
  double bin_mass(int K, double phi0, int k) const;
  // inverse CDF on [-pi, pi) by bisection to 2 pi / grid_size
  double sample(Rng& rng, int grid_size) const;

 private:
  std::vector<cplx> c_;
};

// c_m = sum_rest sum_n psi(n+m, rest) conj(psi(n, rest))
PhaseDensity phase_density(const FockVector& state, int mode);
Vector phase_ket(double phi, int dim);

struct PhaseSampleResult {
  double phi = 0.0;
  int bin = 0;
  FockVector conditional_state;  // normalized, measured mode removed
  double density = 0.0;          // q(phi); sqrt(density) * conditional = contraction
  double branch_weight = 0.0;    // probability of the 2 pi / grid_size cell around phi
};

inline constexpr int kDefaultPhaseGrid = 8192;

// K bins with offset phi0 for the reported bin; the state needs >= 2 modes.
PhaseSampleResult sample_canonical_phase(const FockVector& state, int mode, Rng& rng,
                                         int grid_size = kDefaultPhaseGrid, int K = 1, double phi0 = 0.0);

// <psi|Pi_wrong|psi> for psi = R(k_shift pi / N)|+> of the (squeezed) cat code.
double xbar_error_prob(int N, double alpha, double r, int k_shift, double phi0,
                       const TruncationPolicy& policy = {}, double varphi = kPi / 2);

}  // namespace catft
