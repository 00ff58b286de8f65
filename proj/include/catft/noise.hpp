#pragma once

#include <vector>

#include "catft/fock.hpp"
#include "catft/rng.hpp"

namespace catft {

struct NoiseStrength {
  double gamma_loss = 0.0;
  double gamma_ph = 0.0;

  void validate() const;
  bool is_zero() const { return gamma_loss == 0.0 && gamma_ph == 0.0; }
  NoiseStrength scaled(double f) const { return {gamma_loss * f, gamma_ph * f}; }
};

struct FaultRecord {
  int location_id = -1;
  int loss_count = 0;
  double dephasing_angle = 0.0;
};

inline constexpr double kLossCutoffTol = 1e-12;

// (n, n+k) entries of A_k: sqrt(C(n+k, k) p^k (1-p)^n), p = 1 - e^{-gamma}
Vector loss_coefficients(double gamma, int k, int dim);
FockOperator loss_kraus(double gamma, int k, int dim);
// Smallest K such that sum_{k<=K} A_k^dag A_k is identity to tol on every n < dim.
int loss_kraus_cutoff(double gamma, int dim, double tol = kLossCutoffTol);

// w_k = sum_n P(n) Binom(k; n, p), enumerated until the cumulative weight exceeds
// total - tol.  populations need not be normalized.
std::vector<double> loss_weights(const std::vector<double>& populations, double gamma,
                                 double cutoff_tol = kLossCutoffTol);
int sample_from_weights(const std::vector<double>& w, Rng& rng);

// Exact channels on a (multimode) density matrix; mode defaults to a single-mode rho.
Matrix loss_channel(const Matrix& rho, const std::vector<int>& shape, int mode, double gamma,
                    double cutoff_tol = kLossCutoffTol);
Matrix loss_channel(const Matrix& rho, double gamma, double cutoff_tol = kLossCutoffTol);
Matrix dephasing_damp(const Matrix& rho, const std::vector<int>& shape, int mode, double gamma);
Matrix dephasing_damp(const Matrix& rho, double gamma);
// dephasing after loss
Matrix location_channel(const Matrix& rho, const std::vector<int>& shape, int mode, const NoiseStrength& s);

struct LossSample {
  int k = 0;
  FockVector state;
  FaultRecord record;
};
struct DephasingSample {
  double theta = 0.0;
  FockVector state;
  FaultRecord record;
};
struct NoisySample {
  FockVector state;
  FaultRecord record;
};

LossSample sample_loss(const FockVector& state, int mode, double gamma, Rng& rng,
                       double cutoff_tol = kLossCutoffTol, int location_id = -1);
double sample_dephasing_angle(double gamma, Rng& rng);
DephasingSample sample_dephasing(const FockVector& state, int mode, double gamma, Rng& rng, int location_id = -1);
NoisySample apply_location_noise(const FockVector& state, int mode, const NoiseStrength& s, Rng& rng,
                                 int location_id = -1);

}  // namespace catft
