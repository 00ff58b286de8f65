#include "catft/noise.hpp"

#include <cmath>
#include <numeric>

namespace catft {

void NoiseStrength::validate() const {
  if (!(gamma_loss >= 0.0) || !(gamma_ph >= 0.0) || !std::isfinite(gamma_loss) || !std::isfinite(gamma_ph))
    throw DomainError("noise strengths must be finite and >= 0");
}

Vector loss_coefficients(double gamma, int k, int dim) {
  if (gamma < 0.0 || k < 0) throw DomainError("loss needs gamma >= 0 and k >= 0");
  if (k >= dim) return Vector();
  Vector c(dim - k);
  const double p = -std::expm1(-gamma);
  // c_0 = p^{k/2}; c_{n+1} = c_n sqrt((n+k+1)/(n+1)) e^{-gamma/2}
  double cn = k > 0 ? std::pow(p, 0.5 * k) : 1.0;
  const double damp = std::exp(-0.5 * gamma);
  for (int n = 0; n + k < dim; ++n) {
    c[n] = cn;
    cn *= std::sqrt((n + k + 1.0) / (n + 1.0)) * damp;
  }
  return c;
}

FockOperator loss_kraus(double gamma, int k, int dim) {
  if (k >= dim) return FockOperator(Matrix::Zero(dim, dim));
  if (k == 0) return FockOperator::diagonal(loss_coefficients(gamma, 0, dim));
  return FockOperator::shift_diagonal(loss_coefficients(gamma, k, dim), k, dim);
}

int loss_kraus_cutoff(double gamma, int dim, double tol) {
  std::vector<double> worst(dim, 0.0);
  worst[dim - 1] = 1.0;
  // the top level has the widest binomial, so it sets the cutoff
  return static_cast<int>(loss_weights(worst, gamma, tol).size()) - 1;
}

std::vector<double> loss_weights(const std::vector<double>& pop, double gamma, double tol) {
  const int dim = static_cast<int>(pop.size());
  const double total = std::accumulate(pop.begin(), pop.end(), 0.0);
  std::vector<double> w;
  const double p = -std::expm1(-gamma);
  if (p == 0.0 || dim == 0) {
    w.push_back(total);
    return w;
  }
  // binom[n] = C(n, k) p^k (1-p)^{n-k}, advanced in k by recurrence
  std::vector<double> binom(dim);
  for (int n = 0; n < dim; ++n) binom[n] = std::exp(-gamma * n);
  const double ratio = p / (1.0 - p);
  double cum = 0.0;
  for (int k = 0; k < dim; ++k) {
    double wk = 0.0;
    for (int n = k; n < dim; ++n) wk += pop[n] * binom[n];
    w.push_back(wk);
    cum += wk;
    if (cum >= total * (1.0 - tol)) break;
    for (int n = dim - 1; n >= 0; --n) binom[n] = n > k ? binom[n] * (n - k) / (k + 1.0) * ratio : 0.0;
  }
  return w;
}

int sample_from_weights(const std::vector<double>& w, Rng& rng) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double u = uniform01(rng) * total;
  double c = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    c += w[k];
    if (u < c) return static_cast<int>(k);
  }
  return static_cast<int>(w.size()) - 1;
}

namespace {

std::vector<double> diag_populations(const Matrix& rho, const std::vector<int>& shape, int mode) {
  long inner = 1;
  for (std::size_t m = mode + 1; m < shape.size(); ++m) inner *= shape[m];
  const int dm = shape[mode];
  std::vector<double> p(dm, 0.0);
  for (long i = 0; i < rho.rows(); ++i) p[(i / inner) % dm] += rho(i, i).real();
  return p;
}

}  // namespace

Matrix loss_channel(const Matrix& rho, const std::vector<int>& shape, int mode, double gamma, double tol) {
  if (gamma == 0.0) return rho;
  const int dim = shape.at(mode);
  const std::vector<double> w = loss_weights(diag_populations(rho, shape, mode), gamma, tol);
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (std::size_t k = 0; k < w.size(); ++k) out += conjugate_by(rho, shape, loss_kraus(gamma, static_cast<int>(k), dim), mode);
  return out;
}

Matrix loss_channel(const Matrix& rho, double gamma, double tol) {
  return loss_channel(rho, {static_cast<int>(rho.rows())}, 0, gamma, tol);
}

Matrix dephasing_damp(const Matrix& rho, const std::vector<int>& shape, int mode, double gamma) {
  if (gamma < 0.0) throw DomainError("dephasing needs gamma >= 0");
  if (gamma == 0.0) return rho;
  long inner = 1;
  for (std::size_t m = mode + 1; m < shape.size(); ++m) inner *= shape[m];
  const int dm = shape.at(mode);
  std::vector<double> f(dm);
  for (int d = 0; d < dm; ++d) f[d] = std::exp(-0.5 * gamma * d * d);
  Matrix out = rho;
  for (long j = 0; j < rho.cols(); ++j) {
    const int nj = static_cast<int>((j / inner) % dm);
    for (long i = 0; i < rho.rows(); ++i) out(i, j) *= f[std::abs(static_cast<int>((i / inner) % dm) - nj)];
  }
  return out;
}

Matrix dephasing_damp(const Matrix& rho, double gamma) {
  return dephasing_damp(rho, {static_cast<int>(rho.rows())}, 0, gamma);
}

Matrix location_channel(const Matrix& rho, const std::vector<int>& shape, int mode, const NoiseStrength& s) {
  return dephasing_damp(loss_channel(rho, shape, mode, s.gamma_loss), shape, mode, s.gamma_ph);
}

LossSample sample_loss(const FockVector& state, int mode, double gamma, Rng& rng, double tol, int location_id) {
  LossSample out;
  out.record.location_id = location_id;
  if (gamma == 0.0) {
    out.state = state;
    return out;
  }
  const int dim = state.dim(mode);
  const std::vector<double> w = loss_weights(state.populations(mode), gamma, tol);
  out.k = sample_from_weights(w, rng);
  out.state = state.apply(loss_kraus(gamma, out.k, dim), mode);
  out.state.normalize();
  out.record.loss_count = out.k;
  return out;
}

double sample_dephasing_angle(double gamma, Rng& rng) {
  if (gamma == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, std::sqrt(gamma))(rng);
}

DephasingSample sample_dephasing(const FockVector& state, int mode, double gamma, Rng& rng, int location_id) {
  DephasingSample out;
  out.theta = sample_dephasing_angle(gamma, rng);
  out.state = state;
  if (out.theta != 0.0) out.state.apply_diagonal_inplace(mode, rotation_phases(out.theta, state.dim(mode)));
  out.record = {location_id, 0, out.theta};
  return out;
}

NoisySample apply_location_noise(const FockVector& state, int mode, const NoiseStrength& s, Rng& rng,
                                 int location_id) {
  LossSample l = sample_loss(state, mode, s.gamma_loss, rng, kLossCutoffTol, location_id);
  DephasingSample d = sample_dephasing(l.state, mode, s.gamma_ph, rng, location_id);
  return {std::move(d.state), {location_id, l.k, d.theta}};
}

}  // namespace catft
