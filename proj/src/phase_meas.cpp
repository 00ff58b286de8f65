#include "catft/phase_meas.hpp"

#include <algorithm>
#include <cmath>

#include "catft/codes.hpp"

namespace catft {

void DPMeasSpec::validate() const {
  if (K < 1) throw DomainError("DP measurement needs K >= 1");
  if (dim < 1) throw InvalidDimension("DP measurement needs dim >= 1");
  if (!std::isfinite(phi0)) throw DomainError("phi0 must be finite");
}

int bin_phase(double phi, int K, double phi0) {
  if (K < 1) throw DomainError("bin_phase needs K >= 1");
  const double w = 2.0 * kPi / K;
  // the small shift resolves exact boundary ties toward the lower bin
  const double x = (phi - phi0) / w - 0.5 - 1e-12;
  long k = static_cast<long>(std::ceil(x)) % K;
  if (k < 0) k += K;
  return static_cast<int>(k);
}

FockOperator dp_povm_element(const DPMeasSpec& spec, int k) {
  spec.validate();
  if (k < 0 || k >= spec.K) throw DomainError("DP bin index out of range");
  const double w = 2.0 * kPi / spec.K;
  const double a = spec.phi0 + (k - 0.5) * w, b = spec.phi0 + (k + 0.5) * w;
  const int d = spec.dim;
  Matrix m(d, d);
  for (int n = 0; n < d; ++n)
    for (int np = 0; np < d; ++np) {
      if (n == np) {
        m(n, np) = 1.0 / spec.K;
        continue;
      }
      const double q = n - np;
      // (1/2pi) int_a^b e^{i (n - n') phi} dphi
      m(n, np) = (std::polar(1.0, q * b) - std::polar(1.0, q * a)) / (cplx(0.0, 2.0 * kPi * q));
    }
  if (spec.K == 1) m = Matrix::Identity(d, d);
  return FockOperator(std::move(m));
}

std::pair<FockOperator, FockOperator> xbar_povm(int N, double phi0, int dim) {
  if (N < 1) throw DomainError("xbar_povm needs N >= 1");
  Matrix p = Matrix::Zero(dim, dim), q = Matrix::Zero(dim, dim);
  for (int k = 0; k < 2 * N; ++k) {
    const Matrix e = dp_povm_element({2 * N, phi0, dim}, k).matrix();
    (k % 2 == 0 ? p : q) += e;
  }
  return {FockOperator(std::move(p)), FockOperator(std::move(q))};
}

// ---- PhaseDensity

PhaseDensity::PhaseDensity(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) throw InvalidDimension("empty phase density");
}

double PhaseDensity::density(double phi) const {
  double s = c_[0].real();
  const cplx step = std::polar(1.0, -phi);
  cplx e = 1.0;
  for (std::size_t m = 1; m < c_.size(); ++m) {
    e *= step;
    s += 2.0 * (c_[m] * e).real();
  }
  return s / (2.0 * kPi);
}

double PhaseDensity::mass(double a, double b) const {
  double s = c_[0].real() * (b - a);
  const cplx sa = std::polar(1.0, -a), sb = std::polar(1.0, -b);
  cplx ea = 1.0, eb = 1.0;
  for (std::size_t m = 1; m < c_.size(); ++m) {
    ea *= sa;
    eb *= sb;
    // int_a^b e^{-i m phi} = i (e^{-imb} - e^{-ima}) / m
    s += 2.0 * (c_[m] * cplx(0.0, 1.0) * (eb - ea)).real() / static_cast<double>(m);
  }
  return s / (2.0 * kPi);
}

double PhaseDensity::bin_mass(int K, double phi0, int k) const {
  const double w = 2.0 * kPi / K;
  return mass(phi0 + (k - 0.5) * w, phi0 + (k + 0.5) * w);
}

double PhaseDensity::sample(Rng& rng, int grid_size) const {
  const double total = this->total();
  if (!(total > 1e-14)) throw DegenerateError("phase outcome density vanishes");
  const double target = uniform01(rng) * total;
  double lo = -kPi, hi = kPi;
  const double tol = 2.0 * kPi / std::max(grid_size, 4);
  double mlo = 0.0;  // mass on [-pi, lo]
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double mm = mlo + mass(lo, mid);
    if (mm < target) {
      lo = mid;
      mlo = mm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PhaseDensity phase_density(const FockVector& state, int mode) {
  const int d = state.dim(mode);
  const long inner = state.stride(mode);
  const long outer = state.size() / (inner * d);
  const Vector& v = state.amplitudes();
  std::vector<cplx> c(d, cplx(0.0));
  for (long o = 0; o < outer; ++o)
    for (long j = 0; j < inner; ++j) {
      const cplx* p = v.data() + o * d * inner + j;
      for (int m = 0; m < d; ++m) {
        cplx acc = 0.0;
        for (int n = 0; n + m < d; ++n) acc += p[(n + m) * inner] * std::conj(p[n * inner]);
        c[m] += acc;
      }
    }
  return PhaseDensity(std::move(c));
}

Vector phase_ket(double phi, int dim) { return rotation_phases(phi, dim) / std::sqrt(2.0 * kPi); }

PhaseSampleResult sample_canonical_phase(const FockVector& state, int mode, Rng& rng, int grid_size, int K,
                                         double phi0) {
  const int d = state.dim(mode);
  if (grid_size < 4 * d) throw DomainError("grid_size must be at least 4x the mode dimension");
  PhaseDensity q = phase_density(state, mode);
  PhaseSampleResult r;
  r.phi = q.sample(rng, grid_size);
  r.bin = bin_phase(r.phi, K, phi0);
  FockVector c = partial_inner(state, mode, phase_ket(r.phi, d));
  r.density = c.norm2();
  if (!(r.density > 1e-300)) throw DegenerateError("conditional state vanishes at sampled phase");
  c.normalize();
  r.conditional_state = std::move(c);
  r.branch_weight = std::clamp(r.density * 2.0 * kPi / grid_size, 0.0, 1.0);
  return r;
}

double xbar_error_prob(int N, double alpha, double r, int k_shift, double phi0, const TruncationPolicy& policy,
                       double varphi) {
  if (!(alpha > 0.0)) throw DomainError("xbar_error_prob needs alpha > 0");
  CodeSpec spec;
  spec.N = N;
  spec.alpha = alpha;
  spec.squeeze_r = r;
  spec.squeeze_varphi = varphi;
  Codewords cw = make_codewords(spec, policy);
  FockVector s = cw.plus;
  s.apply_diagonal_inplace(0, rotation_phases(k_shift * kPi / N, cw.dim));
  PhaseDensity q = phase_density(s, 0);
  const int wrong = ((k_shift % 2) + 2) % 2 == 0 ? 1 : 0;
  double p = 0.0;
  for (int k = 0; k < 2 * N; ++k)
    if (k % 2 == wrong) p += q.bin_mass(2 * N, phi0, k);
  return p;
}

}  // namespace catft
