#include "catft/codes.hpp"

#include <cmath>
#include <string>

namespace catft {

void CodeSpec::validate() const {
  if (N < 1) throw DomainError("code order N must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and >= 0");
  if (!(squeeze_r >= 0.0) || !std::isfinite(squeeze_r)) throw DomainError("squeeze_r must be finite and >= 0");
  if (!std::isfinite(squeeze_varphi)) throw DomainError("squeeze_varphi must be finite");
  if (dim < 0) throw DomainError("dim must be >= 0");
}

double CodeSpec::squeezing_db() const { return 20.0 / std::log(10.0) * squeeze_r; }

int code_dim(const CodeSpec& spec, const TruncationPolicy& policy) {
  spec.validate();
  if (spec.dim > 0) return spec.dim;
  return ensure_dim(spec.alpha, spec.squeeze_r, policy, spec.squeeze_varphi);
}

FockVector primitive_state(const CodeSpec& spec, const TruncationPolicy& policy) {
  const int dim = code_dim(spec, policy);
  return squeezed_coherent(cplx(spec.alpha, 0.0), spec.squeeze_r, spec.squeeze_varphi, dim, policy);
}

namespace {

// sum_m (-1)^{mu m} R(pi/N)^m |Theta> keeps 2N Theta_n on n = mu N mod 2N
Vector filtered(const Vector& theta, int N, int mu) {
  Vector u = Vector::Zero(theta.size());
  for (long n = 0; n < theta.size(); ++n)
    if (n % (2 * N) == static_cast<long>(mu) * N) u[n] = 2.0 * N * theta[n];
  return u;
}

}  // namespace

FockVector codeword(const CodeSpec& spec, int mu, const TruncationPolicy& policy) {
  if (mu != 0 && mu != 1) throw DomainError("codeword index must be 0 or 1");
  FockVector theta = primitive_state(spec, policy);
  Vector u = filtered(theta.amplitudes(), spec.N, mu);
  const double nrm = u.squaredNorm();
  if (nrm < 1e-8)
    throw DegenerateError("codeword " + std::to_string(mu) + " has vanishing norm (alpha too small for N=" +
                          std::to_string(spec.N) + ")");
  return FockVector(Vector(u / std::sqrt(nrm)));
}

Codewords make_codewords(const CodeSpec& spec, const TruncationPolicy& policy) {
  Codewords cw;
  cw.spec = spec;
  FockVector theta = primitive_state(spec, policy);
  cw.dim = static_cast<int>(theta.size());
  cw.spec.dim = cw.dim;
  Vector u0 = filtered(theta.amplitudes(), spec.N, 0);
  Vector u1 = filtered(theta.amplitudes(), spec.N, 1);
  cw.norm0 = u0.squaredNorm();
  cw.norm1 = u1.squaredNorm();
  if (cw.norm0 < 1e-8 || cw.norm1 < 1e-8)
    throw DegenerateError("codeword has vanishing norm (alpha=" + std::to_string(spec.alpha) +
                          " too small for N=" + std::to_string(spec.N) + ")");
  Vector k0 = u0 / std::sqrt(cw.norm0);
  Vector k1 = u1 / std::sqrt(cw.norm1);
  cw.ket0 = FockVector(k0);
  cw.ket1 = FockVector(k1);
  cw.plus = FockVector(Vector((k0 + k1) / std::sqrt(2.0)));
  cw.minus = FockVector(Vector((k0 - k1) / std::sqrt(2.0)));
  cw.projector = k0 * k0.adjoint() + k1 * k1.adjoint();
  return cw;
}

LogicalOperators logical_operators(const Codewords& cw) {
  const Vector& z = cw.ket0.amplitudes();
  const Vector& o = cw.ket1.amplitudes();
  const Vector& p = cw.plus.amplitudes();
  const Vector& m = cw.minus.amplitudes();
  LogicalOperators ops;
  ops.zbar = z * z.adjoint() - o * o.adjoint();
  ops.xbar = z * o.adjoint() + o * z.adjoint();
  ops.hbar = p * z.adjoint() + m * o.adjoint();
  return ops;
}

KLGrid KLGrid::defaults(int N, int theta_points) {
  KLGrid g;
  for (int k = 0; k < N; ++k) g.k_values.push_back(k);
  for (int j = 0; j < theta_points; ++j) g.thetas.push_back(-kPi / N * j / theta_points);
  return g;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("linear fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

KLReport kl_violation(const CodeSpec& base, const std::vector<double>& alphas, const KLGrid& grid,
                      const TruncationPolicy& policy) {
  for (int k : grid.k_values)
    if (k < 0 || k >= base.N) throw DomainError("KL loss count outside [0, N)");
  for (double t : grid.thetas)
    if (!(t <= 0.0 && t > -kPi / base.N)) throw DomainError("KL angle outside (-pi/N, 0]");
  if (grid.k_values.empty() || grid.thetas.empty()) throw DomainError("empty KL grid");

  KLReport rep;
  rep.alphas = alphas;
  for (double alpha : alphas) {
    CodeSpec s = base;
    s.alpha = alpha;
    s.dim = 0;
    Codewords cw = make_codewords(s, policy);
    const int d = cw.dim;
    const FockOperator a = annihilation(d);
    // E|mu> for every grid error, unnormalized
    std::vector<Vector> e0, e1;
    std::vector<int> kk;
    for (int k : grid.k_values) {
      FockVector v0 = cw.ket0, v1 = cw.ket1;
      for (int j = 0; j < k; ++j) {
        v0 = v0.apply(a, 0);
        v1 = v1.apply(a, 0);
      }
      for (double th : grid.thetas) {
        Vector r = rotation_phases(th, d);
        e0.push_back(r.cwiseProduct(v0.amplitudes()));
        e1.push_back(r.cwiseProduct(v1.amplitudes()));
        kk.push_back(k);
      }
    }
    // mismatch per unit error: a^k carries an alpha^k scale that is not a violation
    std::vector<double> scale(e0.size());
    for (std::size_t i = 0; i < e0.size(); ++i)
      scale[i] = std::sqrt(0.5 * (e0[i].squaredNorm() + e1[i].squaredNorm()));
    double off = 0.0, mis = 0.0;
    for (std::size_t i = 0; i < e0.size(); ++i)
      for (std::size_t j = 0; j < e0.size(); ++j) {
        off = std::max(off, std::abs(e0[i].dot(e1[j])));
        const cplx d00 = e0[i].dot(e0[j]);
        const cplx d11 = e1[i].dot(e1[j]);
        if (kk[i] != kk[j]) {
          off = std::max({off, std::abs(d00), std::abs(d11)});
        } else {
          mis = std::max(mis, std::abs(d00 - d11) / (scale[i] * scale[j]));
        }
      }
    rep.violations.push_back(mis);
    rep.offdiag.push_back(off);
  }
  if (alphas.size() >= 2) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      x.push_back(alphas[i] * alphas[i]);
      y.push_back(std::log(std::max(rep.violations[i], 1e-300)));
    }
    LinearFit f = linear_fit(x, y);
    rep.fitted_decay_rate = f.slope;
    rep.fit_r2 = f.r2;
    rep.fit_intercept = f.intercept;
  }
  return rep;
}

}  // namespace catft
