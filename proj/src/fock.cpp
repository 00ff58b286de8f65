#include "catft/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace catft {

void TruncationPolicy::validate() const {
  if (!(tail_mass_tol > 0.0 && tail_mass_tol <= 1e-3))
    throw DomainError("tail_mass_tol must lie in (0, 1e-3]");
  if (min_dim < 1) throw DomainError("min_dim must be positive");
  if (!(growth_factor > 1.0)) throw DomainError("growth_factor must exceed 1");
}

// ---- FockOperator

FockOperator::FockOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw InvalidDimension("operator must be square and non-empty");
}

FockOperator::FockOperator(Matrix m, Structure s, int shift)
    : m_(std::move(m)), structure_(s), shift_(shift) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw InvalidDimension("operator must be square and non-empty");
  if (s == Structure::ShiftDiagonal && (shift < 0 || shift >= dim()))
    throw InvalidDimension("shift out of range");
  if (!matches_structure()) throw DomainError("operator entries do not match structure tag");
}

FockOperator FockOperator::identity(int dim) {
  return diagonal(Vector::Ones(dim));
}

FockOperator FockOperator::diagonal(const Vector& d) {
  return FockOperator(d.asDiagonal().toDenseMatrix(), Structure::Diagonal, 0);
}

FockOperator FockOperator::shift_diagonal(const Vector& coeffs, int k, int dim) {
  if (k < 0 || k >= dim || coeffs.size() != dim - k)
    throw InvalidDimension("shift-diagonal coefficient length must be dim - k");
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n + k < dim; ++n) m(n, n + k) = coeffs[n];
  return FockOperator(std::move(m), Structure::ShiftDiagonal, k);
}

bool FockOperator::matches_structure() const {
  if (structure_ == Structure::General) return true;
  const int k = structure_ == Structure::Diagonal ? 0 : shift_;
  for (int j = 0; j < dim(); ++j)
    for (int i = 0; i < dim(); ++i)
      if (j - i != k && m_(i, j) != cplx(0.0)) return false;
  return true;
}

FockOperator FockOperator::adjoint() const {
  if (structure_ == Structure::Diagonal)
    return FockOperator(m_.adjoint(), Structure::Diagonal, 0);
  return FockOperator(m_.adjoint());
}

FockOperator FockOperator::operator*(const FockOperator& rhs) const {
  if (rhs.dim() != dim()) throw InvalidDimension("operator dimension mismatch");
  Matrix p = m_ * rhs.m_;
  if (structure_ != Structure::General && rhs.structure_ != Structure::General) {
    const int k = shift_ + rhs.shift_;
    if (k == 0) return FockOperator(std::move(p), Structure::Diagonal, 0);
    if (k < dim()) return FockOperator(std::move(p), Structure::ShiftDiagonal, k);
  }
  return FockOperator(std::move(p));
}

void FockOperator::apply_strided(const cplx* in, cplx* out, long stride) const {
  const int d = dim();
  switch (structure_) {
    case Structure::Diagonal:
      for (int i = 0; i < d; ++i) out[i * stride] = m_(i, i) * in[i * stride];
      break;
    case Structure::ShiftDiagonal:
      for (int i = 0; i < d; ++i)
        out[i * stride] = i + shift_ < d ? m_(i, i + shift_) * in[(i + shift_) * stride] : cplx(0.0);
      break;
    case Structure::General:
      for (int i = 0; i < d; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < d; ++j) acc += m_(i, j) * in[j * stride];
        out[i * stride] = acc;
      }
      break;
  }
}

// ---- FockVector

namespace {

long shape_product(const std::vector<int>& shape) {
  long p = 1;
  for (int d : shape) {
    if (d < 1) throw InvalidDimension("mode dimension must be positive");
    p *= d;
  }
  return p;
}

// Applies op along one axis of a row-major tensor (first mode slowest).
void apply_axis(const cplx* in, cplx* out, const std::vector<int>& shape, int mode,
                const FockOperator& op) {
  long inner = 1;
  for (std::size_t m = mode + 1; m < shape.size(); ++m) inner *= shape[m];
  long outer = 1;
  for (int m = 0; m < mode; ++m) outer *= shape[m];
  const long block = inner * shape[mode];
  for (long o = 0; o < outer; ++o)
    for (long j = 0; j < inner; ++j) op.apply_strided(in + o * block + j, out + o * block + j, inner);
}

}  // namespace

FockVector::FockVector(Vector amps) : shape_{static_cast<int>(amps.size())}, amps_(std::move(amps)) {
  if (amps_.size() < 1) throw InvalidDimension("empty state");
}

FockVector::FockVector(std::vector<int> shape, Vector amps) : shape_(std::move(shape)), amps_(std::move(amps)) {
  if (shape_.empty()) throw InvalidDimension("empty mode shape");
  if (shape_product(shape_) != amps_.size())
    throw InvalidDimension("mode-shape product differs from amplitude length");
}

FockVector FockVector::basis(int dim, int n) {
  if (n < 0 || n >= dim) throw InvalidDimension("basis index out of range");
  Vector v = Vector::Zero(dim);
  v[n] = 1.0;
  return FockVector(std::move(v));
}

FockVector FockVector::tensor(const FockVector& a, const FockVector& b) {
  std::vector<int> shape = a.shape_;
  shape.insert(shape.end(), b.shape_.begin(), b.shape_.end());
  Vector v(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a.amps_[i] * b.amps_;
  return FockVector(std::move(shape), std::move(v));
}

void FockVector::check_mode(int mode) const {
  if (mode < 0 || mode >= num_modes()) throw InvalidDimension("bad mode index " + std::to_string(mode));
}

int FockVector::dim(int mode) const {
  check_mode(mode);
  return shape_[mode];
}

long FockVector::stride(int mode) const {
  check_mode(mode);
  long s = 1;
  for (int m = num_modes() - 1; m > mode; --m) s *= shape_[m];
  return s;
}

void FockVector::normalize() {
  const double n2 = norm2();
  if (!(n2 > 1e-300)) throw DegenerateError("cannot normalize a zero vector");
  amps_ /= std::sqrt(n2);
}

FockVector FockVector::normalized() const {
  FockVector out = *this;
  out.normalize();
  return out;
}

cplx FockVector::inner(const FockVector& ket) const {
  if (ket.shape_ != shape_) throw InvalidDimension("shape mismatch in inner product");
  return amps_.dot(ket.amps_);
}

FockVector FockVector::apply(const FockOperator& op, int mode) const {
  check_mode(mode);
  if (op.dim() != shape_[mode]) throw InvalidDimension("operator dimension differs from mode dimension");
  Vector out(amps_.size());
  apply_axis(amps_.data(), out.data(), shape_, mode, op);
  return FockVector(shape_, std::move(out));
}

void FockVector::apply_diagonal_inplace(int mode, const Vector& d) {
  check_mode(mode);
  if (d.size() != shape_[mode]) throw InvalidDimension("diagonal length differs from mode dimension");
  const long inner = stride(mode);
  const long dm = shape_[mode];
  const long outer = amps_.size() / (inner * dm);
  for (long o = 0; o < outer; ++o)
    for (long n = 0; n < dm; ++n) {
      cplx* p = amps_.data() + (o * dm + n) * inner;
      for (long j = 0; j < inner; ++j) p[j] *= d[n];
    }
}

std::vector<double> FockVector::populations(int mode) const {
  check_mode(mode);
  const long inner = stride(mode);
  const long dm = shape_[mode];
  const long outer = amps_.size() / (inner * dm);
  std::vector<double> p(dm, 0.0);
  for (long o = 0; o < outer; ++o)
    for (long n = 0; n < dm; ++n) {
      const cplx* q = amps_.data() + (o * dm + n) * inner;
      for (long j = 0; j < inner; ++j) p[n] += std::norm(q[j]);
    }
  return p;
}

// ---- elementary operators

FockOperator annihilation(int dim) {
  if (dim < 2) throw InvalidDimension("annihilation needs dim >= 2");
  Vector c(dim - 1);
  for (int n = 0; n < dim - 1; ++n) c[n] = std::sqrt(static_cast<double>(n + 1));
  return FockOperator::shift_diagonal(c, 1, dim);
}

FockOperator number_operator(int dim) {
  Vector d(dim);
  for (int n = 0; n < dim; ++n) d[n] = static_cast<double>(n);
  return FockOperator::diagonal(d);
}

Vector rotation_phases(double theta, int dim) {
  Vector d(dim);
  for (int n = 0; n < dim; ++n) d[n] = std::polar(1.0, theta * n);
  return d;
}

FockOperator rotation(double theta, int dim) {
  return FockOperator::diagonal(rotation_phases(theta, dim));
}

// ---- coherent and squeezed states

double coherent_tail_mass(double a, int dim) {
  if (dim <= 0) return 1.0;
  if (a == 0.0) return 0.0;
  const double lam = a * a;
  // sum Poisson weights from dim upward until negligible
  double tail = 0.0;
  for (int n = dim; n < dim + 100000; ++n) {
    const double lp = -lam + n * std::log(lam) - std::lgamma(n + 1.0);
    const double p = std::exp(lp);
    tail += p;
    if (n > lam && p < 1e-20 * std::max(tail, 1e-300)) break;
    if (n > lam && p < 1e-300) break;
  }
  return tail;
}

FockVector coherent(cplx alpha, int dim, const TruncationPolicy& policy) {
  if (dim < 1) throw InvalidDimension("dim must be positive");
  const double a = std::abs(alpha);
  const double tail = coherent_tail_mass(a, dim);
  if (tail >= policy.tail_mass_tol) {
    TruncationPolicy p = policy;
    p.min_dim = 1;
    throw TruncationError("coherent state tail mass " + std::to_string(tail) + " at dim " +
                              std::to_string(dim),
                          ensure_dim(a, 0.0, p));
  }
  Vector v = Vector::Zero(dim);
  const double ph = std::arg(alpha);
  for (int n = 0; n < dim; ++n) {
    if (a == 0.0) {
      v[n] = n == 0 ? 1.0 : 0.0;
      continue;
    }
    const double lmag = -0.5 * a * a + n * std::log(a) - 0.5 * std::lgamma(n + 1.0);
    v[n] = std::polar(std::exp(lmag), ph * n);
  }
  FockVector s(std::move(v));
  s.normalize();
  return s;
}

namespace {

// exp(G) v by scaled Taylor steps; gen(x, y) writes y = G x.
Vector expm_apply(const std::function<void(const Vector&, Vector&)>& gen, double norm_bound, Vector v) {
  const int steps = std::max(1, static_cast<int>(std::ceil(norm_bound)));
  const double h = 1.0 / steps;
  Vector term(v.size()), next(v.size()), acc(v.size());
  for (int s = 0; s < steps; ++s) {
    acc = v;
    term = v;
    const double vn = v.norm();
    for (int j = 1; j < 60; ++j) {
      gen(term, next);
      term = next * (h / j);
      acc += term;
      if (term.norm() < 1e-17 * vn) break;
    }
    v = acc;
  }
  return v;
}

Vector squeezed_coherent_work(cplx alpha, double r, double varphi, int work) {
  Vector v = Vector::Zero(work);
  v[0] = 1.0;
  if (r != 0.0) {
    // G = (z* a^2 - z a^dag^2)/2, z = r e^{2 i varphi}
    const cplx z = std::polar(r, 2.0 * varphi);
    auto gen = [&](const Vector& x, Vector& y) {
      y.setZero();
      for (int n = 0; n + 2 < work; ++n) {
        const double c = std::sqrt(static_cast<double>(n + 1) * (n + 2));
        y[n] += 0.5 * std::conj(z) * c * x[n + 2];
        y[n + 2] -= 0.5 * z * c * x[n];
      }
    };
    v = expm_apply(gen, r * work, v);
  }
  if (alpha != cplx(0.0)) {
    auto gen = [&](const Vector& x, Vector& y) {
      y.setZero();
      for (int n = 0; n + 1 < work; ++n) {
        const double c = std::sqrt(static_cast<double>(n + 1));
        y[n + 1] += alpha * c * x[n];
        y[n] -= std::conj(alpha) * c * x[n + 1];
      }
    };
    v = expm_apply(gen, 2.0 * std::abs(alpha) * std::sqrt(static_cast<double>(work)), v);
  }
  return v;
}

int working_dim(int dim, double growth) {
  return std::max(static_cast<int>(std::ceil(dim * growth)) + 16, dim + 32);
}

// top-band mass of the working vector; large values mean the truncated generator leaked
double top_band(const Vector& v) {
  const int band = std::max(4, static_cast<int>(std::sqrt(static_cast<double>(v.size()))));
  return tail_mass(v, static_cast<int>(v.size()) - band);
}

}  // namespace

double tail_mass(const Vector& amps, int from) {
  double t = 0.0;
  for (long n = std::max(from, 0); n < amps.size(); ++n) t += std::norm(amps[n]);
  return t;
}

FockVector squeezed_coherent(cplx alpha, double r, double varphi, int dim, const TruncationPolicy& policy) {
  if (dim < 1) throw InvalidDimension("dim must be positive");
  if (r == 0.0) return coherent(alpha, dim, policy);
  int work = working_dim(dim, policy.growth_factor);
  Vector v = squeezed_coherent_work(alpha, r, varphi, work);
  while (top_band(v) > 1e-3 * policy.tail_mass_tol) {
    work = static_cast<int>(std::ceil(work * policy.growth_factor));
    v = squeezed_coherent_work(alpha, r, varphi, work);
  }
  const double tail = tail_mass(v, dim);
  if (tail >= policy.tail_mass_tol) {
    TruncationPolicy p = policy;
    p.min_dim = 1;
    throw TruncationError("squeezed state tail mass " + std::to_string(tail) + " at dim " + std::to_string(dim),
                          ensure_dim(std::abs(alpha), r, p, varphi));
  }
  FockVector s(Vector(v.head(dim)));
  s.normalize();
  return s;
}

int ensure_dim(double alpha, double r, const TruncationPolicy& policy, double varphi) {
  policy.validate();
  if (alpha < 0.0 || r < 0.0) throw DomainError("ensure_dim needs alpha >= 0 and r >= 0");
  const double tol = policy.tail_mass_tol;
  if (r == 0.0) {
    int d = 1;
    while (coherent_tail_mass(alpha, d) >= tol) ++d;
    return std::max(d, policy.min_dim);
  }
  int w = static_cast<int>(std::ceil(alpha * alpha * std::exp(2 * r) + 6 * alpha * std::exp(r) + 20));
  Vector v;
  for (;;) {
    int work = working_dim(w, policy.growth_factor);
    v = squeezed_coherent_work(alpha, r, varphi, work);
    while (top_band(v) > 1e-3 * tol) {
      work = static_cast<int>(std::ceil(work * policy.growth_factor));
      v = squeezed_coherent_work(alpha, r, varphi, work);
    }
    if (tail_mass(v, w) < tol) break;
    w = static_cast<int>(std::ceil(w * policy.growth_factor));
  }
  int d = w;
  double t = tail_mass(v, w);
  while (d > 1 && t + std::norm(v[d - 1]) < tol) {
    t += std::norm(v[d - 1]);
    --d;
  }
  return std::max(d, policy.min_dim);
}

double unitarity_defect(const Matrix& u) {
  const int dim = static_cast<int>(u.rows());
  const int b = std::max(1, static_cast<int>(dim - 4.0 * std::sqrt(static_cast<double>(dim))));
  Matrix g = u.adjoint() * u;
  return (g.topLeftCorner(b, b) - Matrix::Identity(b, b)).cwiseAbs().maxCoeff();
}

namespace {

FockOperator guarded_exp(const Matrix& gen, const char* what) {
  Matrix u = gen.exp();
  const int dim = static_cast<int>(u.rows());
  const int band = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(dim)))));
  const double leak = u.col(0).tail(band).squaredNorm();
  if (unitarity_defect(u) > 1e-8 || leak > TruncationPolicy{}.tail_mass_tol)
    throw TruncationError(std::string(what) + ": truncated generator leaks into the top band",
                          static_cast<int>(std::ceil(dim * TruncationPolicy{}.growth_factor)));
  return FockOperator(std::move(u));
}

}  // namespace

FockOperator displacement(cplx alpha, int dim) {
  Matrix a = annihilation(dim).matrix();
  Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return guarded_exp(gen, "displacement");
}

FockOperator squeeze(double r, double varphi, int dim) {
  if (r == 0.0) return FockOperator::identity(dim);
  Matrix a = annihilation(dim).matrix();
  Matrix a2 = a * a;
  const cplx z = std::polar(r, 2.0 * varphi);
  Matrix gen = 0.5 * (std::conj(z) * a2 - z * a2.adjoint());
  return guarded_exp(gen, "squeeze");
}

double mean_photon_number(const FockVector& s) {
  if (s.num_modes() != 1) throw InvalidDimension("single-mode state expected");
  double m = 0.0;
  for (long n = 0; n < s.size(); ++n) m += n * std::norm(s.amplitudes()[n]);
  return m / s.norm2();
}

double quadrature_variance(const FockVector& s, double varphi) {
  if (s.num_modes() != 1) throw InvalidDimension("single-mode state expected");
  const long d = s.size();
  Vector psi = Vector::Zero(d + 1);
  psi.head(d) = s.amplitudes() / std::sqrt(s.norm2());
  // X psi with X = (a e^{-i varphi} + a^dag e^{i varphi})/sqrt2
  Vector x = Vector::Zero(d + 1);
  const cplx em = std::polar(1.0, -varphi);
  for (long n = 0; n < d; ++n) {
    x[n] += em * std::sqrt(static_cast<double>(n + 1)) * psi[n + 1];
    x[n + 1] += std::conj(em) * std::sqrt(static_cast<double>(n + 1)) * psi[n];
  }
  x /= std::sqrt(2.0);
  const double mean = psi.dot(x).real();
  return x.squaredNorm() - mean * mean;
}

FockVector apply_crot_phase(const FockVector& state, double phi, int mode_a, int mode_b) {
  if (mode_a == mode_b) throw InvalidDimension("CROT needs two distinct modes");
  const long sa = state.stride(mode_a), sb = state.stride(mode_b);
  const int da = state.dim(mode_a), db = state.dim(mode_b);
  FockVector out = state;
  Vector& v = out.amplitudes();
  // phase table over n_a * n_b products
  std::vector<cplx> table(static_cast<std::size_t>(da) * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) table[static_cast<std::size_t>(i) * db + j] = std::polar(1.0, phi * i * j);
  for (long idx = 0; idx < v.size(); ++idx) {
    const int na = static_cast<int>((idx / sa) % da);
    const int nb = static_cast<int>((idx / sb) % db);
    v[idx] *= table[static_cast<std::size_t>(na) * db + nb];
  }
  return out;
}

FockVector partial_inner(const FockVector& state, int mode, const Vector& bra) {
  const int dm = state.dim(mode);
  if (bra.size() != dm) throw InvalidDimension("bra length differs from mode dimension");
  if (state.num_modes() < 2) throw InvalidDimension("partial_inner needs a multimode state");
  const long inner = state.stride(mode);
  const long outer = state.size() / (inner * dm);
  std::vector<int> shape = state.shape();
  shape.erase(shape.begin() + mode);
  Vector out = Vector::Zero(outer * inner);
  const Vector& v = state.amplitudes();
  for (long o = 0; o < outer; ++o)
    for (int n = 0; n < dm; ++n) {
      const cplx c = std::conj(bra[n]);
      if (c == cplx(0.0)) continue;
      out.segment(o * inner, inner) += c * v.segment((o * dm + n) * inner, inner);
    }
  return FockVector(std::move(shape), std::move(out));
}

Matrix apply_left(const Matrix& rho, const std::vector<int>& shape, const FockOperator& op, int mode) {
  if (shape_product(shape) != rho.rows() || rho.rows() != rho.cols())
    throw InvalidDimension("density shape mismatch");
  if (mode < 0 || mode >= static_cast<int>(shape.size()) || op.dim() != shape[mode])
    throw InvalidDimension("bad mode for density operation");
  Matrix out(rho.rows(), rho.cols());
  for (long c = 0; c < rho.cols(); ++c) apply_axis(rho.col(c).data(), out.col(c).data(), shape, mode, op);
  return out;
}

Matrix conjugate_by(const Matrix& rho, const std::vector<int>& shape, const FockOperator& op, int mode) {
  Matrix left = apply_left(rho, shape, op, mode);
  Matrix t = left.adjoint();
  return apply_left(t, shape, op, mode).adjoint();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Matrix d = a - b;
  d = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace catft
