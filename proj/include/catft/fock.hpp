#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "catft/errors.hpp"

namespace catft {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

struct TruncationPolicy {
  double tail_mass_tol = 1e-9;
  int min_dim = 8;
  double growth_factor = 1.25;

  void validate() const;
};

enum class Structure { General, Diagonal, ShiftDiagonal };

// Dense dim x dim operator with an optional structure tag.  A shift-diagonal(k)
// operator only has entries (n, n+k), i.e. it lowers the photon number by k.
class FockOperator {
 public:
  explicit FockOperator(Matrix m);
  FockOperator(Matrix m, Structure s, int shift = 0);

  static FockOperator identity(int dim);
  static FockOperator diagonal(const Vector& d);
  // coeffs[n] is the (n, n+k) entry, n = 0 .. dim-k-1
  static FockOperator shift_diagonal(const Vector& coeffs, int k, int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Structure structure() const { return structure_; }
  int shift() const { return shift_; }

  bool matches_structure() const;
  FockOperator adjoint() const;
  FockOperator operator*(const FockOperator& rhs) const;

  // out = op * in along a stride-addressed axis; used by FockVector::apply
  void apply_strided(const cplx* in, cplx* out, long stride) const;

 private:
  Matrix m_;
  Structure structure_ = Structure::General;
  int shift_ = 0;
};

class FockVector {
 public:
  FockVector() = default;
  explicit FockVector(Vector amps);
  FockVector(std::vector<int> shape, Vector amps);

  static FockVector basis(int dim, int n);
  static FockVector tensor(const FockVector& a, const FockVector& b);

  int num_modes() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int mode) const;
  long size() const { return amps_.size(); }
  long stride(int mode) const;

  const Vector& amplitudes() const { return amps_; }
  Vector& amplitudes() { return amps_; }

  double norm2() const { return amps_.squaredNorm(); }
  // throws DegenerateError on a zero vector
  void normalize();
  FockVector normalized() const;
  cplx inner(const FockVector& ket) const;

  FockVector apply(const FockOperator& op, int mode) const;
  void apply_diagonal_inplace(int mode, const Vector& d);
  std::vector<double> populations(int mode) const;

 private:
  void check_mode(int mode) const;

  std::vector<int> shape_;
  Vector amps_;
};

FockOperator annihilation(int dim);
FockOperator number_operator(int dim);
FockOperator rotation(double theta, int dim);
Vector rotation_phases(double theta, int dim);

// Coherent amplitudes from the series; throws TruncationError when the
// analytic tail beyond dim exceeds policy.tail_mass_tol.
FockVector coherent(cplx alpha, int dim, const TruncationPolicy& policy = {});
double coherent_tail_mass(double abs_alpha, int dim);

// Exponentials of the anti-Hermitian generators on the truncated space.
FockOperator displacement(cplx alpha, int dim);
// Minimal-variance quadrature is X_varphi = (a e^{-i varphi} + a^dag e^{i varphi})/sqrt2.
FockOperator squeeze(double r, double varphi, int dim);
// Unitarity defect of U on the block n < dim - 4 sqrt(dim).
double unitarity_defect(const Matrix& u);

// D(alpha) S(r, varphi)|vac> computed in a working space larger than dim and
// truncated; renormalized.  Throws TruncationError if the discarded tail
// exceeds the policy tolerance.
FockVector squeezed_coherent(cplx alpha, double r, double varphi, int dim,
                             const TruncationPolicy& policy = {});

// Smallest dim whose squeezed-coherent tail mass is below tolerance.
int ensure_dim(double alpha, double r, const TruncationPolicy& policy = {},
               double varphi = kPi / 2);

double tail_mass(const Vector& amps, int from);
double mean_photon_number(const FockVector& single_mode);
double quadrature_variance(const FockVector& single_mode, double varphi);

FockVector apply_crot_phase(const FockVector& state, double phi, int mode_a, int mode_b);
// (<bra| (x) 1)|state>; the contracted mode is removed from the shape
FockVector partial_inner(const FockVector& state, int mode, const Vector& bra);

// Density-matrix helpers on a multimode shape
Matrix apply_left(const Matrix& rho, const std::vector<int>& shape,
                  const FockOperator& op, int mode);
Matrix conjugate_by(const Matrix& rho, const std::vector<int>& shape,
                    const FockOperator& op, int mode);
double trace_distance(const Matrix& a, const Matrix& b);

}  // namespace catft
