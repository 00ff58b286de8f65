#pragma once

#include <vector>

#include "catft/fock.hpp"

namespace catft {

struct CodeSpec {
  int N = 2;
  double alpha = 2.0;
  double squeeze_r = 0.0;
  double squeeze_varphi = kPi / 2;
  int dim = 0;  // 0: chosen by ensure_dim

  void validate() const;
  // f in dB
  double squeezing_db() const;
};

int code_dim(const CodeSpec& spec, const TruncationPolicy& policy = {});

struct Codewords {
  CodeSpec spec;
  int dim = 0;
  FockVector ket0, ket1, plus, minus;
  Matrix projector;
  double norm0 = 0.0, norm1 = 0.0;
};

FockVector primitive_state(const CodeSpec& spec, const TruncationPolicy& policy = {});
FockVector codeword(const CodeSpec& spec, int mu, const TruncationPolicy& policy = {});
Codewords make_codewords(const CodeSpec& spec, const TruncationPolicy& policy = {});

struct LogicalOperators {
  Matrix zbar, xbar, hbar;
};
LogicalOperators logical_operators(const Codewords& cw);

struct KLGrid {
  std::vector<int> k_values;
  std::vector<double> thetas;
  // all k < N and 8 angles -(pi/N) j/8, j = 0..7
  static KLGrid defaults(int N, int theta_points = 8);
};

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct KLReport {
  std::vector<double> alphas;
  std::vector<double> violations;  // max diagonal mismatch per alpha, per unit error norm
  std::vector<double> offdiag;     // max |<0|E^dag E'|1>| and cross-k terms per alpha
  double fitted_decay_rate = 0.0;  // slope of log(violation) against alpha^2
  double fit_r2 = 0.0;
  double fit_intercept = 0.0;
};

KLReport kl_violation(const CodeSpec& base, const std::vector<double>& alphas, const KLGrid& grid,
                      const TruncationPolicy& policy = {});

}  // namespace catft
