#pragma once

#include <vector>

#include "catft/fock.hpp"
#include "catft/rng.hpp"

namespace catft {

// Pure multimode state stored as a product of dense factors times CROT phases
// e^{i angle n_a n_b} on edges between modes of different factors.  All gadget
// gates are CROTs and all faults are losses or rotations, so a trajectory never
// needs the full tensor: a loss on one end of an edge becomes a rotation on the
// other end, and a phase measurement only merges the measured factor with its
// partners.  Every factor is kept normalized.
class PhaseNetwork {
 public:
  struct Factor {
    std::vector<int> modes;  // row-major, first mode slowest
    std::vector<int> dims;
    Vector amps;
  };
  struct Edge {
    int a, b;
    double angle;
  };
  struct Measurement {
    double phi = 0.0;
    double density = 0.0;  // outcome density q(phi)
  };

  void add_factor(std::vector<int> modes, std::vector<int> dims, Vector amps);
  void add_factor(const std::vector<int>& modes, const FockVector& state);
  void add_edge(int a, int b, double angle);

  bool has_mode(int mode) const;
  int dim(int mode) const;
  void rename(int from, int to);

  void apply_diagonal(int mode, const Vector& d);
  void rotate(int mode, double theta);
  // out(n) = coeffs[n] in(n + k) on the mode, followed by R(k angle) on every
  // edge partner; renormalizes and returns the squared norm before that.
  double apply_lowering(int mode, int k, const Vector& coeffs);
  std::vector<double> populations(int mode) const;

  // Canonical phase measurement of a mode; the mode is removed.
  Measurement measure_phase(int mode, Rng& rng, int grid_size);
  // Same, at a given phase instead of a sampled one.
  Measurement project_phase(int mode, double phi);

  // Dense state over the listed modes (must be all of them).
  FockVector to_dense(const std::vector<int>& order) const;

  const std::vector<Factor>& factors() const { return factors_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  int factor_of(int mode) const;
  int axis_of(const Factor& f, int mode) const;
  void normalize_factor(Factor& f);
  void absorb_internal_edges();
  std::vector<cplx> outcome_coeffs(int mode) const;
  Measurement contract(int mode, double phi, const std::vector<cplx>* coeffs);

  std::vector<Factor> factors_;
  std::vector<Edge> edges_;
};

}  // namespace catft
