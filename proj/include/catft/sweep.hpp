#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "catft/exrec.hpp"

namespace catft {

struct Range {
  double lo = 0.0, hi = 0.0;
};

struct SearchSpace {
  Range alpha_in{1.0, 4.5}, alpha_anc{1.0, 4.5};
  std::optional<Range> phi0_in, phi0_anc;  // default [-pi/(2N), pi/(2N)]
  Range squeeze_r{0.0, 1.5};
  Range wait_mult{1.0, 64.0};  // searched in log space
  bool optimize_alpha = true;
  bool optimize_phi0 = true;
  bool squeeze = false;
  bool optimize_wait = false;

  void validate() const;
  Range phi0_in_range(int N) const;
  Range phi0_anc_range(int N) const;
};

struct OptimBudget {
  int evaluations = 40;
  long shots_per_eval = 2000;
  long final_shots = 20000;
  int grid_points = 4;

  void validate() const;
};

struct Evaluation {
  ExRecConfig params;
  double R = 0.0;
  double R_stderr = 0.0;
  double inF = 0.0;
};

struct SweepPoint {
  double gamma_loss = 0.0, gamma_ph = 0.0;
  double best_R = std::numeric_limits<double>::quiet_NaN();  // NaN when the benchmark vanishes
  double R_stderr = 0.0;
  double inF = 0.0, inF_bm = 0.0;
  ExRecConfig best_params;
  long shots = 0;
  std::uint64_t seed = 0;
  bool budget_exhausted = false;
  std::vector<Evaluation> history;
};

// Benchmark over one waiting period: strengths wait_mult x op_noise.
double wait_benchmark(const ExRecConfig& c);

// Unit-cube coordinates of the active axes <-> exRec parameters.
class ParamMap {
 public:
  ParamMap(const ExRecConfig& base, const SearchSpace& space);
  int dims() const { return static_cast<int>(axes_.size()); }
  ExRecConfig at(const std::vector<double>& u) const;

 private:
  enum class Axis { AlphaIn, AlphaAnc, Phi0In, Phi0Anc, Squeeze, Wait };
  ExRecConfig base_;
  SearchSpace space_;
  std::vector<Axis> axes_;
};

// Grid then Nelder-Mead on R with common random numbers (every evaluation
// uses base.seed); the best point is re-run with final_shots.
SweepPoint optimize_point(const NoiseStrength& noise, const ExRecConfig& base, const SearchSpace& space,
                          const OptimBudget& budget, int threads = 0);

struct BoundaryPoint {
  double gamma_ph = 0.0;
  double gamma_loss_star = std::numeric_limits<double>::quiet_NaN();  // NaN: no sign change in bracket
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool in_range = false;
  SweepPoint point;  // optimum at gamma_loss_star (or the last bracket end)
};

BoundaryPoint breakeven_search(double gamma_ph, const ExRecConfig& base, const SearchSpace& space,
                               const OptimBudget& budget, double lo, double hi, int threads = 0);
std::vector<BoundaryPoint> breakeven_scan(const std::vector<double>& gamma_ph_list, const ExRecConfig& base,
                                          const SearchSpace& space, const OptimBudget& budget, double lo = 1e-5,
                                          double hi = 1e-2, int threads = 0);

}  // namespace catft
