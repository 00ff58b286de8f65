#include "catft/sweep.hpp"

#include <algorithm>
#include <cmath>

namespace catft {

namespace {

void check_range(const Range& r, double lo, double hi, const char* name) {
  if (!(r.lo <= r.hi) || r.lo < lo || r.hi > hi)
    throw DomainError(std::string(name) + " range must be nonempty and within [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
}

double lerp(const Range& r, double u) { return r.lo + (r.hi - r.lo) * u; }

}  // namespace

void SearchSpace::validate() const {
  check_range(alpha_in, 0.0, 9.0, "alpha_in");
  check_range(alpha_anc, 0.0, 9.0, "alpha_anc");
  if (phi0_in) check_range(*phi0_in, -kPi, kPi, "phi0_in");
  if (phi0_anc) check_range(*phi0_anc, -kPi, kPi, "phi0_anc");
  check_range(squeeze_r, 0.0, 1.5, "squeeze_r");
  check_range(wait_mult, 1e-9, 1e9, "wait_mult");
}

Range SearchSpace::phi0_in_range(int N) const { return phi0_in.value_or(Range{-kPi / (2 * N), kPi / (2 * N)}); }
Range SearchSpace::phi0_anc_range(int N) const { return phi0_anc.value_or(Range{-kPi / (2 * N), kPi / (2 * N)}); }

void OptimBudget::validate() const {
  if (evaluations < 1) throw DomainError("budget needs >= 1 evaluation");
  if (shots_per_eval < 1 || final_shots < 1) throw DomainError("shot counts must be >= 1");
  if (grid_points < 1) throw DomainError("grid_points must be >= 1");
}

ParamMap::ParamMap(const ExRecConfig& base, const SearchSpace& space) : base_(base), space_(space) {
  if (space.optimize_alpha) {
    axes_.push_back(Axis::AlphaIn);
    axes_.push_back(Axis::AlphaAnc);
  }
  if (space.optimize_phi0) {
    axes_.push_back(Axis::Phi0In);
    axes_.push_back(Axis::Phi0Anc);
  }
  if (space.squeeze) axes_.push_back(Axis::Squeeze);
  if (space.optimize_wait) axes_.push_back(Axis::Wait);
}

ExRecConfig ParamMap::at(const std::vector<double>& u) const {
  ExRecConfig c = base_;
  const int N = c.gadget.N;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const double x = std::clamp(u.at(i), 0.0, 1.0);
    switch (axes_[i]) {
      case Axis::AlphaIn:
        c.gadget.input.alpha = lerp(space_.alpha_in, x);
        break;
      case Axis::AlphaAnc:
        c.gadget.ancilla.alpha = lerp(space_.alpha_anc, x);
        break;
      case Axis::Phi0In:
        c.gadget.phi0_in = lerp(space_.phi0_in_range(N), x);
        break;
      case Axis::Phi0Anc:
        c.gadget.phi0_anc = lerp(space_.phi0_anc_range(N), x);
        break;
      case Axis::Squeeze:
        c.gadget.input.squeeze_r = c.gadget.ancilla.squeeze_r = lerp(space_.squeeze_r, x);
        break;
      case Axis::Wait:
        c.wait_mult = std::exp(lerp({std::log(space_.wait_mult.lo), std::log(space_.wait_mult.hi)}, x));
        break;
    }
  }
  return c;
}

double wait_benchmark(const ExRecConfig& c) {
  const NoiseStrength w = c.op_noise.scaled(c.wait_mult);
  return benchmark_infidelity(w.gamma_loss, w.gamma_ph);
}

namespace {

struct Objective {
  const ParamMap& map;
  long shots;
  int threads;
  std::vector<Evaluation>& history;

  double operator()(const std::vector<double>& u) {
    Evaluation e;
    e.params = map.at(u);
    e.params.shots = shots;
    try {
      const FidelityReport r = fidelity_report(run_exrec(e.params, threads), wait_benchmark(e.params), 0);
      e.inF = r.inf;
      e.R = r.ratio.value_or(r.inf);
    } catch (const Error&) {
      // parameters the code cannot represent (e.g. degenerate codewords)
      e.inF = e.R = std::numeric_limits<double>::infinity();
    }
    history.push_back(e);
    return e.R;
  }
};

struct Simplex {
  std::vector<std::vector<double>> x;
  std::vector<double> f;
};

std::vector<double> clamp01(std::vector<double> v) {
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  return v;
}

// Returns true when stopped by the budget.
bool nelder_mead(Objective& obj, std::vector<double> x0, double f0, double step, int budget) {
  const int d = static_cast<int>(x0.size());
  Simplex s;
  s.x.push_back(x0);
  s.f.push_back(f0);
  for (int i = 0; i < d; ++i) {
    if (budget <= 0) return true;
    std::vector<double> v = x0;
    v[i] += v[i] + step <= 1.0 ? step : -step;
    s.x.push_back(clamp01(v));
    s.f.push_back(obj(s.x.back()));
    --budget;
  }
  auto combine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> r(d);
    for (int i = 0; i < d; ++i) r[i] = c[i] + t * (w[i] - c[i]);
    return clamp01(r);
  };
  while (true) {
    std::vector<int> idx(d + 1);
    for (int i = 0; i <= d; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return s.f[a] < s.f[b]; });
    Simplex t;
    for (int i : idx) {
      t.x.push_back(s.x[i]);
      t.f.push_back(s.f[i]);
    }
    s = std::move(t);
    double diam = 0.0;
    for (int i = 1; i <= d; ++i)
      for (int j = 0; j < d; ++j) diam = std::max(diam, std::abs(s.x[i][j] - s.x[0][j]));
    if (diam < 1e-3) return false;
    if (budget <= 0) return true;

    std::vector<double> c(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) c[j] += s.x[i][j] / d;
    const std::vector<double> xr = combine(c, s.x[d], -1.0);
    const double fr = obj(xr);
    --budget;
    if (fr < s.f[0]) {
      if (budget <= 0) {
        s.x[d] = xr;
        s.f[d] = fr;
        return true;
      }
      const std::vector<double> xe = combine(c, s.x[d], -2.0);
      const double fe = obj(xe);
      --budget;
      s.x[d] = fe < fr ? xe : xr;
      s.f[d] = std::min(fe, fr);
      continue;
    }
    if (fr < s.f[d - 1]) {
      s.x[d] = xr;
      s.f[d] = fr;
      continue;
    }
    if (budget <= 0) return true;
    const bool outside = fr < s.f[d];
    const std::vector<double> xc = combine(c, outside ? xr : s.x[d], 0.5);
    const double fc = obj(xc);
    --budget;
    if (fc < std::min(fr, s.f[d])) {
      s.x[d] = xc;
      s.f[d] = fc;
      continue;
    }
    for (int i = 1; i <= d; ++i) {
      if (budget <= 0) return true;
      s.x[i] = combine(s.x[0], s.x[i], 0.5);
      s.f[i] = obj(s.x[i]);
      --budget;
    }
  }
}

}  // namespace

SweepPoint optimize_point(const NoiseStrength& noise, const ExRecConfig& base, const SearchSpace& space,
                          const OptimBudget& budget, int threads) {
  noise.validate();
  space.validate();
  budget.validate();
  ExRecConfig cfg = base;
  cfg.op_noise = noise;
  cfg.validate();

  SweepPoint out;
  out.gamma_loss = noise.gamma_loss;
  out.gamma_ph = noise.gamma_ph;
  out.seed = cfg.seed;

  const ParamMap map(cfg, space);
  const int d = map.dims();
  std::vector<double> best_u(d, 0.5);

  const bool has_benchmark = wait_benchmark(map.at(best_u)) > 0.0;
  if (has_benchmark && d > 0) {
    Objective obj{map, budget.shots_per_eval, threads, out.history};
    int p = budget.grid_points;
    while (p > 1 && std::pow(static_cast<double>(p), d) > budget.evaluations / 2.0) --p;
    const long cells = static_cast<long>(std::llround(std::pow(static_cast<double>(p), d)));
    double best_f = std::numeric_limits<double>::infinity();
    for (long c = 0; c < cells; ++c) {
      std::vector<double> u(d);
      long rem = c;
      for (int i = 0; i < d; ++i) {
        u[i] = (static_cast<double>(rem % p) + 0.5) / p;
        rem /= p;
      }
      const double f = obj(u);
      if (f < best_f) {
        best_f = f;
        best_u = u;
      }
    }
    const int left = budget.evaluations - static_cast<int>(cells);
    out.budget_exhausted = nelder_mead(obj, best_u, best_f, 0.5 / std::max(p, 2), left);
    const auto it = std::min_element(out.history.begin(), out.history.end(),
                                     [](const Evaluation& a, const Evaluation& b) { return a.R < b.R; });
    out.best_params = it->params;
  } else {
    out.best_params = map.at(best_u);
  }

  out.best_params.shots = budget.final_shots;
  out.inF_bm = wait_benchmark(out.best_params);
  const FidelityReport fin = fidelity_report(run_exrec(out.best_params, threads), out.inF_bm, 200, cfg.seed);
  out.inF = fin.inf;
  out.shots = fin.shots;
  if (fin.ratio) {
    out.best_R = *fin.ratio;
    out.R_stderr = fin.ratio_stderr;
  }
  return out;
}

BoundaryPoint breakeven_search(double gamma_ph, const ExRecConfig& base, const SearchSpace& space,
                               const OptimBudget& budget, double lo, double hi, int threads) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("break-even bracket needs 0 < lo < hi");
  BoundaryPoint b;
  b.gamma_ph = gamma_ph;
  auto eval = [&](double gl) { return optimize_point({gl, gamma_ph}, base, space, budget, threads); };
  SweepPoint plo = eval(lo);
  SweepPoint phi = eval(hi);
  b.bracket_lo = lo;
  b.bracket_hi = hi;
  if (!(plo.best_R < 1.0 && phi.best_R > 1.0)) {
    b.point = plo.best_R < 1.0 ? phi : plo;
    return b;
  }
  b.in_range = true;
  while (true) {
    const double mid = std::sqrt(lo * hi);
    SweepPoint pm = eval(mid);
    b.point = pm;
    b.gamma_loss_star = mid;
    if (std::abs(pm.best_R - 1.0) < 0.1) break;
    (pm.best_R < 1.0 ? lo : hi) = mid;
    if (hi / lo < 1.3) break;
  }
  b.bracket_lo = lo;
  b.bracket_hi = hi;
  return b;
}

std::vector<BoundaryPoint> breakeven_scan(const std::vector<double>& gamma_ph_list, const ExRecConfig& base,
                                          const SearchSpace& space, const OptimBudget& budget, double lo, double hi,
                                          int threads) {
  if (gamma_ph_list.empty()) throw DomainError("gamma_ph list is empty");
  std::vector<BoundaryPoint> out;
  for (double g : gamma_ph_list) out.push_back(breakeven_search(g, base, space, budget, lo, hi, threads));
  return out;
}

}  // namespace catft
