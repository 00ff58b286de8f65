// One line per criterion: "<id> PASS|FAIL  <details>".  Arguments select criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "catft/codes.hpp"
#include "catft/exrec.hpp"
#include "catft/ft_symbolic.hpp"
#include "catft/noise.hpp"
#include "catft/phase_meas.hpp"
#include "catft/sweep.hpp"
#include "../support/conformance.hpp"
#include "../support/exact_exrec.hpp"

using namespace catft;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string g(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

Matrix pure(const Vector& v) { return v * v.adjoint(); }

// ---------------------------------------------------------------- P1
void p1(Outcome& o) {
  const int d = 20;
  const Matrix a = annihilation(d).matrix();
  const Matrix I = Matrix::Identity(d, d);
  double worst = 0;
  for (double theta : {kPi / 4, kPi / 9, 2 * kPi / 3, kPi / 6}) {
    Matrix U = Matrix::Zero(d * d, d * d);
    for (int n = 0; n < d; ++n)
      for (int m = 0; m < d; ++m) U(n * d + m, n * d + m) = std::polar(1.0, theta * n * m);
    const Matrix R = rotation(-theta, d).matrix();
    worst = std::max(worst, (U * kron(a, I) - kron(a, R) * U).norm());
    worst = std::max(worst, (U * kron(I, a) - kron(R, a) * U).norm());
    const Matrix Rp = rotation(0.3, d).matrix();
    worst = std::max(worst, (U * kron(Rp, I) - kron(Rp, I) * U).norm());
  }
  double povm = 0;
  for (int K : {2, 4, 6, 9}) {
    Matrix s = Matrix::Zero(d, d);
    for (int k = 0; k < K; ++k) s += dp_povm_element({K, 0.1, d}, k).matrix();
    povm = std::max(povm, (s - I).norm());
  }
  o.detail << "crot residual " << g(worst) << ", povm completeness " << g(povm) << " ";
  o.require(worst < 1e-10, "crot residual < 1e-10");
  o.require(povm < 1e-12, "povm residual < 1e-12");
}

// ---------------------------------------------------------------- P2
void p2(Outcome& o) {
  bool support = true;
  double rot = 0;
  for (int N : {2, 3}) {
    const Codewords cw = make_codewords({N, 3.0});
    for (int n = 0; n < cw.dim; ++n) {
      if (n % (2 * N) != 0 && cw.ket0.amplitudes()[n] != cplx(0.0)) support = false;
      if (n % (2 * N) != N && cw.ket1.amplitudes()[n] != cplx(0.0)) support = false;
      if (n % (2 * N) == 0 && n < 20 && cw.ket0.amplitudes()[n] == cplx(0.0)) support = false;
    }
    const Vector r = rotation_phases(2 * kPi / N, cw.dim);
    rot = std::max({rot, (r.cwiseProduct(cw.ket0.amplitudes()) - cw.ket0.amplitudes()).norm(),
                    (r.cwiseProduct(cw.ket1.amplitudes()) - cw.ket1.amplitudes()).norm()});
  }
  const Codewords c2 = make_codewords({2, 3.0});
  const double dev = std::max(std::abs(c2.norm0 / 4 - 1), std::abs(c2.norm1 / 4 - 1));
  o.detail << "support exact " << (support ? "yes" : "no") << ", |norm/2N - 1| " << g(dev) << ", rotation "
           << g(rot) << " ";
  o.require(support, "support pattern");
  o.require(dev < 0.01, "norm within 1%");
  o.require(rot < 1e-9, "rotation invariance 1e-9");
}

// ---------------------------------------------------------------- P3
void p3(Outcome& o) {
  for (int N : {2, 3}) {
    const KLReport r = kl_violation({N, 2.0}, {1.5, 2.0, 2.5, 3.0}, KLGrid::defaults(N));
    double off = 0;
    for (double x : r.offdiag) off = std::max(off, x);
    o.detail << "N=" << N << ": offdiag " << g(off) << " slope " << g(r.fitted_decay_rate) << " R2 " << g(r.fit_r2)
             << "; ";
    o.require(off < 1e-12, "offdiag < 1e-12");
    o.require(r.fitted_decay_rate < 0, "slope < 0");
    o.require(r.fit_r2 > 0.9, "R2 > 0.9");
  }
}

// ---------------------------------------------------------------- P4
void p4(Outcome& o) {
  for (int N : {2, 3}) {
    double prev = 1;
    o.detail << "N=" << N << ":";
    for (double a : {1.5, 2.0, 2.5, 3.0}) {
      const double p = xbar_error_prob(N, a, 0.0, 0, 0.0);
      o.detail << " " << g(p);
      o.require(p < prev, "decreasing in alpha");
      prev = p;
    }
    o.detail << "; ";
  }
  const double p0 = xbar_error_prob(3, 2.5, 0.0, 0, 0.0), ps = xbar_error_prob(3, 2.5, 0.6, 0, 0.0);
  o.detail << "N=3 a=2.5 r=0: " << g(p0) << " r=0.6: " << g(ps);
  o.require(ps < p0, "squeezing lowers p_err");
}

// ---------------------------------------------------------------- P5
double simpson_cf(double gamma, int d) {
  const double L = 12 * std::sqrt(gamma);
  const int n = 4000;
  const double h = 2 * L / n;
  double acc = 0;
  for (int i = 0; i <= n; ++i) {
    const double t = -L + i * h;
    acc += std::cos(d * t) * std::exp(-t * t / (2 * gamma)) / std::sqrt(2 * kPi * gamma) *
           (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
  }
  return acc * h / 3;
}

void p5(Outcome& o) {
  const long shots = 100000;
  const int d = 15;
  const FockVector c = coherent(cplx(1.6, 0.3), d, {1e-5});
  const Codewords cw = make_codewords({2, 1.6, 0.0, kPi / 2, d}, {1e-4});
  for (const auto& [name, psi] : {std::pair<std::string, FockVector>{"coherent", c}, {"cat", cw.plus}}) {
    Matrix al = Matrix::Zero(d, d), ad = Matrix::Zero(d, d);
    for (long s = 0; s < shots; ++s) {
      Rng rng = make_stream(101, s);
      al += pure(sample_loss(psi, 0, 0.25, rng).state.normalized().amplitudes());
      ad += pure(sample_dephasing(psi, 0, 0.15, rng).state.amplitudes());
    }
    al /= double(shots);
    ad /= double(shots);
    const double tl = trace_distance(al, loss_channel(pure(psi.amplitudes()), 0.25));
    const double td = trace_distance(ad, dephasing_damp(pure(psi.amplitudes()), 0.15));
    o.detail << name << ": loss TD " << g(tl) << " dephasing TD " << g(td) << "; ";
    o.require(tl < 0.01 && td < 0.01, "trace distance < 0.01");
  }
  double q = 0;
  for (double gam : {0.01, 0.15, 0.5}) {
    const Matrix m = dephasing_damp(Matrix::Ones(8, 8), gam);
    for (int k = 0; k < 8; ++k) q = std::max(q, std::abs(m(0, k).real() - simpson_cf(gam, k)));
  }
  o.detail << "closed form vs quadrature " << g(q);
  o.require(q < 1e-8, "dephasing closed form 1e-8");
}

// ---------------------------------------------------------------- P6
GadgetContext ctx_for(Scheme s, int N, double alpha, int M = 0) {
  GadgetSpec gs;
  gs.scheme = s;
  gs.N = N;
  gs.M = M;
  gs.input.alpha = gs.ancilla.alpha = alpha;
  return GadgetContext(gs);
}

void p6(Outcome& o) {
  for (Scheme s : {Scheme::Knill, Scheme::Hybrid})
    for (int N : {2, 3}) {
      const GadgetContext ctx = ctx_for(s, N, 3.0);
      double worst = 1;
      int cases = 0;
      for (const Location& l : ctx.locations())
        for (int k : {0, 1, 2})
          for (double th : {0.0, -kPi / (4 * N), -0.9 * kPi / N}) {
            if (k == 0 && th == 0.0) continue;
            worst = std::min(worst, oracle::conformance_fidelity(ctx, {l.id, k, th}));
            ++cases;
          }
      o.detail << to_string(s) << " N=" << N << ": min F " << g(worst) << " over " << cases << "; ";
      o.require(worst > 0.99, "conformance fidelity > 0.99");
    }
  const GadgetContext hy = ctx_for(Scheme::Hybrid, 3, 3.0);
  const double f0 = oracle::gadget_fidelity(hy, {}, 1000, 3);
  double fmin = 1;
  for (int k : {1, 2, 3}) {
    const InjectedFault f[] = {{1, k, 0.0}};
    fmin = std::min(fmin, oracle::gadget_fidelity(hy, f, 1000, 3));
  }
  o.detail << "hybrid M=1 ancilla losses: F " << g(fmin) << " vs clean " << g(f0) << "; ";
  o.require(fmin > f0 - 0.01, "hybrid ancilla-loss immunity");
  const GadgetContext kn = ctx_for(Scheme::Knill, 3, 3.0);
  const InjectedFault f[] = {{3, 3, 0.0}};
  const double fk = oracle::gadget_fidelity(kn, f, 1000, 3);
  o.detail << "Knill M=3 ancilla losses after CZ(A,O): F " << g(fk);
  o.require(fk < 0.1, "Knill fails on M ancilla losses");
}

// ---------------------------------------------------------------- P7
void p7(Outcome& o) {
  const std::vector<int> k{0, 1};
  const std::vector<double> th{0.0, -kPi / 8};
  const ExhaustiveReport kn = exhaustive_check(Scheme::Knill, 2, 2, k, th);
  const ExhaustiveReport hy = exhaustive_check(Scheme::Hybrid, 2, 1, k, th);
  o.detail << "Knill(2,2) " << kn.patterns << " patterns, " << kn.hypothesis_held << " in hypothesis, "
           << kn.violations << " violations; hybrid(2,1) " << hy.patterns << ", " << hy.hypothesis_held << ", "
           << hy.violations << "; ";
  o.require(kn.violations == 0 && hy.violations == 0, "zero violations");
  o.require(kn.hypothesis_held > 0 && hy.hypothesis_held > 0, "hypothesis exercised");
  // Knill: M ancilla losses are a logical X on the ancilla, so M < N breaks below N.
  // Hybrid: M = 1 is immune; otherwise the capacity is ceil(M/2).
  for (int N : {2, 3}) {
    std::vector<int> Ms;
    for (int M = 1; M <= N + 1; ++M) Ms.push_back(M);
    o.detail << "audit N=" << N << " Knill";
    for (const AuditRow& r : ancilla_order_audit(Scheme::Knill, N, Ms, N + 2)) {
      const int w = r.ancilla_only_breaking_weight.value_or(99);
      o.detail << " M" << r.M << ":" << w;
      o.require(w == r.M && (r.M < N) == (w < N), "Knill ancilla order");
    }
    o.detail << " hybrid";
    for (const AuditRow& r : ancilla_order_audit(Scheme::Hybrid, N, Ms, N + 2)) {
      const int w = r.ancilla_only_breaking_weight.value_or(99);
      o.detail << " M" << r.M << ":" << (w == 99 ? std::string("none") : std::to_string(w));
      o.require(r.M == 1 ? !r.ancilla_only_breaking_weight : w == (r.M + 1) / 2, "hybrid ancilla order");
    }
    o.detail << "; ";
  }
}

// ---------------------------------------------------------------- P8
void p8(Outcome& o) {
  for (Scheme s : {Scheme::Hybrid, Scheme::Knill})
    for (int N : {2, 3}) {
      ExRecConfig c;
      c.gadget.scheme = s;
      c.gadget.N = N;
      c.gadget.input.alpha = c.gadget.ancilla.alpha = 3.0;
      c.shots = 20000;
      c.seed = 8;
      const FidelityReport r = fidelity_report(run_exrec(c), 0.0, 200, 8);
      o.detail << to_string(s) << " N=" << N << ": F " << std::to_string(r.f_ent) << " +- "
               << g(r.standard_error) << "; ";
      o.require(r.f_ent > 0.999, "F_ent > 0.999");
    }
}

// ---------------------------------------------------------------- P9
void p9(Outcome& o) {
  struct Case {
    Scheme s;
    double alpha;
    NoiseStrength op;
    double wait;
  };
  for (const Case& cs : {Case{Scheme::Hybrid, 1.2, {0.02, 0.01}, 2.0}, Case{Scheme::Knill, 1.2, {0.02, 0.01}, 2.0},
                         Case{Scheme::Hybrid, 1.2, {0.005, 0.02}, 1.0}}) {
    ExRecConfig c;
    c.gadget.scheme = cs.s;
    c.gadget.N = 1;
    c.gadget.input.alpha = c.gadget.ancilla.alpha = cs.alpha;
    c.gadget.dim_in = c.gadget.dim_anc = 10;
    c.truncation.tail_mass_tol = 1e-5;
    c.op_noise = cs.op;
    c.wait_mult = cs.wait;
    c.shots = 20000;
    c.seed = 9;
    const double exact = infidelity_from_fent(petz_decode(oracle::exact_exrec_choi(c)).f_ent);
    const FidelityReport r = fidelity_report(run_exrec(c), 1.0, 200, 9);
    const double z = std::abs(r.inf - exact) / r.standard_error;
    o.detail << to_string(cs.s) << " (" << g(cs.op.gamma_loss) << "," << g(cs.op.gamma_ph) << ",w=" << cs.wait
             << "): exact " << g(exact) << " mc " << g(r.inf) << " +- " << g(r.standard_error) << " (" << g(z)
             << " se); ";
    o.require(z < 3, "within 3 standard errors");
  }
}

// ---------------------------------------------------------------- P10
SweepPoint p10_point(double r, const SearchSpace& space, const OptimBudget& budget) {
  ExRecConfig c;
  c.gadget.scheme = Scheme::Hybrid;
  c.gadget.N = 3;
  c.gadget.input.alpha = c.gadget.ancilla.alpha = 4.0;
  c.gadget.input.squeeze_r = c.gadget.ancilla.squeeze_r = r;
  c.seed = 10;
  return optimize_point({1.6e-3, 1e-3}, c, space, budget);
}

void p10(Outcome& o) {
  SearchSpace s;
  s.alpha_in = s.alpha_anc = {3.5, 4.5};
  s.optimize_wait = true;
  s.wait_mult = {1.0, 32.0};
  OptimBudget b;
  b.evaluations = 80;
  b.shots_per_eval = 4000;
  b.final_shots = 20000;
  b.grid_points = 2;
  const double r6db = 0.6 * std::log(10.0) / 2;  // 6 dB
  const SweepPoint sq = p10_point(r6db, s, b);
  const SweepPoint reg = p10_point(0.0, s, b);
  auto describe = [&](const char* name, const SweepPoint& p) {
    o.detail << name << ": R " << g(p.best_R) << " +- " << g(p.R_stderr) << " at alpha " << g(p.best_params.gadget.input.alpha)
             << "/" << g(p.best_params.gadget.ancilla.alpha) << " phi0 " << g(p.best_params.gadget.phi0_in) << "/"
             << g(p.best_params.gadget.phi0_anc) << " wait " << g(p.best_params.wait_mult) << " (" << p.shots
             << " shots); ";
  };
  describe("squeezed 6 dB", sq);
  describe("regular", reg);
  o.require(sq.best_R >= 0.59 && sq.best_R <= 0.98, "squeezed R in [0.59, 0.98]");
  o.require(reg.best_R >= 1.5 && reg.best_R <= 2.8, "regular R in [1.5, 2.8]");
}

// ---------------------------------------------------------------- P11
void p11(Outcome& o) {
  int wins = 0, total = 0;
  for (double gl : {5e-4, 1e-3, 2e-3})
    for (double gp : {5e-4, 1e-3, 2e-3}) {
      double R[2];
      for (int i = 0; i < 2; ++i) {
        ExRecConfig c;
        c.gadget.scheme = i == 0 ? Scheme::Hybrid : Scheme::Knill;
        c.gadget.N = 2;
        c.gadget.input.alpha = c.gadget.ancilla.alpha = 3.0;
        c.op_noise = {gl, gp};
        c.shots = 10000;
        c.seed = 11;
        R[i] = *fidelity_report(run_exrec(c), wait_benchmark(c), 0).ratio;
      }
      ++total;
      if (R[0] < R[1]) ++wins;
      o.detail << "(" << g(gl) << "," << g(gp) << ") " << g(R[0]) << "<" << g(R[1]) << " ";
    }
  o.detail << "; hybrid better at " << wins << "/" << total << "; ";
  o.require(wins == total, "hybrid R below Knill on every grid point");

  ExRecConfig base;
  base.gadget.scheme = Scheme::Hybrid;
  base.gadget.N = 2;
  base.seed = 12;
  SearchSpace fixed;
  fixed.alpha_in = fixed.alpha_anc = {2.0, 4.5};
  SearchSpace waited = fixed;
  waited.optimize_wait = true;
  OptimBudget b;
  b.evaluations = 40;
  b.shots_per_eval = 3000;
  b.final_shots = 20000;
  b.grid_points = 3;
  const SweepPoint pf = optimize_point({1e-3, 5e-4}, base, fixed, b);
  const SweepPoint pw = optimize_point({1e-3, 5e-4}, base, waited, b);
  const double se = std::hypot(pf.R_stderr, pw.R_stderr);
  o.detail << "hybrid N=2 (1e-3,5e-4): fixed wait R " << g(pf.best_R) << " +- " << g(pf.R_stderr)
           << ", optimized wait R " << g(pw.best_R) << " +- " << g(pw.R_stderr) << " at wait "
           << g(pw.best_params.wait_mult) << " (margin " << g((pf.best_R - pw.best_R) / se) << " se)";
  o.require(pf.best_R - pw.best_R >= 2 * se, "optimized wait better by >= 2 se");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> all{
      {"P1", p1}, {"P2", p2}, {"P3", p3}, {"P4", p4},  {"P5", p5},  {"P6", p6},
      {"P7", p7}, {"P8", p8}, {"P9", p9}, {"P10", p10}, {"P11", p11}};
  std::set<std::string> want(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [id, fn] : all) {
    if (!want.empty() && !want.count(id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[error: " << e.what() << "]";
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-4s %s  %s (%.1f s)\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), dt);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
