#include <cmath>

#include "catft/sweep.hpp"
#include "doctest.h"

using namespace catft;

namespace {

ExRecConfig base(int N, double alpha) {
  ExRecConfig c;
  c.gadget.scheme = Scheme::Hybrid;
  c.gadget.N = N;
  c.gadget.input.alpha = c.gadget.ancilla.alpha = alpha;
  c.batches = 20;
  c.seed = 5;
  return c;
}

SearchSpace fixed_space() {
  SearchSpace s;
  s.optimize_alpha = s.optimize_phi0 = s.squeeze = s.optimize_wait = false;
  return s;
}

OptimBudget tiny() {
  OptimBudget b;
  b.evaluations = 6;
  b.shots_per_eval = 150;
  b.final_shots = 300;
  b.grid_points = 2;
  return b;
}

bool within(double x, const Range& r) { return x >= r.lo - 1e-12 && x <= r.hi + 1e-12; }

}  // namespace

TEST_CASE("parameter map covers the active axes") {
  SearchSpace s;
  s.squeeze = s.optimize_wait = true;
  const ParamMap m(base(3, 3.0), s);
  REQUIRE(m.dims() == 6);
  const ExRecConfig lo = m.at({0, 0, 0, 0, 0, 0});
  const ExRecConfig hi = m.at({1, 1, 1, 1, 1, 1});
  CHECK(lo.gadget.input.alpha == doctest::Approx(s.alpha_in.lo));
  CHECK(hi.gadget.ancilla.alpha == doctest::Approx(s.alpha_anc.hi));
  CHECK(lo.gadget.phi0_in == doctest::Approx(-kPi / 6));
  CHECK(hi.gadget.phi0_anc == doctest::Approx(kPi / 6));
  CHECK(hi.gadget.input.squeeze_r == doctest::Approx(1.5));
  CHECK(hi.gadget.ancilla.squeeze_r == doctest::Approx(1.5));
  CHECK(lo.wait_mult == doctest::Approx(1.0));
  CHECK(hi.wait_mult == doctest::Approx(64.0));
  CHECK(m.at({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}).wait_mult == doctest::Approx(8.0));  // log scale
  CHECK(m.at({2, -1, 0, 0, 0, 0}).gadget.input.alpha == doctest::Approx(s.alpha_in.hi));
}

TEST_CASE("search space and budget validation") {
  SearchSpace s;
  s.alpha_in = {3.0, 2.0};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = SearchSpace{};
  s.alpha_anc = {1.0, 10.0};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = SearchSpace{};
  s.squeeze_r = {0.0, 2.0};
  CHECK_THROWS_AS(s.validate(), DomainError);
  OptimBudget b;
  b.evaluations = 0;
  CHECK_THROWS_AS(b.validate(), DomainError);
}

TEST_CASE("waiting benchmark scales with the wait multiplier") {
  ExRecConfig c = base(2, 2.0);
  c.op_noise = {1e-3, 5e-4};
  c.wait_mult = 4;
  CHECK(wait_benchmark(c) == doctest::Approx(benchmark_infidelity(4e-3, 2e-3)));
}

TEST_CASE("zero noise gives the undefined-ratio marker") {
  const SweepPoint p = optimize_point({0.0, 0.0}, base(2, 2.5), SearchSpace{}, tiny(), 1);
  CHECK(std::isnan(p.best_R));
  CHECK(p.inF_bm == 0.0);
  CHECK(p.history.empty());
}

TEST_CASE("optimizer is deterministic and stays inside the space") {
  SearchSpace s;
  s.alpha_in = s.alpha_anc = {2.0, 3.0};
  const SweepPoint a = optimize_point({2e-3, 1e-3}, base(2, 2.5), s, tiny(), 1);
  const SweepPoint b = optimize_point({2e-3, 1e-3}, base(2, 2.5), s, tiny(), 2);
  CHECK(a.best_R == b.best_R);
  REQUIRE(a.history.size() == b.history.size());
  CHECK(a.history.size() <= 6);
  for (const Evaluation& e : a.history) {
    CHECK(within(e.params.gadget.input.alpha, s.alpha_in));
    CHECK(within(e.params.gadget.ancilla.alpha, s.alpha_anc));
    CHECK(within(e.params.gadget.phi0_in, s.phi0_in_range(2)));
    CHECK(within(e.params.gadget.phi0_anc, s.phi0_anc_range(2)));
  }
  CHECK(a.best_R >= 0.0);
  CHECK(a.shots == 300);
  CHECK(a.budget_exhausted);
}

TEST_CASE("reported optimum reproduces under a rerun") {
  SearchSpace s;
  s.alpha_in = s.alpha_anc = {2.0, 3.0};
  const SweepPoint a = optimize_point({2e-3, 1e-3}, base(2, 2.5), s, tiny(), 1);
  ExRecConfig again = a.best_params;
  again.op_noise = {2e-3, 1e-3};
  again.shots = 300;
  const FidelityReport same = fidelity_report(run_exrec(again), wait_benchmark(again), 200, again.seed);
  REQUIRE(same.ratio);
  CHECK(*same.ratio == doctest::Approx(a.best_R).epsilon(1e-12));
  // fresh seed: 300 shots over 20 batches, loose statistical agreement
  again.seed = 99;
  const FidelityReport r = fidelity_report(run_exrec(again), wait_benchmark(again), 200, 99);
  REQUIRE(r.ratio);
  CHECK(std::abs(*r.ratio - a.best_R) < 4 * std::hypot(r.ratio_stderr, a.R_stderr));
}

TEST_CASE("ratio grows with loss at fixed parameters") {
  OptimBudget b = tiny();
  b.final_shots = 3000;
  const SweepPoint lo = optimize_point({1e-3, 5e-4}, base(2, 3.0), fixed_space(), b, 1);
  const SweepPoint hi = optimize_point({2e-3, 5e-4}, base(2, 3.0), fixed_space(), b, 1);
  CHECK(hi.best_R >= lo.best_R - 2 * lo.R_stderr);
}

TEST_CASE("break-even search flags a bracket without a sign change") {
  OptimBudget b = tiny();
  const BoundaryPoint bp = breakeven_search(0.05, base(2, 2.0), fixed_space(), b, 1e-3, 2e-3, 1);
  CHECK(!bp.in_range);
  CHECK(std::isnan(bp.gamma_loss_star));
  CHECK_THROWS_AS(breakeven_search(1e-3, base(2, 2.0), fixed_space(), b, 1e-2, 1e-3, 1), DomainError);
  CHECK_THROWS_AS(breakeven_scan({}, base(2, 2.0), fixed_space(), b), DomainError);
}
