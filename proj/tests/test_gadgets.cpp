#include <cmath>

#include "catft/gadgets.hpp"
#include "catft/phase_meas.hpp"
#include "doctest.h"
#include "support/conformance.hpp"

using namespace catft;

namespace {

GadgetContext context(Scheme s, int N, double alpha, int M = 0) {
  GadgetSpec g;
  g.scheme = s;
  g.N = N;
  g.M = M;
  g.input.alpha = g.ancilla.alpha = alpha;
  return GadgetContext(g);
}

}  // namespace

TEST_CASE("location tables") {
  CHECK(location_table(Scheme::Knill).size() == 11);
  CHECK(location_table(Scheme::Hybrid).size() == 10);
  for (Scheme s : {Scheme::Knill, Scheme::Hybrid}) {
    const auto t = location_table(s);
    CHECK(t[0].kind == LocationKind::Input);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i].id == static_cast<int>(i));
  }
  CHECK(parse_scheme("knill") == Scheme::Knill);
  CHECK(to_string(Scheme::Hybrid) == "hybrid");
  CHECK_THROWS(parse_scheme("surface"));
}

TEST_CASE("hybrid loss decoding from the ancilla bin") {
  CHECK(hybrid_dp_bins(3, 2) == 6);
  CHECK(hybrid_dp_decode(0, 3, 2).k_hat == 0);
  CHECK(hybrid_dp_decode(5, 3, 2).k_hat == 1);  // -1 mod 3
  CHECK(hybrid_dp_decode(4, 3, 2).k_hat == 2);
  CHECK(hybrid_dp_decode(3, 3, 2).k_hat == 0);
  CHECK(hybrid_dp_decode(5, 3, 2).angle == doctest::Approx(kPi / 9));
  CHECK_THROWS_AS(hybrid_dp_decode(6, 3, 2), DomainError);
  CHECK(decode_xbar_outcome(3, 2) == 1);
}

TEST_CASE("frame on the reference undoes an output Pauli") {
  const Codewords cw = make_codewords({2, 2.0});
  const LogicalOperators L = logical_operators(cw);
  for (const Frame& C : {pauli_x(), pauli_z(), hadamard(), Frame(pauli_z() * pauli_x())}) {
    FockVector s = choi_input(cw);
    // the output carries C: (1 x C_logical)|Phi>
    Matrix Cl = Matrix::Zero(cw.dim, cw.dim);
    const Vector* basis[2] = {&cw.ket0.amplitudes(), &cw.ket1.amplitudes()};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) Cl += C(i, j) * (*basis[i]) * basis[j]->adjoint();
    s = s.apply(FockOperator(Cl), 1);
    apply_frame_to_reference(s, C);
    CHECK(std::norm(choi_input(cw).amplitudes().dot(s.amplitudes())) == doctest::Approx(1.0).epsilon(1e-12));
  }
  (void)L;
}

TEST_CASE("single-location faults follow the symbolic propagation") {
  for (Scheme s : {Scheme::Knill, Scheme::Hybrid})
    for (int N : {2, 3}) {
      const GadgetContext ctx = context(s, N, 3.0);
      for (const Location& l : ctx.locations())
        for (int k : {0, 1, 2})
          for (double th : {0.0, -0.3}) {
            if (k == 0 && th == 0.0) continue;
            CAPTURE(to_string(s));
            CAPTURE(N);
            CAPTURE(l.id);
            CAPTURE(k);
            CHECK(oracle::conformance_fidelity(ctx, {l.id, k, th}) > 1 - 1e-9);
          }
    }
}

TEST_CASE("noiseless gadget fidelity is set by the X-bar measurement error") {
  const double p = xbar_error_prob(3, 2.5, 0.0, 0, 0.0);
  const long shots = 4000;
  const double sd = std::sqrt(2 * p / shots);
  const double fh = oracle::gadget_fidelity(context(Scheme::Hybrid, 3, 2.5), {}, shots, 21);
  const double fk = oracle::gadget_fidelity(context(Scheme::Knill, 3, 2.5), {}, shots, 21);
  CHECK(std::abs(fh - (1 - p)) < 4 * sd);
  CHECK(std::abs(fk - (1 - 2 * p)) < 4 * sd);
}

TEST_CASE("hybrid order-1 ancilla ignores its own losses") {
  const GadgetContext ctx = context(Scheme::Hybrid, 2, 3.0);
  REQUIRE(ctx.M() == 1);
  const double f0 = oracle::gadget_fidelity(ctx, {}, 400, 5);
  for (int loc : {1, 3, 5}) {
    const InjectedFault f[] = {{loc, 3, 0.0}};
    CHECK(oracle::gadget_fidelity(ctx, f, 400, 5) > f0 - 0.01);
  }
}

TEST_CASE("Knill fails on M ancilla losses") {
  const GadgetContext ctx = context(Scheme::Knill, 2, 3.0);
  REQUIRE(ctx.M() == 2);
  // a^M is logical X on the ancilla: harmless on |+> at preparation, fatal after CZ(A,O)
  const InjectedFault prep[] = {{1, 2, 0.0}};
  CHECK(oracle::gadget_fidelity(ctx, prep, 400, 5) > 0.99);
  const InjectedFault after[] = {{3, 2, 0.0}};
  CHECK(oracle::gadget_fidelity(ctx, after, 400, 5) < 0.05);
}

TEST_CASE("fault log records injected faults") {
  const GadgetContext ctx = context(Scheme::Hybrid, 2, 2.5);
  const InjectedFault f[] = {{6, 1, -0.2}};
  Rng rng(3);
  const GadgetRunResult r = run_gadget(ctx, choi_input(ctx.data_code()), GadgetNoise{}, rng, f);
  REQUIRE(r.fault_log.size() == 10);
  CHECK(r.fault_log[6].loss_count == 1);
  CHECK(r.fault_log[6].dephasing_angle == doctest::Approx(-0.2));
  CHECK(r.fault_log[2].loss_count == 0);
  const InjectedFault bad[] = {{10, 1, 0.0}};
  CHECK_THROWS_AS(run_gadget(ctx, choi_input(ctx.data_code()), GadgetNoise{}, rng, bad), DomainError);
}

TEST_CASE("trajectories are reproducible from the stream seed") {
  const GadgetContext ctx = context(Scheme::Knill, 2, 2.5);
  GadgetNoise n = GadgetNoise::uniform({0.01, 0.01});
  Rng a = make_stream(1, 7), b = make_stream(1, 7);
  const auto ra = run_gadget(ctx, choi_input(ctx.data_code()), n, a);
  const auto rb = run_gadget(ctx, choi_input(ctx.data_code()), n, b);
  CHECK(ra.outcomes.phi_in == rb.outcomes.phi_in);
  CHECK((ra.output_state.amplitudes() - rb.output_state.amplitudes()).norm() == 0.0);
}

TEST_CASE("gadget spec validation") {
  GadgetSpec g;
  g.N = 0;
  CHECK_THROWS_AS(GadgetContext{g}, DomainError);
  g.N = 2;
  CHECK(g.ancilla_order() == 1);
  g.scheme = Scheme::Knill;
  CHECK(g.ancilla_order() == 2);
}
