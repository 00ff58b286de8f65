#include "catft/ft_symbolic.hpp"

#include <cmath>
#include <functional>

#include "catft/phase_meas.hpp"

namespace catft {

namespace {

constexpr double kEps = 1e-12;

int num_locations(Scheme s) { return static_cast<int>(location_table(s).size()); }

SymbolicFault at(const FaultPattern& p, int id) {
  const auto it = p.find(id);
  return it == p.end() ? SymbolicFault{} : it->second;
}

// 2 pi k/(N M) is a multiple of 2 pi / N, hence the identity on an order-N code
bool reducible(int k, int M) { return k % M == 0; }

}  // namespace

void validate_pattern(Scheme s, int N, int M, const FaultPattern& p) {
  if (N < 1 || M < 1) throw DomainError("N and M must be >= 1");
  const int L = num_locations(s);
  for (const auto& [id, f] : p) {
    if (id < 0 || id >= L) throw DomainError("unknown location id " + std::to_string(id));
    if (f.k < 0) throw DomainError("loss counts must be >= 0");
    if (!(f.theta <= 0.0) || !(f.theta > -kPi / N)) throw DomainError("phase faults must lie in (-pi/N, 0]");
  }
}

PropagationResult propagate(Scheme s, int N, int M, const FaultPattern& p) {
  validate_pattern(s, N, M, p);
  const int L = num_locations(s);
  std::vector<int> k(L);
  std::vector<double> t(L);
  for (int i = 0; i < L; ++i) {
    const SymbolicFault f = at(p, i);
    k[i] = f.k;
    t[i] = f.theta;
  }
  PropagationResult r;
  for (int i = 1; i < L; ++i) {
    r.r += k[i];
    r.theta_f += t[i];
  }
  const double n2 = static_cast<double>(N) * N;
  if (s == Scheme::Knill) {
    const double c = kPi / (static_cast<double>(N) * M);  // CZ angle between order-N and order-M modes
    r.I = {k[0] + k[5] + k[8], t[0] + t[5] + t[8] - c * (k[1] + k[3])};
    r.A = {k[1] + k[3] + k[6] + k[9], t[1] + t[3] + t[6] + t[9] - c * (k[2] + k[0])};
    r.O = {k[2] + k[4] + k[7] + k[10], t[2] + t[4] + t[7] + t[10] - c * k[1]};
    r.theta_s = -kPi * k[0] / n2;
    r.theta_r = -kPi / n2 * (2 * k[1] + k[2] + k[3]);
  } else {
    const double c = 2.0 * kPi / (static_cast<double>(N) * M);
    r.I = {k[0] + k[4] + k[6] + k[8], t[0] + t[4] + t[6] + t[8] - kPi * k[2] / n2};
    if (!reducible(k[1], M)) r.I.theta -= c * k[1];
    r.A = {k[1] + k[3] + k[5], t[1] + t[3] + t[5] - c * k[0]};
    r.O = {k[2] + k[7] + k[9], t[2] + t[7] + t[9] - kPi * (k[0] + k[4]) / n2};
    r.theta_s = -kPi * k[0] / n2 - (reducible(k[0], M) ? 0.0 : c * k[0]);
    r.theta_r = -kPi * (k[2] + k[4]) / n2 - (reducible(k[1], M) ? 0.0 : c * k[1]);
  }
  return r;
}

namespace {

// Conclusion clauses only; fills reasons and k_hat.
bool conclusion_holds(Scheme s, int N, int M, const FaultPattern& full, EcftVerdict& v) {
  const PropagationResult& p = v.prop;
  const SymbolicFault in = at(full, 0);
  const double bound_out = std::abs(p.theta_f + p.theta_r) + kEps;
  if (std::abs(p.I.theta) >= kPi / N - kEps)
    v.reasons.push_back(s == Scheme::Knill ? "input X-bar outcome flipped (logical Z on output)"
                                           : "input X-bar outcome flipped (logical X on output)");
  if (s == Scheme::Knill) {
    if (std::abs(p.A.theta) >= kPi / M - kEps) v.reasons.push_back("ancilla X-bar outcome flipped (logical X on output)");
    if (p.O.k > p.r) v.reasons.push_back("output loss exceeds gadget losses");
    if (std::abs(p.O.theta) > bound_out) v.reasons.push_back("output phase exceeds gadget-induced phase");
  } else {
    // the ancilla peak sits at its own phase noise minus 2 pi k0/(N M)
    const double shift = at(full, 1).theta + at(full, 3).theta + at(full, 5).theta;
    const double phase = shift - 2.0 * kPi * in.k / (static_cast<double>(N) * M);
    const int bins = hybrid_dp_bins(N, M);
    v.k_hat = hybrid_dp_decode(bin_phase(phase, bins, 0.0), N, M).k_hat;
    if (v.k_hat != in.k) v.reasons.push_back("ancilla misreports the input loss count");
    const double out = p.O.theta + kPi * v.k_hat / (static_cast<double>(N) * N);
    if (p.O.k > p.r) v.reasons.push_back("output loss exceeds gadget losses");
    if (std::abs(out) > bound_out) v.reasons.push_back("output phase exceeds gadget-induced phase");
  }
  return v.reasons.empty();
}

}  // namespace

EcftVerdict ecft_check(Scheme s, int N, int M, SymbolicFault input, const FaultPattern& gadget) {
  if (gadget.count(0)) throw DomainError("gadget pattern must not contain the input location");
  FaultPattern full = gadget;
  full[0] = input;
  EcftVerdict v;
  v.prop = propagate(s, N, M, full);
  v.hypothesis = input.k + v.prop.r < N &&
                 std::abs(input.theta + v.prop.theta_f + v.prop.theta_s + v.prop.theta_r) < kPi / N - kEps;
  v.conclusion = conclusion_holds(s, N, M, full, v);
  v.satisfied = !v.hypothesis || v.conclusion;
  return v;
}

ExhaustiveReport exhaustive_check(Scheme s, int N, int M, const std::vector<int>& k_values,
                                  const std::vector<double>& theta_values) {
  if (k_values.empty() || theta_values.empty()) throw DomainError("empty enumeration grid");
  const int L = num_locations(s);
  const int per = static_cast<int>(k_values.size() * theta_values.size());
  std::vector<int> digit(L, 0);
  ExhaustiveReport rep;
  while (true) {
    FaultPattern g;
    SymbolicFault in;
    for (int i = 0; i < L; ++i) {
      const SymbolicFault f{k_values[digit[i] / theta_values.size()], theta_values[digit[i] % theta_values.size()]};
      if (i == 0)
        in = f;
      else if (f.k != 0 || f.theta != 0.0)
        g[i] = f;
    }
    const EcftVerdict v = ecft_check(s, N, M, in, g);
    ++rep.patterns;
    if (v.hypothesis) ++rep.hypothesis_held;
    if (!v.satisfied) {
      if (!rep.first_violation) {
        g[0] = in;
        rep.first_violation = g;
      }
      ++rep.violations;
    }
    int i = 0;
    while (i < L && ++digit[i] == per) digit[i++] = 0;
    if (i == L) break;
  }
  return rep;
}

namespace {

// Calls f for every distribution of w losses over the given locations.
void for_each_loss_pattern(const std::vector<int>& locs, int w, const std::function<bool(const FaultPattern&)>& f) {
  FaultPattern p;
  std::function<bool(std::size_t, int)> rec = [&](std::size_t i, int left) -> bool {
    if (i + 1 == locs.size()) {
      if (left > 0) p[locs[i]] = {left, 0.0};
      const bool stop = f(p);
      p.erase(locs[i]);
      return stop;
    }
    for (int k = 0; k <= left; ++k) {
      if (k > 0) p[locs[i]] = {k, 0.0};
      else p.erase(locs[i]);
      if (rec(i + 1, left - k)) return true;
    }
    p.erase(locs[i]);
    return false;
  };
  rec(0, w);
}

std::optional<int> min_breaking(Scheme s, int N, int M, const std::vector<int>& locs, int max_weight, AuditRow* row) {
  for (int w = 1; w <= max_weight; ++w) {
    bool found = false;
    for_each_loss_pattern(locs, w, [&](const FaultPattern& p) {
      FaultPattern g = p;
      const SymbolicFault in = at(g, 0);
      g.erase(0);
      const EcftVerdict v = ecft_check(s, N, M, in, g);
      if (v.conclusion) return false;
      if (row) {
        row->example = p;
        row->reasons = v.reasons;
      }
      found = true;
      return true;
    });
    if (found) return w;
  }
  return std::nullopt;
}

}  // namespace

std::vector<AuditRow> ancilla_order_audit(Scheme s, int N, const std::vector<int>& M_values, int max_weight) {
  if (max_weight < 1) throw DomainError("max_weight must be >= 1");
  std::vector<int> all, anc;
  for (const Location& l : location_table(s)) {
    all.push_back(l.id);
    if (l.mode == ModeRole::A) anc.push_back(l.id);
  }
  std::vector<AuditRow> rows;
  for (int M : M_values) {
    if (M < 1) throw DomainError("M must be >= 1");
    AuditRow row;
    row.M = M;
    row.breaking_weight = min_breaking(s, N, M, all, max_weight, &row);
    row.ancilla_only_breaking_weight = min_breaking(s, N, M, anc, max_weight, nullptr);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace catft
