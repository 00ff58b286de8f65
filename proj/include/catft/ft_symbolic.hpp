#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "catft/gadgets.hpp"

namespace catft {

// Fault a^k e^{i theta n} at one location; theta in (-pi/N, 0].
struct SymbolicFault {
  int k = 0;
  double theta = 0.0;
};
using FaultPattern = std::map<int, SymbolicFault>;  // location id -> fault

struct ModeError {
  int k = 0;
  double theta = 0.0;
};

// Errors pushed to just before the final ideal measurements.
struct PropagationResult {
  ModeError I, A, O;
  int r = 0;             // gadget losses (locations >= 1)
  double theta_f = 0.0;  // gadget phases
  double theta_s = 0.0;  // phase induced by input losses
  double theta_r = 0.0;  // phase induced by gadget losses
};

void validate_pattern(Scheme s, int N, int M, const FaultPattern& p);
PropagationResult propagate(Scheme s, int N, int M, const FaultPattern& p);

struct EcftVerdict {
  bool hypothesis = false;
  bool conclusion = false;
  bool satisfied = false;  // !hypothesis || conclusion
  std::vector<std::string> reasons;  // failed conclusion clauses
  PropagationResult prop;
  int k_hat = 0;  // hybrid loss estimate from the ancilla
};

// input = location 0; gadget must not contain location 0.
EcftVerdict ecft_check(Scheme s, int N, int M, SymbolicFault input, const FaultPattern& gadget);

struct ExhaustiveReport {
  long patterns = 0;
  long hypothesis_held = 0;
  long violations = 0;
  std::optional<FaultPattern> first_violation;
};
ExhaustiveReport exhaustive_check(Scheme s, int N, int M, const std::vector<int>& k_values,
                                  const std::vector<double>& theta_values);

struct AuditRow {
  int M = 0;
  std::optional<int> breaking_weight;                // any loss pattern
  std::optional<int> ancilla_only_breaking_weight;  // losses on ancilla locations only
  FaultPattern example;
  std::vector<std::string> reasons;
};
// Loss-only patterns up to max_weight total losses; a pattern breaks when the
// conclusion clauses fail, whether or not the hypothesis holds.
std::vector<AuditRow> ancilla_order_audit(Scheme s, int N, const std::vector<int>& M_values, int max_weight);

}  // namespace catft
