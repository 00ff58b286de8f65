#pragma once

#include "catft/exrec.hpp"

namespace oracle {

// Exact channel composition of leading EC -> wait -> trailing EC on density
// matrices over (R, I, A, O).  Every measurement is summed over its bins with
// the exact bin POVM and the Pauli frame is applied branch by branch.
// Returns the (R, O) Choi state averaged over outcomes.  Small dims only.
catft::Matrix exact_exrec_choi(const catft::ExRecConfig& cfg);

// Bin POVM of a canonical phase measurement: (1/2pi) int_lo^hi |phi><phi|.
catft::Matrix phase_bin_povm(double lo, double hi, int dim);

}  // namespace oracle
