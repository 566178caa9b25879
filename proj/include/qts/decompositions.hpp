#pragma once

#include "qts/circuit.hpp"
#include "qts/cr.hpp"

namespace qts {

// Sites of the ternary decomposition on dims (2, 3, 2).
inline constexpr int kSiteC1 = 0;
inline constexpr int kSiteC2 = 1;
inline constexpr int kSiteT = 2;

struct PhaseCorrection {
  int site;
  Subspace subspace;
  double theta;
};

struct DecompositionReport {
  Circuit circuit;
  Operator unitary;  // compiled noiseless circuit unitary
  double equivalence_fidelity = 0.0;
  std::vector<PhaseCorrection> residual_phase_corrections;
  double total_duration_ns = 0.0;
  int two_transmon_gate_count = 0;
};

// Ideal gates for comparison.
Operator ideal_ccnot8();                         // on (2,2,2)
Operator ideal_ccnot_mixed();                    // on (2,3,2), identity on c2=|2>
Operator ideal_two_controlled_not();             // on (3,2): X on target iff control |2>

// Two consecutive device CNOTs; corrected=true appends the
// diagonal phase correction that cancels the Stark phase and the -i of the
// |2>-level Rx(pi), making the composite the exact |2>-controlled NOT up to
// global phase.
Circuit two_controlled_not(bool corrected, const CRParams& cr = CRParams{},
                           const GateDurations& durations = GateDurations::ibmq_jakarta_like());

// Ternary CCNOT: X+/X- framing conjugates the c1-controlled (01) rotation on
// c2 into a (12) rotation, routing |11> through |2> for the |2>-controlled
// NOT.  corrected appends the R_Z^(12)/local-Z corrections; dd replaces the
// plain CNOT pair by CNOT . X12 . delay(2 CNOT) . X12 . CNOT.
DecompositionReport ternary_toffoli(bool corrected, bool dd,
                                    const CRParams& cr = CRParams{},
                                    const GateDurations& durations = GateDurations::ibmq_jakarta_like());

// Order-preserving CCNOT on the line 0-1, 1-2 with eight nearest-neighbor
// CNOTs (phase-polynomial CCZ conjugated by H on the target).
DecompositionReport binary_toffoli_8cnot(
    const GateDurations& durations = GateDurations::ibmq_jakarta_like());

// Standard six-CNOT CCNOT, all-to-all connectivity reference.
DecompositionReport binary_toffoli_6cnot(
    const GateDurations& durations = GateDurations::ibmq_jakarta_like());

enum class LeakageStatus { Ok, AboveThreshold };

struct EquivalenceResult {
  double fidelity = 0.0;
  double leakage = 0.0;  // worst out-of-block population over block inputs
  LeakageStatus leakage_status = LeakageStatus::Ok;
  std::vector<PhaseCorrection> corrections;  // optimal per-site diagonal phases
  Matrix corrected_unitary;                  // block unitary with corrections applied
};

// Compare a compiled circuit against an ideal unitary, optimizing per-site
// diagonal phase corrections (closed-form column-phase alignment, solved in
// site order).  With qubit_subspace, both operators are restricted to the
// all-levels<2 block and leakage out of it is certified.
EquivalenceResult verify_equivalence(const Circuit& circuit, const Operator& ideal,
                                     bool qubit_subspace,
                                     double leakage_threshold = 1e-8);

EquivalenceResult verify_equivalence(const Operator& u, const Operator& ideal,
                                     bool qubit_subspace,
                                     double leakage_threshold = 1e-8);

}  // namespace qts
