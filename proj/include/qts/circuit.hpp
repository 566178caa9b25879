#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qts/gates.hpp"
#include "qts/hilbert.hpp"

namespace qts {

enum class GateKind {
  SubspaceRotation,
  VirtualZ,
  XPlus,
  XMinus,
  ControlledSubspaceX,  // sites = {qubit control, qutrit target}
  PhysicalCNOT,         // sites = {control, qubit target}; qutrit or qubit control
  Delay,
  DDXPulse,             // X^(12) pi pulse of the decoupling sequence
};

struct GateInstruction {
  GateKind kind;
  std::vector<int> sites;
  Axis axis = Axis::X;
  Subspace subspace = Subspace::S01;
  double theta = 0.0;
  double axis_phase = 0.0;   // frame-resolved pulse phase in the x-y plane
  int sign = +1;             // ControlledSubspaceX direction
  double stark_phase = 0.0;  // PhysicalCNOT |2>-level phase
  double duration_ns = 0.0;  // 0 for virtual-Z
  std::string timing_label;  // optional duration-table key override

  // Key into a gate-duration table; Delay carries its own duration.
  std::string duration_key() const;
};

// Per-gate durations in ns.  The bundled ibmq_jakarta-like values are fitted
// so the three decomposition totals reproduce the reported gate times.
struct GateDurations {
  std::map<std::string, double> ns;

  static GateDurations ibmq_jakarta_like();
  double lookup(const GateInstruction& instr) const;
};

struct Circuit {
  MixedRadixSpace space;
  std::vector<GateInstruction> instructions;

  Circuit() = default;
  explicit Circuit(MixedRadixSpace sp) : space(std::move(sp)) {}
  void add(GateInstruction instr);

  // Critical-path duration under per-site ASAP scheduling: gates on disjoint
  // sites overlap, multi-site gates block all their sites.
  double total_duration() const;
  int two_transmon_gate_count() const;
};

// Full-space matrix of one instruction (identity on untouched sites).
Operator instruction_matrix(const GateInstruction& instr, const MixedRadixSpace& space);

Operator circuit_unitary(const Circuit& circuit);

// Expand XPlus/XMinus/DDXPulse into their constituent subspace rotations with
// durations from the table; other instructions pass through.
Circuit lower(const Circuit& circuit, const GateDurations& durations);

// Circuit unitary with a quasi-static (12)-frame dephasing sample interleaved.
// phase_rate_per_site: signed rad/ns for each site (ignored on qubit sites).
// The phase accrues during Delay and PhysicalCNOT instructions, as
// diag(1, e^{+i r dt}, e^{-i r dt}) on each qutrit site.
Operator circuit_unitary_with_rtn(const Circuit& circuit,
                                  const std::vector<double>& phase_rate_per_site);

// Per-site timeline end times (ns) for scheduling and duration reports.
struct DurationBreakdown {
  double total_ns = 0.0;
  std::map<std::string, double> per_kind_ns;  // summed busy time by duration key
};
DurationBreakdown duration_accounting(const Circuit& circuit, const GateDurations& durations);

// Circuit file format (JSON), used by the CLI for replayable artifacts.
std::string circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const std::string& text);

}  // namespace qts
