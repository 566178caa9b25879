#pragma once

#include "qts/circuit.hpp"

namespace qts {

// Typical fixed-frequency transmon anharmonicity, -0.33 GHz, as rad/ns.
inline constexpr double kDefaultAnharmonicityRadPerNs = -2.0 * M_PI * 0.33;

// Per-site phase frames for the (01) and (12) subspaces.  Each subspace has
// its own rotating frame at its transition frequency; a physical pulse in the
// (01) subspace is instantaneous at gate level except that its declared
// duration drives the (12) frame's precession at the anharmonicity alpha.
struct SiteFrame {
  double phi01 = 0.0;  // radians, stored mod 2*pi
  double phi12 = 0.0;
  double alpha = 0.0;  // rad/ns, = omega12 - omega01 detuning rate
};

struct FrameState {
  std::vector<SiteFrame> sites;
  double clock_ns = 0.0;

  static FrameState for_space(const MixedRadixSpace& space,
                              double alpha = kDefaultAnharmonicityRadPerNs);
};

// A (01)-subspace pulse of duration dt is active on `site`: its phi12 advances
// by alpha*dt and the clock moves forward.
FrameState advance(FrameState frame, int site, double dt);

// Frame phase to apply to the next physical pulse in subspace ij on `site`.
double resolve_pulse_phase(const FrameState& frame, int site, Subspace ij);

// Fold a virtual-Z into the frame.
FrameState absorb_virtual_z(FrameState frame, int site, Subspace ij, double theta);

// Lower a circuit to frame-resolved physical instructions: subspace rotations
// get their axis offset by the accumulated frame phase, virtual-Z gates are
// absorbed, and the residual frame is emitted as trailing diagonal
// corrections.  Before any two-transmon gate the pending frame is flushed as
// explicit corrections.  With alpha = 0 the compiled unitary equals the input
// circuit's unitary up to global phase; with alpha != 0 it does so under the
// precession execution model below.
Circuit compile_with_frames(const Circuit& circuit, FrameState frames,
                            const GateDurations& durations = GateDurations::ibmq_jakarta_like());

// Execution model for compiled circuits: after every (01)-subspace pulse of
// duration d on a qutrit site (including the driven target of a
// ControlledSubspaceX), the hardware frame slips by diag(1, 1, e^{-i alpha d}).
Operator circuit_unitary_with_precession(const Circuit& circuit,
                                         const std::vector<double>& alpha_per_site);

}  // namespace qts
