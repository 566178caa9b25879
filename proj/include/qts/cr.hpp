#pragma once

#include <vector>

#include "qts/hilbert.hpp"

namespace qts {

// Effective echoed cross-resonance parameters for a (qutrit control, qubit
// target) pair.  Durations are normalized so tau = 1 is the device-calibrated
// CNOT duration, at which the qubit-block conditional rotation reaches pi.
struct CRParams {
  // Per-control-level rotation rate factors; |r0| = |r1| (echo symmetry) and
  // the |2>-level rate is halved.
  double r0 = +1.0;
  double r1 = -1.0;
  double r2 = +0.5;
  // AC-Stark phase accrued by the |2> control level per CNOT duration,
  // Delta-theta = 1.1916 - 0.1083 rad.
  double stark_phase_per_cnot = 1.0833;
  double cnot_duration_ns = 341.0;
  double edge_sigma_ns = 14.08;  // pulse-edge metadata, not used by the model

  void validate() const;
};

// U_ZX(tau): block-diagonal by control level, Rx(r_l * pi * tau) on the target,
// with the Stark phase on |2>.
Operator u_zx(double tau_norm, const CRParams& params = CRParams{});

// <Z_target>(tau) for the target initialized in |0> and the control held at a
// fixed level; equals cos(r_l * pi * tau).
struct ScanPoint {
  double tau_norm;
  double z_expectation;
};
std::vector<ScanPoint> ecr_scan(int control_level, const std::vector<double>& tau_grid,
                                const CRParams& params = CRParams{});

double stark_phase_accumulated(double tau_norm, const CRParams& params = CRParams{});

// Least-squares cosine frequency fit for scan curves: finds w minimizing
// sum (y_i - cos(w x_i))^2 over w in (0, w_max] by grid search plus
// golden-section refinement.
double fit_cosine_frequency(const std::vector<double>& x, const std::vector<double>& y,
                            double w_max);

}  // namespace qts
