#pragma once

#include "qts/hilbert.hpp"

namespace qts {

enum class Axis { X, Y, Z };

// Drivable qutrit subspaces: only adjacent level pairs have physical pulses.
enum class Subspace { S01, S12 };

// 2x2 rotation exp(-i theta/2 sigma_axis), with the rotation axis optionally
// rotated by axis_phase in the x-y plane (z rotations ignore axis_phase).
Matrix rotation2(Axis axis, double theta, double axis_phase = 0.0);

// 3x3 subspace rotation: rotation2 on the {|i>,|j>} block, identity elsewhere.
Matrix subspace_rotation_matrix(Axis axis, Subspace ij, double theta,
                                double axis_phase = 0.0);

// Cyclic level permutations composed from two subspace pi-rotations.
// X+ = Ry01(pi) Ry12(pi), X- = Ry12(-pi) Ry01(-pi); the Ry(pi) signs cancel so
// both are exact permutation matrices with all +1 entries.
Matrix x_plus();
Matrix x_minus();

// Zero-duration diagonal phase gate, equal to subspace_rotation_matrix(Z, ij, theta).
Matrix virtual_z(Subspace ij, double theta);

// Two-transmon gate on a (qubit control, qutrit target) pair: identity on
// control |0>, Rx01(sign*pi) on the target for control |1>.  Rx(pi) carries a
// -i factor on the (01) block, which does not reduce to a global phase in the
// qutrit space.
Matrix controlled_subspace_x(int sign);

// Device-calibrated CNOT on a (qutrit control, qubit target) pair, modeled at
// gate level: control level 0 -> identity, level 1 -> exact X, level 2 ->
// Rx(level2_angle) on the target plus the AC-Stark phase e^{i stark_phase} on
// the |2> control level.
Matrix physical_cnot(double stark_phase, double level2_angle = M_PI / 2.0,
                     int level2_sign = +1);

// Common fixed matrices.
Matrix pauli2(Axis axis);
Matrix hadamard2();

}  // namespace qts
