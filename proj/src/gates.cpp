#include "qts/gates.hpp"

#include <cmath>

namespace qts {

Matrix pauli2(Axis axis) {
  Matrix m(2, 2);
  switch (axis) {
    case Axis::X: m << 0, 1, 1, 0; break;
    case Axis::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case Axis::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Matrix hadamard2() {
  Matrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

Matrix rotation2(Axis axis, double theta, double axis_phase) {
  const double c = std::cos(theta / 2.0);
  const Complex mis(0, -std::sin(theta / 2.0));
  Matrix m(2, 2);
  switch (axis) {
    case Axis::Z:
      m << std::exp(Complex(0, -theta / 2.0)), 0, 0, std::exp(Complex(0, theta / 2.0));
      return m;
    case Axis::X: {
      const Complex e = std::exp(Complex(0, -axis_phase));
      m << c, mis * e, mis * std::conj(e), c;
      return m;
    }
    case Axis::Y: {
      // y axis rotated by axis_phase: axis angle pi/2 + axis_phase from x.
      const Complex e = std::exp(Complex(0, -(axis_phase + M_PI / 2.0)));
      m << c, mis * e, mis * std::conj(e), c;
      return m;
    }
  }
  throw std::logic_error("rotation2: bad axis");
}

Matrix subspace_rotation_matrix(Axis axis, Subspace ij, double theta,
                                double axis_phase) {
  const int i = (ij == Subspace::S01) ? 0 : 1;
  Matrix m = Matrix::Identity(3, 3);
  m.block(i, i, 2, 2) = rotation2(axis, theta, axis_phase);
  return m;
}

Matrix x_plus() {
  return subspace_rotation_matrix(Axis::Y, Subspace::S01, M_PI) *
         subspace_rotation_matrix(Axis::Y, Subspace::S12, M_PI);
}

Matrix x_minus() {
  return subspace_rotation_matrix(Axis::Y, Subspace::S12, -M_PI) *
         subspace_rotation_matrix(Axis::Y, Subspace::S01, -M_PI);
}

Matrix virtual_z(Subspace ij, double theta) {
  return subspace_rotation_matrix(Axis::Z, ij, theta);
}

Matrix controlled_subspace_x(int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("controlled_subspace_x: sign must be +1 or -1");
  Matrix m = Matrix::Identity(6, 6);
  m.block(3, 3, 3, 3) = subspace_rotation_matrix(Axis::X, Subspace::S01, sign * M_PI);
  return m;
}

Matrix physical_cnot(double stark_phase, double level2_angle, int level2_sign) {
  Matrix m = Matrix::Zero(6, 6);
  m.block(0, 0, 2, 2) = Matrix::Identity(2, 2);
  m.block(2, 2, 2, 2) = pauli2(Axis::X);
  m.block(4, 4, 2, 2) = std::exp(Complex(0, stark_phase)) *
                        rotation2(Axis::X, level2_sign * level2_angle);
  return m;
}

}  // namespace qts
