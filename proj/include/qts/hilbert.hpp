#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qts {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Site ordering convention, fixed project-wide: site 0 is the leftmost ket
// label and the most-significant digit of a computational outcome index.
// For the (c1, c2, t) system on dims (2, 3, 2):  |c1 c2 t> <-> c1*6 + c2*2 + t.
struct MixedRadixSpace {
  std::vector<int> dims;  // per-site dimension, each 2 or 3

  MixedRadixSpace() = default;
  explicit MixedRadixSpace(std::vector<int> d);

  int num_sites() const { return static_cast<int>(dims.size()); }
  int total_dim() const;

  // Decompose a basis index into per-site digits (site 0 first).
  std::vector<int> digits_of(int index) const;
  int index_of(const std::vector<int>& digits) const;
  std::string label_of(int index) const;  // e.g. "102"

  bool operator==(const MixedRadixSpace& other) const { return dims == other.dims; }
};

class Operator {
 public:
  Operator(MixedRadixSpace space, Matrix m);
  static Operator identity(const MixedRadixSpace& space);

  const MixedRadixSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  bool is_unitary(double tol = 1e-10) const;
  bool is_hermitian(double tol = 1e-10) const;
  Operator dagger() const { return Operator(space_, m_.adjoint()); }

  Operator operator*(const Operator& rhs) const;

 private:
  MixedRadixSpace space_;
  Matrix m_;
};

class QuantumState {
 public:
  static QuantumState pure(MixedRadixSpace space, Vector psi);
  static QuantumState density(MixedRadixSpace space, Matrix rho);
  // Computational basis state from per-site digits.
  static QuantumState basis(const MixedRadixSpace& space, const std::vector<int>& digits);

  const MixedRadixSpace& space() const { return space_; }
  bool is_pure() const { return pure_; }
  const Vector& vector() const;
  const Matrix& density_matrix() const;
  Matrix as_density() const;  // |psi><psi| for pure states

 private:
  QuantumState() = default;
  MixedRadixSpace space_;
  bool pure_ = true;
  Vector psi_;
  Matrix rho_;
};

// Kronecker product; result space is the concatenation of the input spaces.
Operator kron(const Operator& a, const Operator& b);

// Embed op on the named sites of a larger space, identity elsewhere.
// Sites may be non-adjacent and in any order; op's dims must match them.
Operator embed(const Operator& op, const std::vector<int>& sites,
               const MixedRadixSpace& space);

// exp(-i * scale * H) via eigendecomposition of the symmetrized Hermitian input.
Operator expm_hermitian(const Operator& h, double scale);

QuantumState apply(const QuantumState& state, const Operator& u);

double expectation(const QuantumState& state, const Operator& obs);

// Probabilities over computational outcomes, indexed per the site-ordering
// convention above.
Eigen::VectorXd born_probabilities(const QuantumState& state);

}  // namespace qts
