#include "qts/hilbert.hpp"

#include <cmath>

namespace qts {

namespace {
constexpr double kStateTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kHermTol = 1e-10;
}  // namespace

MixedRadixSpace::MixedRadixSpace(std::vector<int> d) : dims(std::move(d)) {
  if (dims.empty()) throw std::invalid_argument("MixedRadixSpace: dims must be non-empty");
  for (int x : dims) {
    if (x != 2 && x != 3)
      throw std::invalid_argument("MixedRadixSpace: site dimension must be 2 or 3");
  }
}

int MixedRadixSpace::total_dim() const {
  int d = 1;
  for (int x : dims) d *= x;
  return d;
}

std::vector<int> MixedRadixSpace::digits_of(int index) const {
  std::vector<int> out(dims.size());
  for (int s = num_sites() - 1; s >= 0; --s) {
    out[s] = index % dims[s];
    index /= dims[s];
  }
  return out;
}

int MixedRadixSpace::index_of(const std::vector<int>& digits) const {
  if (static_cast<int>(digits.size()) != num_sites())
    throw std::invalid_argument("index_of: digit count mismatch");
  int idx = 0;
  for (int s = 0; s < num_sites(); ++s) {
    if (digits[s] < 0 || digits[s] >= dims[s])
      throw std::invalid_argument("index_of: digit out of range");
    idx = idx * dims[s] + digits[s];
  }
  return idx;
}

std::string MixedRadixSpace::label_of(int index) const {
  std::string s;
  for (int d : digits_of(index)) s += static_cast<char>('0' + d);
  return s;
}

Operator::Operator(MixedRadixSpace space, Matrix m)
    : space_(std::move(space)), m_(std::move(m)) {
  const int d = space_.total_dim();
  if (m_.rows() != d || m_.cols() != d)
    throw std::invalid_argument("Operator: matrix does not match space dimension");
}

Operator Operator::identity(const MixedRadixSpace& space) {
  const int d = space.total_dim();
  return Operator(space, Matrix::Identity(d, d));
}

bool Operator::is_unitary(double tol) const {
  const Matrix g = m_.adjoint() * m_;
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool Operator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator Operator::operator*(const Operator& rhs) const {
  if (!(space_ == rhs.space_))
    throw std::invalid_argument("Operator product: space mismatch");
  return Operator(space_, m_ * rhs.m_);
}

QuantumState QuantumState::pure(MixedRadixSpace space, Vector psi) {
  if (psi.size() != space.total_dim())
    throw std::invalid_argument("QuantumState: vector length mismatch");
  if (std::abs(psi.norm() - 1.0) > kStateTol)
    throw std::invalid_argument("QuantumState: pure vector must have unit norm");
  QuantumState st;
  st.space_ = std::move(space);
  st.pure_ = true;
  st.psi_ = std::move(psi);
  return st;
}

QuantumState QuantumState::density(MixedRadixSpace space, Matrix rho) {
  const int d = space.total_dim();
  if (rho.rows() != d || rho.cols() != d)
    throw std::invalid_argument("QuantumState: density matrix dimension mismatch");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
    throw std::invalid_argument("QuantumState: density matrix not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > kStateTol)
    throw std::invalid_argument("QuantumState: density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("QuantumState: density matrix not positive semidefinite");
  QuantumState st;
  st.space_ = std::move(space);
  st.pure_ = false;
  st.rho_ = std::move(rho);
  return st;
}

QuantumState QuantumState::basis(const MixedRadixSpace& space,
                                 const std::vector<int>& digits) {
  Vector psi = Vector::Zero(space.total_dim());
  psi(space.index_of(digits)) = 1.0;
  return pure(space, std::move(psi));
}

const Vector& QuantumState::vector() const {
  if (!pure_) throw std::logic_error("QuantumState: not a pure state");
  return psi_;
}

const Matrix& QuantumState::density_matrix() const {
  if (pure_) throw std::logic_error("QuantumState: pure state, use as_density()");
  return rho_;
}

Matrix QuantumState::as_density() const {
  if (pure_) return psi_ * psi_.adjoint();
  return rho_;
}

Operator kron(const Operator& a, const Operator& b) {
  std::vector<int> dims = a.space().dims;
  dims.insert(dims.end(), b.space().dims.begin(), b.space().dims.end());
  const int da = a.dim(), db = b.dim();
  Matrix out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return Operator(MixedRadixSpace(dims), std::move(out));
}

Operator embed(const Operator& op, const std::vector<int>& sites,
               const MixedRadixSpace& space) {
  const int n = space.num_sites();
  std::vector<bool> seen(n, false);
  for (int s : sites) {
    if (s < 0 || s >= n) throw std::invalid_argument("embed: site out of range");
    if (seen[s]) throw std::invalid_argument("embed: duplicate site");
    seen[s] = true;
  }
  if (static_cast<int>(sites.size()) != op.space().num_sites())
    throw std::invalid_argument("embed: site count mismatch");
  for (size_t k = 0; k < sites.size(); ++k) {
    if (op.space().dims[k] != space.dims[sites[k]])
      throw std::invalid_argument("embed: site dimension mismatch");
  }

  const int D = space.total_dim();
  const int dop = op.dim();
  Matrix out = Matrix::Zero(D, D);
  const MixedRadixSpace& osp = op.space();
  for (int col = 0; col < D; ++col) {
    std::vector<int> cdig = space.digits_of(col);
    std::vector<int> csub(sites.size());
    for (size_t k = 0; k < sites.size(); ++k) csub[k] = cdig[sites[k]];
    const int colsub = osp.index_of(csub);
    for (int rsub = 0; rsub < dop; ++rsub) {
      const Complex v = op.matrix()(rsub, colsub);
      if (v == Complex(0, 0)) continue;
      std::vector<int> rdig = cdig;
      std::vector<int> rs = osp.digits_of(rsub);
      for (size_t k = 0; k < sites.size(); ++k) rdig[sites[k]] = rs[k];
      out(space.index_of(rdig), col) = v;
    }
  }
  return Operator(space, std::move(out));
}

Operator expm_hermitian(const Operator& h, double scale) {
  if (!h.is_hermitian(kHermTol))
    throw std::invalid_argument("expm_hermitian: input not Hermitian");
  // Symmetrize to absorb numerical drift from repeated products.
  const Matrix hs = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(hs);
  const auto& lam = es.eigenvalues();
  Vector ph(lam.size());
  for (int i = 0; i < lam.size(); ++i)
    ph(i) = std::exp(Complex(0, -scale * lam(i)));
  Matrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  return Operator(h.space(), std::move(u));
}

QuantumState apply(const QuantumState& state, const Operator& u) {
  if (!(state.space() == u.space()))
    throw std::invalid_argument("apply: space mismatch");
  if (state.is_pure()) {
    Vector psi = u.matrix() * state.vector();
    psi /= psi.norm();  // guard rounding; unitary inputs keep this at 1
    return QuantumState::pure(state.space(), std::move(psi));
  }
  Matrix rho = u.matrix() * state.density_matrix() * u.matrix().adjoint();
  rho = 0.5 * (rho + Matrix(rho.adjoint()));
  rho /= rho.trace().real();
  return QuantumState::density(state.space(), std::move(rho));
}

double expectation(const QuantumState& state, const Operator& obs) {
  if (!(state.space() == obs.space()))
    throw std::invalid_argument("expectation: space mismatch");
  if (!obs.is_hermitian(kHermTol))
    throw std::invalid_argument("expectation: observable not Hermitian");
  if (state.is_pure())
    return (state.vector().adjoint() * obs.matrix() * state.vector())(0).real();
  return (obs.matrix() * state.density_matrix()).trace().real();
}

Eigen::VectorXd born_probabilities(const QuantumState& state) {
  const int d = state.space().total_dim();
  Eigen::VectorXd p(d);
  if (state.is_pure()) {
    for (int i = 0; i < d; ++i) p(i) = std::norm(state.vector()(i));
  } else {
    for (int i = 0; i < d; ++i) p(i) = state.density_matrix()(i, i).real();
  }
  // Clip rounding noise; renormalize to keep the sum at exactly 1.
  for (int i = 0; i < d; ++i) p(i) = std::max(p(i), 0.0);
  p /= p.sum();
  return p;
}

}  // namespace qts
