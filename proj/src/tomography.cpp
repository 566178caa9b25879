#include "qts/tomography.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "json.hpp"

namespace qts {

namespace {

// Sparse single-qubit Pauli: one nonzero per row.
struct SparsePauli1 {
  int col[2];
  Complex val[2];
};

SparsePauli1 sparse_pauli1(int k) {
  const Complex i(0, 1);
  switch (k) {
    case 0: return {{0, 1}, {1, 1}};    // I
    case 1: return {{1, 0}, {1, 1}};    // X
    case 2: return {{1, 0}, {-i, i}};   // Y
    case 3: return {{0, 1}, {1, -1}};   // Z
  }
  throw std::invalid_argument("sparse_pauli1: index out of range");
}

// 3-qubit sparse Pauli, one nonzero per row.
struct SparsePauli {
  std::array<int, kLogicalDim> col;
  std::array<Complex, kLogicalDim> val;
};

std::array<int, kNumQubits> pauli_digits(int index) {
  if (index < 0 || index >= kNumPauli)
    throw std::invalid_argument("pauli index out of range");
  return {(index >> 4) & 3, (index >> 2) & 3, index & 3};
}

SparsePauli sparse_pauli(int index) {
  const auto digits = pauli_digits(index);
  SparsePauli1 p1[kNumQubits];
  for (int s = 0; s < kNumQubits; ++s) p1[s] = sparse_pauli1(digits[s]);
  SparsePauli out;
  for (int row = 0; row < kLogicalDim; ++row) {
    int col = 0;
    Complex v = 1.0;
    for (int s = 0; s < kNumQubits; ++s) {
      const int bit = (row >> (2 - s)) & 1;
      col = col * 2 + p1[s].col[bit];
      v *= p1[s].val[bit];
    }
    out.col[row] = col;
    out.val[row] = v;
  }
  return out;
}

const std::vector<SparsePauli>& pauli_table() {
  static const std::vector<SparsePauli> table = [] {
    std::vector<SparsePauli> t;
    t.reserve(kNumPauli);
    for (int a = 0; a < kNumPauli; ++a) t.push_back(sparse_pauli(a));
    return t;
  }();
  return table;
}

// Bloch rows of the preparation states: rho_p = (1/2) sum_k t1(p,k) sigma_k.
Eigen::Matrix4d prep_bloch_rows() {
  Eigen::Matrix4d t1;
  t1 << 1, 0, 0, 1,    // |0>
        1, 0, 0, -1,   // |1>
        1, 1, 0, 0,    // |+>
        1, 0, 1, 0;    // |+i>
  return t1;
}

int prep_index(const std::array<PrepState, kNumQubits>& prep) {
  int idx = 0;
  for (int s = 0; s < kNumQubits; ++s) idx = idx * 4 + static_cast<int>(prep[s]);
  return idx;
}

int meas_index(const std::array<MeasBasis, kNumQubits>& meas) {
  int idx = 0;
  for (int s = 0; s < kNumQubits; ++s) idx = idx * 3 + static_cast<int>(meas[s]);
  return idx;
}

// Output partial trace of a (input (x) output) Choi matrix.
Matrix trace_out(const Matrix& choi) {
  const int d = kLogicalDim;
  Matrix t = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) t(i, j) += choi(i * d + k, j * d + k);
  return t;
}

Eigen::Vector2cd prep_ket(PrepState p) {
  const double s2 = 1.0 / std::sqrt(2.0);
  switch (p) {
    case PrepState::Zero: return {1.0, 0.0};
    case PrepState::One: return {0.0, 1.0};
    case PrepState::Plus: return {s2, s2};
    case PrepState::PlusI: return {s2, Complex(0.0, s2)};
  }
  throw std::logic_error("prep_ket: bad state");
}

// Measurement effect ket for one site: E = |k><k| with k below, so that
// rotating by the basis-change pulse and measuring Z realizes this basis.
Eigen::Vector2cd meas_ket(MeasBasis m, int bit) {
  const double s2 = 1.0 / std::sqrt(2.0);
  switch (m) {
    case MeasBasis::X: return bit ? Eigen::Vector2cd(s2, -s2) : Eigen::Vector2cd(s2, s2);
    case MeasBasis::Y:
      return bit ? Eigen::Vector2cd(s2, Complex(0.0, -s2))
                 : Eigen::Vector2cd(s2, Complex(0.0, s2));
    case MeasBasis::Z:
      return bit ? Eigen::Vector2cd(0.0, 1.0) : Eigen::Vector2cd(1.0, 0.0);
  }
  throw std::logic_error("meas_ket: bad basis");
}

// Rows are a^dag for the rank-one effects |a><a| = rho^T (x) E of every
// (setting, outcome) pair, flattened setting-major: p_i = (A J A^dag)(i, i).
const Matrix& effect_rows() {
  static const Matrix table = [] {
    const auto settings = qpt_settings();
    Matrix a(kNumSettings * kLogicalDim, kNumPauli);
    for (int i = 0; i < kNumSettings; ++i) {
      Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
      for (int s = 0; s < kNumQubits; ++s)
        psi = Eigen::kroneckerProduct(psi, prep_ket(settings[i].prep[s])).eval();
      for (int out = 0; out < kLogicalDim; ++out) {
        Eigen::VectorXcd phi = Eigen::VectorXcd::Ones(1);
        for (int s = 0; s < kNumQubits; ++s)
          phi = Eigen::kroneckerProduct(phi, meas_ket(settings[i].meas[s],
                                                      (out >> (2 - s)) & 1))
                    .eval();
        const Eigen::VectorXcd vec =
            Eigen::kroneckerProduct(psi.conjugate(), phi).eval();
        a.row(i * kLogicalDim + out) = vec.adjoint();
      }
    }
    return a;
  }();
  return table;
}

}  // namespace

std::string prep_label(PrepState p) {
  switch (p) {
    case PrepState::Zero: return "0";
    case PrepState::One: return "1";
    case PrepState::Plus: return "+";
    case PrepState::PlusI: return "+i";
  }
  throw std::logic_error("prep_label: bad state");
}

std::string meas_label(MeasBasis m) {
  switch (m) {
    case MeasBasis::X: return "x";
    case MeasBasis::Y: return "y";
    case MeasBasis::Z: return "z";
  }
  throw std::logic_error("meas_label: bad basis");
}

PrepState prep_from_label(const std::string& s) {
  for (PrepState p : {PrepState::Zero, PrepState::One, PrepState::Plus, PrepState::PlusI})
    if (s == prep_label(p)) return p;
  throw std::invalid_argument("unknown preparation label: " + s);
}

MeasBasis meas_from_label(const std::string& s) {
  for (MeasBasis m : {MeasBasis::X, MeasBasis::Y, MeasBasis::Z})
    if (s == meas_label(m)) return m;
  throw std::invalid_argument("unknown measurement label: " + s);
}

std::vector<TomographySetting> qpt_settings() {
  std::vector<TomographySetting> out;
  out.reserve(kNumSettings);
  const PrepState preps[4] = {PrepState::Zero, PrepState::One, PrepState::Plus,
                              PrepState::PlusI};
  const MeasBasis bases[3] = {MeasBasis::X, MeasBasis::Y, MeasBasis::Z};
  for (int p = 0; p < 64; ++p)
    for (int m = 0; m < 27; ++m) {
      TomographySetting s;
      for (int site = 0; site < kNumQubits; ++site) {
        s.prep[site] = preps[(p / (site == 0 ? 16 : site == 1 ? 4 : 1)) % 4];
        s.meas[site] = bases[(m / (site == 0 ? 9 : site == 1 ? 3 : 1)) % 3];
      }
      out.push_back(s);
    }
  return out;
}

int setting_index(const TomographySetting& s) {
  return prep_index(s.prep) * 27 + meas_index(s.meas);
}

Matrix pauli_matrix(int index) {
  const SparsePauli p = sparse_pauli(index);
  Matrix m = Matrix::Zero(kLogicalDim, kLogicalDim);
  for (int row = 0; row < kLogicalDim; ++row) m(row, p.col[row]) = p.val[row];
  return m;
}

Eigen::MatrixXd ptm_of_unitary(const Matrix& u) {
  if (u.rows() != kLogicalDim || u.cols() != kLogicalDim)
    throw std::invalid_argument("ptm_of_unitary: expected an 8x8 matrix");
  Eigen::MatrixXd r(kNumPauli, kNumPauli);
  const auto& paulis = pauli_table();
  for (int b = 0; b < kNumPauli; ++b) {
    Matrix pb = Matrix::Zero(kLogicalDim, kLogicalDim);
    for (int row = 0; row < kLogicalDim; ++row)
      pb(row, paulis[b].col[row]) = paulis[b].val[row];
    const Matrix conj = u * pb * u.adjoint();
    for (int a = 0; a < kNumPauli; ++a) {
      Complex tr = 0;
      for (int row = 0; row < kLogicalDim; ++row)
        tr += paulis[a].val[row] * conj(paulis[a].col[row], row);
      r(a, b) = tr.real() / kLogicalDim;
    }
  }
  return r;
}

Matrix choi_of_unitary(const Matrix& u) {
  if (u.rows() != kLogicalDim || u.cols() != kLogicalDim)
    throw std::invalid_argument("choi_of_unitary: expected an 8x8 matrix");
  const int d = kLogicalDim;
  Matrix j(d * d, d * d);
  for (int jin = 0; jin < d; ++jin)
    for (int o = 0; o < d; ++o)
      for (int kin = 0; kin < d; ++kin)
        for (int op = 0; op < d; ++op)
          j(jin * d + o, kin * d + op) = u(o, jin) * std::conj(u(op, kin));
  return j;
}

Matrix choi_from_ptm(const Eigen::MatrixXd& ptm) {
  if (ptm.rows() != kNumPauli || ptm.cols() != kNumPauli)
    throw std::invalid_argument("choi_from_ptm: expected 64x64");
  const int d = kLogicalDim;
  Matrix j = Matrix::Zero(d * d, d * d);
  const auto& paulis = pauli_table();
  for (int a = 0; a < kNumPauli; ++a)
    for (int b = 0; b < kNumPauli; ++b) {
      const double r = ptm(a, b);
      if (std::abs(r) < 1e-15) continue;
      const SparsePauli& pa = paulis[a];
      const SparsePauli& pb = paulis[b];
      // P_b^T (x) P_a with P_b^T(i, col) nonzero at row col of P_b.
      for (int ib = 0; ib < d; ++ib)
        for (int ia = 0; ia < d; ++ia)
          j(pb.col[ib] * d + ia, ib * d + pa.col[ia]) +=
              (r / d) * pb.val[ib] * pa.val[ia];
    }
  return j;
}

Eigen::MatrixXd ptm_from_choi(const Matrix& choi) {
  if (choi.rows() != kNumPauli || choi.cols() != kNumPauli)
    throw std::invalid_argument("ptm_from_choi: expected 64x64");
  const int d = kLogicalDim;
  Eigen::MatrixXd r(kNumPauli, kNumPauli);
  const auto& paulis = pauli_table();
  for (int a = 0; a < kNumPauli; ++a)
    for (int b = 0; b < kNumPauli; ++b) {
      // Tr[J (P_b^T (x) P_a)] = sum J(row, col) (P_b^T (x) P_a)(col, row).
      Complex tr = 0;
      const SparsePauli& pa = paulis[a];
      const SparsePauli& pb = paulis[b];
      for (int ib = 0; ib < d; ++ib)
        for (int ia = 0; ia < d; ++ia)
          tr += choi(ib * d + pa.col[ia], pb.col[ib] * d + ia) * pb.val[ib] * pa.val[ia];
      r(a, b) = tr.real() / d;
    }
  return r;
}

double choi_probability(const Matrix& choi, const Matrix& rho, const Matrix& effect) {
  const int d = kLogicalDim;
  if (choi.rows() != d * d || rho.rows() != d || effect.rows() != d)
    throw std::invalid_argument("choi_probability: dimension mismatch");
  Complex p = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          p += choi(i * d + k, j * d + l) * rho(i, j) * effect(l, k);
  return p.real();
}

REMCalibration rem_calibrate(const CalibrationExecutor& executor) {
  std::array<double, kNumQubits> p00{}, p11{};
  for (int level : {0, 1}) {
    std::array<int, kNumQubits> state;
    state.fill(level);
    const ShotResult res = executor(state);
    if (res.shots <= 0) throw std::invalid_argument("rem_calibrate: zero shots");
    for (int s = 0; s < kNumQubits; ++s) {
      long correct = 0;
      for (const auto& [label, count] : res.counts) {
        if (static_cast<int>(label.size()) != kNumQubits)
          throw std::invalid_argument("rem_calibrate: bad outcome label " + label);
        if (label[s] == static_cast<char>('0' + level)) correct += count;
      }
      const double frac = static_cast<double>(correct) / res.shots;
      (level == 0 ? p00[s] : p11[s]) = frac;
    }
  }
  REMCalibration cal;
  for (int s = 0; s < kNumQubits; ++s) {
    if (p00[s] + p11[s] <= 1.0 + 1e-12)
      throw std::invalid_argument("rem_calibrate: confusion matrix not diagonally dominant");
    cal.site.push_back(ConfusionMatrix::qubit(p00[s], p11[s]));
  }
  return cal;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / (i + 1);
    if (u[i] - t > 0) {
      rho = i + 1;
      tau = t;
    }
  }
  (void)rho;
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out(i) = std::max(v(i) - tau, 0.0);
  return out;
}

Eigen::VectorXd rem_apply(const Eigen::VectorXd& dist, const REMCalibration& cal) {
  if (dist.size() != kLogicalDim)
    throw std::invalid_argument("rem_apply: expected 8 outcomes");
  if (static_cast<int>(cal.site.size()) != kNumQubits)
    throw std::invalid_argument("rem_apply: expected 3 site calibrations");
  Eigen::VectorXd cur = dist;
  for (int s = 0; s < kNumQubits; ++s) {
    const Eigen::Matrix2d m = cal.site[s].m;
    const double det = m.determinant();
    if (std::abs(det) < 1e-12)
      throw std::invalid_argument("rem_apply: singular confusion matrix");
    const Eigen::Matrix2d inv = m.inverse();
    const int stride = 1 << (2 - s);
    Eigen::VectorXd next = Eigen::VectorXd::Zero(kLogicalDim);
    for (int base = 0; base < kLogicalDim; base += 2 * stride)
      for (int off = 0; off < stride; ++off)
        for (int i = 0; i < 2; ++i)
          next(base + i * stride + off) = inv(i, 0) * cur(base + off) +
                                          inv(i, 1) * cur(base + stride + off);
    cur = std::move(next);
  }
  return project_to_simplex(cur);
}

Matrix cptp_project(Matrix j, int* iterations, double tol, int max_iters) {
  const int d = kLogicalDim;
  if (j.rows() != d * d || j.cols() != d * d)
    throw std::invalid_argument("cptp_project: expected a 64x64 matrix");
  // Alternating projections onto the PSD cone and the TP affine subspace,
  // with Dykstra's correction on the cone step so the iteration converges to
  // the Frobenius-closest CPTP point rather than an arbitrary feasible one.
  // Each sweep projects onto the TP affine subspace first and ends on the PSD
  // clip, so the returned matrix is PSD to solver precision and TP within the
  // step tolerance.
  Matrix correction = Matrix::Zero(d * d, d * d);
  int it = 0;
  for (; it < max_iters; ++it) {
    const Matrix prev = j;
    Matrix tp = j;
    const Matrix delta = Matrix::Identity(d, d) - trace_out(j);
    for (int i = 0; i < d; ++i)
      for (int jj = 0; jj < d; ++jj)
        for (int k = 0; k < d; ++k)
          tp(i * d + k, jj * d + k) += delta(i, jj) / static_cast<double>(d);
    const Matrix shifted = 0.5 * (tp + Matrix(tp.adjoint())) + correction;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(shifted);
    Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    j = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
    j = 0.5 * (j + Matrix(j.adjoint()));
    correction = shifted - j;
    if ((j - prev).norm() < tol) {
      ++it;
      break;
    }
  }
  // Finish with an exact TP step, then absorb the (step-sized) residual
  // negative part with an infinitesimal depolarizing admixture, which keeps
  // the partial trace exact.  Both constraints then hold to solver precision.
  {
    const Matrix delta = Matrix::Identity(d, d) - trace_out(j);
    for (int i = 0; i < d; ++i)
      for (int jj = 0; jj < d; ++jj)
        for (int k = 0; k < d; ++k)
          j(i * d + k, jj * d + k) += delta(i, jj) / static_cast<double>(d);
    j = 0.5 * (j + Matrix(j.adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(j);
    const double neg = std::max(0.0, -eig.eigenvalues().minCoeff());
    if (neg > 0.0) {
      const double lam = std::min(1.0, 1.000001 * d * neg / (1.0 + d * neg));
      j = (1.0 - lam) * j +
          lam * Matrix::Identity(d * d, d * d) / static_cast<double>(d);
    }
  }
  if (iterations) *iterations = it;
  return j;
}

ProcessEstimate reconstruct_process(const std::vector<SettingResult>& data,
                                    const REMCalibration* rem,
                                    bool likelihood_refinement) {
  if (static_cast<int>(data.size()) != kNumSettings)
    throw std::invalid_argument("reconstruct_process: expected 1728 settings");
  std::vector<const SettingResult*> by_index(kNumSettings, nullptr);
  for (const auto& rec : data) {
    const int idx = setting_index(rec.setting);
    if (by_index[idx]) throw std::invalid_argument("reconstruct_process: duplicate setting");
    if (rec.probs.size() != kLogicalDim)
      throw std::invalid_argument("reconstruct_process: bad distribution length");
    by_index[idx] = &rec;
  }

  // Per-setting distributions, optionally mitigated.
  std::vector<Eigen::VectorXd> q(kNumSettings);
  for (int i = 0; i < kNumSettings; ++i) {
    q[i] = rem ? rem_apply(by_index[i]->probs, *rem) : by_index[i]->probs;
  }

  // E(a, p) = Tr[P_a Lambda(rho_p)], averaged over compatible measurement
  // settings; identity sites contribute eigenvalue +1.
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(kNumPauli, kNumPauli);
  for (int a = 0; a < kNumPauli; ++a) {
    const auto digits = pauli_digits(a);
    std::vector<int> compatible;
    for (int m = 0; m < 27; ++m) {
      bool ok = true;
      for (int s = 0; s < kNumQubits; ++s) {
        const int ms = (m / (s == 0 ? 9 : s == 1 ? 3 : 1)) % 3;
        if (digits[s] != 0 && ms != digits[s] - 1) ok = false;
      }
      if (ok) compatible.push_back(m);
    }
    for (int p = 0; p < 64; ++p) {
      double acc = 0.0;
      for (int m : compatible) {
        const Eigen::VectorXd& probs = q[p * 27 + m];
        for (int out = 0; out < kLogicalDim; ++out) {
          double sign = 1.0;
          for (int s = 0; s < kNumQubits; ++s) {
            if (digits[s] == 0) continue;
            if ((out >> (2 - s)) & 1) sign = -sign;
          }
          acc += sign * probs(out);
        }
      }
      e(a, p) = acc / static_cast<double>(compatible.size());
    }
  }

  // E = R T^T with T(p, b) = prod_s t1(p_s, b_s)  (rho_p = 2^-3 sum_b T(p,b) P_b,
  // so Tr[P_a Lambda(rho_p)] = (d/8) sum_b R(a,b) T(p,b) and d = 8).
  const Eigen::Matrix4d t1 = prep_bloch_rows();
  Eigen::MatrixXd t(kNumPauli, kNumPauli);
  for (int p = 0; p < 64; ++p)
    for (int b = 0; b < kNumPauli; ++b) {
      double v = 1.0;
      for (int s = 0; s < kNumQubits; ++s) {
        const int ps = (p >> (2 * (2 - s))) & 3;
        const int bs = (b >> (2 * (2 - s))) & 3;
        v *= t1(ps, bs);
      }
      t(p, b) = v;
    }
  const Eigen::MatrixXd r_lin =
      t.partialPivLu().solve(e.transpose()).transpose();

  Matrix j = choi_from_ptm(r_lin);
  j = 0.5 * (j + Matrix(j.adjoint()));

  const int d = kLogicalDim;
  const int max_iters = 10000;
  ProcessEstimate est;
  j = cptp_project(j, &est.iterations);
  est.converged = est.iterations < max_iters;

  // The Frobenius projection is biased low for noisy data, since clipping the
  // (many, tiny) negative eigenvalues of the linear estimate shrinks the
  // signal eigenvalues too.  Descend the multinomial negative log-likelihood
  // over the CPTP set to undo that: projected gradient with backtracking line
  // search, using the projection above as the feasibility oracle.  Exact input
  // probabilities already minimize the objective, so this stage only moves the
  // estimate when shot noise (or mitigation) made the data inconsistent.
  if (likelihood_refinement) {
    const Matrix& a = effect_rows();  // rows a^dag of the rank-one effects
    // Fit the *raw* distributions, folding the calibrated confusion into the
    // model instead of un-folding it from the data: measured-outcome
    // probabilities per setting are p_meas = C p_true with p_true(out) =
    // <a|J|a>, so the likelihood sees the actual multinomial statistics.
    Eigen::MatrixXd cfull = Eigen::MatrixXd::Identity(1, 1);
    if (rem)
      for (int s = 0; s < kNumQubits; ++s)
        cfull = Eigen::kroneckerProduct(cfull, rem->site[s].m).eval();
    else
      cfull = Eigen::MatrixXd::Identity(kLogicalDim, kLogicalDim);
    // Rows = settings, columns = outcomes.
    Eigen::MatrixXd w(kNumSettings, kLogicalDim);
    for (int i = 0; i < kNumSettings; ++i)
      w.row(i) = by_index[i]->probs.cwiseMax(0.0).transpose();
    const double floor = 1e-12;
    const auto model_probs = [&](const Matrix& jj) {
      Eigen::VectorXd flat =
          ((a * jj).cwiseProduct(a.conjugate())).rowwise().sum().real();
      Eigen::MatrixXd p_true =
          Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>(flat.data(), kNumSettings,
                                                     kLogicalDim);
      return (p_true * cfull.transpose()).cwiseMax(floor).eval();
    };
    const auto neg_log_lik = [&](const Eigen::MatrixXd& p) {
      double f = 0.0;
      for (int i = 0; i < w.size(); ++i)
        if (w(i) > 0.0) f -= w(i) * std::log(p(i));
      return f;
    };
    Eigen::MatrixXd p = model_probs(j);
    double f = neg_log_lik(p);
    double eta = 1.0;
    const int max_outer = 40;
    bool moved = false;
    for (int outer = 0; outer < max_outer; ++outer) {
      // grad = -sum_i (w_i / p_meas_i) dp_meas_i/dJ; chain through C gives
      // per-true-outcome coefficients C^T (w ./ p_meas), one row per setting.
      const Eigen::MatrixXd ratio =
          (w.array() > 0.0).select(w.array() / p.array(), 0.0);
      const Eigen::MatrixXd coeff_rows = ratio * cfull;  // = (C^T u)^T rowwise
      Eigen::VectorXd coeff(kNumSettings * kLogicalDim);
      for (int i = 0; i < kNumSettings; ++i)
        coeff.segment(i * kLogicalDim, kLogicalDim) = -coeff_rows.row(i).transpose();
      const Matrix grad = a.adjoint() * coeff.asDiagonal() * a;
      if (outer == 0) eta = 1.0 / std::max(grad.norm(), 1e-12);
      bool accepted = false;
      for (int bt = 0; bt < 25; ++bt) {
        const Matrix cand = cptp_project(j - eta * grad, nullptr, 1e-6, 2000);
        const Eigen::MatrixXd pc = model_probs(cand);
        const double fc = neg_log_lik(pc);
        if (fc < f) {
          const double drop = f - fc;
          j = cand;
          p = pc;
          f = fc;
          eta *= 1.5;
          accepted = true;
          moved = true;
          if (drop < 1e-8 * std::abs(f)) outer = max_outer;  // converged
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) break;
    }
    // The line-search projections ran at a loosened tolerance; restore the
    // tight feasibility residuals on the final point.
    if (moved) j = cptp_project(j);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(j);
  est.cp_residual = std::max(0.0, -eig.eigenvalues().minCoeff());
  est.tp_residual = (trace_out(j) - Matrix::Identity(d, d)).norm();
  est.choi = j;
  est.ptm = ptm_from_choi(j);
  return est;
}

double process_fidelity(const Matrix& choi_est, const Matrix& choi_ideal) {
  if (choi_est.rows() != kNumPauli || choi_ideal.rows() != kNumPauli)
    throw std::invalid_argument("process_fidelity: expected 64x64 Choi matrices");
  const double f = (choi_est * choi_ideal).trace().real() /
                   (kLogicalDim * kLogicalDim);
  return std::clamp(f, 0.0, 1.0);
}

double avg_gate_fidelity(const ProcessEstimate& est, const Operator& ideal) {
  if (ideal.dim() != kLogicalDim)
    throw std::invalid_argument("avg_gate_fidelity: ideal must be 8-dimensional");
  if (!ideal.is_unitary())
    throw std::invalid_argument("avg_gate_fidelity: ideal must be unitary");
  const double f_pro = process_fidelity(est.choi, choi_of_unitary(ideal.matrix()));
  return (kLogicalDim * f_pro + 1.0) / (kLogicalDim + 1.0);
}

Eigen::MatrixXd ptm_difference(const ProcessEstimate& est, const Operator& ideal) {
  if (ideal.dim() != kLogicalDim)
    throw std::invalid_argument("ptm_difference: ideal must be 8-dimensional");
  return est.ptm - ptm_of_unitary(ideal.matrix());
}

Eigen::VectorXd logical_distribution(const ShotResult& counts) {
  if (counts.shots <= 0) throw std::invalid_argument("logical_distribution: zero shots");
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(kLogicalDim);
  for (const auto& [label, count] : counts.counts) {
    if (static_cast<int>(label.size()) != kNumQubits)
      throw std::invalid_argument("logical_distribution: bad label " + label);
    bool leaked = false;
    int idx = 0;
    for (char c : label) {
      if (c == '2') leaked = true;
      idx = idx * 2 + std::min(c - '0', 1);
    }
    if (leaked) continue;  // leakage discarded against the full denominator
    dist(idx) += static_cast<double>(count) / counts.shots;
  }
  return dist;
}

double truth_table_fidelity(const TruthTableExecutor& executor,
                            const REMCalibration* rem) {
  double acc = 0.0;
  for (int input = 0; input < kLogicalDim; ++input) {
    const std::array<int, kNumQubits> bits = {(input >> 2) & 1, (input >> 1) & 1,
                                              input & 1};
    const ShotResult res = executor(bits);
    if (res.shots <= 0) throw std::invalid_argument("truth_table_fidelity: zero shots");
    Eigen::VectorXd dist = logical_distribution(res);
    if (rem) dist = rem_apply(dist, *rem);
    const int ideal = (bits[0] << 2) | (bits[1] << 1) | (bits[2] ^ (bits[0] & bits[1]));
    acc += dist(ideal);
  }
  return acc / kLogicalDim;
}

std::string qpt_dataset_to_json(const std::vector<SettingCounts>& data) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& rec : data) {
    nlohmann::json ji;
    for (int s = 0; s < kNumQubits; ++s) {
      ji["prep"].push_back(prep_label(rec.setting.prep[s]));
      ji["meas"].push_back(meas_label(rec.setting.meas[s]));
    }
    ji["shots"] = rec.result.shots;
    ji["counts"] = rec.result.counts;
    j.push_back(std::move(ji));
  }
  return j.dump();
}

std::vector<SettingCounts> qpt_dataset_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  std::vector<SettingCounts> out;
  out.reserve(j.size());
  for (const auto& ji : j) {
    SettingCounts rec;
    for (int s = 0; s < kNumQubits; ++s) {
      rec.setting.prep[s] = prep_from_label(ji.at("prep").at(s).get<std::string>());
      rec.setting.meas[s] = meas_from_label(ji.at("meas").at(s).get<std::string>());
    }
    rec.result.shots = ji.at("shots").get<long>();
    rec.result.counts = ji.at("counts").get<std::map<std::string, long>>();
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SettingResult> to_setting_results(const std::vector<SettingCounts>& data) {
  std::vector<SettingResult> out;
  out.reserve(data.size());
  for (const auto& rec : data)
    out.push_back({rec.setting, logical_distribution(rec.result)});
  return out;
}

}  // namespace qts
