#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qts/hilbert.hpp"
#include "qts/noise.hpp"

namespace qts {

// All tomography operates on the 3-qubit logical space.
inline constexpr int kNumQubits = 3;
inline constexpr int kLogicalDim = 8;    // d
inline constexpr int kNumPauli = 64;     // d^2
inline constexpr int kNumSettings = 1728;

enum class PrepState { Zero, One, Plus, PlusI };  // |0>, |1>, (|0>+|1>)/s2, (|0>+i|1>)/s2
enum class MeasBasis { X, Y, Z };

std::string prep_label(PrepState p);
std::string meas_label(MeasBasis m);
PrepState prep_from_label(const std::string& s);
MeasBasis meas_from_label(const std::string& s);

struct TomographySetting {
  std::array<PrepState, kNumQubits> prep;
  std::array<MeasBasis, kNumQubits> meas;
};

// Deterministic enumeration: prep-major lexicographic, site 0 most significant,
// preps ordered (|0>, |1>, |+>, |+i>), bases ordered (X, Y, Z).
std::vector<TomographySetting> qpt_settings();
int setting_index(const TomographySetting& s);

// Per-setting outcome distribution over the 8 logical outcomes (site-0-major
// bit order).  May be sub-normalized when leakage outcomes were discarded;
// the lost mass surfaces as a trace-preservation residual.
struct SettingResult {
  TomographySetting setting;
  Eigen::VectorXd probs;
};

struct ProcessEstimate {
  Matrix choi;          // 64x64, (input (x) output) factor order, trace d
  Eigen::MatrixXd ptm;  // 64x64, after the CPTP projection
  double cp_residual = 0.0;  // |most negative eigenvalue| before final clip
  double tp_residual = 0.0;  // Frobenius deviation of the output partial trace from I
  bool converged = true;
  int iterations = 0;
};

// n-qubit Pauli with base-4 digits (I, X, Y, Z), site 0 most significant.
Matrix pauli_matrix(int index);

Eigen::MatrixXd ptm_of_unitary(const Matrix& u);  // R_ab = Tr[P_a U P_b U^dag]/d
Matrix choi_of_unitary(const Matrix& u);          // sum_jk |j><k| (x) U|j><k|U^dag
Matrix choi_from_ptm(const Eigen::MatrixXd& ptm);
Eigen::MatrixXd ptm_from_choi(const Matrix& choi);

// p(outcome) = Tr[choi (rho^T (x) E)] for a channel given by its Choi matrix.
double choi_probability(const Matrix& choi, const Matrix& rho, const Matrix& effect);

struct REMCalibration {
  std::vector<ConfusionMatrix> site;  // one 2x2 per qubit
};

// Tensor-product readout calibration from the all-|0> and all-|1> preparations.
// The executor measures the named classical state and returns counts.
using CalibrationExecutor =
    std::function<ShotResult(const std::array<int, kNumQubits>& classical_state)>;
REMCalibration rem_calibrate(const CalibrationExecutor& executor);

// Left-multiply by the inverse confusion tensor, then project the result onto
// the probability simplex (Euclidean projection).
Eigen::VectorXd rem_apply(const Eigen::VectorXd& dist, const REMCalibration& cal);

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

// Projection of a Hermitian matrix onto the CPTP set by alternating PSD
// eigenvalue clipping and trace-preservation affine projection (with Dykstra's
// correction, so the result is the Frobenius-closest CPTP point), stopping at
// Frobenius step < 1e-7 or 10^4 iterations.
Matrix cptp_project(Matrix j, int* iterations = nullptr, double tol = 1e-7,
                    int max_iters = 10000);

// Linear-inversion PTM/Choi estimate followed by the CPTP projection above.
// REM, when given, is applied to each setting distribution before inversion.
// likelihood_refinement then descends the multinomial negative log-likelihood
// over the CPTP set (projected gradient with backtracking), which removes most
// of the projection's finite-shot bias; with exact input probabilities it is a
// no-op at the optimum.
ProcessEstimate reconstruct_process(const std::vector<SettingResult>& data,
                                    const REMCalibration* rem = nullptr,
                                    bool likelihood_refinement = true);

double process_fidelity(const Matrix& choi_est, const Matrix& choi_ideal);
// F_avg = (d F_pro + 1)/(d + 1) with F_pro = Tr(choi_est choi_ideal)/d^2.
double avg_gate_fidelity(const ProcessEstimate& est, const Operator& ideal);

Eigen::MatrixXd ptm_difference(const ProcessEstimate& est, const Operator& ideal);

// Mean correct-outcome probability over the 8 classical CCNOT inputs.  The
// executor runs the circuit on the given classical input and returns counts
// keyed by digit-string labels; outcomes containing a '2' are discarded
// against the full shot denominator.
using TruthTableExecutor =
    std::function<ShotResult(const std::array<int, kNumQubits>& input_bits)>;
double truth_table_fidelity(const TruthTableExecutor& executor,
                            const REMCalibration* rem = nullptr);

// Counts -> length-8 logical distribution with the given denominator;
// leakage labels are dropped.
Eigen::VectorXd logical_distribution(const ShotResult& counts);

// Dataset replay format: one record per setting with raw counts.
struct SettingCounts {
  TomographySetting setting;
  ShotResult result;
};
std::string qpt_dataset_to_json(const std::vector<SettingCounts>& data);
std::vector<SettingCounts> qpt_dataset_from_json(const std::string& text);
std::vector<SettingResult> to_setting_results(const std::vector<SettingCounts>& data);

}  // namespace qts
