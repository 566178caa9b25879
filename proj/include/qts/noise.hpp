#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "qts/circuit.hpp"

namespace qts {

enum class RTNRegime { QuasiStaticPerShot, Telegraph };

// Random-telegraph dephasing of the (12) frame: the telegraph state s = +/-1
// shifts the level phases as diag(1, e^{+i s dw t}, e^{-i s dw t}), so an
// unprotected (|0>+|2>) coherence dephases at rate dw while the DD sequence
// cancels the accumulation exactly in the quasi-static limit.
struct RTNParams {
  double amplitude = 0.0;       // dw, rad/ns
  double switching_rate = 0.0;  // 1/ns, used by the telegraph regime
  RTNRegime regime = RTNRegime::QuasiStaticPerShot;
};

// Two-state Markov process with persistent state, for telegraph-resolved runs.
class TelegraphProcess {
 public:
  TelegraphProcess(double switching_rate, std::mt19937_64& rng);
  // Advance by dt and return the time integral of the state over [0, dt].
  double advance(double dt, std::mt19937_64& rng);
  int state() const { return state_; }

 private:
  double rate_;
  int state_;
};

// One quasi-static (or telegraph-integrated) dephasing phase sample in radians.
double sample_rtn_phase(const RTNParams& params, double duration_ns,
                        std::mt19937_64& rng);

// tau/4 . X12 . tau/2 . X12 . tau/4 on one qutrit.
Circuit dd_sequence(double tau_ns,
                    const GateDurations& durations = GateDurations::ibmq_jakarta_like());

// Prepare (|0>+|2>)/sqrt(2), idle for tau (with or without the DD sequence),
// measure in the preparation basis (referenced to the noiseless evolution,
// which absorbs the fixed phase of the two pi-pulses).  shots = 0 returns the
// exact population averaged over the two telegraph states.
double ramsey_experiment(double tau_ns, bool use_dd, const RTNParams& noise,
                         int shots, uint64_t seed);

// Stark-phase calibration: population(theta) = cos^2((theta + phi_acc)/2)
// where phi_acc is the idle background phase minus the Stark phase when the
// drive is on; the grid argmax is the cancelling rotation.
struct StarkCalParams {
  double background_phase = -0.1083;
  double stark_phase_per_cnot = 1.0833;
};
struct StarkScanResult {
  std::vector<std::pair<double, double>> curve;  // (theta, population)
  double theta_peak;
};
StarkScanResult stark_calibration_scan(const std::vector<double>& theta_grid,
                                       bool with_drive,
                                       const StarkCalParams& params = StarkCalParams{});

// Per-site readout confusion, column-stochastic: m(i, j) = P(read i | prepared j).
struct ConfusionMatrix {
  Eigen::MatrixXd m;
  explicit ConfusionMatrix(Eigen::MatrixXd mat);
  int dim() const { return static_cast<int>(m.rows()); }
  static ConfusionMatrix qubit(double p00, double p11);
  static ConfusionMatrix identity(int d);
};

// (tensor product of site confusions) * probs, computed site by site.
Eigen::VectorXd apply_confusion(const Eigen::VectorXd& probs,
                                const std::vector<ConfusionMatrix>& confusion,
                                const MixedRadixSpace& space);

struct ShotResult {
  std::map<std::string, long> counts;  // keyed by mixed-radix digit string
  long shots = 0;
};

ShotResult sample_shots(const Eigen::VectorXd& probs, const MixedRadixSpace& space,
                        long n, uint64_t seed);

}  // namespace qts
