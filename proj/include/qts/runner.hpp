#pragma once

#include <optional>
#include <string>

#include "qts/decompositions.hpp"
#include "qts/noise.hpp"
#include "qts/tomography.hpp"

namespace qts {

enum class Implementation { Ideal, Ternary, Binary8, Binary6 };

Implementation implementation_from_name(const std::string& name);
std::string implementation_name(Implementation impl);

struct BackendOptions {
  Implementation impl = Implementation::Ternary;
  bool corrected = true;
  bool dd = false;
  RTNParams rtn;                  // amplitude 0 disables dephasing
  double readout_p00 = 1.0;       // per-site tensor readout model
  double readout_p11 = 1.0;       // (|2> outcomes read back faithfully)
  CRParams cr;
  GateDurations durations = GateDurations::ibmq_jakarta_like();
};

// Shot-level simulator for one Toffoli implementation.  All randomness flows
// from the constructor seed; telegraph noise state persists across calls so a
// slow fluctuator correlates consecutive settings of a run.
class SimulatedBackend {
 public:
  SimulatedBackend(BackendOptions opt, uint64_t seed);

  const MixedRadixSpace& space() const { return space_; }
  const Circuit& body() const { return body_; }
  const BackendOptions& options() const { return opt_; }

  // Exact-probability mode: quasi-static noise averaged over the two telegraph
  // states; telegraph regime uses (and advances) the persistent state.
  SettingResult run_setting_exact(const TomographySetting& setting);
  SettingCounts run_setting(const TomographySetting& setting, long shots);

  // Classical input, Z-basis measurement.
  ShotResult run_classical(const std::array<int, kNumQubits>& bits, long shots);
  // State preparation + readout only (no gate body), for REM calibration.
  ShotResult run_calibration(const std::array<int, kNumQubits>& state, long shots);

  // Full-space outcome distribution for one dephasing rate sample (rad/ns on
  // every qutrit site), after readout confusion.
  Eigen::VectorXd distribution(const TomographySetting& setting, double rate,
                               bool include_body) const;

 private:
  BackendOptions opt_;
  MixedRadixSpace space_;
  Circuit body_;
  double run_duration_ns_ = 0.0;
  std::vector<ConfusionMatrix> confusion_;
  std::mt19937_64 rng_;
  std::optional<TelegraphProcess> telegraph_;
};

// Collapse a full-space distribution onto the 8 logical outcomes, discarding
// leakage outcomes (sub-normalized result).
Eigen::VectorXd logical_probs(const Eigen::VectorXd& full, const MixedRadixSpace& space);

double run_truth_table(SimulatedBackend& backend, long shots, bool use_rem,
                       long rem_shots);

struct QPTOutcome {
  double f_avg = 0.0;
  ProcessEstimate estimate;
  std::vector<SettingCounts> dataset;  // empty in exact-probability mode
};
// shots = 0 selects exact-probability mode (REM requires shots > 0).
QPTOutcome run_qpt(SimulatedBackend& backend, long shots, bool use_rem,
                   long rem_shots, const Operator& ideal);

// Batch entry point used by the CLI: reads a JSON config, runs the named
// experiment, writes CSV/JSON artifacts plus a manifest into out_dir.
// Returns the process exit status; errors are reported as structured JSON on
// stderr by the caller.
int run_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<uint64_t> seed_override, int threads);

// Same, from config text already in memory (the CLI injects the subcommand
// name as the experiment kind when the config omits it).
int run_experiment_config_text(const std::string& config_json, const std::string& out_dir,
                               std::optional<uint64_t> seed_override, int threads);

}  // namespace qts
