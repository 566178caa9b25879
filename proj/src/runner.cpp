#include "qts/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qts/noise.hpp"

namespace qts {

namespace {

using nlohmann::json;

void add_rotation(Circuit& c, int site, Axis axis, double theta,
                  const GateDurations& durations) {
  GateInstruction g{GateKind::SubspaceRotation, {site}};
  g.axis = axis;
  g.subspace = Subspace::S01;
  g.theta = theta;
  g.duration_ns = durations.lookup(g);
  c.add(g);
}

void add_prep(Circuit& c, int site, PrepState p, const GateDurations& durations) {
  switch (p) {
    case PrepState::Zero: return;
    case PrepState::One: add_rotation(c, site, Axis::Y, M_PI, durations); return;
    case PrepState::Plus: add_rotation(c, site, Axis::Y, M_PI / 2.0, durations); return;
    case PrepState::PlusI: add_rotation(c, site, Axis::X, -M_PI / 2.0, durations); return;
  }
}

void add_meas_rotation(Circuit& c, int site, MeasBasis m, const GateDurations& durations) {
  switch (m) {
    case MeasBasis::X: add_rotation(c, site, Axis::Y, -M_PI / 2.0, durations); return;
    case MeasBasis::Y: add_rotation(c, site, Axis::X, M_PI / 2.0, durations); return;
    case MeasBasis::Z: return;
  }
}

void merge_counts(ShotResult& into, const ShotResult& from) {
  for (const auto& [label, count] : from.counts) into.counts[label] += count;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

void parallel_over(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

Implementation implementation_from_name(const std::string& name) {
  if (name == "ideal") return Implementation::Ideal;
  if (name == "ternary") return Implementation::Ternary;
  if (name == "binary8") return Implementation::Binary8;
  if (name == "binary6") return Implementation::Binary6;
  throw std::invalid_argument("unknown implementation: " + name);
}

std::string implementation_name(Implementation impl) {
  switch (impl) {
    case Implementation::Ideal: return "ideal";
    case Implementation::Ternary: return "ternary";
    case Implementation::Binary8: return "binary8";
    case Implementation::Binary6: return "binary6";
  }
  throw std::logic_error("implementation_name: bad value");
}

SimulatedBackend::SimulatedBackend(BackendOptions opt, uint64_t seed)
    : opt_(std::move(opt)), rng_(seed) {
  switch (opt_.impl) {
    case Implementation::Ideal:
    case Implementation::Binary6:
      body_ = binary_toffoli_6cnot(opt_.durations).circuit;
      break;
    case Implementation::Binary8:
      body_ = binary_toffoli_8cnot(opt_.durations).circuit;
      break;
    case Implementation::Ternary:
      body_ = ternary_toffoli(opt_.corrected, opt_.dd, opt_.cr, opt_.durations).circuit;
      break;
  }
  space_ = body_.space;
  run_duration_ns_ = body_.total_duration();
  for (int s = 0; s < space_.num_sites(); ++s) {
    const Eigen::Matrix2d q = ConfusionMatrix::qubit(opt_.readout_p00, opt_.readout_p11).m;
    if (space_.dims[s] == 2) {
      confusion_.push_back(ConfusionMatrix(q));
    } else {
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
      m.block(0, 0, 2, 2) = q;
      confusion_.push_back(ConfusionMatrix(std::move(m)));
    }
  }
  if (opt_.rtn.amplitude != 0.0 && opt_.rtn.regime == RTNRegime::Telegraph)
    telegraph_.emplace(opt_.rtn.switching_rate, rng_);
}

Eigen::VectorXd SimulatedBackend::distribution(const TomographySetting& setting,
                                               double rate, bool include_body) const {
  Circuit c(space_);
  for (int s = 0; s < kNumQubits; ++s) add_prep(c, s, setting.prep[s], opt_.durations);
  if (include_body)
    for (const auto& g : body_.instructions) c.add(g);
  for (int s = 0; s < kNumQubits; ++s)
    add_meas_rotation(c, s, setting.meas[s], opt_.durations);
  const std::vector<double> rates(space_.num_sites(), rate);
  const Vector psi = circuit_unitary_with_rtn(c, rates).matrix().col(0);
  const Eigen::VectorXd probs = psi.cwiseAbs2();
  return apply_confusion(probs, confusion_, space_);
}

SettingResult SimulatedBackend::run_setting_exact(const TomographySetting& setting) {
  const double amp = opt_.rtn.amplitude;
  Eigen::VectorXd dist;
  if (amp == 0.0) {
    dist = distribution(setting, 0.0, true);
  } else if (opt_.rtn.regime == RTNRegime::QuasiStaticPerShot) {
    dist = 0.5 * (distribution(setting, +amp, true) + distribution(setting, -amp, true));
  } else {
    const double rate = telegraph_->state() * amp;
    dist = distribution(setting, rate, true);
    telegraph_->advance(run_duration_ns_, rng_);
  }
  return {setting, logical_probs(dist, space_)};
}

SettingCounts SimulatedBackend::run_setting(const TomographySetting& setting,
                                            long shots) {
  if (shots <= 0) throw std::invalid_argument("run_setting: shots must be positive");
  ShotResult merged;
  merged.shots = shots;
  auto sample_into = [&](double rate, long n) {
    if (n <= 0) return;
    merge_counts(merged, sample_shots(distribution(setting, rate, true), space_, n, rng_()));
  };
  const double amp = opt_.rtn.amplitude;
  if (amp == 0.0) {
    sample_into(0.0, shots);
  } else if (opt_.rtn.regime == RTNRegime::QuasiStaticPerShot) {
    std::binomial_distribution<long> split(shots, 0.5);
    const long n_plus = split(rng_);
    sample_into(+amp, n_plus);
    sample_into(-amp, shots - n_plus);
  } else {
    sample_into(telegraph_->state() * amp, shots);
    telegraph_->advance(shots * run_duration_ns_, rng_);
  }
  return {setting, std::move(merged)};
}

ShotResult SimulatedBackend::run_classical(const std::array<int, kNumQubits>& bits,
                                           long shots) {
  TomographySetting setting;
  for (int s = 0; s < kNumQubits; ++s) {
    if (bits[s] != 0 && bits[s] != 1)
      throw std::invalid_argument("run_classical: input bits must be 0 or 1");
    setting.prep[s] = bits[s] ? PrepState::One : PrepState::Zero;
    setting.meas[s] = MeasBasis::Z;
  }
  return run_setting(setting, shots).result;
}

ShotResult SimulatedBackend::run_calibration(const std::array<int, kNumQubits>& state,
                                             long shots) {
  if (shots <= 0) throw std::invalid_argument("run_calibration: shots must be positive");
  TomographySetting setting;
  for (int s = 0; s < kNumQubits; ++s) {
    if (state[s] != 0 && state[s] != 1)
      throw std::invalid_argument("run_calibration: state digits must be 0 or 1");
    setting.prep[s] = state[s] ? PrepState::One : PrepState::Zero;
    setting.meas[s] = MeasBasis::Z;
  }
  // Preparation + readout only: no delays or CNOTs, so dephasing is inert.
  return sample_shots(distribution(setting, 0.0, false), space_, shots, rng_());
}

Eigen::VectorXd logical_probs(const Eigen::VectorXd& full, const MixedRadixSpace& space) {
  if (full.size() != space.total_dim())
    throw std::invalid_argument("logical_probs: distribution length mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kLogicalDim);
  for (int i = 0; i < space.total_dim(); ++i) {
    const auto digits = space.digits_of(i);
    bool leaked = false;
    int idx = 0;
    for (int d : digits) {
      if (d > 1) leaked = true;
      idx = idx * 2 + std::min(d, 1);
    }
    if (!leaked) out(idx) += full(i);
  }
  return out;
}

double run_truth_table(SimulatedBackend& backend, long shots, bool use_rem,
                       long rem_shots) {
  std::optional<REMCalibration> cal;
  if (use_rem)
    cal = rem_calibrate([&](const std::array<int, kNumQubits>& state) {
      return backend.run_calibration(state, rem_shots);
    });
  return truth_table_fidelity(
      [&](const std::array<int, kNumQubits>& bits) {
        return backend.run_classical(bits, shots);
      },
      cal ? &*cal : nullptr);
}

QPTOutcome run_qpt(SimulatedBackend& backend, long shots, bool use_rem, long rem_shots,
                   const Operator& ideal) {
  QPTOutcome out;
  const std::vector<TomographySetting> settings = qpt_settings();
  std::vector<SettingResult> results;
  results.reserve(settings.size());
  if (shots == 0) {
    if (use_rem)
      throw std::invalid_argument("run_qpt: REM requires finite shots");
    for (const auto& s : settings) results.push_back(backend.run_setting_exact(s));
  } else {
    out.dataset.reserve(settings.size());
    for (const auto& s : settings) out.dataset.push_back(backend.run_setting(s, shots));
    results = to_setting_results(out.dataset);
  }
  std::optional<REMCalibration> cal;
  if (use_rem)
    cal = rem_calibrate([&](const std::array<int, kNumQubits>& state) {
      return backend.run_calibration(state, rem_shots);
    });
  out.estimate = reconstruct_process(results, cal ? &*cal : nullptr);
  out.f_avg = avg_gate_fidelity(out.estimate, ideal);
  return out;
}

// ---------------------------------------------------------------------------
// Batch runner
// ---------------------------------------------------------------------------

namespace {

CRParams cr_from_json(const json& j) {
  CRParams cr;
  cr.r0 = j.value("r0", cr.r0);
  cr.r1 = j.value("r1", cr.r1);
  cr.r2 = j.value("r2", cr.r2);
  cr.stark_phase_per_cnot = j.value("stark_phase_per_cnot", cr.stark_phase_per_cnot);
  cr.cnot_duration_ns = j.value("cnot_duration_ns", cr.cnot_duration_ns);
  cr.edge_sigma_ns = j.value("edge_sigma_ns", cr.edge_sigma_ns);
  cr.validate();
  return cr;
}

RTNParams rtn_from_json(const json& j) {
  RTNParams p;
  p.amplitude = j.value("amplitude", 0.0);
  p.switching_rate = j.value("switching_rate", 0.0);
  const std::string regime = j.value("regime", "quasi_static");
  if (regime == "quasi_static") p.regime = RTNRegime::QuasiStaticPerShot;
  else if (regime == "telegraph") p.regime = RTNRegime::Telegraph;
  else throw std::invalid_argument("unknown RTN regime: " + regime);
  return p;
}

BackendOptions backend_from_json(const json& j) {
  BackendOptions o;
  o.impl = implementation_from_name(j.value("implementation", "ternary"));
  o.corrected = j.value("corrected", true);
  o.dd = j.value("dd", false);
  if (j.contains("noise")) o.rtn = rtn_from_json(j.at("noise"));
  if (j.contains("readout")) {
    o.readout_p00 = j.at("readout").value("p00", 1.0);
    o.readout_p11 = j.at("readout").value("p11", 1.0);
  }
  if (j.contains("cr")) o.cr = cr_from_json(j.at("cr"));
  return o;
}

// Fitted per-gate schedule; "durations_file" points at a flat {key: ns} JSON
// table (the bundled config/durations.json), and an inline "durations" object
// overrides individual entries on top of it.
GateDurations durations_from_json(const json& cfg) {
  GateDurations d = GateDurations::ibmq_jakarta_like();
  auto merge = [&](const json& table) {
    if (!table.is_object()) throw std::invalid_argument("durations must be an object");
    for (const auto& [key, value] : table.items()) d.ns[key] = value.get<double>();
  };
  if (cfg.contains("durations_file")) {
    const std::string path = cfg.at("durations_file").get<std::string>();
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open durations file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    merge(json::parse(buf.str()));
  }
  if (cfg.contains("durations")) merge(cfg.at("durations"));
  return d;
}

std::vector<double> grid_from_json(const json& j, double start, double stop, double step) {
  start = j.value("start", start);
  stop = j.value("stop", stop);
  step = j.value("step", step);
  if (step <= 0 || stop < start) throw std::invalid_argument("bad grid specification");
  std::vector<double> out;
  for (double x = start; x <= stop + 1e-12; x += step) out.push_back(x);
  return out;
}

std::vector<uint64_t> seeds_from_json(const json& j,
                                      std::optional<uint64_t> seed_override) {
  if (seed_override) return {*seed_override};
  if (j.contains("seeds")) return j.at("seeds").get<std::vector<uint64_t>>();
  return {j.value("seed", uint64_t{1})};
}

class ArtifactWriter {
 public:
  ArtifactWriter(std::string out_dir, json config)
      : out_dir_(std::move(out_dir)), config_(std::move(config)) {
    std::filesystem::create_directories(out_dir_);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(std::filesystem::path(out_dir_) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write artifact: " + name);
    f << content;
    files_.push_back(name);
  }

  void finish(const std::string& experiment) {
    json manifest;
    manifest["experiment"] = experiment;
    manifest["config"] = config_;
    manifest["files"] = files_;
    manifest["generated_at_unix"] = static_cast<long>(std::time(nullptr));
    std::ofstream f(std::filesystem::path(out_dir_) / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << "\n";
  }

 private:
  std::string out_dir_;
  json config_;
  std::vector<std::string> files_;
};

std::string format_double(double x) {
  std::ostringstream ss;
  ss << std::setprecision(12) << x;
  return ss.str();
}

json report_to_json(const DecompositionReport& r) {
  json j;
  j["equivalence_fidelity"] = r.equivalence_fidelity;
  j["total_duration_ns"] = r.total_duration_ns;
  j["two_transmon_gate_count"] = r.two_transmon_gate_count;
  j["residual_phase_corrections"] = json::array();
  for (const auto& c : r.residual_phase_corrections)
    j["residual_phase_corrections"].push_back(
        {{"site", c.site},
         {"subspace", c.subspace == Subspace::S01 ? "01" : "12"},
         {"theta", c.theta}});
  return j;
}

void run_cr_scan(const json& cfg, ArtifactWriter& out) {
  const CRParams cr = cfg.contains("cr") ? cr_from_json(cfg.at("cr")) : CRParams{};
  const std::vector<int> levels =
      cfg.contains("control_levels") ? cfg.at("control_levels").get<std::vector<int>>()
                                     : std::vector<int>{0, 1, 2};
  const std::vector<double> grid =
      grid_from_json(cfg.value("tau", json::object()), 0.0, 2.0, 0.05);

  std::ostringstream csv;
  csv << "control_level,tau_norm,z_expectation\n";
  json summary;
  std::map<int, double> fitted;
  for (int level : levels) {
    const auto scan = ecr_scan(level, grid, cr);
    std::vector<double> x, y;
    for (const auto& pt : scan) {
      csv << level << "," << format_double(pt.tau_norm) << ","
          << format_double(pt.z_expectation) << "\n";
      x.push_back(pt.tau_norm);
      y.push_back(pt.z_expectation);
    }
    fitted[level] = fit_cosine_frequency(x, y, 2.0 * M_PI);
    summary["fitted_frequency"][std::to_string(level)] = fitted[level];
  }
  if (fitted.count(1) && fitted.count(2))
    summary["frequency_ratio_2_over_1"] = fitted[2] / fitted[1];
  out.write("cr_scan.csv", csv.str());
  out.write("cr_scan_summary.json", summary.dump(2) + "\n");
}

void run_ramsey(const json& cfg, ArtifactWriter& out, uint64_t seed) {
  RTNParams noise;
  noise.amplitude = 0.002;
  if (cfg.contains("noise")) noise = rtn_from_json(cfg.at("noise"));
  const long shots = cfg.value("shots", 0L);
  const std::vector<double> taus =
      cfg.contains("taus") ? cfg.at("taus").get<std::vector<double>>()
                           : grid_from_json(cfg.value("tau", json::object()), 0.0,
                                            M_PI / std::max(noise.amplitude, 1e-12), 100.0);
  std::ostringstream csv;
  csv << "tau_ns,population_no_dd,population_dd\n";
  uint64_t k = 0;
  for (double tau : taus) {
    const double p0 = ramsey_experiment(tau, false, noise, static_cast<int>(shots),
                                        seed + 2 * k);
    const double p1 = ramsey_experiment(tau, true, noise, static_cast<int>(shots),
                                        seed + 2 * k + 1);
    csv << format_double(tau) << "," << format_double(p0) << "," << format_double(p1)
        << "\n";
    ++k;
  }
  out.write("ramsey.csv", csv.str());
}

void run_stark_cal(const json& cfg, ArtifactWriter& out) {
  StarkCalParams params;
  params.background_phase = cfg.value("background_phase", params.background_phase);
  params.stark_phase_per_cnot =
      cfg.value("stark_phase_per_cnot", params.stark_phase_per_cnot);
  const std::vector<double> grid =
      grid_from_json(cfg.value("theta", json::object()), 0.0, 1.5, 0.005);
  const StarkScanResult idle = stark_calibration_scan(grid, false, params);
  const StarkScanResult drive = stark_calibration_scan(grid, true, params);
  std::ostringstream csv;
  csv << "theta_rad,population_idle,population_drive\n";
  for (size_t i = 0; i < grid.size(); ++i)
    csv << format_double(grid[i]) << "," << format_double(idle.curve[i].second) << ","
        << format_double(drive.curve[i].second) << "\n";
  json summary;
  summary["theta_peak_idle"] = idle.theta_peak;
  summary["theta_peak_drive"] = drive.theta_peak;
  summary["stark_phase_estimate"] = drive.theta_peak - idle.theta_peak;
  out.write("stark_cal.csv", csv.str());
  out.write("stark_cal_summary.json", summary.dump(2) + "\n");
}

void run_truth_table_experiment(const json& cfg, ArtifactWriter& out,
                                std::optional<uint64_t> seed_override, int threads) {
  BackendOptions opts = backend_from_json(cfg.value("backend", json::object()));
  opts.durations = durations_from_json(cfg);
  const long shots = cfg.value("shots", 1024L);
  const bool use_rem = cfg.value("rem", false);
  const long rem_shots = cfg.value("rem_shots", 2048L);
  const std::vector<uint64_t> seeds = seeds_from_json(cfg, seed_override);

  std::vector<double> f_plain(seeds.size()), f_rem(seeds.size());
  parallel_over(static_cast<int>(seeds.size()), threads, [&](int i) {
    SimulatedBackend backend(opts, seeds[i]);
    f_plain[i] = run_truth_table(backend, shots, false, rem_shots);
    if (use_rem) f_rem[i] = run_truth_table(backend, shots, true, rem_shots);
  });

  json summary;
  summary["implementation"] = implementation_name(opts.impl);
  summary["shots"] = shots;
  for (size_t i = 0; i < seeds.size(); ++i) {
    json row;
    row["seed"] = seeds[i];
    row["f_tt"] = f_plain[i];
    if (use_rem) row["f_tt_rem"] = f_rem[i];
    summary["runs"].push_back(row);
  }
  summary["f_tt_mean"] = mean_of(f_plain);
  if (use_rem) summary["f_tt_rem_mean"] = mean_of(f_rem);
  out.write("truth_table_summary.json", summary.dump(2) + "\n");
}

void run_qpt_experiment(const json& cfg, ArtifactWriter& out,
                        std::optional<uint64_t> seed_override, int threads) {
  BackendOptions opts = backend_from_json(cfg.value("backend", json::object()));
  opts.durations = durations_from_json(cfg);
  const long shots = cfg.value("shots", 1024L);
  const bool use_rem = cfg.value("rem", false);
  const long rem_shots = cfg.value("rem_shots", 2048L);
  const bool write_dataset = cfg.value("write_dataset", false);
  const std::vector<uint64_t> seeds = seeds_from_json(cfg, seed_override);
  const Operator ideal = ideal_ccnot8();

  std::vector<QPTOutcome> outcomes(seeds.size());
  parallel_over(static_cast<int>(seeds.size()), threads, [&](int i) {
    SimulatedBackend backend(opts, seeds[i]);
    outcomes[i] = run_qpt(backend, shots, use_rem, rem_shots, ideal);
  });

  json summary;
  summary["implementation"] = implementation_name(opts.impl);
  summary["shots"] = shots;
  summary["rem"] = use_rem;
  std::vector<double> favgs;
  for (size_t i = 0; i < seeds.size(); ++i) {
    const auto& o = outcomes[i];
    json row;
    row["seed"] = seeds[i];
    row["f_avg"] = o.f_avg;
    row["cp_residual"] = o.estimate.cp_residual;
    row["tp_residual"] = o.estimate.tp_residual;
    row["iterations"] = o.estimate.iterations;
    row["converged"] = o.estimate.converged;
    summary["runs"].push_back(row);
    favgs.push_back(o.f_avg);
    if (write_dataset && !o.dataset.empty())
      out.write("qpt_dataset_seed" + std::to_string(seeds[i]) + ".json",
                qpt_dataset_to_json(o.dataset) + "\n");
  }
  summary["f_avg_mean"] = mean_of(favgs);
  summary["f_avg_std"] = std_of(favgs);
  summary["f_avg_min"] = *std::min_element(favgs.begin(), favgs.end());
  summary["f_avg_max"] = *std::max_element(favgs.begin(), favgs.end());
  out.write("qpt_summary.json", summary.dump(2) + "\n");
}

void run_durations(const json& cfg, ArtifactWriter& out) {
  const GateDurations durations = durations_from_json(cfg);
  const CRParams cr = cfg.contains("cr") ? cr_from_json(cfg.at("cr")) : CRParams{};
  json j;
  j["ternary"] = report_to_json(ternary_toffoli(true, false, cr, durations));
  j["ternary_dd"] = report_to_json(ternary_toffoli(true, true, cr, durations));
  j["binary8"] = report_to_json(binary_toffoli_8cnot(durations));
  j["binary6"] = report_to_json(binary_toffoli_6cnot(durations));
  json table;
  for (const auto& [key, value] : durations.ns) table[key] = value;
  j["gate_durations_ns"] = table;
  out.write("durations.json", j.dump(2) + "\n");
}

void run_verify(const json& cfg, ArtifactWriter& out) {
  const CRParams cr = cfg.contains("cr") ? cr_from_json(cfg.at("cr")) : CRParams{};
  const bool corrected = cfg.value("corrected", true);
  const bool dd = cfg.value("dd", false);
  const GateDurations durations = durations_from_json(cfg);

  const DecompositionReport ternary = ternary_toffoli(corrected, dd, cr, durations);
  const DecompositionReport b8 = binary_toffoli_8cnot(durations);
  const DecompositionReport b6 = binary_toffoli_6cnot(durations);
  const EquivalenceResult eq =
      verify_equivalence(ternary.circuit, ideal_ccnot_mixed(), true);

  json j;
  j["ternary"] = report_to_json(ternary);
  j["ternary"]["leakage"] = eq.leakage;
  j["ternary"]["leakage_ok"] = eq.leakage_status == LeakageStatus::Ok;
  j["binary8"] = report_to_json(b8);
  j["binary6"] = report_to_json(b6);
  out.write("verify.json", j.dump(2) + "\n");
  out.write("ternary_circuit.json", circuit_to_json(ternary.circuit) + "\n");
  out.write("binary8_circuit.json", circuit_to_json(b8.circuit) + "\n");
  out.write("binary6_circuit.json", circuit_to_json(b6.circuit) + "\n");
}

void run_compare(const json& cfg, ArtifactWriter& out,
                 std::optional<uint64_t> seed_override, int threads) {
  json tern_cfg = cfg.value("ternary", json::object());
  json bin_cfg = cfg.value("binary8", json::object());
  if (!tern_cfg.contains("implementation")) tern_cfg["implementation"] = "ternary";
  if (!bin_cfg.contains("implementation")) bin_cfg["implementation"] = "binary8";
  BackendOptions tern_opts = backend_from_json(tern_cfg);
  BackendOptions bin_opts = backend_from_json(bin_cfg);
  tern_opts.durations = bin_opts.durations = durations_from_json(cfg);
  const long shots = cfg.value("shots", 1024L);
  const long rem_shots = cfg.value("rem_shots", 2048L);
  const std::vector<uint64_t> seeds = seeds_from_json(cfg, seed_override);

  struct ArmResult {
    std::vector<double> f_tt, f_tt_rem;
  };
  ArmResult tern, bin;
  tern.f_tt.resize(seeds.size());
  tern.f_tt_rem.resize(seeds.size());
  bin.f_tt.resize(seeds.size());
  bin.f_tt_rem.resize(seeds.size());
  parallel_over(static_cast<int>(seeds.size()), threads, [&](int i) {
    SimulatedBackend tb(tern_opts, seeds[i]);
    tern.f_tt[i] = run_truth_table(tb, shots, false, rem_shots);
    tern.f_tt_rem[i] = run_truth_table(tb, shots, true, rem_shots);
    SimulatedBackend bb(bin_opts, seeds[i]);
    bin.f_tt[i] = run_truth_table(bb, shots, false, rem_shots);
    bin.f_tt_rem[i] = run_truth_table(bb, shots, true, rem_shots);
  });

  const DecompositionReport tern_report =
      ternary_toffoli(tern_opts.corrected, tern_opts.dd, tern_opts.cr, tern_opts.durations);
  const DecompositionReport bin_report = binary_toffoli_8cnot(bin_opts.durations);

  json j;
  auto arm_json = [&](const ArmResult& arm, const DecompositionReport& report) {
    json a;
    a["f_tt_mean"] = mean_of(arm.f_tt);
    a["f_tt_rem_mean"] = mean_of(arm.f_tt_rem);
    a["total_duration_ns"] = report.total_duration_ns;
    a["two_transmon_gate_count"] = report.two_transmon_gate_count;
    return a;
  };
  j["ternary"] = arm_json(tern, tern_report);
  j["binary8"] = arm_json(bin, bin_report);
  j["duration_ratio"] = tern_report.total_duration_ns / bin_report.total_duration_ns;
  j["f_tt_improvement"] = mean_of(tern.f_tt) - mean_of(bin.f_tt);
  j["f_tt_rem_improvement"] = mean_of(tern.f_tt_rem) - mean_of(bin.f_tt_rem);
  out.write("compare.json", j.dump(2) + "\n");
}

int run_experiment_json(const json& cfg, const std::string& out_dir,
                        std::optional<uint64_t> seed_override, int threads) {
  const std::string kind = cfg.at("experiment").get<std::string>();
  ArtifactWriter out(out_dir, cfg);
  const uint64_t seed = seed_override ? *seed_override : cfg.value("seed", uint64_t{1});
  if (kind == "cr-scan") run_cr_scan(cfg, out);
  else if (kind == "ramsey") run_ramsey(cfg, out, seed);
  else if (kind == "stark-cal") run_stark_cal(cfg, out);
  else if (kind == "truth-table") run_truth_table_experiment(cfg, out, seed_override, threads);
  else if (kind == "qpt") run_qpt_experiment(cfg, out, seed_override, threads);
  else if (kind == "durations") run_durations(cfg, out);
  else if (kind == "verify") run_verify(cfg, out);
  else if (kind == "compare") run_compare(cfg, out, seed_override, threads);
  else throw std::invalid_argument("unknown experiment kind: " + kind);
  out.finish(kind);
  return 0;
}

}  // namespace

int run_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<uint64_t> seed_override, int threads) {
  std::ifstream f(config_path);
  if (!f) throw std::runtime_error("cannot open config file: " + config_path);
  std::stringstream buf;
  buf << f.rdbuf();
  return run_experiment_json(json::parse(buf.str()), out_dir, seed_override, threads);
}

int run_experiment_config_text(const std::string& config_json, const std::string& out_dir,
                               std::optional<uint64_t> seed_override, int threads) {
  return run_experiment_json(json::parse(config_json), out_dir, seed_override, threads);
}

}  // namespace qts
