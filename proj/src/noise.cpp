#include "qts/noise.hpp"

#include <cmath>

#include "qts/frames.hpp"

namespace qts {

TelegraphProcess::TelegraphProcess(double switching_rate, std::mt19937_64& rng)
    : rate_(switching_rate) {
  if (switching_rate < 0)
    throw std::invalid_argument("TelegraphProcess: negative switching rate");
  state_ = (rng() & 1) ? +1 : -1;
}

double TelegraphProcess::advance(double dt, std::mt19937_64& rng) {
  if (dt < 0) throw std::invalid_argument("TelegraphProcess: negative dt");
  double integral = 0.0;
  double remaining = dt;
  if (rate_ == 0.0) {
    return state_ * dt;
  }
  std::exponential_distribution<double> wait(rate_);
  while (remaining > 0) {
    const double dwell = wait(rng);
    if (dwell >= remaining) {
      integral += state_ * remaining;
      remaining = 0;
    } else {
      integral += state_ * dwell;
      remaining -= dwell;
      state_ = -state_;
    }
  }
  return integral;
}

double sample_rtn_phase(const RTNParams& params, double duration_ns,
                        std::mt19937_64& rng) {
  if (duration_ns < 0) throw std::invalid_argument("sample_rtn_phase: negative duration");
  if (params.amplitude == 0.0) return 0.0;
  if (params.regime == RTNRegime::QuasiStaticPerShot) {
    const int s = (rng() & 1) ? +1 : -1;
    return s * params.amplitude * duration_ns;
  }
  TelegraphProcess proc(params.switching_rate, rng);
  return params.amplitude * proc.advance(duration_ns, rng);
}

Circuit dd_sequence(double tau_ns, const GateDurations& durations) {
  if (tau_ns < 0) throw std::invalid_argument("dd_sequence: negative tau");
  Circuit c(MixedRadixSpace({3}));
  GateInstruction quarter{GateKind::Delay, {0}};
  quarter.duration_ns = tau_ns / 4.0;
  GateInstruction half{GateKind::Delay, {0}};
  half.duration_ns = tau_ns / 2.0;
  GateInstruction pulse{GateKind::DDXPulse, {0}};
  pulse.duration_ns = durations.lookup(pulse);
  c.add(quarter);
  c.add(pulse);
  c.add(half);
  c.add(pulse);
  c.add(quarter);
  return c;
}

namespace {

Vector ramsey_prep_state() {
  Vector psi = Vector::Zero(3);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(2) = 1.0 / std::sqrt(2.0);
  return psi;
}

// Exact recovery population for one telegraph phase-rate sample.
double ramsey_population(const Circuit& circuit, double phase_rate) {
  const Vector prep = ramsey_prep_state();
  const Vector ref = circuit_unitary_with_rtn(circuit, {0.0}).matrix() * prep;
  const Vector got = circuit_unitary_with_rtn(circuit, {phase_rate}).matrix() * prep;
  return std::norm(ref.dot(got));
}

}  // namespace

double ramsey_experiment(double tau_ns, bool use_dd, const RTNParams& noise,
                         int shots, uint64_t seed) {
  if (tau_ns < 0) throw std::invalid_argument("ramsey_experiment: negative tau");
  if (shots < 0) throw std::invalid_argument("ramsey_experiment: negative shots");
  Circuit circuit(MixedRadixSpace({3}));
  if (use_dd) {
    circuit = dd_sequence(tau_ns);
  } else {
    GateInstruction idle{GateKind::Delay, {0}};
    idle.duration_ns = tau_ns;
    circuit.add(idle);
  }

  if (shots == 0) {
    // Exact-probability mode: average over the two quasi-static states.
    return 0.5 * (ramsey_population(circuit, +noise.amplitude) +
                  ramsey_population(circuit, -noise.amplitude));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long recovered = 0;
  for (int shot = 0; shot < shots; ++shot) {
    double net_phase;
    if (noise.regime == RTNRegime::QuasiStaticPerShot) {
      const int s = (rng() & 1) ? +1 : -1;
      // The DD sequence flips the accrual sign for the middle tau/2.
      net_phase = use_dd ? 0.0 : s * noise.amplitude * tau_ns;
    } else {
      TelegraphProcess proc(noise.switching_rate, rng);
      if (use_dd) {
        const double a = proc.advance(tau_ns / 4.0, rng);
        const double b = proc.advance(tau_ns / 2.0, rng);
        const double c = proc.advance(tau_ns / 4.0, rng);
        net_phase = noise.amplitude * (a - b + c);
      } else {
        net_phase = noise.amplitude * proc.advance(tau_ns, rng);
      }
    }
    const double p = std::cos(net_phase / 2.0) * std::cos(net_phase / 2.0);
    if (unit(rng) < p) ++recovered;
  }
  return static_cast<double>(recovered) / shots;
}

StarkScanResult stark_calibration_scan(const std::vector<double>& theta_grid,
                                       bool with_drive, const StarkCalParams& params) {
  if (theta_grid.empty())
    throw std::invalid_argument("stark_calibration_scan: empty grid");
  const double phi_acc =
      params.background_phase - (with_drive ? params.stark_phase_per_cnot : 0.0);
  StarkScanResult out;
  out.curve.reserve(theta_grid.size());
  double best_p = -1.0;
  out.theta_peak = theta_grid.front();
  for (double theta : theta_grid) {
    const double c = std::cos((theta + phi_acc) / 2.0);
    const double p = c * c;
    out.curve.emplace_back(theta, p);
    if (p > best_p) {
      best_p = p;
      out.theta_peak = theta;
    }
  }
  return out;
}

ConfusionMatrix::ConfusionMatrix(Eigen::MatrixXd mat) : m(std::move(mat)) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw std::invalid_argument("ConfusionMatrix: must be square, dim >= 2");
  for (int j = 0; j < m.cols(); ++j) {
    double colsum = 0;
    for (int i = 0; i < m.rows(); ++i) {
      if (m(i, j) < -1e-12 || m(i, j) > 1.0 + 1e-12)
        throw std::invalid_argument("ConfusionMatrix: entries must be in [0,1]");
      colsum += m(i, j);
    }
    if (std::abs(colsum - 1.0) > 1e-12)
      throw std::invalid_argument("ConfusionMatrix: columns must sum to 1");
  }
}

ConfusionMatrix ConfusionMatrix::qubit(double p00, double p11) {
  Eigen::MatrixXd m(2, 2);
  m << p00, 1 - p11, 1 - p00, p11;
  return ConfusionMatrix(std::move(m));
}

ConfusionMatrix ConfusionMatrix::identity(int d) {
  return ConfusionMatrix(Eigen::MatrixXd::Identity(d, d));
}

Eigen::VectorXd apply_confusion(const Eigen::VectorXd& probs,
                                const std::vector<ConfusionMatrix>& confusion,
                                const MixedRadixSpace& space) {
  if (static_cast<int>(confusion.size()) != space.num_sites())
    throw std::invalid_argument("apply_confusion: one matrix per site required");
  for (int s = 0; s < space.num_sites(); ++s) {
    if (confusion[s].dim() != space.dims[s])
      throw std::invalid_argument("apply_confusion: site dimension mismatch");
  }
  if (probs.size() != space.total_dim())
    throw std::invalid_argument("apply_confusion: distribution length mismatch");

  // Contract one site at a time: out[..i..] = sum_j M(i,j) in[..j..].
  Eigen::VectorXd cur = probs;
  const int D = space.total_dim();
  int stride = D;
  for (int s = 0; s < space.num_sites(); ++s) {
    const int d = space.dims[s];
    stride /= d;
    Eigen::VectorXd next = Eigen::VectorXd::Zero(D);
    for (int base = 0; base < D; base += d * stride) {
      for (int off = 0; off < stride; ++off) {
        for (int i = 0; i < d; ++i) {
          double acc = 0;
          for (int j = 0; j < d; ++j)
            acc += confusion[s].m(i, j) * cur(base + j * stride + off);
          next(base + i * stride + off) = acc;
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

ShotResult sample_shots(const Eigen::VectorXd& probs, const MixedRadixSpace& space,
                        long n, uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("sample_shots: shots must be positive");
  if (probs.size() != space.total_dim())
    throw std::invalid_argument("sample_shots: distribution length mismatch");
  double sum = 0;
  for (int i = 0; i < probs.size(); ++i) {
    if (probs(i) < -1e-12) throw std::invalid_argument("sample_shots: negative probability");
    sum += std::max(probs(i), 0.0);
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("sample_shots: probabilities must sum to 1");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> dist(probs.data(), probs.data() + probs.size());
  std::vector<long> counts(probs.size(), 0);
  for (long k = 0; k < n; ++k) ++counts[dist(rng)];
  ShotResult out;
  out.shots = n;
  for (int i = 0; i < probs.size(); ++i) {
    if (counts[i] > 0) out.counts[space.label_of(i)] = counts[i];
  }
  return out;
}

}  // namespace qts
