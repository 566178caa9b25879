#include "qts/cr.hpp"

#include <cmath>

#include "qts/gates.hpp"

namespace qts {

void CRParams::validate() const {
  if (cnot_duration_ns <= 0)
    throw std::invalid_argument("CRParams: cnot_duration must be positive");
  if (std::abs(std::abs(r0) - std::abs(r1)) > 1e-12)
    throw std::invalid_argument("CRParams: echo symmetry requires |r0| == |r1|");
}

Operator u_zx(double tau_norm, const CRParams& params) {
  params.validate();
  if (tau_norm < 0) throw std::invalid_argument("u_zx: negative duration");
  Matrix m = Matrix::Zero(6, 6);
  const double rates[3] = {params.r0, params.r1, params.r2};
  for (int level = 0; level < 3; ++level) {
    Matrix block = rotation2(Axis::X, rates[level] * M_PI * tau_norm);
    if (level == 2)
      block *= std::exp(Complex(0, params.stark_phase_per_cnot * tau_norm));
    m.block(2 * level, 2 * level, 2, 2) = block;
  }
  return Operator(MixedRadixSpace({3, 2}), std::move(m));
}

std::vector<ScanPoint> ecr_scan(int control_level, const std::vector<double>& tau_grid,
                                const CRParams& params) {
  if (control_level < 0 || control_level > 2)
    throw std::invalid_argument("ecr_scan: control level must be 0, 1, or 2");
  const MixedRadixSpace space({3, 2});
  const Operator z_target = embed(
      Operator(MixedRadixSpace({2}), pauli2(Axis::Z)), {1}, space);
  std::vector<ScanPoint> out;
  out.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    if (tau < 0) throw std::invalid_argument("ecr_scan: negative grid value");
    QuantumState st = QuantumState::basis(space, {control_level, 0});
    st = apply(st, u_zx(tau, params));
    out.push_back({tau, expectation(st, z_target)});
  }
  return out;
}

double stark_phase_accumulated(double tau_norm, const CRParams& params) {
  if (tau_norm < 0) throw std::invalid_argument("stark_phase_accumulated: negative duration");
  return params.stark_phase_per_cnot * tau_norm;
}

namespace {

double sq_error(const std::vector<double>& x, const std::vector<double>& y, double w) {
  double e = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - std::cos(w * x[i]);
    e += d * d;
  }
  return e;
}

}  // namespace

double fit_cosine_frequency(const std::vector<double>& x, const std::vector<double>& y,
                            double w_max) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("fit_cosine_frequency: bad input lengths");
  const int coarse = 2000;
  double best_w = w_max / coarse, best_e = sq_error(x, y, best_w);
  for (int i = 2; i <= coarse; ++i) {
    const double w = w_max * i / coarse;
    const double e = sq_error(x, y, w);
    if (e < best_e) {
      best_e = e;
      best_w = w;
    }
  }
  // Golden-section refinement around the coarse minimum.
  double a = std::max(best_w - 2.0 * w_max / coarse, 1e-12);
  double b = best_w + 2.0 * w_max / coarse;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (sq_error(x, y, c) < sq_error(x, y, d)) b = d; else a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace qts
