#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qts/noise.hpp"

using namespace qts;

TEST_CASE("quasi-static phase samples are +-amplitude*duration with zero mean") {
  RTNParams off;
  std::mt19937_64 rng(11);
  CHECK(sample_rtn_phase(off, 50.0, rng) == 0.0);

  RTNParams qs;
  qs.amplitude = 0.007;
  const double duration = 100.0;  // amplitude * duration = 0.7 rad
  double mean = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double phase = sample_rtn_phase(qs, duration, rng);
    CHECK(std::abs(std::abs(phase) - 0.7) < 1e-12);
    mean += phase / n;
  }
  CHECK(std::abs(mean) < 0.05);  // ~7 sigma of the sample mean
  CHECK_THROWS(sample_rtn_phase(qs, -1.0, rng));
}

TEST_CASE("fast-switching telegraph noise motionally narrows") {
  RTNParams tel;
  tel.amplitude = 0.01;
  tel.switching_rate = 1000.0;
  tel.regime = RTNRegime::Telegraph;
  std::mt19937_64 rng(5);
  double mean_abs = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i) mean_abs += std::abs(sample_rtn_phase(tel, 100.0, rng)) / n;
  // Quasi-static accrual would be 1.0 rad; fast switching averages it away.
  CHECK(mean_abs < 0.05);
}

TEST_CASE("telegraph process reduces to quasi-static at zero switching rate") {
  std::mt19937_64 rng(3);
  TelegraphProcess proc(0.0, rng);
  const int s = proc.state();
  CHECK((s == 1 || s == -1));
  CHECK(proc.advance(42.0, rng) == doctest::Approx(s * 42.0));
  CHECK(proc.state() == s);
}

TEST_CASE("dd sequence structure: two pi-pulses around a refocusing delay") {
  const Circuit c = dd_sequence(120.0);
  REQUIRE(c.instructions.size() == 5);
  CHECK(c.instructions[0].kind == GateKind::Delay);
  CHECK(c.instructions[0].duration_ns == doctest::Approx(30.0));
  CHECK(c.instructions[1].kind == GateKind::DDXPulse);
  CHECK(c.instructions[2].duration_ns == doctest::Approx(60.0));
  CHECK(c.instructions[4].duration_ns == doctest::Approx(30.0));

  // Back-to-back pi pulses (tau = 0) give the fixed -I on the (12) block.
  const Matrix u0 = circuit_unitary(dd_sequence(0.0)).matrix();
  Matrix expect = Matrix::Identity(3, 3);
  expect(1, 1) = expect(2, 2) = -1;
  CHECK((u0 - expect).norm() < 1e-12);
}

TEST_CASE("dd unitary is independent of the quasi-static dephasing rate") {
  const Circuit c = dd_sequence(341.0 * 2);
  const Matrix ref = circuit_unitary_with_rtn(c, {0.0}).matrix();
  for (double rate : {0.001, -0.0035, 0.0046, 0.002}) {
    const Matrix noisy = circuit_unitary_with_rtn(c, {rate}).matrix();
    CHECK((noisy - ref).norm() < 1e-10);
  }
  // The unprotected idle of the same length is not rate-independent.
  Circuit idle(MixedRadixSpace({3}));
  GateInstruction d{GateKind::Delay, {0}};
  d.duration_ns = 341.0 * 2;
  idle.add(d);
  CHECK((circuit_unitary_with_rtn(idle, {0.002}).matrix() -
         circuit_unitary_with_rtn(idle, {0.0}).matrix())
            .norm() > 0.1);
}

TEST_CASE("ramsey population follows cos^2 without dd and stays at 1 with dd") {
  RTNParams off;
  CHECK(ramsey_experiment(500.0, false, off, 0, 1) == doctest::Approx(1.0));

  RTNParams qs;
  const double tau = 650.0;
  qs.amplitude = 1.3 / tau;  // amplitude * tau = 1.3 rad
  const double pop = ramsey_experiment(tau, false, qs, 0, 1);
  CHECK(pop == doctest::Approx(std::cos(0.65) * std::cos(0.65)).epsilon(1e-9));

  qs.amplitude = M_PI / tau;  // full contrast loss
  CHECK(ramsey_experiment(tau, false, qs, 0, 1) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ramsey_experiment(tau, true, qs, 0, 1) ==
        doctest::Approx(1.0).epsilon(1e-10));

  // Shot mode tracks the exact values within sampling error.
  const double shot_pop = ramsey_experiment(tau, false, qs, 1024, 77);
  CHECK(shot_pop == doctest::Approx(0.0).epsilon(0.03));
  CHECK(ramsey_experiment(tau, true, qs, 1024, 77) >= 0.999);
}

TEST_CASE("stark calibration peaks at the cancelling rotation angle") {
  std::vector<double> grid;
  for (double t = -M_PI; t <= M_PI; t += 0.005) grid.push_back(t);

  StarkCalParams defaults;
  const auto idle = stark_calibration_scan(grid, false, defaults);
  CHECK(std::abs(idle.theta_peak - 0.1083) <= 0.005);
  const auto driven = stark_calibration_scan(grid, true, defaults);
  CHECK(std::abs(driven.theta_peak - 1.1916) <= 0.005);
  CHECK(driven.theta_peak - idle.theta_peak ==
        doctest::Approx(1.0833).epsilon(0.01));

  StarkCalParams centered;
  centered.background_phase = 0.0;
  const auto zero = stark_calibration_scan(grid, false, centered);
  CHECK(std::abs(zero.theta_peak) <= 0.005);
  CHECK_THROWS(stark_calibration_scan({}, false, defaults));
}

TEST_CASE("confusion matrices validate and apply as column-stochastic maps") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.9, 0.1, 0.2, 0.9;
  CHECK_THROWS(ConfusionMatrix(bad));

  const MixedRadixSpace q2({2});
  Eigen::VectorXd basis0(2);
  basis0 << 1, 0;
  const auto m = ConfusionMatrix::qubit(0.98, 0.96);
  const Eigen::VectorXd read = apply_confusion(basis0, {m}, q2);
  CHECK(read(0) == doctest::Approx(0.98));
  CHECK(read(1) == doctest::Approx(0.02));

  // Identity confusion leaves any distribution unchanged.
  Eigen::VectorXd dist(2);
  dist << 0.3, 0.7;
  const Eigen::VectorXd same =
      apply_confusion(dist, {ConfusionMatrix::identity(2)}, q2);
  CHECK((same - dist).norm() < 1e-14);
}

TEST_CASE("tensor-product confusion equals the brute-force kron matrix") {
  const MixedRadixSpace space({2, 2, 2});
  const std::vector<ConfusionMatrix> site = {ConfusionMatrix::qubit(0.98, 0.96),
                                             ConfusionMatrix::qubit(0.95, 0.97),
                                             ConfusionMatrix::qubit(0.99, 0.93)};
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(1, 1);
  for (const auto& c : site) {
    Eigen::MatrixXd next(full.rows() * 2, full.cols() * 2);
    next.block(0, 0, full.rows(), full.cols()) = c.m(0, 0) * full;
    next.block(0, full.cols(), full.rows(), full.cols()) = c.m(0, 1) * full;
    next.block(full.rows(), 0, full.rows(), full.cols()) = c.m(1, 0) * full;
    next.block(full.rows(), full.cols(), full.rows(), full.cols()) = c.m(1, 1) * full;
    // Reorder: kron must be site-0 major, so build as full (x) c instead.
    next.setZero();
    for (int i = 0; i < full.rows(); ++i)
      for (int j = 0; j < full.cols(); ++j)
        next.block(i * 2, j * 2, 2, 2) = full(i, j) * c.m;
    full = next;
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd p(8);
  for (int i = 0; i < 8; ++i) p(i) = unit(rng);
  p /= p.sum();
  const Eigen::VectorXd fast = apply_confusion(p, site, space);
  CHECK((fast - full * p).norm() < 1e-12);
  CHECK(fast.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fast.minCoeff() >= 0.0);
}

TEST_CASE("shot sampling is deterministic per seed and unbiased") {
  const MixedRadixSpace q2({2});
  Eigen::VectorXd sure(2);
  sure << 1, 0;
  const ShotResult all0 = sample_shots(sure, q2, 100, 4);
  CHECK(all0.counts.at("0") == 100);

  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  const ShotResult a = sample_shots(half, q2, 10000, 123);
  const ShotResult b = sample_shots(half, q2, 10000, 123);
  CHECK(a.counts == b.counts);
  CHECK(std::abs(a.counts.at("0") - 5000.0) < 5 * 50.0);  // 5 sigma

  Eigen::VectorXd invalid(2);
  invalid << 0.9, 0.2;
  CHECK_THROWS(sample_shots(invalid, q2, 10, 1));
}
