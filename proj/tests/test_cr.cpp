#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qts/cr.hpp"
#include "qts/gates.hpp"

using namespace qts;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

}  // namespace

TEST_CASE("u_zx blocks follow the per-level rotation rates") {
  const CRParams p;
  CHECK((u_zx(0.0).matrix() - Matrix::Identity(6, 6)).norm() < 1e-14);

  const Matrix u1 = u_zx(1.0).matrix();
  // Control |0>: Rx(+pi); control |1>: Rx(-pi); both give <Z> = -1.
  CHECK((u1.block(0, 0, 2, 2) - rotation2(Axis::X, M_PI)).norm() < 1e-13);
  CHECK((u1.block(2, 2, 2, 2) - rotation2(Axis::X, -M_PI)).norm() < 1e-13);
  // Control |2>: half rotation Rx(pi/2) with the Stark phase.
  const Matrix expect2 = std::exp(Complex(0, p.stark_phase_per_cnot)) *
                         rotation2(Axis::X, M_PI / 2.0);
  CHECK((u1.block(4, 4, 2, 2) - expect2).norm() < 1e-13);
}

TEST_CASE("u_zx composes additively in duration") {
  const Matrix lhs = (u_zx(0.35) * u_zx(0.85)).matrix();
  const Matrix rhs = u_zx(1.2).matrix();
  CHECK((lhs - rhs).norm() < 1e-12);
  CHECK_THROWS(u_zx(-0.1));
}

TEST_CASE("parameter validation enforces echo symmetry and positive duration") {
  CRParams bad_echo;
  bad_echo.r1 = -0.9;  // |r0| != |r1|
  CHECK_THROWS(bad_echo.validate());
  CRParams bad_duration;
  bad_duration.cnot_duration_ns = 0.0;
  CHECK_THROWS(bad_duration.validate());
  CHECK_NOTHROW(CRParams{}.validate());
}

TEST_CASE("ecr_scan returns cos(r_l pi tau) for the target Z expectation") {
  const auto grid = linspace(0.0, 2.0, 41);

  const auto c0 = ecr_scan(0, grid);
  const auto c1 = ecr_scan(1, grid);
  const auto c2 = ecr_scan(2, grid);
  REQUIRE(c0.size() == grid.size());

  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(c0[i].z_expectation ==
          doctest::Approx(std::cos(M_PI * grid[i])).epsilon(1e-10));
    // <Z> is even in the rotation sign, so control |1> matches control |0>.
    CHECK(c1[i].z_expectation == doctest::Approx(c0[i].z_expectation).epsilon(1e-10));
    CHECK(c2[i].z_expectation ==
          doctest::Approx(std::cos(M_PI * grid[i] / 2.0)).epsilon(1e-10));
  }
  // tau = 0.5 zero crossing for the full rate; tau = 2 full inversion at half rate.
  CHECK(std::abs(c0[10].z_expectation) < 1e-10);
  CHECK(c2.back().z_expectation == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("stark phase accumulates linearly in drive duration") {
  CHECK(stark_phase_accumulated(0.0) == doctest::Approx(0.0));
  CHECK(stark_phase_accumulated(1.0) == doctest::Approx(1.0833));
  CHECK(stark_phase_accumulated(2.0) == doctest::Approx(2.1666));
}

TEST_CASE("cosine frequency fit recovers the half-rate ratio") {
  const auto grid = linspace(0.0, 2.0, 81);
  std::vector<double> y1(grid.size()), y2(grid.size());
  const auto c1 = ecr_scan(1, grid);
  const auto c2 = ecr_scan(2, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    y1[i] = c1[i].z_expectation;
    y2[i] = c2[i].z_expectation;
  }
  const double w1 = fit_cosine_frequency(grid, y1, 3.0 * M_PI);
  const double w2 = fit_cosine_frequency(grid, y2, 3.0 * M_PI);
  CHECK(w1 == doctest::Approx(M_PI).epsilon(1e-9));
  CHECK(w2 / w1 == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("cosine frequency fit tolerates noisy samples") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 0.05);
  const auto grid = linspace(0.0, 2.0, 41);
  std::vector<double> y(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) y[i] = std::cos(1.9 * grid[i]) + g(rng);
  const double w = fit_cosine_frequency(grid, y, 3.0 * M_PI);
  CHECK(w == doctest::Approx(1.9).epsilon(0.03));
}
