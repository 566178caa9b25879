#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qts/frames.hpp"

using namespace qts;

namespace {

double phase_distance(const Matrix& a, const Matrix& b) {
  // ||a - e^{i phi} b|| minimized over the global phase phi.
  const Complex tr = (b.adjoint() * a).trace();
  const Complex phase = std::abs(tr) > 1e-12 ? tr / std::abs(tr) : Complex(1, 0);
  return (a - phase * b).norm();
}

}  // namespace

TEST_CASE("for_space assigns the anharmonicity to qutrit sites only") {
  const MixedRadixSpace space({2, 3, 2});
  const FrameState f = FrameState::for_space(space, -1.5);
  REQUIRE(f.sites.size() == 3);
  CHECK(f.sites[0].alpha == 0.0);
  CHECK(f.sites[1].alpha == -1.5);
  CHECK(f.sites[2].alpha == 0.0);
  CHECK(f.clock_ns == 0.0);
}

TEST_CASE("advance precesses the (12) frame by alpha*dt and is additive") {
  const MixedRadixSpace q3({3});
  const double alpha = -2.0 * M_PI * 0.33;
  FrameState f = FrameState::for_space(q3, alpha);

  const FrameState same = advance(f, 0, 0.0);
  CHECK(resolve_pulse_phase(same, 0, Subspace::S12) == 0.0);
  CHECK(resolve_pulse_phase(same, 0, Subspace::S01) == 0.0);

  const double dt = 10.0;
  const FrameState one = advance(f, 0, dt);
  const double expect = std::fmod(std::fmod(alpha * dt, 2 * M_PI) + 2 * M_PI, 2 * M_PI);
  CHECK(resolve_pulse_phase(one, 0, Subspace::S12) ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK(resolve_pulse_phase(one, 0, Subspace::S01) == 0.0);
  CHECK(one.clock_ns == doctest::Approx(dt));

  const FrameState two = advance(advance(f, 0, dt / 2), 0, dt / 2);
  CHECK(resolve_pulse_phase(two, 0, Subspace::S12) ==
        doctest::Approx(resolve_pulse_phase(one, 0, Subspace::S12)).epsilon(1e-12));

  CHECK_THROWS(advance(f, 0, -1.0));
}

TEST_CASE("absorbed virtual-Z contributes to the resolved pulse phase") {
  const MixedRadixSpace q3({3});
  FrameState f = FrameState::for_space(q3, 0.0);
  f = absorb_virtual_z(f, 0, Subspace::S12, 0.9);
  CHECK(resolve_pulse_phase(f, 0, Subspace::S12) == doctest::Approx(0.9));
  // The shared |1> level couples the two subspace phases.
  f = absorb_virtual_z(f, 0, Subspace::S12, -0.9);
  CHECK(resolve_pulse_phase(f, 0, Subspace::S12) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(resolve_pulse_phase(f, 0, Subspace::S01) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("a circuit of only virtual-Z gates compiles to diagonal corrections") {
  const MixedRadixSpace q3({3});
  Circuit c(q3);
  c.add({GateKind::VirtualZ, {0}, Axis::Z, Subspace::S01, 0.4});
  c.add({GateKind::VirtualZ, {0}, Axis::Z, Subspace::S12, -1.1});

  const Circuit compiled =
      compile_with_frames(c, FrameState::for_space(q3, 0.0));
  for (const auto& g : compiled.instructions) CHECK(g.kind == GateKind::VirtualZ);
  CHECK(phase_distance(circuit_unitary(compiled).matrix(),
                       circuit_unitary(c).matrix()) < 1e-10);
}

TEST_CASE("x_plus then x_minus compiles to the identity with zero anharmonicity") {
  const MixedRadixSpace q3({3});
  Circuit c(q3);
  c.add({GateKind::XPlus, {0}});
  c.add({GateKind::XMinus, {0}});
  const Circuit compiled =
      compile_with_frames(c, FrameState::for_space(q3, 0.0));
  CHECK(phase_distance(circuit_unitary(compiled).matrix(),
                       Matrix::Identity(3, 3)) < 1e-10);
}

TEST_CASE("compiled unitary matches the logical circuit for alpha = 0") {
  const MixedRadixSpace space({2, 3, 2});
  Circuit c(space);
  c.add({GateKind::XMinus, {1}});
  c.add({GateKind::ControlledSubspaceX, {0, 1}, Axis::X, Subspace::S01, 0, 0, +1});
  c.add({GateKind::XPlus, {1}});
  c.add({GateKind::VirtualZ, {1}, Axis::Z, Subspace::S12, 0.37});

  const Circuit compiled =
      compile_with_frames(c, FrameState::for_space(space, 0.0));
  CHECK(phase_distance(circuit_unitary(compiled).matrix(),
                       circuit_unitary(c).matrix()) < 1e-10);
}

TEST_CASE("frame compilation cancels the precession of timed (01) pulses") {
  // Execute the compiled circuit under the hardware model where every timed
  // (01) pulse slips the |2> phase by alpha*duration; the frame-resolved
  // pulse phases must restore the logical unitary up to global phase.
  const MixedRadixSpace q3({3});
  const double alpha = -2.0 * M_PI * 0.33;

  Circuit c(q3);
  c.add({GateKind::XPlus, {0}});
  const Circuit compiled = compile_with_frames(c, FrameState::for_space(q3, alpha));
  const Operator executed = circuit_unitary_with_precession(compiled, {alpha});
  CHECK(phase_distance(executed.matrix(), x_plus()) < 1e-10);

  Circuit round_trip(q3);
  round_trip.add({GateKind::XPlus, {0}});
  round_trip.add({GateKind::XMinus, {0}});
  const Circuit compiled2 =
      compile_with_frames(round_trip, FrameState::for_space(q3, alpha));
  const Operator executed2 = circuit_unitary_with_precession(compiled2, {alpha});
  CHECK(phase_distance(executed2.matrix(), Matrix::Identity(3, 3)) < 1e-10);
}

TEST_CASE("single-subspace circuits are unaffected by the other frame") {
  // A circuit that never populates |2> compiles to the same (01)-block action
  // regardless of the anharmonicity.
  const MixedRadixSpace q3({3});
  Circuit c(q3);
  c.add({GateKind::SubspaceRotation, {0}, Axis::Y, Subspace::S01, M_PI / 2});
  c.add({GateKind::SubspaceRotation, {0}, Axis::X, Subspace::S01, M_PI / 3});

  const double alpha = 1.7;
  const Circuit compiled = compile_with_frames(c, FrameState::for_space(q3, alpha));
  const Operator executed = circuit_unitary_with_precession(compiled, {alpha});
  const Matrix logical = circuit_unitary(c).matrix();
  CHECK(phase_distance(executed.matrix().block(0, 0, 2, 2).eval(),
                       logical.block(0, 0, 2, 2).eval()) < 1e-10);
}
