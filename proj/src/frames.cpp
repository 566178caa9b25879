#include "qts/frames.hpp"

#include <cmath>

namespace qts {

namespace {

double wrap_2pi(double x) {
  x = std::fmod(x, 2.0 * M_PI);
  if (x < 0) x += 2.0 * M_PI;
  return x;
}

}  // namespace

FrameState FrameState::for_space(const MixedRadixSpace& space, double alpha) {
  FrameState f;
  f.sites.resize(space.num_sites());
  for (int s = 0; s < space.num_sites(); ++s)
    f.sites[s].alpha = (space.dims[s] == 3) ? alpha : 0.0;
  return f;
}

FrameState advance(FrameState frame, int site, double dt) {
  if (dt < 0) throw std::invalid_argument("advance: negative dt");
  auto& sf = frame.sites.at(site);
  sf.phi12 = wrap_2pi(sf.phi12 + sf.alpha * dt);
  frame.clock_ns += dt;
  return frame;
}

double resolve_pulse_phase(const FrameState& frame, int site, Subspace ij) {
  const auto& sf = frame.sites.at(site);
  return ij == Subspace::S01 ? sf.phi01 : sf.phi12;
}

FrameState absorb_virtual_z(FrameState frame, int site, Subspace ij, double theta) {
  auto& sf = frame.sites.at(site);
  // Exact level-phase bookkeeping: a (01) virtual-Z moves |1> by theta/2, which
  // shifts the (12) relative phase as well, and symmetrically for (12).
  if (ij == Subspace::S01) {
    sf.phi01 = wrap_2pi(sf.phi01 + theta);
    sf.phi12 = wrap_2pi(sf.phi12 - theta / 2.0);
  } else {
    sf.phi12 = wrap_2pi(sf.phi12 + theta);
    sf.phi01 = wrap_2pi(sf.phi01 - theta / 2.0);
  }
  return frame;
}

namespace {

// Emit virtual-Z corrections realizing diag(1, e^{i phi01}, e^{i (phi01+phi12)})
// up to a site-global phase, then clear the site frame.
void flush_site(Circuit& out, FrameState& frame, int site) {
  auto& sf = frame.sites[site];
  const bool qutrit = out.space.dims[site] == 3;
  if (qutrit) {
    const double ta = (4.0 * sf.phi01 + 2.0 * sf.phi12) / 3.0;
    const double tb = (2.0 * sf.phi01 + 4.0 * sf.phi12) / 3.0;
    if (ta != 0.0)
      out.add({GateKind::VirtualZ, {site}, Axis::Z, Subspace::S01, ta});
    if (tb != 0.0)
      out.add({GateKind::VirtualZ, {site}, Axis::Z, Subspace::S12, tb});
  } else if (sf.phi01 != 0.0) {
    out.add({GateKind::VirtualZ, {site}, Axis::Z, Subspace::S01, sf.phi01});
  }
  sf.phi01 = 0.0;
  sf.phi12 = 0.0;
}

}  // namespace

Circuit compile_with_frames(const Circuit& circuit, FrameState frames,
                            const GateDurations& durations) {
  if (static_cast<int>(frames.sites.size()) != circuit.space.num_sites())
    throw std::invalid_argument("compile_with_frames: frame/site count mismatch");
  const Circuit lowered = lower(circuit, durations);
  Circuit out(circuit.space);

  for (const auto& g : lowered.instructions) {
    switch (g.kind) {
      case GateKind::VirtualZ:
        frames = absorb_virtual_z(frames, g.sites[0], g.subspace, g.theta);
        break;
      case GateKind::SubspaceRotation: {
        if (g.axis == Axis::Z) {  // diagonal, no pulse needed
          frames = absorb_virtual_z(frames, g.sites[0], g.subspace, g.theta);
          break;
        }
        GateInstruction resolved = g;
        resolved.axis_phase =
            g.axis_phase - resolve_pulse_phase(frames, g.sites[0], g.subspace);
        out.add(resolved);
        if (g.subspace == Subspace::S01 && circuit.space.dims[g.sites[0]] == 3) {
          frames = advance(frames, g.sites[0], g.duration_ns);
        } else {
          frames.clock_ns += g.duration_ns;
        }
        break;
      }
      case GateKind::ControlledSubspaceX:
      case GateKind::PhysicalCNOT: {
        for (int s : g.sites) flush_site(out, frames, s);
        out.add(g);
        if (g.kind == GateKind::ControlledSubspaceX)
          frames = advance(frames, g.sites[1], g.duration_ns);
        else
          frames.clock_ns += g.duration_ns;
        break;
      }
      case GateKind::Delay:
        out.add(g);
        frames.clock_ns += g.duration_ns;
        break;
      default:
        throw std::logic_error("compile_with_frames: unexpected kind after lowering");
    }
  }
  for (int s = 0; s < circuit.space.num_sites(); ++s) flush_site(out, frames, s);
  return out;
}

Operator circuit_unitary_with_precession(const Circuit& circuit,
                                         const std::vector<double>& alpha_per_site) {
  const auto& space = circuit.space;
  if (static_cast<int>(alpha_per_site.size()) != space.num_sites())
    throw std::invalid_argument("circuit_unitary_with_precession: alpha size mismatch");
  const int D = space.total_dim();
  Matrix u = Matrix::Identity(D, D);
  auto slip = [&](int site, double dt) {
    if (space.dims[site] != 3 || dt == 0.0) return;
    Matrix p = Matrix::Identity(3, 3);
    p(2, 2) = std::exp(Complex(0, -alpha_per_site[site] * dt));
    u = embed(Operator(MixedRadixSpace({3}), p), {site}, space).matrix() * u;
  };
  for (const auto& g : circuit.instructions) {
    u = instruction_matrix(g, space).matrix() * u;
    if (g.kind == GateKind::SubspaceRotation && g.subspace == Subspace::S01 &&
        g.axis != Axis::Z) {
      slip(g.sites[0], g.duration_ns);
    } else if (g.kind == GateKind::ControlledSubspaceX) {
      slip(g.sites[1], g.duration_ns);
    }
  }
  return Operator(space, std::move(u));
}

}  // namespace qts
