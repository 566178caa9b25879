#include "qts/decompositions.hpp"

#include <cmath>

namespace qts {

namespace {

// Virtual-Z pair realizing diag(1, e^{i phi1}, e^{i phi2}) on a qutrit up to
// global phase: vz01(ta) vz12(tb) = e^{-i ta/2} diag(1, e^{i(ta - tb/2)+i ta/2}...)
// solved as ta = 2(phi1 + phi2)/3, tb = 2(2 phi2 - phi1)/3.
std::pair<double, double> vz_pair_for(double phi1, double phi2) {
  return {2.0 * (phi1 + phi2) / 3.0, 2.0 * (2.0 * phi2 - phi1) / 3.0};
}

GateInstruction timed(GateInstruction g, const GateDurations& durations) {
  g.duration_ns = durations.lookup(g);
  return g;
}

void add_vz(Circuit& c, int site, Subspace ss, double theta) {
  GateInstruction g{GateKind::VirtualZ, {site}};
  g.subspace = ss;
  g.theta = theta;
  c.add(g);
}

void add_cnot_qq(Circuit& c, int control, int target, const GateDurations& durations) {
  GateInstruction g{GateKind::PhysicalCNOT, {control, target}};
  g.timing_label = "cnot_qubit_qubit";
  c.add(timed(g, durations));
}

// H up to global phase: Rz(pi) then Ry01(pi/2).
void add_hadamard(Circuit& c, int site, const GateDurations& durations) {
  add_vz(c, site, Subspace::S01, M_PI);
  GateInstruction g{GateKind::SubspaceRotation, {site}};
  g.axis = Axis::Y;
  g.subspace = Subspace::S01;
  g.theta = M_PI / 2.0;
  c.add(timed(g, durations));
}

// T^(sign) up to global phase.
void add_t(Circuit& c, int site, int sign) {
  add_vz(c, site, Subspace::S01, sign * M_PI / 4.0);
}

// The |2>-controlled NOT body on (control site, target site) of an existing
// circuit: two device CNOTs, with the DD variant interleaving X12 pulses and
// a two-CNOT-long delay on the control.
void add_two_controlled_body(Circuit& c, int control, int target, bool dd,
                             const CRParams& cr, const GateDurations& durations) {
  GateInstruction cnot{GateKind::PhysicalCNOT, {control, target}};
  cnot.stark_phase = cr.stark_phase_per_cnot;
  cnot.timing_label = "cnot_qutrit_qubit";
  cnot = timed(cnot, durations);
  c.add(cnot);
  if (dd) {
    GateInstruction pulse{GateKind::DDXPulse, {control}};
    pulse = timed(pulse, durations);
    GateInstruction idle{GateKind::Delay, {control}};
    idle.duration_ns = 2.0 * cnot.duration_ns;
    c.add(pulse);
    c.add(idle);
    c.add(pulse);
  }
  c.add(cnot);
}

// Phase correction cancelling the composite's residual on the control:
// no DD:  phases (1, 1, -i e^{2i ts}) on levels (0, 1, 2);
// DD:     phases (1, -1, +i e^{2i ts}).
void add_two_controlled_correction(Circuit& c, int control, bool dd, const CRParams& cr) {
  const double ts = cr.stark_phase_per_cnot;
  const double phi1 = dd ? M_PI : 0.0;
  const double phi2 = (dd ? -M_PI / 2.0 : M_PI / 2.0) - 2.0 * ts;
  const auto [ta, tb] = vz_pair_for(phi1, phi2);
  add_vz(c, control, Subspace::S01, ta);
  add_vz(c, control, Subspace::S12, tb);
}

DecompositionReport make_report(Circuit c, const Operator& ideal, bool qubit_subspace,
                                const GateDurations& durations) {
  Operator u = circuit_unitary(c);
  const EquivalenceResult eq = verify_equivalence(u, ideal, qubit_subspace);
  const double total = duration_accounting(c, durations).total_ns;
  const int gates = c.two_transmon_gate_count();
  return DecompositionReport{std::move(c), std::move(u), eq.fidelity, eq.corrections,
                             total, gates};
}

std::vector<int> block_indices(const MixedRadixSpace& space, bool qubit_subspace) {
  std::vector<int> idx;
  for (int i = 0; i < space.total_dim(); ++i) {
    if (qubit_subspace) {
      bool ok = true;
      for (int d : space.digits_of(i))
        if (d > 1) ok = false;
      if (!ok) continue;
    }
    idx.push_back(i);
  }
  return idx;
}

}  // namespace

Operator ideal_ccnot8() {
  const MixedRadixSpace space({2, 2, 2});
  Matrix m = Matrix::Identity(8, 8);
  m(6, 6) = m(7, 7) = 0;
  m(6, 7) = m(7, 6) = 1;
  return Operator(space, std::move(m));
}

Operator ideal_ccnot_mixed() {
  const MixedRadixSpace space({2, 3, 2});
  Matrix m = Matrix::Identity(12, 12);
  const int a = space.index_of({1, 1, 0});
  const int b = space.index_of({1, 1, 1});
  m(a, a) = m(b, b) = 0;
  m(a, b) = m(b, a) = 1;
  return Operator(space, std::move(m));
}

Operator ideal_two_controlled_not() {
  const MixedRadixSpace space({3, 2});
  Matrix m = Matrix::Identity(6, 6);
  m(4, 4) = m(5, 5) = 0;
  m(4, 5) = m(5, 4) = 1;
  return Operator(space, std::move(m));
}

Circuit two_controlled_not(bool corrected, const CRParams& cr,
                           const GateDurations& durations) {
  cr.validate();
  Circuit c(MixedRadixSpace({3, 2}));
  add_two_controlled_body(c, 0, 1, /*dd=*/false, cr, durations);
  if (corrected) add_two_controlled_correction(c, 0, /*dd=*/false, cr);
  return c;
}

DecompositionReport ternary_toffoli(bool corrected, bool dd, const CRParams& cr,
                                    const GateDurations& durations) {
  cr.validate();
  Circuit c(MixedRadixSpace({2, 3, 2}));

  auto add_framing = [&](int sign) {
    GateInstruction xm{GateKind::XMinus, {kSiteC2}};
    c.add(timed(xm, durations));
    GateInstruction cx{GateKind::ControlledSubspaceX, {kSiteC1, kSiteC2}};
    cx.sign = sign;
    c.add(timed(cx, durations));
    GateInstruction xp{GateKind::XPlus, {kSiteC2}};
    c.add(timed(xp, durations));
  };

  // X- CXp X+ conjugates the c1-controlled (01) flip into a (12) flip, routing
  // |c1 c2> = |11> onto the c2 = |2> level for the two-CNOT body.
  add_framing(+1);
  add_two_controlled_body(c, kSiteC2, kSiteT, dd, cr, durations);
  if (corrected) add_two_controlled_correction(c, kSiteC2, dd, cr);
  add_framing(-1);

  return make_report(std::move(c), ideal_ccnot_mixed(), /*qubit_subspace=*/true,
                     durations);
}

DecompositionReport binary_toffoli_8cnot(const GateDurations& durations) {
  // CCZ as a phase polynomial over nearest-neighbor CNOT parities on the line
  // 0-1-2, conjugated by H on the target (site 2).
  Circuit c(MixedRadixSpace({2, 2, 2}));
  add_hadamard(c, 2, durations);
  add_t(c, 0, +1);
  add_t(c, 1, +1);
  add_t(c, 2, +1);
  add_cnot_qq(c, 1, 0, durations);  // wire 0 holds x0^x1
  add_t(c, 0, -1);
  add_cnot_qq(c, 2, 1, durations);  // wire 1 holds x1^x2
  add_t(c, 1, -1);
  add_cnot_qq(c, 1, 0, durations);  // wire 0 holds x0^x2
  add_t(c, 0, -1);
  add_cnot_qq(c, 2, 1, durations);  // wire 1 back to x1
  add_cnot_qq(c, 1, 0, durations);  // wire 0 holds x0^x1^x2
  add_t(c, 0, +1);
  add_cnot_qq(c, 2, 1, durations);
  add_cnot_qq(c, 1, 0, durations);  // wire 0 back to x0
  add_cnot_qq(c, 2, 1, durations);  // wire 1 back to x1
  add_hadamard(c, 2, durations);

  return make_report(std::move(c), ideal_ccnot8(), /*qubit_subspace=*/false, durations);
}

DecompositionReport binary_toffoli_6cnot(const GateDurations& durations) {
  Circuit c(MixedRadixSpace({2, 2, 2}));
  add_hadamard(c, 2, durations);
  add_cnot_qq(c, 1, 2, durations);
  add_t(c, 2, -1);
  add_cnot_qq(c, 0, 2, durations);
  add_t(c, 2, +1);
  add_cnot_qq(c, 1, 2, durations);
  add_t(c, 2, -1);
  add_cnot_qq(c, 0, 2, durations);
  add_t(c, 2, +1);
  add_t(c, 1, +1);
  add_hadamard(c, 2, durations);
  add_cnot_qq(c, 0, 1, durations);
  add_t(c, 0, +1);
  add_t(c, 1, -1);
  add_cnot_qq(c, 0, 1, durations);

  return make_report(std::move(c), ideal_ccnot8(), /*qubit_subspace=*/false, durations);
}

EquivalenceResult verify_equivalence(const Operator& u, const Operator& ideal,
                                     bool qubit_subspace, double leakage_threshold) {
  const MixedRadixSpace& space = u.space();
  const std::vector<int> idx = block_indices(space, qubit_subspace);
  const int nb = static_cast<int>(idx.size());

  // The ideal may live on the full space or directly on the restricted block
  // (e.g. the 3-qubit CCNOT compared against a qutrit-routed circuit).
  bool ideal_on_block = false;
  if (!(u.space() == ideal.space())) {
    std::vector<int> block_dims;
    for (int d : space.dims) block_dims.push_back(qubit_subspace ? std::min(d, 2) : d);
    if (!(qubit_subspace && ideal.space() == MixedRadixSpace(block_dims)))
      throw std::invalid_argument("verify_equivalence: space mismatch");
    ideal_on_block = true;
  }

  Matrix ub(nb, nb), vb(nb, nb);
  for (int col = 0; col < nb; ++col)
    for (int row = 0; row < nb; ++row) {
      ub(row, col) = u.matrix()(idx[row], idx[col]);
      vb(row, col) = ideal_on_block ? ideal.matrix()(row, col)
                                    : ideal.matrix()(idx[row], idx[col]);
    }

  EquivalenceResult out;
  for (int col = 0; col < nb; ++col) {
    double inside = 0.0;
    for (int row = 0; row < nb; ++row) inside += std::norm(ub(row, col));
    out.leakage = std::max(out.leakage, 1.0 - inside);
  }
  out.leakage_status =
      out.leakage <= leakage_threshold ? LeakageStatus::Ok : LeakageStatus::AboveThreshold;

  // Column phases of V^dag U, fitted by a per-site additive model anchored on
  // the single-excitation basis columns (exact for any product-diagonal
  // residual, i.e. one removable by local virtual-Z corrections).
  const Matrix r = vb.adjoint() * ub;
  std::vector<double> theta(nb, 0.0);
  for (int col = 0; col < nb; ++col)
    theta[col] = std::abs(r(col, col)) > 1e-9 ? std::arg(r(col, col)) : 0.0;

  const int nsites = space.num_sites();
  auto block_dim = [&](int s) {
    return qubit_subspace ? std::min(space.dims[s], 2) : space.dims[s];
  };
  // Map block-local digits to a block column index.
  auto block_col = [&](const std::vector<int>& digits) {
    const int full = space.index_of(digits);
    for (int col = 0; col < nb; ++col)
      if (idx[col] == full) return col;
    throw std::logic_error("verify_equivalence: index not in block");
  };

  const double g = theta[block_col(std::vector<int>(nsites, 0))];
  std::vector<std::vector<double>> a(nsites);
  for (int s = 0; s < nsites; ++s) {
    a[s].assign(block_dim(s), 0.0);
    for (int d = 1; d < block_dim(s); ++d) {
      std::vector<int> digits(nsites, 0);
      digits[s] = d;
      a[s][d] = theta[block_col(digits)] - g;
    }
  }

  // Apply the fitted correction on the input side: U_corr = U diag(e^{-i p_j}).
  out.corrected_unitary = ub;
  for (int col = 0; col < nb; ++col) {
    const std::vector<int> digits = space.digits_of(idx[col]);
    double predicted = g;
    for (int s = 0; s < nsites; ++s) predicted += a[s][digits[s]];
    out.corrected_unitary.col(col) *= std::exp(Complex(0, -(predicted - g)));
  }
  out.fidelity = std::abs((vb.adjoint() * out.corrected_unitary).trace()) / nb;

  for (int s = 0; s < nsites; ++s) {
    if (block_dim(s) == 2) {
      out.corrections.push_back({s, Subspace::S01, -a[s][1]});
    } else {
      const auto [ta, tb] = vz_pair_for(-a[s][1], -a[s][2]);
      out.corrections.push_back({s, Subspace::S01, ta});
      out.corrections.push_back({s, Subspace::S12, tb});
    }
  }
  return out;
}

EquivalenceResult verify_equivalence(const Circuit& circuit, const Operator& ideal,
                                     bool qubit_subspace, double leakage_threshold) {
  return verify_equivalence(circuit_unitary(circuit), ideal, qubit_subspace,
                            leakage_threshold);
}

}  // namespace qts
