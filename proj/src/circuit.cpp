#include "qts/circuit.hpp"

#include <cmath>

#include "json.hpp"

namespace qts {

namespace {

const char* kind_name(GateKind k) {
  switch (k) {
    case GateKind::SubspaceRotation: return "subspace_rotation";
    case GateKind::VirtualZ: return "virtual_z";
    case GateKind::XPlus: return "x_plus";
    case GateKind::XMinus: return "x_minus";
    case GateKind::ControlledSubspaceX: return "controlled_subspace_x";
    case GateKind::PhysicalCNOT: return "physical_cnot";
    case GateKind::Delay: return "delay";
    case GateKind::DDXPulse: return "dd_x12";
  }
  throw std::logic_error("kind_name: bad kind");
}

GateKind kind_from_name(const std::string& s) {
  for (GateKind k : {GateKind::SubspaceRotation, GateKind::VirtualZ, GateKind::XPlus,
                     GateKind::XMinus, GateKind::ControlledSubspaceX,
                     GateKind::PhysicalCNOT, GateKind::Delay, GateKind::DDXPulse}) {
    if (s == kind_name(k)) return k;
  }
  throw std::invalid_argument("unknown gate kind: " + s);
}

}  // namespace

std::string GateInstruction::duration_key() const {
  if (!timing_label.empty()) return timing_label;
  switch (kind) {
    case GateKind::SubspaceRotation:
      return subspace == Subspace::S01 ? "sq01" : "sq12";
    case GateKind::VirtualZ: return "virtual_z";
    case GateKind::XPlus:
    case GateKind::XMinus: return "x_cycle";
    case GateKind::ControlledSubspaceX: return "controlled_subspace_x";
    case GateKind::PhysicalCNOT: return "cnot";
    case GateKind::Delay: return "delay";
    case GateKind::DDXPulse: return "dd_x12";
  }
  throw std::logic_error("duration_key: bad kind");
}

GateDurations GateDurations::ibmq_jakarta_like() {
  GateDurations d;
  d.ns = {
      {"sq01", 35.5},
      {"sq12", 78.5},
      {"x_cycle", 114.0},  // one (01) pulse plus one (12) pulse
      {"controlled_subspace_x", 227.5},
      {"cnot_qutrit_qubit", 341.0},
      {"cnot_qubit_qubit", 309.3125},
      {"cnot", 341.0},
      {"dd_x12", 78.5},
      {"virtual_z", 0.0},
  };
  return d;
}

double GateDurations::lookup(const GateInstruction& instr) const {
  if (instr.kind == GateKind::Delay) return instr.duration_ns;
  if (instr.kind == GateKind::VirtualZ) return 0.0;
  const std::string key = instr.duration_key();
  auto it = ns.find(key);
  if (it == ns.end())
    throw std::invalid_argument("GateDurations: missing entry for '" + key + "'");
  return it->second;
}

void Circuit::add(GateInstruction instr) {
  const int n = space.num_sites();
  for (int s : instr.sites) {
    if (s < 0 || s >= n) throw std::invalid_argument("Circuit::add: site out of range");
  }
  if (instr.kind == GateKind::VirtualZ && instr.duration_ns != 0.0)
    throw std::invalid_argument("Circuit::add: virtual-Z must have zero duration");
  if (instr.duration_ns < 0.0)
    throw std::invalid_argument("Circuit::add: negative duration");
  instructions.push_back(std::move(instr));
}

double Circuit::total_duration() const {
  std::vector<double> busy(space.num_sites(), 0.0);
  for (const auto& g : instructions) {
    double start = 0.0;
    for (int s : g.sites) start = std::max(start, busy[s]);
    for (int s : g.sites) busy[s] = start + g.duration_ns;
  }
  double total = 0.0;
  for (double t : busy) total = std::max(total, t);
  return total;
}

int Circuit::two_transmon_gate_count() const {
  int n = 0;
  for (const auto& g : instructions) {
    if (g.kind == GateKind::ControlledSubspaceX || g.kind == GateKind::PhysicalCNOT) ++n;
  }
  return n;
}

Operator instruction_matrix(const GateInstruction& instr, const MixedRadixSpace& space) {
  auto site_dim = [&](int k) { return space.dims[instr.sites[k]]; };
  switch (instr.kind) {
    case GateKind::SubspaceRotation:
    case GateKind::VirtualZ: {
      if (instr.sites.size() != 1) throw std::invalid_argument("single-site gate");
      Matrix m;
      if (site_dim(0) == 3) {
        m = subspace_rotation_matrix(instr.kind == GateKind::VirtualZ ? Axis::Z : instr.axis,
                                     instr.subspace, instr.theta, instr.axis_phase);
      } else {
        if (instr.subspace != Subspace::S01)
          throw std::invalid_argument("(12) rotation on a qubit site");
        m = rotation2(instr.kind == GateKind::VirtualZ ? Axis::Z : instr.axis,
                      instr.theta, instr.axis_phase);
      }
      return embed(Operator(MixedRadixSpace({site_dim(0)}), m), instr.sites, space);
    }
    case GateKind::XPlus:
    case GateKind::XMinus: {
      if (instr.sites.size() != 1 || site_dim(0) != 3)
        throw std::invalid_argument("X+/X- acts on one qutrit site");
      Matrix m = instr.kind == GateKind::XPlus ? x_plus() : x_minus();
      return embed(Operator(MixedRadixSpace({3}), m), instr.sites, space);
    }
    case GateKind::DDXPulse: {
      if (instr.sites.size() != 1 || site_dim(0) != 3)
        throw std::invalid_argument("DD pulse acts on one qutrit site");
      Matrix m = subspace_rotation_matrix(Axis::Y, Subspace::S12, M_PI);
      return embed(Operator(MixedRadixSpace({3}), m), instr.sites, space);
    }
    case GateKind::ControlledSubspaceX: {
      if (instr.sites.size() != 2 || site_dim(0) != 2 || site_dim(1) != 3)
        throw std::invalid_argument("controlled_subspace_x needs (qubit, qutrit) sites");
      return embed(Operator(MixedRadixSpace({2, 3}), controlled_subspace_x(instr.sign)),
                   instr.sites, space);
    }
    case GateKind::PhysicalCNOT: {
      if (instr.sites.size() != 2 || site_dim(1) != 2)
        throw std::invalid_argument("physical_cnot target must be a qubit");
      if (site_dim(0) == 3) {
        return embed(Operator(MixedRadixSpace({3, 2}), physical_cnot(instr.stark_phase)),
                     instr.sites, space);
      }
      Matrix m = Matrix::Identity(4, 4);
      m.block(2, 2, 2, 2) = pauli2(Axis::X);
      return embed(Operator(MixedRadixSpace({2, 2}), m), instr.sites, space);
    }
    case GateKind::Delay:
      return Operator::identity(space);
  }
  throw std::logic_error("instruction_matrix: bad kind");
}

Operator circuit_unitary(const Circuit& circuit) {
  Matrix u = Matrix::Identity(circuit.space.total_dim(), circuit.space.total_dim());
  for (const auto& g : circuit.instructions)
    u = instruction_matrix(g, circuit.space).matrix() * u;
  return Operator(circuit.space, std::move(u));
}

Circuit lower(const Circuit& circuit, const GateDurations& durations) {
  Circuit out(circuit.space);
  auto rot = [&](int site, Axis a, Subspace ss, double theta) {
    GateInstruction g{GateKind::SubspaceRotation, {site}, a, ss, theta};
    g.duration_ns = durations.lookup(g);
    return g;
  };
  for (const auto& g : circuit.instructions) {
    switch (g.kind) {
      case GateKind::XPlus:  // time order: Ry12(pi) then Ry01(pi)
        out.add(rot(g.sites[0], Axis::Y, Subspace::S12, M_PI));
        out.add(rot(g.sites[0], Axis::Y, Subspace::S01, M_PI));
        break;
      case GateKind::XMinus:
        out.add(rot(g.sites[0], Axis::Y, Subspace::S01, -M_PI));
        out.add(rot(g.sites[0], Axis::Y, Subspace::S12, -M_PI));
        break;
      case GateKind::DDXPulse:
        out.add(rot(g.sites[0], Axis::Y, Subspace::S12, M_PI));
        break;
      default:
        out.add(g);
    }
  }
  return out;
}

Operator circuit_unitary_with_rtn(const Circuit& circuit,
                                  const std::vector<double>& phase_rate_per_site) {
  const auto& space = circuit.space;
  if (static_cast<int>(phase_rate_per_site.size()) != space.num_sites())
    throw std::invalid_argument("circuit_unitary_with_rtn: rate vector size mismatch");
  const int D = space.total_dim();
  Matrix u = Matrix::Identity(D, D);
  for (const auto& g : circuit.instructions) {
    u = instruction_matrix(g, space).matrix() * u;
    if (g.kind != GateKind::Delay && g.kind != GateKind::PhysicalCNOT) continue;
    const double dt = g.duration_ns;
    if (dt == 0.0) continue;
    for (int s = 0; s < space.num_sites(); ++s) {
      if (space.dims[s] != 3) continue;
      const double phi = phase_rate_per_site[s] * dt;
      Matrix d = Matrix::Identity(3, 3);
      d(1, 1) = std::exp(Complex(0, +phi));
      d(2, 2) = std::exp(Complex(0, -phi));
      u = embed(Operator(MixedRadixSpace({3}), d), {s}, space).matrix() * u;
    }
  }
  return Operator(space, std::move(u));
}

DurationBreakdown duration_accounting(const Circuit& circuit,
                                      const GateDurations& durations) {
  DurationBreakdown out;
  std::vector<double> busy(circuit.space.num_sites(), 0.0);
  for (const auto& g : circuit.instructions) {
    const double dur = durations.lookup(g);
    double start = 0.0;
    for (int s : g.sites) start = std::max(start, busy[s]);
    for (int s : g.sites) busy[s] = start + dur;
    out.per_kind_ns[g.duration_key()] += dur;
  }
  for (double t : busy) out.total_ns = std::max(out.total_ns, t);
  return out;
}

std::string circuit_to_json(const Circuit& circuit) {
  nlohmann::json j;
  j["dims"] = circuit.space.dims;
  j["instructions"] = nlohmann::json::array();
  for (const auto& g : circuit.instructions) {
    nlohmann::json ji;
    ji["kind"] = kind_name(g.kind);
    ji["sites"] = g.sites;
    ji["duration_ns"] = g.duration_ns;
    if (g.kind == GateKind::SubspaceRotation) {
      ji["axis"] = g.axis == Axis::X ? "x" : (g.axis == Axis::Y ? "y" : "z");
      ji["subspace"] = g.subspace == Subspace::S01 ? "01" : "12";
      ji["theta"] = g.theta;
      ji["axis_phase"] = g.axis_phase;
    } else if (g.kind == GateKind::VirtualZ) {
      ji["subspace"] = g.subspace == Subspace::S01 ? "01" : "12";
      ji["theta"] = g.theta;
    } else if (g.kind == GateKind::ControlledSubspaceX) {
      ji["sign"] = g.sign;
    } else if (g.kind == GateKind::PhysicalCNOT) {
      ji["stark_phase"] = g.stark_phase;
    }
    j["instructions"].push_back(std::move(ji));
  }
  return j.dump(2);
}

Circuit circuit_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Circuit c(MixedRadixSpace(j.at("dims").get<std::vector<int>>()));
  for (const auto& ji : j.at("instructions")) {
    GateInstruction g;
    g.kind = kind_from_name(ji.at("kind").get<std::string>());
    g.sites = ji.at("sites").get<std::vector<int>>();
    g.duration_ns = ji.value("duration_ns", 0.0);
    if (ji.contains("axis")) {
      const std::string a = ji["axis"];
      g.axis = a == "x" ? Axis::X : (a == "y" ? Axis::Y : Axis::Z);
    }
    if (ji.contains("subspace"))
      g.subspace = ji["subspace"] == "01" ? Subspace::S01 : Subspace::S12;
    g.theta = ji.value("theta", 0.0);
    g.axis_phase = ji.value("axis_phase", 0.0);
    g.sign = ji.value("sign", +1);
    g.stark_phase = ji.value("stark_phase", 0.0);
    c.add(std::move(g));
  }
  return c;
}

}  // namespace qts
