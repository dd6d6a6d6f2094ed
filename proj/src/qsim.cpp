#include "qforest/qsim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qforest/error.hpp"

namespace qforest::qsim {

namespace {

void check_qubit_count(int nq) {
  if (nq < kMinQubits || nq > kMaxQubits) {
    throw ConfigError("qubit count " + std::to_string(nq) + " outside supported range [" +
                      std::to_string(kMinQubits) + ", " + std::to_string(kMaxQubits) + "]");
  }
}

void check_gate(const GateOp& g, int nq, std::size_t n_angles) {
  auto bad = [](const std::string& msg) { throw StructuralError("invalid gate: " + msg); };
  if (g.target < 0 || g.target >= nq) bad("target " + std::to_string(g.target) + " out of range");
  if (g.kind == GateKind::CNOT) {
    if (!g.control) bad("CNOT without control");
    if (*g.control < 0 || *g.control >= nq) bad("control " + std::to_string(*g.control) + " out of range");
    if (*g.control == g.target) bad("control equals target");
    if (g.angle_slot) bad("CNOT carries an angle slot");
  } else {
    if (g.control) bad("rotation carries a control");
    if (!g.angle_slot) bad("rotation without angle slot");
    if (*g.angle_slot >= n_angles) bad("angle slot " + std::to_string(*g.angle_slot) + " >= n_angles");
  }
}

void apply_ry(std::span<Amplitude> a, int q, double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i & bit) continue;
    const Amplitude a0 = a[i];
    const Amplitude a1 = a[i | bit];
    a[i] = c * a0 - s * a1;
    a[i | bit] = s * a0 + c * a1;
  }
}

void apply_rz(std::span<Amplitude> a, int q, double theta) {
  const Amplitude p0 = std::polar(1.0, -theta / 2);
  const Amplitude p1 = std::polar(1.0, theta / 2);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= (i & bit) ? p1 : p0;
}

void apply_cnot(std::span<Amplitude> a, int control, int target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(a[i], a[i | tbit]);
  }
}

}  // namespace

Statevector::Statevector(int nq) : nq_(nq) {
  check_qubit_count(nq);
  amps_.assign(std::size_t{1} << nq, Amplitude{0.0, 0.0});
  amps_[0] = 1.0;
}

double Statevector::norm_squared() const noexcept {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

Circuit::Circuit(int nq, std::vector<GateOp> ops, std::size_t n_angles)
    : nq_(nq), ops_(std::move(ops)), n_angles_(n_angles) {
  check_qubit_count(nq);
  for (const auto& g : ops_) check_gate(g, nq_, n_angles_);
}

Statevector init_state(int nq) { return Statevector(nq); }

void apply_rotation_inplace(Statevector& state, GateKind kind, int target, double angle) {
  if (!std::isfinite(angle)) throw NumericError("non-finite rotation angle");
  if (target < 0 || target >= state.num_qubits()) throw StructuralError("rotation target out of range");
  switch (kind) {
    case GateKind::RY: apply_ry(state.amplitudes(), target, angle); break;
    case GateKind::RZ: apply_rz(state.amplitudes(), target, angle); break;
    case GateKind::CNOT: throw StructuralError("CNOT is not a rotation");
  }
}

void apply_gate_inplace(Statevector& state, const GateOp& gate, std::span<const double> angles) {
  check_gate(gate, state.num_qubits(), angles.size());
  if (gate.kind == GateKind::CNOT) {
    apply_cnot(state.amplitudes(), *gate.control, gate.target);
    return;
  }
  apply_rotation_inplace(state, gate.kind, gate.target, angles[*gate.angle_slot]);
}

Statevector apply_gate(Statevector state, const GateOp& gate, std::span<const double> angles) {
  apply_gate_inplace(state, gate, angles);
  return state;
}

Statevector run_circuit(const Circuit& circuit, std::span<const double> angles) {
  if (angles.size() != circuit.num_angles()) {
    throw StructuralError("angle vector has " + std::to_string(angles.size()) + " entries, circuit expects " +
                          std::to_string(circuit.num_angles()));
  }
  Statevector state(circuit.num_qubits());
  for (const auto& g : circuit.ops()) apply_gate_inplace(state, g, angles);
  return state;
}

double expect_z(const Statevector& state, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits()) throw StructuralError("expect_z qubit out of range");
  const std::size_t bit = std::size_t{1} << qubit;
  double e = 0.0;
  const auto a = state.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) e += (i & bit) ? -std::norm(a[i]) : std::norm(a[i]);
  return e;
}

std::vector<double> expect_z_all(const Statevector& state) {
  std::vector<double> z(static_cast<std::size_t>(state.num_qubits()), 0.0);
  const auto a = state.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = std::norm(a[i]);
    for (int q = 0; q < state.num_qubits(); ++q) z[q] += ((i >> q) & 1U) ? -p : p;
  }
  return z;
}

Matrix grad_expectations(const Circuit& circuit, std::span<const double> angles) {
  std::vector<double> unused;
  return grad_expectations(circuit, angles, unused);
}

Matrix grad_expectations(const Circuit& circuit, std::span<const double> angles,
                         std::vector<double>& expectations) {
  if (angles.size() != circuit.num_angles()) throw StructuralError("angle vector length mismatch");
  const int nq = circuit.num_qubits();
  const auto& ops = circuit.ops();

  // prefix[g] is the state before op g is applied.
  std::vector<Statevector> prefix;
  prefix.reserve(ops.size() + 1);
  prefix.emplace_back(nq);
  for (const auto& g : ops) {
    prefix.push_back(prefix.back());
    apply_gate_inplace(prefix.back(), g, angles);
  }
  expectations = expect_z_all(prefix.back());

  Matrix jac(static_cast<std::size_t>(nq), circuit.num_angles(), 0.0);
  constexpr double kShift = std::numbers::pi / 2;
  for (std::size_t g = 0; g < ops.size(); ++g) {
    const GateOp& op = ops[g];
    if (!op.is_rotation()) continue;
    const double theta = angles[*op.angle_slot];
    for (const double sign : {1.0, -1.0}) {
      Statevector psi = prefix[g];
      apply_rotation_inplace(psi, op.kind, op.target, theta + sign * kShift);
      for (std::size_t k = g + 1; k < ops.size(); ++k) apply_gate_inplace(psi, ops[k], angles);
      const auto z = expect_z_all(psi);
      for (int q = 0; q < nq; ++q) jac(static_cast<std::size_t>(q), *op.angle_slot) += 0.5 * sign * z[q];
    }
  }
  return jac;
}

}  // namespace qforest::qsim
