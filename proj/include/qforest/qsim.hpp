#pragma once

// Exact statevector simulation for the Ry / Rz / CNOT gate set.
//
// Conventions:
//   Ry(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]
//   Rz(t) = diag(exp(-i t/2), exp(i t/2))
//   qubit q addresses bit q of the basis index (little-endian), so
//   CNOT(control=0, target=1) maps |index 1> to |index 3>.
//
// Rotation gates do not carry their angle. They reference a slot in a flat
// angle vector supplied at run time, and several gates may share a slot.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qforest/matrix.hpp"

namespace qforest::qsim {

using Amplitude = std::complex<double>;

inline constexpr int kMinQubits = 1;
inline constexpr int kMaxQubits = 6;

class Statevector {
 public:
  /// |0...0> on `nq` qubits. Throws ConfigError unless 1 <= nq <= 6.
  explicit Statevector(int nq);

  int num_qubits() const noexcept { return nq_; }
  std::size_t size() const noexcept { return amps_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const noexcept;

 private:
  int nq_;
  std::vector<Amplitude> amps_;
};

enum class GateKind { RY, RZ, CNOT };

struct GateOp {
  GateKind kind;
  int target;
  std::optional<int> control;
  std::optional<std::size_t> angle_slot;

  static GateOp ry(int target, std::size_t slot) { return {GateKind::RY, target, std::nullopt, slot}; }
  static GateOp rz(int target, std::size_t slot) { return {GateKind::RZ, target, std::nullopt, slot}; }
  static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, std::nullopt}; }

  bool is_rotation() const noexcept { return kind != GateKind::CNOT; }
};

class Circuit {
 public:
  /// Validates every op against `nq` and `n_angles`; throws StructuralError
  /// (or ConfigError for an unsupported qubit count).
  Circuit(int nq, std::vector<GateOp> ops, std::size_t n_angles);

  int num_qubits() const noexcept { return nq_; }
  std::size_t num_angles() const noexcept { return n_angles_; }
  const std::vector<GateOp>& ops() const noexcept { return ops_; }

 private:
  int nq_;
  std::vector<GateOp> ops_;
  std::size_t n_angles_;
};

Statevector init_state(int nq);

/// In-place gate application; the value-returning overload below wraps it.
void apply_gate_inplace(Statevector& state, const GateOp& gate, std::span<const double> angles);

/// Applies a rotation with an explicit angle, bypassing the slot lookup.
void apply_rotation_inplace(Statevector& state, GateKind kind, int target, double angle);

Statevector apply_gate(Statevector state, const GateOp& gate, std::span<const double> angles);

Statevector run_circuit(const Circuit& circuit, std::span<const double> angles);

/// <Z_q> = sum over basis states of (+1 if bit q is 0 else -1) |a|^2.
double expect_z(const Statevector& state, int qubit);

/// <Z_q> for every qubit, in qubit order.
std::vector<double> expect_z_all(const Statevector& state);

/// Jacobian d<Z_q>/d(angle slot s), shape nq x n_angles, by the parameter-shift
/// rule. Each gate occurrence of a slot contributes
/// (E(theta + pi/2) - E(theta - pi/2)) / 2 and contributions are summed.
Matrix grad_expectations(const Circuit& circuit, std::span<const double> angles);

/// Forward pass and Jacobian together; `expectations` receives <Z_q>.
Matrix grad_expectations(const Circuit& circuit, std::span<const double> angles,
                         std::vector<double>& expectations);

}  // namespace qforest::qsim
