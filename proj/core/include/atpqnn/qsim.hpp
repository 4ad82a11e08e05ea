// Copyright 2026 The atpqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// \file qsim.hpp
/// Dense statevector simulator for the small gate set used by the classifier:
/// X, H, single-qubit rotations and the two-qubit XX / ZZ interactions.
///
/// Conventions:
///  - Rotations are exp(-i theta G / 2) for generator G in {X, Y, Z, X(x)X, Z(x)Z}.
///  - Qubit 0 is the most significant bit of the basis index, so for n qubits
///    qubit q corresponds to bit (n - 1 - q).
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atpqnn/random.hpp"

namespace atpqnn::qsim {

using Complex = std::complex<double>;

class Statevector {
 public:
  /// |0...0> on n qubits.
  explicit Statevector(std::size_t n_qubits);

  static Statevector basis(std::size_t n_qubits, std::size_t index);

  /// Takes ownership of `amps`; the length must be exactly 2^n_qubits and the
  /// vector must be normalized within `tol`.
  static Statevector from_amplitudes(std::size_t n_qubits, std::vector<Complex> amps,
                                     double tol = 1e-10);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  std::vector<Complex>& mutable_amplitudes() { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const;

  /// This state tensored with |0> on one extra, least-significant qubit.
  Statevector with_ancilla() const;

 private:
  Statevector(std::size_t n_qubits, std::vector<Complex> amps)
      : n_qubits_(n_qubits), amps_(std::move(amps)) {}

  std::size_t n_qubits_;
  std::vector<Complex> amps_;
};

enum class GateKind : std::uint8_t { kX, kH, kRX, kRY, kRZ, kXX, kZZ };

const char* to_string(GateKind kind);
bool is_parameterized(GateKind kind);
bool is_two_qubit(GateKind kind);

struct GateOp {
  GateKind kind;
  std::array<std::size_t, 2> targets{0, 0};
  double theta = 0.0;

  static GateOp x(std::size_t q) { return {GateKind::kX, {q, q}, 0.0}; }
  static GateOp h(std::size_t q) { return {GateKind::kH, {q, q}, 0.0}; }
  static GateOp rx(std::size_t q, double t) { return {GateKind::kRX, {q, q}, t}; }
  static GateOp ry(std::size_t q, double t) { return {GateKind::kRY, {q, q}, t}; }
  static GateOp rz(std::size_t q, double t) { return {GateKind::kRZ, {q, q}, t}; }
  static GateOp xx(std::size_t a, std::size_t b, double t) { return {GateKind::kXX, {a, b}, t}; }
  static GateOp zz(std::size_t a, std::size_t b, double t) { return {GateKind::kZZ, {a, b}, t}; }

  std::size_t arity() const { return is_two_qubit(kind) ? 2 : 1; }

  friend bool operator==(const GateOp&, const GateOp&) = default;
};

/// Row-major dense unitary of a gate on its own targets: 2x2 for single-qubit
/// gates, 4x4 for XX / ZZ with targets[0] as the more significant factor.
std::vector<Complex> gate_matrix(const GateOp& gate);

struct Circuit {
  std::size_t n_qubits = 0;
  std::vector<GateOp> ops;

  /// Throws kInvalidCircuit on any out-of-range or repeated target.
  void validate() const;
};

enum class Pauli : std::uint8_t { kX, kY, kZ };

/// Stochastic Pauli-trajectory noise: after each gate whose index falls in
/// [first_op, last_op), every touched qubit independently receives a uniform
/// random Pauli with probability p.
struct TrajectoryNoise {
  double p = 0.0;
  std::size_t first_op = 0;
  std::size_t last_op = SIZE_MAX;
};

/// Applies the gate in place. Throws kInvalidCircuit for bad targets.
void apply_gate(Statevector& state, const GateOp& gate);
Statevector apply(const Statevector& state, const GateOp& gate);

/// Applies the inverse of the gate in place.
void apply_gate_inverse(Statevector& state, const GateOp& gate);

void apply_pauli(Statevector& state, Pauli pauli, std::size_t qubit);

/// Applies the Hermitian generator G of a rotation gate (X, Y, Z, XX or ZZ).
void apply_generator(Statevector& state, const GateOp& gate);

Statevector run_circuit(const Statevector& state0, const Circuit& circuit,
                        const std::optional<TrajectoryNoise>& noise, Rng& rng);

/// Noiseless convenience overload.
Statevector run_circuit(const Statevector& state0, const Circuit& circuit);

Complex inner_product(const Statevector& bra, const Statevector& ket);

/// <bra| G |ket> for the generator G of a rotation gate, without allocating.
Complex generator_element(const Statevector& bra, const GateOp& gate, const Statevector& ket);

double expectation_z(const Statevector& state, std::size_t qubit);

/// Single-qubit reduced density matrix, row-major [r00, r01, r10, r11].
struct ReducedDensity1Q {
  std::array<Complex, 4> m{};

  Complex trace() const { return m[0] + m[3]; }
  /// Eigenvalues in ascending order (closed form for 2x2 Hermitian).
  std::array<double, 2> eigenvalues() const;
};

ReducedDensity1Q reduced_density(const Statevector& state, std::size_t qubit);

/// Von Neumann entropy in bits; eigenvalues at or below 1e-12 contribute 0.
/// Throws kInvalidState when |trace - 1| > 1e-6.
double von_neumann_entropy(const ReducedDensity1Q& rho);

}  // namespace atpqnn::qsim
