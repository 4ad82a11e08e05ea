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

#include "atpqnn/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "atpqnn/error.hpp"

namespace atpqnn::qsim {
namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t bit_of(std::size_t n_qubits, std::size_t qubit) {
  return std::size_t{1} << (n_qubits - 1 - qubit);
}

void check_targets(std::size_t n_qubits, const GateOp& gate) {
  const auto bad = [&](std::size_t q) { return q >= n_qubits; };
  if (bad(gate.targets[0]) || (is_two_qubit(gate.kind) && bad(gate.targets[1]))) {
    throw Error(ErrorKind::kInvalidCircuit,
                std::string("gate ") + to_string(gate.kind) + " targets a qubit outside a " +
                    std::to_string(n_qubits) + "-qubit register");
  }
  if (is_two_qubit(gate.kind) && gate.targets[0] == gate.targets[1]) {
    throw Error(ErrorKind::kInvalidCircuit,
                std::string("gate ") + to_string(gate.kind) + " needs two distinct targets");
  }
}

// Generic 2x2 kernel over all amplitude pairs differing in `mask`.
void apply_1q(std::vector<Complex>& a, std::size_t mask, Complex u00, Complex u01, Complex u10,
              Complex u11) {
  const std::size_t dim = a.size();
  for (std::size_t base = 0; base < dim; base += 2 * mask) {
    for (std::size_t i = base; i < base + mask; ++i) {
      const Complex x0 = a[i];
      const Complex x1 = a[i + mask];
      a[i] = u00 * x0 + u01 * x1;
      a[i + mask] = u10 * x0 + u11 * x1;
    }
  }
}

void apply_rx(std::vector<Complex>& a, std::size_t mask, double theta) {
  const double c = std::cos(theta / 2);
  const Complex ms{0.0, -std::sin(theta / 2)};
  apply_1q(a, mask, c, ms, ms, c);
}

void apply_rz(std::vector<Complex>& a, std::size_t mask, double theta) {
  const Complex lo = std::polar(1.0, -theta / 2);
  const Complex hi = std::polar(1.0, theta / 2);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= (i & mask) ? hi : lo;
}

void apply_xx(std::vector<Complex>& a, std::size_t ma, std::size_t mb, double theta) {
  const double c = std::cos(theta / 2);
  const Complex ms{0.0, -std::sin(theta / 2)};
  const std::size_t flip = ma | mb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i & ma) continue;
    const std::size_t j = i ^ flip;
    const Complex x0 = a[i];
    const Complex x1 = a[j];
    a[i] = c * x0 + ms * x1;
    a[j] = ms * x0 + c * x1;
  }
}

void apply_zz(std::vector<Complex>& a, std::size_t ma, std::size_t mb, double theta) {
  const Complex even = std::polar(1.0, -theta / 2);
  const Complex odd = std::polar(1.0, theta / 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool parity = ((i & ma) != 0) != ((i & mb) != 0);
    a[i] *= parity ? odd : even;
  }
}

void apply_with_angle(Statevector& state, const GateOp& gate, double theta) {
  auto& a = state.mutable_amplitudes();
  const std::size_t n = state.n_qubits();
  const std::size_t m0 = bit_of(n, gate.targets[0]);
  switch (gate.kind) {
    case GateKind::kX:
      apply_1q(a, m0, 0.0, 1.0, 1.0, 0.0);
      break;
    case GateKind::kH: {
      const double r = std::numbers::sqrt2 / 2;
      apply_1q(a, m0, r, r, r, -r);
      break;
    }
    case GateKind::kRX:
      apply_rx(a, m0, theta);
      break;
    case GateKind::kRY: {
      const double c = std::cos(theta / 2);
      const double s = std::sin(theta / 2);
      apply_1q(a, m0, c, -s, s, c);
      break;
    }
    case GateKind::kRZ:
      apply_rz(a, m0, theta);
      break;
    case GateKind::kXX:
      apply_xx(a, m0, bit_of(n, gate.targets[1]), theta);
      break;
    case GateKind::kZZ:
      apply_zz(a, m0, bit_of(n, gate.targets[1]), theta);
      break;
  }
}

}  // namespace

Statevector::Statevector(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits == 0 || n_qubits > 30) {
    throw Error(ErrorKind::kInvalidArgument,
                "statevector needs between 1 and 30 qubits, got " + std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << n_qubits, Complex{});
  amps_[0] = 1.0;
}

Statevector Statevector::basis(std::size_t n_qubits, std::size_t index) {
  Statevector s(n_qubits);
  if (index >= s.dim()) {
    throw Error(ErrorKind::kInvalidArgument, "basis index out of range");
  }
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

Statevector Statevector::from_amplitudes(std::size_t n_qubits, std::vector<Complex> amps,
                                         double tol) {
  if (n_qubits == 0 || n_qubits > 30 || amps.size() != (std::size_t{1} << n_qubits)) {
    throw Error(ErrorKind::kInvalidState,
                "amplitude vector of length " + std::to_string(amps.size()) +
                    " does not match 2^" + std::to_string(n_qubits));
  }
  Statevector s(n_qubits, std::move(amps));
  if (std::abs(s.norm_squared() - 1.0) > tol) {
    throw Error(ErrorKind::kInvalidState, "amplitudes are not normalized");
  }
  return s;
}

double Statevector::norm_squared() const {
  double acc = 0.0;
  for (const auto& z : amps_) acc += std::norm(z);
  return acc;
}

Statevector Statevector::with_ancilla() const {
  std::vector<Complex> out(amps_.size() * 2);
  for (std::size_t i = 0; i < amps_.size(); ++i) out[2 * i] = amps_[i];
  return Statevector(n_qubits_ + 1, std::move(out));
}

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::kX: return "X";
    case GateKind::kH: return "H";
    case GateKind::kRX: return "RX";
    case GateKind::kRY: return "RY";
    case GateKind::kRZ: return "RZ";
    case GateKind::kXX: return "XX";
    case GateKind::kZZ: return "ZZ";
  }
  return "?";
}

bool is_parameterized(GateKind kind) {
  return kind != GateKind::kX && kind != GateKind::kH;
}

bool is_two_qubit(GateKind kind) { return kind == GateKind::kXX || kind == GateKind::kZZ; }

std::vector<Complex> gate_matrix(const GateOp& gate) {
  const double c = std::cos(gate.theta / 2);
  const double s = std::sin(gate.theta / 2);
  const Complex mis = -kI * s;
  const double r = std::numbers::sqrt2 / 2;
  switch (gate.kind) {
    case GateKind::kX: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::kH: return {r, r, r, -r};
    case GateKind::kRX: return {c, mis, mis, c};
    case GateKind::kRY: return {c, -s, s, c};
    case GateKind::kRZ:
      return {std::polar(1.0, -gate.theta / 2), 0.0, 0.0, std::polar(1.0, gate.theta / 2)};
    case GateKind::kXX:
      return {c, 0, 0, mis,
              0, c, mis, 0,
              0, mis, c, 0,
              mis, 0, 0, c};
    case GateKind::kZZ: {
      const Complex e = std::polar(1.0, -gate.theta / 2);
      const Complex o = std::polar(1.0, gate.theta / 2);
      return {e, 0, 0, 0,
              0, o, 0, 0,
              0, 0, o, 0,
              0, 0, 0, e};
    }
  }
  return {};
}

void Circuit::validate() const {
  for (const auto& op : ops) check_targets(n_qubits, op);
}

void apply_gate(Statevector& state, const GateOp& gate) {
  check_targets(state.n_qubits(), gate);
  apply_with_angle(state, gate, gate.theta);
}

Statevector apply(const Statevector& state, const GateOp& gate) {
  Statevector out = state;
  apply_gate(out, gate);
  return out;
}

void apply_gate_inverse(Statevector& state, const GateOp& gate) {
  check_targets(state.n_qubits(), gate);
  apply_with_angle(state, gate, -gate.theta);
}

void apply_pauli(Statevector& state, Pauli pauli, std::size_t qubit) {
  if (qubit >= state.n_qubits()) {
    throw Error(ErrorKind::kInvalidCircuit, "Pauli target out of range");
  }
  auto& a = state.mutable_amplitudes();
  const std::size_t m = bit_of(state.n_qubits(), qubit);
  switch (pauli) {
    case Pauli::kX: apply_1q(a, m, 0.0, 1.0, 1.0, 0.0); break;
    case Pauli::kY: apply_1q(a, m, 0.0, -kI, kI, 0.0); break;
    case Pauli::kZ:
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i & m) a[i] = -a[i];
      }
      break;
  }
}

void apply_generator(Statevector& state, const GateOp& gate) {
  switch (gate.kind) {
    case GateKind::kRX: apply_pauli(state, Pauli::kX, gate.targets[0]); return;
    case GateKind::kRY: apply_pauli(state, Pauli::kY, gate.targets[0]); return;
    case GateKind::kRZ: apply_pauli(state, Pauli::kZ, gate.targets[0]); return;
    case GateKind::kXX:
      apply_pauli(state, Pauli::kX, gate.targets[0]);
      apply_pauli(state, Pauli::kX, gate.targets[1]);
      return;
    case GateKind::kZZ:
      apply_pauli(state, Pauli::kZ, gate.targets[0]);
      apply_pauli(state, Pauli::kZ, gate.targets[1]);
      return;
    default:
      throw Error(ErrorKind::kInvalidArgument,
                  std::string("gate ") + to_string(gate.kind) + " has no generator");
  }
}

Statevector run_circuit(const Statevector& state0, const Circuit& circuit,
                        const std::optional<TrajectoryNoise>& noise, Rng& rng) {
  if (circuit.n_qubits != state0.n_qubits()) {
    throw Error(ErrorKind::kInvalidCircuit,
                "circuit has " + std::to_string(circuit.n_qubits) + " qubits but state has " +
                    std::to_string(state0.n_qubits()));
  }
  Statevector state = state0;
  for (std::size_t k = 0; k < circuit.ops.size(); ++k) {
    const GateOp& op = circuit.ops[k];
    apply_gate(state, op);
    if (!noise || k < noise->first_op || k >= noise->last_op) continue;
    for (std::size_t t = 0; t < op.arity(); ++t) {
      if (rng.uniform01() < noise->p) {
        apply_pauli(state, static_cast<Pauli>(rng.below(3)), op.targets[t]);
      }
    }
  }
  return state;
}

Statevector run_circuit(const Statevector& state0, const Circuit& circuit) {
  Rng unused(0);
  return run_circuit(state0, circuit, std::nullopt, unused);
}

Complex inner_product(const Statevector& bra, const Statevector& ket) {
  if (bra.dim() != ket.dim()) {
    throw Error(ErrorKind::kInvalidArgument, "inner product of mismatched states");
  }
  Complex acc{};
  for (std::size_t i = 0; i < bra.dim(); ++i) acc += std::conj(bra[i]) * ket[i];
  return acc;
}

Complex generator_element(const Statevector& bra, const GateOp& gate, const Statevector& ket) {
  if (bra.dim() != ket.dim()) {
    throw Error(ErrorKind::kInvalidArgument, "generator element of mismatched states");
  }
  check_targets(ket.n_qubits(), gate);
  const std::size_t n = ket.n_qubits();
  const std::size_t m0 = bit_of(n, gate.targets[0]);
  const std::size_t m1 = is_two_qubit(gate.kind) ? bit_of(n, gate.targets[1]) : 0;
  Complex acc{};
  switch (gate.kind) {
    case GateKind::kRX:
      for (std::size_t i = 0; i < ket.dim(); ++i) acc += std::conj(bra[i]) * ket[i ^ m0];
      break;
    case GateKind::kRY:
      // Y|0> = i|1>, Y|1> = -i|0>
      for (std::size_t i = 0; i < ket.dim(); ++i) {
        const Complex v = ket[i ^ m0] * ((i & m0) ? kI : -kI);
        acc += std::conj(bra[i]) * v;
      }
      break;
    case GateKind::kRZ:
      for (std::size_t i = 0; i < ket.dim(); ++i) {
        const Complex v = std::conj(bra[i]) * ket[i];
        acc += (i & m0) ? -v : v;
      }
      break;
    case GateKind::kXX:
      for (std::size_t i = 0; i < ket.dim(); ++i) acc += std::conj(bra[i]) * ket[i ^ (m0 | m1)];
      break;
    case GateKind::kZZ:
      for (std::size_t i = 0; i < ket.dim(); ++i) {
        const Complex v = std::conj(bra[i]) * ket[i];
        acc += (((i & m0) != 0) != ((i & m1) != 0)) ? -v : v;
      }
      break;
    default:
      throw Error(ErrorKind::kInvalidArgument,
                  std::string("gate ") + to_string(gate.kind) + " has no generator");
  }
  return acc;
}

double expectation_z(const Statevector& state, std::size_t qubit) {
  if (qubit >= state.n_qubits()) {
    throw Error(ErrorKind::kInvalidArgument, "expectation qubit out of range");
  }
  const std::size_t m = bit_of(state.n_qubits(), qubit);
  double acc = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    acc += (i & m) ? -std::norm(state[i]) : std::norm(state[i]);
  }
  return acc;
}

std::array<double, 2> ReducedDensity1Q::eigenvalues() const {
  const double a = m[0].real();
  const double d = m[3].real();
  const double disc = std::sqrt((a - d) * (a - d) + 4.0 * std::norm(m[1]));
  return {(a + d - disc) / 2, (a + d + disc) / 2};
}

ReducedDensity1Q reduced_density(const Statevector& state, std::size_t qubit) {
  if (state.n_qubits() < 2) {
    throw Error(ErrorKind::kDegenerateBipartition,
                "reduced density needs at least two qubits");
  }
  if (qubit >= state.n_qubits()) {
    throw Error(ErrorKind::kInvalidArgument, "reduced-density qubit out of range");
  }
  const std::size_t m = bit_of(state.n_qubits(), qubit);
  double r00 = 0.0;
  double r11 = 0.0;
  Complex r01{};
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (i & m) continue;
    const Complex a0 = state[i];
    const Complex a1 = state[i | m];
    r00 += std::norm(a0);
    r11 += std::norm(a1);
    r01 += a0 * std::conj(a1);
  }
  return ReducedDensity1Q{{Complex{r00}, r01, std::conj(r01), Complex{r11}}};
}

double von_neumann_entropy(const ReducedDensity1Q& rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-6) {
    throw Error(ErrorKind::kInvalidState, "density matrix trace deviates from 1");
  }
  double s = 0.0;
  for (double lambda : rho.eigenvalues()) {
    if (lambda > 1e-12) s -= lambda * std::log2(lambda);
  }
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace atpqnn::qsim
