"""
circuit.py - the fixed preparation circuit and its two evaluators

Topology (n data qubits x_0..x_{n-1}, one ancilla ak, all starting in |0>):

    x_i ──K_{i+1}──●──────
                   │
    ak  ───────────K_{n+i+1}

  1. W1  : K_1..K_n on the data qubits
  2. C_k : for i = 1..n, K_{n+i} on ak controlled by data qubit i

Basis ordering: data qubits most-significant-first, ancilla last.

Evaluators:
  simulate_full          → dense (n+1)-qubit statevector
  closed_form_amplitudes → product form a_x = Π f_i(x_i) with
                           f_i(0) = a_i, f_i(1) = b_i·(a_{n+i} + b_{n+i})
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from gates import SymmetricGate, SOLVER_UNITARY_TOL, column_sum, is_unitary

logger = logging.getLogger("circuit")

MAX_QUBITS = 12

# trace hook signature: (kind, qubit indices) with kind in {"single", "controlled"}
TraceHook = Callable[[str, Tuple[int, ...]], None]

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


class CircuitError(ValueError):
    pass


# ============================================================
# 📦  Layout & state containers
# ============================================================
@dataclass(frozen=True)
class CircuitLayout:
    n: int
    data_gates: Tuple[SymmetricGate, ...]       # K_1..K_n
    ancilla_gates: Tuple[SymmetricGate, ...]    # K_{n+1}..K_{2n}

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= MAX_QUBITS:
            raise CircuitError(f"data-qubit count must be in [1, {MAX_QUBITS}], got {self.n!r}")
        object.__setattr__(self, "data_gates", tuple(self.data_gates))
        object.__setattr__(self, "ancilla_gates", tuple(self.ancilla_gates))
        if len(self.data_gates) != self.n or len(self.ancilla_gates) != self.n:
            raise CircuitError(
                f"layout needs {self.n} data and {self.n} ancilla gates, "
                f"got {len(self.data_gates)} and {len(self.ancilla_gates)}"
            )

    @property
    def gates(self) -> Tuple[SymmetricGate, ...]:
        return self.data_gates + self.ancilla_gates

    def is_unitary(self, tol: float = SOLVER_UNITARY_TOL) -> bool:
        return all(is_unitary(g, tol) for g in self.gates)

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "data_gates": [g.to_dict() for g in self.data_gates],
            "ancilla_gates": [g.to_dict() for g in self.ancilla_gates],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CircuitLayout":
        try:
            n = int(data["n"])
            data_gates = [SymmetricGate.from_dict(g) for g in data["data_gates"]]
            ancilla_gates = [SymmetricGate.from_dict(g) for g in data["ancilla_gates"]]
        except (KeyError, TypeError) as e:
            raise CircuitError(f"malformed layout: {e}")
        return cls(n, tuple(data_gates), tuple(ancilla_gates))

    @classmethod
    def uniform(cls, n: int, gate: SymmetricGate) -> "CircuitLayout":
        return cls(n, (gate,) * n, (gate,) * n)


@dataclass(frozen=True)
class StateVector:
    qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2 ** self.qubits,):
            raise CircuitError(f"statevector of {self.qubits} qubits needs {2 ** self.qubits} amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class DataAmplitudes:
    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (2 ** self.n,):
            raise CircuitError(f"{self.n} data qubits need {2 ** self.n} amplitudes, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


# ============================================================
# 🔧  Statevector kernels
# ============================================================
def _apply_single(state: np.ndarray, matrix: np.ndarray, qubit: int) -> np.ndarray:
    """state has shape [2]*(n+1); contract matrix into axis `qubit`."""
    moved = np.tensordot(matrix, state, axes=([1], [qubit]))
    return np.moveaxis(moved, 0, qubit)


def _apply_controlled(state: np.ndarray, matrix: np.ndarray, control: int, target: int) -> np.ndarray:
    out = state.copy()
    index = [slice(None)] * state.ndim
    index[control] = 1
    branch = state[tuple(index)]
    # dropping the control axis shifts the target axis left when it sits after the control
    t = target - 1 if target > control else target
    out[tuple(index)] = _apply_single(branch, matrix, t)
    return out


def simulate_full(layout: CircuitLayout, permissive: bool = False,
                  trace: Optional[TraceHook] = None) -> StateVector:
    """
    Run the circuit on |0>^(n+1).
    Non-unitary gates are rejected unless `permissive` is set (raw-entry solving).
    """
    if not permissive and not layout.is_unitary(SOLVER_UNITARY_TOL):
        raise CircuitError("layout contains a gate failing the unitary test at 1e-8")

    n = layout.n
    ancilla = n
    state = np.zeros([2] * (n + 1), dtype=complex)
    state[(0,) * (n + 1)] = 1.0

    for i, gate in enumerate(layout.data_gates):
        state = _apply_single(state, gate.matrix, i)
        if trace:
            trace("single", (i,))

    for i, gate in enumerate(layout.ancilla_gates):
        state = _apply_controlled(state, gate.matrix, i, ancilla)
        if trace:
            trace("controlled", (i, ancilla))

    return StateVector(n + 1, state.reshape(-1))


def dense_unitary(layout: CircuitLayout) -> np.ndarray:
    """Full 2^(n+1) operator built from Kronecker products; brute-force oracle for small n."""
    n = layout.n
    ancilla = n

    def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
        return reduce(np.kron, factors)

    w1 = kron_all([g.matrix for g in layout.data_gates] + [_I2])
    total = w1
    for i, gate in enumerate(layout.ancilla_gates):
        off = [_I2] * (n + 1)
        on = [_I2] * (n + 1)
        off[i] = _P0
        on[i] = _P1
        on[ancilla] = gate.matrix
        total = (kron_all(off) + kron_all(on)) @ total
    return total


# ============================================================
# 📐  Amplitude views
# ============================================================
def summed_ancilla_amplitudes(sv: StateVector) -> DataAmplitudes:
    """value_x = amp(x, ak=0) + amp(x, ak=1)."""
    if sv.qubits < 2:
        raise CircuitError("statevector needs at least one data qubit and the ancilla")
    pairs = sv.amplitudes.reshape(-1, 2)
    return DataAmplitudes(sv.qubits - 1, pairs.sum(axis=1))


def product_form(a: np.ndarray, b: np.ndarray, col: np.ndarray) -> np.ndarray:
    """
    Rank-one amplitude tensor Π_i f_i(x_i), f_i = (a_i, b_i·col_i), flattened
    with the first factor most significant.
    """
    values = np.ones(1, dtype=complex)
    for a_i, b_i, c_i in zip(a, b, col):
        values = np.kron(values, np.array([a_i, b_i * c_i]))
    return values


def closed_form_amplitudes(layout: CircuitLayout) -> DataAmplitudes:
    a = np.array([g.a for g in layout.data_gates], dtype=complex)
    b = np.array([g.b for g in layout.data_gates], dtype=complex)
    col = np.array([column_sum(g) for g in layout.ancilla_gates], dtype=complex)
    return DataAmplitudes(layout.n, product_form(a, b, col))


def marginal_probabilities(sv: StateVector) -> np.ndarray:
    """Physical data-register distribution p_x = |amp(x,0)|² + |amp(x,1)|²."""
    if sv.qubits < 2:
        raise CircuitError("statevector needs at least one data qubit and the ancilla")
    return (np.abs(sv.amplitudes) ** 2).reshape(-1, 2).sum(axis=1)


def ancilla_branch_probabilities(sv: StateVector) -> Tuple[float, float]:
    """(P(ak=0), P(ak=1)) over the whole register."""
    probs = (np.abs(sv.amplitudes) ** 2).reshape(-1, 2).sum(axis=0)
    return float(probs[0]), float(probs[1])
