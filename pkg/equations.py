"""
equations.py - target amplitudes → real residual system for least squares

Parameter layouts (gate order K_1..K_n, K_{n+1}..K_{2n}):
  angles  : [γ_1, θ_1, γ_2, θ_2, ...]              4n reals, every gate unitary
  entries : [Re a_1, Im a_1, Re b_1, Im b_1, ...]   8n reals, unitarity via weighted residuals

Residual vector:
  [Re(model_0 - target_0), Im(model_0 - target_0), Re(model_1 - ...), ...]
  + (entries, weight w > 0) [w·d_norm_1, w·d_orth_1, ..., w·d_norm_2n, w·d_orth_2n]
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from gates import GateAngles, angles_from_gate, gate_from_angles, gate_from_entries
from circuit import CircuitLayout, MAX_QUBITS, product_form

logger = logging.getLogger("equations")

NORM_SLACK = 1e-6
DEFAULT_FD_STEP = 1e-6


class SystemDefinitionError(ValueError):
    pass


class ParamKind:
    ANGLES = "angles"
    ENTRIES = "entries"

    ALL = (ANGLES, ENTRIES)


# ============================================================
# 📦  Target & parametrization
# ============================================================
@dataclass(frozen=True)
class TargetState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if not 1 <= self.n <= MAX_QUBITS:
            raise SystemDefinitionError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        if amps.shape != (2 ** self.n,):
            raise SystemDefinitionError(f"target for {self.n} qubits needs {2 ** self.n} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise SystemDefinitionError("target amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if not 0.0 < norm2 <= 1.0 + NORM_SLACK:
            raise SystemDefinitionError(f"target squared norm must be in (0, 1], got {norm2:.6g}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, values: Sequence[complex], normalize: bool = False) -> "TargetState":
        amps = np.asarray(values, dtype=complex)
        n = int(round(math.log2(amps.size))) if amps.size > 0 else 0
        if amps.size < 2 or 2 ** n != amps.size:
            raise SystemDefinitionError(f"amplitude count must be a power of two >= 2, got {amps.size}")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0 or not np.isfinite(norm):
                raise SystemDefinitionError("cannot normalize a zero or non-finite target")
            amps = amps / norm
        return cls(n, amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class Parametrization:
    kind: str = ParamKind.ANGLES
    unitarity_weight: float = 1.0    # entries only

    def __post_init__(self):
        if self.kind not in ParamKind.ALL:
            raise SystemDefinitionError(f"unknown parametrization {self.kind!r}, expected one of {ParamKind.ALL}")
        if not math.isfinite(self.unitarity_weight) or self.unitarity_weight < 0:
            raise SystemDefinitionError(f"unitarity weight must be finite and >= 0, got {self.unitarity_weight}")

    def per_gate(self) -> int:
        return 2 if self.kind == ParamKind.ANGLES else 4

    def parameter_count(self, n: int) -> int:
        return 2 * n * self.per_gate()

    def has_unitarity_rows(self) -> bool:
        return self.kind == ParamKind.ENTRIES and self.unitarity_weight > 0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "unitarity_weight": float(self.unitarity_weight)}


@dataclass(frozen=True)
class ResidualSystem:
    target: TargetState
    parametrization: Parametrization = field(default_factory=Parametrization)

    @property
    def n(self) -> int:
        return self.target.n

    @property
    def residual_count(self) -> int:
        count = 2 * 2 ** self.n
        if self.parametrization.has_unitarity_rows():
            count += 2 * 2 * self.n
        return count

    @property
    def parameter_count(self) -> int:
        return self.parametrization.parameter_count(self.n)

    # the solver only needs these three
    def residuals(self, params: np.ndarray) -> np.ndarray:
        return residuals(params, self)

    def jacobian(self, params: np.ndarray, finite_difference: bool = False) -> np.ndarray:
        if finite_difference:
            return jacobian_fd(params, self)
        return jacobian_analytic(params, self)

    def layout(self, params: np.ndarray) -> CircuitLayout:
        return decode(params, self.parametrization, self.n)


# ============================================================
# 🔧  Parameter ⇄ gate entries
# ============================================================
def _checked(params, parametrization: Parametrization, n: int) -> np.ndarray:
    p = np.asarray(params, dtype=float).reshape(-1)
    expected = parametrization.parameter_count(n)
    if p.size != expected:
        raise SystemDefinitionError(f"{parametrization.kind} for n={n} needs {expected} parameters, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise SystemDefinitionError("parameters must be finite")
    return p


def _entries(p: np.ndarray, kind: str, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Complex (a, b) arrays of length 2n."""
    if kind == ParamKind.ANGLES:
        pairs = p.reshape(2 * n, 2)
        phase = np.exp(1j * pairs[:, 0])
        return phase * np.cos(pairs[:, 1]), 1j * phase * np.sin(pairs[:, 1])
    quads = p.reshape(2 * n, 4)
    return quads[:, 0] + 1j * quads[:, 1], quads[:, 2] + 1j * quads[:, 3]


def decode(params, parametrization: Parametrization, n: int) -> CircuitLayout:
    p = _checked(params, parametrization, n)
    if parametrization.kind == ParamKind.ANGLES:
        gates = [gate_from_angles(GateAngles(float(g), float(t))) for g, t in p.reshape(2 * n, 2)]
    else:
        gates = [gate_from_entries(complex(ar, ai), complex(br, bi)) for ar, ai, br, bi in p.reshape(2 * n, 4)]
    return CircuitLayout(n, tuple(gates[:n]), tuple(gates[n:]))


def encode(layout: CircuitLayout, parametrization: Parametrization) -> np.ndarray:
    """Inverse of decode; angles come out in canonical ranges."""
    values = []
    for g in layout.gates:
        if parametrization.kind == ParamKind.ANGLES:
            angles = angles_from_gate(g)
            values.extend([angles.gamma, angles.theta])
        else:
            values.extend([g.a.real, g.a.imag, g.b.real, g.b.imag])
    return np.array(values, dtype=float)


# ============================================================
# 📐  Residuals
# ============================================================
def _split(z: np.ndarray) -> np.ndarray:
    """Complex vector → interleaved [Re, Im] rows."""
    return np.column_stack((z.real, z.imag)).reshape(-1)


def residuals(params, system: ResidualSystem) -> np.ndarray:
    n = system.n
    kind = system.parametrization.kind
    p = _checked(params, system.parametrization, n)
    a, b = _entries(p, kind, n)
    model = product_form(a[:n], b[:n], a[n:] + b[n:])
    out = _split(model - system.target.amplitudes)

    if system.parametrization.has_unitarity_rows():
        w = system.parametrization.unitarity_weight
        d_norm = np.abs(a) ** 2 + np.abs(b) ** 2 - 1.0
        d_orth = 2.0 * (a * np.conj(b)).real
        out = np.concatenate([out, w * np.column_stack((d_norm, d_orth)).reshape(-1)])

    if not np.all(np.isfinite(out)):
        raise SystemDefinitionError("residual evaluation produced non-finite values")
    return out


# ============================================================
# 🧮  Jacobians
# ============================================================
def jacobian_fd(params, system: ResidualSystem, step: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central differences, shape residual_count x parameter_count."""
    if not step > 0:
        raise SystemDefinitionError(f"finite-difference step must be > 0, got {step}")
    p = _checked(params, system.parametrization, system.n)
    jac = np.empty((system.residual_count, p.size))
    for k in range(p.size):
        hi = p.copy()
        lo = p.copy()
        hi[k] += step
        lo[k] -= step
        jac[:, k] = (residuals(hi, system) - residuals(lo, system)) / (2.0 * step)
    if not np.all(np.isfinite(jac)):
        raise SystemDefinitionError("finite-difference Jacobian is non-finite")
    return jac


def _leave_one_out(factors: np.ndarray, i: int) -> np.ndarray:
    """Π_{j≠i} f_j(x_j) laid out over all x (factor i replaced by ones)."""
    values = np.ones(1, dtype=complex)
    for j, f in enumerate(factors):
        values = np.kron(values, np.ones(2, dtype=complex) if j == i else f)
    return values


def _factor_derivatives(p: np.ndarray, kind: str, n: int):
    """
    Per gate, d(a)/dp and d(b)/dp for each of its own parameters,
    arrays of shape (2n, per_gate).
    """
    if kind == ParamKind.ANGLES:
        pairs = p.reshape(2 * n, 2)
        phase = np.exp(1j * pairs[:, 0])
        cos_t, sin_t = np.cos(pairs[:, 1]), np.sin(pairs[:, 1])
        a = phase * cos_t
        b = 1j * phase * sin_t
        da = np.column_stack((1j * a, -phase * sin_t))
        db = np.column_stack((1j * b, 1j * phase * cos_t))
        return da, db
    ones = np.ones(2 * n, dtype=complex)
    zeros = np.zeros(2 * n, dtype=complex)
    da = np.column_stack((ones, 1j * ones, zeros, zeros))
    db = np.column_stack((zeros, zeros, ones, 1j * ones))
    return da, db


def jacobian_analytic(params, system: ResidualSystem) -> np.ndarray:
    """
    Each a_x is a product of per-bit factors, so ∂a_x/∂p is the product of the
    other factors times the derivative of the one factor p touches.
    """
    n = system.n
    parametrization = system.parametrization
    kind = parametrization.kind
    per_gate = parametrization.per_gate()
    p = _checked(params, parametrization, n)

    a, b = _entries(p, kind, n)
    col = a[n:] + b[n:]
    factors = np.column_stack((a[:n], b[:n] * col))
    da, db = _factor_derivatives(p, kind, n)

    jac = np.zeros((system.residual_count, p.size))
    amp_rows = 2 * 2 ** n
    for i in range(n):
        rest = _leave_one_out(factors, i)
        for k in range(per_gate):
            # data gate i touches both branches of bit i
            d_data = np.array([da[i, k], db[i, k] * col[i]])
            jac[:amp_rows, i * per_gate + k] = _split(rest * _spread(d_data, n, i))
            # ancilla gate n+i only scales the x_i = 1 branch
            d_anc = np.array([0.0, b[i] * (da[n + i, k] + db[n + i, k])])
            jac[:amp_rows, (n + i) * per_gate + k] = _split(rest * _spread(d_anc, n, i))

    if parametrization.has_unitarity_rows():
        w = parametrization.unitarity_weight
        quads = p.reshape(2 * n, 4)
        for g in range(2 * n):
            ar, ai, br, bi = quads[g]
            row = amp_rows + 2 * g
            cols = slice(4 * g, 4 * g + 4)
            jac[row, cols] = w * 2.0 * np.array([ar, ai, br, bi])
            jac[row + 1, cols] = w * 2.0 * np.array([br, bi, ar, ai])
    return jac


def _spread(pair: np.ndarray, n: int, i: int) -> np.ndarray:
    """Lay a per-bit pair (value at x_i=0, value at x_i=1) out over all 2^n indices."""
    return np.kron(np.kron(np.ones(2 ** i), pair), np.ones(2 ** (n - 1 - i)))
