"""
gates.py - symmetric 2x2 partial-negation gates

Every gate in the preparation circuit has the form

    K = | a  b |
        | b  a |

Builders:
  gate_from_root    → true r-th root of X  (a = (1+s)/2, b = (1-s)/2, s = e^{iπ/r})
  gate_from_angles  → always-unitary form  (a = e^{iγ}cosθ, b = i·e^{iγ}sinθ)
  gate_from_entries → raw entries, no unitarity claim

JSON forms:
  entries : {"a": [re, im], "b": [re, im]}
  angles  : {"gamma": x, "theta": y}
"""

import math
import numbers
import cmath
from dataclasses import dataclass
from typing import Tuple

import numpy as np


# ============================================================
# ⚙️  Constants
# ============================================================
SOLVER_UNITARY_TOL = 1e-8     # machine-precision output of the solver
PRINTED_UNITARY_TOL = 2e-3    # values printed to 4 decimals
BRANCH_UNITARY_TOL = 1e-8


class GateError(ValueError):
    pass


def _finite_complex(value, name: str) -> complex:
    try:
        z = complex(value)
    except (TypeError, ValueError):
        raise GateError(f"{name} is not a complex number: {value!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise GateError(f"{name} must be finite, got {z}")
    return z


def canonical_angle(x: float) -> float:
    """Wrap an angle into (-π, π]."""
    wrapped = x - 2.0 * math.pi * math.ceil((x - math.pi) / (2.0 * math.pi))
    # ceil() can land exactly on -π through rounding
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


# ============================================================
# 📦  Value types
# ============================================================
@dataclass(frozen=True)
class GateAngles:
    gamma: float    # global phase
    theta: float    # mixing angle

    def __post_init__(self):
        for name in ("gamma", "theta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise GateError(f"angle {name} must be finite, got {v}")

    def canonical(self) -> "GateAngles":
        return GateAngles(canonical_angle(self.gamma), canonical_angle(self.theta))

    def to_dict(self) -> dict:
        return {"gamma": float(self.gamma), "theta": float(self.theta)}


@dataclass(frozen=True)
class SymmetricGate:
    a: complex    # diagonal entry
    b: complex    # off-diagonal entry

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b, self.a]], dtype=complex)

    def to_dict(self) -> dict:
        return {
            "a": [float(self.a.real), float(self.a.imag)],
            "b": [float(self.b.real), float(self.b.imag)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SymmetricGate":
        """Accepts either the entry form or the angle form."""
        if not isinstance(data, dict):
            raise GateError(f"gate must be a JSON object, got {type(data).__name__}")
        if "gamma" in data or "theta" in data:
            try:
                return gate_from_angles(GateAngles(float(data["gamma"]), float(data["theta"])))
            except (KeyError, TypeError, ValueError) as e:
                raise GateError(f"bad angle gate {data!r}: {e}")
        try:
            a = complex(*data["a"])
            b = complex(*data["b"])
        except (KeyError, TypeError, ValueError) as e:
            raise GateError(f"bad entry gate {data!r}: {e}")
        return gate_from_entries(a, b)


IDENTITY = SymmetricGate(1 + 0j, 0j)
X_GATE = SymmetricGate(0j, 1 + 0j)


# ============================================================
# 🔧  Builders
# ============================================================
def gate_from_root(r: float) -> SymmetricGate:
    """r-th root of X using the principal root of -1, s = e^{iπ/r}."""
    if not isinstance(r, numbers.Real) or not math.isfinite(r):
        raise GateError(f"degree of negation must be a finite real, got {r!r}")
    if r < 1:
        raise GateError(f"degree of negation must be >= 1, got {r}")
    s = cmath.exp(1j * math.pi / r)
    return SymmetricGate((1 + s) / 2, (1 - s) / 2)


def gate_from_angles(angles: GateAngles) -> SymmetricGate:
    phase = cmath.exp(1j * angles.gamma)
    return SymmetricGate(
        phase * math.cos(angles.theta),
        1j * phase * math.sin(angles.theta),
    )


def gate_from_entries(a, b) -> SymmetricGate:
    return SymmetricGate(_finite_complex(a, "a"), _finite_complex(b, "b"))


def angles_from_gate(g: SymmetricGate) -> GateAngles:
    """
    Inverse of gate_from_angles for unitary gates.
    γ makes a·e^{-iγ} real and nonnegative (taken from b when a = 0),
    θ carries |b| with its sign read from arg(b) - γ - π/2.
    """
    if abs(g.a) > 1e-15:
        gamma = cmath.phase(g.a)
    else:
        # a = 0: θ = ±π/2, choose +π/2 so that b = i·e^{iγ}
        gamma = cmath.phase(g.b) - math.pi / 2
    rotated = g.b * cmath.exp(-1j * gamma) * -1j
    theta = math.atan2(rotated.real, abs(g.a))
    return GateAngles(canonical_angle(gamma), canonical_angle(theta))


# ============================================================
# 🧪  Checks & gate quantities
# ============================================================
def unitarity_residuals(g: SymmetricGate) -> Tuple[float, float]:
    """(|a|²+|b|²-1, a·b* + b·a*); both vanish iff the gate is unitary."""
    d_norm = abs(g.a) ** 2 + abs(g.b) ** 2 - 1.0
    d_orth = 2.0 * (g.a * g.b.conjugate()).real
    return d_norm, d_orth


def is_unitary(g: SymmetricGate, tol: float = SOLVER_UNITARY_TOL) -> bool:
    d_norm, d_orth = unitarity_residuals(g)
    return max(abs(d_norm), abs(d_orth)) <= tol


def branch_probabilities(g: SymmetricGate) -> Tuple[float, float]:
    """Probabilities of finding the ancilla in |0> and |1> after one K on |0>."""
    if not is_unitary(g, BRANCH_UNITARY_TOL):
        raise GateError(f"branch probabilities need a unitary gate, residuals={unitarity_residuals(g)}")
    return abs(g.a) ** 2, abs(g.b) ** 2


def column_sum(g: SymmetricGate) -> complex:
    """a + b: the ancilla factor contributed by one triggered controlled gate."""
    return g.a + g.b
