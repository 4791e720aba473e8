"""
metrics.py - prepared vs acquired accuracy figures

relative_error averages |p_i - q_i| / p_i over the prepared support (p_i > 1e-12);
indices outside the support show up as zero_support_leakage instead.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

SUPPORT_EPS = 1e-12


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class ComparisonReport:
    prepared_probs: np.ndarray
    acquired_probs: np.ndarray
    relative_error: float
    fidelity: float
    max_abs_amp_diff: float
    zero_support_leakage: float

    def to_dict(self) -> dict:
        return {
            "prepared_probs": [float(p) for p in self.prepared_probs],
            "acquired_probs": [float(q) for q in self.acquired_probs],
            "relative_error": float(self.relative_error),
            "fidelity": float(self.fidelity),
            "max_abs_amp_diff": float(self.max_abs_amp_diff),
            "zero_support_leakage": float(self.zero_support_leakage),
        }

    def to_frame(self) -> pd.DataFrame:
        """Per-basis-state prepared/acquired columns, the plot data."""
        return pd.DataFrame({
            "index": np.arange(len(self.prepared_probs)),
            "prepared": self.prepared_probs,
            "acquired": self.acquired_probs,
        })


def probabilities(amps: Sequence[complex]) -> np.ndarray:
    return np.abs(np.asarray(amps, dtype=complex)) ** 2


def relative_error(prepared: Sequence[float], acquired: Sequence[float]) -> float:
    p = np.asarray(prepared, dtype=float)
    q = np.asarray(acquired, dtype=float)
    if p.shape != q.shape:
        raise MetricsError(f"probability vectors differ in length: {p.size} vs {q.size}")
    support = p > SUPPORT_EPS
    if not support.any():
        raise MetricsError("prepared probabilities are all zero")
    return float(np.mean(np.abs(p[support] - q[support]) / p[support]))


def fidelity(a: Sequence[complex], b: Sequence[complex]) -> float:
    x = np.asarray(a, dtype=complex)
    y = np.asarray(b, dtype=complex)
    if x.shape != y.shape:
        raise MetricsError(f"amplitude vectors differ in length: {x.size} vs {y.size}")
    nx = float(np.vdot(x, x).real)
    ny = float(np.vdot(y, y).real)
    if nx == 0 or ny == 0:
        raise MetricsError("fidelity is undefined for a zero-norm vector")
    return float(abs(np.vdot(x, y)) ** 2 / (nx * ny))


def zero_support_leakage(prepared: np.ndarray, acquired: np.ndarray) -> float:
    off = prepared <= SUPPORT_EPS
    return float(acquired[off].max()) if off.any() else 0.0


def compare(prepared, acquired) -> ComparisonReport:
    """prepared: TargetState, acquired: DataAmplitudes."""
    if prepared.n != acquired.n:
        raise MetricsError(f"dimension mismatch: prepared n={prepared.n}, acquired n={acquired.n}")
    target = np.asarray(prepared.amplitudes, dtype=complex)
    got = np.asarray(acquired.values, dtype=complex)
    p = probabilities(target)
    q = probabilities(got)
    return ComparisonReport(
        prepared_probs=p,
        acquired_probs=q,
        relative_error=relative_error(p, q),
        fidelity=fidelity(target, got) if np.any(got) else 0.0,
        max_abs_amp_diff=float(np.max(np.abs(target - got))),
        zero_support_leakage=zero_support_leakage(p, q),
    )
