"""
distributions.py - target-state families

Real families (any n):
  equal      2^{-n/2} everywhere
  prime      1/√π(2^n) on prime indices
  decreasing a_i = 1/√(2^{i+1})        (not renormalized: ‖a‖² = 1 - 2^{-2^n})
  increasing a_i = 1/√(2^{2^n - i})    (index reversal of decreasing)
  even / odd √(2/2^n) on even / odd indices
  random     seeded i.i.d. components, unit norm

Complex variants are printed only for the 3-qubit table; off n = 3 they fall
back to the real family with a warning. Even/odd complex are i·real for any n.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from equations import TargetState

logger = logging.getLogger("distributions")


class DistributionError(ValueError):
    pass


class Family:
    EQUAL_REAL = "equal"
    EQUAL_COMPLEX = "equal-complex"
    PRIME = "prime"
    DECREASING = "decreasing"
    INCREASING = "increasing"
    EVEN = "even"
    ODD = "odd"
    RANDOM_COMPLEX = "random-complex"
    RANDOM_REAL = "random-real"

    ALL = (EQUAL_REAL, EQUAL_COMPLEX, PRIME, DECREASING, INCREASING, EVEN, ODD, RANDOM_COMPLEX, RANDOM_REAL)


class Variant:
    REAL = "real"
    COMPLEX = "complex"


# ============================================================
# 📋  Printed 3-qubit vectors
# ============================================================
_Q = 0.25
EQUAL_COMPLEX_3 = np.array([
    -_Q + _Q * 1j, _Q + _Q * 1j, _Q + _Q * 1j, _Q - _Q * 1j,
    _Q + _Q * 1j, _Q - _Q * 1j, _Q - _Q * 1j, -_Q - _Q * 1j,
])

PRIME_COMPLEX_3 = np.array([0, 0, 0.5j, -0.5j, 0, 0.5j, 0, 0.5j])

# worked-example target
DECREASING_COMPLEX_3 = np.array([
    -0.1500 + 0.5100j, 0.4400 + 0.1200j, 0.3680 + 0.1110j, 0.0900 - 0.3200j,
    0.2920 + 0.0920j, 0.0760 - 0.2500j, 0.0610 - 0.2130j, -0.1830 - 0.0510j,
])

RANDOM_COMPLEX_3 = np.array([
    0.0220 + 0.6000j, 0.3440 - 0.0130j, 0.6000 - 0.0200j, -0.0200 - 0.3450j,
    0.1320 - 0.0050j, -0.0030 - 0.0790j, -0.0060 - 0.1370j, -0.0790 + 0.0030j,
])

RANDOM_REAL_3 = np.array([0.6004, 0.3442, 0.6003, 0.3456, 0.1321, 0.0791, 0.1371, 0.0791])


@dataclass(frozen=True)
class DistributionSpec:
    family: str
    n: int
    rng_seed: int = 0
    variant: str = Variant.REAL

    def __post_init__(self):
        if self.family not in Family.ALL:
            raise DistributionError(f"unknown family {self.family!r}, expected one of {Family.ALL}")
        if self.variant not in (Variant.REAL, Variant.COMPLEX):
            raise DistributionError(f"unknown variant {self.variant!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise DistributionError(f"qubit count must be a positive integer, got {self.n!r}")
        if self.family == Family.PRIME and self.n < 2:
            raise DistributionError("prime state needs n >= 2 (no prime below 2)")

    def to_dict(self) -> dict:
        return {"family": self.family, "n": self.n, "rng_seed": int(self.rng_seed), "variant": self.variant}

    @classmethod
    def from_dict(cls, data: dict) -> "DistributionSpec":
        try:
            return cls(
                family=str(data["family"]),
                n=int(data["n"]),
                rng_seed=int(data.get("rng_seed", 0)),
                variant=str(data.get("variant", Variant.REAL)),
            )
        except (KeyError, TypeError) as e:
            raise DistributionError(f"malformed distribution spec: {e}")


# ============================================================
# 🔧  Helpers
# ============================================================
def primes_below(limit: int) -> List[int]:
    """Sieve of Eratosthenes, ascending primes < limit."""
    if limit < 2:
        raise DistributionError(f"limit must be >= 2, got {limit}")
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for k in range(2, int(math.isqrt(limit - 1)) + 1):
        if sieve[k]:
            sieve[k * k::k] = False
    return [int(i) for i in np.flatnonzero(sieve)]


def _real_family(family: str, n: int, rng_seed: int) -> np.ndarray:
    size = 2 ** n
    idx = np.arange(size)
    if family == Family.EQUAL_REAL:
        return np.full(size, 2.0 ** (-n / 2))
    if family == Family.PRIME:
        primes = primes_below(size)
        amps = np.zeros(size)
        amps[primes] = 1.0 / math.sqrt(len(primes))
        return amps
    if family == Family.DECREASING:
        return 2.0 ** (-(idx + 1) / 2)
    if family == Family.INCREASING:
        return 2.0 ** (-(size - idx) / 2)
    if family in (Family.EVEN, Family.ODD):
        amps = np.zeros(size)
        amps[idx % 2 == (0 if family == Family.EVEN else 1)] = math.sqrt(2.0 / size)
        return amps
    rng = np.random.default_rng(int(rng_seed))
    if family == Family.RANDOM_COMPLEX:
        amps = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    else:
        amps = rng.standard_normal(size)
    return amps / np.linalg.norm(amps)


def _complex_variant(family: str, n: int) -> Optional[np.ndarray]:
    if family in (Family.EVEN, Family.ODD):
        return 1j * _real_family(family, n, 0)
    if n != 3:
        return None
    return {
        Family.EQUAL_REAL: EQUAL_COMPLEX_3,
        Family.PRIME: PRIME_COMPLEX_3,
        Family.DECREASING: DECREASING_COMPLEX_3,
        Family.INCREASING: DECREASING_COMPLEX_3[::-1],
    }.get(family)


# ============================================================
# 🚀  Generation
# ============================================================
def generate(spec: DistributionSpec) -> TargetState:
    family = spec.family
    variant = spec.variant
    if family == Family.EQUAL_COMPLEX:
        family, variant = Family.EQUAL_REAL, Variant.COMPLEX

    if variant == Variant.COMPLEX and family not in (Family.RANDOM_COMPLEX, Family.RANDOM_REAL):
        amps = _complex_variant(family, spec.n)
        if amps is not None:
            return TargetState(spec.n, np.array(amps, dtype=complex))
        logger.warning(f"complex {family} state is only tabulated for n=3; using the real family at n={spec.n}")

    return TargetState(spec.n, _real_family(family, spec.n, spec.rng_seed).astype(complex))


# ============================================================
# 📊  The 3-qubit comparison table
# ============================================================
# Every circuit output is a product state. prime-complex is entangled; the closest
# product distribution to the printed random-complex vector is ~1.14e-2 away.
PRODUCT_UNREACHABLE_ROWS = frozenset({"prime-complex", "random-complex"})


@dataclass(frozen=True)
class TableRow:
    label: str
    family: str
    variant: str
    target: TargetState
    reported_error: float

    @property
    def gated(self) -> bool:
        """Complex rows a product-state output can bring under the acceptance limit."""
        return self.variant == Variant.COMPLEX and self.label not in PRODUCT_UNREACHABLE_ROWS


def table1_rows() -> List[TableRow]:
    """The 14 rows (7 families x complex/real) with the relative errors reported for them."""
    n = 3
    rows = [
        ("equal-complex", Family.EQUAL_REAL, Variant.COMPLEX, 6.9593e-11),
        ("equal-real", Family.EQUAL_REAL, Variant.REAL, 0.0093),
        ("prime-complex", Family.PRIME, Variant.COMPLEX, 0.0054),
        ("prime-real", Family.PRIME, Variant.REAL, 0.0461),
        ("decreasing-complex", Family.DECREASING, Variant.COMPLEX, 7.5342e-4),
        ("decreasing-real", Family.DECREASING, Variant.REAL, 0.0402),
        ("increasing-complex", Family.INCREASING, Variant.COMPLEX, 2.5487e-4),
        ("increasing-real", Family.INCREASING, Variant.REAL, 0.0225),
        ("even-complex", Family.EVEN, Variant.COMPLEX, 4.3354e-6),
        ("even-real", Family.EVEN, Variant.REAL, 0.0363),
        ("odd-complex", Family.ODD, Variant.COMPLEX, 1.0413e-6),
        ("odd-real", Family.ODD, Variant.REAL, 0.0191),
    ]
    out = [
        TableRow(label, family, variant, generate(DistributionSpec(family, n, variant=variant)), reported)
        for label, family, variant, reported in rows
    ]
    # the printed random vectors carry rounding that pushes ‖a‖² slightly above 1
    out.append(TableRow("random-complex", Family.RANDOM_COMPLEX, Variant.COMPLEX,
                        TargetState.from_amplitudes(RANDOM_COMPLEX_3, normalize=True), 6.4361e-5))
    out.append(TableRow("random-real", Family.RANDOM_REAL, Variant.REAL,
                        TargetState.from_amplitudes(RANDOM_REAL_3, normalize=True), 0.0987))
    return out
