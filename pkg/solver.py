"""
solver.py - Levenberg-Marquardt fitting of the gate parameters

Architecture:
  SolverOptions        → damping / tolerance / multistart settings
  levenberg_marquardt  → damped Gauss-Newton on any object exposing
                         residuals(p) and jacobian(p, finite_difference)
  multistart_solve     → seeded starts, lowest (cost, start index) wins
  PreparationPipeline  → solve → gates → acquired amplitudes → unitary test → metrics
  prepare_superposition→ one-call wrapper around the pipeline

Step:  (JᵀJ + λ·diag(JᵀJ)) δ = -Jᵀr,  accepted iff the cost ½‖r‖² drops.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import List, Optional, Tuple

import numpy as np

from gates import gate_from_root, unitarity_residuals
from circuit import CircuitLayout, DataAmplitudes, closed_form_amplitudes
from equations import ParamKind, Parametrization, ResidualSystem, TargetState, encode
from metrics import ComparisonReport, compare

logger = logging.getLogger("solver")


# ============================================================
# ⚙️  Constants
# ============================================================
DIAG_FLOOR = 1e-12
LAMBDA_MIN = 1e-20
LAMBDA_MAX = 1e16
REPORT_UNITARY_TOL = 1e-6
ENTRY_NOISE = 0.05


class SolverError(RuntimeError):
    pass


class OptionsError(ValueError):
    pass


class SolveStatus:
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    STALLED = "Stalled"


# ============================================================
# 📦  Options & results
# ============================================================
@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 500
    cost_tol: float = 1e-16
    grad_tol: float = 1e-12
    step_tol: float = 1e-14
    lambda_init: float = 1e-3
    lambda_up: float = 10.0
    lambda_down: float = 10.0
    multistart_count: int = 16
    rng_seed: int = 0
    finite_difference: bool = False

    def __post_init__(self):
        for name in ("cost_tol", "grad_tol", "step_tol", "lambda_init"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise OptionsError(f"{name} must be a finite positive number, got {v}")
        for name in ("lambda_up", "lambda_down"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 1):
                raise OptionsError(f"{name} must be > 1, got {v}")
        for name in ("max_iterations", "multistart_count"):
            if int(getattr(self, name)) < 1:
                raise OptionsError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0 <= int(self.rng_seed) < 2 ** 64:
            raise OptionsError(f"rng_seed must fit in 64 bits, got {self.rng_seed}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SolverOptions":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise OptionsError(f"unknown solver option(s): {sorted(unknown)}")
        if "finite_difference" in data and not isinstance(data["finite_difference"], bool):
            raise OptionsError(f"finite_difference must be true or false, got {data['finite_difference']!r}")
        casts = {"max_iterations": int, "multistart_count": int, "rng_seed": int, "finite_difference": bool}
        try:
            clean = {k: casts.get(k, float)(v) for k, v in data.items()}
        except (TypeError, ValueError) as e:
            raise OptionsError(f"bad solver option value: {e}")
        return cls(**clean)


@dataclass
class SolveResult:
    params: np.ndarray
    layout: Optional[CircuitLayout]
    final_cost: float
    iterations: int
    status: str
    cost_trace: List[float]
    termination: str = ""
    start_index: int = 0
    start_costs: List[Optional[float]] = field(default_factory=list)
    start_statuses: List[Optional[str]] = field(default_factory=list)

    @property
    def converged_starts(self) -> int:
        return sum(1 for s in self.start_statuses if s == SolveStatus.CONVERGED)

    def to_dict(self) -> dict:
        return {
            "params": [float(x) for x in self.params],
            "final_cost": float(self.final_cost),
            "iterations": int(self.iterations),
            "status": self.status,
            "termination": self.termination,
            "cost_trace": [float(c) for c in self.cost_trace],
            "start_index": int(self.start_index),
            "start_costs": [None if c is None else float(c) for c in self.start_costs],
            "start_statuses": list(self.start_statuses),
            "converged_starts": self.converged_starts,
        }


# ============================================================
# 🧮  Levenberg-Marquardt core
# ============================================================
def _solve_damped(A: np.ndarray, D: np.ndarray, g: np.ndarray, lam: float) -> np.ndarray:
    """Cholesky solve of (A + λ·diag(D)) δ = -g; raises LinAlgError when not SPD."""
    L = np.linalg.cholesky(A + lam * np.diag(D))
    y = np.linalg.solve(L, -g)
    return np.linalg.solve(L.T, y)


def _cost(r: np.ndarray) -> float:
    return 0.5 * float(r @ r)


def _gradient_small(g: np.ndarray, r: np.ndarray, grad_tol: float) -> bool:
    return float(np.max(np.abs(g))) <= grad_tol * max(1.0, float(np.linalg.norm(r)))


def levenberg_marquardt(system, init, options: Optional[SolverOptions] = None) -> SolveResult:
    options = options or SolverOptions()
    p = np.array(init, dtype=float).reshape(-1)
    if p.size != system.parameter_count:
        raise SolverError(f"initial point has {p.size} parameters, system needs {system.parameter_count}")

    try:
        r = system.residuals(p)
    except ValueError as e:
        raise SolverError(f"residuals at the initial point failed: {e}")
    if not np.all(np.isfinite(r)):
        raise SolverError("non-finite residuals at the initial point")

    cost = _cost(r)
    trace = [cost]
    lam = options.lambda_init
    J = system.jacobian(p, options.finite_difference)
    status, termination = SolveStatus.MAX_ITERATIONS, "max_iterations"
    iterations = 0

    while iterations < options.max_iterations:
        g = J.T @ r
        # Converged always implies the gradient bound; a small cost alone keeps iterating
        if _gradient_small(g, r, options.grad_tol):
            termination = "cost" if cost <= options.cost_tol else "gradient"
            status = SolveStatus.CONVERGED
            break

        A = J.T @ J
        D = np.maximum(np.diag(A), DIAG_FLOOR)
        accepted = False
        while lam <= LAMBDA_MAX:
            try:
                delta = _solve_damped(A, D, g, lam)
            except np.linalg.LinAlgError:
                lam *= options.lambda_up
                continue
            p_new = p + delta
            try:
                r_new = system.residuals(p_new)
            except ValueError:
                lam *= options.lambda_up
                continue
            cost_new = _cost(r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                accepted = True
                lam = max(lam / options.lambda_down, LAMBDA_MIN)
                break
            lam *= options.lambda_up

        if not accepted:
            status, termination = SolveStatus.STALLED, "lambda"
            break

        iterations += 1
        p, r, cost = p_new, r_new, cost_new
        trace.append(cost)
        J = system.jacobian(p, options.finite_difference)

        tiny = float(np.linalg.norm(delta)) <= options.step_tol * (float(np.linalg.norm(p)) + options.step_tol)
        if tiny and _gradient_small(J.T @ r, r, options.grad_tol):
            status, termination = SolveStatus.CONVERGED, "step"
            break

    layout_of = getattr(system, "layout", None)
    layout = layout_of(p) if callable(layout_of) else None
    logger.debug(f"LM finished: status={status} termination={termination} iters={iterations} cost={cost:.3e}")
    return SolveResult(p, layout, cost, iterations, status, trace, termination)


# ============================================================
# 🎲  Multistart
# ============================================================
def starting_points(n: int, parametrization: Parametrization, options: SolverOptions) -> List[np.ndarray]:
    """
    Start 0: every gate is the square root of X.
    Others : angles uniform in (-π, π], or entries of random root gates
             (r ∈ [1, 8]) plus small complex noise.
    """
    rng = np.random.default_rng(int(options.rng_seed))
    sqrt_x = gate_from_root(2)
    starts = [encode(CircuitLayout.uniform(n, sqrt_x), parametrization)]
    count = parametrization.parameter_count(n)
    for _ in range(options.multistart_count - 1):
        if parametrization.kind == ParamKind.ANGLES:
            # flip [-π, π) onto (-π, π]
            starts.append(-rng.uniform(-math.pi, math.pi, size=count))
        else:
            values = []
            for r in rng.uniform(1.0, 8.0, size=2 * n):
                g = gate_from_root(float(r))
                noise = rng.normal(0.0, ENTRY_NOISE, size=4)
                values.extend([g.a.real + noise[0], g.a.imag + noise[1], g.b.real + noise[2], g.b.imag + noise[3]])
            starts.append(np.array(values))
    return starts


def multistart_solve(target: TargetState, parametrization: Optional[Parametrization] = None,
                     options: Optional[SolverOptions] = None, jobs: int = 1) -> SolveResult:
    parametrization = parametrization or Parametrization()
    options = options or SolverOptions()
    system = ResidualSystem(target, parametrization)
    starts = starting_points(target.n, parametrization, options)

    def run(indexed: Tuple[int, np.ndarray]):
        index, init = indexed
        try:
            return levenberg_marquardt(system, init, options)
        except SolverError as e:
            logger.warning(f"start {index} failed: {e}")
            return None

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, enumerate(starts)))
    else:
        results = [run(item) for item in enumerate(starts)]

    finished = [(res.final_cost, i, res) for i, res in enumerate(results) if res is not None]
    if not finished:
        raise SolverError(f"all {len(starts)} starts failed")

    _, best_index, best = min(finished, key=lambda item: (item[0], item[1]))
    best.start_index = best_index
    best.start_costs = [None if res is None else res.final_cost for res in results]
    best.start_statuses = [None if res is None else res.status for res in results]
    logger.info(f"multistart: best start {best_index}/{len(starts)} cost={best.final_cost:.3e} status={best.status}")
    return best


# ============================================================
# 🚀  Preparation pipeline
# ============================================================
@dataclass
class PreparationReport:
    target: TargetState
    result: SolveResult
    layout: CircuitLayout
    acquired: DataAmplitudes
    gate_residuals: List[Tuple[float, float]]
    unitarity_flags: List[bool]        # True = gate fails the unitary test at 1e-6
    comparison: ComparisonReport

    @property
    def max_unitarity_residual(self) -> float:
        return max(max(abs(dn), abs(do)) for dn, do in self.gate_residuals)

    @property
    def all_unitary(self) -> bool:
        return not any(self.unitarity_flags)

    def to_dict(self) -> dict:
        return {
            "n": int(self.target.n),
            "target": [[float(z.real), float(z.imag)] for z in self.target.amplitudes],
            "acquired": [[float(z.real), float(z.imag)] for z in self.acquired.values],
            "layout": self.layout.to_dict(),
            "solve": self.result.to_dict(),
            "unitarity": {
                "residuals": [[float(dn), float(do)] for dn, do in self.gate_residuals],
                "flags": list(self.unitarity_flags),
                "max_residual": float(self.max_unitarity_residual),
            },
            "comparison": self.comparison.to_dict(),
        }


@dataclass(frozen=True)
class PreparationContext:
    target: TargetState
    parametrization: Parametrization = field(default_factory=Parametrization)
    options: SolverOptions = field(default_factory=SolverOptions)
    jobs: int = 1


class PreparationPipeline:
    """
    Solve → AcquiredGates → AcquiredAmplitude → unitary test → accuracy.
    """

    def __init__(self, context: PreparationContext):
        self.ctx = context

    def run(self) -> PreparationReport:
        ctx = self.ctx

        # ── Stage 1: fit the gate parameters ─────────────────────
        result = multistart_solve(ctx.target, ctx.parametrization, ctx.options, ctx.jobs)
        layout = result.layout

        # ── Stage 2: acquired amplitudes ─────────────────────────
        acquired = closed_form_amplitudes(layout)

        # ── Stage 3: unitary test per gate ───────────────────────
        gate_residuals = [unitarity_residuals(g) for g in layout.gates]
        flags = [max(abs(dn), abs(do)) > REPORT_UNITARY_TOL for dn, do in gate_residuals]
        if any(flags):
            logger.warning(f"{sum(flags)} gate(s) fail the unitary test at {REPORT_UNITARY_TOL:g}")

        # ── Stage 4: accuracy ────────────────────────────────────
        comparison = compare(ctx.target, acquired)

        return PreparationReport(ctx.target, result, layout, acquired, gate_residuals, flags, comparison)


def prepare_superposition(target: TargetState, parametrization: Optional[Parametrization] = None,
                          options: Optional[SolverOptions] = None, jobs: int = 1) -> PreparationReport:
    ctx = PreparationContext(
        target=target,
        parametrization=parametrization or Parametrization(),
        options=options or SolverOptions(),
        jobs=jobs,
    )
    return PreparationPipeline(ctx).run()
