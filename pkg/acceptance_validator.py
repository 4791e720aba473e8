"""
acceptance_validator.py - long-running acceptance gates for pnegprep

Each gate logs PASS or records a GateFailure; every gate runs and the exit
report lists the failures. Table rows no product state can fit (see
distributions.PRODUCT_UNREACHABLE_ROWS) and i.i.d. random batch targets are
reported, not gated: the circuit output is always a product state.

Usage: python acceptance_validator.py [--quick]
"""

import argparse
import logging
import sys
import tempfile
import time
from pathlib import Path
from typing import List

import numpy as np
import qiskit.qasm2

from gates import GateAngles, PRINTED_UNITARY_TOL, column_sum, gate_from_angles, gate_from_entries, \
    gate_from_root, unitarity_residuals
from circuit import CircuitLayout, closed_form_amplitudes, simulate_full, summed_ancilla_amplitudes
from equations import ParamKind, Parametrization, ResidualSystem, TargetState, jacobian_analytic, jacobian_fd
from distributions import DECREASING_COMPLEX_3, table1_rows
from solver import SolverOptions, levenberg_marquardt, prepare_superposition
from io_cli import cli_batch, export_circuit, instruction_counts, main as cli_main

logging.basicConfig(level=logging.INFO, format='%(levelname)s: %(message)s')
logger = logging.getLogger("AcceptanceGates")

WORKED_EXAMPLE_PROBS = np.array([0.2826, 0.2080, 0.1477, 0.1105, 0.0937, 0.0683, 0.0491, 0.0361])


class GateFailure(Exception):
    pass


def check_gate(gate_name, condition, error_msg):
    if not condition:
        raise GateFailure(f"[{gate_name}] FAIL: {error_msg}")
    logger.info(f"[{gate_name}] PASS")


def random_layout(rng: np.random.Generator, n: int) -> CircuitLayout:
    gates = [gate_from_angles(GateAngles(*rng.uniform(-np.pi, np.pi, size=2))) for _ in range(2 * n)]
    return CircuitLayout(n, tuple(gates[:n]), tuple(gates[n:]))


class LinearProblem:
    """r(p) = A p - y with an exact dyadic solution."""
    A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    y = np.array([1.0, 2.0, 3.0])
    parameter_count = 2

    def residuals(self, p):
        return self.A @ p - self.y

    def jacobian(self, p, finite_difference=False):
        return self.A.copy()


class RosenbrockProblem:
    parameter_count = 2

    def residuals(self, p):
        return np.array([10.0 * (p[1] - p[0] ** 2), 1.0 - p[0]])

    def jacobian(self, p, finite_difference=False):
        return np.array([[-20.0 * p[0], 10.0], [-1.0, 0.0]])


# ============================================================
# 🚪  Gates
# ============================================================
def gate_oracle_equivalence(layouts: int):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for k in range(layouts):
        layout = random_layout(rng, 1 + k % 6)
        summed = summed_ancilla_amplitudes(simulate_full(layout)).values
        worst = max(worst, float(np.max(np.abs(closed_form_amplitudes(layout).values - summed))))
    logger.info(f"oracle: max deviation over {layouts} layouts = {worst:.3e}")
    check_gate("ORACLE", worst <= 1e-12, f"closed form deviates by {worst:.3e}")


def gate_root_algebra():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    for r in range(1, 9):
        g = gate_from_root(r)
        power = np.linalg.matrix_power(g.matrix, r)
        check_gate(f"ROOT r={r}", np.max(np.abs(power - x)) <= 1e-10, f"K^{r} != X")
        check_gate(f"COLSUM r={r}", abs(column_sum(g) - 1) <= 1e-12, f"a+b = {column_sum(g)}")


def gate_printed_gate():
    k1 = gate_from_entries(0.7784 + 0.3818j, 0.2192 - 0.4468j)
    d_norm, d_orth = unitarity_residuals(k1)
    check_gate("PRINTED K1", max(abs(d_norm), abs(d_orth)) <= PRINTED_UNITARY_TOL,
               f"residuals ({d_norm:.3e}, {d_orth:.3e})")


def gate_worked_example():
    t0 = time.perf_counter()
    target = TargetState(3, DECREASING_COMPLEX_3)
    report = prepare_superposition(target)
    elapsed = time.perf_counter() - t0
    logger.info(f"worked example: relative_error={report.comparison.relative_error:.4e} in {elapsed:.1f}s")
    check_gate("WORKED ERROR", report.comparison.relative_error <= 1e-2,
               f"relative error {report.comparison.relative_error:.4e}")
    dev = float(np.max(np.abs(report.comparison.prepared_probs - WORKED_EXAMPLE_PROBS)))
    check_gate("WORKED PROBS", dev <= 5e-4, f"prepared probabilities deviate by {dev:.3e}")
    worst = max(max(abs(dn), abs(do)) for dn, do in report.gate_residuals)
    check_gate("SOLVED UNITARY", worst <= 1e-12, f"unitarity residual {worst:.3e}")
    return report


def gate_table_rows():
    rows, missed = [], []
    for row in table1_rows():
        report = prepare_superposition(row.target)
        err = report.comparison.relative_error
        rows.append((row.label, row.reported_error, err, row.gated))
        if not row.gated:
            logger.info(f"[TABLE {row.label}] reported only: achieved={err:.4e} (listed {row.reported_error:g})")
            continue
        limit = 1e-6 if row.label == "equal-complex" else 1e-2
        if err <= limit:
            logger.info(f"[TABLE {row.label}] PASS")
        else:
            missed.append(f"{row.label} {err:.4e} > {limit:g}")
    check_gate("TABLE", not missed, "; ".join(missed))
    return rows


def gate_batch(trials: int):
    with tempfile.TemporaryDirectory() as tmp:
        summary = cli_batch(3, trials, seed=7, options=SolverOptions(), out_dir=tmp)
    logger.info(f"[BATCH] reported only: mean={summary.mean:.4e} median={summary.median:.4e} "
                f"failures={summary.failure_count}")
    check_gate("BATCH STATS", summary.min <= summary.mean <= summary.max, "mean outside [min, max]")
    return summary


def gate_jacobians(points: int):
    rng = np.random.default_rng(99)
    worst = 0.0
    for n in (1, 2, 3):
        target = TargetState.from_amplitudes(rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n), normalize=True)
        for kind in ParamKind.ALL:
            system = ResidualSystem(target, Parametrization(kind))
            for _ in range(points):
                p = rng.uniform(-np.pi, np.pi, size=system.parameter_count)
                worst = max(worst, float(np.max(np.abs(jacobian_analytic(p, system) - jacobian_fd(p, system)))))
    check_gate("JACOBIAN", worst <= 1e-6, f"analytic vs central difference {worst:.3e}")


def gate_solver_sanity():
    lin = levenberg_marquardt(LinearProblem(), np.zeros(2),
                              SolverOptions(lambda_init=1e-9, cost_tol=1e-30, max_iterations=3))
    check_gate("LM LINEAR", lin.final_cost <= 1e-30 and lin.iterations <= 3,
               f"cost {lin.final_cost:.3e} after {lin.iterations} iterations")
    rosen = levenberg_marquardt(RosenbrockProblem(), np.array([-1.2, 1.0]), SolverOptions(cost_tol=1e-30))
    check_gate("LM ROSENBROCK", np.max(np.abs(rosen.params - 1.0)) <= 1e-8, f"ended at {rosen.params}")


def gate_structure():
    rng = np.random.default_rng(5)
    for n in range(1, 9):
        text = export_circuit(random_layout(rng, n))
        counts = instruction_counts(text)
        check_gate(f"STRUCTURE n={n}", counts == {"single": n, "controlled": n, "ancillas": 1}, f"{counts}")
        qc = qiskit.qasm2.loads(text)
        ops = dict(qc.count_ops())
        registers = [(reg.name, reg.size) for reg in qc.qregs]
        check_gate(f"OPENQASM n={n}", ops == {"rx": n, "cpneg": n} and registers == [("q", n), ("anc", 1)],
                   f"ops={ops} registers={registers}")


def gate_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        outs = [Path(tmp) / "a", Path(tmp) / "b"]
        for out in outs:
            code = cli_main(["solve", "--distribution", "decreasing", "--variant", "complex",
                             "--seed", "7", "--multistart", "4", "--out", str(out)])
            check_gate("DETERMINISM RUN", code == 0, f"exit code {code}")
        for name in ("report.json", "gates.json"):
            same = (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
            check_gate(f"DETERMINISM {name}", same, "repeated run differs")


def run_acceptance(quick: bool = False) -> List[str]:
    """Runs every gate; a failing gate is recorded and the rest still run."""
    timings, failures = {}, []

    def timed(label, fn, *args):
        t0 = time.perf_counter()
        try:
            return fn(*args)
        except GateFailure as e:
            logger.error(f"🛑 {e}")
            failures.append(str(e))
            return None
        finally:
            timings[label] = time.perf_counter() - t0

    timed("oracle", gate_oracle_equivalence, 100 if quick else 1000)
    timed("root algebra", gate_root_algebra)
    timed("printed gate", gate_printed_gate)
    report = timed("worked example", gate_worked_example)
    rows = timed("table", gate_table_rows)
    summary = timed("batch", gate_batch, 10 if quick else 100)
    timed("jacobian", gate_jacobians, 10 if quick else 100)
    timed("solver sanity", gate_solver_sanity)
    timed("structure", gate_structure)
    timed("determinism", gate_determinism)

    print("\n" + "=" * 30)
    print("ACCEPTANCE EXIT REPORT")
    print("=" * 30)
    if report is not None:
        print(f"Worked example error: {report.comparison.relative_error:.4e}")
    for label, listed, achieved, gated in rows or []:
        tag = "gated" if gated else "reported"
        print(f"  {label:<20} listed={listed:<10g} achieved={achieved:.4e} ({tag})")
    if summary is not None:
        print(f"Batch mean error: {summary.mean:.4e} over {summary.trial_count - summary.failure_count} trials")
    for label, seconds in timings.items():
        print(f"  {label:<16} {seconds:7.2f}s")
    for failure in failures:
        print(f"  FAILED {failure}")
    print("=" * 30 + "\n")

    if failures:
        logger.error(f"{len(failures)} gate(s) failed.")
    else:
        logger.info("ALL GATES PASSED.")
    return failures


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    try:
        failed = run_acceptance(quick=args.quick)
    except Exception as e:
        logger.error(f"System Error: {e}")
        sys.exit(1)
    sys.exit(1 if failed else 0)
