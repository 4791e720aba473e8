"""
io_cli.py - command-line front end for pnegprep

Subcommands:
  solve         target / distribution → report.json, gates.json, plot.csv, circuit.qasm
  simulate      layout → amplitudes (json | csv)
  distribution  family → TargetState JSON (json | csv)
  batch         seeded random complex targets → batch_trials.csv, batch_summary.json
  table1        the 14 three-qubit table rows → table1.csv, table1.json, table1_<row>.csv
  export-qasm   layout → OpenQASM-style listing
  verify        unitary test over a gates / layout file

Exit codes: 0 success, 1 I/O or validation error, 2 solver failure (or failed verify).
JSON floats use Python's shortest round-trip repr; CSV floats use %.17g.
"""

import argparse
import json
import logging
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import FrozenSet, List, Optional, Sequence

import numpy as np
import pandas as pd

from gates import GateError, SymmetricGate, angles_from_gate, gate_from_angles, GateAngles, \
    is_unitary, unitarity_residuals, SOLVER_UNITARY_TOL
from circuit import CircuitLayout, closed_form_amplitudes, marginal_probabilities, \
    simulate_full, summed_ancilla_amplitudes
from equations import ParamKind, Parametrization, TargetState
from distributions import DistributionSpec, Family, Variant, generate, table1_rows
from solver import SolverError, SolverOptions, prepare_superposition
from config import settings, configure_logging
from utils.input_handler import InputError, process_input

logger = logging.getLogger("io_cli")

OUTPUTS = ("report_json", "gates_json", "plot_csv", "qasm")
CSV_FLOAT = "%.17g"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2


class JobError(ValueError):
    pass


# ============================================================
# 🔧  Codecs
# ============================================================
def complex_pairs(values) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def parse_complex_pairs(items) -> np.ndarray:
    try:
        return np.array([complex(float(re_), float(im_)) for re_, im_ in items], dtype=complex)
    except (TypeError, ValueError) as e:
        raise JobError(f"amplitudes must be [re, im] pairs: {e}")


def target_to_dict(target: TargetState) -> dict:
    return {"n": int(target.n), "amplitudes": complex_pairs(target.amplitudes), "normalize": False}


def target_from_dict(data: dict) -> TargetState:
    if "amplitudes" not in data:
        raise JobError("target needs an 'amplitudes' list")
    amps = parse_complex_pairs(data["amplitudes"])
    target = TargetState.from_amplitudes(amps, normalize=bool(data.get("normalize", False)))
    if "n" in data and int(data["n"]) != target.n:
        raise JobError(f"target declares n={data['n']} but carries {amps.size} amplitudes")
    return target


def gates_from_payload(payload) -> List[SymmetricGate]:
    """Gate list from a layout, {"gates": [...]} or a bare list."""
    if isinstance(payload, dict) and "data_gates" in payload:
        return list(CircuitLayout.from_dict(payload).gates)
    items = payload["gates"] if isinstance(payload, dict) else payload
    return [SymmetricGate.from_dict(g) for g in items]


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def write_json(path: Path, payload):
    path.write_text(dumps(payload), encoding="utf-8")


def write_csv(df: pd.DataFrame, path: Path):
    df.to_csv(path, index=False, float_format=CSV_FLOAT, lineterminator="\n")


def amplitudes_frame(values) -> pd.DataFrame:
    values = np.asarray(values, dtype=complex)
    return pd.DataFrame({"index": np.arange(values.size), "re": values.real, "im": values.imag})


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ============================================================
# 📦  Job & batch records
# ============================================================
@dataclass(frozen=True)
class JobSpec:
    target: Optional[TargetState] = None
    distribution: Optional[DistributionSpec] = None
    parametrization: Parametrization = field(default_factory=Parametrization)
    options: SolverOptions = field(default_factory=SolverOptions)
    outputs: FrozenSet[str] = frozenset(OUTPUTS)

    def __post_init__(self):
        if (self.target is None) == (self.distribution is None):
            raise JobError("a job needs exactly one of 'target' or 'distribution'")
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        if not self.outputs:
            raise JobError("a job must request at least one output")
        unknown = self.outputs - set(OUTPUTS)
        if unknown:
            raise JobError(f"unknown output(s) {sorted(unknown)}, expected a subset of {OUTPUTS}")

    def resolve_target(self) -> TargetState:
        return self.target if self.target is not None else generate(self.distribution)

    def to_dict(self) -> dict:
        data = {}
        if self.target is not None:
            data["target"] = target_to_dict(self.target)
        else:
            data["distribution"] = self.distribution.to_dict()
        data["parametrization"] = self.parametrization.to_dict()
        data["options"] = self.options.to_dict()
        data["outputs"] = sorted(self.outputs)
        return data

    @classmethod
    def from_dict(cls, data: dict, base_options: Optional[SolverOptions] = None) -> "JobSpec":
        target = target_from_dict(data["target"]) if "target" in data else None
        dist = DistributionSpec.from_dict(data["distribution"]) if "distribution" in data else None
        param = data.get("parametrization", {})
        options = dict(base_options.to_dict()) if base_options else {}
        options.update(data.get("options", {}))
        return cls(
            target=target,
            distribution=dist,
            parametrization=Parametrization(
                kind=param.get("kind", ParamKind.ANGLES),
                unitarity_weight=float(param.get("unitarity_weight", 1.0)),
            ),
            options=SolverOptions.from_dict(options),
            outputs=frozenset(data.get("outputs", OUTPUTS)),
        )


@dataclass
class BatchSummary:
    trial_count: int
    relative_errors: List[Optional[float]]    # None for a failed trial
    failure_count: int

    def _completed(self) -> pd.Series:
        return pd.Series([e for e in self.relative_errors if e is not None], dtype=float)

    @property
    def mean(self) -> float:
        return float(self._completed().mean())

    @property
    def median(self) -> float:
        return float(self._completed().median())

    @property
    def min(self) -> float:
        return float(self._completed().min())

    @property
    def max(self) -> float:
        return float(self._completed().max())

    def to_dict(self) -> dict:
        done = self._completed()
        stats = {k: (float(getattr(done, k)()) if not done.empty else None) for k in ("mean", "median", "min", "max")}
        return {
            "trial_count": self.trial_count,
            "failure_count": self.failure_count,
            "relative_errors": self.relative_errors,
            **{f"{k}_relative_error": v for k, v in stats.items()},
        }


# ============================================================
# 🔌  Circuit export
# ============================================================
_QASM_SINGLE = re.compile(r"^rx\((?P<rot>[^)]+)\) q\[(?P<q>\d+)\]; // phase (?P<gamma>\S+)$")
_QASM_CONTROLLED = re.compile(r"^cpneg\((?P<gamma>[^,]+), (?P<theta>[^)]+)\) q\[(?P<q>\d+)\], anc\[0\];$")
_QASM_QREG = re.compile(r"^qreg (?P<name>\w+)\[(?P<size>\d+)\];$")


def _num(x: float) -> str:
    # + 0.0 folds -0.0 into 0.0
    return repr(float(x) + 0.0)


def export_circuit(layout: CircuitLayout, tol: float = SOLVER_UNITARY_TOL) -> str:
    """
    Each gate K = e^{iγ}·rx(-2θ).
    Data gates: rx line with the global phase as a trailing tag.
    Controlled gates: cpneg(γ, θ), a phase on the control plus a controlled rx.
    """
    for i, g in enumerate(layout.gates):
        if not is_unitary(g, tol):
            raise GateError(f"gate K_{i + 1} fails the unitary test at {tol:g}: {unitarity_residuals(g)}")

    n = layout.n
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"// pnegprep preparation circuit: {n} data qubit(s), 1 ancilla",
        "gate cpneg(gamma, theta) c, t { u1(gamma) c; crx(-2*theta) c, t; }",
        f"qreg q[{n}];",
        "qreg anc[1];",
    ]
    for i, g in enumerate(layout.data_gates):
        ang = angles_from_gate(g)
        lines.append(f"rx({_num(-2.0 * ang.theta)}) q[{i}]; // phase {_num(ang.gamma)}")
    for i, g in enumerate(layout.ancilla_gates):
        ang = angles_from_gate(g)
        lines.append(f"cpneg({_num(ang.gamma)}, {_num(ang.theta)}) q[{i}], anc[0];")
    return "\n".join(lines) + "\n"


def parse_qasm(text: str) -> CircuitLayout:
    """Reads back a listing written by export_circuit."""
    data, anc = {}, {}
    for line in text.splitlines():
        line = line.strip()
        m = _QASM_SINGLE.match(line)
        if m:
            data[int(m["q"])] = gate_from_angles(GateAngles(float(m["gamma"]), -float(m["rot"]) / 2.0))
            continue
        m = _QASM_CONTROLLED.match(line)
        if m:
            anc[int(m["q"])] = gate_from_angles(GateAngles(float(m["gamma"]), float(m["theta"])))
    n = len(data)
    if n == 0 or sorted(data) != list(range(n)) or sorted(anc) != list(range(n)):
        raise JobError("listing does not contain n data rotations and n controlled gates on q[0..n-1]")
    return CircuitLayout(n, tuple(data[i] for i in range(n)), tuple(anc[i] for i in range(n)))


def instruction_counts(text: str) -> dict:
    single = controlled = ancillas = 0
    for line in text.splitlines():
        line = line.strip()
        if _QASM_SINGLE.match(line):
            single += 1
        elif _QASM_CONTROLLED.match(line):
            controlled += 1
        else:
            m = _QASM_QREG.match(line)
            if m and m["name"] == "anc":
                ancillas += int(m["size"])
    return {"single": single, "controlled": controlled, "ancillas": ancillas}


# ============================================================
# 🚀  Commands
# ============================================================
def gates_report(layout: CircuitLayout) -> dict:
    data = layout.to_dict()
    try:
        data["angles"] = [angles_from_gate(g).to_dict() for g in layout.gates]
    except GateError:
        pass
    data["unitarity"] = [list(unitarity_residuals(g)) for g in layout.gates]
    return data


def cli_solve(job: JobSpec, out_dir, jobs: int = 1) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    target = job.resolve_target()
    try:
        report = prepare_superposition(target, job.parametrization, job.options, jobs=jobs)
    except SolverError as e:
        print(f"❌ Solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER

    if "report_json" in job.outputs:
        payload = report.to_dict()
        payload["job"] = job.to_dict()
        write_json(out / "report.json", payload)
    if "gates_json" in job.outputs:
        write_json(out / "gates.json", gates_report(report.layout))
    if "plot_csv" in job.outputs:
        write_csv(report.comparison.to_frame(), out / "plot.csv")
    if "qasm" in job.outputs:
        try:
            (out / "circuit.qasm").write_text(export_circuit(report.layout), encoding="utf-8")
        except GateError as e:
            logger.warning(f"circuit.qasm skipped: {e}")

    icon = "✅" if report.all_unitary else "⚠️"
    print(f"{icon} cost={report.result.final_cost:.3e} "
          f"relative_error={report.comparison.relative_error:.4e} "
          f"max_unitarity_residual={report.max_unitarity_residual:.2e} "
          f"status={report.result.status}")
    return EXIT_OK


def _batch_trial(args):
    trial, target_seed, n, parametrization, options = args
    target = generate(DistributionSpec(Family.RANDOM_COMPLEX, n, rng_seed=target_seed))
    try:
        report = prepare_superposition(target, parametrization, options)
    except SolverError as e:
        logger.warning(f"trial {trial} failed: {e}")
        return {"trial": trial, "target_seed": target_seed, "relative_error": None,
                "fidelity": None, "final_cost": None, "status": "Failed"}
    return {
        "trial": trial,
        "target_seed": target_seed,
        "relative_error": report.comparison.relative_error,
        "fidelity": report.comparison.fidelity,
        "final_cost": report.result.final_cost,
        "status": report.result.status,
    }


def cli_batch(n: int, trials: int, seed: int, options: SolverOptions,
              parametrization: Optional[Parametrization] = None,
              out_dir=None, jobs: int = 1) -> BatchSummary:
    if trials < 1:
        raise JobError(f"trials must be >= 1, got {trials}")
    parametrization = parametrization or Parametrization()
    seeds = np.random.SeedSequence(int(seed)).generate_state(trials, dtype=np.uint64)
    work = [(t, int(s), n, parametrization, options) for t, s in enumerate(seeds)]

    print(f"🎯 Batch: {trials} random complex targets at n={n}")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_batch_trial, work))
    else:
        rows = [_batch_trial(w) for w in work]
    rows.sort(key=lambda r: r["trial"])

    summary = BatchSummary(
        trial_count=trials,
        relative_errors=[r["relative_error"] for r in rows],
        failure_count=sum(1 for r in rows if r["relative_error"] is None),
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(pd.DataFrame(rows), out / "batch_trials.csv")
        write_json(out / "batch_summary.json", summary.to_dict())

    done = summary.trial_count - summary.failure_count
    if done:
        print(f"🏁 {done}/{trials} trials solved, mean relative error {summary.mean:.4e}")
    else:
        print(f"❌ all {trials} trials failed")
    return summary


def cli_table1(out_dir, options: Optional[SolverOptions] = None,
               parametrization: Optional[Parametrization] = None, jobs: int = 1) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    options = options or SolverOptions()
    parametrization = parametrization or Parametrization()

    records = []
    for row in table1_rows():
        record = {"label": row.label, "family": row.family, "variant": row.variant,
                  "reported_error": row.reported_error, "achieved_error": None,
                  "fidelity": None, "final_cost": None, "status": "Failed", "error": None}
        try:
            report = prepare_superposition(row.target, parametrization, options, jobs=jobs)
            record.update(achieved_error=report.comparison.relative_error,
                          fidelity=report.comparison.fidelity,
                          final_cost=report.result.final_cost,
                          status=report.result.status)
            write_csv(report.comparison.to_frame(), out / f"table1_{row.label}.csv")
        except (SolverError, ValueError, ArithmeticError) as e:
            # one bad row never aborts the table
            logger.error(f"{row.label}: {e}")
            record["error"] = str(e)
        records.append(record)

    df = pd.DataFrame(records)
    write_csv(df, out / "table1.csv")
    write_json(out / "table1.json", {"rows": records})
    print(df[["label", "reported_error", "achieved_error", "status"]].to_string(index=False))
    return EXIT_OK


def cli_simulate(layout: CircuitLayout, fmt: str, out: Optional[str], permissive: bool = False) -> int:
    sv = simulate_full(layout, permissive=permissive)
    summed = summed_ancilla_amplitudes(sv)
    if fmt == "csv":
        _emit(amplitudes_frame(summed.values).to_csv(index=False, float_format=CSV_FLOAT, lineterminator="\n"), out)
        return EXIT_OK
    payload = {
        "n": layout.n,
        "summed_amplitudes": complex_pairs(summed.values),
        "closed_form_amplitudes": complex_pairs(closed_form_amplitudes(layout).values),
        "marginal_probabilities": [float(p) for p in marginal_probabilities(sv)],
        "statevector": complex_pairs(sv.amplitudes),
    }
    _emit(dumps(payload), out)
    return EXIT_OK


def cli_distribution(spec: DistributionSpec, fmt: str, out: Optional[str]) -> int:
    target = generate(spec)
    if fmt == "csv":
        _emit(amplitudes_frame(target.amplitudes).to_csv(index=False, float_format=CSV_FLOAT, lineterminator="\n"), out)
    else:
        _emit(dumps(target_to_dict(target)), out)
    return EXIT_OK


def cli_verify(gates: Sequence[SymmetricGate], tol: float) -> int:
    ok = True
    for i, g in enumerate(gates, 1):
        d_norm, d_orth = unitarity_residuals(g)
        passed = max(abs(d_norm), abs(d_orth)) <= tol
        ok = ok and passed
        print(f"[K_{i}] {'✅' if passed else '❌'} d_norm={d_norm:+.3e} d_orth={d_orth:+.3e}")
    print(f"{'🟢' if ok else '🛑'} unitary test at tol={tol:g}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_SOLVER


# ============================================================
# 🧭  Argument parsing
# ============================================================
def _add_solver_flags(p: argparse.ArgumentParser):
    p.add_argument("--param", choices=ParamKind.ALL, default=None)
    p.add_argument("--unitarity-weight", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--multistart", type=int, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--tol", type=float, default=None, help="cost tolerance")
    p.add_argument("--fd-jacobian", action="store_true", help="finite-difference Jacobian (verification)")
    p.add_argument("--jobs", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pnegprep", description="Partial-negation quantum state preparation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="fit the circuit to a target")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--target", help="target or job JSON file")
    src.add_argument("--distribution", choices=Family.ALL)
    p.add_argument("--qubits", type=int, default=3)
    p.add_argument("--variant", choices=(Variant.REAL, Variant.COMPLEX), default=Variant.REAL)
    p.add_argument("--out", default="out")
    _add_solver_flags(p)

    p = sub.add_parser("simulate", help="layout → amplitudes")
    p.add_argument("--layout", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--permissive", action="store_true", help="allow non-unitary gates")
    p.add_argument("--out")

    p = sub.add_parser("distribution", help="emit a target state")
    p.add_argument("--distribution", choices=Family.ALL, required=True)
    p.add_argument("--qubits", type=int, default=3)
    p.add_argument("--variant", choices=(Variant.REAL, Variant.COMPLEX), default=Variant.REAL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")

    p = sub.add_parser("batch", help="random complex targets")
    p.add_argument("--qubits", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", default="out")
    _add_solver_flags(p)

    p = sub.add_parser("table1", help="the 14 three-qubit table rows")
    p.add_argument("--out", default="out")
    _add_solver_flags(p)

    p = sub.add_parser("export-qasm", help="layout → OpenQASM-style listing")
    p.add_argument("--layout", required=True)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="unitary test over a gates file")
    p.add_argument("--gates", required=True)
    p.add_argument("--tol", type=float, default=SOLVER_UNITARY_TOL)
    return parser


def _options_from_args(args, base: Optional[SolverOptions] = None) -> SolverOptions:
    overrides = {
        "rng_seed": args.seed if args.seed is not None else settings.run.get("seed"),
        "multistart_count": args.multistart,
        "max_iterations": args.max_iter,
        "cost_tol": args.tol,
        "finite_difference": True if args.fd_jacobian else None,
    }
    if base is None:
        return settings.solver_options(**overrides)
    merged = base.to_dict()
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return SolverOptions.from_dict(merged)


def _jobs(args) -> int:
    jobs = args.jobs if args.jobs is not None else int(settings.run.get("jobs", 1))
    if jobs < 1:
        raise JobError(f"--jobs must be >= 1, got {jobs}")
    return jobs


def _load_layout(path) -> CircuitLayout:
    _, payload = process_input(path, expected=("LAYOUT",))
    return CircuitLayout.from_dict(payload)


def run_command(args) -> int:
    cmd = args.command

    if cmd == "solve":
        param = settings.parametrization(args.param, args.unitarity_weight)
        if args.target:
            kind, payload = process_input(args.target, expected=("TARGET", "JOB"))
            if kind == "JOB":
                job = JobSpec.from_dict(payload, base_options=settings.solver_options())
                job = JobSpec(job.target, job.distribution,
                              settings.parametrization(args.param or job.parametrization.kind,
                                                       args.unitarity_weight if args.unitarity_weight is not None
                                                       else job.parametrization.unitarity_weight),
                              _options_from_args(args, job.options), job.outputs)
            else:
                job = JobSpec(target=target_from_dict(payload), parametrization=param,
                              options=_options_from_args(args))
        else:
            options = _options_from_args(args)
            # the target draw and the solver starts share one seed
            dist = DistributionSpec(args.distribution, args.qubits, rng_seed=options.rng_seed, variant=args.variant)
            job = JobSpec(distribution=dist, parametrization=param, options=options)
        return cli_solve(job, args.out, jobs=_jobs(args))

    if cmd == "simulate":
        return cli_simulate(_load_layout(args.layout), args.format, args.out, args.permissive)

    if cmd == "distribution":
        spec = DistributionSpec(args.distribution, args.qubits, rng_seed=args.seed, variant=args.variant)
        return cli_distribution(spec, args.format, args.out)

    if cmd == "batch":
        options = _options_from_args(args)
        param = settings.parametrization(args.param, args.unitarity_weight)
        summary = cli_batch(args.qubits, args.trials, options.rng_seed, options, param, args.out, _jobs(args))
        return EXIT_OK if summary.failure_count < summary.trial_count else EXIT_SOLVER

    if cmd == "table1":
        param = settings.parametrization(args.param, args.unitarity_weight)
        return cli_table1(args.out, _options_from_args(args), param, _jobs(args))

    if cmd == "export-qasm":
        _emit(export_circuit(_load_layout(args.layout)), args.out)
        return EXIT_OK

    if cmd == "verify":
        _, payload = process_input(args.gates, expected=("GATES", "LAYOUT"))
        return cli_verify(gates_from_payload(payload), args.tol)

    raise JobError(f"unknown command {cmd!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return run_command(args)
    except SolverError as e:
        print(f"❌ Solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except InputError as e:
        print(f"❌ Input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError, OSError) as e:
        print(f"❌ Validation error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
