"""Command-line interface.

Reports are JSON on stdout (or ``--out``); a one-line summary goes to stderr.
Exit codes: 0 success/pass, 1 verification failure, 2 input error,
3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import fileio
from .errors import (
    CodimensionError,
    DegeneracyError,
    GridError,
    OpenLoopError,
    StructuralError,
    TangencyError,
    VerificationError,
)
from .matrixcore import DEFAULT_TOL, Tolerance, dagger, random_unitary
from .metrics import (
    CLOSURE_TOL,
    GateSpec,
    ProjectiveGate,
    curve_length,
    isoholonomic_bound,
    projective_isoholonomic_bound,
    qsl_report,
    speed_trace,
    driven_path,
)
from .protocols import bloch_components, build_tight, verify_tight
from .transport import (
    check_parallel_lab,
    check_parallel_rotating,
    check_projective_lab,
    check_projective_rotating,
    connection_trace,
    horizontal_lift,
    loop_closure,
    projective_horizontal_lift,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2, 3
DEFAULT_SEED = 20250517


class ScenarioResult:
    def __init__(self, code: int, report: dict, summary: str):
        self.code = code
        self.report = report
        self.summary = summary


def _tol(args) -> Tolerance:
    return Tolerance(args.tol_structural, args.tol_transport, DEFAULT_TOL.integration)


def _write_csv(path, header, columns):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([repr(float(x)) for x in row])


def cmd_bound(args) -> ScenarioResult:
    gate = fileio.gate_from_json(fileio.load_json(args.gate))
    l_conv = isoholonomic_bound(gate)
    l_proj, k = projective_isoholonomic_bound(gate)
    report = {
        "eigenphases": [float(x) for x in gate.eigenphases],
        "L": l_conv,
        "L_projective": l_proj,
        "argmin_shift": k,
        "argmin_shift_value": 0.0 if k == 0 else float(gate.eigenphases[k - 1]),
    }
    if args.projective:
        canon = ProjectiveGate(gate).canonical_rep
        report["canonical_representative"] = fileio.matrix_to_json(canon.matrix)
    return ScenarioResult(EXIT_OK, report, f"L = {l_conv:.12g}, L_projective = {l_proj:.12g}")


def cmd_lift(args) -> ScenarioResult:
    tol = _tol(args)
    path = fileio.path_from_json(fileio.load_json(args.path))
    v0 = fileio.frame_from_json(fileio.load_json(args.frame), tol.structural)
    eps = fileio.shift_from_json(fileio.load_json(args.eps)) if args.eps else None
    if eps is not None:
        lift = projective_horizontal_lift(path, v0, eps, tol)
    else:
        lift = horizontal_lift(path, v0, tol)
    closed, defect = loop_closure(path, args.closure_tol)
    conn = connection_trace(lift)
    if eps is not None:
        conn = conn - 1j * eps.at_many(lift.times)[:, None, None] * np.eye(v0.shape[1])
    conn_res = np.max(np.abs(conn), axis=(1, 2))
    gamma = dagger(lift.initial) @ lift.final
    report = {
        "holonomy": fileio.matrix_to_json(gamma),
        "closed": closed,
        "closure_defect": defect,
        "connection_residual": float(np.max(conn_res)),
        "length": curve_length(path),
    }
    if args.projective or eps is not None:
        u, _, wh = np.linalg.svd(gamma)
        canon = ProjectiveGate(GateSpec(u @ wh, tol=1e-8)).canonical_rep
        report["projective_holonomy"] = fileio.matrix_to_json(canon.matrix)
    if not closed:
        report["caveat"] = "open loop: the reported holonomy is the open-path transport V0^dag V_tau"
    if args.plot:
        _write_csv(args.plot, ["t", "connection_residual"], [lift.times, conn_res])
    summary = f"closure defect {defect:.3e}, length {report['length']:.9g}"
    if not closed:
        print("warning: path is not closed; holonomy reported with caveat", file=sys.stderr)
    return ScenarioResult(EXIT_OK, report, summary)


def cmd_check(args) -> ScenarioResult:
    tol = _tol(args)
    h = fileio.hamiltonian_from_json(fileio.load_json(args.hamiltonian))
    v0 = fileio.frame_from_json(fileio.load_json(args.frame), tol.structural)
    kw = dict(steps=args.steps, tol=tol, method=args.integrator)
    if args.rotating:
        r = fileio.rotating_frame_from_json(fileio.load_json(args.rotating))
        check = check_projective_rotating if args.projective else check_parallel_rotating
        rep = check(h, r, v0, **kw)
    else:
        check = check_projective_lab if args.projective else check_parallel_lab
        rep = check(h, v0, **kw)
    if args.plot:
        times = np.linspace(0.0, h.tau, args.steps + 1)
        eps = rep.epsilon_trace if rep.epsilon_trace is not None else np.zeros_like(times)
        _write_csv(args.plot, ["t", "residual", "epsilon"], [times, rep.residual_trace, eps])
    code = EXIT_OK if rep.verdict else EXIT_FAIL
    return ScenarioResult(code, rep.to_dict(), f"{rep.condition} check: {'pass' if rep.verdict else 'fail'} "
                          f"(max residual {rep.max_residual:.3e})")


def _load_or_random_gate(args) -> GateSpec:
    if args.gate:
        return fileio.gate_from_json(fileio.load_json(args.gate))
    if args.random_n:
        return GateSpec(random_unitary(args.random_n, np.random.default_rng(args.seed)), tol=1e-9)
    raise StructuralError("tight needs a gate file or --random-n")


def cmd_tight(args) -> ScenarioResult:
    gate = _load_or_random_gate(args)
    n = gate.n
    frame = np.eye(args.dim, dtype=complex)[:, :n]
    protocol = build_tight(gate, frame, args.tau, args.epsilon, _tol(args))
    if args.protocol:
        fileio.dump_json(fileio.protocol_to_json(protocol), args.protocol)
    if args.export_hamiltonian:
        h_json = fileio.hamiltonian_to_json(protocol.hamiltonian)
        if args.export_samples:
            from .dynamics import sample_hamiltonian

            h_json = fileio.hamiltonian_to_json(sample_hamiltonian(protocol.hamiltonian, args.export_samples))
        fileio.dump_json(h_json, args.export_hamiltonian)
        fileio.dump_json(fileio.frame_to_json(frame), Path(args.export_hamiltonian).with_suffix(".frame.json"))
    result = verify_tight(protocol, args.steps, raise_on_failure=False, method=args.integrator)
    report = result.to_dict()
    report["target"] = fileio.gate_to_json(gate.matrix)
    if args.plot:
        path = driven_path(protocol.hamiltonian, frame, args.steps, args.integrator)[1]
        cols = [path.times, speed_trace(protocol.hamiltonian, path)]
        header = ["t", "speed"]
        for k, blk in enumerate(protocol.blocks):
            from .protocols import block_trajectory

            traj = block_trajectory(blk, protocol.tau, args.steps)
            comps = np.array([bloch_components(rho, blk.v, blk.w) for rho in traj.samples])
            cols += [comps[:, 0], comps[:, 1], comps[:, 2]]
            header += [f"rx_{k}", f"ry_{k}", f"rz_{k}"]
        _write_csv(args.plot, header, cols)
    code = EXIT_OK if result.passed else EXIT_FAIL
    summary = "tight protocol verified" if result.passed else "verification failed: " + "; ".join(result.failures)
    return ScenarioResult(code, report, summary)


def cmd_verify(args) -> ScenarioResult:
    tol = _tol(args)
    h = fileio.hamiltonian_from_json(fileio.load_json(args.hamiltonian))
    v0 = fileio.frame_from_json(fileio.load_json(args.frame), tol.structural)
    if args.gate:
        gate = fileio.gate_from_json(fileio.load_json(args.gate))
        mode = "target"
    else:
        frames, path = driven_path(h, v0, args.steps, args.integrator)
        closed, defect = loop_closure(path, args.closure_tol)
        if not closed:
            raise OpenLoopError(f"path is not closed: |P_tau - P_0| = {defect:.3e}")
        u, _, wh = np.linalg.svd(dagger(v0) @ frames[-1])
        gate = GateSpec(u @ wh, tol=1e-8)
        mode = "measured"
    target = ProjectiveGate(gate) if args.projective else gate
    try:
        rep = qsl_report(h, v0, target, args.steps, tol, args.closure_tol, args.integrator)
        code = EXIT_OK
    except VerificationError as exc:
        rep, code = exc.report, EXIT_FAIL
    report = rep.to_dict()
    report["target_mode"] = mode
    if args.plot:
        path = driven_path(h, v0, args.steps, args.integrator)[1]
        _write_csv(args.plot, ["t", "speed"], [path.times, speed_trace(h, path)])
    return ScenarioResult(code, report, f"saturation ratio {rep.saturation_ratio:.6f} ({rep.bound_kind} bound)")


COMMANDS = {"bound": cmd_bound, "lift": cmd_lift, "check": cmd_check, "tight": cmd_tight, "verify": cmd_verify}
POSITIONALS = {
    "bound": ["gate"],
    "lift": ["path", "frame"],
    "check": ["hamiltonian", "frame"],
    "tight": [],
    "verify": ["hamiltonian", "frame"],
}


def _common(p: argparse.ArgumentParser):
    p.add_argument("--steps", type=int, default=4096, help="propagation steps (default 4096)")
    p.add_argument("--tol-structural", type=float, default=DEFAULT_TOL.structural)
    p.add_argument("--tol-transport", type=float, default=DEFAULT_TOL.transport)
    p.add_argument("--closure-tol", type=float, default=CLOSURE_TOL)
    p.add_argument("--integrator", choices=["midpoint", "magnus4"], default="midpoint")
    p.add_argument("--projective", action="store_true", help="use the projective condition / bound")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--plot", help="write CSV traces to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holotransport", description=__doc__.splitlines()[0])
    parser.add_argument("--batch", help="JSON list of scenarios to run concurrently")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("bound", help="isoholonomic bounds of a gate")
    p.add_argument("gate")
    _common(p)

    p = sub.add_parser("lift", help="horizontal lift and holonomy of a projector path")
    p.add_argument("path")
    p.add_argument("frame")
    p.add_argument("--eps", help="shift-function file for a projective lift")
    _common(p)

    p = sub.add_parser("check", help="parallel-transport condition of a Hamiltonian")
    p.add_argument("hamiltonian")
    p.add_argument("frame")
    p.add_argument("--rotating", help="rotating-frame file; the Hamiltonian is then the rotating-frame one")
    _common(p)

    p = sub.add_parser("tight", help="synthesize and verify a tight protocol")
    p.add_argument("gate", nargs="?")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--protocol", help="write the protocol JSON here")
    p.add_argument("--export-hamiltonian", help="write the assembled Hamiltonian (and its frame) here")
    p.add_argument("--export-samples", type=int, help="export the Hamiltonian sampled on this many intervals")
    p.add_argument("--random-n", type=int, help="use a seeded random n x n target instead of a gate file")
    _common(p)

    p = sub.add_parser("verify", help="speed-limit report for a Hamiltonian")
    p.add_argument("hamiltonian")
    p.add_argument("frame")
    p.add_argument("--gate", help="target gate; defaults to the measured holonomy")
    _common(p)
    return parser


def run(args) -> ScenarioResult:
    try:
        return COMMANDS[args.command](args)
    except (VerificationError, OpenLoopError) as exc:
        report = getattr(exc, "report", None)
        payload = {"error": str(exc)}
        if report is not None and hasattr(report, "to_dict"):
            payload["report"] = report.to_dict()
        return ScenarioResult(EXIT_FAIL, payload, str(exc))
    except DegeneracyError as exc:
        return ScenarioResult(EXIT_DEGENERATE, {"error": str(exc)}, str(exc))
    except (StructuralError, GridError, CodimensionError, TangencyError, OSError, ValueError, KeyError) as exc:
        return ScenarioResult(EXIT_INPUT, {"error": f"{type(exc).__name__}: {exc}"}, str(exc))


def _emit(result: ScenarioResult, out, stream=None):
    text = fileio.dump_json(result.report, out)
    if out is None:
        print(text, file=stream or sys.stdout)


def _scenario_argv(scenario: dict) -> list:
    kind = scenario.get("kind")
    if kind not in COMMANDS:
        raise StructuralError(f"unknown scenario kind {kind!r}")
    argv = [kind]
    for name in POSITIONALS[kind]:
        if name in scenario:
            argv.append(str(scenario[name]))
    if kind == "tight" and scenario.get("gate"):
        argv.append(str(scenario["gate"]))
    for key, value in scenario.items():
        if key == "kind" or key in POSITIONALS[kind] or (kind == "tight" and key == "gate"):
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif value not in (False, None):
            argv += [flag, str(value)]
    return argv


def run_batch(batch_file, parser) -> int:
    scenarios = fileio.load_json(batch_file)
    if not isinstance(scenarios, list):
        raise StructuralError("a batch file must hold a JSON list of scenarios")
    parsed = [parser.parse_args(_scenario_argv(s)) for s in scenarios]
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(run, parsed))
    summary = []
    for i, (args, res) in enumerate(zip(parsed, results)):
        entry = {"index": i, "kind": args.command, "exit_code": res.code}
        if args.out:
            fileio.dump_json(res.report, args.out)
            entry["out"] = args.out
        else:
            entry["report"] = res.report
        summary.append(entry)
        print(f"[{i}] {args.command}: {res.summary}", file=sys.stderr)
    print(json.dumps(summary, indent=1))
    return max((r.code for r in results), default=EXIT_OK)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.batch:
        try:
            return run_batch(args.batch, parser)
        except (StructuralError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_INPUT
    result = run(args)
    _emit(result, args.out)
    print(result.summary, file=sys.stderr)
    return result.code


if __name__ == "__main__":
    sys.exit(main())
