"""JSON file formats.

A complex scalar is ``[re, im]``; a matrix is a list of rows. Python's float
repr is the shortest string that round-trips, so matrices survive a
write/read cycle bit for bit.

Formats::

    gate        {"n", "matrix"}
    frame       {"dim", "n", "columns": [column_0, ..., column_{n-1}]}
    path        {"dim", "rank", "tau", "samples": [P_0, ..., P_N]}
    hamiltonian {"dim", "tau", "kind": "constant" | "rotated_constant" | "sampled",
                 "H" | "H0" + "B" | "samples", optional "shift": [eps_0, ...]}
    rotating    {"dim", "tau", "kind": "constant_generator" | "sampled",
                 "generator" | "samples"}
    shift       {"tau", "samples": [eps_0, ..., eps_N]}
    protocol    {"dim", "tau", "epsilon", "frame",
                 "blocks": [{"theta", "v", "w", "B", "H_rf"}, ...]}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dynamics import (
    ConstantHamiltonian,
    GeneratorFrame,
    HamiltonianPath,
    RotatedHamiltonian,
    RotatingFrame,
    SampledFrame,
    SampledHamiltonian,
    ShiftedHamiltonian,
    ShiftFunction,
    sample_hamiltonian,
)
from .errors import StructuralError
from .frames import ProjectorPath, check_frame
from .matrixcore import DEFAULT_TOL


class FormatError(StructuralError):
    """A file does not follow the expected schema."""


def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def vector_to_json(v) -> list:
    return [complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def matrix_to_json(m) -> list:
    return [vector_to_json(row) for row in np.asarray(m)]


def _complex(entry) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
        raise FormatError(f"complex entries must be [re, im] pairs, got {entry!r}")
    return complex(float(entry[0]), float(entry[1]))


def vector_from_json(data) -> np.ndarray:
    return np.array([_complex(z) for z in data], dtype=complex)


def matrix_from_json(data) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise FormatError("a matrix must be a non-empty list of rows")
    rows = [vector_from_json(row) for row in data]
    if len({r.size for r in rows}) != 1:
        raise FormatError("matrix rows have different lengths")
    return np.array(rows)


def _require(data: dict, *keys):
    missing = [k for k in keys if k not in data]
    if missing:
        raise FormatError(f"missing field(s): {', '.join(missing)}")


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(data, path=None) -> str:
    text = json.dumps(data, indent=1, allow_nan=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


# gates ------------------------------------------------------------------


def gate_to_json(matrix) -> dict:
    m = np.asarray(matrix)
    return {"n": m.shape[0], "matrix": matrix_to_json(m)}


def gate_from_json(data: dict):
    from .metrics import GateSpec

    _require(data, "matrix")
    m = matrix_from_json(data["matrix"])
    if "n" in data and m.shape != (data["n"], data["n"]):
        raise FormatError(f"gate matrix has shape {m.shape}, expected n = {data['n']}")
    return GateSpec(m)


# frames and paths ----------------------------------------------------------


def frame_to_json(v) -> dict:
    v = np.asarray(v)
    return {"dim": v.shape[0], "n": v.shape[1], "columns": [vector_to_json(c) for c in v.T]}


def frame_from_json(data: dict, tol: float = DEFAULT_TOL.structural) -> np.ndarray:
    _require(data, "columns")
    cols = [vector_from_json(c) for c in data["columns"]]
    v = np.array(cols).T
    if "dim" in data and v.shape[0] != data["dim"]:
        raise FormatError(f"frame columns have length {v.shape[0]}, expected dim = {data['dim']}")
    if "n" in data and v.shape[1] != data["n"]:
        raise FormatError(f"frame has {v.shape[1]} columns, expected n = {data['n']}")
    return check_frame(v, tol)


def path_to_json(p: ProjectorPath) -> dict:
    return {
        "dim": p.dim,
        "rank": p.rank,
        "tau": p.tau,
        "samples": [matrix_to_json(s) for s in p.samples],
    }


def path_from_json(data: dict) -> ProjectorPath:
    _require(data, "tau", "samples")
    p = ProjectorPath(float(data["tau"]), np.array([matrix_from_json(s) for s in data["samples"]]))
    if "dim" in data and p.dim != data["dim"]:
        raise FormatError(f"path samples are {p.dim}-dimensional, expected dim = {data['dim']}")
    if "rank" in data and p.rank != data["rank"]:
        raise FormatError(f"path samples have rank {p.rank}, expected rank = {data['rank']}")
    return p.validate(1e-8)


def shift_to_json(eps: ShiftFunction) -> dict:
    return {"tau": eps.tau, "samples": [float(x) for x in eps.samples]}


def shift_from_json(data: dict) -> ShiftFunction:
    _require(data, "tau", "samples")
    return ShiftFunction(float(data["tau"]), np.asarray(data["samples"], dtype=float))


# Hamiltonians and rotating frames ------------------------------------------


def hamiltonian_to_json(h: HamiltonianPath, steps: int = 4096) -> dict:
    """Serialize a Hamiltonian path; derived kinds are exported as samples."""
    out = {"dim": h.dim, "tau": h.tau}
    base, shift = h, None
    if isinstance(h, ShiftedHamiltonian):
        base, shift = h.base, h.shift
    if isinstance(base, ConstantHamiltonian):
        out.update(kind="constant", H=matrix_to_json(base.H))
    elif isinstance(base, RotatedHamiltonian):
        out.update(kind="rotated_constant", H0=matrix_to_json(base.H0), B=matrix_to_json(base.B))
    else:
        sampled = base if isinstance(base, SampledHamiltonian) else sample_hamiltonian(base, steps)
        out.update(kind="sampled", samples=[matrix_to_json(s) for s in sampled.samples])
    if shift is not None:
        out["shift"] = [float(x) for x in shift.samples]
    return out


def hamiltonian_from_json(data: dict) -> HamiltonianPath:
    _require(data, "tau", "kind")
    tau = float(data["tau"])
    kind = data["kind"]
    if kind == "constant":
        _require(data, "H")
        h = ConstantHamiltonian(tau, matrix_from_json(data["H"]))
    elif kind == "rotated_constant":
        _require(data, "H0", "B")
        h = RotatedHamiltonian(tau, matrix_from_json(data["H0"]), matrix_from_json(data["B"]))
    elif kind == "sampled":
        _require(data, "samples")
        h = SampledHamiltonian(tau, np.array([matrix_from_json(s) for s in data["samples"]]))
    else:
        raise FormatError(f"unknown Hamiltonian kind {kind!r}")
    if "dim" in data and h.dim != data["dim"]:
        raise FormatError(f"Hamiltonian is {h.dim}-dimensional, expected dim = {data['dim']}")
    if data.get("shift") is not None:
        h = ShiftedHamiltonian(h, ShiftFunction(tau, np.asarray(data["shift"], dtype=float)))
    return h


def rotating_frame_to_json(r: RotatingFrame) -> dict:
    out = {"dim": r.dim, "tau": r.tau}
    if isinstance(r, GeneratorFrame):
        out.update(kind="constant_generator", generator=matrix_to_json(r.B))
    elif isinstance(r, SampledFrame):
        out.update(kind="sampled", samples=[matrix_to_json(s) for s in r.samples])
    else:
        raise TypeError(f"cannot serialize {type(r).__name__}")
    return out


def rotating_frame_from_json(data: dict) -> RotatingFrame:
    _require(data, "tau", "kind")
    tau = float(data["tau"])
    kind = data["kind"]
    if kind == "constant_generator":
        _require(data, "generator")
        r = GeneratorFrame(tau, matrix_from_json(data["generator"]))
    elif kind == "sampled":
        _require(data, "samples")
        r = SampledFrame(tau, np.array([matrix_from_json(s) for s in data["samples"]]))
    else:
        raise FormatError(f"unknown rotating-frame kind {kind!r}")
    if "dim" in data and r.dim != data["dim"]:
        raise FormatError(f"rotating frame is {r.dim}-dimensional, expected dim = {data['dim']}")
    return r


# protocols ---------------------------------------------------------------


def protocol_to_json(p) -> dict:
    return {
        "dim": p.dim,
        "tau": p.tau,
        "epsilon": p.epsilon,
        "frame": frame_to_json(p.frame),
        "target": None if p.target is None else gate_to_json(p.target.matrix),
        "blocks": [
            {
                "theta": b.theta,
                "v": vector_to_json(b.v),
                "w": vector_to_json(b.w),
                "B": matrix_to_json(b.B),
                "H_rf": matrix_to_json(b.H_rf),
            }
            for b in p.blocks
        ],
    }


def protocol_from_json(data: dict):
    from .protocols import TightBlock, TightProtocol, cone_angle

    _require(data, "dim", "tau", "epsilon", "frame", "blocks")
    frame = frame_from_json(data["frame"])
    blocks = []
    for b in data["blocks"]:
        _require(b, "theta", "v", "w", "B", "H_rf")
        theta = float(b["theta"])
        blocks.append(
            TightBlock(
                theta,
                vector_from_json(b["v"]),
                vector_from_json(b["w"]),
                cone_angle(theta),
                matrix_from_json(b["B"]),
                matrix_from_json(b["H_rf"]),
            )
        )
    target = gate_from_json(data["target"]) if data.get("target") else None
    if target is None:
        from .metrics import GateSpec

        # rebuild the target from the code vectors: Gamma = sum_k e^{i theta_k} |u_k><u_k|
        u = frame.conj().T @ np.array([b.v for b in blocks]).T
        target = GateSpec(u @ np.diag(np.exp(1j * np.array([b.theta for b in blocks]))) @ u.conj().T, tol=1e-9)
    return TightProtocol(int(data["dim"]), frame, float(data["tau"]), blocks, float(data["epsilon"]), target)
