"""Holonomies, Grassmann lengths, isoholonomic bounds and speed limits."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import trapezoid

from .dynamics import HamiltonianPath, ShiftFunction, propagate
from .errors import DegeneracyError, OpenLoopError, StructuralError, VerificationError
from .frames import ProjectorPath, check_frame
from .matrixcore import (
    DEFAULT_TOL,
    TWO_PI,
    Tolerance,
    commutator,
    dagger,
    eig_unitary,
    require_unitary,
)
from .transport import frame_velocity, horizontal_lift, loop_closure, projective_horizontal_lift

# default closure tolerance for loops obtained by numerical propagation or lifting
CLOSURE_TOL = 1e-6
MIN_SPEED = 1e-12


@dataclass(eq=False)
class GateSpec:
    """A unitary ``n x n`` gate with cached eigenphases in ``[0, 2pi)``."""

    matrix: np.ndarray
    tol: float = DEFAULT_TOL.structural

    def __post_init__(self):
        self.matrix = require_unitary(self.matrix, self.tol, name="gate")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _spectrum(self):
        return eig_unitary(self.matrix, self.tol)

    @property
    def eigenphases(self) -> np.ndarray:
        return self._spectrum[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._spectrum[1]

    def to_dict(self) -> dict:
        from .fileio import matrix_to_json

        return {"n": self.n, "matrix": matrix_to_json(self.matrix)}


@dataclass(eq=False)
class ProjectiveGate:
    """Phase-equivalence class of a gate.

    ``canonical_rep`` divides out the principal n-th root of the determinant.
    """

    representative: GateSpec

    @classmethod
    def of(cls, matrix) -> "ProjectiveGate":
        return cls(matrix if isinstance(matrix, GateSpec) else GateSpec(matrix))

    @property
    def n(self) -> int:
        return self.representative.n

    @cached_property
    def canonical_rep(self) -> GateSpec:
        m = self.representative.matrix
        phase = np.angle(np.linalg.det(m)) / self.n
        return GateSpec(m * np.exp(-1j * phase))


def _as_gate(g) -> GateSpec:
    if isinstance(g, GateSpec):
        return g
    if isinstance(g, ProjectiveGate):
        return g.representative
    return GateSpec(g)


def curve_length(p: ProjectorPath) -> float:
    """Grassmann length ``int sqrt(tr(dP/dt ^2) / 2) dt`` (trapezoid rule)."""
    p.check_adjacency()
    if p.steps < 3:
        raise ValueError("curve_length needs at least four samples")
    pdot = frame_velocity(p.samples, p.dt)
    speed2 = 0.5 * np.real(np.einsum("kij,kji->k", pdot, pdot))
    return float(trapezoid(np.sqrt(np.clip(speed2, 0.0, None)), dx=p.dt))


def _require_closed(p: ProjectorPath, closure_tol: float):
    closed, defect = loop_closure(p, closure_tol)
    if not closed:
        raise OpenLoopError(f"path is not closed: |P_tau - P_0| = {defect:.3e} >= {closure_tol:.1e}")
    return defect


def holonomy(p: ProjectorPath, v0, tol: Tolerance = DEFAULT_TOL, closure_tol: float = CLOSURE_TOL):
    """Holonomy of a closed loop: ``(GateSpec(V0^dag V_tau), V_tau V0^dag)``.

    The gate matrix is written in the basis ``v0``.
    """
    _require_closed(p, closure_tol)
    lift = horizontal_lift(p, v0, tol)
    v0 = lift.initial
    gamma = dagger(v0) @ lift.final
    # numerical loops close only to closure_tol; restore exact unitarity
    u, _, wh = np.linalg.svd(gamma)
    return GateSpec(u @ wh, tol=max(tol.structural, 1e-9)), lift.final @ dagger(v0)


def projective_holonomy(
    p: ProjectorPath,
    v0,
    eps: ShiftFunction | None = None,
    tol: Tolerance = DEFAULT_TOL,
    closure_tol: float = CLOSURE_TOL,
) -> ProjectiveGate:
    """Class of ``V0^dag V_tau`` for a (projective) horizontal lift."""
    if eps is None:
        gate, _ = holonomy(p, v0, tol, closure_tol)
        return ProjectiveGate(gate)
    _require_closed(p, closure_tol)
    lift = projective_horizontal_lift(p, v0, eps, tol)
    gamma = dagger(lift.initial) @ lift.final
    u, _, wh = np.linalg.svd(gamma)
    return ProjectiveGate(GateSpec(u @ wh, tol=max(tol.structural, 1e-9)))


def _bound_from_phases(phases: np.ndarray) -> float:
    s = np.sum(phases * (TWO_PI - phases))
    return float(np.sqrt(max(s, 0.0)))


def isoholonomic_bound(g) -> float:
    """``sqrt(sum_j theta_j (2pi - theta_j))`` over the eigenphases of the gate."""
    return _bound_from_phases(_as_gate(g).eigenphases)


def shifted_bound_squared(phases, shift) -> np.ndarray:
    """Squared bound of ``exp(-i shift) Gamma`` for an array of shifts."""
    shift = np.asarray(shift, dtype=float)
    diff = np.abs(np.subtract.outer(shift, np.asarray(phases)) % TWO_PI)
    return np.sum(diff * (TWO_PI - diff), axis=-1)


def projective_isoholonomic_bound(g):
    """Bound of the projective class: minimum over the n + 1 candidate shifts.

    Candidates are ``0`` and every eigenphase; returns ``(value, k)`` with
    ``k = 0`` for the zero shift and ``k = j`` for the j-th (ascending) eigenphase.
    """
    phases = _as_gate(g).eigenphases
    candidates = np.concatenate([[0.0], phases])
    values = []
    for theta_k in candidates:
        diff = np.abs(phases - theta_k)
        values.append(np.sum(diff * (TWO_PI - diff)))
    values = np.asarray(values)
    k = int(np.argmin(values))
    return float(np.sqrt(max(values[k], 0.0))), k


def optimal_representative(g) -> GateSpec:
    """Representative ``exp(-i theta_k) Gamma`` attaining the projective bound."""
    gate = _as_gate(g)
    _, k = projective_isoholonomic_bound(gate)
    shift = 0.0 if k == 0 else gate.eigenphases[k - 1]
    return GateSpec(gate.matrix * np.exp(-1j * shift))


def skew_information(h, p) -> float:
    """``-tr([H, P]^2) / 2``: the squared speed of ``P`` driven by ``H``."""
    h = np.asarray(h, dtype=complex)
    p = np.asarray(p, dtype=complex)
    if h.shape != p.shape:
        raise StructuralError(f"H {h.shape} and P {p.shape} must have the same shape")
    c = commutator(h, p)
    return float(max(-0.5 * np.real(np.trace(c @ c)), 0.0))


def _skew_information_batch(hs, ps) -> np.ndarray:
    c = hs @ ps - ps @ hs
    return np.clip(-0.5 * np.real(np.einsum("kij,kji->k", c, c)), 0.0, None)


def projective_distance(g1, g2) -> float:
    """``sqrt(1 - |tr(G1^dag G2)|^2 / n^2)``; zero iff the gates agree up to phase."""
    a = _as_gate(g1).matrix
    b = _as_gate(g2).matrix
    if a.shape != b.shape:
        raise StructuralError(f"gate sizes differ: {a.shape} vs {b.shape}")
    n = a.shape[0]
    tr = np.trace(dagger(a) @ b)
    # 1 - |tr|/n = min_phi |A - e^{i phi} B|_F^2 / 2n, free of cancellation
    phase = np.conj(tr) / abs(tr) if abs(tr) > 0 else 1.0
    m = float(np.sum(np.abs(a - phase * b) ** 2)) / (2 * n)
    return float(np.sqrt(max(m * (2.0 - m), 0.0)))


@dataclass(eq=False)
class QslReport:
    length: float
    bound: float
    mean_speed: float
    tau: float
    tau_qsl: float
    saturation_ratio: float
    bound_kind: str = "conventional"
    closure_defect: float = 0.0
    holonomy: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        from .fileio import matrix_to_json

        out = {
            "length": self.length,
            "bound": self.bound,
            "bound_kind": self.bound_kind,
            "mean_speed": self.mean_speed,
            "tau": self.tau,
            "tau_qsl": self.tau_qsl,
            "saturation_ratio": self.saturation_ratio,
            "closure_defect": self.closure_defect,
        }
        if self.holonomy is not None:
            out["holonomy"] = matrix_to_json(self.holonomy)
        return out


def driven_path(h: HamiltonianPath, v0, steps: int = 4096, method: str = "midpoint"):
    """Propagated frames ``U_t V0`` and their projector path."""
    u = propagate(h, steps, method)
    frames = u.samples @ v0
    return frames, ProjectorPath.from_frames(h.tau, frames)


def speed_trace(h: HamiltonianPath, p: ProjectorPath) -> np.ndarray:
    """``sqrt(I(H_t; P_t))`` on the grid of ``p``."""
    return np.sqrt(_skew_information_batch(h.at_many(p.times), p.samples))


def qsl_report(
    h: HamiltonianPath,
    v0,
    target,
    steps: int = 4096,
    tol: Tolerance = DEFAULT_TOL,
    closure_tol: float = CLOSURE_TOL,
    method: str = "midpoint",
) -> QslReport:
    """Quantum-speed-limit assessment of ``h`` driving ``span(v0)`` around a loop.

    ``target`` is a ``GateSpec`` (conventional bound) or a ``ProjectiveGate``
    (projective bound). ``saturation_ratio = tau_qsl / tau``.
    """
    v0 = check_frame(v0, tol.structural, name="V0")
    frames, p = driven_path(h, v0, steps, method)
    defect = _require_closed(p, closure_tol)
    length = curve_length(p)
    speeds = speed_trace(h, p)
    mean_speed = float(trapezoid(speeds, dx=p.dt) / h.tau)
    if isinstance(target, ProjectiveGate):
        bound, kind = projective_isoholonomic_bound(target)[0], "projective"
    else:
        bound, kind = isoholonomic_bound(target), "conventional"
    if mean_speed < MIN_SPEED:
        raise DegeneracyError(f"the computational space does not move (mean speed {mean_speed:.1e})")
    tau_qsl = bound / mean_speed
    report = QslReport(
        length=length,
        bound=bound,
        mean_speed=mean_speed,
        tau=h.tau,
        tau_qsl=tau_qsl,
        saturation_ratio=tau_qsl / h.tau,
        bound_kind=kind,
        closure_defect=defect,
        holonomy=dagger(v0) @ frames[-1],
    )
    if h.tau < tau_qsl - tol.integration * h.tau:
        raise VerificationError(
            f"evolution time {h.tau:.6g} is below the speed limit {tau_qsl:.6g}; "
            "the target is not the holonomy of this loop",
            report,
        )
    return report


__all__ = [
    "GateSpec",
    "ProjectiveGate",
    "QslReport",
    "curve_length",
    "holonomy",
    "projective_holonomy",
    "isoholonomic_bound",
    "projective_isoholonomic_bound",
    "shifted_bound_squared",
    "optimal_representative",
    "skew_information",
    "projective_distance",
    "driven_path",
    "speed_trace",
    "qsl_report",
]
