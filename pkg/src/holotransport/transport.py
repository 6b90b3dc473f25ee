"""Connection, horizontal lifts and parallel-transport checks.

Four checks share one shape. A computational frame ``V0`` is propagated and
the ``n x n`` matrix ``M_t = V_t^dag K(t) V_t`` is inspected, where ``K`` is
the lab Hamiltonian (or ``H_rf - A`` in a rotating frame). The conventional
condition asks ``M_t = 0``. The projective one asks ``M_t = eps_t * 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    HamiltonianPath,
    RotatingFrame,
    ShiftFunction,
    ShiftedHamiltonian,
    frame_potential,
    propagate,
)
from .errors import GridError, StructuralError, TangencyError
from .frames import ProjectorPath, check_frame
from .matrixcore import DEFAULT_TOL, Tolerance, as_matrix, dagger, expm_skew_batch


@dataclass(eq=False)
class FramePath:
    """n-frames ``V_t`` on a uniform grid, shape ``(N + 1, d, n)``."""

    tau: float
    samples: np.ndarray

    @property
    def steps(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def dt(self) -> float:
        return self.tau / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.tau, self.steps + 1)

    @property
    def initial(self) -> np.ndarray:
        return self.samples[0]

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1]

    def projectors(self) -> ProjectorPath:
        return ProjectorPath.from_frames(self.tau, self.samples)


@dataclass(eq=False)
class TransportReport:
    max_residual: float
    residual_trace: np.ndarray
    epsilon_trace: np.ndarray | None
    verdict: bool
    tolerance: float = DEFAULT_TOL.transport
    condition: str = "conventional"

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "max_residual": self.max_residual,
            "verdict": "pass" if self.verdict else "fail",
            "tolerance": self.tolerance,
            "residuals": [float(x) for x in self.residual_trace],
            "epsilon": None if self.epsilon_trace is None else [float(x) for x in self.epsilon_trace],
        }


def connection_eval(v, x, tol: float = DEFAULT_TOL.transport) -> np.ndarray:
    """Aharonov-Anandan connection ``V^dag X`` of a tangent vector ``X`` at ``V``."""
    v = as_matrix(v, "V")
    x = as_matrix(x, "X")
    if v.shape != x.shape:
        raise StructuralError(f"V {v.shape} and X {x.shape} must have the same shape")
    a = dagger(v) @ x
    asym = float(np.max(np.abs(a + dagger(a))))
    if asym > tol:
        raise TangencyError(f"X is not tangent at V: |V^dag X + X^dag V| = {asym:.3e}")
    return a


def frame_velocity(samples: np.ndarray, dt: float) -> np.ndarray:
    """Finite-difference velocity of a sampled frame path.

    Second-order central differences inside; four-point third-order one-sided
    stencils at the two ends.
    """
    s = np.asarray(samples)
    if s.shape[0] < 4:
        raise GridError("velocity estimation needs at least four samples")
    vel = np.empty_like(s)
    vel[1:-1] = (s[2:] - s[:-2]) / (2 * dt)
    vel[0] = (-11 * s[0] + 18 * s[1] - 9 * s[2] + 2 * s[3]) / (6 * dt)
    vel[-1] = (11 * s[-1] - 18 * s[-2] + 9 * s[-3] - 2 * s[-4]) / (6 * dt)
    return vel


def connection_trace(path: FramePath) -> np.ndarray:
    """``V_t^dag dV_t/dt`` along a frame path, shape ``(N + 1, n, n)``.

    The finite-difference velocity is not exactly tangent, so only the
    skew-Hermitian part (the connection of its tangent projection) is returned.
    """
    vel = frame_velocity(path.samples, path.dt)
    c = dagger(path.samples) @ vel
    return 0.5 * (c - dagger(c))


def connection_residual(path: FramePath, eps: ShiftFunction | None = None) -> float:
    """Largest deviation of the connection from ``i eps_t 1`` (``0`` if no eps)."""
    c = connection_trace(path)
    if eps is not None:
        n = c.shape[-1]
        c = c - 1j * eps.at_many(path.times)[:, None, None] * np.eye(n)
    return float(np.max(np.abs(c)))


def _polar(x: np.ndarray) -> np.ndarray:
    u, _, wh = np.linalg.svd(x, full_matrices=False)
    return u @ wh


def horizontal_lift(p: ProjectorPath, v0, tol: Tolerance = DEFAULT_TOL) -> FramePath:
    """Horizontal lift of a projector path starting at the frame ``v0``.

    Integrates ``dV/dt = [dP/dt, P] V``. Over one grid interval the midpoint
    generator is ``[P_{k+1}, P_k] / dt``, so a step is
    ``V <- exp([P_{k+1}, P_k]) V``, followed by a polar correction onto
    ``span P_{k+1}``.
    """
    v0 = check_frame(v0, tol.structural, name="V0")
    p.check_adjacency()
    s = p.samples
    if s.shape[1] != v0.shape[0]:
        raise StructuralError(f"frame dimension {v0.shape[0]} does not match path dimension {s.shape[1]}")
    if v0.shape[1] != p.rank:
        raise StructuralError(f"frame has {v0.shape[1]} columns but the path has rank {p.rank}")
    mismatch = float(np.max(np.abs(v0 @ dagger(v0) - s[0])))
    if mismatch > tol.structural * 10:
        raise StructuralError(f"V0 does not span P_0: max |V0 V0^dag - P_0| = {mismatch:.3e}")
    gens = s[1:] @ s[:-1] - s[:-1] @ s[1:]
    steps_ops = expm_skew_batch(1j * gens, 1.0)
    out = np.empty((s.shape[0],) + v0.shape, dtype=complex)
    out[0] = v0
    v = v0
    for k in range(steps_ops.shape[0]):
        v = _polar(s[k + 1] @ (steps_ops[k] @ v))
        out[k + 1] = v
    return FramePath(p.tau, out)


def projective_horizontal_lift(
    p: ProjectorPath, v0, eps: ShiftFunction, tol: Tolerance = DEFAULT_TOL
) -> FramePath:
    """Lift whose connection is ``i eps_t 1``: the horizontal lift times ``exp(i int eps)``."""
    base = horizontal_lift(p, v0, tol)
    phase = np.exp(1j * eps.integral(base.times))
    return FramePath(base.tau, base.samples * phase[:, None, None])


def _condition_matrices(k_path: HamiltonianPath, frames: np.ndarray, times: np.ndarray) -> np.ndarray:
    ks = k_path.at_many(times)
    return dagger(frames) @ ks @ frames


def _conventional_report(m: np.ndarray, tol: float) -> TransportReport:
    trace = np.max(np.abs(m), axis=(1, 2))
    worst = float(np.max(trace))
    return TransportReport(worst, trace, None, worst < tol, tol, "conventional")


def _projective_report(m: np.ndarray, tol: float) -> TransportReport:
    n = m.shape[-1]
    eps = np.real(np.einsum("kii->k", m)) / n
    trace = np.max(np.abs(m - eps[:, None, None] * np.eye(n)), axis=(1, 2))
    worst = float(np.max(trace))
    return TransportReport(worst, trace, eps, worst < tol, tol, "projective")


def _propagated_frames(h: HamiltonianPath, v0, steps: int, tol: Tolerance, method: str = "midpoint"):
    v0 = check_frame(v0, tol.structural, name="V0")
    if v0.shape[0] != h.dim:
        raise StructuralError(f"frame dimension {v0.shape[0]} does not match Hamiltonian dimension {h.dim}")
    u = propagate(h, steps, method)
    return u.samples @ v0, u.times


def check_parallel_lab(
    h: HamiltonianPath, v0, steps: int = 4096, tol: Tolerance = DEFAULT_TOL, method: str = "midpoint"
) -> TransportReport:
    """Residual of ``<v_k(t)|H(t)|v_l(t)> = 0`` with ``v(t) = U_t v``."""
    frames, times = _propagated_frames(h, v0, steps, tol, method)
    return _conventional_report(_condition_matrices(h, frames, times), tol.transport)


def check_projective_lab(
    h: HamiltonianPath, v0, steps: int = 4096, tol: Tolerance = DEFAULT_TOL, method: str = "midpoint"
) -> TransportReport:
    """Residual of ``<v_k(t)|H(t)|v_l(t)> = eps_t delta_kl``; ``eps_t`` is fitted."""
    frames, times = _propagated_frames(h, v0, steps, tol, method)
    return _projective_report(_condition_matrices(h, frames, times), tol.transport)


def _rotating_matrices(h_rf: HamiltonianPath, r: RotatingFrame, v0, steps: int, tol: Tolerance, method: str):
    if h_rf.dim != r.dim:
        raise StructuralError(f"dimension mismatch: Hamiltonian {h_rf.dim}, frame {r.dim}")
    if abs(h_rf.tau - r.tau) > 1e-12 * max(h_rf.tau, r.tau):
        raise GridError(f"duration mismatch: Hamiltonian {h_rf.tau}, frame {r.tau}")
    v0 = check_frame(v0, tol.structural, name="V0")
    # v0 is the lab-frame computational frame; its rotating image at t = 0 is R_0 v0
    v0_rf = r.at(0.0) @ v0
    frames, times = _propagated_frames(h_rf, v0_rf, steps, tol, method)
    a = frame_potential(r)
    k_path = _Difference(h_rf, a)
    return _condition_matrices(k_path, frames, times)


@dataclass(eq=False)
class _Difference(HamiltonianPath):
    first: HamiltonianPath
    second: HamiltonianPath

    @property
    def dim(self):
        return self.first.dim

    @property
    def tau(self):
        return self.first.tau

    def at(self, t):
        return self.first.at(t) - self.second.at(t)

    def at_many(self, ts):
        return self.first.at_many(ts) - self.second.at_many(ts)


def check_parallel_rotating(
    h_rf: HamiltonianPath,
    r: RotatingFrame,
    v0,
    steps: int = 4096,
    tol: Tolerance = DEFAULT_TOL,
    method: str = "midpoint",
) -> TransportReport:
    """Residual of ``<v_k^rf|H_rf - A|v_l^rf> = 0`` evaluated in the rotating frame.

    ``v0`` is the lab-frame computational frame at ``t = 0``.
    """
    return _conventional_report(_rotating_matrices(h_rf, r, v0, steps, tol, method), tol.transport)


def check_projective_rotating(
    h_rf: HamiltonianPath,
    r: RotatingFrame,
    v0,
    steps: int = 4096,
    tol: Tolerance = DEFAULT_TOL,
    method: str = "midpoint",
) -> TransportReport:
    """Projective counterpart of ``check_parallel_rotating``."""
    return _projective_report(_rotating_matrices(h_rf, r, v0, steps, tol, method), tol.transport)


def gauge_shift(h: HamiltonianPath, eps: ShiftFunction) -> HamiltonianPath:
    """``H(t) + eps(t) * 1``. Spectra shift by ``eps(t)``; dynamics pick up a global phase."""
    if abs(h.tau - eps.tau) > 1e-12 * max(h.tau, eps.tau):
        raise GridError(f"shift duration {eps.tau} does not match Hamiltonian duration {h.tau}")
    if not np.any(eps.samples):
        return h
    if isinstance(h, ShiftedHamiltonian):
        return ShiftedHamiltonian(h.base, _sum_shifts(h.shift, eps))
    return ShiftedHamiltonian(h, eps)


def _sum_shifts(a: ShiftFunction, b: ShiftFunction) -> ShiftFunction:
    m = np.lcm(a.samples.size - 1, b.samples.size - 1)
    ts = np.linspace(0.0, a.tau, m + 1)
    return ShiftFunction(a.tau, a.at_many(ts) + b.at_many(ts))


def loop_closure(p: ProjectorPath, tol: float = DEFAULT_TOL.transport):
    """``(closed, defect)`` with ``defect = ||P_tau - P_0||`` (operator norm)."""
    defect = float(np.linalg.norm(p.samples[-1] - p.samples[0], ord=2))
    return defect < tol, defect


def closure_indicator(psi_tau, p) -> float:
    """``<psi_tau|P|psi_tau>``; equals 1 for every unit ``psi`` in a closed loop."""
    psi = np.asarray(psi_tau, dtype=complex)
    return float(np.real(np.conj(psi) @ np.asarray(p) @ psi))


def rotate_projector_path(p: ProjectorPath, r: RotatingFrame) -> ProjectorPath:
    """Image ``R_t P_t R_t^dag`` of a lab path in the rotating picture."""
    rs = r.at_many(p.times)
    return ProjectorPath(p.tau, rs @ p.samples @ dagger(rs))


__all__ = [
    "FramePath",
    "TransportReport",
    "ShiftFunction",
    "connection_eval",
    "connection_trace",
    "connection_residual",
    "frame_velocity",
    "horizontal_lift",
    "projective_horizontal_lift",
    "check_parallel_lab",
    "check_parallel_rotating",
    "check_projective_lab",
    "check_projective_rotating",
    "gauge_shift",
    "loop_closure",
    "closure_indicator",
    "rotate_projector_path",
]
