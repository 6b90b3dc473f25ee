"""Time-optimal (tight) parallel-transporting Hamiltonians for arbitrary gates.

Each eigenvector ``|v_k>`` of the target is paired with an ancilla ``|w_k>``
orthogonal to the computational space. On the plane ``E_k = span{v_k, w_k}``
a Rabi generator ``B_k`` (eigenvalues ``+-pi/tau``) precesses the Bloch vector
of ``|v_k><v_k|`` once around a cone of half-angle
``alpha_k = arccos(theta_k/pi - 1)``, which encloses geometric phase
``theta_k``. In the frame ``exp(itB_k)`` the block Hamiltonian is the
constant ``H_rf_k`` having ``|v_k>`` as an eigenvector with eigenvalue
``eps - <v_k|B_k|v_k>``; in the lab frame
``H_k(t) = exp(-itB_k) (H_rf_k + B_k) exp(itB_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import RotatedHamiltonian, propagate
from .errors import CodimensionError, StructuralError, VerificationError
from .frames import ProjectorPath, check_frame, complement_basis
from .matrixcore import DEFAULT_TOL, TWO_PI, Tolerance, dagger
from .metrics import (
    CLOSURE_TOL,
    GateSpec,
    QslReport,
    _as_gate,
    curve_length,
    isoholonomic_bound,
    projective_distance,
    speed_trace,
)
from .transport import loop_closure

from scipy.integrate import trapezoid


def cone_angle(theta: float) -> float:
    """Angle between Bloch and Rabi vectors that encloses geometric phase ``theta``."""
    return float(np.arccos(np.clip(theta / np.pi - 1.0, -1.0, 1.0)))


def block_speed(theta: float, tau: float) -> float:
    """Fubini-Study speed ``sqrt(2 pi theta - theta^2) / tau`` of a tight block."""
    return float(np.sqrt(max(TWO_PI * theta - theta**2, 0.0)) / tau)


def qubit_paulis(v: np.ndarray, w: np.ndarray):
    """Pauli operators on ``span{v, w}`` with ``v`` as the ``sigma_z = +1`` state."""
    vv = np.outer(v, np.conj(v))
    ww = np.outer(w, np.conj(w))
    vw = np.outer(v, np.conj(w))
    wv = np.outer(w, np.conj(v))
    return vw + wv, -1j * vw + 1j * wv, vv - ww


def bloch_components(op: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``(tr(op sx), tr(op sy), tr(op sz))`` in the plane ``span{v, w}``."""
    return np.array([np.real(np.trace(op @ s)) for s in qubit_paulis(v, w)])


def _angle(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    return float(np.arccos(np.clip(a @ b / (na * nb), -1.0, 1.0)))


@dataclass(eq=False)
class TightBlock:
    theta: float
    v: np.ndarray
    w: np.ndarray
    alpha: float
    B: np.ndarray
    H_rf: np.ndarray

    @property
    def H(self) -> np.ndarray:
        """Lab-frame block Hamiltonian at ``t = 0``: ``H_rf + B``."""
        return self.H_rf + self.B

    def rabi_axis(self) -> np.ndarray:
        return bloch_components(self.B, self.v, self.w)

    def bloch_vector(self) -> np.ndarray:
        return bloch_components(np.outer(self.v, np.conj(self.v)), self.v, self.w)

    def check(self, epsilon: float = 0.0, tol: float = 1e-9):
        """Verify the block invariants; raises ``StructuralError``."""
        if abs(np.vdot(self.v, self.w)) > tol:
            raise StructuralError("code and ancilla vectors are not orthogonal")
        if self.theta > 0 and abs(_angle(self.bloch_vector(), self.rabi_axis()) - self.alpha) > tol:
            raise StructuralError("Bloch vector does not make the cone angle with the Rabi axis")
        expected = epsilon - np.real(np.vdot(self.v, self.B @ self.v))
        if np.max(np.abs(self.H_rf @ self.v - expected * self.v)) > tol:
            raise StructuralError("code vector is not an eigenvector of the rotating-frame Hamiltonian")


@dataclass(eq=False)
class TightProtocol:
    dim: int
    frame: np.ndarray
    tau: float
    blocks: list
    epsilon: float = 0.0
    target: GateSpec | None = None
    hamiltonian: RotatedHamiltonian = field(init=False, repr=False)

    def __post_init__(self):
        d = self.dim
        h0 = np.zeros((d, d), dtype=complex)
        b = np.zeros((d, d), dtype=complex)
        for blk in self.blocks:
            h0 += blk.H
            b += blk.B
        # blocks act on mutually orthogonal planes, so the B_k commute and
        # sum(exp(-itB_k) H_k exp(itB_k)) = exp(-itB) H0 exp(itB)
        self.hamiltonian = RotatedHamiltonian(self.tau, h0, b)

    @property
    def n(self) -> int:
        return self.frame.shape[1]

    @property
    def thetas(self) -> np.ndarray:
        return np.array([blk.theta for blk in self.blocks])

    def support_projector(self) -> np.ndarray:
        """Projector onto the direct sum of the block planes."""
        d = self.dim
        p = np.zeros((d, d), dtype=complex)
        for blk in self.blocks:
            p += np.outer(blk.v, np.conj(blk.v)) + np.outer(blk.w, np.conj(blk.w))
        return p

    def expected_speed(self) -> float:
        return float(np.sqrt(sum(block_speed(t, self.tau) ** 2 for t in self.thetas)))


def build_tight(target, frame, tau: float, epsilon: float = 0.0, tol: Tolerance = DEFAULT_TOL) -> TightProtocol:
    """Tight protocol implementing ``target`` (written in the basis ``frame``) in time ``tau``.

    Requires ``d >= 2n``. With ``epsilon != 0`` every block carries the same
    diagonal offset, so the Hamiltonian is only projectively parallel
    transporting and implements ``target`` up to a global phase.
    """
    gate = _as_gate(target)
    v_frame = check_frame(frame, tol.structural, name="frame")
    d, n = v_frame.shape
    if gate.n != n:
        raise StructuralError(f"target is {gate.n}x{gate.n} but the frame has {n} columns")
    if d < 2 * n:
        raise CodimensionError(
            f"tight synthesis needs ambient dimension >= 2n: got d = {d}, n = {n} "
            f"(the computational space must have codimension at least {n})"
        )
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    phases, vecs = gate.eigenphases, gate.eigenvectors
    codes = v_frame @ vecs
    ancillas = complement_basis(v_frame)
    blocks = []
    for k in range(n):
        theta = float(phases[k])
        v, w = codes[:, k], ancillas[:, k]
        alpha = cone_angle(theta)
        sx, _, sz = qubit_paulis(v, w)
        b = (np.pi / tau) * (np.sin(alpha) * sx + np.cos(alpha) * sz)
        shift = epsilon - np.real(np.vdot(v, b @ v))
        # the eigenvalue on the direction orthogonal to v inside the plane is free; it is set to 0
        h_rf = shift * np.outer(v, np.conj(v))
        blocks.append(TightBlock(theta, v, w, alpha, b, h_rf))
    return TightProtocol(d, v_frame, float(tau), blocks, float(epsilon), gate)


def block_trajectory(block: TightBlock, tau: float, steps: int = 4096) -> ProjectorPath:
    """``exp(-itB_k) |v_k><v_k| exp(itB_k)`` on a uniform grid."""
    ts = np.linspace(0.0, tau, steps + 1)
    evals, evecs = np.linalg.eigh(block.B)
    ph = np.exp(-1j * ts[:, None] * evals)
    u = (evecs * ph[:, None, :]) @ dagger(evecs)
    psi = u @ block.v
    return ProjectorPath(tau, np.einsum("ki,kj->kij", psi, np.conj(psi)))


@dataclass(eq=False)
class TightVerification:
    qsl: QslReport
    holonomy_distance: float
    global_phase_error: float | None
    closure_defect: float
    length_error: float
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        out = self.qsl.to_dict()
        out.update(
            {
                "holonomy_distance": self.holonomy_distance,
                "global_phase_error": self.global_phase_error,
                "closure_defect": self.closure_defect,
                "length_error": self.length_error,
                "passed": self.passed,
                "failures": list(self.failures),
            }
        )
        return out


TIGHT_LIMITS = {"closure": CLOSURE_TOL, "holonomy": 1e-6, "length": 1e-3, "saturation": 1e-3}


def verify_tight(
    p: TightProtocol, steps: int = 4096, raise_on_failure: bool = True, method: str = "midpoint"
) -> TightVerification:
    """Propagate a tight protocol and check closure, holonomy, length and saturation.

    The bound is that of the representative the protocol was built for, so the
    saturation clause is meaningful for any ``epsilon``.
    """
    h = p.hamiltonian
    u = propagate(h, steps, method)
    frames = u.samples @ p.frame
    path = ProjectorPath.from_frames(p.tau, frames)
    _, defect = loop_closure(path)
    gamma = dagger(p.frame) @ frames[-1]
    target = p.target.matrix
    failures = []
    if defect >= TIGHT_LIMITS["closure"]:
        failures.append(f"closure: defect {defect:.3e}")
    dist = projective_distance(GateSpec(_nearest_unitary(gamma)), p.target)
    phase_err = None
    if dist >= TIGHT_LIMITS["holonomy"]:
        failures.append(f"holonomy: projective distance {dist:.3e}")
    if p.epsilon == 0.0:
        phase_err = float(np.max(np.abs(gamma - target)))
        if phase_err >= TIGHT_LIMITS["holonomy"]:
            failures.append(f"holonomy: global phase mismatch {phase_err:.3e}")
    length = curve_length(path)
    bound = isoholonomic_bound(p.target)
    length_err = abs(length - bound)
    if length_err >= TIGHT_LIMITS["length"]:
        failures.append(f"length: |{length:.6f} - {bound:.6f}| = {length_err:.3e}")
    speeds = speed_trace(h, path)
    mean_speed = float(trapezoid(speeds, dx=path.dt) / p.tau)
    if bound == 0.0 and mean_speed < 1e-12:
        # identity target: nothing moves and the bound is met with equality
        tau_qsl, ratio = 0.0, 1.0
    else:
        tau_qsl = bound / mean_speed if mean_speed > 0 else np.inf
        ratio = tau_qsl / p.tau
    if not abs(ratio - 1.0) < TIGHT_LIMITS["saturation"]:
        failures.append(f"saturation: ratio {ratio:.6f}")
    report = QslReport(length, bound, mean_speed, p.tau, tau_qsl, ratio, "conventional", defect, gamma)
    result = TightVerification(report, dist, phase_err, defect, length_err, failures)
    if failures and raise_on_failure:
        raise VerificationError("tight protocol verification failed: " + "; ".join(failures), result)
    return result


def _nearest_unitary(m: np.ndarray) -> np.ndarray:
    u, _, wh = np.linalg.svd(m)
    return u @ wh


def random_target(n: int, rng: np.random.Generator) -> GateSpec:
    from .matrixcore import random_unitary

    return GateSpec(random_unitary(n, rng))


__all__ = [
    "TightBlock",
    "TightProtocol",
    "TightVerification",
    "build_tight",
    "block_trajectory",
    "verify_tight",
    "cone_angle",
    "block_speed",
    "bloch_components",
    "random_target",
]
