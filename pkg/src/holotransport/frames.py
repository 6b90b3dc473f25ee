"""n-frames, projectors and the right action of U(n).

An n-frame is a ``(d, n)`` complex array with orthonormal columns; a projector
is a ``(d, d)`` Hermitian idempotent. Both are plain arrays validated on entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, GridError, StructuralError
from .matrixcore import DEFAULT_TOL, as_matrix, dagger, require_unitary

ADJACENCY_BOUND = 0.5


def check_frame(v, tol: float = DEFAULT_TOL.structural, name="V") -> np.ndarray:
    v = as_matrix(v, name)
    d, n = v.shape
    if n < 1 or n > d:
        raise StructuralError(f"{name} must be d x n with 1 <= n <= d, got {v.shape}")
    defect = float(np.max(np.abs(dagger(v) @ v - np.eye(n))))
    if defect > tol:
        raise StructuralError(f"{name} columns are not orthonormal: defect {defect:.3e}")
    return v


def check_projector(p, tol: float = DEFAULT_TOL.structural, name="P") -> np.ndarray:
    p = as_matrix(p, name)
    if p.shape[0] != p.shape[1]:
        raise StructuralError(f"{name} must be square, got {p.shape}")
    herm = float(np.max(np.abs(p - dagger(p))))
    idem = float(np.max(np.abs(p @ p - p)))
    if herm > tol or idem > tol:
        raise StructuralError(
            f"{name} is not an orthogonal projector: asymmetry {herm:.3e}, idempotency {idem:.3e}"
        )
    return p


def projector_rank(p) -> int:
    return int(round(float(np.real(np.trace(p)))))


def projector_of(v, tol: float = DEFAULT_TOL.structural) -> np.ndarray:
    """Orthogonal projector ``V V^dag`` onto the span of a frame."""
    v = check_frame(v, tol)
    return v @ dagger(v)


def orthonormalize(m, tol: float = DEFAULT_TOL.structural) -> np.ndarray:
    """Closest n-frame to ``m`` (polar factor); same column span.

    The polar factor is used instead of Gram-Schmidt so that orthonormal input
    comes back unchanged.
    """
    m = as_matrix(m, "M")
    if m.shape[1] > m.shape[0]:
        raise StructuralError(f"cannot orthonormalize {m.shape[1]} columns in dimension {m.shape[0]}")
    u, s, wh = np.linalg.svd(m, full_matrices=False)
    if s[-1] <= tol:
        raise DegeneracyError(f"input is rank deficient: smallest singular value {s[-1]:.3e}")
    return u @ wh


def complement_basis(v) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(v)``.

    Deterministic: the standard basis is orthonormalized against ``v`` by a
    full Householder QR of ``[v | 1]``.
    """
    d, n = v.shape
    q, _ = np.linalg.qr(np.hstack([v, np.eye(d, dtype=complex)]), mode="complete")
    return q[:, n:d]


def gauge_act(v, s, tol: float = DEFAULT_TOL.structural) -> np.ndarray:
    """Right action ``V -> V S`` of a unitary ``n x n`` matrix."""
    v = check_frame(v, tol)
    s = require_unitary(s, tol, name="S")
    if s.shape[0] != v.shape[1]:
        raise StructuralError(f"S must be {v.shape[1]}x{v.shape[1]}, got {s.shape}")
    return v @ s


def projectively_equal(v1, v2, tol: float = DEFAULT_TOL.transport):
    """Decide whether ``v1 = exp(i theta) v2``; return ``(flag, theta)``.

    Uses the column overlaps <v1_k|v2_k>: all must have unit modulus and a
    common phase. ``theta`` is ``None`` when the frames are not equivalent.
    """
    v1 = as_matrix(v1, "V1")
    v2 = as_matrix(v2, "V2")
    if v1.shape != v2.shape:
        return False, None
    overlaps = np.sum(np.conj(v1) * v2, axis=0)
    if np.any(np.abs(np.abs(overlaps) - 1.0) > tol):
        return False, None
    if np.any(np.abs(overlaps - overlaps[0]) > tol):
        return False, None
    return True, float(-np.angle(overlaps[0]))


@dataclass(frozen=True)
class ProjectorPath:
    """Rank-n projectors ``P_t`` on the uniform grid ``t_k = k tau / N``."""

    tau: float
    samples: np.ndarray  # (N + 1, d, d)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", samples)
        if not self.tau > 0:
            raise GridError(f"duration must be positive, got {self.tau}")
        if samples.ndim != 3 or samples.shape[1] != samples.shape[2]:
            raise StructuralError(f"samples must have shape (N+1, d, d), got {samples.shape}")
        if samples.shape[0] < 2:
            raise GridError("a projector path needs at least two samples")
        traces = np.real(np.einsum("kii->k", samples))
        if np.max(np.abs(traces - traces[0])) > 1e-6:
            raise StructuralError("projector samples do not share a common rank")

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def rank(self) -> int:
        return projector_rank(self.samples[0])

    @property
    def steps(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def dt(self) -> float:
        return self.tau / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.tau, self.steps + 1)

    def validate(self, tol: float = DEFAULT_TOL.structural) -> "ProjectorPath":
        """Full structural check plus the sample-adjacency bound."""
        for k, p in enumerate(self.samples):
            check_projector(p, tol, name=f"P[{k}]")
        self.check_adjacency()
        return self

    def check_adjacency(self):
        jumps = np.linalg.norm(np.diff(self.samples, axis=0), ord=2, axis=(1, 2))
        worst = int(np.argmax(jumps))
        if jumps[worst] >= ADJACENCY_BOUND:
            raise GridError(
                f"path under-resolved: |P[{worst + 1}] - P[{worst}]| = {jumps[worst]:.3f} "
                f">= {ADJACENCY_BOUND}"
            )

    @classmethod
    def from_frames(cls, tau: float, frames) -> "ProjectorPath":
        frames = np.asarray(frames, dtype=complex)
        return cls(tau, frames @ dagger(frames))

    @classmethod
    def from_function(cls, tau: float, steps: int, frame_at) -> "ProjectorPath":
        """Sample ``frame_at(t)`` (a d x n frame or a d-vector) on the grid."""
        frames = []
        for t in np.linspace(0.0, tau, steps + 1):
            f = np.asarray(frame_at(t), dtype=complex)
            frames.append(f.reshape(-1, 1) if f.ndim == 1 else f)
        return cls.from_frames(tau, frames)
