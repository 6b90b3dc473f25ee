"""Dense complex linear algebra shared by every other module.

All operators are plain ``numpy`` arrays of dtype ``complex128``. Exponentials
are built from Hermitian eigendecompositions so that ``expm_skew`` is unitary
by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import StructuralError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerances.

    structural: Hermiticity / unitarity / idempotency checks.
    transport: residuals of parallel-transport conditions.
    integration: end-to-end propagation accuracy.
    """

    structural: float = 1e-10
    transport: float = 1e-8
    integration: float = 1e-4

    def __post_init__(self):
        for name in ("structural", "transport", "integration"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"tolerance {name} must be nonnegative")


DEFAULT_TOL = Tolerance()


def as_matrix(a, name="matrix") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise StructuralError(f"{name} must be two-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise StructuralError(f"{name} has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes (works on stacks)."""
    return np.conj(np.swapaxes(a, -1, -2))


def hermiticity_defect(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - dagger(h)), initial=0.0))


def unitarity_defect(u: np.ndarray) -> float:
    eye = np.eye(u.shape[-1])
    return float(np.max(np.abs(dagger(u) @ u - eye), initial=0.0))


def is_hermitian(h, tol: float = DEFAULT_TOL.structural) -> bool:
    return hermiticity_defect(np.asarray(h, dtype=complex)) <= tol


def is_unitary(u, tol: float = DEFAULT_TOL.structural) -> bool:
    u = np.asarray(u, dtype=complex)
    return u.shape[-1] == u.shape[-2] and unitarity_defect(u) <= tol


def require_hermitian(h, tol: float = DEFAULT_TOL.structural, name="H") -> np.ndarray:
    h = as_matrix(h, name)
    if h.shape[0] != h.shape[1]:
        raise StructuralError(f"{name} must be square, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > tol:
        raise StructuralError(f"{name} is not Hermitian: max asymmetry {defect:.3e}")
    return h


def require_unitary(u, tol: float = DEFAULT_TOL.structural, name="U") -> np.ndarray:
    u = as_matrix(u, name)
    if u.shape[0] != u.shape[1]:
        raise StructuralError(f"{name} must be square, got shape {u.shape}")
    defect = unitarity_defect(u)
    if defect > tol:
        raise StructuralError(f"{name} is not unitary: max |U^dag U - 1| = {defect:.3e}")
    return u


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def expm_skew(h, t: float, tol: float = DEFAULT_TOL.structural) -> np.ndarray:
    """Return ``exp(-i t H)`` for Hermitian ``H``."""
    h = require_hermitian(h, tol)
    if t == 0:
        return np.eye(h.shape[0], dtype=complex)
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * t * evals)) @ dagger(evecs)


def expm_skew_batch(hs: np.ndarray, dt) -> np.ndarray:
    """``exp(-i dt H_k)`` for a stack of Hermitian matrices (no validation)."""
    evals, evecs = np.linalg.eigh(hermitian_part(hs))
    phases = np.exp(-1j * np.asarray(dt, dtype=float)[..., None] * evals)
    return (evecs * phases[..., None, :]) @ dagger(evecs)


def principal_phase(z, tol: float = DEFAULT_TOL.structural) -> np.ndarray:
    """Arguments of ``z`` mapped to ``[0, 2pi)``; values within ``tol`` of 2pi snap to 0."""
    phi = np.mod(np.angle(z), TWO_PI)
    phi = np.where(phi >= TWO_PI - tol, 0.0, phi)
    return phi


def eig_unitary(u, tol: float = DEFAULT_TOL.structural):
    """Eigenphases in ``[0, 2pi)`` (ascending) and an orthonormal eigenbasis.

    A complex Schur form is used because it returns a unitary basis even for
    degenerate spectra; for a normal matrix the triangular factor is diagonal.
    """
    u = require_unitary(u, tol)
    t, z = scipy.linalg.schur(u, output="complex")
    phases = principal_phase(np.diag(t), tol)
    order = np.argsort(phases, kind="stable")
    return phases[order], z[:, order]


def eig_hermitian(h, tol: float = DEFAULT_TOL.structural):
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    h = require_hermitian(h, tol)
    evals, evecs = np.linalg.eigh(h)
    return evals, evecs


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the diagonal phase fix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * hermitian_part(z) / np.sqrt(2 * n)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


# Pauli matrices, used mostly by tests and examples.
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
