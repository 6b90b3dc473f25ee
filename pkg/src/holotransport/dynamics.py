"""Time-dependent Hamiltonians, propagation and rotating-frame transforms.

Conventions (hbar = 1): a rotating frame ``R_t`` maps lab states to
``R_t |psi_t>``, observables to ``R_t O R_t^dag`` and the Hamiltonian to

    H_rf(t) = R_t H(t) R_t^dag + A(t),    A(t) = i dR_t/dt R_t^dag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import GridError, StructuralError
from .matrixcore import (
    DEFAULT_TOL,
    dagger,
    expm_skew,
    expm_skew_batch,
    hermitian_part,
    hermiticity_defect,
    require_hermitian,
    unitarity_defect,
)

_TAU_RTOL = 1e-12


def _check_tau(tau):
    if not tau > 0:
        raise GridError(f"duration must be positive, got {tau}")


def _uniform_interp(samples: np.ndarray, tau: float, t: float) -> np.ndarray:
    """Linear interpolation of samples on the uniform grid over [0, tau]."""
    n = samples.shape[0] - 1
    x = min(max(t / tau * n, 0.0), float(n))
    k = min(int(np.floor(x)), n - 1)
    w = x - k
    return (1.0 - w) * samples[k] + w * samples[k + 1]


def _same_duration(a: float, b: float) -> bool:
    return abs(a - b) <= _TAU_RTOL * max(abs(a), abs(b))


class HamiltonianPath:
    """A Hermitian operator ``H(t)`` on ``[0, tau]``.

    Subclasses implement ``at``. ``kind`` names the file representation.
    """

    kind = "abstract"
    dim: int
    tau: float

    def at(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def at_many(self, ts) -> np.ndarray:
        return np.stack([self.at(float(t)) for t in ts])

    def grid_divisor(self) -> int:
        """``propagate`` step counts must be a multiple of this."""
        return 1

    def __add__(self, other):
        raise TypeError("use gauge_shift to add a multiple of the identity")


@dataclass(eq=False)
class ConstantHamiltonian(HamiltonianPath):
    tau: float
    H: np.ndarray
    kind = "constant"

    def __post_init__(self):
        _check_tau(self.tau)
        self.H = require_hermitian(self.H)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def at(self, t):
        return self.H

    def at_many(self, ts):
        return np.broadcast_to(self.H, (len(ts),) + self.H.shape).copy()


@dataclass(eq=False)
class RotatedHamiltonian(HamiltonianPath):
    """``H(t) = exp(-itB) H0 exp(itB)``."""

    tau: float
    H0: np.ndarray
    B: np.ndarray
    kind = "rotated_constant"

    def __post_init__(self):
        _check_tau(self.tau)
        self.H0 = require_hermitian(self.H0, name="H0")
        self.B = require_hermitian(self.B, name="B")
        if self.H0.shape != self.B.shape:
            raise StructuralError("H0 and B must have the same shape")
        self._b_evals, self._b_evecs = np.linalg.eigh(self.B)
        # H0 in the eigenbasis of B; rotation then only multiplies by phases
        self._h0_b = dagger(self._b_evecs) @ self.H0 @ self._b_evecs

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    def at(self, t):
        return self.at_many([t])[0]

    def at_many(self, ts):
        ts = np.asarray(ts, dtype=float)
        ph = np.exp(-1j * ts[:, None] * self._b_evals)  # (N, d)
        rotated = ph[:, :, None] * self._h0_b * np.conj(ph)[:, None, :]
        return self._b_evecs @ rotated @ dagger(self._b_evecs)


@dataclass(eq=False)
class SampledHamiltonian(HamiltonianPath):
    """Hermitian samples on a uniform grid, linearly interpolated."""

    tau: float
    samples: np.ndarray
    kind = "sampled"

    def __post_init__(self):
        _check_tau(self.tau)
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 3 or s.shape[1] != s.shape[2]:
            raise StructuralError(f"samples must have shape (N+1, d, d), got {s.shape}")
        if s.shape[0] < 2:
            raise GridError("a sampled Hamiltonian needs at least two samples")
        defect = hermiticity_defect(s)
        if defect > DEFAULT_TOL.structural:
            raise StructuralError(f"sampled Hamiltonian is not Hermitian: max asymmetry {defect:.3e}")
        self.samples = s

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def at(self, t):
        return _uniform_interp(self.samples, self.tau, t)

    def grid_divisor(self):
        return self.samples.shape[0] - 1


@dataclass(eq=False)
class WarpedHamiltonian(HamiltonianPath):
    """``g'(s) H(g(s))`` on ``[0, tau]``: the same path of ``base`` on a new clock.

    ``warp`` maps ``[0, tau]`` monotonically onto ``[0, base.tau]`` and ``rate``
    is its derivative; both take and return arrays.
    """

    base: HamiltonianPath
    tau: float
    warp: object
    rate: object
    kind = "sampled"

    def __post_init__(self):
        _check_tau(self.tau)

    @property
    def dim(self):
        return self.base.dim

    def at(self, t):
        return self.at_many([t])[0]

    def at_many(self, ts):
        ts = np.asarray(ts, dtype=float)
        g = np.clip(self.warp(ts), 0.0, self.base.tau)
        return np.asarray(self.rate(ts), dtype=float)[:, None, None] * self.base.at_many(g)


def time_rescaled(h: HamiltonianPath, factor: float) -> WarpedHamiltonian:
    """Traverse the path of ``h`` ``factor`` times more slowly, over ``factor * tau``."""
    if not factor > 0:
        raise ValueError(f"factor must be positive, got {factor}")
    return WarpedHamiltonian(
        h, factor * h.tau, lambda s: np.asarray(s) / factor, lambda s: np.full(np.shape(s), 1.0 / factor)
    )


def padded_with_hold(h: HamiltonianPath, hold: float) -> WarpedHamiltonian:
    """Run the path of ``h`` with a ``2 sin^2`` speed profile, then idle for ``hold``.

    The profile makes the Hamiltonian vanish smoothly at ``t = tau`` so the
    padded path stays C^1 in time.
    """
    tau = h.tau

    def warp(s):
        s = np.minimum(np.asarray(s, dtype=float), tau)
        return s - tau * np.sin(2 * np.pi * s / tau) / (2 * np.pi)

    def rate(s):
        s = np.asarray(s, dtype=float)
        return np.where(s < tau, 1.0 - np.cos(2 * np.pi * np.minimum(s, tau) / tau), 0.0)

    return WarpedHamiltonian(h, tau + hold, warp, rate)


@dataclass(eq=False)
class ShiftFunction:
    """Real energy offsets ``eps(t)`` sampled on a uniform grid."""

    tau: float
    samples: np.ndarray

    def __post_init__(self):
        _check_tau(self.tau)
        s = np.asarray(self.samples, dtype=float).reshape(-1)
        if s.size < 2:
            raise GridError("a shift function needs at least two samples")
        if not np.all(np.isfinite(s)):
            raise StructuralError("shift function has non-finite values")
        self.samples = s

    @classmethod
    def constant(cls, tau: float, value: float) -> "ShiftFunction":
        return cls(tau, np.full(2, float(value)))

    @classmethod
    def from_function(cls, tau: float, steps: int, fn) -> "ShiftFunction":
        return cls(tau, np.array([fn(t) for t in np.linspace(0.0, tau, steps + 1)], dtype=float))

    def at(self, t) -> float:
        return float(_uniform_interp(self.samples, self.tau, float(t)))

    def at_many(self, ts) -> np.ndarray:
        grid = np.linspace(0.0, self.tau, self.samples.size)
        return np.interp(np.asarray(ts, dtype=float), grid, self.samples)

    def integral(self, ts) -> np.ndarray:
        """``int_0^t eps(s) ds`` (exact for the piecewise-linear interpolant)."""
        grid = np.linspace(0.0, self.tau, self.samples.size)
        cum = cumulative_trapezoid(self.samples, grid, initial=0.0)
        ts = np.asarray(ts, dtype=float)
        k = np.clip(np.searchsorted(grid, ts, side="right") - 1, 0, grid.size - 2)
        h = ts - grid[k]
        slope = (self.samples[k + 1] - self.samples[k]) / (grid[k + 1] - grid[k])
        return cum[k] + h * (self.samples[k] + 0.5 * slope * h)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples)))


@dataclass(eq=False)
class ShiftedHamiltonian(HamiltonianPath):
    """``base(t) + eps(t) * 1``."""

    base: HamiltonianPath
    shift: ShiftFunction

    def __post_init__(self):
        if not _same_duration(self.base.tau, self.shift.tau):
            raise GridError("shift function and Hamiltonian durations differ")

    @property
    def kind(self):
        return self.base.kind

    @property
    def dim(self):
        return self.base.dim

    @property
    def tau(self):
        return self.base.tau

    def at(self, t):
        return self.base.at(t) + self.shift.at(t) * np.eye(self.dim)

    def at_many(self, ts):
        eye = np.eye(self.dim)
        return self.base.at_many(ts) + self.shift.at_many(ts)[:, None, None] * eye

    def grid_divisor(self):
        return self.base.grid_divisor()


class RotatingFrame:
    """A family of unitaries ``R_t`` on ``[0, tau]``."""

    dim: int
    tau: float

    def at(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def at_many(self, ts) -> np.ndarray:
        return np.stack([self.at(float(t)) for t in ts])


@dataclass(eq=False)
class GeneratorFrame(RotatingFrame):
    """``R_t = exp(itB)`` with Hermitian ``B``."""

    tau: float
    B: np.ndarray
    kind = "constant_generator"

    def __post_init__(self):
        _check_tau(self.tau)
        self.B = require_hermitian(self.B, name="B")
        self._evals, self._evecs = np.linalg.eigh(self.B)

    @classmethod
    def identity(cls, dim: int, tau: float) -> "GeneratorFrame":
        return cls(tau, np.zeros((dim, dim), dtype=complex))

    @property
    def dim(self):
        return self.B.shape[0]

    @property
    def is_identity(self) -> bool:
        return not np.any(self.B)

    def at(self, t):
        return (self._evecs * np.exp(1j * t * self._evals)) @ dagger(self._evecs)

    def at_many(self, ts):
        ts = np.asarray(ts, dtype=float)
        ph = np.exp(1j * ts[:, None] * self._evals)
        return (self._evecs * ph[:, None, :]) @ dagger(self._evecs)


@dataclass(eq=False)
class SampledFrame(RotatingFrame):
    """Unitary samples on a uniform grid.

    Off-grid values are linear interpolants pulled back to the unitary group
    by their polar factor.
    """

    tau: float
    samples: np.ndarray
    kind = "sampled"

    def __post_init__(self):
        _check_tau(self.tau)
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 3 or s.shape[1] != s.shape[2]:
            raise StructuralError(f"samples must have shape (N+1, d, d), got {s.shape}")
        if s.shape[0] < 2:
            raise GridError("a sampled frame needs at least two samples")
        defect = unitarity_defect(s)
        if defect > DEFAULT_TOL.structural:
            raise StructuralError(f"sampled frame is not unitary: defect {defect:.3e}")
        self.samples = s

    @property
    def dim(self):
        return self.samples.shape[1]

    @property
    def steps(self):
        return self.samples.shape[0] - 1

    @property
    def times(self):
        return np.linspace(0.0, self.tau, self.steps + 1)

    def at(self, t):
        m = _uniform_interp(self.samples, self.tau, t)
        u, _, wh = np.linalg.svd(m)
        return u @ wh


@dataclass(eq=False)
class PropagatorPath:
    """Time-evolution operators ``U_t`` on a uniform grid, ``U_0 = 1``."""

    tau: float
    samples: np.ndarray

    @property
    def dim(self):
        return self.samples.shape[1]

    @property
    def steps(self):
        return self.samples.shape[0] - 1

    @property
    def times(self):
        return np.linspace(0.0, self.tau, self.steps + 1)

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1]


_GAUSS_OFFSET = np.sqrt(3.0) / 6.0


def propagate(h: HamiltonianPath, steps: int = 4096, method: str = "midpoint") -> PropagatorPath:
    """Solve ``i dU/dt = H(t) U`` by exponential one-step integrators.

    ``midpoint`` applies ``exp(-i dt H(t + dt/2))`` (second order).
    ``magnus4`` is the two-point Gauss fourth-order Magnus step
    ``exp(-i dt K)`` with ``K = (H1 + H2)/2 - i sqrt(3)/12 dt [H2, H1]``.
    Both are unitary to rounding at every step. Constant Hamiltonians are
    exponentiated exactly at each grid time.
    """
    if steps < 2:
        raise GridError(f"steps must be >= 2, got {steps}")
    div = h.grid_divisor()
    if steps % div:
        raise GridError(f"steps ({steps}) must be a multiple of the sample intervals ({div})")
    if method not in ("midpoint", "magnus4"):
        raise ValueError(f"unknown integrator {method!r}")
    dt = h.tau / steps
    d = h.dim
    if isinstance(h, ConstantHamiltonian):
        evals, evecs = np.linalg.eigh(h.H)
        ts = np.linspace(0.0, h.tau, steps + 1)
        ph = np.exp(-1j * ts[:, None] * evals)
        us = (evecs * ph[:, None, :]) @ dagger(evecs)
        us[0] = np.eye(d)
        return PropagatorPath(h.tau, us)
    starts = np.arange(steps) * dt
    if method == "midpoint":
        gens = h.at_many(starts + 0.5 * dt)
    else:
        h1 = h.at_many(starts + (0.5 - _GAUSS_OFFSET) * dt)
        h2 = h.at_many(starts + (0.5 + _GAUSS_OFFSET) * dt)
        gens = 0.5 * (h1 + h2) - 1j * (np.sqrt(3.0) / 12.0) * dt * (h2 @ h1 - h1 @ h2)
    step_ops = expm_skew_batch(gens, dt)
    us = np.empty((steps + 1, d, d), dtype=complex)
    us[0] = np.eye(d)
    for k in range(steps):
        us[k + 1] = step_ops[k] @ us[k]
    return PropagatorPath(h.tau, us)


def _check_compatible(h: HamiltonianPath, r: RotatingFrame):
    if h.dim != r.dim:
        raise StructuralError(f"dimension mismatch: Hamiltonian {h.dim}, frame {r.dim}")
    if not _same_duration(h.tau, r.tau):
        raise GridError(f"duration mismatch: Hamiltonian {h.tau}, frame {r.tau}")


def frame_potential(r: RotatingFrame) -> HamiltonianPath:
    """The rotational potential ``A(t) = i dR/dt R^dag``.

    Sampled frames use second-order central differences in the interior and
    one-sided second-order stencils at the ends; the result is projected onto
    the Hermitian matrices.
    """
    if isinstance(r, GeneratorFrame):
        return ConstantHamiltonian(r.tau, -r.B)
    if isinstance(r, SampledFrame):
        if r.samples.shape[0] < 3:
            raise GridError("a sampled frame needs at least three samples for differencing")
        rdot = np.gradient(r.samples, r.tau / r.steps, axis=0, edge_order=2)
        a = hermitian_part(1j * rdot @ dagger(r.samples))
        return SampledHamiltonian(r.tau, a)
    raise TypeError(f"unsupported rotating frame {type(r).__name__}")


@dataclass(eq=False)
class FramedHamiltonian(HamiltonianPath):
    """A Hamiltonian seen through an analytic rotating frame ``exp(itB)``.

    forward:  R H R^dag - B        (lab -> rotating)
    inverse:  R^dag (H + B) R      (rotating -> lab)
    """

    base: HamiltonianPath
    frame: GeneratorFrame
    inverse: bool = False
    kind = "sampled"

    @property
    def dim(self):
        return self.base.dim

    @property
    def tau(self):
        return self.base.tau

    def at(self, t):
        return self.at_many([t])[0]

    def at_many(self, ts):
        r = self.frame.at_many(ts)
        hs = self.base.at_many(ts)
        b = self.frame.B
        if self.inverse:
            return dagger(r) @ (hs + b) @ r
        return r @ hs @ dagger(r) - b

    def grid_divisor(self):
        return self.base.grid_divisor()


def to_rotating_frame(h: HamiltonianPath, r: RotatingFrame) -> HamiltonianPath:
    """Rotating-frame Hamiltonian ``R H R^dag + i dR/dt R^dag``."""
    _check_compatible(h, r)
    if isinstance(r, GeneratorFrame):
        if r.is_identity:
            return h
        if isinstance(h, RotatedHamiltonian) and np.allclose(h.B, r.B, atol=0, rtol=0):
            return ConstantHamiltonian(h.tau, h.H0 - r.B)
        return FramedHamiltonian(h, r, inverse=False)
    if isinstance(r, SampledFrame):
        a = frame_potential(r).samples
        rs = r.samples
        hs = h.at_many(r.times)
        return SampledHamiltonian(r.tau, hermitian_part(rs @ hs @ dagger(rs) + a))
    raise TypeError(f"unsupported rotating frame {type(r).__name__}")


def from_rotating_frame(h_rf: HamiltonianPath, r: RotatingFrame) -> HamiltonianPath:
    """Lab-frame Hamiltonian ``R^dag (H_rf - A) R``; inverse of ``to_rotating_frame``."""
    _check_compatible(h_rf, r)
    if isinstance(r, GeneratorFrame):
        if r.is_identity:
            return h_rf
        if isinstance(h_rf, ConstantHamiltonian):
            return RotatedHamiltonian(h_rf.tau, h_rf.H + r.B, r.B)
        return FramedHamiltonian(h_rf, r, inverse=True)
    if isinstance(r, SampledFrame):
        a = frame_potential(r).samples
        rs = r.samples
        hs = h_rf.at_many(r.times)
        return SampledHamiltonian(r.tau, hermitian_part(dagger(rs) @ (hs - a) @ rs))
    raise TypeError(f"unsupported rotating frame {type(r).__name__}")


def sample_hamiltonian(h: HamiltonianPath, steps: int) -> SampledHamiltonian:
    """Tabulate any Hamiltonian path on a uniform grid of ``steps`` intervals."""
    ts = np.linspace(0.0, h.tau, steps + 1)
    return SampledHamiltonian(h.tau, hermitian_part(h.at_many(ts)))


def expectation_trace(h: HamiltonianPath, psi0, observable, steps: int = 4096, method: str = "midpoint") -> np.ndarray:
    """``<psi_t|O|psi_t>`` on the grid, for a time-independent observable."""
    u = propagate(h, steps, method).samples
    psi = u @ np.asarray(psi0, dtype=complex)
    return np.real(np.einsum("ki,ij,kj->k", np.conj(psi), observable, psi))


__all__ = [
    "HamiltonianPath",
    "ConstantHamiltonian",
    "RotatedHamiltonian",
    "SampledHamiltonian",
    "ShiftFunction",
    "ShiftedHamiltonian",
    "FramedHamiltonian",
    "WarpedHamiltonian",
    "time_rescaled",
    "padded_with_hold",
    "RotatingFrame",
    "GeneratorFrame",
    "SampledFrame",
    "PropagatorPath",
    "propagate",
    "frame_potential",
    "to_rotating_frame",
    "from_rotating_frame",
    "sample_hamiltonian",
    "expectation_trace",
    "expm_skew",
]
