"""Seeded scenario generators for experiments and property tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import GeneratorFrame, RotatedHamiltonian, SampledFrame, ShiftFunction
from .frames import ProjectorPath
from .matrixcore import dagger, random_hermitian, random_unitary


@dataclass(eq=False)
class ParallelLoop:
    """A Hamiltonian that parallel-transports ``span(v0)`` around a closed loop.

    ``exact_holonomy`` is known in closed form: ``exp(i tau V0^dag B V0)``.
    """

    hamiltonian: RotatedHamiltonian
    v0: np.ndarray
    exact_holonomy: np.ndarray


def random_parallel_loop(d: int, n: int, rng: np.random.Generator, tau: float = 1.0, max_winding: int = 2) -> ParallelLoop:
    """``H_t = exp(-itB)(K + B)exp(itB)`` with ``K = -PBP + (1-P)M(1-P)``.

    ``B`` has eigenvalues ``2 pi m / tau`` for integers ``|m| <= max_winding`` so
    ``exp(-i tau B) = 1`` and the projector loop closes. ``K`` commutes with
    ``P = V0 V0^dag`` and cancels ``B`` on the computational space, which makes
    ``V_t^dag H_t V_t = 0``.
    """
    v0 = random_unitary(d, rng)[:, :n]
    p = v0 @ dagger(v0)
    q = np.eye(d) - p
    w = random_unitary(d, rng)
    m = rng.integers(-max_winding, max_winding + 1, size=d)
    b = w @ np.diag(2 * np.pi * m / tau) @ dagger(w)
    b = 0.5 * (b + dagger(b))
    k = -p @ b @ p + q @ random_hermitian(d, rng) @ q
    k = 0.5 * (k + dagger(k))
    gamma = scipy.linalg.expm(1j * tau * (dagger(v0) @ b @ v0))
    return ParallelLoop(RotatedHamiltonian(tau, k + b, b), v0, gamma)


def random_shift(tau: float, rng: np.random.Generator, amplitude: float = 1.0, steps: int = 4096, modes: int = 3) -> ShiftFunction:
    """Smooth random ``eps_t``: a few random Fourier modes, max about ``amplitude``."""
    ts = np.linspace(0.0, tau, steps + 1)
    vals = np.zeros_like(ts)
    for j in range(1, modes + 1):
        a, phi = rng.normal(), rng.uniform(0, 2 * np.pi)
        vals += a * np.cos(2 * np.pi * j * ts / tau + phi)
    vals += rng.normal()
    vals *= amplitude / max(np.max(np.abs(vals)), 1e-300)
    return ShiftFunction(tau, vals)


def random_generator_frame(d: int, tau: float, rng: np.random.Generator, scale: float = 1.0) -> GeneratorFrame:
    return GeneratorFrame(tau, random_hermitian(d, rng, scale))


def random_sampled_frame(d: int, tau: float, rng: np.random.Generator, steps: int = 4096, scale: float = 1.0) -> SampledFrame:
    """``R_t = exp(itB1) exp(it^2 B2) C``: time-dependent potential and ``R_0 = C != 1``."""
    b1 = random_hermitian(d, rng, scale)
    b2 = random_hermitian(d, rng, scale)
    e1, u1 = np.linalg.eigh(b1)
    e2, u2 = np.linalg.eigh(b2)
    ts = np.linspace(0.0, tau, steps + 1)
    r1 = (u1 * np.exp(1j * ts[:, None, None] * e1)) @ dagger(u1)
    r2 = (u2 * np.exp(1j * (ts**2)[:, None, None] * e2)) @ dagger(u2)
    return SampledFrame(tau, r1 @ r2 @ random_unitary(d, rng))


def cap_state(alpha: float, phi: float) -> np.ndarray:
    """Qubit state with Bloch vector at polar angle ``alpha``, azimuth ``phi``."""
    return np.array([np.cos(alpha / 2), np.exp(1j * phi) * np.sin(alpha / 2)])


def cap_loop(alpha: float, steps: int = 10_000, tau: float = 1.0) -> ProjectorPath:
    """Circle of latitude at polar angle ``alpha``, traversed once counterclockwise."""
    return ProjectorPath.from_function(tau, steps, lambda t: cap_state(alpha, 2 * np.pi * t / tau))


def cap_solid_angle(alpha: float) -> float:
    return 2 * np.pi * (1 - np.cos(alpha))


__all__ = [
    "ParallelLoop",
    "random_parallel_loop",
    "random_shift",
    "random_generator_frame",
    "random_sampled_frame",
    "cap_state",
    "cap_loop",
    "cap_solid_angle",
]
