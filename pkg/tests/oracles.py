"""Independent reference computations used only by the tests.

None of these call into the package: they re-derive quantities from scratch
with plain numpy so that agreement is evidence rather than tautology.
"""

import numpy as np


def series_expm(a, terms=40):
    """Truncated power series of exp(a)."""
    a = np.asarray(a, dtype=complex)
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def eigenphases(u):
    """Eigenphases in [0, 2pi) from numpy's general eigensolver."""
    return np.sort(np.mod(np.angle(np.linalg.eigvals(u)), 2 * np.pi))


def bound_squared_at(phases, shift):
    diff = np.mod(np.subtract.outer(np.atleast_1d(shift), phases), 2 * np.pi)
    return np.sum(diff * (2 * np.pi - diff), axis=-1)


def grid_projective_bound(u, points=100_000, zoom=6):
    """Dense-grid minimum of the shifted bound over shift in [0, 2pi).

    A 1e5-point global grid, then ``zoom`` rounds of local 2001-point grids
    around the incumbent, each 100x narrower. The refinement matters because
    the bound has a square-root kink at its minimizer: a shift error delta
    costs about sqrt(2 pi delta).
    """
    phases = eigenphases(u)
    grid = np.linspace(0.0, 2 * np.pi, points, endpoint=False)
    vals = bound_squared_at(phases, grid)
    best = grid[np.argmin(vals)]
    width = 2 * np.pi / points
    for _ in range(zoom):
        local = best + np.linspace(-width, width, 2001)
        lv = bound_squared_at(phases, local)
        best = local[np.argmin(lv)]
        width /= 100
    return float(np.sqrt(bound_squared_at(phases, best)[0]))


def pancharatnam_phase(states):
    """arg prod <psi_{k+1}|psi_k> around a closed discretized loop of state vectors.

    The loop is closed by identifying the last state with the first one.
    """
    states = np.asarray(states, dtype=complex)
    prod = 1.0 + 0j
    for k in range(len(states) - 1):
        ov = np.vdot(states[k + 1], states[k])
        prod *= ov / abs(ov)
    ov = np.vdot(states[0], states[-1])
    prod *= ov / abs(ov)
    return float(np.angle(prod))


def fd_squared_speed(h, p, dt=1e-5):
    """tr(Pdot^2)/2 with Pdot from central differences of exp(-iHt) P exp(iHt)."""
    evals, evecs = np.linalg.eigh(h)

    def evolve(t):
        u = (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T
        return u @ p @ u.conj().T

    pdot = (evolve(dt) - evolve(-dt)) / (2 * dt)
    return float(0.5 * np.real(np.trace(pdot @ pdot)))


def phase_distance(a, b):
    """Distance on the circle between two angles."""
    return abs(np.angle(np.exp(1j * (a - b))))
