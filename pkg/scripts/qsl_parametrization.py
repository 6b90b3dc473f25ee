"""Speed-limit ratio of a tight protocol under reparametrization.

tau_QSL / tau equals bound / length, so slowing down or idling leaves it at 1.
Only a longer loop (here: running the protocol twice) drops below 1.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from holotransport import build_tight
from holotransport.dynamics import RotatedHamiltonian, padded_with_hold, time_rescaled
from holotransport.matrixcore import random_unitary
from holotransport.metrics import GateSpec, qsl_report


@dataclass
class QslConfig:
    dim: int = 4
    n: int = 2
    steps: int = 8192
    seed: int = 20250517


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=QslConfig.dim)
    ap.add_argument("--n", type=int, default=QslConfig.n)
    ap.add_argument("--steps", type=int, default=QslConfig.steps)
    ap.add_argument("--seed", type=int, default=QslConfig.seed)
    cfg = QslConfig(**vars(ap.parse_args()))
    rng = np.random.default_rng(cfg.seed)
    p = build_tight(GateSpec(random_unitary(cfg.n, rng)), np.eye(cfg.dim)[:, : cfg.n], 1.0)
    h, g = p.hamiltonian, p.target
    variants = {
        "tight": (h, g),
        "half speed": (time_rescaled(h, 2.0), g),
        "idle hold": (padded_with_hold(h, 1.0), g),
        "run twice": (RotatedHamiltonian(2.0, h.H0, h.B), GateSpec(g.matrix @ g.matrix)),
    }
    print(f"{'variant':>11} {'tau':>5} {'length':>9} {'bound':>9} {'tau_QSL':>9} {'ratio':>8}")
    for name, (hv, target) in variants.items():
        r = qsl_report(hv, p.frame, target, cfg.steps, method="magnus4")
        print(f"{name:>11} {r.tau:5.2f} {r.length:9.5f} {r.bound:9.5f} {r.tau_qsl:9.5f} {r.saturation_ratio:8.5f}")


if __name__ == "__main__":
    main()
