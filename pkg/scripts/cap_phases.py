"""Geometric phase of latitude loops on the Bloch sphere.

Compares the horizontal-lift holonomy with minus half the enclosed solid angle.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from holotransport.metrics import holonomy
from holotransport.scenarios import cap_loop, cap_solid_angle, cap_state


@dataclass
class CapConfig:
    angles: int = 12
    steps: int = 10_000


def run(cfg: CapConfig):
    for alpha in np.linspace(0.05, np.pi - 0.05, cfg.angles):
        gate, _ = holonomy(cap_loop(alpha, cfg.steps), cap_state(alpha, 0).reshape(2, 1))
        phase = np.angle(gate.matrix[0, 0])
        expected = np.angle(np.exp(-0.5j * cap_solid_angle(alpha)))
        err = abs(np.angle(np.exp(1j * (phase - expected))))
        yield alpha, phase, expected, err


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--angles", type=int, default=CapConfig.angles)
    ap.add_argument("--steps", type=int, default=CapConfig.steps)
    args = ap.parse_args()
    print(f"{'alpha':>8} {'lift phase':>12} {'-Omega/2':>12} {'error':>9}")
    for alpha, phase, expected, err in run(CapConfig(args.angles, args.steps)):
        print(f"{alpha:8.4f} {phase:12.8f} {expected:12.8f} {err:9.1e}")


if __name__ == "__main__":
    main()
