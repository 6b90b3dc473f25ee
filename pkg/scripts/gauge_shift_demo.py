"""Adding eps_t * 1 to a parallel-transporting Hamiltonian.

The conventional condition breaks as soon as eps is resolvable; the projective
condition and its residual trace are untouched.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from holotransport.scenarios import random_parallel_loop, random_shift
from holotransport.transport import check_parallel_lab, check_projective_lab, gauge_shift


@dataclass
class DemoConfig:
    dim: int = 4
    n: int = 2
    steps: int = 4096
    seed: int = 20250517


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=DemoConfig.dim)
    ap.add_argument("--n", type=int, default=DemoConfig.n)
    ap.add_argument("--steps", type=int, default=DemoConfig.steps)
    ap.add_argument("--seed", type=int, default=DemoConfig.seed)
    cfg = DemoConfig(**vars(ap.parse_args()))
    rng = np.random.default_rng(cfg.seed)
    loop = random_parallel_loop(cfg.dim, cfg.n, rng)
    ref = check_projective_lab(loop.hamiltonian, loop.v0, cfg.steps, method="magnus4")
    print(f"{'max |eps|':>10} {'conventional':>13} {'conv. resid':>12} {'projective':>11} {'trace diff':>11}")
    for amp in [0.0, 1e-10, 1e-8, 1e-6, 1e-3, 1.0]:
        h = gauge_shift(loop.hamiltonian, random_shift(1.0, rng, amp)) if amp else loop.hamiltonian
        conv = check_parallel_lab(h, loop.v0, cfg.steps, method="magnus4")
        proj = check_projective_lab(h, loop.v0, cfg.steps, method="magnus4")
        diff = float(np.max(np.abs(proj.residual_trace - ref.residual_trace)))
        print(f"{amp:10.0e} {str(conv.verdict):>13} {conv.max_residual:12.1e} {str(proj.verdict):>11} {diff:11.1e}")


if __name__ == "__main__":
    main()
