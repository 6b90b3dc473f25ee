"""Sweep tight protocols over eigenphases and random targets; report saturation.

    python3 scripts/tight_sweep.py --random 20 --dim 4 --n 2 --out sweep.json
"""

import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from holotransport import build_tight, verify_tight
from holotransport.matrixcore import random_unitary
from holotransport.metrics import GateSpec


@dataclass
class SweepConfig:
    thetas: int = 16
    random: int = 10
    dim: int = 4
    n: int = 2
    tau: float = 1.0
    steps: int = 4096
    seed: int = 20250517


def run(cfg: SweepConfig) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for theta in np.linspace(0, 2 * np.pi, cfg.thetas, endpoint=False):
        target = GateSpec(np.array([[np.exp(1j * theta)]]), tol=1e-9)
        res = verify_tight(build_tight(target, np.eye(2)[:, :1], cfg.tau), cfg.steps, raise_on_failure=False)
        rows.append({"case": f"theta={theta:.4f}", **_summary(res)})
    frame = np.eye(cfg.dim)[:, : cfg.n]
    for i in range(cfg.random):
        target = GateSpec(random_unitary(cfg.n, rng))
        res = verify_tight(build_tight(target, frame, cfg.tau), cfg.steps, raise_on_failure=False)
        rows.append({"case": f"random[{i}]", **_summary(res)})
    return rows


def _summary(res) -> dict:
    return {
        "length": res.qsl.length,
        "bound": res.qsl.bound,
        "ratio": res.qsl.saturation_ratio,
        "holonomy_distance": res.holonomy_distance,
        "closure_defect": res.closure_defect,
        "passed": res.passed,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    for name, value in asdict(SweepConfig()).items():
        ap.add_argument(f"--{name}", type=type(value), default=value)
    ap.add_argument("--out")
    args = vars(ap.parse_args())
    out = args.pop("out")
    rows = run(SweepConfig(**args))
    print(f"{'case':>16} {'length':>10} {'bound':>10} {'ratio':>10} {'hol.dist':>9} pass")
    for r in rows:
        print(f"{r['case']:>16} {r['length']:10.6f} {r['bound']:10.6f} {r['ratio']:10.6f} "
              f"{r['holonomy_distance']:9.1e} {r['passed']}")
    print(f"{sum(r['passed'] for r in rows)}/{len(rows)} protocols verified")
    if out:
        with open(out, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
