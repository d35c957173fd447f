#!/usr/bin/env python3
"""Cross-check the two Ricci routes and the trace identity on random algebras.

Prints the worst relative disagreement between the general (trace) route and
the nilpotent (J1/J2) route, and the worst |tr J1 - tr J2|.
"""
import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from nilcurv.curvature import ricci_general, ricci_nilpotent
from nilcurv.pseudolinalg import max_abs
from nilcurv.randgen import random_metric_lie_algebra


@dataclass(frozen=True)
class OracleConfig:
    samples: int = 100
    seed: int = 2024
    min_dim: int = 3
    max_dim: int = 8
    max_negative: int = 2


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    for f, v in asdict(OracleConfig()).items():
        p.add_argument(f"--{f.replace('_', '-')}", type=int, default=v)
    cfg = OracleConfig(**vars(p.parse_args()))
    rng = np.random.default_rng(cfg.seed)
    worst_route = worst_trace = 0.0
    for _ in range(cfg.samples):
        n = int(rng.integers(cfg.min_dim, cfg.max_dim + 1))
        a = random_metric_lie_algebra(rng, n, int(rng.integers(0, cfg.max_negative + 1)))
        g, nil = ricci_general(a), ricci_nilpotent(a)
        worst_route = max(worst_route, float(max_abs(g.ric - nil.ric)) / max(1.0, float(max_abs(g.ric))))
        worst_trace = max(worst_trace, abs(float(np.trace(nil.J1) - np.trace(nil.J2))))
    print(json.dumps({"config": asdict(cfg), "ricci_routes_rel": worst_route, "trace_gap": worst_trace}, indent=1))


if __name__ == "__main__":
    main()
