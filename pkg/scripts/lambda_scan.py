#!/usr/bin/env python3
"""Scan the sign of the Einstein constant over perturbed 3-step templates.

Each trial minimises the Einstein-system residual with the constant free and
records it whenever the residual reaches the threshold.
"""
import argparse
import json
from dataclasses import asdict, dataclass

from nilcurv.search import TEMPLATES, scan_lambda_sign


@dataclass(frozen=True)
class ScanConfig:
    templates: tuple[str, ...] = ("three_step_dim6", "three_step_dim7")
    trials: int = 25
    seed: int = 1
    threshold: float = 1e-6


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--templates", nargs="+", choices=TEMPLATES, default=list(ScanConfig.templates))
    p.add_argument("--trials", type=int, default=ScanConfig.trials, help="trials per template")
    p.add_argument("--seed", type=int, default=ScanConfig.seed)
    p.add_argument("--threshold", type=float, default=ScanConfig.threshold)
    a = p.parse_args()
    cfg = ScanConfig(tuple(a.templates), a.trials, a.seed, a.threshold)
    rows = []
    for name in cfg.templates:
        r = scan_lambda_sign(name, cfg.trials, cfg.seed, cfg.threshold)
        rows.append({
            "template": name,
            "near_solutions": r.near_solutions,
            "min_lambda": r.min_lambda,
            "max_lambda": r.max_lambda,
            "best_residual": r.best_residual,
            "supports_nonnegative": r.supports_nonnegative,
        })
    print(json.dumps({"config": asdict(cfg), "results": rows}, indent=1))


if __name__ == "__main__":
    main()
