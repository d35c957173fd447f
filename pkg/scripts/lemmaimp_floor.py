#!/usr/bin/env python3
"""Residual floor of the K, A, P system search, per branch of P and sign of alpha.

For k = 1 the floor is zero (an explicit solution exists); for k >= 2 the
printed value is an empirical floor, not a proof of non-existence.
"""
import argparse
import json
import time
from dataclasses import asdict, dataclass

from nilcurv.matlemmas import lemmaimp_search
from nilcurv.search import SearchConfig


@dataclass(frozen=True)
class FloorConfig:
    k: int = 2
    restarts: int = 200
    seed: int = 7
    max_evals: int | None = None
    polish_rounds: int = 2


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", type=int, default=FloorConfig.k)
    p.add_argument("--restarts", type=int, default=FloorConfig.restarts)
    p.add_argument("--seed", type=int, default=FloorConfig.seed)
    p.add_argument("--max-evals", type=int, help="per-restart evaluation budget (default: library default)")
    p.add_argument("--polish-rounds", type=int, default=FloorConfig.polish_rounds)
    cfg = FloorConfig(**{k.replace("-", "_"): v for k, v in vars(p.parse_args()).items()})
    search_cfg = None if cfg.max_evals is None else SearchConfig(max_evals=cfg.max_evals, polish_rounds=cfg.polish_rounds)
    t0 = time.perf_counter()
    r = lemmaimp_search(cfg.k, cfg.restarts, cfg.seed, search_cfg)
    out = {
        "config": asdict(cfg),
        "floor": r.residual,
        "best_branch": {"reflect": r.branch.reflect, "alpha_sign": r.branch.alpha_sign},
        "best_restart": r.restart,
        "per_branch": r.per_branch,
        "seconds": round(time.perf_counter() - t0, 1),
        "evidence": r.evidence,
    }
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
