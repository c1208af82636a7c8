"""Compare Monte Carlo means with the exact expected cost for every randomized policy."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from maskirental.model import Instance, ProblemParams
from maskirental.randomized import DensityKind, monte_carlo


@dataclass(frozen=True)
class MonteCarloConfig:
    params: ProblemParams
    instance: Instance
    runs: int = 100_000
    seed: int = 0


def main(config: MonteCarloConfig) -> int:
    print("kind,n,mean,stderr,exact,z")
    for kind in DensityKind:
        r = monte_carlo(config.params, config.instance, kind, config.runs, config.seed)
        print(f"{kind.value},{r.n},{r.mean:.6f},{r.stderr:.6f},{r.exact:.6f},{r.z_score:+.3f}")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--params", default="10,10,60", help="M,B,G")
    ap.add_argument("--days", default="1,2,3,4,5,6,7,8,9,10")
    ap.add_argument("--runs", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    M, B, G = (int(v) for v in args.params.split(","))
    days = Instance.sorted_from(int(v) for v in args.days.split(","))
    raise SystemExit(main(MonteCarloConfig(ProblemParams(M, B, G), days, args.runs, args.seed)))
