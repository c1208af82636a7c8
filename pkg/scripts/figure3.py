"""Write the ratio series of all three subfigures as CSV files."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from maskirental.experiments import figure3, figure3_csv


@dataclass(frozen=True)
class FigureConfig:
    out_dir: Path = Path("figure3")
    convention: str = "search"


def main(config: FigureConfig) -> int:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    for sub in "abc":
        path = config.out_dir / f"figure3{sub}.csv"
        path.write_text(figure3_csv(figure3(sub, config.convention)))
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("figure3"))
    ap.add_argument("--convention", choices=("search", "closed-form"), default="search")
    args = ap.parse_args()
    raise SystemExit(main(FigureConfig(args.out_dir, args.convention)))
