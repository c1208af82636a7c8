"""Write the six-row ratio table for (10, 10, 60) and compare it with the golden copy."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from maskirental.experiments import parse_table_csv, reproduce_table3

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "data" / "table3_golden.csv"


@dataclass(frozen=True)
class TableConfig:
    convention: str = "search"
    out: Path | None = None
    golden: Path = GOLDEN


def main(config: TableConfig) -> int:
    table = reproduce_table3(config.convention)
    text = table.to_csv()
    if config.out:
        config.out.write_text(text)
    print(text, end="")
    golden = parse_table_csv(config.golden.read_text())
    mismatches = 0
    for row, values in table.rounded().items():
        for ell, (got, want) in enumerate(zip(values, golden[row])):
            if abs(got - want) > 0.001:
                mismatches += 1
                print(f"  {row} ell={ell}: {got} (reference {want})")
    print(f"{60 - mismatches}/60 cells within 0.001 of the reference")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--convention", choices=("search", "closed-form"), default="search")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()
    raise SystemExit(main(TableConfig(args.convention, args.out)))
