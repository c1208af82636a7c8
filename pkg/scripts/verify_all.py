"""Run every verification suite through the CLI and report the combined exit code."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from maskirental.cli import main as cli_main


@dataclass(frozen=True)
class VerifyConfig:
    params: str | None = None  # None: each suite uses its own default case
    suites: tuple[str, ...] = ("lp", "dominance", "yao", "two-agent")


def main(config: VerifyConfig) -> int:
    worst = 0
    for suite in config.suites:
        print(f"== {suite}")
        argv = ["verify", "--suite", suite]
        if config.params:
            argv += ["--params", config.params]
        worst = max(worst, cli_main(argv))
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--params", help="M,B,G applied to every suite")
    args = ap.parse_args()
    raise SystemExit(main(VerifyConfig(args.params)))
