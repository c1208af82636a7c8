"""Reproduction of the reference table and figure series for (M, B, G) = (10, 10, 60)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Callable

from .deterministic import (
    Objective,
    cr_cross_ov_policy_under_sd,
    cr_cross_sd_policy_under_ov,
    cr_ov_closed,
    cr_sd_closed,
)
from .model import GroupState, Instance, ProblemParams
from .randomized import DensityKind, norm_g, state_threshold, worst_case_cr_rand

SCHEMA = "1"
FIGURE_PARAMS = ProblemParams(10, 10, 60)
FIGURE_INSTANCE = Instance(tuple(range(1, 11)))

TABLE_ROWS = (
    "sd_det_sd",   # state-dependent ratio of the state-dependent policy
    "ov_det_sd",   # overall ratio of the state-dependent policy
    "sd_det_ov",
    "ov_det_ov",
    "sd_rand_sd",
    "ov_rand_ov",
)


def round3(value) -> Decimal:
    """Round half to even at three decimals, from the exact value when available."""
    with localcontext() as ctx:
        ctx.prec = 50
        if isinstance(value, Fraction):
            exact = Decimal(value.numerator) / Decimal(value.denominator)
        else:
            exact = Decimal(value)
        return exact.quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN)


def figure_states(params: ProblemParams = FIGURE_PARAMS,
                  instance: Instance = FIGURE_INSTANCE) -> list[GroupState]:
    return [GroupState.of(instance, ell) for ell in range(params.M)]


def _randomized(kind: DensityKind, objective: Objective, convention: str
                ) -> Callable[[ProblemParams, GroupState], float]:
    def value(params: ProblemParams, state: GroupState):
        if convention == "closed-form":
            return norm_g(params, state, state_threshold(params, state, kind))
        return worst_case_cr_rand(params, kind, objective, state).ratio
    return value


def row_functions(convention: str = "search") -> dict[str, Callable]:
    """``convention`` picks how randomized cells are computed: the exact adversary
    search, or the ratio constant evaluated at the real-valued threshold."""
    if convention not in ("search", "closed-form"):
        raise ValueError(f"unknown convention {convention!r}")
    return {
        "sd_det_sd": lambda p, s: cr_sd_closed(p, s, allow_fractional=True),
        "ov_det_sd": lambda p, s: cr_cross_sd_policy_under_ov(p, s, allow_fractional=True),
        "sd_det_ov": lambda p, s: cr_cross_ov_policy_under_sd(p, s, allow_fractional=True),
        "ov_det_ov": lambda p, s: cr_ov_closed(p, s, allow_fractional=True),
        "sd_rand_sd": _randomized(DensityKind.P_SD, Objective.STATE_DEPENDENT, convention),
        "ov_rand_ov": _randomized(DensityKind.P_OV, Objective.OVERALL, convention),
    }


@dataclass(frozen=True)
class Table:
    rows: dict[str, tuple]  # row name -> exact values per ell

    def rounded(self) -> dict[str, tuple[Decimal, ...]]:
        return {name: tuple(round3(v) for v in values) for name, values in self.rows.items()}

    def to_csv(self) -> str:
        width = len(next(iter(self.rows.values())))
        lines = ["row," + ",".join(f"ell{i}" for i in range(width))]
        for name, values in self.rounded().items():
            lines.append(name + "," + ",".join(str(v) for v in values))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        body = {"schema": SCHEMA,
                "rows": {name: [float(v) for v in values] for name, values in self.rounded().items()}}
        return json.dumps(body, indent=2) + "\n"


def reproduce_table3(convention: str = "search", params: ProblemParams = FIGURE_PARAMS,
                     instance: Instance = FIGURE_INSTANCE) -> Table:
    fns = row_functions(convention)
    states = figure_states(params, instance)
    return Table({name: tuple(fns[name](params, s) for s in states) for name in TABLE_ROWS})


def parse_table_csv(text: str) -> dict[str, tuple[Decimal, ...]]:
    lines = [line for line in text.strip().splitlines() if line]
    out = {}
    for line in lines[1:]:
        name, *cells = line.split(",")
        out[name] = tuple(Decimal(c) for c in cells)
    return out


# -- figure series -----------------------------------------------------------

FIGURE_SERIES = {
    "a": (("red", "ov_det_ov"), ("blue", "ov_det_sd")),
    "b": (("blue", "sd_det_sd"), ("red", "sd_det_ov")),
    "c": (("blue", "sd_rand_sd"), ("red", "ov_rand_ov")),
}


def region(params: ProblemParams, state: GroupState) -> str:
    """Which branch of the closed forms applies: A if G <= kB, B if G <= S + kB, else C."""
    k = params.M - state.ell
    if params.G <= k * params.B:
        return "A"
    if params.G <= state.paid_cost() + k * params.B:
        return "B"
    return "C"


def figure3(subfigure: str, convention: str = "search",
            params: ProblemParams = FIGURE_PARAMS,
            instance: Instance = FIGURE_INSTANCE) -> list[dict]:
    if subfigure not in FIGURE_SERIES:
        raise ValueError(f"unknown subfigure {subfigure!r}; choose a, b or c")
    fns = row_functions(convention)
    records = []
    for colour, name in FIGURE_SERIES[subfigure]:
        for state in figure_states(params, instance):
            records.append({"series": name, "colour": colour, "ell": state.ell,
                            "ratio": fns[name](params, state), "region": region(params, state)})
    return records


def figure3_csv(records: list[dict]) -> str:
    lines = ["series,colour,ell,ratio,region"]
    for r in records:
        lines.append(f"{r['series']},{r['colour']},{r['ell']},{float(r['ratio'])!r},{r['region']}")
    return "\n".join(lines) + "\n"


def figure3_json(records: list[dict]) -> str:
    body = {"schema": SCHEMA,
            "points": [dict(r, ratio=float(r["ratio"])) for r in records]}
    return json.dumps(body, indent=2) + "\n"
