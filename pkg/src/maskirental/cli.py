"""Command-line entry point (``skirental``).

Exit codes: 0 success, 1 a verification verdict failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .deterministic import (
    Objective,
    ThresholdKind,
    cr_ind_profile,
    run_deterministic,
    threshold,
    worst_case_cr_det,
)
from .errors import SkiRentalError
from .experiments import figure3, figure3_csv, figure3_json, reproduce_table3
from .instance_io import load_instance
from .model import (
    GroupState,
    Instance,
    ProblemParams,
    ell_star,
    indopt,
    ovopt,
    sdopt,
)
from .randomized import (
    DensityKind,
    density_csv,
    expected_agent_costs,
    monte_carlo,
    policy_density,
    worst_case_cr_rand,
)
from .verification import (
    brute_force_symmetric_dominance,
    solve_homogeneous_lp,
    solve_state_lp,
    verify_two_agent_randomized_symmetry,
    yao_lower_bound,
)

DET_POLICIES = {"det-ov": ThresholdKind.OVERALL, "det-sd": ThresholdKind.STATE_DEPENDENT,
                "det-ind": ThresholdKind.STATE_DEPENDENT, "homog": ThresholdKind.HOMOGENEOUS_FIXED}
RAND_POLICIES = {"rand-ov": DensityKind.P_OV, "rand-sd": DensityKind.P_SD,
                 "rand-ind": DensityKind.Q_IND, "homog": DensityKind.HOMOGENEOUS}
OBJECTIVES = {o.value: o for o in Objective}


class InputError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    params: ProblemParams | None
    instance: Instance | None
    objective: Objective
    policy: str | None
    seed: int
    out: Path | None
    fmt: str


def parse_params(text: str) -> ProblemParams:
    try:
        M, B, G = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"--params expects M,B,G as integers, got {text!r}") from exc
    return ProblemParams(M, B, G)


def parse_days(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"expected comma-separated days, got {text!r}") from exc


def build_config(args) -> ExperimentConfig:
    params = parse_params(args.params) if getattr(args, "params", None) else None
    instance = None
    if getattr(args, "instance", None):
        params, instance = load_instance(args.instance, params)
    seed = getattr(args, "seed", 0)
    if not 0 <= seed < 2**64:
        raise InputError(f"--seed must be an unsigned 64-bit integer, got {seed}")
    return ExperimentConfig(params, instance, OBJECTIVES[getattr(args, "objective", "ov")],
                            getattr(args, "policy", None), seed,
                            Path(args.out) if getattr(args, "out", None) else None,
                            getattr(args, "format", "json"))


def emit(config: ExperimentConfig, text: str) -> None:
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.write_text(text)


def _num(value):
    return float(value) if isinstance(value, Fraction) else value


def _render(config: ExperimentConfig, body: dict, rows: list[dict] | None = None) -> str:
    if config.fmt == "json":
        return json.dumps({"schema": "1", **body}, indent=2, default=_num) + "\n"
    rows = rows if rows is not None else [body]
    keys = list(rows[0])
    lines = [",".join(keys)]
    for row in rows:
        lines.append(",".join(_cell(row[k]) for k in keys))
    return "\n".join(lines) + "\n"


def _cell(value) -> str:
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    if isinstance(value, Fraction):
        return repr(float(value))
    return str(value)


def _need_params(config: ExperimentConfig) -> ProblemParams:
    if config.params is None:
        raise InputError("--params M,B,G or --instance is required")
    return config.params


# -- subcommands -------------------------------------------------------------

def cmd_opt(args) -> int:
    config = build_config(args)
    if config.instance is None:
        raise InputError("opt needs --instance")
    params, instance = config.params, config.instance
    prefixes = [{"ell": ell, "sdopt": sdopt(params, instance, GroupState.of(instance, ell))}
                for ell in range(params.M + 1)]
    body = {"params": list(params.as_tuple()), "days": list(instance.days),
            "ovopt": ovopt(params, instance), "ell_star": ell_star(params, instance),
            "indopt": list(indopt(params, instance)), "sdopt": prefixes}
    emit(config, _render(config, body, prefixes if config.fmt == "csv" else None))
    return 0


def cmd_det(args) -> int:
    config = build_config(args)
    params = _need_params(config)
    policy = config.policy or "det-sd"
    if policy not in DET_POLICIES:
        raise InputError(f"det needs a deterministic --policy, got {policy!r}")
    kind = DET_POLICIES[policy]
    if config.instance is not None:
        ledger = run_deterministic(params, config.instance, kind)
        body = {"policy": policy, "days": list(config.instance.days),
                "agent_costs": list(ledger.per_agent_cost), "total": ledger.total(),
                "purchase_day": ledger.purchase_day(),
                "overall_ratio": ledger.total() / ovopt(params, config.instance)}
        if policy == "det-ind":
            body["individual_ratios"] = list(cr_ind_profile(params, config.instance))
        if args.trace:
            body["trace"] = [{"day": r.day, "agent": r.agent, "action": str(r.action)}
                             for r in ledger.trace]
        emit(config, _render(config, body))
        return 0
    state = GroupState(parse_days(args.state))
    report = worst_case_cr_det(params, kind, config.objective, state,
                               agent=args.agent, transitions=args.transitions)
    body = {"policy": policy, "threshold": threshold(params, state, kind), **report.to_json()}
    emit(config, _render(config, body))
    return 0


def cmd_rand(args) -> int:
    config = build_config(args)
    params = _need_params(config)
    policy = config.policy or "rand-sd"
    if policy not in RAND_POLICIES:
        raise InputError(f"rand needs a randomized --policy, got {policy!r}")
    kind = RAND_POLICIES[policy]
    state = GroupState(parse_days(args.state))
    if args.density:
        emit(config, density_csv([policy_density(params, state, kind)]))
        return 0
    if config.instance is not None:
        costs = expected_agent_costs(params, config.instance, kind)
        body = {"policy": policy, "days": list(config.instance.days),
                "expected_agent_costs": list(costs), "expected_total": sum(costs)}
        if args.runs:
            body["monte_carlo"] = monte_carlo(params, config.instance, kind,
                                              args.runs, config.seed).to_json()
        emit(config, _render(config, body))
        return 0
    report = worst_case_cr_rand(params, kind, config.objective, state,
                                agent=args.agent, transitions=args.transitions)
    emit(config, _render(config, {"policy": policy, **report.to_json()}))
    return 0


def _suite_lp(params: ProblemParams) -> dict:
    checks = []
    if params.G % params.M == 0:
        p, c = solve_homogeneous_lp(params)
        density = policy_density(params, GroupState(), DensityKind.HOMOGENEOUS)
        checks.append({"check": "homogeneous", "c": c,
                       "pass": tuple(p) == tuple(density.mass)})
    for ell in range(params.M):
        state = GroupState(tuple(range(1, ell + 1)))
        for kind in (DensityKind.P_OV, DensityKind.P_SD, DensityKind.Q_IND):
            try:
                p, c = solve_state_lp(params, state, kind)
            except SkiRentalError:
                continue
            density = policy_density(params, state, kind)
            checks.append({"check": f"{kind.value}@ell={ell}", "c": c,
                           "pass": tuple(p) == tuple(density.mass)})
    return {"suite": "lp", "checks": checks, "pass": all(c["pass"] for c in checks)}


def _suite_dominance(params: ProblemParams) -> dict:
    reports = [{"objective": obj.value,
                **brute_force_symmetric_dominance(params, 2 * params.B, obj).to_json()}
               for obj in (Objective.OVERALL, Objective.STATE_DEPENDENT)]
    return {"suite": "dominance", "checks": reports, "pass": all(r["verdict"] for r in reports)}


def _suite_yao(params: ProblemParams) -> dict:
    report = yao_lower_bound(params)
    return {"suite": "yao", **report.to_json(), "pass": abs(report.ratio - 1.5819767068693265) < 1e-4}


def _suite_two_agent(_params) -> dict:
    reports = [verify_two_agent_randomized_symmetry(B, G).to_json()
               for B, G in ((4, 5), (5, 6), (5, 7))]
    return {"suite": "two-agent", "checks": reports,
            "pass": all(r["symmetric_support"] for r in reports)}


SUITES = {"lp": _suite_lp, "dominance": _suite_dominance, "yao": _suite_yao,
          "two-agent": _suite_two_agent}
SUITE_DEFAULTS = {"lp": ProblemParams(10, 10, 60), "dominance": ProblemParams(2, 3, 4),
                  "yao": ProblemParams(10, 10, 60), "two-agent": None}


def cmd_verify(args) -> int:
    config = build_config(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [SUITES[n](config.params or SUITE_DEFAULTS[n]) for n in names]
    failed = [r["suite"] for r in results if not r["pass"]]
    body = {"results": results, "failed": failed, "pass": not failed}
    text = json.dumps({"schema": "1", **body}, indent=2, default=_num) + "\n"
    emit(config, text)
    if failed:
        print(f"verification failed: {', '.join(failed)} (see 'failed' in the report)",
              file=sys.stderr)
        return 1
    return 0


def cmd_table3(args) -> int:
    config = build_config(args)
    table = reproduce_table3(args.convention)
    emit(config, table.to_csv() if config.fmt == "csv" else table.to_json())
    return 0


def cmd_figure3(args) -> int:
    config = build_config(args)
    records = figure3(args.subfigure, args.convention)
    emit(config, figure3_csv(records) if config.fmt == "csv" else figure3_json(records))
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skirental",
                                     description="Multi-agent ski rental with a group pass.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--params", help="M,B,G")
        p.add_argument("--format", choices=("csv", "json"), default=fmt)
        p.add_argument("--out", help="write output here instead of stdout")
        return p

    p = common(sub.add_parser("opt", help="offline benchmarks of an instance"))
    p.add_argument("--instance", required=True, help="JSON or CSV instance file")
    p.set_defaults(func=cmd_opt)

    for name, policies, default, func in (
            ("det", sorted(DET_POLICIES), "det-sd", cmd_det),
            ("rand", sorted(RAND_POLICIES), "rand-sd", cmd_rand)):
        p = common(sub.add_parser(name, help=f"{name} policy: run an instance or search a state"))
        p.add_argument("--instance", help="run the policy on this instance")
        p.add_argument("--policy", choices=policies, default=default)
        p.add_argument("--objective", choices=sorted(OBJECTIVES), default="ov")
        p.add_argument("--state", help="revealed days of the agents that left, e.g. 1,2,3")
        p.add_argument("--agent", type=int, help="agent index for the individual objective")
        p.add_argument("--transitions", action="store_true",
                       help="also score completions that change state before buying")
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
        if name == "det":
            p.add_argument("--trace", action="store_true", help="include the day-by-day trace")
        else:
            p.add_argument("--runs", type=int, default=0, help="Monte Carlo runs (0 = exact only)")
            p.add_argument("--density", action="store_true",
                           help="dump the density at --state as CSV")

    p = common(sub.add_parser("verify", help="run verification suites"))
    p.add_argument("--suite", choices=("lp", "dominance", "yao", "two-agent", "all"),
                   default="all")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("table3", help="reproduce the six-row ratio table"), fmt="csv")
    p.add_argument("--convention", choices=("search", "closed-form"), default="search")
    p.set_defaults(func=cmd_table3)

    p = common(sub.add_parser("figure3", help="ratio series of one subfigure"), fmt="csv")
    p.add_argument("--subfigure", choices=("a", "b", "c"), required=True)
    p.add_argument("--convention", choices=("search", "closed-form"), default="search")
    p.set_defaults(func=cmd_figure3)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SkiRentalError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
