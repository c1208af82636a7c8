"""State-aware deterministic threshold policies.

The policy rents for every active agent until the current threshold day and
then buys for everyone still active.  Whenever agents leave, the threshold is
recomputed from the revealed days.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .errors import NonIntegerThreshold, SearchSpaceTooLarge, StateMismatch
from .model import (
    BUY,
    LEAVE,
    RENT,
    Action,
    CostLedger,
    GroupState,
    Instance,
    ProblemParams,
    TraceRecord,
    check_instance,
    ell_star,
    indopt,
    ovopt,
    sdopt,
)

DEFAULT_NODE_BUDGET = 10**7


def node_budget(default: int = DEFAULT_NODE_BUDGET) -> int:
    raw = os.environ.get("SKIRENTAL_NODE_BUDGET")
    return int(raw) if raw else default


class ThresholdKind(enum.Enum):
    OVERALL = "ov"
    STATE_DEPENDENT = "sd"
    HOMOGENEOUS_FIXED = "homog"


class Objective(enum.Enum):
    OVERALL = "ov"
    STATE_DEPENDENT = "sd"
    INDIVIDUAL = "ind"


def threshold_ov(params: ProblemParams, state: GroupState) -> Fraction:
    k = params.M - state.ell
    if k <= 0:
        raise StateMismatch("no active agents left")
    left = params.G - state.paid_cost()
    if left <= 0:
        return Fraction(params.B)
    return min(Fraction(left, k), Fraction(params.B))


def threshold_sd(params: ProblemParams, state: GroupState) -> Fraction:
    k = params.M - state.ell
    if k <= 0:
        raise StateMismatch("no active agents left")
    return min(Fraction(params.G, k), Fraction(params.B))


def homogeneous_threshold(params: ProblemParams) -> int:
    return math.ceil(Fraction(params.G, params.M))


def threshold(params: ProblemParams, state: GroupState, kind: ThresholdKind) -> Fraction:
    if kind is ThresholdKind.OVERALL:
        return threshold_ov(params, state)
    if kind is ThresholdKind.STATE_DEPENDENT:
        return threshold_sd(params, state)
    return Fraction(homogeneous_threshold(params))


def buys_group(params: ProblemParams, active: int) -> bool:
    """Cheaper pass for ``active`` agents; ties go to individual passes."""
    return params.G < active * params.B


def purchase_actions(params: ProblemParams, active: int) -> Action:
    return Action.group(active) if buys_group(params, active) else BUY


def buy_day(params: ProblemParams, state: GroupState, kind: ThresholdKind) -> int:
    # a threshold at or before N_l can only come from an unreachable state;
    # buying on the next day keeps the run well defined
    return max(math.ceil(threshold(params, state, kind)), state.last_day + 1)


def _simulate(params: ProblemParams, days: tuple[int, ...],
              buy_day_of: Callable[[GroupState], int], trace: bool) -> CostLedger:
    M = params.M
    costs = [Fraction(0)] * M
    records: list[TraceRecord] = []
    revealed: list[int] = []
    ell = 0
    target = buy_day_of(GroupState(()))
    horizon = days[-1]
    bought_on = None
    for t in range(1, horizon + 1):
        active = [m for m in range(ell, M)]
        if bought_on is None and t == target:
            action = purchase_actions(params, len(active))
            share = action.cost(params)
            for m in active:
                costs[m] += share
                if trace:
                    records.append(TraceRecord(t, m + 1, action))
            bought_on = t
        elif bought_on is None:
            for m in active:
                costs[m] += 1
                if trace:
                    records.append(TraceRecord(t, m + 1, RENT))
        elif trace:
            for m in active:
                records.append(TraceRecord(t, m + 1, LEAVE))
        leaving = [m for m in active if days[m] == t]
        if leaving:
            ell += len(leaving)
            revealed.extend(days[m] for m in leaving)
            if bought_on is None and ell < M:
                target = buy_day_of(GroupState(tuple(revealed)))
        if ell == M:
            break
    return CostLedger(tuple(costs), tuple(records))


def run_deterministic(params: ProblemParams, instance: Instance, kind: ThresholdKind,
                      trace: bool = True) -> CostLedger:
    """Day-by-day run of the threshold policy of ``kind`` on ``instance``."""
    check_instance(params, instance)
    return _simulate(params, instance.days, lambda s: buy_day(params, s, kind), trace)


def run_fixed_threshold(params: ProblemParams, instance: Instance, day: int,
                        trace: bool = True) -> CostLedger:
    """Same engine with one threshold day that never changes."""
    check_instance(params, instance)
    return _simulate(params, instance.days, lambda s: max(day, s.last_day + 1), trace)


# -- closed forms ------------------------------------------------------------

def _require_integer(T: Fraction, allow_fractional: bool) -> None:
    if not allow_fractional and T.denominator != 1:
        raise NonIntegerThreshold(f"threshold {T} is not an integer; use worst_case_cr_det")


def cr_ov_closed(params: ProblemParams, state: GroupState,
                 allow_fractional: bool = False) -> Fraction:
    """Overall ratio of the overall-optimal policy at ``state``.

    With ``allow_fractional`` the formula is evaluated at the real-valued
    threshold, which is how the reference table reports fractional states.
    """
    _require_integer(threshold_ov(params, state), allow_fractional)
    M, B, G = params.as_tuple()
    k = M - state.ell
    S = state.paid_cost()
    if G <= k * B:
        return 2 - Fraction(k, G)
    if G <= S + k * B:
        return 1 + Fraction(k * (B - 1), G)
    return 1 + Fraction(k * (B - 1), S + k * B)


def cr_sd_closed(params: ProblemParams, state: GroupState,
                 allow_fractional: bool = False) -> Fraction:
    _require_integer(threshold_sd(params, state), allow_fractional)
    M, B, G = params.as_tuple()
    k = M - state.ell
    S = state.paid_cost()
    if G <= k * B:
        return 1 + Fraction(G - k, S + G)
    return 1 + Fraction(k * (B - 1), S + k * B)


def cr_cross_sd_policy_under_ov(params: ProblemParams, state: GroupState,
                                allow_fractional: bool = False) -> Fraction:
    """Overall ratio of the state-dependent policy."""
    _require_integer(threshold_sd(params, state), allow_fractional)
    M, B, G = params.as_tuple()
    k = M - state.ell
    S = state.paid_cost()
    if G <= k * B:
        return 2 + Fraction(S - k, G)
    if G <= S + k * B:
        return Fraction(S + k * (2 * B - 1), G)
    return 1 + Fraction(k * (B - 1), S + k * B)


def cr_cross_ov_policy_under_sd(params: ProblemParams, state: GroupState,
                                allow_fractional: bool = False) -> Fraction:
    """State-dependent ratio of the overall policy (coincides with its overall ratio)."""
    T = threshold_ov(params, state)
    _require_integer(T, allow_fractional)
    return symmetric_witness_ratio(params, state, T, Objective.STATE_DEPENDENT)


def symmetric_witness_ratio(params: ProblemParams, state: GroupState, T: Fraction,
                            objective: Objective) -> Fraction:
    """Ratio when every remaining agent stays exactly ``T`` days (real-valued ``T``).

    This is the adversary's best reply to a symmetric threshold; the closed
    forms above are its simplifications.
    """
    M, B, G = params.as_tuple()
    k = M - state.ell
    S = state.paid_cost()
    T = Fraction(T)
    cost = S + k * (T - 1) + min(G, k * B)
    if objective is Objective.OVERALL:
        bench = min(Fraction(G), S + k * min(T, Fraction(B)))
    elif objective is Objective.STATE_DEPENDENT:
        bench = S + min(Fraction(G), k * min(T, Fraction(B)))
    else:
        raise ValueError("symmetric witness ratio is defined for group objectives only")
    return cost / bench


def cr_ind_closed(params: ProblemParams, instance: Instance, m: int) -> Fraction:
    """Individual ratio of agent ``m`` (1-based) under the state-dependent threshold."""
    ls = ell_star(params, instance)
    if not 1 <= m <= params.M:
        raise ValueError(f"agent index {m} outside 1..{params.M}")
    if m <= ls:
        return Fraction(1)
    return 2 - 1 / threshold_sd(params, GroupState.of(instance, ls))


# -- adversary search --------------------------------------------------------

@dataclass(frozen=True)
class CrReport:
    objective: Objective
    state: GroupState
    ratio: Fraction
    witness: Instance
    agent: int | None = None
    evaluated: int = 0

    def to_json(self) -> dict:
        return {
            "objective": self.objective.value if self.agent is None
            else f"{self.objective.value}:{self.agent}",
            "ell": self.state.ell,
            "revealed": list(self.state.revealed),
            "ratio": float(self.ratio),
            "witness": list(self.witness.days),
        }


def check_reachable(params: ProblemParams, state: GroupState,
                    buy_day_of: Callable[[GroupState], int]) -> None:
    """Every revealed agent must have left before the policy bought."""
    for n in range(state.ell):
        prefix = GroupState(state.revealed[:n])
        if state.revealed[n] == prefix.last_day and n:
            continue
        if state.revealed[n] >= buy_day_of(prefix):
            raise StateMismatch(
                f"state {state.revealed} is unreachable: the policy buys on day "
                f"{buy_day_of(prefix)} before agent {n + 1} leaves on day {state.revealed[n]}")


def completions(state: GroupState, remaining: int, day_cap: int,
                product: bool) -> Iterator[tuple[int, ...]]:
    """Symmetric completions first, then (optionally) every sorted completion."""
    lo = state.last_day + 1
    for n in range(lo, day_cap + 1):
        yield (n,) * remaining
    if product and remaining > 1:
        for combo in itertools.combinations_with_replacement(range(lo, day_cap + 1), remaining):
            if combo[0] != combo[-1]:
                yield combo


def count_completions(state: GroupState, remaining: int, day_cap: int, product: bool) -> int:
    width = max(day_cap - state.last_day, 0)
    if not product or remaining <= 1:
        return width
    return math.comb(width + remaining - 1, remaining)


def benchmark_ratio(params: ProblemParams, instance: Instance, state: GroupState,
                    ledger: CostLedger, objective: Objective, agent: int | None) -> Fraction:
    if objective is Objective.OVERALL:
        return ledger.total() / ovopt(params, instance)
    if objective is Objective.STATE_DEPENDENT:
        return ledger.total() / sdopt(params, instance, state)
    return ledger.per_agent_cost[agent - 1] / indopt(params, instance)[agent - 1]


def worst_case_cr_det(params: ProblemParams, kind: ThresholdKind, objective: Objective,
                      state: GroupState = GroupState(), day_cap: int | None = None, *,
                      agent: int | None = None, transitions: bool = False,
                      max_product_agents: int = 4, budget: int | None = None) -> CrReport:
    """Maximise cost / benchmark over completions of ``state``.

    By default only completions that keep the policy in ``state`` until it buys
    are scored (all remaining agents leaving together also counts); those are
    the instances the per-state ratio describes.  ``transitions=True`` scores
    every completion, including ones that move the policy to later states.
    """
    if objective is Objective.INDIVIDUAL and agent is None:
        raise ValueError("individual objective needs an agent index")
    B = params.B
    if day_cap is None:
        day_cap = 2 * B + state.last_day
    if day_cap < B:
        raise ValueError(f"day_cap={day_cap} must be >= B={B}")
    k = params.M - state.ell
    if k <= 0:
        raise StateMismatch("state has no active agents left")
    buy_day_of = lambda s: buy_day(params, s, kind)  # noqa: E731
    check_reachable(params, state, buy_day_of)
    product = k <= max_product_agents
    budget = node_budget() if budget is None else budget
    total = count_completions(state, k, day_cap, product)
    if total > budget:
        raise SearchSpaceTooLarge(f"{total} completions exceed node budget {budget}")
    first_buy = buy_day_of(state)
    best = None
    witness = None
    evaluated = 0
    for combo in completions(state, k, day_cap, product):
        if not transitions and combo[0] < first_buy and combo[0] != combo[-1]:
            continue
        instance = Instance(state.revealed + combo)
        ledger = _simulate(params, instance.days, buy_day_of, trace=False)
        ratio = benchmark_ratio(params, instance, state, ledger, objective, agent)
        evaluated += 1
        if best is None or ratio > best:
            best, witness = ratio, instance
    return CrReport(objective, state, best, witness, agent, evaluated)


def cr_ind_profile(params: ProblemParams, instance: Instance, day_cap: int | None = None
                   ) -> tuple[Fraction, ...]:
    """Per-agent worst-case individual ratios, searched at the instance's ell* state."""
    ls = ell_star(params, instance)
    if ls == params.M:
        return (Fraction(1),) * params.M
    state = GroupState.of(instance, ls)
    return tuple(
        worst_case_cr_det(params, ThresholdKind.STATE_DEPENDENT, Objective.INDIVIDUAL,
                          state, day_cap, agent=m).ratio
        for m in range(1, params.M + 1))
