"""Randomized threshold policies.

At every state the policy draws a threshold day from a density supported on
``{N_l + 1, ..., ceil(T)}``; when some agents leave before that day it redraws
from the density of the new state.  Masses are exact fractions when the state
threshold is an integer and floats otherwise.
"""

from __future__ import annotations

import bisect
import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

from .deterministic import (
    CrReport,
    Objective,
    buys_group,
    completions,
    count_completions,
    node_budget,
    run_fixed_threshold,
    threshold_ov,
    threshold_sd,
)
from .errors import DegenerateThreshold, NegativeMass, SearchSpaceTooLarge, StateMismatch
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
    indopt,
    ovopt,
    sdopt,
)

Number = Union[Fraction, float]

NORMALIZATION_TOL = 1e-9


class DensityKind(enum.Enum):
    P_OV = "rand-ov"
    P_SD = "rand-sd"
    Q_IND = "rand-ind"
    HOMOGENEOUS = "homog"


@dataclass(frozen=True)
class ThresholdDensity:
    """Probability of buying on each support day.

    ``deficit`` is ``1 - sum`` of the raw formula masses; it is nonzero only
    when the masses had to be renormalized.
    """

    support: tuple[int, ...]
    mass: tuple[Number, ...]
    kind: DensityKind
    ell: int
    T: Number
    deficit: Number = 0

    def total(self) -> Number:
        return _sum(self.mass)

    def probabilities(self) -> np.ndarray:
        p = np.array([float(m) for m in self.mass])
        return p / p.sum()

    @functools.cached_property
    def cdf(self) -> tuple[float, ...]:
        acc = np.cumsum(self.probabilities())
        return tuple(float(v) for v in acc[:-1]) + (1.0,)

    def csv_rows(self) -> list[tuple]:
        return [(day, float(m), self.kind.value, self.ell, float(self.T))
                for day, m in zip(self.support, self.mass)]


@dataclass(frozen=True)
class RatioConstants:
    g: Number
    h: Number


def _sum(values) -> Number:
    values = list(values)
    if all(isinstance(v, (Fraction, int)) for v in values):
        return sum(values, Fraction(0))
    return math.fsum(float(v) for v in values)


def _is_integer(T: Number) -> bool:
    return isinstance(T, Fraction) and T.denominator == 1


def _decay(T: Number, exponent: Number) -> Number:
    """(1 - 1/T) ** exponent, exact when both are integers."""
    if _is_integer(T) and Fraction(exponent).denominator == 1:
        return (1 - 1 / T) ** int(exponent)
    return (1.0 - 1.0 / float(T)) ** float(exponent)


def _as_number(T) -> Number:
    if isinstance(T, float):
        return T
    return Fraction(T)


def _check_threshold(T: Number) -> None:
    if T <= 1:
        raise DegenerateThreshold(f"threshold {T} <= 1: the policy buys on the first day")


def _state_terms(params: ProblemParams, state: GroupState):
    k = params.M - state.ell
    if k <= 0:
        raise StateMismatch("state has no active agents left")
    return k, state.paid_cost(), state.last_day


def norm_g(params: ProblemParams, state: GroupState, T) -> Number:
    """Ratio constant of the group densities at threshold ``T``."""
    T = _as_number(T)
    _check_threshold(T)
    k, S, last = _state_terms(params, state)
    weight = k * (T - 1) / (S + k * (last + T))
    return 1 / (1 - weight * _decay(T, T - last - 1))


def norm_h(state: GroupState, T) -> Number:
    """Ratio constant of the per-agent density at threshold ``T``."""
    T = _as_number(T)
    _check_threshold(T)
    last = state.last_day
    head = (T * T + last) / (T * (T + last))
    return 1 / (head - (T - 1) / (T + last) * _decay(T, T - last - 1))


def ratio_constants(params: ProblemParams, state: GroupState, T) -> RatioConstants:
    return RatioConstants(norm_g(params, state, T), norm_h(state, T))


def _support(state: GroupState, T: Number) -> tuple[int, ...]:
    last = state.last_day
    if T <= last:
        raise DegenerateThreshold(f"threshold {T} <= N_l = {last}: empty support")
    return tuple(range(last + 1, math.ceil(T) + 1))


def _finish(support, raw: list[Number], kind: DensityKind, state: GroupState,
            T: Number) -> ThresholdDensity:
    total = _sum(raw)
    deficit = 1 - total
    if abs(float(deficit)) > NORMALIZATION_TOL:
        raw = [m / total for m in raw]
    return ThresholdDensity(tuple(support), tuple(raw), kind, state.ell, T, deficit)


def density_p(params: ProblemParams, state: GroupState, T,
              kind: DensityKind = DensityKind.P_SD) -> ThresholdDensity:
    T = _as_number(T)
    _check_threshold(T)
    support = _support(state, T)
    k, S, last = _state_terms(params, state)
    g = norm_g(params, state, T)
    first = (S + k * (last + 1)) * g / (S + k * (last + T)) * _decay(T, T - last - 1)
    rest = [g / T * _decay(T, T - t) for t in support[1:]]
    return _finish(support, [first] + rest, kind, state, T)


def density_q(params: ProblemParams, state: GroupState, T) -> ThresholdDensity:
    T = _as_number(T)
    _check_threshold(T)
    support = _support(state, T)
    last = state.last_day
    h = norm_h(state, T)
    lead = (last + 1) * (T - 1) / (last + T) * _decay(T, T - last - 2)
    first = h / T * (lead - last * (T - 1) / (last + T))
    if first < 0:
        raise NegativeMass(f"first mass {float(first):.6g} < 0 at N_l={last}, T={T}")
    rest = [h / T * _decay(T, T - t) for t in support[1:]]
    return _finish(support, [first] + rest, DensityKind.Q_IND, state, T)


def norm_h_lp(state: GroupState, T) -> Number:
    """Per-agent ratio constant that actually solves the per-agent LP.

    Agrees with :func:`norm_h` when no agent has left (``N_l = 0``) and is
    smaller otherwise.
    """
    T = _as_number(T)
    _check_threshold(T)
    last = state.last_day
    return (T + last) / (last + T - (T - 1) * _decay(T, T - last - 1))


def density_q_lp(params: ProblemParams, state: GroupState, T) -> ThresholdDensity:
    """Per-agent density from the tight per-agent LP; nonnegative for every state."""
    T = _as_number(T)
    _check_threshold(T)
    support = _support(state, T)
    last = state.last_day
    c = norm_h_lp(state, T)
    first = (last + 1) * (c - 1) / (T - 1)
    rest = [c / T * _decay(T, T - t) for t in support[1:]]
    return _finish(support, [first] + rest, DensityKind.Q_IND, state, T)


def homogeneous_density(params: ProblemParams) -> ThresholdDensity:
    ratio = Fraction(params.G, params.M)
    support = tuple(range(1, math.ceil(ratio) + 1))
    step = 1 / ratio
    raw = [step * _decay(ratio, ratio - t) for t in support]
    return _finish(support, raw, DensityKind.HOMOGENEOUS, GroupState(), ratio)


def state_threshold(params: ProblemParams, state: GroupState, kind: DensityKind) -> Fraction:
    if kind is DensityKind.P_OV:
        return threshold_ov(params, state)
    if kind is DensityKind.HOMOGENEOUS:
        return Fraction(params.G, params.M)
    return threshold_sd(params, state)


@functools.lru_cache(maxsize=65536)
def policy_density(params: ProblemParams, state: GroupState,
                   kind: DensityKind) -> ThresholdDensity:
    """Density the policy of ``kind`` samples from at ``state``.

    Thresholds at or below ``max(1, N_l)`` buy on the next day for sure.  The
    per-agent policy samples :func:`density_q_lp`, since the closed form of
    :func:`density_q` goes negative once some agents have left.
    """
    if kind is DensityKind.HOMOGENEOUS:
        return homogeneous_density(params)
    T = state_threshold(params, state, kind)
    if T <= 1 or T <= state.last_day:
        return ThresholdDensity((state.last_day + 1,), (Fraction(1),), kind, state.ell, T)
    if kind is DensityKind.Q_IND:
        return density_q_lp(params, state, T)
    return density_p(params, state, T, kind)


# -- sampling and simulation -------------------------------------------------

def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_threshold(density: ThresholdDensity, rng) -> int:
    rng = make_rng(rng)
    if len(density.support) == 1:
        return density.support[0]
    idx = bisect.bisect_right(density.cdf, rng.random())
    return density.support[min(idx, len(density.support) - 1)]


def _purchase(params: ProblemParams, active: int) -> Action:
    return Action.group(active) if buys_group(params, active) else BUY


def run_randomized(params: ProblemParams, instance: Instance, kind: DensityKind,
                   rng_seed=0, trace: bool = True) -> CostLedger:
    """One run of the resampling policy; the homogeneous policy never resamples."""
    check_instance(params, instance)
    rng = make_rng(rng_seed)
    days = instance.days
    M = params.M
    costs = [Fraction(0)] * M
    records: list[TraceRecord] = []
    ell = 0
    now = 0
    tau = sample_threshold(policy_density(params, GroupState(), kind), rng)
    while ell < M:
        d = days[ell]
        if tau <= d:
            action = _purchase(params, M - ell)
            share = action.cost(params)
            for m in range(ell, M):
                costs[m] += (tau - 1 - now) + share
            if trace:
                _rent_records(records, now + 1, tau - 1, ell, M)
                records.extend(TraceRecord(tau, m + 1, action) for m in range(ell, M))
                for t in range(tau + 1, days[-1] + 1):
                    records.extend(TraceRecord(t, m + 1, LEAVE)
                                   for m in range(ell, M) if days[m] >= t)
            break
        for m in range(ell, M):
            costs[m] += d - now
        if trace:
            _rent_records(records, now + 1, d, ell, M)
        now = d
        while ell < M and days[ell] == d:
            ell += 1
        if ell < M and kind is not DensityKind.HOMOGENEOUS:
            tau = sample_threshold(policy_density(params, GroupState(days[:ell]), kind), rng)
    return CostLedger(tuple(costs), tuple(records))


def _sample_total(params: ProblemParams, days: tuple[int, ...], kind: DensityKind,
                  rng: np.random.Generator) -> float:
    """Total cost of one run in floats; same draws as :func:`run_randomized`."""
    M = params.M
    ell = 0
    now = 0
    total = 0.0
    tau = sample_threshold(policy_density(params, GroupState(), kind), rng)
    while ell < M:
        d = days[ell]
        active = M - ell
        if tau <= d:
            # the cheaper pass costs min(G, active * B) in total
            return total + active * (tau - 1 - now) + min(params.G, active * params.B)
        total += active * (d - now)
        now = d
        while ell < M and days[ell] == d:
            ell += 1
        if ell < M and kind is not DensityKind.HOMOGENEOUS:
            tau = sample_threshold(policy_density(params, GroupState(days[:ell]), kind), rng)
    return total


def _rent_records(records, first: int, last: int, ell: int, M: int) -> None:
    for t in range(first, last + 1):
        records.extend(TraceRecord(t, m + 1, RENT) for m in range(ell, M))


# -- exact expectation -------------------------------------------------------

@functools.lru_cache(maxsize=1 << 18)
def _future_costs(params: ProblemParams, kind: DensityKind, revealed: tuple[int, ...],
                  suffix: tuple[int, ...]) -> tuple[Number, ...]:
    """Expected cost of each remaining agent from day ``N_l + 1`` on."""
    state = GroupState(revealed)
    density = policy_density(params, state, kind)
    last = state.last_day
    k = len(suffix)
    d = suffix[0]
    share = _purchase(params, k).cost(params)
    buy_part: list[Number] = []
    stay = []
    for tau, w in zip(density.support, density.mass):
        if tau <= d:
            buy_part.append(w * ((tau - 1 - last) + share))
        else:
            stay.append(w)
    now_buy = _sum(buy_part) if buy_part else Fraction(0)
    p_stay = _sum(stay) if stay else Fraction(0)
    out = [now_buy] * k
    if p_stay:
        leave = sum(1 for n in suffix if n == d)
        rest = suffix[leave:]
        later = (_future_costs(params, kind, revealed + suffix[:leave], rest)
                 if rest else ())
        for i in range(k):
            tail = later[i - leave] if i >= leave else 0
            out[i] = out[i] + p_stay * ((d - last) + tail)
    return tuple(out)


def expected_agent_costs(params: ProblemParams, instance: Instance, kind: DensityKind,
                         state: GroupState = GroupState()) -> tuple[Number, ...]:
    """Expected cost of every agent, conditioned on the policy being in ``state``.

    Agents already revealed in ``state`` paid rent for each of their days; the
    rest paid ``N_l`` days of rent before the state was entered.
    """
    check_instance(params, instance)
    if not state.is_prefix_of(instance):
        raise StateMismatch(f"revealed days {state.revealed} are not a prefix of {instance.days}")
    if kind is DensityKind.HOMOGENEOUS:
        if state.ell:
            raise StateMismatch("the homogeneous policy has no state-conditioned density")
        density = homogeneous_density(params)
        per_day = [run_fixed_threshold(params, instance, t, trace=False).per_agent_cost
                   for t in density.support]
        return tuple(_sum(w * c[m] for w, c in zip(density.mass, per_day))
                     for m in range(params.M))
    paid = tuple(Fraction(n) for n in state.revealed)
    if state.ell == params.M:
        return paid
    future = _future_costs(params, kind, state.revealed, instance.days[state.ell:])
    return paid + tuple(state.last_day + c for c in future)


def expected_cost_exact(params: ProblemParams, instance: Instance, kind: DensityKind,
                        state: GroupState = GroupState()) -> Number:
    return _sum(expected_agent_costs(params, instance, kind, state))


# -- adversary search --------------------------------------------------------

def default_day_cap(params: ProblemParams, state: GroupState) -> int:
    return state.last_day + 2 * params.B


def ratio_profile(params: ProblemParams, kind: DensityKind, objective: Objective,
                  state: GroupState = GroupState(), day_cap: int | None = None, *,
                  agent: int | None = None, transitions: bool = False,
                  max_product_agents: int = 4, budget: int | None = None
                  ) -> Iterator[tuple[Instance, int | None, Number]]:
    """Yield ``(instance, agent, expected cost / benchmark)`` over completions of ``state``.

    Without ``transitions`` only completions where all remaining agents leave
    together are scored; otherwise every sorted completion is (for at most
    ``max_product_agents`` remaining agents).
    """
    k = params.M - state.ell
    if k <= 0:
        raise StateMismatch("state has no active agents left")
    if day_cap is None:
        day_cap = default_day_cap(params, state)
    ceil_T = math.ceil(state_threshold(params, state, kind))
    if day_cap < ceil_T + 1:
        raise ValueError(f"day_cap={day_cap} must be >= ceil(T)+1 = {ceil_T + 1}")
    product = transitions and k <= max_product_agents
    budget = node_budget() if budget is None else budget
    total = count_completions(state, k, day_cap, product)
    if total > budget:
        raise SearchSpaceTooLarge(f"{total} completions exceed node budget {budget}")
    agents = [agent] if agent is not None else list(range(state.ell + 1, params.M + 1))
    for combo in completions(state, k, day_cap, product):
        instance = Instance(state.revealed + combo)
        if objective is Objective.INDIVIDUAL:
            costs = expected_agent_costs(params, instance, kind, state)
            bench = indopt(params, instance)
            for m in agents:
                yield instance, m, costs[m - 1] / bench[m - 1]
            continue
        cost = expected_cost_exact(params, instance, kind, state)
        if objective is Objective.OVERALL:
            yield instance, None, cost / ovopt(params, instance)
        else:
            yield instance, None, cost / sdopt(params, instance, state)


def worst_case_cr_rand(params: ProblemParams, kind: DensityKind, objective: Objective,
                       state: GroupState = GroupState(), day_cap: int | None = None,
                       **search) -> CrReport:
    best = None
    witness = None
    best_agent = None
    evaluated = 0
    for instance, m, ratio in ratio_profile(params, kind, objective, state, day_cap, **search):
        evaluated += 1
        if best is None or ratio > best:
            best, witness, best_agent = ratio, instance, m
    return CrReport(objective, state, best, witness, best_agent, evaluated)


# -- Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloReport:
    n: int
    mean: float
    stderr: float
    exact: float
    z_score: float

    def to_json(self) -> dict:
        return {"n": self.n, "mean": self.mean, "stderr": self.stderr,
                "exact": self.exact, "z_score": self.z_score}


def monte_carlo(params: ProblemParams, instance: Instance, kind: DensityKind,
                n: int, seed: int) -> MonteCarloReport:
    """Run ``n`` independent runs; run ``i`` uses the stream seeded with ``seed + i``."""
    if n < 2:
        raise ValueError("need at least two runs for a standard error")
    check_instance(params, instance)
    samples = np.fromiter(
        (_sample_total(params, instance.days, kind, np.random.default_rng(seed + i))
         for i in range(n)),
        dtype=float, count=n)
    mean = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(n))
    exact = float(expected_cost_exact(params, instance, kind))
    z = (mean - exact) / stderr if stderr > 0 else (0.0 if mean == exact else math.inf)
    return MonteCarloReport(n, mean, stderr, exact, z)


def density_csv(densities: Sequence[ThresholdDensity]) -> str:
    lines = ["day,mass,kind,ell,T"]
    for density in densities:
        for day, mass, kind, ell, T in density.csv_rows():
            lines.append(f"{day},{mass!r},{kind},{ell},{T!r}")
    return "\n".join(lines) + "\n"
