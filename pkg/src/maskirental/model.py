"""Problem definition, offline benchmarks and the offline Nash check.

All costs are kept as :class:`fractions.Fraction` so that shares such as
``G / L`` and ``G / (M - l)`` stay exact; convert with ``float`` at the edges.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInstance, InvalidParams, StateMismatch


@dataclass(frozen=True)
class ProblemParams:
    """Number of agents ``M``, individual pass ``B`` and group pass ``G``.

    ``relaxed=True`` skips the ``B < G < M*B`` check; it exists for the
    single-agent embedding used in tests and should not be used otherwise.
    """

    M: int
    B: int
    G: int
    relaxed: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        for name in ("M", "B", "G"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidParams(f"{name} must be an integer, got {value!r}")
        if self.M < 1:
            raise InvalidParams(f"M must be >= 1, got {self.M}")
        if self.B < 1:
            raise InvalidParams(f"B must be >= 1, got {self.B}")
        if self.G < 1:
            raise InvalidParams(f"G must be >= 1, got {self.G}")
        if self.relaxed:
            return
        if self.G <= self.B:
            raise InvalidParams(
                f"G <= B ({self.G} <= {self.B}): the group pass is never useful")
        if self.G >= self.M * self.B:
            raise InvalidParams(
                f"G >= M*B ({self.G} >= {self.M * self.B}): individual passes always cheaper")

    @classmethod
    def relax(cls, M: int, B: int, G: int) -> "ProblemParams":
        return cls(M, B, G, relaxed=True)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.M, self.B, self.G)


def validate_params(M: int, B: int, G: int) -> ProblemParams:
    return ProblemParams(M, B, G)


@dataclass(frozen=True)
class Instance:
    """Active-day counts, sorted ascending (agent 1 leaves first)."""

    days: tuple[int, ...]

    def __post_init__(self):
        days = tuple(self.days)
        object.__setattr__(self, "days", days)
        if not days:
            raise InvalidInstance("instance has no agents")
        for i, n in enumerate(days):
            if isinstance(n, bool) or not isinstance(n, int):
                raise InvalidInstance(f"agent {i + 1}: active days must be an integer, got {n!r}")
            if n < 1:
                raise InvalidInstance(f"agent {i + 1}: active days must be >= 1, got {n}")
        for i in range(1, len(days)):
            if days[i] < days[i - 1]:
                raise InvalidInstance(
                    f"agent {i + 1}: days not sorted ascending ({days[i - 1]} > {days[i]})")

    @classmethod
    def sorted_from(cls, days: Iterable[int]) -> "Instance":
        return cls(tuple(sorted(days)))

    def __len__(self):
        return len(self.days)

    def __iter__(self):
        return iter(self.days)

    def __getitem__(self, i):
        return self.days[i]


@dataclass(frozen=True)
class GroupState:
    """Revealed active days of the ``ell`` agents that already left."""

    revealed: tuple[int, ...] = ()

    def __post_init__(self):
        revealed = tuple(self.revealed)
        object.__setattr__(self, "revealed", revealed)
        for i, n in enumerate(revealed):
            if n < 1:
                raise StateMismatch(f"revealed day {i + 1} must be >= 1, got {n}")
            if i and n < revealed[i - 1]:
                raise StateMismatch("revealed days must be nondecreasing")

    @property
    def ell(self) -> int:
        return len(self.revealed)

    @property
    def last_day(self) -> int:
        """N_ell, with the convention N_0 = 0."""
        return self.revealed[-1] if self.revealed else 0

    def paid_cost(self) -> int:
        return sum(self.revealed)

    @classmethod
    def of(cls, instance: Instance, ell: int) -> "GroupState":
        if not 0 <= ell <= len(instance):
            raise StateMismatch(f"ell={ell} outside [0, {len(instance)}]")
        return cls(instance.days[:ell])

    def is_prefix_of(self, instance: Instance) -> bool:
        return instance.days[: self.ell] == self.revealed

    def remaining(self, params: ProblemParams) -> int:
        return params.M - self.ell


class ActionKind(enum.Enum):
    RENT = "rent"
    BUY = "buy"
    GROUP = "group"
    LEAVE = "leave"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    participants: int = 0

    def __post_init__(self):
        if self.kind is ActionKind.GROUP and self.participants < 1:
            raise ValueError("a group purchase needs at least one participant")

    @classmethod
    def group(cls, participants: int) -> "Action":
        return cls(ActionKind.GROUP, participants)

    def cost(self, params: ProblemParams) -> Fraction:
        if self.kind is ActionKind.RENT:
            return Fraction(1)
        if self.kind is ActionKind.BUY:
            return Fraction(params.B)
        if self.kind is ActionKind.GROUP:
            return Fraction(params.G, self.participants)
        return Fraction(0)

    def __str__(self):
        if self.kind is ActionKind.GROUP:
            return f"group({self.participants})"
        return self.kind.value


RENT = Action(ActionKind.RENT)
BUY = Action(ActionKind.BUY)
LEAVE = Action(ActionKind.LEAVE)


@dataclass(frozen=True)
class TraceRecord:
    day: int
    agent: int  # 1-based, ascending active days
    action: Action


@dataclass(frozen=True)
class CostLedger:
    per_agent_cost: tuple[Fraction, ...]
    trace: tuple[TraceRecord, ...] = ()

    def total(self) -> Fraction:
        return sum(self.per_agent_cost, Fraction(0))

    def trace_total(self, params: ProblemParams) -> Fraction:
        return sum((r.action.cost(params) for r in self.trace), Fraction(0))

    def actions_of(self, agent: int) -> list[TraceRecord]:
        return [r for r in self.trace if r.agent == agent]

    def purchase_day(self) -> int | None:
        for r in self.trace:
            if r.action.kind in (ActionKind.BUY, ActionKind.GROUP):
                return r.day
        return None


def check_instance(params: ProblemParams, instance: Instance) -> None:
    if len(instance) != params.M:
        raise InvalidInstance(f"instance has {len(instance)} agents, params say M={params.M}")


def ovopt(params: ProblemParams, instance: Instance) -> Fraction:
    """Offline optimum for the whole group: one group pass, or each agent alone."""
    check_instance(params, instance)
    alone = sum(min(params.B, n) for n in instance)
    return Fraction(min(params.G, alone))


def sdopt(params: ProblemParams, instance: Instance, state: GroupState) -> Fraction:
    """Offline optimum conditioned on the first ``ell`` agents having rented throughout."""
    check_instance(params, instance)
    if not state.is_prefix_of(instance):
        raise StateMismatch(
            f"revealed days {state.revealed} are not a prefix of {instance.days}")
    rest = sum(min(n, params.B) for n in instance.days[state.ell:])
    return Fraction(state.paid_cost() + min(params.G, rest))


def ell_star(params: ProblemParams, instance: Instance) -> int:
    """Number of agents that rent in the offline equilibrium (``M`` if all rent)."""
    check_instance(params, instance)
    M = params.M
    for ell in range(M):
        if instance[ell] > min(Fraction(params.G, M - ell), params.B):
            return ell
    return M


def individual_share(params: ProblemParams, ell: int) -> Fraction:
    """Per-agent pass cost min{G/(M-ell), B} for the M-ell remaining agents."""
    return min(Fraction(params.G, params.M - ell), Fraction(params.B))


def indopt(params: ProblemParams, instance: Instance) -> tuple[Fraction, ...]:
    ls = ell_star(params, instance)
    if ls == params.M:
        return tuple(Fraction(n) for n in instance)
    cap = individual_share(params, ls)
    return tuple(Fraction(n) if n <= cap else cap for n in instance)


# -- offline Nash check ------------------------------------------------------

OFFLINE_CHOICES = ("rent", "buy", "group")


def offline_profile(params: ProblemParams, instance: Instance) -> tuple[str, ...]:
    """Strategy profile behind ``indopt``: the first ell* rent, the rest buy together."""
    ls = ell_star(params, instance)
    if ls == params.M:
        return ("rent",) * params.M
    buyers = params.M - ls
    pass_choice = "group" if Fraction(params.G, buyers) <= params.B else "buy"
    return ("rent",) * ls + (pass_choice,) * buyers


def profile_costs(params: ProblemParams, instance: Instance,
                  profile: Sequence[str]) -> tuple[Fraction, ...]:
    """Offline cost of each agent; the group pass is split among its buyers."""
    check_instance(params, instance)
    if len(profile) != params.M:
        raise ValueError("profile length must equal M")
    buyers = sum(1 for c in profile if c == "group")
    costs = []
    for n, choice in zip(instance, profile):
        if choice == "rent":
            costs.append(Fraction(n))
        elif choice == "buy":
            costs.append(Fraction(params.B))
        elif choice == "group":
            costs.append(Fraction(params.G, buyers))
        else:
            raise ValueError(f"unknown offline choice {choice!r}")
    return tuple(costs)


@dataclass(frozen=True)
class Deviation:
    agent: int
    from_choice: str
    to_choice: str
    old_cost: Fraction
    new_cost: Fraction


@dataclass(frozen=True)
class NashReport:
    profile: tuple[str, ...]
    costs: tuple[Fraction, ...]
    is_equilibrium: bool
    deviations: tuple[Deviation, ...]


def nash_verify(params: ProblemParams, instance: Instance,
                profile: Sequence[str] | None = None) -> NashReport:
    """Check every unilateral deviation among rent / individual buy / group buy.

    ``deviations`` lists only the profitable ones.
    """
    if profile is None:
        profile = offline_profile(params, instance)
    profile = tuple(profile)
    base = profile_costs(params, instance, profile)
    found = []
    for m, current in enumerate(profile):
        for alt in OFFLINE_CHOICES:
            if alt == current:
                continue
            trial = profile[:m] + (alt,) + profile[m + 1:]
            new_cost = profile_costs(params, instance, trial)[m]
            if new_cost < base[m]:
                found.append(Deviation(m + 1, current, alt, base[m], new_cost))
    return NashReport(profile, base, not found, tuple(found))
