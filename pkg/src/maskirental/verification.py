"""Independent oracles for the policy modules.

* exhaustive search over constant threshold vectors, to compare the best
  symmetric vector with the best vector overall;
* the per-state LPs of the randomized policies, rebuilt from the cost model and
  solved by row differencing plus back-substitution;
* the Yao-style lower bound by quadrature;
* the two-agent LP over joint policies, solved with the exact simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from scipy import integrate

from .deterministic import Objective, node_budget
from .errors import ConditionViolated, NonIntegerThreshold, SearchSpaceTooLarge, StateMismatch
from .model import GroupState, Instance, ProblemParams
from .randomized import DensityKind, state_threshold
from .simplex import LpStatus, solve_lp


# -- symmetric vs asymmetric constant thresholds ----------------------------

@dataclass(frozen=True)
class DominanceReport:
    best_symmetric_ratio: Fraction
    best_asymmetric_ratio: Fraction
    symmetric_witness: tuple[int, ...]
    asymmetric_witness: tuple[int, ...]
    verdict: bool
    evaluated: int = 0

    def to_json(self) -> dict:
        return {
            "best_symmetric_ratio": float(self.best_symmetric_ratio),
            "best_asymmetric_ratio": float(self.best_asymmetric_ratio),
            "symmetric_witness": list(self.symmetric_witness),
            "asymmetric_witness": list(self.asymmetric_witness),
            "verdict": self.verdict,
            "evaluated": self.evaluated,
        }


def threshold_vector_cost(params: ProblemParams, thresholds: Sequence[int],
                          days: Sequence[int]) -> int | Fraction:
    """Total cost when agent ``m`` buys on day ``thresholds[m]`` if still active.

    Agents sharing the largest threshold buy together and take the cheaper of
    one group pass and individual passes; every other buyer pays ``B``.
    """
    top = max(thresholds)
    total = 0
    joint = 0
    for t, n in zip(thresholds, days):
        if n < t:
            total += n
            continue
        total += t - 1
        if t == top:
            joint += 1
        else:
            total += params.B
    if joint:
        total += min(params.G, joint * params.B)
    return total


def _benchmark(params: ProblemParams, days: Sequence[int], objective: Objective) -> int:
    if objective is Objective.INDIVIDUAL:
        raise ValueError("dominance search covers the group objectives only")
    # at the initial state both benchmarks reduce to the unconditioned optimum
    return min(params.G, sum(min(n, params.B) for n in days))


def brute_force_symmetric_dominance(params: ProblemParams, horizon: int,
                                    objective: Objective = Objective.OVERALL, *,
                                    homogeneous_instances: bool = False,
                                    budget: int | None = None) -> DominanceReport:
    """Best worst-case ratio over symmetric threshold vectors vs over all vectors.

    Thresholds range over ``1..horizon+1`` (``horizon+1`` never buys) and
    instances over ``{1..horizon}^M``, or only the constant instances when
    ``homogeneous_instances`` is set.
    """
    if horizon < params.B:
        raise ValueError(f"horizon={horizon} must be >= B={params.B}")
    M = params.M
    n_policies = (horizon + 1) ** M
    n_instances = horizon if homogeneous_instances else horizon ** M
    budget = node_budget() if budget is None else budget
    # check before materialising anything
    if n_policies * n_instances > budget:
        raise SearchSpaceTooLarge(
            f"{n_policies} policies x {n_instances} instances exceed node budget {budget}")
    if homogeneous_instances:
        instances = [(n,) * M for n in range(1, horizon + 1)]
    else:
        instances = list(itertools.product(range(1, horizon + 1), repeat=M))
    bench = [_benchmark(params, days, objective) for days in instances]
    best_sym = best_all = None
    sym_witness = all_witness = ()
    for vector in itertools.product(range(1, horizon + 2), repeat=M):
        worst = max(Fraction(threshold_vector_cost(params, vector, days), b)
                    for days, b in zip(instances, bench))
        if best_all is None or worst < best_all:
            best_all, all_witness = worst, vector
        if len(set(vector)) == 1 and (best_sym is None or worst < best_sym):
            best_sym, sym_witness = worst, vector
    verdict = best_sym <= best_all + Fraction(1, 10**12)
    return DominanceReport(best_sym, best_all, sym_witness, all_witness, verdict,
                           n_policies * len(instances))


# -- per-state LPs -----------------------------------------------------------

@dataclass
class LpSystem:
    """Rows are adversary days ``N``, columns buy days ``t``; ``A p <= c * rhs``.

    ``offset`` is the cost of the first row's columns on or before day ``N_l``
    and ``purchase`` the cost of the pass bought on the threshold day.
    """

    days: tuple[int, ...]
    matrix: list[list[Fraction]]
    rhs: list[Fraction]
    offset: Fraction
    purchase: Fraction
    history: list[tuple[list[list[Fraction]], list[Fraction]]] = field(default_factory=list)

    def difference(self) -> None:
        """Both passes: successive differences, then differences of neighbours."""
        self.history.append(([row[:] for row in self.matrix], self.rhs[:]))
        n = len(self.days)
        A = self.matrix
        b = self.rhs
        first = ([A[0][:]] + [[x - y for x, y in zip(A[i], A[i - 1])] for i in range(1, n)],
                 [b[0]] + [b[i] - b[i - 1] for i in range(1, n)])
        self.history.append(([row[:] for row in first[0]], first[1][:]))
        A, b = first
        second = ([[x - y for x, y in zip(A[i], A[i + 1])] for i in range(n - 1)] + [A[-1]],
                  [b[i] - b[i + 1] for i in range(n - 1)] + [b[-1]])
        self.matrix, self.rhs = second

    def is_upper_triangular(self) -> bool:
        return all(self.matrix[i][j] == 0 for i in range(len(self.days)) for j in range(i))

    def back_substitute(self) -> tuple[tuple[Fraction, ...], Fraction]:
        """Solve the triangular system with every row tight and the masses summing to 1.

        The system is homogeneous in ``(p, c)``, so ``p = c * u`` with ``A u = rhs``.
        """
        n = len(self.days)
        u = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            row = self.matrix[i]
            s = self.rhs[i] - sum((row[j] * u[j] for j in range(i + 1, n)), Fraction(0))
            u[i] = s / row[i]
        c = 1 / sum(u)
        return tuple(c * v for v in u), c

    def to_csv(self) -> str:
        header = "N," + ",".join(f"p{t}" for t in self.days) + ",rhs_c"
        lines = [header]
        for day, row, b in zip(self.days, self.matrix, self.rhs):
            lines.append(f"{day}," + ",".join(str(v) for v in row) + f",{b}")
        return "\n".join(lines) + "\n"


def build_state_lp(params: ProblemParams, state: GroupState, kind: DensityKind,
                   purchase: str = "threshold") -> LpSystem:
    """Constraint system of the optimal density at ``state`` (adversary keeps all
    remaining agents for the same ``N`` days).

    ``purchase="threshold"`` charges ``k * T`` for the pass, as in the reference
    derivation; ``purchase="actual"`` charges what is really paid,
    ``min(G, kB)``.  The two differ for the overall threshold once some rent has
    been paid and ``T < B``.  For the individual objective both are the
    per-agent share.
    """
    if kind is DensityKind.HOMOGENEOUS:
        if state.ell:
            raise StateMismatch("the homogeneous LP lives at the initial state")
        kind = DensityKind.P_SD
    T = state_threshold(params, state, kind)
    if T.denominator != 1:
        raise NonIntegerThreshold(f"threshold {T} is not an integer")
    T = int(T)
    last = state.last_day
    if T <= last:
        raise StateMismatch(f"threshold {T} <= N_l = {last}")
    k = params.M - state.ell
    if k <= 0:
        raise StateMismatch("state has no active agents left")
    if kind is DensityKind.Q_IND:
        paid, width = 0, 1
        actual = Fraction(min(params.G, k * params.B), k)
    else:
        paid, width = state.paid_cost(), k
        actual = Fraction(min(params.G, k * params.B))
    if purchase == "actual":
        price = actual
    elif purchase == "threshold":
        price = Fraction(width * T)
    else:
        raise ValueError(f"unknown purchase convention {purchase!r}")
    days = tuple(range(last + 1, T + 1))
    matrix = [[Fraction(paid + width * (t - 1)) + price if t <= N else Fraction(paid + width * N)
               for t in days] for N in days]
    rhs = [Fraction(paid + width * N) for N in days]
    return LpSystem(days, matrix, rhs, Fraction(paid + width * last), price)


def solve_state_lp(params: ProblemParams, state: GroupState, kind: DensityKind,
                   purchase: str = "threshold") -> tuple[tuple[Fraction, ...], Fraction]:
    system = build_state_lp(params, state, kind, purchase)
    system.difference()
    return system.back_substitute()


def solve_homogeneous_lp(params: ProblemParams, cap: int = 10_000
                         ) -> tuple[tuple[Fraction, ...], Fraction]:
    if params.G % params.M:
        raise NonIntegerThreshold(f"G/M = {params.G}/{params.M} is not an integer")
    if params.G // params.M > cap:
        raise SearchSpaceTooLarge(f"G/M = {params.G // params.M} exceeds cap {cap}")
    T = params.G // params.M
    days = tuple(range(1, T + 1))
    M, G = params.M, params.G
    matrix = [[Fraction(M * (t - 1) + G) if t <= N else Fraction(M * N) for t in days]
              for N in days]
    rhs = [Fraction(M * N) for N in days]
    system = LpSystem(days, matrix, rhs, Fraction(0), Fraction(G))
    system.difference()
    return system.back_substitute()


# -- Yao lower bound ---------------------------------------------------------

QUAD_LIMIT = 50.0


@dataclass(frozen=True)
class YaoReport:
    expected_opt: float
    expected_cost: dict[float, float]
    ratio: float

    def to_json(self) -> dict:
        return {"expected_opt": self.expected_opt,
                "expected_cost": {str(t): v for t, v in self.expected_cost.items()},
                "ratio": self.ratio}


def yao_expected_opt(M: int) -> float:
    """E[opt] for days ~ Exp(1), in units where the per-agent group share is 1."""
    body, _ = integrate.quad(lambda n: min(n, 1.0) * math.exp(-n), 0.0, QUAD_LIMIT,
                             points=[1.0], epsabs=1e-13, epsrel=1e-13)
    return M * (body + math.exp(-QUAD_LIMIT))


def yao_expected_cost(M: int, t: float) -> float:
    """E[cost] of the threshold ``t`` against the same distribution."""
    if not 0 <= t < QUAD_LIMIT:
        raise ValueError(f"threshold {t} outside [0, {QUAD_LIMIT})")

    def cost(n: float) -> float:
        return (n if n < t else t + 1.0) * math.exp(-n)

    body, _ = integrate.quad(cost, 0.0, QUAD_LIMIT, points=[t] if t > 0 else None,
                             epsabs=1e-13, epsrel=1e-13)
    return M * (body + (t + 1.0) * math.exp(-QUAD_LIMIT))


def yao_lower_bound(params: ProblemParams, thresholds: Sequence[float] = (0.5, 1.0, 2.0)
                    ) -> YaoReport:
    M = params.M
    opt = yao_expected_opt(M)
    costs = {float(t): yao_expected_cost(M, t) for t in thresholds}
    return YaoReport(opt, costs, min(costs.values()) / opt)


# -- two-agent joint policies ------------------------------------------------

@dataclass(frozen=True)
class TwoAgentReport:
    B: int
    G: int
    horizon: int
    condition: str
    full_ratio: Fraction
    symmetric_ratio: Fraction
    support: tuple[str, ...]  # optimum restricted to symmetric columns
    symmetric_support: bool

    def to_json(self) -> dict:
        return {"B": self.B, "G": self.G, "horizon": self.horizon,
                "condition": self.condition,
                "full_ratio": float(self.full_ratio),
                "symmetric_ratio": float(self.symmetric_ratio),
                "support": list(self.support),
                "symmetric_support": self.symmetric_support}


def _joint_columns(horizon: int) -> list[tuple[str, tuple[int, ...]]]:
    cols = []
    for i in range(1, horizon + 1):
        js = [i] if i in (1, horizon) else range(i, horizon + 1)
        for j in js:
            cols.append(("sym", (i, i, j)))
    for i, j in itertools.permutations(range(1, horizon + 1), 2):
        cols.append(("asym", (i, j)))
    return cols


def joint_policy_cost(B: int, G: int, column: tuple[str, tuple[int, ...]],
                      days: tuple[int, int]) -> int:
    """Total cost of a two-agent joint policy.

    ``("sym", (i, i, j))``: buy one group pass on day ``i`` if both are still
    active; if one left earlier, the other buys an individual pass on day ``j``.
    ``("asym", (i, j))``: agent one buys on day ``i`` and agent two on day ``j``.
    """
    kind, spec = column
    if kind == "asym":
        return sum(n if n < t else t - 1 + B for t, n in zip(spec, days))
    i, _, j = spec
    lo, hi = sorted(days)
    if lo >= i:
        return 2 * (i - 1) + G
    # the shorter stay leaves before the group day
    return lo + (hi if hi < j else j - 1 + B)


def _min_ratio_lp(B: int, G: int, cols, rows, opt) -> tuple[Fraction, tuple[Fraction, ...]]:
    n = len(cols)
    cost = [Fraction(0)] * n + [Fraction(1)]
    A_ub = [[Fraction(joint_policy_cost(B, G, col, r)) for col in cols] + [-Fraction(o)]
            for r, o in zip(rows, opt)]
    b_ub = [Fraction(0)] * len(rows)
    A_eq = [[Fraction(1)] * n + [Fraction(0)]]
    result = solve_lp(cost, A_ub, b_ub, A_eq, [Fraction(1)])
    if result.status is not LpStatus.OPTIMAL:
        raise RuntimeError(f"two-agent LP ended {result.status.value}")
    return result.objective, result.x[:n]


def verify_two_agent_randomized_symmetry(B: int, G: int, horizon: int = 4) -> TwoAgentReport:
    """Solve the min-ratio LP over all joint policies and over the symmetric ones."""
    if not B < G < 2 * B:
        raise ValueError(f"need B < G < 2B, got B={B}, G={G}")
    if G > 2 * B - 3:
        raise ConditionViolated(
            f"G={G} > 2B-3={2 * B - 3}: outside the regime where the asymmetric "
            "columns are known to be dominated")
    cols = _joint_columns(horizon)
    rows = list(itertools.product(range(1, horizon + 1), repeat=2))
    opt = [min(G, min(a, B) + min(b, B)) for a, b in rows]
    full, _ = _min_ratio_lp(B, G, cols, rows, opt)
    sym_cols = [c for c in cols if c[0] == "sym"]
    sym, weights = _min_ratio_lp(B, G, sym_cols, rows, opt)
    support = tuple(f"{kind}{spec}" for (kind, spec), w in zip(sym_cols, weights) if w)
    return TwoAgentReport(B, G, horizon, f"G <= 2B-3 ({G} <= {2 * B - 3})", full, sym,
                          support, sym == full)
