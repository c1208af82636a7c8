"""Dense two-phase simplex over :class:`fractions.Fraction`.

Only meant for the handful of tiny LPs used as verification oracles; Bland's
rule keeps it from cycling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = Sequence[Sequence[Fraction]]


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    x: tuple[Fraction, ...] = ()
    objective: Fraction | None = None


def _pivot(tab: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    pivot = tab[row][col]
    tab[row] = [v / pivot for v in tab[row]]
    for r, line in enumerate(tab):
        if r != row and line[col] != 0:
            factor = line[col]
            tab[r] = [a - factor * b for a, b in zip(line, tab[row])]
    basis[row] = col


def _run(tab: list[list[Fraction]], basis: list[int], allowed: int) -> bool:
    """Minimise the objective kept in the last row; False if unbounded."""
    m = len(basis)
    obj = tab[m]
    while True:
        obj = tab[m]
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return True
        best = None
        for r in range(m):
            a = tab[r][col]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return False
        _pivot(tab, basis, best[1], col)


def _reduced_objective(cost: list[Fraction], tab, basis) -> list[Fraction]:
    row = list(cost) + [Fraction(0)]
    for r, b in enumerate(basis):
        if row[b] != 0:
            factor = row[b]
            row = [a - factor * v for a, v in zip(row, tab[r])]
    return row


def solve_lp(cost: Sequence, A_ub: Matrix = (), b_ub: Sequence = (),
             A_eq: Matrix = (), b_eq: Sequence = ()) -> LpResult:
    """Minimise ``cost @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``."""
    n = len(cost)
    cost = [Fraction(v) for v in cost]
    rows: list[tuple[list[Fraction], Fraction, int]] = []  # (coeffs, rhs, slack sign)
    for a, b in zip(A_ub, b_ub):
        rows.append(([Fraction(v) for v in a], Fraction(b), 1))
    for a, b in zip(A_eq, b_eq):
        rows.append(([Fraction(v) for v in a], Fraction(b), 0))
    m = len(rows)
    n_slack = sum(1 for _, _, s in rows if s)
    width = n + n_slack + m + 1
    tab: list[list[Fraction]] = []
    slack = n
    for i, (a, b, s) in enumerate(rows):
        line = a + [Fraction(0)] * (width - n)
        if s:
            line[slack] = Fraction(1)
            slack += 1
        if b < 0:
            line = [-v for v in line]
            b = -b
        line[n + n_slack + i] = Fraction(1)
        line[-1] = b
        tab.append(line)
    basis = [n + n_slack + i for i in range(m)]
    artificial_cost = [Fraction(0)] * (n + n_slack) + [Fraction(1)] * m
    tab.append(_reduced_objective(artificial_cost, tab, basis))
    _run(tab, basis, n + n_slack + m)
    if tab[m][-1] != 0:
        return LpResult(LpStatus.INFEASIBLE)
    # drive zero-level artificials out of the basis
    for r in range(m):
        if basis[r] >= n + n_slack:
            col = next((j for j in range(n + n_slack) if tab[r][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, r, col)
    keep = [r for r in range(m) if basis[r] < n + n_slack]
    tab = [tab[r][: n + n_slack] + [tab[r][-1]] for r in keep]
    basis = [basis[r] for r in keep]
    tab.append(_reduced_objective(cost + [Fraction(0)] * n_slack, tab, basis))
    if not _run(tab, basis, n + n_slack):
        return LpResult(LpStatus.UNBOUNDED)
    x = [Fraction(0)] * (n + n_slack)
    for r, b in enumerate(basis):
        x[b] = tab[r][-1]
    value = sum((c * v for c, v in zip(cost, x[:n])), Fraction(0))
    return LpResult(LpStatus.OPTIMAL, tuple(x[:n]), value)
