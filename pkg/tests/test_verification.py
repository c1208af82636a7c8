from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from maskirental.deterministic import Objective
from maskirental.errors import ConditionViolated, NonIntegerThreshold, StateMismatch
from maskirental.model import GroupState, ProblemParams
from maskirental.randomized import DensityKind, policy_density, state_threshold
from maskirental.simplex import LpStatus, solve_lp
from maskirental.verification import (
    brute_force_symmetric_dominance,
    build_state_lp,
    joint_policy_cost,
    solve_homogeneous_lp,
    solve_state_lp,
    threshold_vector_cost,
    verify_two_agent_randomized_symmetry,
    yao_expected_cost,
    yao_expected_opt,
    yao_lower_bound,
)
from strategies import params, states

LP_KINDS = [DensityKind.P_OV, DensityKind.P_SD, DensityKind.Q_IND]


def lp_optimum_by_simplex(system):
    """min c s.t. A p <= c * rhs, sum p = 1, p >= 0 with the generic solver."""
    n = len(system.days)
    cost = [0] * n + [1]
    A_ub = [row + [-b] for row, b in zip(system.matrix, system.rhs)]
    res = solve_lp(cost, A_ub, [0] * n, [[1] * n + [0]], [1])
    assert res.status is LpStatus.OPTIMAL
    return res.objective


def test_differencing_leaves_upper_triangular_system():
    system = build_state_lp(ProblemParams(10, 10, 60), GroupState(), DensityKind.P_SD)
    assert not system.is_upper_triangular()
    system.difference()
    assert system.is_upper_triangular()
    n = len(system.days)
    assert all(system.matrix[i][j] == 0 for i in range(n) for j in range(i))


@given(st.data())
def test_lp_solution_equals_policy_density(data):
    p = data.draw(params(max_m=6, max_b=10))
    state = data.draw(states(p, max_day=6))
    kind = data.draw(st.sampled_from(LP_KINDS))
    T = state_threshold(p, state, kind)
    assume(T.denominator == 1 and T > max(1, state.last_day))
    mass, c = solve_state_lp(p, state, kind)
    density = policy_density(p, state, kind)
    assert mass == density.mass
    assert c == lp_optimum_by_simplex(build_state_lp(p, state, kind))


def test_lp_needs_integer_threshold():
    with pytest.raises(NonIntegerThreshold):
        build_state_lp(ProblemParams(4, 5, 14), GroupState(), DensityKind.P_SD)
    with pytest.raises(StateMismatch):
        build_state_lp(ProblemParams(3, 4, 6), GroupState((1,)), DensityKind.HOMOGENEOUS)


def test_actual_purchase_cost_raises_overall_optimum(figure_params, figure_instance):
    state = GroupState.of(figure_instance, 5)
    _, stated = solve_state_lp(figure_params, state, DensityKind.P_OV)
    actual = lp_optimum_by_simplex(build_state_lp(figure_params, state, DensityKind.P_OV, "actual"))
    assert round(float(stated), 4) == 1.4937
    assert round(float(actual), 4) == 1.5736


@pytest.mark.parametrize("M,B,G", [(10, 10, 60), (2, 3, 4), (3, 4, 9), (4, 4, 12)])
def test_homogeneous_lp_constant(M, B, G):
    _, c = solve_homogeneous_lp(ProblemParams(M, B, G))
    r = Fraction(G, M)
    assert c == 1 / (1 - (1 - 1 / r) ** int(r))


def test_homogeneous_lp_small_case_exact():
    mass, c = solve_homogeneous_lp(ProblemParams(2, 3, 4))
    assert c == Fraction(4, 3)
    assert mass == (Fraction(1, 3), Fraction(2, 3))


def test_homogeneous_lp_rejects_fractional_share():
    with pytest.raises(NonIntegerThreshold):
        solve_homogeneous_lp(ProblemParams(3, 4, 10))


def test_yao_integrals():
    for M in (1, 3):
        assert yao_expected_opt(M) == pytest.approx(M * (1 - math.exp(-1)), abs=1e-8)
        for t in (0.5, 1.0, 2.0):
            assert yao_expected_cost(M, t) == pytest.approx(M, abs=1e-8)
    report = yao_lower_bound(ProblemParams(10, 10, 60))
    assert report.ratio == pytest.approx(math.e / (math.e - 1), abs=1e-8)


def test_threshold_vector_cost_cases():
    p = ProblemParams(2, 3, 4)
    assert threshold_vector_cost(p, (2, 2), (5, 5)) == 2 + 4
    assert threshold_vector_cost(p, (1, 3), (5, 5)) == 3 + 2 + 3
    assert threshold_vector_cost(p, (4, 4), (1, 2)) == 3


@pytest.mark.parametrize("B,G", [(2, 3), (3, 4), (3, 5), (4, 5), (4, 7)])
@pytest.mark.parametrize("objective", [Objective.OVERALL, Objective.STATE_DEPENDENT])
def test_symmetric_vectors_are_not_beaten(B, G, objective):
    report = brute_force_symmetric_dominance(ProblemParams(2, B, G), 2 * B, objective)
    assert report.verdict
    assert report.best_symmetric_ratio == report.best_asymmetric_ratio


def test_constant_policy_on_homogeneous_instances():
    # integer G/M: the best constant threshold achieves 2 - M/G
    for M, B, G in [(2, 3, 4), (2, 4, 6), (3, 4, 9)]:
        p = ProblemParams(M, B, G)
        report = brute_force_symmetric_dominance(p, 2 * B, homogeneous_instances=True)
        assert report.best_symmetric_ratio == 2 - Fraction(M, G)
    # fractional G/M: rounding the share down beats rounding up
    p = ProblemParams(2, 3, 5)
    report = brute_force_symmetric_dominance(p, 6, homogeneous_instances=True)
    assert report.symmetric_witness == (2, 2)


def test_joint_policy_costs():
    assert joint_policy_cost(5, 8, ("sym", (2, 2, 3)), (4, 4)) == 2 + 8
    assert joint_policy_cost(5, 8, ("sym", (3, 3, 4)), (1, 6)) == 1 + 3 + 5
    assert joint_policy_cost(5, 8, ("asym", (1, 3)), (2, 2)) == 5 + 2


@pytest.mark.parametrize("B,G,full", [(4, 5, 1.4045), (5, 6, 1.5182), (5, 7, 1.5766)])
def test_two_agent_symmetry(B, G, full):
    report = verify_two_agent_randomized_symmetry(B, G)
    assert report.symmetric_support
    assert report.symmetric_ratio == report.full_ratio
    assert round(float(report.full_ratio), 4) == full
    assert all(s.startswith("sym") for s in report.support)


def test_two_agent_condition_enforced():
    with pytest.raises(ConditionViolated):
        verify_two_agent_randomized_symmetry(3, 5)
    with pytest.raises(ValueError):
        verify_two_agent_randomized_symmetry(3, 7)


def test_dominance_budget_checked_before_enumeration():
    from maskirental.errors import SearchSpaceTooLarge
    with pytest.raises(SearchSpaceTooLarge):
        brute_force_symmetric_dominance(ProblemParams(10, 10, 60), 20)
