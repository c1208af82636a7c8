"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Run under pytest (lines are repeated in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, DATA  # noqa: E402
from maskirental.deterministic import (  # noqa: E402
    Objective,
    ThresholdKind,
    benchmark_ratio,
    cr_ind_profile,
    cr_ov_closed,
    cr_sd_closed,
    run_deterministic,
    threshold,
    worst_case_cr_det,
)
from maskirental.errors import NegativeMass  # noqa: E402
from maskirental.experiments import (  # noqa: E402
    FIGURE_INSTANCE,
    FIGURE_PARAMS,
    parse_table_csv,
    reproduce_table3,
)
from maskirental.model import GroupState, Instance, ProblemParams  # noqa: E402
from maskirental.randomized import (  # noqa: E402
    DensityKind,
    density_p,
    density_q,
    expected_cost_exact,
    homogeneous_density,
    monte_carlo,
    norm_g,
    ratio_profile,
    state_threshold,
    worst_case_cr_rand,
)
from maskirental.verification import (  # noqa: E402
    brute_force_symmetric_dominance,
    solve_homogeneous_lp,
    verify_two_agent_randomized_symmetry,
    yao_lower_bound,
)

DET_ROWS = ("sd_det_sd", "ov_det_sd", "sd_det_ov", "ov_det_ov")
RAND_ROWS = ("sd_rand_sd", "ov_rand_ov")
TOL3 = Decimal("0.001")


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def figure_state(ell: int) -> GroupState:
    return GroupState.of(FIGURE_INSTANCE, ell)


def test_criterion_1_table_reproduction():
    golden = parse_table_csv((DATA / "table3_golden.csv").read_text())
    start = time.perf_counter()
    table = reproduce_table3("search").rounded()
    elapsed = time.perf_counter() - start
    misses = []
    for row in DET_ROWS:
        misses += [(row, ell) for ell, (a, b) in enumerate(zip(table[row], golden[row])) if a != b]
    for row in RAND_ROWS:
        misses += [(row, ell) for ell, (a, b) in enumerate(zip(table[row], golden[row]))
                   if abs(a - b) > TOL3]
    # degraded form: initial state plus every state whose threshold is an integer
    integer_cols = {ell for ell in range(FIGURE_PARAMS.M)
                    if threshold(FIGURE_PARAMS, figure_state(ell),
                                 ThresholdKind.STATE_DEPENDENT).denominator == 1}
    degraded_misses = [m for m in misses if m[1] in integer_cols or m[0] in DET_ROWS]
    full_ok = not misses
    ok = (full_ok or not degraded_misses) and elapsed < 60
    shown = ", ".join(f"{r}[{ell}]={table[r][ell]} vs {golden[r][ell]}" for r, ell in misses)
    report(1, ok, f"{60 - len(misses)}/60 cells match; integer-T columns {sorted(integer_cols)} "
                  f"misses={len(degraded_misses)}; {elapsed:.1f}s"
                  + (f"; mismatches: {shown}" if misses else ""))


HOMOGENEOUS_CASES = [(10, 10, 60), (2, 3, 4), (3, 4, 9), (4, 4, 12)]


def test_criterion_2_homogeneous_closed_forms():
    details = []
    ok = True
    for M, B, G in HOMOGENEOUS_CASES:
        p = ProblemParams(M, B, G)
        det = worst_case_cr_det(p, ThresholdKind.HOMOGENEOUS_FIXED, Objective.OVERALL,
                                max_product_agents=0).ratio
        target = 1 / (1 - (1 - Fraction(M, G)) ** (G // M))
        rand = worst_case_cr_rand(p, DensityKind.HOMOGENEOUS, Objective.OVERALL).ratio
        _, lp = solve_homogeneous_lp(p)
        case_ok = (det == 2 - Fraction(M, G) and abs(float(rand - target)) <= 1e-9
                   and abs(float(lp - target)) <= 1e-9)
        ok &= case_ok
        details.append(f"(M={M},G={G}) det={float(det):.6f} rand={float(rand):.9f} "
                       f"lp={float(lp):.9f}")
    report(2, ok, "; ".join(details))


def test_criterion_3_search_matches_closed_forms():
    checked = []
    ok = True
    for kind, objective, closed in ((ThresholdKind.OVERALL, Objective.OVERALL, cr_ov_closed),
                                    (ThresholdKind.STATE_DEPENDENT, Objective.STATE_DEPENDENT,
                                     cr_sd_closed)):
        for ell in range(FIGURE_PARAMS.M):
            state = figure_state(ell)
            T = threshold(FIGURE_PARAMS, state, kind)
            if T.denominator != 1:
                continue
            found = worst_case_cr_det(FIGURE_PARAMS, kind, objective, state)
            witness = Instance(state.revealed + (int(T),) * (FIGURE_PARAMS.M - ell))
            ledger = run_deterministic(FIGURE_PARAMS, witness, kind, trace=False)
            at_witness = benchmark_ratio(FIGURE_PARAMS, witness, state, ledger, objective, None)
            ok &= abs(float(found.ratio - closed(FIGURE_PARAMS, state))) <= 1e-9
            ok &= at_witness == found.ratio
            checked.append(f"{kind.value}@{ell}")
    report(3, ok, f"{len(checked)} integer-T states agree, symmetric witness attains max: "
                  + " ".join(checked))


def _normalization_states():
    """Distinct densities over integer-threshold states with M<=12, B<=15, G<=120."""
    group, single, homog = {}, {}, {}
    n_states = 0
    for M in range(2, 13):
        for B in range(2, 16):
            for G in range(B + 1, min(M * B, 121)):
                p = ProblemParams(M, B, G)
                if G % M == 0:
                    homog.setdefault(G // M, p)
                for ell in range(M):
                    for N in ([0] if ell == 0 else range(1, B)):
                        state = GroupState((N,) * ell)
                        for kind in (DensityKind.P_SD, DensityKind.P_OV):
                            T = state_threshold(p, state, kind)
                            if T.denominator != 1 or T <= max(1, N):
                                continue
                            n_states += 1
                            key = (M - ell, state.paid_cost(), N, int(T))
                            group.setdefault(key, (p, state, T))
                            single.setdefault((N, int(T)), (p, state, T))
    return n_states, group, single, homog


def test_criterion_4_density_normalization():
    n_states, group, single, homog = _normalization_states()
    worst = Fraction(0)
    negative = 0
    for p, state, T in group.values():
        worst = max(worst, abs(1 - density_p(p, state, T).total()))
    for p, state, T in single.values():
        try:
            worst = max(worst, abs(1 - density_q(p, state, T).total()))
        except NegativeMass:
            negative += 1
    for p in homog.values():
        worst = max(worst, abs(1 - homogeneous_density(p).total()))
    checked = len(group) + len(single) - negative + len(homog)
    ok = worst <= 1e-9 and n_states >= 500
    report(4, ok, f"{n_states} states, {checked} distinct densities, max |1-sum|={float(worst):.3g}; "
                  f"{negative} per-agent (N_l,T) pairs excluded for negative mass")


def test_criterion_5_randomized_tightness_and_dominance():
    state = GroupState()
    worst = worst_case_cr_rand(FIGURE_PARAMS, DensityKind.P_SD, Objective.STATE_DEPENDENT, state)
    g = norm_g(FIGURE_PARAMS, state, state_threshold(FIGURE_PARAMS, state, DensityKind.P_SD))
    ratios = [r for _, _, r in ratio_profile(FIGURE_PARAMS, DensityKind.P_SD,
                                             Objective.STATE_DEPENDENT, state)]
    dominated = all(r <= g + 1e-9 for r in ratios)
    ok = abs(float(worst.ratio) - 1.504) <= 0.001 and dominated
    report(5, ok, f"worst={float(worst.ratio):.6f} g={float(g):.6f}; "
                  f"{len(ratios)} instances all <= g+1e-9: {dominated}")


def test_criterion_6_yao_bound():
    yao = yao_lower_bound(FIGURE_PARAMS).ratio
    g = float(norm_g(FIGURE_PARAMS, GroupState(), 1000))
    ok = abs(yao - 1.581977) <= 1e-4 and abs(g - yao) <= 1e-3
    report(6, ok, f"quadrature={yao:.7f} norm_g(T=1000)={g:.7f} e/(e-1)={math.e / (math.e - 1):.7f}")


def test_criterion_7_symmetric_dominance():
    start = time.perf_counter()
    cases = []
    ok = True
    for B in (2, 3, 4):
        for G in range(B + 1, 2 * B):
            for objective in (Objective.OVERALL, Objective.STATE_DEPENDENT):
                r = brute_force_symmetric_dominance(ProblemParams(2, B, G), 2 * B, objective)
                ok &= r.verdict
                cases.append(f"(B={B},G={G},{objective.value}) {float(r.best_symmetric_ratio):.4f}"
                             f"<={float(r.best_asymmetric_ratio):.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    report(7, ok, f"{len(cases)} cases in {elapsed:.1f}s: " + "; ".join(cases))


def test_criterion_8_individual_rational_suite():
    p = ProblemParams(2, 5, 8)
    inst = Instance((2, 10))
    costs = run_deterministic(p, inst, ThresholdKind.STATE_DEPENDENT).per_agent_cost
    ratios = cr_ind_profile(p, inst)
    B = 5
    single = ProblemParams.relax(1, B, B + 1)
    embed = worst_case_cr_rand(single, DensityKind.Q_IND, Objective.INDIVIDUAL, agent=1).ratio
    classic = 1 / (1 - (1 - Fraction(1, B)) ** B)
    ok = (costs == (2, 9) and ratios == (1, Fraction(9, 5))
          and abs(float(embed - classic)) <= 1e-9)
    report(8, ok, f"costs={tuple(int(c) for c in costs)} ratios={tuple(float(r) for r in ratios)} "
                  f"single-agent={float(embed):.9f} vs {float(classic):.9f}")


MC_INSTANCES = [
    (FIGURE_PARAMS, FIGURE_INSTANCE),
    (ProblemParams(2, 5, 8), Instance((2, 10))),
    (ProblemParams(4, 5, 12), Instance((1, 3, 3, 9))),
]
MC_KINDS = (DensityKind.P_OV, DensityKind.P_SD, DensityKind.Q_IND, DensityKind.HOMOGENEOUS)


def test_criterion_9_monte_carlo_consistency():
    zs = []
    for p, inst in MC_INSTANCES:
        for kind in MC_KINDS:
            mc = monte_carlo(p, inst, kind, 100_000, seed=20240601)
            assert mc.exact == pytest.approx(float(expected_cost_exact(p, inst, kind)))
            zs.append((p.as_tuple(), kind.value, mc.z_score))
    ok = all(abs(z) <= 3 for _, _, z in zs)
    worst = max(zs, key=lambda t: abs(t[2]))
    report(9, ok, f"{len(zs)} (instance, kind) pairs, max |z|={abs(worst[2]):.2f} "
                  f"at {worst[0]} {worst[1]}")


def test_criterion_10_two_agent_symmetry():
    parts = []
    ok = True
    for B, G in ((4, 5), (5, 6), (5, 7)):
        r = verify_two_agent_randomized_symmetry(B, G)
        ok &= r.symmetric_support
        parts.append(f"(B={B},G={G}) full={float(r.full_ratio):.4f} "
                     f"symmetric={float(r.symmetric_ratio):.4f}")
    report(10, ok, "; ".join(parts))


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(((n, f) for n, f in globals().items() if n.startswith("test_criterion")),
                           key=lambda t: int(t[0].split("_")[2])):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
