import math

import numpy as np
import pytest
from scipy.optimize import linprog

from robust_cover.solver.simplex import BoundedSimplex, solve_lp


def _highs(A, c, lb, ub, rl, ru):
    fin_u, fin_l = np.isfinite(ru), np.isfinite(rl)
    A_ub = np.vstack([A[fin_u], -A[fin_l]])
    b_ub = np.concatenate([ru[fin_u], -rl[fin_l]])
    bounds = [(None if math.isinf(a) else a, None if math.isinf(b) else b) for a, b in zip(lb, ub)]
    kw = dict(A_ub=A_ub, b_ub=b_ub) if b_ub.size else {}
    return linprog(c, bounds=bounds, method="highs", **kw)


def random_lp(rng, t):
    m, n = int(rng.integers(1, 20)), int(rng.integers(1, 20))
    A = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.6)
    if t % 7 == 0:
        A = np.round(A)  # degenerate-ish
    c = rng.normal(size=n)
    if t % 3 == 0:
        c = np.abs(c)
    lb = np.where(rng.random(n) < 0.8, rng.uniform(-2, 0, n), -np.inf)
    ub = np.where(rng.random(n) < 0.8, rng.uniform(0, 3, n), np.inf)
    if t % 4 == 0:
        lb, ub = np.zeros(n), np.where(rng.random(n) < 0.5, 1.0, np.inf)
    x0 = rng.uniform(np.where(np.isfinite(lb), lb, -1), np.where(np.isfinite(ub), ub, 1))
    act = A @ x0
    rl = np.where(rng.random(m) < 0.5, act - rng.uniform(0, 1, m), -np.inf)
    ru = np.where(rng.random(m) < 0.7, act + rng.uniform(0, 1, m), np.inf)
    if t % 5 == 0:
        # equalities, some of them unreachable
        rl = ru = act + rng.normal(size=m) * 0.5 * (rng.random(m) < 0.3)
    return A, c, lb, ub, rl, ru


@pytest.mark.parametrize("block", range(4))
def test_matches_highs_on_random_lps(block):
    rng = np.random.default_rng(block)
    for t in range(60):
        A, c, lb, ub, rl, ru = random_lp(rng, t)
        ref = _highs(A, c, lb, ub, rl, ru)
        got = solve_lp(A, c, lb, ub, rl, ru)
        if ref.status == 0:
            assert got.status == "optimal", t
            assert got.objective == pytest.approx(ref.fun, rel=1e-6, abs=1e-6)
            x, act = got.x, A @ got.x
            assert np.all(x >= lb - 1e-6) and np.all(x <= ub + 1e-6)
            assert np.all(act >= rl - 1e-6) and np.all(act <= ru + 1e-6)
        elif ref.status == 3:
            assert got.status == "unbounded", t
        else:
            assert ref.status == 2
            if got.status == "unbounded":
                # HiGHS may report a feasible unbounded LP as infeasible;
                # a zero-cost solve settles feasibility
                assert _highs(A, np.zeros_like(c), lb, ub, rl, ru).status == 0, t
            else:
                assert got.status == "infeasible", t


def test_textbook_example():
    # max x + y - 50 s.t. 50x + 24y <= 2400, 30x + 33y <= 2100, x >= 45, y >= 5
    A = np.array([[50.0, 24.0], [30.0, 33.0]])
    res = solve_lp(A, [-1.0, -1.0], [45.0, 5.0], [np.inf, np.inf], [-np.inf, -np.inf], [2400.0, 2100.0])
    assert res.status == "optimal"
    assert res.x == pytest.approx([45.0, 6.25])
    assert -res.objective - 50 == pytest.approx(1.25)


def test_warm_start_after_bound_change_and_added_rows():
    rng = np.random.default_rng(9)
    A = rng.uniform(0, 1, (6, 8))
    c = rng.uniform(1, 2, 8)
    lb, ub = np.zeros(8), np.ones(8)
    rl, ru = np.ones(6), np.full(6, np.inf)
    lp = BoundedSimplex(A, c, lb, ub, rl, ru)
    first = lp.solve()
    assert first.status == "optimal"
    ub2 = ub.copy()
    ub2[int(np.argmax(first.x))] = 0.0
    lp.set_bounds(lb, ub2)
    warm = lp.solve()
    cold = solve_lp(A, c, lb, ub2, rl, ru)
    assert warm.status == cold.status
    if cold.status == "optimal":
        assert warm.objective == pytest.approx(cold.objective, rel=1e-9)
    cut = np.ones((1, 8))
    lp.add_rows(cut, [3.0], [np.inf])
    added = lp.solve()
    ref = solve_lp(np.vstack([A, cut]), c, lb, ub2, np.append(rl, 3.0), np.append(ru, np.inf))
    assert added.status == ref.status
    if ref.status == "optimal":
        assert added.objective == pytest.approx(ref.objective, rel=1e-9)


def test_free_column_unbounded():
    res = solve_lp(np.zeros((1, 1)), [-1.0], [-np.inf], [np.inf], [-np.inf], [np.inf])
    assert res.status == "unbounded"


def test_infeasible_bounds_on_rows():
    A = np.array([[1.0, 1.0]])
    res = solve_lp(A, [1.0, 1.0], [0.0, 0.0], [1.0, 1.0], [3.0], [np.inf])
    assert res.status == "infeasible"
