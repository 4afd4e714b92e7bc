import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robust_cover.core import RobustConfig, Solution, make_instance
from robust_cover.oracle import (clamp_logs, coverage, deviation_ratios, dual_value, dual_value_lp,
                                 verify, worst_case_miss, worst_case_miss_enumerate,
                                 worst_case_miss_matrix)


@st.composite
def rows(draw, max_len=8):
    n = draw(st.integers(1, max_len))
    nom = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n)))
    frac = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n)))
    sel = np.array(draw(st.lists(st.booleans(), min_size=n, max_size=n)))
    gamma = draw(st.integers(0, n + 1))
    return nom, frac * (1.0 - nom), sel, gamma


def test_hand_example():
    # ratios 2, 1.5, 3 -> gamma 1 deviates the third site
    nom, dev = np.array([0.1, 0.2, 0.1]), np.array([0.1, 0.1, 0.2])
    res = worst_case_miss(nom, dev, [1, 1, 1], 1)
    assert res.deviated_set == (2,)
    assert res.value == pytest.approx(0.1 * 0.2 * 0.3)
    assert worst_case_miss(nom, dev, [1, 1, 1], 0).value == pytest.approx(0.002)
    assert worst_case_miss(nom, dev, [0, 0, 0], 3).value == 1.0


def test_ties_go_to_lowest_index():
    res = worst_case_miss([0.1, 0.1, 0.1], [0.1, 0.1, 0.1], [1, 1, 1], 2)
    assert res.deviated_set == (0, 1)


def test_zero_nominal_ranks_first():
    assert worst_case_miss([0.0, 0.5], [0.2, 0.4], [1, 1], 1).deviated_set == (0,)
    assert deviation_ratios([0.0, 0.0], [0.0, 0.1]).tolist() == [1.0, math.inf]


@given(rows())
@settings(max_examples=300)
def test_greedy_equals_enumeration(row):
    nom, dev, sel, gamma = row
    greedy = worst_case_miss(nom, dev, sel, gamma).value
    brute = worst_case_miss_enumerate(nom, dev, sel, gamma).value
    ratios = deviation_ratios(nom[sel], dev[sel])
    moving = ratios[ratios > 1.0]
    if np.unique(moving).size == moving.size:
        assert greedy == brute
    else:
        # tied ratios: several deviation sets are maximal and their products
        # are rounded in a different order
        assert greedy == pytest.approx(brute, rel=1e-14, abs=1e-300)


def test_tied_ratios_round_differently():
    nom = np.array([0.5, 0.5, 0.625, 0.75, 0.5, 0.97396656, 0.5, 0.75])
    dev = np.array([0.25, 0.25, 0.234375, 0.1875, 0.25, 0.0, 0.25, 0.1875])
    sel = np.ones(8, bool)
    greedy = worst_case_miss(nom, dev, sel, 6)
    assert greedy.deviated_set == (0, 1, 2, 3, 4, 6)
    assert greedy.value == pytest.approx(worst_case_miss_enumerate(nom, dev, sel, 6).value, rel=1e-15)


@given(rows())
def test_monotone_in_gamma(row):
    nom, dev, sel, gamma = row
    assert worst_case_miss(nom, dev, sel, gamma).value <= worst_case_miss(nom, dev, sel, gamma + 1).value


def test_matrix_matches_rows():
    rng = np.random.default_rng(0)
    nom = rng.uniform(0.05, 1.0, (5, 6))
    dev = rng.uniform(0, 1, (5, 6)) * (1 - nom)
    sel = rng.random(6) < 0.5
    gam = np.array([0, 1, 2, 3, 6])
    got = worst_case_miss_matrix(nom, dev, sel, gam)
    want = [worst_case_miss(nom[i], dev[i], sel, gam[i]).value for i in range(5)]
    assert np.allclose(got, want, rtol=1e-12)


@given(st.lists(st.floats(0.0, 5.0), max_size=10), st.integers(0, 12))
def test_dual_value_two_routes(d, gamma):
    assert dual_value(d, gamma) == pytest.approx(dual_value_lp(d, gamma), abs=1e-12)


def test_dual_value_rejects():
    with pytest.raises(ValueError):
        dual_value([-1.0], 1)
    with pytest.raises(ValueError):
        dual_value([1.0], 1.5)
    with pytest.raises(ValueError):
        worst_case_miss([0.1], [0.1], [1, 1], 1)


def test_clamp_logs_floor():
    lo, d = clamp_logs(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.25, 0.0]))
    assert lo[0] == pytest.approx(math.log(1e-6))
    assert d.tolist() == pytest.approx([0.0, math.log(1.5), 0.0])


def _inst():
    return make_instance([1.0, 1.0], [1.0, 1.0],
                         p_nom=[[0.1, 0.3], [1.0, 0.2]], p_dev=[[0.1, 0.0], [0.0, 0.1]],
                         q_nom=[[0.2, 1.0], [0.2, 0.05]], q_dev=[[0.0, 0.0], [0.1, 0.05]])


def test_coverage_hand_values():
    inst = _inst()
    cov = coverage(inst, [1, 1], [1, 1], 1)
    # node 0: y worst 0.2*0.3, z 0.2;  node 1: y 0.3, z worst 0.3*0.05 vs 0.2*0.1 -> 0.02
    assert cov == pytest.approx([(1 - 0.06) * 0.8, 0.7 * (1 - 0.02)])


def test_verify_classifications():
    inst = _inst()
    cfg = RobustConfig(0.6, 1)
    good = Solution(np.array([1, 1]), np.array([1, 1]), 4.0, "optimal", 4.0)
    rep = verify(inst, good, cfg)
    assert rep.classification == "optimal" and rep.violated == 0 and rep.phi == 0
    bad = Solution(np.array([0, 1]), np.array([1, 0]), 2.0, "optimal", 2.0)
    rep = verify(inst, bad, cfg)
    # node 0: 0.7 * 0.8 = 0.56; node 1: 0.7 * (1 - 0.3) = 0.49
    assert rep.classification == "under-approximate"
    assert rep.violated_nodes == [0, 1]
    assert rep.phi == pytest.approx(0.04 + 0.11)
    limit = Solution(np.array([1, 1]), np.array([1, 1]), 4.0, "time-limit", 3.0)
    assert verify(inst, limit, cfg).classification == "aborted"
    empty = Solution(np.zeros(2, int), np.zeros(2, int), math.inf, "time-limit", 3.0)
    rep = verify(inst, empty, cfg)
    assert rep.classification == "aborted" and rep.violated == 0
    none = Solution(np.zeros(2, int), np.zeros(2, int), math.inf, "infeasible", math.inf)
    assert verify(inst, none, cfg).classification == "no-solution"


def test_worked_examples():
    # deviating site 0 gives 0.10 * 0.02 = 0.002, site 1 gives 0.05 * 0.05 = 0.0025
    res = worst_case_miss([0.05, 0.02], [0.05, 0.03], [1, 1], 1)
    assert res.value == pytest.approx(0.0025) and res.deviated_set == (1,)
    inst = make_instance([1.0], [1.0], p_nom=[[0.05]], p_dev=[[0.05]], q_nom=[[0.02]], q_dev=[[0.03]])
    assert coverage(inst, [1], [1], 1)[0] == pytest.approx(0.9 * 0.95)
    assert coverage(inst, [1], [1], 0)[0] == pytest.approx(0.95 * 0.98)
    assert coverage(inst, [0], [0], 1)[0] == 0.0
    assert dual_value([3, 1, 2], 1) == 3
    assert dual_value([3, 1, 2], 0) == 0
    assert dual_value([0.5, 0.5], 5) == 1.0


def test_empty_selection_report():
    inst = make_instance([1.0], [1.0], p_nom=[[0.1]] * 3, q_nom=[[0.1]] * 3)
    rep = verify(inst, Solution(np.array([0]), np.array([0]), 0.0, "optimal", 0.0), RobustConfig(0.9, 0))
    assert rep.violated == 3 and rep.phi == pytest.approx(2.7)


@given(rows())
def test_soyster_limit(row):
    nom, dev, sel, _ = row
    full = worst_case_miss(nom, dev, sel, int(sel.sum())).value
    assert full == pytest.approx(np.prod((nom + dev)[sel]), rel=1e-12)


def test_adding_a_site_never_hurts():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(2, 8))
        nom = rng.uniform(0.01, 1.0, n)
        dev = rng.uniform(0, 1, n) * (1 - nom)
        sel = rng.random(n) < 0.5
        j = int(rng.integers(n))
        more = sel.copy()
        more[j] = True
        for g in range(n + 1):
            assert worst_case_miss(nom, dev, more, g).value <= worst_case_miss(nom, dev, sel, g).value * (1 + 1e-12)
        if not sel[j]:
            assert worst_case_miss(nom, dev, more, 0).value < worst_case_miss(nom, dev, sel, 0).value
