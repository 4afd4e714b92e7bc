import math

import numpy as np
import pytest

from _support import small_instance
from robust_cover.core import DEFAULT_BETAS, RobustConfig, make_instance
from robust_cover.cuts import CoverSeparator
from robust_cover.generator import table1_config, generate
from robust_cover.linearization import build_family
from robust_cover.milp import (StandardFormModel, build_gutlcscp_la, build_rutlcscp_la_rc,
                               build_tlcscp, expected_counts, log_deviation,
                               selection_from_values)
from robust_cover.oracle import TOL_FEAS, clamp_logs, dual_value, worst_case_miss
from robust_cover.solver import exhaustive_solve, solve, solve_lp_relaxation


def test_full_size_counts():
    inst = generate(table1_config("P1", 0))
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.9, 2))
    want = expected_counts(20, 20, 20, 17)
    assert (model.n_vars, model.n_rows) == (want["variables"], want["rows"]) == (880, 1180)
    counts = model.label_counts()
    for key in ("box_y", "box_z", "tangent", "dual_y", "dual_z"):
        assert counts[key] == want[key]


def test_log_deviation_modes():
    nom = np.array([0.1, 0.0, 1.0, 0.5])
    dev = np.array([0.1, 0.0, 0.0, 0.5])
    assert log_deviation(nom, dev) == pytest.approx([math.log(2), 0.0, 0.0, math.log(2)])
    lit = log_deviation(nom, dev, literal=True)
    assert lit[0] == pytest.approx(math.log(0.2) - math.log(0.1))
    assert lit[2] == 0.0


def test_model_rejects_bad_input():
    m = StandardFormModel()
    m.add_variable("x")
    with pytest.raises(ValueError):
        m.add_variable("x")
    with pytest.raises(ValueError):
        m.add_constraint([0], [1.0], "<", 1.0, "r")
    with pytest.raises(ValueError):
        m.add_constraint([3], [1.0], "<=", 1.0, "r")


def test_zero_coefficients_dropped():
    m = StandardFormModel()
    m.add_variable("a")
    m.add_variable("b")
    r = m.add_constraint([0, 1], [0.0, 2.0], "<=", 1.0, "r")
    assert m.constraints[r].index.tolist() == [1]


def test_tlcscp_is_plain_cover():
    inst = make_instance([1.0, 5.0], [2.0], p_nom=[[0.1, 0.1], [1.0, 0.1]], q_nom=[[0.1], [0.1]])
    sol = solve(build_tlcscp(inst))
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(7.0)
    assert sol.y.tolist() == [0, 1]


def test_robust_row_matches_worst_case_at_binary_points():
    # for a fixed selection, the minimum over the dual columns of the box row
    # left side equals the worst-case log miss
    inst = small_instance(5)
    cfg = RobustConfig(0.85, 2)
    model = build_rutlcscp_la_rc(inst, cfg)
    sep = CoverSeparator.from_model(model)
    rng = np.random.default_rng(1)
    for _ in range(20):
        y = (rng.random(inst.n1) < 0.5).astype(int)
        z = (rng.random(inst.n2) < 0.5).astype(int)
        la_ok = True
        for node in sep.nodes:
            ay = {a for a, col in enumerate(node.y_cols) if y[int(model.variables[col].name[2:])]}
            az = {b for b, col in enumerate(node.z_cols) if z[int(model.variables[col].name[2:])]}
            la_ok &= node.passes(ay, az, TOL_FEAS)
        fixed = exhaustive_solve(_fixed(inst, y, z), cfg, "la")
        assert la_ok == (fixed.status == "optimal")


def _fixed(inst, y, z):
    # zero-cost copy restricted to the chosen sites, so "la" feasibility of
    # the whole selection is what the exhaustive search reports
    keep_y, keep_z = np.flatnonzero(y), np.flatnonzero(z)
    return make_instance(np.zeros(keep_y.size), np.zeros(keep_z.size),
                         p_nom=inst.p_nom[:, keep_y].reshape(inst.m, -1),
                         p_dev=inst.p_dev[:, keep_y].reshape(inst.m, -1),
                         q_nom=inst.q_nom[:, keep_z].reshape(inst.m, -1),
                         q_dev=inst.q_dev[:, keep_z].reshape(inst.m, -1))


@pytest.mark.parametrize("seed", range(8))
def test_tighten_keeps_optimum(seed):
    inst = small_instance(seed + 300)
    for gamma in (0, 2):
        cfg = RobustConfig(0.85, gamma)
        a = solve(build_rutlcscp_la_rc(inst, cfg))
        b = solve(build_rutlcscp_la_rc(inst, cfg, tighten=True))
        assert a.status == b.status
        if a.status == "optimal":
            assert a.objective == pytest.approx(b.objective, rel=1e-9)
    g1 = solve(build_gutlcscp_la(inst, 0.85, DEFAULT_BETAS))
    g2 = solve(build_gutlcscp_la(inst, 0.85, DEFAULT_BETAS, tighten=True))
    assert g1.objective == pytest.approx(g2.objective, rel=1e-9) or g1.objective == g2.objective


def test_tighten_with_literal_dual_rejected():
    with pytest.raises(ValueError):
        build_rutlcscp_la_rc(small_instance(0), RobustConfig(0.9, 1), literal_dual=True, tighten=True)


def test_literal_dual_model_builds_and_solves():
    inst = small_instance(2)
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.8, 1), literal_dual=True)
    assert model.n_rows == build_rutlcscp_la_rc(inst, RobustConfig(0.8, 1)).n_rows
    sol = solve(model)
    assert sol.status in ("optimal", "infeasible")


def test_selection_from_values():
    inst = small_instance(0)
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.9, 0))
    x = np.zeros(model.n_vars)
    x[model.var("y_1")] = 1.0
    x[model.var(f"z_{inst.n2 - 1}")] = 0.9999999
    y, z = selection_from_values(model, x)
    assert y.tolist() == [0, 1] + [0] * (inst.n1 - 2)
    assert z[-1] == 1 and z.sum() == 1


def test_box_rhs_is_log_one_minus_alpha():
    inst = small_instance(0)
    model = build_gutlcscp_la(inst, 0.8, [0.5])
    box = [c for c in model.constraints if c.label == "box_y[0]"][0]
    assert box.rhs == pytest.approx(math.log(0.2))
    tan = [c for c in model.constraints if c.label.startswith("tangent[0,")][0]
    assert tan.rhs == build_family(0.8, [0.5]).cuts[0].log_rhs


def test_counting_examples():
    one = make_instance([5.0], [7.0], p_nom=[[0.1]], q_nom=[[0.2]])
    sol = solve(build_tlcscp(one))
    assert sol.objective == 12.0 and sol.y.tolist() == [1] and sol.z.tolist() == [1]
    no_z = make_instance([5.0], [7.0], p_nom=[[0.1]], q_nom=[[1.0]])
    assert solve(build_tlcscp(no_z)).status == "infeasible"
    three = make_instance(np.ones(3), np.ones(3), p_nom=np.full((3, 3), 0.1), q_nom=np.full((3, 3), 0.1))
    m = build_tlcscp(three)
    assert (m.n_vars, m.n_rows) == (6, 6)
    two = make_instance(np.ones(3), np.ones(3), p_nom=np.full((2, 3), 0.1), q_nom=np.full((2, 3), 0.1))
    assert build_gutlcscp_la(two, 0.9, DEFAULT_BETAS).n_rows == 38


def test_dual_columns_reproduce_worst_case():
    # fix y, minimise one node's sum(zeta) + Gamma * eta over the dual rows
    inst = small_instance(21)
    gamma = 2
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.85, gamma))
    rows = list(model.constraints)
    rng = np.random.default_rng(2)
    for _ in range(10):
        y = (rng.random(inst.n1) < 0.6).astype(int)
        i = int(rng.integers(inst.m))
        for j in range(inst.n1):
            v = model.variables[model.var(f"y_{j}")]
            v.lower = v.upper = float(y[j])
        model.constraints = [c for c in rows if c.label.startswith(f"dual_y[{i},")]
        model.objective = {model.var(f"zeta1_{i}_{j}"): 1.0 for j in range(inst.n1)}
        model.objective[model.var(f"eta1_{i}")] = float(gamma)
        lp = solve_lp_relaxation(model)
        _, d = clamp_logs(inst.p_nom[i], inst.p_dev[i])
        sel = y.astype(bool)
        assert lp.objective == pytest.approx(dual_value(d[sel], gamma), abs=1e-9)
        wc = worst_case_miss(inst.p_nom[i], inst.p_dev[i], y, gamma).value
        assert lp.objective == pytest.approx(math.log(wc) - np.log(inst.p_nom[i][sel]).sum(), abs=1e-9)


def test_objective_non_decreasing_in_gamma():
    for seed in (31, 32, 33):
        inst = small_instance(seed)
        objs = [solve(build_rutlcscp_la_rc(inst, RobustConfig(0.8, g))).objective for g in range(inst.m + 1)]
        assert all(a <= b + 1e-9 for a, b in zip(objs, objs[1:]))


def test_row_labels_name_their_node():
    inst = small_instance(6)
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.9, 1))
    labels = [c.label for c in model.constraints]
    assert f"box_z[{inst.m - 1}]" in labels
    assert f"tangent[0,16]" in labels
    assert f"dual_z[{inst.m - 1},{inst.n2 - 1}]" in labels
    assert len(set(labels)) == len(labels)
