import numpy as np
import pytest

from _support import small_instance
from robust_cover.core import DEFAULT_BETAS, RobustConfig, make_instance
from robust_cover.cuts import CoverSeparator
from robust_cover.lpformat import dumps_lp, loads_lp
from robust_cover.milp import StandardFormModel, build_gutlcscp_la, build_rutlcscp_la_rc, build_tlcscp
from robust_cover.oracle import TOL_FEAS


def _binary_points(n1, n2, rng, k=200):
    for _ in range(k):
        yield (rng.random(n1) < rng.random()).astype(float), (rng.random(n2) < rng.random()).astype(float)


def _node_ok(model, node, y, z):
    ay = {a for a, col in enumerate(node.y_cols) if y[int(model.variables[col].name[2:])]}
    az = {b for b, col in enumerate(node.z_cols) if z[int(model.variables[col].name[2:])]}
    return node.passes(ay, az, TOL_FEAS)


@pytest.mark.parametrize("tighten", [False, True])
def test_cuts_never_remove_feasible_selections(tighten):
    inst = small_instance(77)
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.85, 1), tighten=tighten)
    sep = CoverSeparator.from_model(model)
    assert sep is not None and len(sep.nodes) == inst.m
    rng = np.random.default_rng(0)
    ycol = [model.var(f"y_{j}") for j in range(inst.n1)]
    zcol = [model.var(f"z_{k}") for k in range(inst.n2)]
    cuts = []
    for _ in range(30):
        x = np.zeros(model.n_vars)
        x[ycol] = rng.random(inst.n1) * 0.4
        x[zcol] = rng.random(inst.n2) * 0.4
        cuts += sep(x)
    assert cuts
    for y, z in _binary_points(inst.n1, inst.n2, rng):
        if not all(_node_ok(model, node, y, z) for node in sep.nodes):
            continue
        x = np.zeros(model.n_vars)
        x[ycol], x[zcol] = y, z
        for idx, coef, sense, rhs in cuts:
            assert sense == ">=" and coef @ x[idx] >= rhs


def test_cut_is_violated_at_separated_point():
    inst = small_instance(78)
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.9, 0))
    sep = CoverSeparator.from_model(model)
    x = np.zeros(model.n_vars)
    for idx, coef, sense, rhs in sep(x):
        assert coef @ x[idx] < rhs


def test_detection_by_model_kind():
    inst = small_instance(3)
    assert CoverSeparator.from_model(build_gutlcscp_la(inst, 0.85, DEFAULT_BETAS)) is not None
    assert CoverSeparator.from_model(build_tlcscp(inst)) is None


@pytest.mark.parametrize("dev, detected", [(0.001, False), (0.08, True)])
def test_literal_dual_detected_only_when_monotone(dev, detected):
    # with ln(p + dev) - ln(dev) a site helps iff p (p + dev) <= dev
    inst = make_instance([1.0, 1.0], [1.0], p_nom=[[0.1, 0.2]], p_dev=[[dev, dev]],
                         q_nom=[[0.05]], q_dev=[[dev]])
    literal = build_rutlcscp_la_rc(inst, RobustConfig(0.85, 1), literal_dual=True)
    assert (CoverSeparator.from_model(literal) is not None) == detected


def test_detection_survives_lp_round_trip():
    inst = small_instance(4)
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.8, 2))
    a = CoverSeparator.from_model(model)
    b = CoverSeparator.from_model(loads_lp(dumps_lp(model)))
    assert a.nodes[0].budget == b.nodes[0].budget == 2
    for na, nb in zip(a.nodes, b.nodes):
        assert np.array_equal(na.Ay, nb.Ay) and np.array_equal(na.d1, nb.d1)


def test_greedy_cover_is_maximal():
    inst = small_instance(12)
    model = build_rutlcscp_la_rc(inst, RobustConfig(0.85, 1))
    sep = CoverSeparator.from_model(model)
    node = sep.nodes[0]
    x = np.zeros(model.n_vars)
    cut = sep.node_cut(node, x)
    assert cut is not None
    inside = set(cut[0].tolist())
    fail_y = {a for a, c in enumerate(node.y_cols) if c not in inside}
    fail_z = {b for b, c in enumerate(node.z_cols) if c not in inside}
    assert not node.passes(fail_y, fail_z, TOL_FEAS)
    for a in set(range(node.y_cols.size)) - fail_y:
        assert node.passes(fail_y | {a}, fail_z, TOL_FEAS)
    for b in set(range(node.z_cols.size)) - fail_z:
        assert node.passes(fail_y, fail_z | {b}, TOL_FEAS)


def test_unlabelled_rows_give_no_separator():
    m = StandardFormModel()
    m.add_variable("y_0", "binary")
    m.add_constraint([0], [1.0], ">=", 1.0, "custom")
    assert CoverSeparator.from_model(m) is None
