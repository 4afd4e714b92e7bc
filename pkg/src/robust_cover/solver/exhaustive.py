"""Brute-force reference solver for tiny instances.

All ``2**n1`` y-selections and ``2**n2`` z-selections are tabulated
separately (worst-case log miss per demand node), then every pair is tested
block by block in increasing y-cost order, so the search stops as soon as no
cheaper pair can exist.
"""
from __future__ import annotations

import math
import time

import numpy as np

from ..core import PROB_FLOOR, ConfigError, Instance, RobustConfig, Solution
from ..linearization import build_family
from ..milp import log_deviation
from ..oracle import TOL_FEAS, _log_terms, _top_gamma_sum

MAX_SITES = 24
_BLOCK = 256


def _subsets(n: int) -> np.ndarray:
    """All 0/1 rows of length ``n`` (row ``k`` is the binary expansion of ``k``)."""
    k = np.arange(2 ** n, dtype=np.int64)
    return ((k[:, None] >> np.arange(n)) & 1).astype(np.int8)


def _log_miss_table(log_nom, log_dev, table, gammas) -> np.ndarray:
    """``(2**n, m)`` worst-case log miss of every subset at every node."""
    out = np.empty((table.shape[0], log_nom.shape[0]))
    sel = table.astype(bool)
    for i in range(log_nom.shape[0]):
        base = np.where(sel, log_nom[i], 0.0).sum(axis=1)
        dev = np.where(sel, log_dev[i], 0.0)
        out[:, i] = base + _top_gamma_sum(dev, np.full(table.shape[0], gammas[i]))
    return out


def exhaustive_solve(instance: Instance, config: RobustConfig, variant: str = "exact",
                     tol: float = TOL_FEAS) -> Solution:
    """Cheapest selection passing the exact robust cover test or the linearised rows.

    ``variant="exact"`` requires worst-case coverage ``>= alpha - tol`` at every
    node. ``variant="la"`` requires the box and tangent rows to hold with the
    model's clamped logs and log deviations, within ``tol``.
    """
    n1, n2, m = instance.n1, instance.n2, instance.m
    if n1 + n2 > MAX_SITES:
        raise ConfigError(f"exhaustive search is limited to n1 + n2 <= {MAX_SITES}, got {n1 + n2}")
    if variant not in ("exact", "la"):
        raise ConfigError(f"unknown variant {variant!r}; expected 'exact' or 'la'")
    t0 = time.perf_counter()
    gam = config.budgets(m)
    ty, tz = _subsets(n1), _subsets(n2)
    if variant == "exact":
        ly, ry = _log_terms(instance.p_nom, instance.p_dev)
        lz, rz = _log_terms(instance.q_nom, instance.q_dev)
        with np.errstate(under="ignore"):
            miss_y = np.exp(_log_miss_table(ly, ry, ty, gam))
            miss_z = np.exp(_log_miss_table(lz, rz, tz, gam))
        keep_y = 1.0 - miss_y
        keep_z = 1.0 - miss_z

        def block_ok(rows):
            ok = np.ones((rows.size, keep_z.shape[0]), dtype=bool)
            for i in range(m):
                ok &= keep_y[rows, i][:, None] * keep_z[None, :, i] >= config.alpha - tol
            return ok
    else:
        family = build_family(config.alpha, config.beta_list)
        lm = _log_miss_table(np.log(np.clip(instance.p_nom, PROB_FLOOR, 1.0)),
                             log_deviation(instance.p_nom, instance.p_dev), ty, gam)
        ln = _log_miss_table(np.log(np.clip(instance.q_nom, PROB_FLOOR, 1.0)),
                             log_deviation(instance.q_nom, instance.q_dev), tz, gam)
        # largest admissible ln n for each (y-subset, node)
        limit = np.full(lm.shape, family.box_rhs + tol)
        limit[lm > family.box_rhs + tol] = -math.inf
        for cut in family.cuts:
            limit = np.minimum(limit, (cut.log_rhs + tol - cut.beta * lm) / cut.gamma)

        def block_ok(rows):
            ok = np.ones((rows.size, ln.shape[0]), dtype=bool)
            for i in range(m):
                ok &= ln[None, :, i] <= limit[rows, i][:, None]
            return ok

    cost_y = ty @ np.asarray(instance.cost_y, dtype=float)
    cost_z = tz @ np.asarray(instance.cost_z, dtype=float)
    order = np.argsort(cost_y, kind="stable")
    cz_min = cost_z.min()
    best, best_pair = math.inf, None
    for start in range(0, order.size, _BLOCK):
        rows = order[start:start + _BLOCK]
        if cost_y[rows[0]] + cz_min >= best:
            break
        ok = block_ok(rows)
        if not ok.any():
            continue
        total = np.where(ok, cost_y[rows][:, None] + cost_z[None, :], math.inf)
        k = int(np.argmin(total))
        a, b = divmod(k, total.shape[1])
        if total[a, b] < best:
            best, best_pair = float(total[a, b]), (int(rows[a]), b)
    elapsed = time.perf_counter() - t0
    if best_pair is None:
        return Solution(y=np.zeros(n1, dtype=int), z=np.zeros(n2, dtype=int), objective=math.inf,
                        status="infeasible", best_bound=math.inf, wall_time_s=elapsed)
    y = ty[best_pair[0]].astype(int)
    z = tz[best_pair[1]].astype(int)
    obj = float(np.asarray(instance.cost_y) @ y + np.asarray(instance.cost_z) @ z)
    return Solution(y=y, z=z, objective=obj, status="optimal", best_bound=obj, wall_time_s=elapsed)
