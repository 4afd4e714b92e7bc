"""Cover inequalities for the linearised (robust) cover models.

For one demand node, whether a 0/1 selection passes the box and tangent
rows depends only on the selected sites: each row reads
``a . y + w * top_G(d * y) + (same for z) <= rhs``. When ``a_j + w * d_j <= 0``
for every site (true for the models built here, since ``ln(p) + d =
ln(p_nom + p_dev) <= 0``), adding a site never raises a row, so the passing
selections are closed upwards. If a
set ``U`` of sites fails, any passing selection must use a site outside
``U``:

    sum_{j in range, j not in U_y} y_j + sum_{k in range, k not in U_z} z_k >= 1.

The separator grows ``U`` greedily from the current LP point (largest values
first) into a maximal failing set.

The node data is read back from the model rows themselves (row labels
``box_y[i]``, ``box_z[i]``, ``tangent[i,t]``, ``dual_y[i,j]``, ``dual_z[i,k]``
and column names ``y_j``, ``z_k``, ``eta1_i``, ``eta2_i``), so models loaded
from LP files get the same cuts as freshly built ones.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .oracle import TOL_FEAS

_LABEL = re.compile(r"^(box_y|box_z|tangent|dual_y|dual_z)\[(\d+)(?:,(\d+))?\]$")


@dataclass
class NodeRows:
    """The box and tangent rows of one demand node, restricted to its sites.

    Row ``r`` reads ``Ay[r] . y + wy[r] * top_G(d1 * y) + Az[r] . z +
    wz[r] * top_G(d2 * z) <= rhs[r]`` once the dual columns are minimised out.
    """

    y_cols: np.ndarray      # model columns of the sites that appear in the rows
    z_cols: np.ndarray
    Ay: np.ndarray
    Az: np.ndarray
    wy: np.ndarray
    wz: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    budget: int
    rhs: np.ndarray

    def passes(self, ay, az, tol: float) -> bool:
        """Does selecting positions ``ay`` / ``az`` (into the site arrays) pass every row?"""
        ay, az = list(ay), list(az)
        lhs = self.Ay[:, ay].sum(axis=1) + self.Az[:, az].sum(axis=1)
        if self.budget:
            lhs = lhs + self.wy * _top(self.d1, ay, self.budget) + self.wz * _top(self.d2, az, self.budget)
        return bool(np.all(lhs <= self.rhs + tol))


def _top(dev, chosen, budget) -> float:
    if not chosen:
        return 0.0
    return float(np.sort(np.maximum(dev[chosen], 0.0))[::-1][:budget].sum())


class CoverSeparator:
    """Callable ``x -> [(index, coef, sense, rhs), ...]`` over model columns."""

    def __init__(self, nodes: list[NodeRows], tol: float = TOL_FEAS):
        self.nodes = nodes
        self.tol = tol

    @classmethod
    def from_model(cls, model, tol: float = TOL_FEAS):
        """Recover the node structure from a model; ``None`` if it does not fit.

        Every row must carry one of the recognised labels, and adding a site
        must never raise a row (``a_j + w * d_j <= 0``), otherwise the cover
        argument breaks and no separator is returned.
        """
        names = [v.name for v in model.variables]
        for v in model.variables:
            if v.name[:4] in ("zeta", "eta1", "eta2") and (v.lower != 0.0 or v.upper != np.inf):
                return None
        groups: dict[int, dict] = {}
        for con in model.constraints:
            mt = _LABEL.match(con.label)
            if mt is None:
                return None
            kind, i = mt.group(1), int(mt.group(2))
            g = groups.setdefault(i, {"rows": [], "dual_y": {}, "dual_z": {}})
            coef = {}
            for j, a in zip(con.index, con.coef):
                coef[names[j]] = coef.get(names[j], 0.0) + float(a)
            if kind.startswith("dual"):
                side = kind[-1]
                if con.sense != ">=" or con.rhs != 0.0:
                    return None
                for k, a in coef.items():
                    if _is_sel(k, side):
                        g[kind][int(k[2:])] = -a
            else:
                if con.sense != "<=":
                    return None
                g["rows"].append((kind, coef, float(con.rhs)))
        var = model.variable_map
        nodes = []
        for i in sorted(groups):
            g = groups[i]
            if not any(k == "box_y" for k, _, _ in g["rows"]):
                return None
            ysites = sorted({int(k[2:]) for _, c, _ in g["rows"] for k, a in c.items()
                             if _is_sel(k, "y") and a != 0.0})
            zsites = sorted({int(k[2:]) for _, c, _ in g["rows"] for k, a in c.items()
                             if _is_sel(k, "z") and a != 0.0})
            ay_rows, az_rows, wy, wz, rhs = [], [], [], [], []
            budget = None
            for kind, c, r in g["rows"]:
                ay_rows.append([c.get(f"y_{j}", 0.0) for j in ysites])
                az_rows.append([c.get(f"z_{k}", 0.0) for k in zsites])
                w = []
                for side in ("1", "2"):
                    zs = {a for k, a in c.items() if k.startswith(f"zeta{side}_{i}_")}
                    if len(zs) > 1:
                        return None
                    w.append(zs.pop() if zs else 0.0)
                    eta = c.get(f"eta{side}_{i}", 0.0)
                    if w[-1] > 0:
                        ratio = eta / w[-1]
                        if budget is None:
                            budget = ratio
                        elif abs(ratio - budget) > 1e-9 * max(1.0, budget):
                            return None
                    elif eta != 0.0:
                        return None
                wy.append(w[0])
                wz.append(w[1])
                rhs.append(r)
            budget = 0.0 if budget is None else budget
            if abs(budget - round(budget)) > 1e-9 or budget < 0:
                return None
            d1 = np.array([g["dual_y"].get(j, 0.0) for j in ysites])
            d2 = np.array([g["dual_z"].get(k, 0.0) for k in zsites])
            node = NodeRows(np.array([var[f"y_{j}"] for j in ysites], dtype=np.int64),
                            np.array([var[f"z_{k}"] for k in zsites], dtype=np.int64),
                            np.array(ay_rows).reshape(len(rhs), len(ysites)),
                            np.array(az_rows).reshape(len(rhs), len(zsites)),
                            np.array(wy), np.array(wz), d1, d2, int(round(budget)), np.array(rhs))
            if not _monotone(node):
                return None
            nodes.append(node)
        return cls(nodes, tol) if nodes else None

    def node_cut(self, node: NodeRows, x, min_violation: float = 1e-6):
        """Greedy cover cut for one node at point ``x``, or ``None`` if not violated."""
        xy = x[node.y_cols]
        xz = x[node.z_cols]
        # largest LP values first; ties keep column order
        cand = [(-xy[a], 0, a) for a in range(xy.size)] + [(-xz[b], 1, b) for b in range(xz.size)]
        cand.sort()
        fail = (set(), set())
        for _, side, pos in cand:
            fail[side].add(pos)
            if node.passes(fail[0], fail[1], self.tol):
                fail[side].discard(pos)
        rest_y = [a for a in range(xy.size) if a not in fail[0]]
        rest_z = [b for b in range(xz.size) if b not in fail[1]]
        if float(xy[rest_y].sum() + xz[rest_z].sum()) >= 1.0 - min_violation:
            return None
        idx = np.concatenate([node.y_cols[rest_y], node.z_cols[rest_z]]).astype(np.int64)
        return idx, np.ones(idx.size), ">=", 1.0

    def __call__(self, x) -> list:
        x = np.asarray(x, dtype=float)
        out = []
        for node in self.nodes:
            cut = self.node_cut(node, x)
            if cut is not None:
                out.append(cut)
        return out


def _is_sel(name: str, side: str) -> bool:
    return name.startswith(side + "_") and name[2:].isdigit()


def _monotone(node: NodeRows) -> bool:
    gy = node.wy[:, None] * np.maximum(node.d1, 0.0) if node.budget else 0.0
    gz = node.wz[:, None] * np.maximum(node.d2, 0.0) if node.budget else 0.0
    return bool(np.all(node.Ay + gy <= 1e-12) and np.all(node.Az + gz <= 1e-12))
