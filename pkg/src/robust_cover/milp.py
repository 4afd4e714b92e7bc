"""Solver-agnostic MILP models for the three covering variants.

* :func:`build_tlcscp` - deterministic two-level cover (a site covers a node
  iff its miss probability is below 1).
* :func:`build_gutlcscp_la` - probabilistic cover, tangent-linearised, using
  nominal miss probabilities.
* :func:`build_rutlcscp_la_rc` - the Gamma-robust counterpart: the worst-case
  log-deviation of each node is bounded through dual variables ``zeta``/``eta``.

Columns are ordered ``y, z, zeta1, zeta2, eta1, eta2``; rows of the robust
model are ordered per node (``box_y``, ``box_z``, one ``tangent`` row per beta)
followed by all ``dual_y`` rows and all ``dual_z`` rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import sparse

from .core import PROB_FLOOR, Instance, RobustConfig
from .linearization import build_family

SENSES = ("<=", ">=", "=")


@dataclass
class Variable:
    name: str
    kind: str = "continuous"   # "binary" | "integer" | "continuous"
    lower: float = 0.0
    upper: float = math.inf

    @property
    def is_integer(self) -> bool:
        return self.kind in ("binary", "integer")


@dataclass
class Constraint:
    index: np.ndarray
    coef: np.ndarray
    sense: str
    rhs: float
    label: str


@dataclass
class StandardFormModel:
    """Minimisation MILP with sparse rows."""

    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    objective: dict[int, float] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    variable_map: dict[str, int] = field(default_factory=dict)
    objective_offset: float = 0.0
    # optional cut generator ``x -> rows`` valid for every 0/1-feasible point;
    # when unset the solver tries to derive cover cuts from the row labels
    separator: object = field(default=None, repr=False, compare=False)

    def add_variable(self, name: str, kind: str = "continuous", lower: float = 0.0,
                     upper: float = math.inf, cost: float = 0.0) -> int:
        if name in self.variable_map:
            raise ValueError(f"duplicate variable {name!r}")
        if kind == "binary":
            lower, upper = max(lower, 0.0), min(upper, 1.0)
        idx = len(self.variables)
        self.variables.append(Variable(name, kind, float(lower), float(upper)))
        self.variable_map[name] = idx
        if cost:
            self.objective[idx] = float(cost)
        return idx

    def add_constraint(self, index, coef, sense: str, rhs: float, label: str) -> int:
        if sense not in SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        index = np.asarray(index, dtype=np.int64)
        coef = np.asarray(coef, dtype=float)
        keep = coef != 0.0
        index, coef = index[keep], coef[keep]
        if index.size and (index.min() < 0 or index.max() >= len(self.variables)):
            raise ValueError(f"constraint {label!r} references an undeclared variable")
        self.constraints.append(Constraint(index, coef, sense, float(rhs), label))
        return len(self.constraints) - 1

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.constraints)

    def var(self, name: str) -> int:
        return self.variable_map[name]

    def cost_vector(self) -> np.ndarray:
        c = np.zeros(self.n_vars)
        for j, v in self.objective.items():
            c[j] = v
        return c

    def matrix(self) -> sparse.csr_matrix:
        rows, cols, vals = [], [], []
        for r, con in enumerate(self.constraints):
            rows.append(np.full(con.index.size, r))
            cols.append(con.index)
            vals.append(con.coef)
        if rows:
            rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(self.n_rows, self.n_vars))

    def row_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.full(self.n_rows, -math.inf)
        hi = np.full(self.n_rows, math.inf)
        for r, con in enumerate(self.constraints):
            if con.sense in (">=", "="):
                lo[r] = con.rhs
            if con.sense in ("<=", "="):
                hi[r] = con.rhs
        return lo, hi

    def col_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([v.lower for v in self.variables]),
                np.array([v.upper for v in self.variables]))

    def integrality(self) -> np.ndarray:
        return np.array([v.is_integer for v in self.variables], dtype=bool)

    def label_counts(self) -> dict[str, int]:
        """Row count per constraint family (label prefix before the node index)."""
        out: dict[str, int] = {}
        for con in self.constraints:
            fam = con.label.split("[")[0]
            out[fam] = out.get(fam, 0) + 1
        return out

    def row_activity(self, x) -> np.ndarray:
        return self.matrix() @ np.asarray(x, dtype=float)

    def is_feasible(self, x, tol: float = 1e-7) -> bool:
        x = np.asarray(x, dtype=float)
        lo, hi = self.col_bounds()
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            return False
        act = self.row_activity(x)
        rlo, rhi = self.row_bounds()
        return bool(np.all(act >= rlo - tol) and np.all(act <= rhi + tol))

    def objective_value(self, x) -> float:
        return float(self.cost_vector() @ np.asarray(x, dtype=float)) + self.objective_offset


def _log_nominal(nom) -> np.ndarray:
    return np.log(np.clip(nom, PROB_FLOOR, 1.0))


def log_deviation(nom, dev, literal: bool = False) -> np.ndarray:
    """Per-pair coefficient of the dual rows.

    Default: ``ln(nom + dev) - ln(nom)``, the log-space rise of a miss
    probability moving to its worst-case value. With ``literal`` the
    alternative ``ln(nom + dev) - ln(dev)`` is used on in-range pairs (kept
    for comparison only; it can be negative or very large).
    """
    lo = np.clip(nom, PROB_FLOOR, 1.0)
    hi = np.maximum(np.clip(np.asarray(nom) + np.asarray(dev), PROB_FLOOR, 1.0), lo)
    if not literal:
        return np.log(hi) - np.log(lo)
    d = np.log(hi) - np.log(np.clip(dev, PROB_FLOOR, 1.0))
    return np.where(np.asarray(nom) < 1.0, d, 0.0)


def _add_selection_vars(model: StandardFormModel, inst: Instance):
    ys = [model.add_variable(f"y_{j}", "binary", cost=inst.cost_y[j]) for j in range(inst.n1)]
    zs = [model.add_variable(f"z_{k}", "binary", cost=inst.cost_z[k]) for k in range(inst.n2)]
    return np.array(ys, dtype=np.int64), np.array(zs, dtype=np.int64)


def build_tlcscp(instance: Instance) -> StandardFormModel:
    """Deterministic cover: every node needs one in-range y-site and one in-range z-site."""
    model = StandardFormModel(name="tlcscp")
    ys, zs = _add_selection_vars(model, instance)
    a, b = instance.y_in_range, instance.z_in_range
    for i in range(instance.m):
        model.add_constraint(ys[a[i]], np.ones(a[i].sum()), ">=", 1.0, f"cover_y[{i}]")
    for i in range(instance.m):
        model.add_constraint(zs[b[i]], np.ones(b[i].sum()), ">=", 1.0, f"cover_z[{i}]")
    return model


def build_gutlcscp_la(instance: Instance, alpha: float,
                      beta_list: Iterable[float], tighten: bool = False) -> StandardFormModel:
    """Tangent-linearised probabilistic cover on nominal miss probabilities.

    With ``tighten`` the log coefficients are capped as in
    :func:`build_rutlcscp_la_rc`.
    """
    family = build_family(alpha, beta_list)
    model = StandardFormModel(name="gutlcscp_la")
    ys, zs = _add_selection_vars(model, instance)
    lp, lq = _log_nominal(instance.p_nom), _log_nominal(instance.q_nom)
    zero1, zero2 = np.zeros(instance.n1), np.zeros(instance.n2)
    for i in range(instance.m):
        model.add_constraint(ys, _cap(lp[i], zero1, family.box_rhs, 1.0, tighten),
                             "<=", family.box_rhs, f"box_y[{i}]")
        model.add_constraint(zs, _cap(lq[i], zero2, family.box_rhs, 1.0, tighten),
                             "<=", family.box_rhs, f"box_z[{i}]")
        for t, cut in enumerate(family.cuts):
            cy = _cap(lp[i], zero1, cut.log_rhs, cut.beta, tighten)
            cz = _cap(lq[i], zero2, cut.log_rhs, cut.gamma, tighten)
            model.add_constraint(np.concatenate([ys, zs]),
                                 np.concatenate([cut.beta * cy, cut.gamma * cz]),
                                 "<=", cut.log_rhs, f"tangent[{i},{t}]")
    return model


def _cap(log_nom, d, rhs, weight, tighten):
    """Capped log coefficients for one side of one row.

    A selected site whose worst-case term ``weight * (ln p - d)`` already
    reaches ``rhs`` satisfies the row by itself, whatever else is selected
    (every other site contributes ``ln p - d <= 0``). Raising its
    coefficient to ``rhs / weight - d`` keeps that property and leaves the
    set of feasible 0/1 selections unchanged, but gives a much tighter LP
    relaxation.
    """
    if not tighten:
        return log_nom
    return np.maximum(log_nom, rhs / weight - d)


def build_rutlcscp_la_rc(instance: Instance, config: RobustConfig,
                         literal_dual: bool = False,
                         tighten: bool = False) -> StandardFormModel:
    """Compact robust counterpart of the linearised Gamma-robust cover.

    For node ``i`` the worst-case log miss probability of the y-side,
    ``sum_j ln(p_nom_ij) y_j + max_{|U| <= G_i} sum_{j in U} d_ij y_j``, is
    replaced by ``sum_j ln(p_nom_ij) y_j + sum_j zeta1_ij + G_i eta1_i`` with
    ``zeta1_ij + eta1_i >= d_ij y_j``; likewise for z.

    ``tighten`` caps the ``ln(p_nom)`` coefficients of every row (see
    :func:`_cap`); the 0/1-feasible selections and the optimum are unchanged
    while the LP relaxation becomes much stronger. It needs ``d >= 0`` and so
    cannot be combined with ``literal_dual``.
    """
    if tighten and literal_dual:
        raise ValueError("tighten needs non-negative dual coefficients")
    m, n1, n2 = instance.m, instance.n1, instance.n2
    family = build_family(config.alpha, config.beta_list)
    gam = config.budgets(m).astype(float)
    model = StandardFormModel(name="rutlcscp_la_rc")
    ys, zs = _add_selection_vars(model, instance)
    zeta1 = np.array([[model.add_variable(f"zeta1_{i}_{j}") for j in range(n1)]
                      for i in range(m)], dtype=np.int64).reshape(m, n1)
    zeta2 = np.array([[model.add_variable(f"zeta2_{i}_{k}") for k in range(n2)]
                      for i in range(m)], dtype=np.int64).reshape(m, n2)
    eta1 = np.array([model.add_variable(f"eta1_{i}") for i in range(m)], dtype=np.int64)
    eta2 = np.array([model.add_variable(f"eta2_{i}") for i in range(m)], dtype=np.int64)

    lp, lq = _log_nominal(instance.p_nom), _log_nominal(instance.q_nom)
    d1 = log_deviation(instance.p_nom, instance.p_dev, literal_dual)
    d2 = log_deviation(instance.q_nom, instance.q_dev, literal_dual)

    for i in range(m):
        # with no deviation budget the dual terms vanish from every row
        e1 = d1[i] if gam[i] > 0 else np.zeros(n1)
        e2 = d2[i] if gam[i] > 0 else np.zeros(n2)
        idx_y = np.concatenate([ys, zeta1[i], [eta1[i]]])
        idx_z = np.concatenate([zs, zeta2[i], [eta2[i]]])
        tail_y = np.concatenate([np.ones(n1), [gam[i]]])
        tail_z = np.concatenate([np.ones(n2), [gam[i]]])
        model.add_constraint(idx_y, np.concatenate([_cap(lp[i], e1, family.box_rhs, 1.0, tighten), tail_y]),
                             "<=", family.box_rhs, f"box_y[{i}]")
        model.add_constraint(idx_z, np.concatenate([_cap(lq[i], e2, family.box_rhs, 1.0, tighten), tail_z]),
                             "<=", family.box_rhs, f"box_z[{i}]")
        idx = np.concatenate([idx_y, idx_z])
        for t, cut in enumerate(family.cuts):
            vy = np.concatenate([_cap(lp[i], e1, cut.log_rhs, cut.beta, tighten), tail_y])
            vz = np.concatenate([_cap(lq[i], e2, cut.log_rhs, cut.gamma, tighten), tail_z])
            model.add_constraint(idx, np.concatenate([cut.beta * vy, cut.gamma * vz]),
                                 "<=", cut.log_rhs, f"tangent[{i},{t}]")
    for i in range(m):
        for j in range(n1):
            model.add_constraint([zeta1[i, j], eta1[i], ys[j]], [1.0, 1.0, -d1[i, j]],
                                 ">=", 0.0, f"dual_y[{i},{j}]")
    for i in range(m):
        for k in range(n2):
            model.add_constraint([zeta2[i, k], eta2[i], zs[k]], [1.0, 1.0, -d2[i, k]],
                                 ">=", 0.0, f"dual_z[{i},{k}]")
    return model


def expected_counts(m: int, n1: int, n2: int, n_betas: int) -> dict[str, int]:
    """Variable and row counts of the robust model."""
    return {
        "variables": n1 + n2 + m * n1 + m * n2 + 2 * m,
        "rows": m * (2 + n_betas) + m * n1 + m * n2,
        "box_y": m, "box_z": m, "tangent": m * n_betas,
        "dual_y": m * n1, "dual_z": m * n2,
    }


def selection_from_values(model: StandardFormModel, x, n1: int | None = None,
                          n2: int | None = None):
    """Pull 0/1 ``y``/``z`` vectors out of a full column vector by variable name."""
    x = np.asarray(x, dtype=float)
    if n1 is None:
        n1 = sum(1 for name in model.variable_map if _is_sel(name, "y"))
    if n2 is None:
        n2 = sum(1 for name in model.variable_map if _is_sel(name, "z"))
    y = np.zeros(n1, dtype=int)
    z = np.zeros(n2, dtype=int)
    for name, j in model.variable_map.items():
        if _is_sel(name, "y"):
            y[int(name[2:])] = int(round(x[j]))
        elif _is_sel(name, "z"):
            z[int(name[2:])] = int(round(x[j]))
    return y, z


def _is_sel(name: str, prefix: str) -> bool:
    return name.startswith(prefix + "_") and name[2:].isdigit()
