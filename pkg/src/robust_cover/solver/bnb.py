"""Best-first branch-and-bound over the integer columns of a model.

Each node re-optimises its LP from the parent's final basis with the dual
simplex: tightening a bound keeps a basis dual feasible, so children usually
need a few pivots. When the popped node is a child of the node solved just
before, the simplex state is reused directly instead of refactorising.
"""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from ..core import Solution
from ..cuts import CoverSeparator
from ..milp import StandardFormModel, selection_from_values
from .presolve import presolve
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, BoundedSimplex


class MalformedModel(ValueError):
    pass


@dataclass
class SolverOptions:
    abs_gap: float = 1e-6
    rel_gap: float = 1e-6
    feas_tol: float = 1e-7
    int_tol: float = 1e-6
    time_limit_s: float | None = None
    node_limit: int | None = None
    # rounds of root cover-cut separation (0 disables)
    cut_rounds: int = 25

    def __post_init__(self):
        for name in ("abs_gap", "rel_gap", "feas_tol", "int_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.time_limit_s is not None and self.time_limit_s <= 0:
            raise ValueError("time_limit_s must be positive")
        if self.node_limit is not None and self.node_limit < 1:
            raise ValueError("node_limit must be at least 1")
        if self.cut_rounds < 0:
            raise ValueError("cut_rounds must be non-negative")

    def gap(self, incumbent: float) -> float:
        return max(self.abs_gap, self.rel_gap * abs(incumbent))


@dataclass
class LPRelaxation:
    status: str
    objective: float
    values: np.ndarray


def _model_arrays(model: StandardFormModel):
    if model.n_vars == 0:
        raise MalformedModel("model has no variables")
    A = model.matrix().toarray()
    lo, hi = model.row_bounds()
    cl, cu = model.col_bounds()
    if np.any(cl > cu):
        raise MalformedModel("a variable has lower bound above upper bound")
    return A, model.cost_vector(), cl, cu, lo, hi, model.integrality()


def solve_lp_relaxation(model: StandardFormModel, options: SolverOptions | None = None) -> LPRelaxation:
    """Optimal basic solution of the continuous relaxation (no presolve)."""
    options = options or SolverOptions()
    A, c, cl, cu, lo, hi, _ = _model_arrays(model)
    res = BoundedSimplex(A, c, cl, cu, lo, hi, primal_tol=options.feas_tol).solve()
    if res.status == UNBOUNDED:
        raise MalformedModel("LP relaxation is unbounded")
    if res.status not in (OPTIMAL, INFEASIBLE):
        raise RuntimeError(f"simplex stopped with status {res.status}")
    obj = res.objective + model.objective_offset if res.status == OPTIMAL else math.inf
    return LPRelaxation(res.status, obj, res.x)


def _empty_solution(model, status, bound, t0, nodes) -> Solution:
    y, z = selection_from_values(model, np.zeros(model.n_vars))
    return Solution(y=y, z=z, objective=math.inf, status=status, best_bound=bound,
                    wall_time_s=time.perf_counter() - t0, nodes=nodes)


def solve(model: StandardFormModel, options: SolverOptions | None = None) -> Solution:
    """Solve a minimisation MILP to optimality (within the gap) or until a limit.

    Returns a :class:`Solution` whose ``values`` holds the full column vector.
    Status is ``optimal``, ``infeasible``, ``time-limit`` or ``node-limit``;
    under a limit the best incumbent (if any) and the best open bound are kept.
    """
    options = options or SolverOptions()
    t0 = time.perf_counter()
    A, c, cl, cu, lo, hi, integer = _model_arrays(model)
    pre = presolve(A, c, cl, cu, lo, hi, integer)
    if pre.status == "infeasible":
        return _empty_solution(model, "infeasible", math.inf, t0, 0)
    offset = pre.offset + model.objective_offset
    if pre.c.size == 0:
        x = pre.expand(np.zeros(0))
        if not model.is_feasible(x, options.feas_tol):
            return _empty_solution(model, "infeasible", math.inf, t0, 0)
        return _finish(model, x, offset, "optimal", offset, t0, 0)

    lp = BoundedSimplex(pre.A, pre.c, pre.col_lb, pre.col_ub, pre.row_lb, pre.row_ub,
                        primal_tol=options.feas_tol)
    n_cuts = 0
    separator = model.separator
    if separator is None and options.cut_rounds:
        separator = CoverSeparator.from_model(model)
    if separator is not None and options.cut_rounds:
        root = _root_cuts(lp, pre, separator, options)
        if root == INFEASIBLE:
            return _empty_solution(model, "infeasible", math.inf, t0, 1)
        n_cuts = root
    int_cols = np.flatnonzero(pre.integer)
    incumbent, inc_x = math.inf, None
    heap: list = []
    seq = 0
    # (bound, seq, lb, ub, basis, parent seq)
    heapq.heappush(heap, (-math.inf, seq, pre.col_lb.copy(), pre.col_ub.copy(), None, -1))
    last_solved = -1
    nodes = 0
    status = "optimal"

    while heap:
        bound = heap[0][0]
        if inc_x is not None and bound >= incumbent - options.gap(incumbent):
            heap.clear()
            break
        if options.node_limit is not None and nodes >= options.node_limit:
            status = "node-limit"
            break
        if options.time_limit_s is not None and time.perf_counter() - t0 > options.time_limit_s:
            status = "time-limit"
            break
        bound, node_id, lb, ub, basis, parent = heapq.heappop(heap)
        nodes += 1
        if parent != last_solved and basis is not None:
            lp.set_bounds(lb, ub)
            lp.load_basis(basis)
        else:
            lp.set_bounds(lb, ub)
        res = lp.solve()
        last_solved = node_id
        if res.status == UNBOUNDED:
            raise MalformedModel("LP relaxation is unbounded")
        if res.status == INFEASIBLE:
            continue
        if res.status != OPTIMAL:
            raise RuntimeError(f"simplex stopped with status {res.status}")
        obj = res.objective + offset
        if inc_x is not None and obj >= incumbent - options.gap(incumbent):
            continue
        xi = res.x[int_cols]
        frac = np.abs(xi - np.round(xi))
        if frac.size == 0 or frac.max() <= options.int_tol:
            x = res.x.copy()
            x[int_cols] = np.round(xi)
            value = float(pre.c @ x) + offset
            if value < incumbent:
                incumbent, inc_x = value, x
            continue
        # most fractional; argmax returns the lowest index among ties
        k = int(np.argmax(np.minimum(xi - np.floor(xi), np.ceil(xi) - xi)))
        j = int(int_cols[k])
        snap = lp.basis.copy()
        down_ub = ub.copy()
        down_ub[j] = math.floor(res.x[j])
        up_lb = lb.copy()
        up_lb[j] = math.ceil(res.x[j])
        bnd = max(obj, bound)
        seq += 1
        heapq.heappush(heap, (bnd, seq, lb, down_ub, snap, node_id))
        seq += 1
        heapq.heappush(heap, (bnd, seq, up_lb, ub, snap, node_id))

    open_bound = min((h[0] for h in heap), default=math.inf)
    best_bound = min(open_bound, incumbent)
    if inc_x is None:
        if status == "optimal":
            return _empty_solution(model, "infeasible", math.inf, t0, nodes)
        return _empty_solution(model, status, open_bound, t0, nodes)
    return _finish(model, pre.expand(inc_x), incumbent, status, best_bound, t0, nodes)


def _reduce_row(pre, idx, coef, sense, rhs):
    """Express a row over model columns in the presolved column space."""
    pos = np.full(pre.fixed_values.size, -1)
    pos[pre.cols] = np.arange(pre.cols.size)
    idx = np.asarray(idx)
    coef = np.asarray(coef, dtype=float)
    shift = float(coef @ pre.fixed_values[idx])
    row = np.zeros(pre.cols.size)
    keep = pos[idx] >= 0
    np.add.at(row, pos[idx[keep]], coef[keep])
    lo = rhs - shift if sense in (">=", "=") else -math.inf
    hi = rhs - shift if sense in ("<=", "=") else math.inf
    return row, lo, hi


def _root_cuts(lp: BoundedSimplex, pre, separator, options: SolverOptions):
    """Alternate root LP solves and separation; returns the cut count or ``infeasible``."""
    total = 0
    for _ in range(options.cut_rounds):
        res = lp.solve()
        if res.status == INFEASIBLE:
            return INFEASIBLE
        if res.status != OPTIMAL:
            break
        xi = res.x[pre.integer]
        if np.all(np.abs(xi - np.round(xi)) <= options.int_tol):
            break
        rows, lo, hi = [], [], []
        for idx, coef, sense, rhs in separator(pre.expand(res.x)):
            r, a, b = _reduce_row(pre, idx, coef, sense, rhs)
            rows.append(r)
            lo.append(a)
            hi.append(b)
        if not rows:
            break
        lp.add_rows(np.array(rows), lo, hi)
        total += len(rows)
    return total


def _finish(model, x, objective, status, best_bound, t0, nodes) -> Solution:
    y, z = selection_from_values(model, x)
    return Solution(y=y, z=z, objective=float(objective), status=status,
                    best_bound=float(best_bound), wall_time_s=time.perf_counter() - t0,
                    nodes=nodes, values=x)
