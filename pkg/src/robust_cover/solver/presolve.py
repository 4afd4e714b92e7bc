"""Bound-based reductions applied once before branch-and-bound.

Only reductions that fix columns or drop rows are used, so mapping a
solution of the reduced problem back is a matter of re-inserting the fixed
values. Rules, repeated until nothing changes:

* empty rows are checked and dropped;
* rows whose activity range already lies within their bounds are dropped,
  rows whose activity range misses their bounds prove infeasibility;
* singleton rows become column bounds (rounded for integer columns);
* a column whose every row entry only gets easier as it decreases, and whose
  cost is non-negative, is fixed at its (finite) lower bound, and
  symmetrically at its upper bound; empty columns are a special case;
* fixed columns are moved into the row bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_TOL = 1e-9


@dataclass
class PresolveResult:
    status: str                 # "reduced" | "infeasible"
    A: np.ndarray
    c: np.ndarray
    col_lb: np.ndarray
    col_ub: np.ndarray
    row_lb: np.ndarray
    row_ub: np.ndarray
    integer: np.ndarray
    cols: np.ndarray            # original index of every kept column
    rows: np.ndarray            # original index of every kept row
    fixed_values: np.ndarray    # full-length vector; kept columns hold 0
    offset: float               # objective contribution of the fixed columns

    def expand(self, x_reduced) -> np.ndarray:
        x = self.fixed_values.copy()
        x[self.cols] = x_reduced
        return x


def _activity_range(A, lb, ub):
    pos = np.maximum(A, 0.0)
    neg = np.minimum(A, 0.0)
    with np.errstate(invalid="ignore", over="ignore"):
        # 0 * inf must count as 0
        lo = np.nan_to_num(pos * lb, nan=0.0) + np.nan_to_num(neg * ub, nan=0.0)
        hi = np.nan_to_num(pos * ub, nan=0.0) + np.nan_to_num(neg * lb, nan=0.0)
        lo = np.where(A == 0, 0.0, lo).sum(axis=1)
        hi = np.where(A == 0, 0.0, hi).sum(axis=1)
    return lo, hi


def presolve(A, c, col_lb, col_ub, row_lb, row_ub, integer, tol: float = _TOL) -> PresolveResult:
    A = np.array(A, dtype=float)
    c = np.array(c, dtype=float)
    lb = np.array(col_lb, dtype=float)
    ub = np.array(col_ub, dtype=float)
    rlo = np.array(row_lb, dtype=float)
    rhi = np.array(row_ub, dtype=float)
    integer = np.asarray(integer, dtype=bool)
    n_rows, n_cols = A.shape
    row_alive = np.ones(n_rows, dtype=bool)
    col_alive = np.ones(n_cols, dtype=bool)
    fixed = np.zeros(n_cols)
    status = "reduced"

    def fix(j, v):
        fixed[j] = v
        col_alive[j] = False
        col = A[:, j] * v
        rlo[:] -= col
        rhi[:] -= col
        A[:, j] = 0.0

    changed = True
    while changed and status == "reduced":
        changed = False
        # integer bounds
        lb[integer] = np.ceil(lb[integer] - 1e-6)
        ub[integer] = np.floor(ub[integer] + 1e-6)
        if np.any(lb[col_alive] > ub[col_alive] + tol):
            status = "infeasible"
            break
        for j in np.flatnonzero(col_alive & (ub - lb <= tol)):
            fix(j, lb[j])
            changed = True

        rows = np.flatnonzero(row_alive)
        sub = A[rows]
        amin, amax = _activity_range(sub, lb, ub)
        if np.any(amin > rhi[rows] + 1e-7) or np.any(amax < rlo[rows] - 1e-7):
            status = "infeasible"
            break
        redundant = (amin >= rlo[rows] - tol) & (amax <= rhi[rows] + tol)
        if np.any(redundant):
            row_alive[rows[redundant]] = False
            changed = True

        nnz = np.count_nonzero(A, axis=1)
        for r in np.flatnonzero(row_alive & (nnz == 1)):
            j = int(np.flatnonzero(A[r])[0])
            a = A[r, j]
            lo_r, hi_r = (rlo[r] / a, rhi[r] / a) if a > 0 else (rhi[r] / a, rlo[r] / a)
            if lo_r > lb[j]:
                lb[j] = lo_r
            if hi_r < ub[j]:
                ub[j] = hi_r
            row_alive[r] = False
            changed = True
        if changed:
            continue

        # dominated columns: only rows still alive matter
        Ar = A[row_alive]
        up_only = np.isinf(rlo[row_alive])[:, None]     # row is "<=" only
        dn_only = np.isinf(rhi[row_alive])[:, None]     # row is ">=" only
        # decreasing x_j never hurts: positive entries only in <= rows, negative only in >= rows
        easy_down = np.all((Ar == 0) | ((Ar > 0) & up_only) | ((Ar < 0) & dn_only), axis=0)
        easy_up = np.all((Ar == 0) | ((Ar < 0) & up_only) | ((Ar > 0) & dn_only), axis=0)
        # fixing a dominated column never changes which other columns are dominated
        for j in np.flatnonzero(col_alive):
            if easy_down[j] and c[j] >= 0 and lb[j] > -math.inf:
                fix(j, lb[j])
                changed = True
            elif easy_up[j] and c[j] <= 0 and ub[j] < math.inf:
                fix(j, ub[j])
                changed = True

    cols = np.flatnonzero(col_alive)
    rows = np.flatnonzero(row_alive)
    offset = float(c[~col_alive] @ fixed[~col_alive])
    return PresolveResult(
        status=status, A=A[np.ix_(rows, cols)], c=c[cols], col_lb=lb[cols], col_ub=ub[cols],
        row_lb=rlo[rows], row_ub=rhi[rows], integer=integer[cols], cols=cols, rows=rows,
        fixed_values=fixed, offset=offset)
