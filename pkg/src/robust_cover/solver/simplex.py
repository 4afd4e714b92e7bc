"""Bounded-variable revised simplex (dual phase plus primal clean-up).

The LP is kept in the computational form

    min c^T x   s.t.   A x - s = 0,   lb <= x <= ub,   row_lb <= s <= row_ub

with one logical column ``s_r`` per row, so the all-logical basis ``B = -I``
is always available. With non-negative costs and every structural column
nonbasic at its lower bound that basis is dual feasible, which is the normal
starting point here and also what branch-and-bound nodes inherit: tightening
bounds keeps a basis dual feasible, so children re-optimise with a handful of
dual pivots.

The basis inverse is held explicitly and updated by elementary row operations;
it is rebuilt from scratch every ``refactor_every`` pivots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg.blas import dger

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"

AT_LOWER, AT_UPPER, BASIC, FREE_ZERO = 0, 1, 2, 3

# artificial box used for columns whose cost pulls them towards an infinite bound
_BIG = 1e7


class SingularBasis(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str
    objective: float
    x: np.ndarray
    iterations: int


@dataclass
class Basis:
    head: np.ndarray       # variable index per basis position
    status: np.ndarray     # per variable: AT_LOWER / AT_UPPER / BASIC / FREE_ZERO

    def copy(self) -> "Basis":
        return Basis(self.head.copy(), self.status.copy())


class BoundedSimplex:
    """Dense bounded simplex for LPs with up to a few thousand rows.

    Parameters
    ----------
    A : (m, n) array
        Constraint matrix (dense).
    c : (n,) array
        Objective coefficients (minimised).
    col_lb, col_ub, row_lb, row_ub : arrays
        Bounds; infinities allowed.
    """

    def __init__(self, A, c, col_lb, col_ub, row_lb, row_ub, *,
                 primal_tol: float = 1e-7, dual_tol: float = 1e-9,
                 pivot_tol: float = 1e-9, refactor_every: int = 100,
                 max_iter: int | None = None):
        A = np.ascontiguousarray(A, dtype=float)
        self.A = A
        self.AT = np.ascontiguousarray(A.T)
        self.m, self.n = A.shape
        m, n = self.m, self.n
        self.N = n + m
        self.cost = np.concatenate([np.asarray(c, dtype=float), np.zeros(m)])
        self.lb = np.concatenate([np.asarray(col_lb, dtype=float), np.asarray(row_lb, dtype=float)])
        self.ub = np.concatenate([np.asarray(col_ub, dtype=float), np.asarray(row_ub, dtype=float)])
        self.ptol = primal_tol
        self.dtol = dual_tol
        self.pivtol = pivot_tol
        self.refactor_every = refactor_every
        self.max_iter = max_iter if max_iter is not None else 50 * (m + n) + 1000
        self.bland_after = 10 * (m + n)
        self.total_iterations = 0
        self.x = np.zeros(self.N)
        self.d = np.zeros(self.N)
        self.basis = self.slack_basis()
        self._artificial = np.zeros(self.N, dtype=bool)
        self._load(self.basis)

    # -- basis handling -----------------------------------------------------

    def slack_basis(self) -> Basis:
        m, n = self.m, self.n
        status = np.full(self.N, AT_LOWER, dtype=np.int8)
        status[n:] = BASIC
        for j in range(n):
            status[j] = self._home_bound(j)
        return Basis(np.arange(n, n + m), status)

    def _home_bound(self, j: int) -> int:
        """Bound a nonbasic column sits at so its reduced cost has the right sign."""
        lo, hi, cj = self.lb[j], self.ub[j], self.cost[j]
        if lo == -math.inf and hi == math.inf:
            return FREE_ZERO
        if hi == math.inf:
            return AT_LOWER
        if lo == -math.inf:
            return AT_UPPER
        return AT_UPPER if cj < 0 else AT_LOWER

    def _column(self, j: int) -> np.ndarray:
        if j < self.n:
            return self.A[:, j]
        col = np.zeros(self.m)
        col[j - self.n] = -1.0
        return col

    def _factor(self, head: np.ndarray) -> np.ndarray:
        """Explicit inverse of the basis matrix, exploiting the logical columns."""
        m, n = self.m, self.n
        structural = head < n
        pos_s = np.flatnonzero(structural)
        pos_l = np.flatnonzero(~structural)
        cols = head[pos_s]
        rows_l = head[pos_l] - n            # rows whose logical is basic
        rows_mask = np.ones(m, dtype=bool)
        rows_mask[rows_l] = False
        rows_1 = np.flatnonzero(rows_mask)  # rows covered by structural columns
        if rows_1.size != cols.size:
            raise SingularBasis("basis shape mismatch")
        binv = np.zeros((m, m), order="F")
        if cols.size:
            b11 = self.A[np.ix_(rows_1, cols)]
            try:
                b11_inv = np.linalg.inv(b11)
            except np.linalg.LinAlgError as exc:
                raise SingularBasis(str(exc)) from None
            if not np.all(np.isfinite(b11_inv)):
                raise SingularBasis("non-finite inverse")
            binv[np.ix_(pos_s, rows_1)] = b11_inv
            if pos_l.size:
                b21 = self.A[np.ix_(rows_l, cols)]
                binv[np.ix_(pos_l, rows_1)] = b21 @ b11_inv
        binv[pos_l, rows_l] = -1.0
        return binv

    def _load(self, basis: Basis) -> None:
        """Install ``basis``, recompute the inverse, primal values and reduced costs."""
        try:
            self.binv = self._factor(basis.head)
        except SingularBasis:
            basis = self.slack_basis()
            self.binv = self._factor(basis.head)
        self.basis = basis
        self._since_refactor = 0
        self._place_nonbasic()
        self._recompute()

    def load_basis(self, basis: Basis) -> None:
        self._load(basis.copy())

    def _place_nonbasic(self) -> None:
        st = self.basis.status
        for j in range(self.N):
            s = st[j]
            if s == BASIC:
                continue
            lo, hi = self.lb[j], self.ub[j]
            if s == AT_UPPER and hi == math.inf:
                s = AT_LOWER if lo > -math.inf else FREE_ZERO
            elif s == AT_LOWER and lo == -math.inf:
                s = AT_UPPER if hi < math.inf else FREE_ZERO
            elif s == FREE_ZERO and (lo > -math.inf or hi < math.inf):
                s = self._home_bound(j)
            st[j] = s
            self.x[j] = lo if s == AT_LOWER else hi if s == AT_UPPER else 0.0

    def _recompute(self) -> None:
        head = self.basis.head
        n = self.n
        xn = self.x.copy()
        xn[head] = 0.0
        v = self.A @ xn[:n] - xn[n:]
        self.x[head] = -self.binv @ v
        y = self.cost[head] @ self.binv
        self.d[:n] = self.cost[:n] - self.AT @ y
        self.d[n:] = y
        self.d[head] = 0.0

    def set_bounds(self, col_lb, col_ub) -> None:
        """Replace structural column bounds; nonbasic columns move to their new bound."""
        self.lb[:self.n] = col_lb
        self.ub[:self.n] = col_ub
        self._artificial[:self.n] = False
        self._place_nonbasic()
        self._recompute()

    def add_rows(self, rows, row_lb, row_ub) -> None:
        """Append constraint rows; their logicals enter the basis, so it stays valid."""
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        k = rows.shape[0]
        if k == 0:
            return
        n, m_old = self.n, self.m
        self.A = np.ascontiguousarray(np.vstack([self.A, rows]))
        self.AT = np.ascontiguousarray(self.A.T)
        self.m += k
        self.N += k
        self.cost = np.concatenate([self.cost, np.zeros(k)])
        self.lb = np.concatenate([self.lb, np.asarray(row_lb, dtype=float)])
        self.ub = np.concatenate([self.ub, np.asarray(row_ub, dtype=float)])
        self.x = np.concatenate([self.x, np.zeros(k)])
        self.d = np.concatenate([self.d, np.zeros(k)])
        self._artificial = np.concatenate([self._artificial, np.zeros(k, dtype=bool)])
        new = np.arange(n + m_old, n + self.m)
        self.basis = Basis(np.concatenate([self.basis.head, new]),
                           np.concatenate([self.basis.status, np.full(k, BASIC, dtype=np.int8)]))
        self.max_iter += 50 * k
        self.bland_after = 10 * (self.m + self.n)
        self._load(self.basis)

    def refresh(self) -> None:
        self._load(self.basis)

    # -- main entry ----------------------------------------------------------

    def solve(self) -> LPResult:
        self._make_dual_feasible()
        status = self._dual_simplex()
        for _ in range(5):
            if status != OPTIMAL:
                break
            # fresh factorisation guards against drift accumulated in the updates
            if self._since_refactor > 0:
                self.refresh()
            if self._max_primal_infeas() > self.ptol:
                status = self._dual_simplex()
            elif self._dual_infeasible().size:
                status = self._primal_simplex()
            else:
                break
        if status == OPTIMAL and np.any(self._artificial):
            art = np.flatnonzero(self._artificial)
            if np.any(np.abs(self.x[art]) > 0.5 * _BIG):
                # the true problem is unbounded or infeasible; a zero-cost solve tells which
                lb, ub = self.lb.copy(), self.ub.copy()
                lb[self._artificial & (lb < -0.5 * _BIG)] = -math.inf
                ub[self._artificial & (ub > 0.5 * _BIG)] = math.inf
                probe = BoundedSimplex(self.A, np.zeros(self.n), lb[:self.n], ub[:self.n],
                                       lb[self.n:], ub[self.n:], primal_tol=self.ptol,
                                       dual_tol=self.dtol, pivot_tol=self.pivtol)
                status = UNBOUNDED if probe.solve().status == OPTIMAL else INFEASIBLE
        obj = float(self.cost[:self.n] @ self.x[:self.n])
        return LPResult(status, obj, self.x[:self.n].copy(), self.total_iterations)

    # -- helpers ---------------------------------------------------------------

    def _max_primal_infeas(self) -> float:
        head = self.basis.head
        xb = self.x[head]
        v = np.maximum(self.lb[head] - xb, xb - self.ub[head])
        return float(v.max()) if v.size else 0.0

    def _dual_infeasible(self) -> np.ndarray:
        st = self.basis.status
        d = self.d
        bad = ((st == AT_LOWER) & (d < -self.dtol) & (self.ub > self.lb)) | \
              ((st == AT_UPPER) & (d > self.dtol) & (self.ub > self.lb)) | \
              ((st == FREE_ZERO) & (np.abs(d) > self.dtol))
        return np.flatnonzero(bad)

    def _make_dual_feasible(self) -> None:
        """Flip boxed columns with wrong-signed reduced costs; box the rest artificially."""
        changed = False
        for j in self._dual_infeasible():
            st = self.basis.status
            lo, hi = self.lb[j], self.ub[j]
            want_upper = self.d[j] < 0
            if want_upper and hi == math.inf:
                self.ub[j] = (max(lo, 0.0) if lo > -math.inf else 0.0) + _BIG
                self._artificial[j] = True
            elif not want_upper and lo == -math.inf:
                self.lb[j] = (min(hi, 0.0) if hi < math.inf else 0.0) - _BIG
                self._artificial[j] = True
            st[j] = AT_UPPER if want_upper else AT_LOWER
            self.x[j] = self.ub[j] if want_upper else self.lb[j]
            changed = True
        if changed:
            self._recompute()

    def _pivot(self, r: int, q: int, col: np.ndarray) -> None:
        """Basis change: variable ``q`` enters at position ``r`` (values already updated)."""
        binv = self.binv
        row = binv[r] / col[r]
        # in-place rank-one update (binv is Fortran-ordered)
        self.binv = binv = dger(-1.0, col, row, a=binv, overwrite_a=1)
        binv[r] = row
        leaving = self.basis.head[r]
        self.basis.head[r] = q
        self.basis.status[q] = BASIC
        self.total_iterations += 1
        self._since_refactor += 1
        if self._since_refactor >= self.refactor_every:
            self.refresh()

    def _pivot_row(self, r: int) -> np.ndarray:
        rho = self.binv[r]
        alpha = np.empty(self.N)
        alpha[:self.n] = self.AT @ rho
        alpha[self.n:] = -rho
        return alpha

    # -- dual simplex ------------------------------------------------------------

    def _dual_simplex(self) -> str:
        head, st = self.basis.head, self.basis.status
        n_iter = 0
        while True:
            if n_iter >= self.max_iter:
                return ITERATION_LIMIT
            bland = n_iter >= self.bland_after
            head, st = self.basis.head, self.basis.status
            xb = self.x[head]
            below = self.lb[head] - xb
            above = xb - self.ub[head]
            viol = np.maximum(below, above)
            cand_rows = np.flatnonzero(viol > self.ptol)
            if cand_rows.size == 0:
                return OPTIMAL
            if bland:
                r = int(cand_rows[np.argmin(head[cand_rows])])
            else:
                r = int(cand_rows[np.argmax(viol[cand_rows])])
            leaving = int(head[r])
            to_lower = below[r] > above[r]
            alpha = self._pivot_row(r)
            movable = (st != BASIC) & (self.ub > self.lb)
            if to_lower:
                ok = movable & (((st == AT_LOWER) & (alpha < -self.pivtol))
                                | ((st == AT_UPPER) & (alpha > self.pivtol))
                                | ((st == FREE_ZERO) & (np.abs(alpha) > self.pivtol)))
            else:
                ok = movable & (((st == AT_LOWER) & (alpha > self.pivtol))
                                | ((st == AT_UPPER) & (alpha < -self.pivtol))
                                | ((st == FREE_ZERO) & (np.abs(alpha) > self.pivtol)))
            cand = np.flatnonzero(ok)
            if cand.size == 0:
                return INFEASIBLE
            a_c = np.abs(alpha[cand])
            d_c = np.abs(self.d[cand])
            if bland:
                ratios = d_c / a_c
                best = ratios.min()
                tie = cand[ratios <= best + 1e-12]
                q = int(tie.min())
            else:
                # Harris two-pass: relaxed bound, then the largest pivot inside it
                bound = ((d_c + self.dtol) / a_c).min()
                inside = (d_c / a_c) <= bound
                q = int(cand[inside][np.argmax(a_c[inside])])
            theta_d = self.d[q] / alpha[q]
            self.d -= theta_d * alpha
            self.d[head] = 0.0
            self.d[leaving] = -theta_d
            self.d[q] = 0.0
            col = self.binv @ self._column(q)
            target = self.lb[leaving] if to_lower else self.ub[leaving]
            theta_p = (self.x[leaving] - target) / col[r]
            self.x[head] -= theta_p * col
            self.x[q] += theta_p
            self.x[leaving] = target
            st[leaving] = AT_LOWER if to_lower else AT_UPPER
            if self.lb[leaving] == self.ub[leaving]:
                st[leaving] = AT_LOWER
            self._pivot(r, q, col)
            n_iter += 1

    # -- primal simplex (clean-up of small dual infeasibilities) -----------------

    def _primal_simplex(self) -> str:
        n_iter = 0
        while True:
            if n_iter >= self.max_iter:
                return ITERATION_LIMIT
            bland = n_iter >= self.bland_after
            bad = self._dual_infeasible()
            if bad.size == 0:
                return OPTIMAL
            head, st = self.basis.head, self.basis.status
            if bland:
                q = int(bad.min())
            else:
                q = int(bad[np.argmax(np.abs(self.d[bad]))])
            direction = 1.0 if self.d[q] < 0 else -1.0   # increase x_q when d_q < 0
            col = self.binv @ self._column(q)
            # x_B changes by -direction * t * col
            delta = -direction * col
            xb = self.x[head]
            lbB, ubB = self.lb[head], self.ub[head]
            t_best = self.ub[q] - self.lb[q]         # bound flip
            r_best = -1
            with np.errstate(divide="ignore", invalid="ignore"):
                t_up = np.where(delta > self.pivtol, (ubB - xb) / delta, math.inf)
                t_dn = np.where(delta < -self.pivtol, (lbB - xb) / delta, math.inf)
            t = np.maximum(np.minimum(t_up, t_dn), 0.0)
            if t.size and t.min() < t_best:
                tmin = t.min()
                tie = np.flatnonzero(t <= tmin + 1e-12)
                r_best = int(tie[np.argmin(head[tie])]) if bland else int(tie[np.argmax(np.abs(col[tie]))])
                t_best = t[r_best]
            if t_best == math.inf:
                return UNBOUNDED
            self.x[head] += delta * t_best
            self.x[q] += direction * t_best
            if r_best < 0:
                st[q] = AT_UPPER if direction > 0 else AT_LOWER
                self.x[q] = self.ub[q] if direction > 0 else self.lb[q]
                n_iter += 1
                continue
            leaving = int(head[r_best])
            went_up = delta[r_best] > 0
            st[leaving] = AT_UPPER if went_up else AT_LOWER
            self.x[leaving] = self.ub[leaving] if went_up else self.lb[leaving]
            alpha = self._pivot_row(r_best)
            theta_d = self.d[q] / alpha[q]
            self.d -= theta_d * alpha
            self.d[head] = 0.0
            self.d[leaving] = -theta_d
            self.d[q] = 0.0
            self._pivot(r_best, q, col)
            n_iter += 1


def solve_lp(A, c, col_lb, col_ub, row_lb, row_ub, **kw) -> LPResult:
    return BoundedSimplex(A, c, col_lb, col_ub, row_lb, row_ub, **kw).solve()
