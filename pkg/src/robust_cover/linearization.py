"""Tangent-family linearization of the cooperative cover constraint.

With ``m`` and ``n`` the miss probabilities of the selected y- and z-sets,
a node is covered at level ``alpha`` when ``(1 - m)(1 - n) >= alpha``. In log
space the selected sets enter linearly (``ln m = sum_j ln(p_j) y_j``), so the
curved feasible region is replaced by half-spaces

    beta * ln(m) + gamma * ln(n) <= ln F(alpha, beta),    beta + gamma = 1,

where ``F`` is the maximum of ``m**beta * n**gamma`` along the boundary
``m = 1 - alpha / (1 - n)``. Every such cut is valid for the original region,
so the cut family (plus the two box cuts ``m, n <= 1 - alpha``) is a
relaxation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class TangentCut:
    beta: float
    gamma: float
    delta: float
    log_rhs: float
    alpha: float

    @property
    def m_star(self) -> float:
        """y-side miss probability at the tangency point."""
        return _boundary_m(self.delta, self.alpha)


@dataclass(frozen=True)
class TangentFamily:
    """Cuts sorted by ``beta`` plus the box cut right-hand side ``ln(1 - alpha)``."""

    alpha: float
    cuts: tuple[TangentCut, ...]
    box_rhs: float

    @property
    def n_cuts(self) -> int:
        """Tangent cuts plus the two box cuts."""
        return len(self.cuts) + 2

    def is_feasible(self, log_m, log_n, tol: float = 0.0):
        """Vectorised test of all cuts at log-miss values ``(log_m, log_n)``."""
        log_m = np.asarray(log_m, dtype=float)
        log_n = np.asarray(log_n, dtype=float)
        ok = (log_m <= self.box_rhs + tol) & (log_n <= self.box_rhs + tol)
        for cut in self.cuts:
            ok &= cut.beta * log_m + cut.gamma * log_n <= cut.log_rhs + tol
        return ok


def _check(alpha: float, beta: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie strictly in (0, 1), got {beta}")


def _boundary_m(n: float, alpha: float) -> float:
    # 1 - alpha/(1-n) written without cancellation near n -> 1 - alpha
    return ((1.0 - n) - alpha) / (1.0 - n)


def stationary_points(alpha: float, beta: float) -> tuple[float, float, float, float]:
    """The four roots of ``f'(n) = 0`` for ``f(n) = (1 - alpha/(1-n))**beta * n**gamma``.

    Returned as ``(0, 1 - alpha, n3, n4)``; ``n3`` is the interior maximiser.
    """
    _check(alpha, beta)
    gamma = 1.0 - beta
    b = 2.0 * gamma + alpha * beta - alpha * gamma
    disc = math.sqrt(alpha * (4.0 * beta * gamma + alpha * beta**2
                              + alpha * gamma**2 - 2.0 * alpha * beta * gamma))
    n4 = (b + disc) / (2.0 * gamma)
    # the roots multiply to 1 - alpha; dividing avoids cancellation in b - disc
    n3 = (1.0 - alpha) / n4
    return 0.0, 1.0 - alpha, n3, n4


def tangency_delta(alpha: float, beta: float) -> float:
    """Tangency coordinate ``n3`` of the cut with weights ``(beta, 1 - beta)``.

    Lies strictly inside ``(0, 1 - alpha)``.
    """
    return stationary_points(alpha, beta)[2]


def tangent_rhs(alpha: float, beta: float) -> float:
    """``ln F``: log of the maximum of ``m**beta n**gamma`` on the boundary."""
    delta = tangency_delta(alpha, beta)
    return beta * math.log(_boundary_m(delta, alpha)) + (1.0 - beta) * math.log(delta)


def tangent_profile(n, alpha: float, beta: float):
    """``f(n)`` along the boundary; ``nan`` outside ``[0, 1 - alpha]``."""
    n = np.asarray(n, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        m = ((1.0 - n) - alpha) / (1.0 - n)
        return np.power(m, beta) * np.power(n, 1.0 - beta)


def make_cut(alpha: float, beta: float) -> TangentCut:
    delta = tangency_delta(alpha, beta)
    return TangentCut(beta=float(beta), gamma=1.0 - float(beta), delta=delta,
                      log_rhs=tangent_rhs(alpha, beta), alpha=float(alpha))


def build_family(alpha: float, beta_list: Iterable[float]) -> TangentFamily:
    betas = sorted(float(b) for b in beta_list)
    if not betas:
        raise DomainError("beta_list must not be empty")
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    cuts = tuple(make_cut(alpha, b) for b in betas)
    return TangentFamily(alpha=float(alpha), cuts=cuts, box_rhs=math.log1p(-alpha))


def sample_gap(alpha: float, beta_list: Sequence[float], grid_n: int,
               tol: float = 1e-12):
    """Compare the exact and linearised feasibility tests on a grid.

    The grid spans ``[0, 1 - alpha]`` on both miss-probability axes with
    ``grid_n`` points each. ``tol`` absorbs rounding in the log-space cuts
    for points lying exactly on a tangency.

    Returns
    -------
    m, n : ndarray
        Flattened grid coordinates.
    exact, la : ndarray of bool
        Exact test ``(1-m)(1-n) >= alpha`` and the all-cuts test.
    """
    if grid_n < 2:
        raise DomainError("grid_n must be at least 2")
    family = build_family(alpha, beta_list)
    axis = np.linspace(0.0, 1.0 - alpha, grid_n)
    mm, nn = np.meshgrid(axis, axis, indexing="ij")
    mm, nn = mm.ravel(), nn.ravel()
    exact = (1.0 - mm) * (1.0 - nn) >= alpha
    with np.errstate(divide="ignore"):
        la = family.is_feasible(np.log(mm), np.log(nn), tol=tol)
    return mm, nn, exact, la


def gap_rows(alpha, beta_list, grid_n):
    """``sample_gap`` as a list of ``(m, n, exact_feasible, la_feasible)`` tuples."""
    mm, nn, exact, la = sample_gap(alpha, beta_list, grid_n)
    return [(float(a), float(b), bool(e), bool(l)) for a, b, e, l in zip(mm, nn, exact, la)]


def excess_fraction(alpha, beta_list, grid_n) -> float:
    """Share of the grid that is linearised-feasible but exactly infeasible."""
    _, _, exact, la = sample_gap(alpha, beta_list, grid_n)
    return float(np.mean(la & ~exact))
