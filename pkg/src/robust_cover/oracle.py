"""Exact Gamma-robust coverage evaluation and solution verification.

For one demand node and one facility type, the worst case over all
scenarios in which at most ``gamma`` selected miss probabilities jump from
``nom`` to ``nom + dev`` is obtained greedily: deviating ``j`` multiplies the
product by ``(nom_j + dev_j) / nom_j >= 1``, so the worst case deviates the
``gamma`` selected entries with the largest ratios.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import PROB_FLOOR, Instance, RobustConfig, Solution, VerificationReport

TOL_FEAS = 1e-9


@dataclass(frozen=True)
class WorstCaseResult:
    value: float
    deviated_set: tuple[int, ...]


def _product(nom, dev, selected, deviated) -> float:
    # fixed multiplication order (ascending index) so equal subsets give equal floats
    dev_set = set(deviated)
    value = 1.0
    for j in selected:
        value *= nom[j] + dev[j] if j in dev_set else nom[j]
    return float(value)


def _check_row(nom, dev, selection, gamma):
    nom = np.asarray(nom, dtype=float)
    dev = np.asarray(dev, dtype=float)
    sel = np.asarray(selection)
    if not (nom.shape == dev.shape == sel.shape) or nom.ndim != 1:
        raise ValueError(f"dimension mismatch: nom {nom.shape}, dev {dev.shape}, selection {sel.shape}")
    if int(gamma) != gamma or gamma < 0:
        raise ValueError(f"gamma must be a non-negative integer, got {gamma!r}")
    return nom, dev, sel.astype(bool)


def deviation_ratios(nom, dev) -> np.ndarray:
    """``(nom + dev) / nom``; a zero nominal with positive deviation ranks first."""
    nom = np.asarray(nom, dtype=float)
    dev = np.asarray(dev, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = (nom + dev) / nom
    ratio[(nom == 0) & (dev == 0)] = 1.0
    return ratio


def worst_case_miss(nom, dev, selection, gamma: int) -> WorstCaseResult:
    """Largest miss probability of the selected facilities with at most ``gamma`` deviations.

    Ties between equal ratios go to the lowest index. Facilities with ratio 1
    (no deviation, or nominal miss probability 1) are never reported as
    deviated since they cannot change the product.
    """
    nom, dev, sel = _check_row(nom, dev, selection, gamma)
    selected = np.flatnonzero(sel)
    if selected.size == 0:
        return WorstCaseResult(1.0, ())
    ratio = deviation_ratios(nom[selected], dev[selected])
    # stable sort on -ratio keeps index order among ties
    order = np.argsort(-ratio, kind="stable")
    take = [int(selected[o]) for o in order[:int(gamma)] if ratio[o] > 1.0]
    deviated = tuple(sorted(take))
    return WorstCaseResult(_product(nom, dev, selected, deviated), deviated)


def worst_case_miss_enumerate(nom, dev, selection, gamma: int) -> WorstCaseResult:
    """Reference implementation by exhaustive enumeration of all deviation sets."""
    nom, dev, sel = _check_row(nom, dev, selection, gamma)
    selected = [int(j) for j in np.flatnonzero(sel)]
    best = WorstCaseResult(_product(nom, dev, selected, ()), ())
    for size in range(1, min(int(gamma), len(selected)) + 1):
        for subset in itertools.combinations(selected, size):
            value = _product(nom, dev, selected, subset)
            if value > best.value:
                best = WorstCaseResult(value, subset)
    return best


def worst_case_miss_matrix(nom, dev, selection, gammas) -> np.ndarray:
    """Row-wise ``worst_case_miss`` values for ``m x n`` matrices (vectorised)."""
    nom = np.asarray(nom, dtype=float)
    dev = np.asarray(dev, dtype=float)
    sel = np.asarray(selection).astype(bool)
    m, n = nom.shape
    gammas = np.broadcast_to(np.asarray(gammas, dtype=int), (m,))
    log_nom, log_ratio = _log_terms(nom, dev)
    base = np.where(sel[None, :], log_nom, 0.0).sum(axis=1)
    extra = _top_gamma_sum(np.where(sel[None, :], log_ratio, 0.0), gammas)
    return np.exp(base + extra)


def _log_terms(nom, dev):
    with np.errstate(divide="ignore", invalid="ignore"):
        log_nom = np.log(nom)
        log_ratio = np.log(nom + dev) - log_nom
    log_ratio[~np.isfinite(log_ratio) & (dev == 0)] = 0.0
    log_ratio[np.isnan(log_ratio)] = 0.0
    return log_nom, log_ratio


def _top_gamma_sum(d: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """Sum of the ``gammas[i]`` largest entries in row ``i`` of ``d``."""
    if d.shape[1] == 0:
        return np.zeros(d.shape[0])
    s = -np.sort(-d, axis=1)
    csum = np.concatenate([np.zeros((d.shape[0], 1)), np.cumsum(s, axis=1)], axis=1)
    g = np.minimum(gammas, d.shape[1])
    return csum[np.arange(d.shape[0]), g]


def coverage(instance: Instance, y, z, gamma_budget) -> np.ndarray:
    """Worst-case cooperative coverage probability of every demand node."""
    y = np.asarray(y)
    z = np.asarray(z)
    if y.shape != (instance.n1,) or z.shape != (instance.n2,):
        raise ValueError(f"selection shapes {y.shape}, {z.shape} do not match instance "
                         f"({instance.n1},), ({instance.n2},)")
    gammas = np.broadcast_to(np.asarray(gamma_budget, dtype=int), (instance.m,))
    out = np.empty(instance.m)
    for i in range(instance.m):
        by = worst_case_miss(instance.p_nom[i], instance.p_dev[i], y, gammas[i]).value
        bz = worst_case_miss(instance.q_nom[i], instance.q_dev[i], z, gammas[i]).value
        out[i] = (1.0 - by) * (1.0 - bz)
    return out


def verify(instance: Instance, solution: Solution, config: RobustConfig,
           tol_feas: float = TOL_FEAS) -> VerificationReport:
    """Check a solution against the exact robust cover constraints.

    ``phi`` adds up ``alpha - coverage`` over the nodes counted as violated
    (coverage below ``alpha - tol_feas``).
    """
    alpha = config.alpha
    if solution.status == "infeasible":
        return VerificationReport(coverage=np.zeros(instance.m), phi=0.0, violated=0,
                                  classification="no-solution", alpha=alpha)
    if not np.isfinite(solution.objective):
        # stopped by a limit before any incumbent was found
        return VerificationReport(coverage=np.zeros(instance.m), phi=0.0, violated=0,
                                  classification="aborted", alpha=alpha)
    cov = coverage(instance, solution.y, solution.z, config.budgets(instance.m))
    short = cov < alpha - tol_feas
    phi = float(np.sum(alpha - cov[short]))
    violated = int(short.sum())
    if violated:
        cls = "under-approximate"
    elif solution.status == "optimal":
        cls = "optimal"
    else:
        cls = "aborted"
    return VerificationReport(coverage=cov, phi=phi, violated=violated,
                              classification=cls, alpha=alpha,
                              violated_nodes=[int(i) for i in np.flatnonzero(short)])


def dual_value(d, gamma: int) -> float:
    """Optimum of ``min gamma*eta + sum(zeta)`` s.t. ``zeta_j + eta >= d_j``, ``zeta, eta >= 0``.

    Equals the sum of the ``gamma`` largest entries of ``d``.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("dual_value needs non-negative entries")
    if int(gamma) != gamma or gamma < 0:
        raise ValueError(f"gamma must be a non-negative integer, got {gamma!r}")
    if d.size == 0 or gamma == 0:
        return 0.0
    return float(np.sort(d)[::-1][:int(gamma)].sum())


def dual_value_lp(d, gamma: int) -> float:
    """The same optimum by scanning ``eta`` over its breakpoints.

    The objective is piecewise linear and convex in ``eta`` with breakpoints at
    the entries of ``d`` (and 0), so its minimum is attained at one of them.
    """
    d = np.asarray(d, dtype=float)
    candidates = np.concatenate([[0.0], d])
    return float(min(gamma * eta + np.maximum(d - eta, 0.0).sum() for eta in candidates))


def clamp_logs(nom, dev, floor: float = PROB_FLOOR):
    """Clamped ``ln(nom)`` and the log deviation ``ln(nom + dev) - ln(nom)``."""
    lo = np.clip(nom, floor, 1.0)
    hi = np.clip(np.asarray(nom) + np.asarray(dev), floor, 1.0)
    hi = np.maximum(hi, lo)
    return np.log(lo), np.log(hi) - np.log(lo)
