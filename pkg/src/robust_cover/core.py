"""Domain data model: instances, robustness settings, solutions and reports.

Probabilities are stored as *miss* probabilities: ``p_nom[i, j]`` is the
nominal probability that y-site ``j`` fails to cover demand node ``i`` and
``p_dev[i, j]`` its worst-case upward deviation. A miss probability of exactly
1 means the site cannot cover the node at all.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

FORMAT_VERSION = 1

#: Floor applied to miss probabilities before taking logarithms.
PROB_FLOOR = 1e-6

#: Coverage levels, budgets of uncertainty and tangent weights used in the
#: published experiments.
DEFAULT_ALPHAS = (0.8, 0.85, 0.9)
DEFAULT_BETAS = (0.001, 0.01, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7,
                 0.8, 0.85, 0.9, 0.95, 0.99, 0.999)

SOLVER_STATUSES = ("optimal", "infeasible", "time-limit", "gap-limit",
                   "node-limit")
CLASSIFICATIONS = ("optimal", "under-approximate", "no-solution", "aborted")


class ConfigError(ValueError):
    """Raised for invalid configuration values."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """A robust two-level cooperative covering instance.

    Arrays are copied and made read-only on construction. Use
    :func:`validate` to check the invariants; construction itself does not
    reject malformed data.
    """

    m: int
    n1: int
    n2: int
    cost_y: np.ndarray
    cost_z: np.ndarray
    p_nom: np.ndarray
    p_dev: np.ndarray
    q_nom: np.ndarray
    q_dev: np.ndarray
    coords_demand: np.ndarray | None = None
    coords_y: np.ndarray | None = None
    coords_z: np.ndarray | None = None
    seed: int | None = None
    generator_config: dict | None = None
    name: str | None = None

    def __post_init__(self):
        for attr in ("cost_y", "cost_z"):
            object.__setattr__(self, attr, _frozen(getattr(self, attr)))
        for attr in ("p_nom", "p_dev", "q_nom", "q_dev"):
            object.__setattr__(self, attr, _frozen(getattr(self, attr)))
        for attr in ("coords_demand", "coords_y", "coords_z"):
            val = getattr(self, attr)
            if val is not None:
                object.__setattr__(self, attr, _frozen(val))

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return instance_to_dict(self) == instance_to_dict(other)

    def __hash__(self):
        return id(self)

    @property
    def y_in_range(self) -> np.ndarray:
        """Boolean ``m x n1`` mask of pairs a y-site can cover at all."""
        return self.p_nom < 1.0

    @property
    def z_in_range(self) -> np.ndarray:
        return self.q_nom < 1.0

    def worst_case(self) -> "Instance":
        """Copy whose nominal values are the fully deviated ones (no deviation left)."""
        return Instance(
            m=self.m, n1=self.n1, n2=self.n2,
            cost_y=self.cost_y, cost_z=self.cost_z,
            p_nom=np.minimum(self.p_nom + self.p_dev, 1.0),
            p_dev=np.zeros_like(self.p_dev),
            q_nom=np.minimum(self.q_nom + self.q_dev, 1.0),
            q_dev=np.zeros_like(self.q_dev),
            coords_demand=self.coords_demand, coords_y=self.coords_y,
            coords_z=self.coords_z, seed=self.seed,
            generator_config=self.generator_config,
            name=None if self.name is None else self.name + "-worst",
        )


@dataclass(frozen=True)
class RobustConfig:
    """Coverage level, per-node budgets of uncertainty and tangent weights.

    ``gamma_budget`` may be given as a scalar; call :meth:`budgets` with the
    number of demand nodes to get the broadcast vector.
    """

    alpha: float
    gamma_budget: int | tuple[int, ...] = 0
    beta_list: tuple[float, ...] = DEFAULT_BETAS

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise ConfigError(f"alpha must lie in [0, 1), got {self.alpha}")
        g = self.gamma_budget
        if np.ndim(g) == 0:
            g = int(_check_int(g))
        else:
            g = tuple(int(_check_int(v)) for v in g)
        object.__setattr__(self, "gamma_budget", g)
        betas = tuple(float(b) for b in self.beta_list)
        if not betas:
            raise ConfigError("beta_list must not be empty")
        for b in betas:
            if not (0.0 < b < 1.0):
                raise ConfigError(f"every beta must lie strictly in (0, 1), got {b}")
        object.__setattr__(self, "beta_list", betas)

    def budgets(self, m: int) -> np.ndarray:
        g = self.gamma_budget
        if isinstance(g, tuple):
            if len(g) != m:
                raise ConfigError(f"gamma_budget has length {len(g)}, expected {m}")
            return np.array(g, dtype=int)
        return np.full(m, g, dtype=int)


def _check_int(v) -> int:
    if isinstance(v, (bool, np.bool_)) or int(v) != v or v < 0:
        raise ConfigError(f"budget of uncertainty must be a non-negative integer, got {v!r}")
    return int(v)


@dataclass
class Solution:
    """Result of a solve. ``y``/``z`` are 0/1 integer arrays."""

    y: np.ndarray
    z: np.ndarray
    objective: float
    status: str
    best_bound: float
    wall_time_s: float = 0.0
    nodes: int = 0
    # full column vector of the model that produced it (not serialised)
    values: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "objective": _json_float(self.objective),
            "best_bound": _json_float(self.best_bound),
            "y": [int(v) for v in self.y],
            "z": [int(v) for v in self.z],
            "wall_time_s": self.wall_time_s,
            "nodes": self.nodes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Solution":
        return cls(
            y=np.asarray(d["y"], dtype=int), z=np.asarray(d["z"], dtype=int),
            objective=_from_json_float(d["objective"]), status=d["status"],
            best_bound=_from_json_float(d["best_bound"]),
            wall_time_s=float(d.get("wall_time_s", 0.0)),
            nodes=int(d.get("nodes", 0)),
        )


@dataclass
class VerificationReport:
    coverage: np.ndarray
    phi: float
    violated: int
    classification: str
    alpha: float = 0.0
    violated_nodes: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "coverage": [float(c) for c in self.coverage],
            "phi": self.phi,
            "violated": self.violated,
            "classification": self.classification,
            "alpha": self.alpha,
            "violated_nodes": list(self.violated_nodes),
        }


def _json_float(x):
    x = float(x)
    if np.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def _from_json_float(x):
    return float(x)


def validate(instance: Instance) -> list[str]:
    """Return every invariant breach of ``instance``; an empty list means valid.

    Never raises: unexpected data shows up as a diagnostic string.
    """
    problems: list[str] = []
    try:
        m, n1, n2 = instance.m, instance.n1, instance.n2
        for label, v in (("m", m), ("n1", n1), ("n2", n2)):
            if not isinstance(v, (int, np.integer)) or v < 0:
                problems.append(f"{label} must be a non-negative integer, got {v!r}")
        if problems:
            return problems
        shapes = {
            "cost_y": (n1,), "cost_z": (n2,),
            "p_nom": (m, n1), "p_dev": (m, n1),
            "q_nom": (m, n2), "q_dev": (m, n2),
        }
        ok_shape = {}
        for name, shape in shapes.items():
            arr = getattr(instance, name)
            ok_shape[name] = arr.shape == shape
            if not ok_shape[name]:
                problems.append(f"{name} has shape {arr.shape}, expected {shape}")
            elif not np.all(np.isfinite(arr)):
                problems.append(f"{name} contains non-finite values")
                ok_shape[name] = False
        for name in ("cost_y", "cost_z"):
            if ok_shape[name]:
                for j in np.flatnonzero(getattr(instance, name) < 0):
                    problems.append(f"{name}[{j}] is negative")
        for nom, dev in (("p_nom", "p_dev"), ("q_nom", "q_dev")):
            if not (ok_shape[nom] and ok_shape[dev]):
                continue
            a, d = getattr(instance, nom), getattr(instance, dev)
            for i, j in zip(*np.nonzero((a < 0) | (a > 1))):
                problems.append(f"{nom} outside [0, 1] at ({i},{j})")
            for i, j in zip(*np.nonzero(d < 0)):
                problems.append(f"{dev} negative at ({i},{j})")
            sym = "p" if nom.startswith("p") else "q"
            for i, j in zip(*np.nonzero(a + d > 1.0)):
                problems.append(f"{sym}_nom+{sym}_dev > 1 at ({i},{j})")
        for name, rows in (("coords_demand", m), ("coords_y", n1), ("coords_z", n2)):
            arr = getattr(instance, name)
            if arr is not None and arr.shape != (rows, 2):
                problems.append(f"{name} has shape {arr.shape}, expected {(rows, 2)}")
    except Exception as exc:  # diagnostics, never raise
        problems.append(f"malformed instance: {exc!r}")
    return problems


# -- serialization -----------------------------------------------------------

def instance_to_dict(instance: Instance) -> dict[str, Any]:
    d: dict[str, Any] = {
        "format": FORMAT_VERSION,
        "m": int(instance.m), "n1": int(instance.n1), "n2": int(instance.n2),
        "cost_y": instance.cost_y.tolist(), "cost_z": instance.cost_z.tolist(),
        "p_nom": instance.p_nom.tolist(), "p_dev": instance.p_dev.tolist(),
        "q_nom": instance.q_nom.tolist(), "q_dev": instance.q_dev.tolist(),
    }
    coords = {}
    for key, attr in (("demand", "coords_demand"), ("y", "coords_y"), ("z", "coords_z")):
        val = getattr(instance, attr)
        if val is not None:
            coords[key] = val.tolist()
    if coords:
        d["coords"] = coords
    if instance.seed is not None:
        d["seed"] = int(instance.seed)
    if instance.generator_config is not None:
        d["generator_config"] = instance.generator_config
    if instance.name is not None:
        d["name"] = instance.name
    return d


def instance_from_dict(d: dict[str, Any]) -> Instance:
    fmt = d.get("format", FORMAT_VERSION)
    if fmt != FORMAT_VERSION:
        raise ConfigError(f"unsupported instance format {fmt!r}")
    coords = d.get("coords") or {}

    def mat(key, rows, cols):
        arr = np.array(d[key], dtype=float)
        if arr.size == 0:
            arr = arr.reshape(rows, cols)
        return arr

    m, n1, n2 = int(d["m"]), int(d["n1"]), int(d["n2"])
    return Instance(
        m=m, n1=n1, n2=n2,
        cost_y=np.array(d["cost_y"], dtype=float),
        cost_z=np.array(d["cost_z"], dtype=float),
        p_nom=mat("p_nom", m, n1), p_dev=mat("p_dev", m, n1),
        q_nom=mat("q_nom", m, n2), q_dev=mat("q_dev", m, n2),
        coords_demand=coords.get("demand"), coords_y=coords.get("y"),
        coords_z=coords.get("z"), seed=d.get("seed"),
        generator_config=d.get("generator_config"), name=d.get("name"),
    )


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=1)


def write_instance(instance: Instance, path) -> Path:
    path = Path(path)
    path.write_text(dumps_instance(instance) + "\n")
    return path


def read_instance(path) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))


def write_solution(solution: Solution, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(solution.to_dict(), indent=1) + "\n")
    return path


def read_solution(path) -> Solution:
    return Solution.from_dict(json.loads(Path(path).read_text()))


def make_instance(cost_y: Sequence[float], cost_z: Sequence[float],
                  p_nom, p_dev=None, q_nom=None, q_dev=None, **kw) -> Instance:
    """Convenience constructor inferring the dimensions from the matrices."""
    p_nom = np.atleast_2d(np.asarray(p_nom, dtype=float))
    q_nom = np.atleast_2d(np.asarray(q_nom, dtype=float))
    p_dev = np.zeros_like(p_nom) if p_dev is None else np.atleast_2d(np.asarray(p_dev, dtype=float))
    q_dev = np.zeros_like(q_nom) if q_dev is None else np.atleast_2d(np.asarray(q_dev, dtype=float))
    return Instance(m=p_nom.shape[0], n1=p_nom.shape[1], n2=q_nom.shape[1],
                    cost_y=cost_y, cost_z=cost_z, p_nom=p_nom, p_dev=p_dev,
                    q_nom=q_nom, q_dev=q_dev, **kw)
