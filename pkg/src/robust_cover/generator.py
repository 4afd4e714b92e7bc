"""Seeded test-case generator for the P1-P10 instance families.

Demand nodes are scattered uniformly over an ``ax x ay`` km region and every
node doubles as a candidate y- and z-site. For a pair within covering range
the coverage probability is drawn from ``cover_prob_range`` and stored as the
miss probability ``1 - c``; the deviation is drawn from ``dev_range`` and
truncated so the interval stays inside [0, 1]. Out-of-range pairs get miss
probability 1 and no deviation.

Draw order (fixed, so a seed reproduces an instance exactly): demand
coordinates, [y-site coordinates, z-site coordinates when not co-located],
y costs, z costs, y coverage, y deviation, z coverage, z deviation. Full
matrices are always drawn, so changing a covering range never shifts the
random stream.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .core import PROB_FLOOR, ConfigError, Instance, write_instance

PRNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True)
class GeneratorConfig:
    m: int
    n1: int
    n2: int
    yr: float
    zr: float
    ax: float
    ay: float
    cost_range: tuple[float, float] = (0.0, 100.0)
    cover_prob_range: tuple[float, float] = (0.9, 1.0)
    dev_range: tuple[float, float] = (0.0, 0.1)
    seed: int = 0

    def check(self) -> None:
        for name in ("m", "n1", "n2"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        for name in ("yr", "zr", "ax", "ay"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        lo, hi = self.cost_range
        if not 0 <= lo <= hi:
            raise ConfigError(f"bad cost_range {self.cost_range}")
        for name in ("cover_prob_range", "dev_range"):
            lo, hi = getattr(self, name)
            if not 0.0 <= lo <= hi <= 1.0:
                raise ConfigError(f"{name} must lie within [0, 1], got {(lo, hi)}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def colocated(self) -> bool:
        return self.m == self.n1 == self.n2


# (m = n1 = n2, yr, zr, ax = ay)
TABLE1 = {
    "P1": (20, 10, 5, 25),
    "P2": (25, 10, 5, 25),
    "P3": (30, 10, 5, 25),
    "P4": (40, 14, 7, 50),
    "P5": (50, 14, 7, 50),
    "P6": (60, 14, 7, 50),
    "P7": (80, 20, 10, 100),
    "P8": (100, 20, 10, 100),
    "P9": (120, 20, 10, 100),
    "P10": (140, 20, 10, 100),
}


def table1_config(row: str, seed: int = 0) -> GeneratorConfig:
    """Generator settings for one benchmark family (``"P1"`` ... ``"P10"``)."""
    try:
        n, yr, zr, a = TABLE1[row]
    except KeyError:
        raise ConfigError(f"unknown family {row!r}; expected one of {', '.join(TABLE1)}") from None
    return GeneratorConfig(m=n, n1=n, n2=n, yr=yr, zr=zr, ax=a, ay=a, seed=seed)


def _probabilities(rng, dist, radius, cover_range, dev_range):
    cover = rng.uniform(*cover_range, size=dist.shape)
    dev = rng.uniform(*dev_range, size=dist.shape)
    inside = dist <= radius
    nom = np.where(inside, np.maximum(1.0 - cover, PROB_FLOOR), 1.0)
    dev = np.where(inside, np.minimum(dev, 1.0 - nom), 0.0)
    return nom, dev


def generate(config: GeneratorConfig, name: str | None = None) -> Instance:
    config.check()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    extent = np.array([config.ax, config.ay])
    demand = rng.uniform(0.0, 1.0, size=(config.m, 2)) * extent
    if config.colocated:
        ys = zs = demand
    else:
        ys = rng.uniform(0.0, 1.0, size=(config.n1, 2)) * extent
        zs = rng.uniform(0.0, 1.0, size=(config.n2, 2)) * extent
    cost_y = rng.uniform(*config.cost_range, size=config.n1)
    cost_z = rng.uniform(*config.cost_range, size=config.n2)
    dist_y = np.linalg.norm(demand[:, None, :] - ys[None, :, :], axis=2)
    dist_z = np.linalg.norm(demand[:, None, :] - zs[None, :, :], axis=2)
    p_nom, p_dev = _probabilities(rng, dist_y, config.yr, config.cover_prob_range, config.dev_range)
    q_nom, q_dev = _probabilities(rng, dist_z, config.zr, config.cover_prob_range, config.dev_range)
    record = asdict(config)
    record["prng"] = PRNG_NAME
    return Instance(
        m=config.m, n1=config.n1, n2=config.n2,
        cost_y=cost_y, cost_z=cost_z,
        p_nom=p_nom, p_dev=p_dev, q_nom=q_nom, q_dev=q_dev,
        coords_demand=demand, coords_y=ys, coords_z=zs,
        seed=config.seed, generator_config=_jsonable(record), name=name,
    )


def _jsonable(d: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def generate_suite(row: str, replicate_count: int, base_seed: int = 0) -> list[Instance]:
    """Replicates ``row.1 ... row.N``; replicate ``r`` (0-based) uses seed ``base_seed + r``."""
    if replicate_count < 0:
        raise ConfigError("replicate_count must be non-negative")
    table1_config(row)
    return [generate(table1_config(row, base_seed + r), name=f"{row}.{r + 1}")
            for r in range(replicate_count)]


def write_suite(instances, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [write_instance(inst, out / f"{inst.name}.json") for inst in instances]
