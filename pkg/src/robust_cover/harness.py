"""Experiment matrix: generate suites, solve the robust model, verify and tabulate.

One run is a (family, replicate, alpha, Gamma) combination. Its LA model is
solved with the built-in solver (only the solve is timed), the selection is
checked against the exact robust cover constraints, and the run is classified:

* ``no-solution`` - the LA model is infeasible (so is the exact problem);
* ``optimal`` - solved to optimality and no exact constraint is violated;
* ``under-approximate`` - some exact constraint is violated (``phi > 0``);
* ``aborted`` - a time or node limit was hit without a violation (or without
  any incumbent).
"""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import DEFAULT_ALPHAS, DEFAULT_BETAS, ConfigError, RobustConfig
from .generator import TABLE1, GeneratorConfig, generate, table1_config
from .milp import build_rutlcscp_la_rc
from .oracle import verify
from .solver import SolverOptions, solve

TIME_LIMIT_ENV = "RCK_TIME_LIMIT_S"
DESK_FAMILIES = ("P1", "P2", "P3")
DESK_GAMMAS = ("0", "1", "2", "all")


@dataclass
class RunRecord:
    instance: str
    family: str
    replicate: int
    alpha: float
    gamma: int
    status: str
    objective: float
    wall_time_s: float
    phi: float
    violated: int
    m: int
    classification: str
    nodes: int = 0

    def sort_key(self):
        return (self.family, self.alpha, self.gamma, self.replicate)


@dataclass
class CellSummary:
    family: str
    alpha: float
    runs: int
    optimal: int
    under_approximate: int
    no_solution: int
    aborted: int
    opt_pct: float
    mean_time_s: float
    cv_pct: float
    feasibility_pct: float


@dataclass
class SuiteSummary:
    cells: list[CellSummary]
    total: int
    optimal: int
    under_approximate: int
    no_solution: int
    aborted: int
    optimal_pct: float
    under_approximate_pct: float
    no_solution_pct: float
    aborted_pct: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cells"] = [asdict(c) for c in self.cells]
        return d

    def global_line(self) -> str:
        return (f"{self.optimal_pct:.2f}% ({self.optimal} runs) optimal, "
                f"{self.under_approximate_pct:.2f}% ({self.under_approximate} runs) under-approximate, "
                f"{self.no_solution_pct:.2f}% ({self.no_solution} runs) without solution"
                + (f", {self.aborted_pct:.2f}% ({self.aborted} runs) aborted" if self.aborted else ""))


# -- matrix ---------------------------------------------------------------------

def resolve_gammas(tokens: Iterable, m: int) -> list[int]:
    """Budgets for an instance with ``m`` nodes.

    Tokens are integers, ``"all"`` (= ``m``) or ``"sweep"`` (``0 .. m``).
    Duplicates are dropped, order is ascending.
    """
    out: set[int] = set()
    for tok in tokens:
        t = str(tok).strip().lower()
        if t == "all":
            out.add(m)
        elif t == "sweep":
            out.update(range(m + 1))
        else:
            try:
                v = int(t)
            except ValueError:
                raise ConfigError(f"bad Gamma token {tok!r}") from None
            if v < 0:
                raise ConfigError(f"Gamma must be non-negative, got {v}")
            out.add(v)
    return sorted(out)


def _family_config(family, seed: int) -> tuple[str, GeneratorConfig]:
    if isinstance(family, str):
        return family, table1_config(family, seed)
    name, cfg = family
    return name, GeneratorConfig(**{**asdict(cfg), "seed": seed})


def _default_options() -> SolverOptions:
    limit = os.environ.get(TIME_LIMIT_ENV)
    return SolverOptions(time_limit_s=float(limit) if limit else None)


def _run_instance(job) -> list[RunRecord]:
    family, replicate, seed, alphas, gamma_tokens, betas, options = job
    name, cfg = _family_config(family, seed)
    inst = generate(cfg, name=f"{name}.{replicate + 1}")
    out = []
    for alpha in alphas:
        for gamma in resolve_gammas(gamma_tokens, inst.m):
            config = RobustConfig(alpha=alpha, gamma_budget=gamma, beta_list=tuple(betas))
            sol = solve(build_rutlcscp_la_rc(inst, config), options)
            rep = verify(inst, sol, config)
            out.append(RunRecord(
                instance=inst.name, family=name, replicate=replicate, alpha=float(alpha),
                gamma=gamma, status=sol.status, objective=sol.objective,
                wall_time_s=sol.wall_time_s, phi=rep.phi, violated=rep.violated, m=inst.m,
                classification=rep.classification, nodes=sol.nodes))
    return out


def run_matrix(families: Sequence = DESK_FAMILIES, alphas: Sequence[float] = DEFAULT_ALPHAS,
               gamma_policy: Sequence = DESK_GAMMAS, replicates: int = 3, base_seed: int = 0,
               options: SolverOptions | None = None, workers: int = 1,
               betas: Sequence[float] = DEFAULT_BETAS) -> list[RunRecord]:
    """Solve every (instance, alpha, Gamma) combination.

    ``families`` holds benchmark family names or ``(name, GeneratorConfig)`` pairs;
    replicate ``r`` of a family uses seed ``base_seed + r``. Instances are
    farmed out to ``workers`` processes; records come back sorted by
    (family, alpha, Gamma, replicate).
    """
    if replicates < 1:
        raise ConfigError("replicates must be at least 1")
    if not families or not alphas or not gamma_policy:
        raise ConfigError("families, alphas and gamma_policy must be non-empty")
    for fam in families:
        if isinstance(fam, str) and fam not in TABLE1:
            raise ConfigError(f"unknown family {fam!r}")
    options = options or _default_options()
    jobs = [(fam, r, base_seed + r, tuple(alphas), tuple(gamma_policy), tuple(betas), options)
            for fam in families for r in range(replicates)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_instance, jobs))
    else:
        chunks = [_run_instance(job) for job in jobs]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=RunRecord.sort_key)
    return records


def full_matrix_size(families: Iterable[str] = tuple(TABLE1), n_alphas: int = 3,
                     replicates: int = 5) -> int:
    """Run count of the complete sweep ``Gamma = 0 .. m``."""
    return sum(n_alphas * replicates * (TABLE1[f][0] + 1) for f in families)


# -- statistics -----------------------------------------------------------------

def _pct(num: float, den: float) -> float:
    return 100.0 * num / den if den else 0.0


def summarize(records: Sequence[RunRecord]) -> SuiteSummary:
    """Per (family, alpha) statistics and the global split.

    * ``opt_pct``: optimal runs among runs with an LA solution;
    * ``mean_time_s``: arithmetic mean solve time of all runs;
    * ``cv_pct``: violated node constraints over ``m`` times the runs with an
      LA solution;
    * ``feasibility_pct``: runs with an LA solution over all runs.
    """
    if not records:
        raise ValueError("summarize needs at least one record")
    groups: dict[tuple[str, float], list[RunRecord]] = {}
    for rec in sorted(records, key=RunRecord.sort_key):
        groups.setdefault((rec.family, rec.alpha), []).append(rec)
    cells = []
    for (fam, alpha), recs in groups.items():
        counts = {c: sum(r.classification == c for r in recs)
                  for c in ("optimal", "under-approximate", "no-solution", "aborted")}
        solved = [r for r in recs if math.isfinite(r.objective)]
        cells.append(CellSummary(
            family=fam, alpha=alpha, runs=len(recs), optimal=counts["optimal"],
            under_approximate=counts["under-approximate"], no_solution=counts["no-solution"],
            aborted=counts["aborted"],
            opt_pct=_pct(counts["optimal"], len(solved)),
            mean_time_s=float(np.mean([r.wall_time_s for r in recs])),
            cv_pct=_pct(sum(r.violated for r in solved), sum(r.m for r in solved)),
            feasibility_pct=_pct(len(solved), len(recs))))
    n = len(records)
    tally = {c: sum(r.classification == c for r in records)
             for c in ("optimal", "under-approximate", "no-solution", "aborted")}
    return SuiteSummary(
        cells=cells, total=n, optimal=tally["optimal"],
        under_approximate=tally["under-approximate"], no_solution=tally["no-solution"],
        aborted=tally["aborted"], optimal_pct=_pct(tally["optimal"], n),
        under_approximate_pct=_pct(tally["under-approximate"], n),
        no_solution_pct=_pct(tally["no-solution"], n), aborted_pct=_pct(tally["aborted"], n))


# -- reports --------------------------------------------------------------------

def _fmt_float(v: float) -> str:
    return repr(float(v)) if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def table2_markdown(summary: SuiteSummary) -> str:
    lines = ["| Instance | α | Opt. (%) | Time (s) | CV (%) | Degree of feasibility (%) |",
             "|---|---|---|---|---|---|"]
    for c in summary.cells:
        lines.append(f"| {c.family} | {c.alpha:g} | {c.opt_pct:.2f} | {c.mean_time_s:.2f} | "
                     f"{c.cv_pct:.2f} | {c.feasibility_pct:.2f} |")
    lines += ["", summary.global_line()]
    return "\n".join(lines) + "\n"


def table3_markdown(records: Sequence[RunRecord]) -> str:
    lines = ["| Instance | α | Γ | Obj. | φ | # |", "|---|---|---|---|---|---|"]
    for r in sorted(records, key=RunRecord.sort_key):
        if r.classification != "under-approximate":
            continue
        lines.append(f"| {r.instance} | {r.alpha:g} | {r.gamma} | {r.objective:.2f} | "
                     f"{r.phi:.2E} | {r.violated}/{r.m} |")
    return "\n".join(lines) + "\n"


def write_records_csv(records: Sequence[RunRecord], path) -> Path:
    path = Path(path)
    names = [f.name for f in fields(RunRecord)]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in sorted(records, key=RunRecord.sort_key):
            row = []
            for name in names:
                v = getattr(r, name)
                row.append(_fmt_float(v) if isinstance(v, float) else v)
            w.writerow(row)
    return path


def read_records_csv(path) -> list[RunRecord]:
    out = []
    types = {f.name: f.type for f in fields(RunRecord)}
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for k, v in row.items():
                t = types[k]
                kw[k] = float(v) if t == "float" else int(v) if t == "int" else v
            out.append(RunRecord(**kw))
    return out


def write_summary_csv(summary: SuiteSummary, path) -> Path:
    path = Path(path)
    names = [f.name for f in fields(CellSummary)]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for c in summary.cells:
            w.writerow([_fmt_float(getattr(c, n)) if isinstance(getattr(c, n), float)
                        else getattr(c, n) for n in names])
    return path


def report(summary: SuiteSummary, records: Sequence[RunRecord], out_dir,
           formats: Sequence[str] = ("csv", "json", "markdown")) -> list[Path]:
    """Write ``records.csv``/``summary.csv``, ``summary.json`` and ``table2.md``/``table3.md``."""
    unknown = set(formats) - {"csv", "json", "markdown"}
    if unknown:
        raise ConfigError(f"unknown report format(s): {', '.join(sorted(unknown))}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        written.append(write_records_csv(records, out / "records.csv"))
        written.append(write_summary_csv(summary, out / "summary.csv"))
    if "json" in formats:
        p = out / "summary.json"
        p.write_text(json.dumps(summary.to_dict(), indent=2) + "\n")
        written.append(p)
    if "markdown" in formats:
        p2, p3 = out / "table2.md", out / "table3.md"
        p2.write_text(table2_markdown(summary))
        p3.write_text(table3_markdown(records))
        written += [p2, p3]
    return written
