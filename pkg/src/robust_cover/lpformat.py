"""Read and write models in the CPLEX LP text format.

Only the linear subset is handled: one objective, linear rows with
``<=``/``>=``/``=``, a ``Bounds`` section, ``Binaries`` and ``Generals``.
Numbers are written with ``repr`` so a write/read round trip is exact.
"""
from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from .milp import StandardFormModel

_LINE = 200


def _num(v: float) -> str:
    if math.isinf(v):
        return "+inf" if v > 0 else "-inf"
    return repr(float(v))


def _terms(idx, coef, names) -> list[str]:
    out = []
    for j, a in zip(idx, coef):
        sign = "-" if a < 0 else "+"
        out.append(f"{sign} {_num(abs(a))} {names[j]}")
    if not out:
        out.append(f"+ 0.0 {names[0]}")
    return out


def _wrap(head: str, parts: list[str]) -> list[str]:
    lines, cur = [], head
    for p in parts:
        if len(cur) + len(p) + 1 > _LINE:
            lines.append(cur)
            cur = "   "
        cur += " " + p
    lines.append(cur)
    return lines


def dumps_lp(model: StandardFormModel) -> str:
    names = [v.name for v in model.variables]
    out = [f"\\ {model.name}", "Minimize"]
    # every column appears (zero costs included) so a reader declares them in order
    cost = model.cost_vector()
    parts = _terms(range(model.n_vars), cost, names) if model.n_vars else []
    if model.objective_offset:
        parts.append(f"{'-' if model.objective_offset < 0 else '+'} {_num(abs(model.objective_offset))}")
    out += _wrap(" obj:", parts)
    out.append("Subject To")
    for con in model.constraints:
        parts = _terms(con.index, con.coef, names)
        parts.append(f"{con.sense} {_num(con.rhs)}")
        out += _wrap(f" {con.label}:", parts)
    out.append("Bounds")
    for v in model.variables:
        if v.kind == "binary":
            continue
        lo, hi = v.lower, v.upper
        if lo == hi:
            out.append(f" {v.name} = {_num(lo)}")
        elif lo == -math.inf and hi == math.inf:
            out.append(f" {v.name} free")
        elif lo == 0.0 and hi == math.inf:
            continue
        else:
            out.append(f" {_num(lo)} <= {v.name} <= {_num(hi)}")
    for section, kind in (("Binaries", "binary"), ("Generals", "integer")):
        chosen = [v.name for v in model.variables if v.kind == kind]
        if chosen:
            out.append(section)
            out += _wrap("", chosen)
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(model: StandardFormModel, path) -> Path:
    path = Path(path)
    path.write_text(dumps_lp(model))
    return path


# -- reading ---------------------------------------------------------------

_SECTIONS = {
    "minimize": "obj", "minimise": "obj", "minimum": "obj", "min": "obj",
    "maximize": "max", "maximise": "max", "maximum": "max", "max": "max",
    "subject to": "rows", "such that": "rows", "st": "rows", "s.t.": "rows",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "generals": "gen", "general": "gen", "gen": "gen",
    "end": "end",
}
_TOKEN = re.compile(
    r"\s*(<=|>=|=<|=>|<|>|=|[+-]"
    r"|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?(?![\w.\[])"
    r"|[^\s+\-<>=:]+:?|:)")
_NUMBER = re.compile(r"^(\d+\.?\d*([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?|inf(inity)?)$", re.I)


class LPFormatError(ValueError):
    pass


def _parse_number(tok: str) -> float:
    return float(tok.lower().replace("infinity", "inf"))


def _parse_expr(tokens: list[str]):
    """Split ``tokens`` into ``[(coef, name)]`` terms plus a constant."""
    terms, const = [], 0.0
    sign, coef = 1.0, None
    for tok in tokens:
        if tok in ("+", "-"):
            if coef is not None:
                const += sign * coef
                sign, coef = 1.0, None
            if tok == "-":
                sign = -sign
        elif _NUMBER.match(tok):
            if coef is not None:
                raise LPFormatError(f"two numbers in a row near {tok!r}")
            coef = _parse_number(tok)
        else:
            terms.append((sign * (1.0 if coef is None else coef), tok))
            sign, coef = 1.0, None
    if coef is not None:
        const += sign * coef
    return terms, const


def _tokens(text: str) -> list[str]:
    return [t for t in _TOKEN.findall(text) if t]


def loads_lp(text: str) -> StandardFormModel:
    lines = []
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if line:
            lines.append(line)
    blocks: dict[str, list[str]] = {"obj": [], "rows": [], "bounds": [], "bin": [], "gen": []}
    section, maximize, name = None, False, "model"
    for line in lines:
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section == "max":
                maximize, section = True, "obj"
            if section == "end":
                break
            continue
        if section is None:
            raise LPFormatError(f"content before first section: {line!r}")
        blocks[section].append(line)
    for raw in text.splitlines():
        if raw.startswith("\\ "):
            name = raw[2:].strip() or name
            break

    model = StandardFormModel(name=name)

    def col(nm: str) -> int:
        if nm not in model.variable_map:
            model.add_variable(nm)
        return model.variable_map[nm]

    obj_tokens = _tokens(" ".join(blocks["obj"]))
    if len(obj_tokens) >= 1 and obj_tokens[0].endswith(":"):
        obj_tokens = obj_tokens[1:]
    elif len(obj_tokens) >= 2 and obj_tokens[1] == ":":
        obj_tokens = obj_tokens[2:]
    terms, const = _parse_expr(obj_tokens)
    sgn = -1.0 if maximize else 1.0
    for a, nm in terms:
        j = col(nm)
        model.objective[j] = model.objective.get(j, 0.0) + sgn * a
        if model.objective[j] == 0.0:
            del model.objective[j]
    model.objective_offset = sgn * const

    # rows may span several lines: a row ends at its rhs number
    rows, cur = [], []
    for tok in _tokens(" ".join(blocks["rows"])):
        cur.append(tok)
        if len(cur) >= 2 and cur[-2] in ("<=", ">=", "=<", "=>", "<", ">", "=") \
                and _NUMBER.match(cur[-1]):
            rows.append(cur)
            cur = []
        elif len(cur) >= 3 and cur[-3] in ("<=", ">=", "=<", "=>", "<", ">", "=") \
                and cur[-2] in ("+", "-") and _NUMBER.match(cur[-1]):
            rows.append(cur)
            cur = []
    if cur:
        raise LPFormatError(f"unterminated constraint: {' '.join(cur)}")
    for r, toks in enumerate(rows):
        label = f"c{r}"
        if toks[0].endswith(":") and len(toks[0]) > 1:
            label, toks = toks[0][:-1], toks[1:]
        elif len(toks) > 1 and toks[1] == ":":
            label, toks = toks[0], toks[2:]
        k = next(i for i, t in enumerate(toks) if t in ("<=", ">=", "=<", "=>", "<", ">", "="))
        sense = {"<": "<=", "=<": "<=", ">": ">=", "=>": ">="}.get(toks[k], toks[k])
        rhs_terms, rhs_const = _parse_expr(toks[k + 1:])
        lhs_terms, lhs_const = _parse_expr(toks[:k])
        if rhs_terms:
            raise LPFormatError(f"variables on the right-hand side of {label!r}")
        acc: dict[int, float] = {}
        for a, nm in lhs_terms:
            j = col(nm)
            acc[j] = acc.get(j, 0.0) + a
        idx = np.array(sorted(acc), dtype=np.int64)
        model.add_constraint(idx, [acc[j] for j in idx], sense, rhs_const - lhs_const, label)

    for line in blocks["bounds"]:
        _parse_bound(model, col, _tokens(line))
    for kind, key in (("binary", "bin"), ("integer", "gen")):
        for nm in " ".join(blocks[key]).split():
            v = model.variables[col(nm)]
            v.kind = kind
            if kind == "binary":
                v.lower, v.upper = max(v.lower, 0.0), min(v.upper, 1.0)
    return model


def _parse_bound(model, col, toks):
    low = [t.lower() for t in toks]
    if len(toks) == 2 and low[1] == "free":
        v = model.variables[col(toks[0])]
        v.lower, v.upper = -math.inf, math.inf
        return
    # normalise signed numbers: ["-", "inf"] -> "-inf"
    merged = []
    i = 0
    while i < len(toks):
        if toks[i] in ("+", "-") and i + 1 < len(toks) and _NUMBER.match(toks[i + 1]):
            merged.append(toks[i] + toks[i + 1])
            i += 2
        else:
            merged.append(toks[i])
            i += 1
    ops = ("<=", ">=", "=<", "=>", "<", ">", "=")

    def is_num(t):
        return _NUMBER.match(t.lstrip("+-")) is not None

    def apply(nm, op, val):
        v = model.variables[col(nm)]
        op = {"<": "<=", "=<": "<=", ">": ">=", "=>": ">="}.get(op, op)
        if op == "<=":
            v.upper = val
        elif op == ">=":
            v.lower = val
        else:
            v.lower = v.upper = val

    flip = {"<=": ">=", ">=": "<=", "<": ">", ">": "<", "=<": "=>", "=>": "=<", "=": "="}
    if len(merged) == 5 and merged[1] in ops and merged[3] in ops:
        lo, op1, nm, op2, hi = merged
        apply(nm, flip[op1], _parse_number(lo.lstrip("+")))
        apply(nm, op2, _parse_number(hi.lstrip("+")))
    elif len(merged) == 3 and merged[1] in ops:
        a, op, b = merged
        if is_num(a):
            apply(b, flip[op], _parse_number(a.lstrip("+")))
        else:
            apply(a, op, _parse_number(b.lstrip("+")))
    else:
        raise LPFormatError(f"cannot parse bound {' '.join(toks)!r}")


def read_lp(path) -> StandardFormModel:
    return loads_lp(Path(path).read_text())
