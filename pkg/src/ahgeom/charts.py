"""Chart files: parsing, validation, serialization and pointwise evaluation.

A chart file is line oriented; `#` starts a comment.  Recognized lines:

    dim = <m>                    complex dimension (real dimension is 2m)
    coords = <id> <id> ...       exactly 2m coordinate names
    domain <id> = <lo> <hi>      closed interval, default unbounded
    g[<i>][<j>] = <expr>         metric entries, 1-based; the symmetric
                                 counterpart is auto-filled; unset entries
                                 default to 0; conflicting duplicates error
    J[<i>][<j>] = <expr>         complex structure entries, default 0
    point = <v1> <v2> ...        default evaluation point (repeatable)

Expressions follow the grammar in `expressions`.  Parsing is total: any
malformed input raises a ChartError with a line (and, for expressions,
column) position instead of crashing.
"""

from __future__ import annotations

import keyword
import math
import re
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .expressions import (
    FUNCTIONS,
    Expr,
    ExprError,
    ExprEvalError,
    Num,
    evaluate,
    parse_expression,
    to_source,
    variables_of,
)
from .tensor_core import HermitianPoint, InvariantViolation

__all__ = [
    "ChartError",
    "ChartSyntaxError",
    "ChartEvalError",
    "DomainError",
    "ChartSpec",
    "Chart",
    "parse_chart",
    "serialize_chart",
    "evaluate_chart_point",
]

UNBOUNDED = (-math.inf, math.inf)
DEFAULT_POINT_TOL = 1e-8


class ChartError(ValueError):
    pass


class ChartSyntaxError(ChartError):
    pass


class ChartEvalError(ChartError):
    pass


class DomainError(ChartError):
    pass


@runtime_checkable
class Chart(Protocol):
    """What the finite-difference calculus needs from a chart.

    ChartSpec implements this with expression tables; model charts may
    implement it natively (e.g. through an embedding).
    """

    m: int
    coord_names: tuple[str, ...]
    domain: tuple[tuple[float, float], ...]
    default_points: tuple[tuple[float, ...], ...]

    def metric_at(self, p: np.ndarray) -> np.ndarray: ...

    def j_at(self, p: np.ndarray) -> np.ndarray: ...

    def eval_point(self, p, tol: float = DEFAULT_POINT_TOL) -> HermitianPoint: ...


def check_domain(chart: Chart, p: np.ndarray) -> None:
    for k, name in enumerate(chart.coord_names):
        lo, hi = chart.domain[k]
        if not (lo <= p[k] <= hi):
            raise DomainError(
                f"coordinate {name} = {p[k]!r} outside domain [{lo}, {hi}]"
            )


def evaluate_chart_point(chart: Chart, p, tol: float = DEFAULT_POINT_TOL) -> HermitianPoint:
    """Evaluate g and J at p and verify the almost Hermitian invariants.

    A violation beyond `tol` is an error, not a warning.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (2 * chart.m,):
        raise ChartEvalError(f"point must have {2 * chart.m} coordinates, got {p.shape}")
    check_domain(chart, p)
    g = chart.metric_at(p)
    J = chart.j_at(p)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(J))):
        raise ChartEvalError(f"non-finite chart value at point {p.tolist()}")
    try:
        return HermitianPoint(m=chart.m, g=g, J=J, tol=tol)
    except InvariantViolation as exc:
        raise ChartEvalError(f"invariant violation at point {p.tolist()}: {exc}") from exc


@dataclass(frozen=True)
class ChartSpec:
    """A parsed chart: immutable after construction, cheap to evaluate.

    Structural equality compares dimensions, names, domains, default points
    and the (normalized) expression tables.
    """

    m: int
    coord_names: tuple[str, ...]
    metric_exprs: tuple[tuple[Expr, ...], ...]
    j_exprs: tuple[tuple[Expr, ...], ...]
    domain: tuple[tuple[float, float], ...]
    default_points: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        n = 2 * self.m
        gcodes = [[self.metric_exprs[i][j] for j in range(n)] for i in range(n)]
        jcodes = [[self.j_exprs[i][j] for j in range(n)] for i in range(n)]
        object.__setattr__(self, "_gtable", gcodes)
        object.__setattr__(self, "_jtable", jcodes)
        object.__setattr__(self, "_cache", {})

    def _tables_at(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        key = tuple(p.tolist())
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        env = dict(zip(self.coord_names, key))
        n = 2 * self.m
        g = np.empty((n, n))
        J = np.empty((n, n))
        try:
            for i in range(n):
                for j in range(i, n):
                    g[i, j] = g[j, i] = evaluate(self._gtable[i][j], env)
            for i in range(n):
                for j in range(n):
                    J[i, j] = evaluate(self._jtable[i][j], env)
        except ExprEvalError as exc:
            raise ChartEvalError(str(exc)) from exc
        g.setflags(write=False)
        J.setflags(write=False)
        self._cache[key] = (g, J)
        return g, J

    def metric_at(self, p: np.ndarray) -> np.ndarray:
        return self._tables_at(np.asarray(p, dtype=float))[0]

    def j_at(self, p: np.ndarray) -> np.ndarray:
        return self._tables_at(np.asarray(p, dtype=float))[1]

    def eval_point(self, p, tol: float = DEFAULT_POINT_TOL) -> HermitianPoint:
        return evaluate_chart_point(self, p, tol)


_LHS_ENTRY_RE = re.compile(r"^([gJ])\[(\d+)\]\[(\d+)\]$")
_LHS_DOMAIN_RE = re.compile(r"^domain\s+([A-Za-z_]\w*)$")
_IDENT_RE = re.compile(r"^[A-Za-z_]\w*$")


def _parse_floats(text: str, line: int, what: str) -> tuple[float, ...]:
    values = []
    for tok in text.split():
        try:
            values.append(float(tok))
        except ValueError:
            raise ChartSyntaxError(f"bad number {tok!r} in {what} (line {line})") from None
    return tuple(values)


def parse_chart(text: str) -> ChartSpec:
    """Parse chart file text into a ChartSpec, or raise a diagnostic ChartError."""
    m: int | None = None
    coords: tuple[str, ...] | None = None
    domains: dict[str, tuple[float, float]] = {}
    g_entries: dict[tuple[int, int], tuple[Expr, int]] = {}
    j_entries: dict[tuple[int, int], tuple[Expr, int]] = {}
    points: list[tuple[float, ...]] = []
    entry_lines: list[tuple[Expr, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ChartSyntaxError(f"expected '<name> = <value>' (line {lineno})")
        lhs_raw, rhs = line.split("=", 1)
        lhs = lhs_raw.strip()
        col_base = len(lhs_raw) + 2  # 1-based column where the rhs starts

        if lhs == "dim":
            if m is not None:
                raise ChartSyntaxError(f"duplicate 'dim' (line {lineno})")
            try:
                m = int(rhs.strip())
            except ValueError:
                raise ChartSyntaxError(f"dim must be an integer (line {lineno})") from None
            if m < 1:
                raise ChartSyntaxError(f"dim must be >= 1 (line {lineno})")
        elif lhs == "coords":
            if coords is not None:
                raise ChartSyntaxError(f"duplicate 'coords' (line {lineno})")
            coords = tuple(rhs.split())
            for name in coords:
                if not _IDENT_RE.match(name) or keyword.iskeyword(name):
                    raise ChartSyntaxError(f"bad coordinate name {name!r} (line {lineno})")
                if name in FUNCTIONS:
                    raise ChartSyntaxError(
                        f"coordinate name {name!r} collides with a function (line {lineno})"
                    )
            if len(set(coords)) != len(coords):
                raise ChartSyntaxError(f"duplicate coordinate name (line {lineno})")
        elif _LHS_DOMAIN_RE.match(lhs):
            name = _LHS_DOMAIN_RE.match(lhs).group(1)
            if name in domains:
                raise ChartSyntaxError(f"duplicate domain for {name!r} (line {lineno})")
            bounds = _parse_floats(rhs, lineno, f"domain of {name}")
            if len(bounds) != 2 or bounds[0] > bounds[1]:
                raise ChartSyntaxError(
                    f"domain needs '<lo> <hi>' with lo <= hi (line {lineno})"
                )
            domains[name] = bounds
        elif lhs == "point":
            points.append(_parse_floats(rhs, lineno, "point"))
        elif _LHS_ENTRY_RE.match(lhs):
            table, si, sj = _LHS_ENTRY_RE.match(lhs).groups()
            i, j = int(si), int(sj)
            if i < 1 or j < 1:
                raise ChartSyntaxError(f"entry indices are 1-based (line {lineno})")
            try:
                expr = parse_expression(rhs, lineno, col_base)
            except ExprError as exc:
                raise ChartSyntaxError(str(exc)) from exc
            entries = g_entries if table == "g" else j_entries
            previous = entries.get((i, j))
            if previous is not None and previous[0] != expr:
                raise ChartSyntaxError(
                    f"conflicting expressions for {table}[{i}][{j}] "
                    f"(lines {previous[1]} and {lineno})"
                )
            entries[(i, j)] = (expr, lineno)
            entry_lines.append((expr, lineno))
        else:
            raise ChartSyntaxError(f"unrecognized directive {lhs!r} (line {lineno})")

    if m is None:
        raise ChartSyntaxError("missing 'dim' line")
    if coords is None:
        raise ChartSyntaxError("missing 'coords' line")
    n = 2 * m
    if len(coords) != n:
        raise ChartSyntaxError(f"dim = {m} needs {n} coordinates, got {len(coords)}")

    for name in domains:
        if name not in coords:
            raise ChartSyntaxError(f"domain given for undeclared coordinate {name!r}")
    for expr, lineno in entry_lines:
        for name in sorted(variables_of(expr)):
            if name not in coords:
                raise ChartSyntaxError(f"undeclared identifier {name!r} (line {lineno})")
    for (i, j), (_, lineno) in list(g_entries.items()) + list(j_entries.items()):
        if i > n or j > n:
            raise ChartSyntaxError(
                f"entry index [{i}][{j}] out of range for dim = {m} (line {lineno})"
            )
    for pt in points:
        if len(pt) != n:
            raise ChartSyntaxError(f"point needs {n} coordinates, got {len(pt)}")

    zero = Num(0.0)
    gtable: list[list[Expr]] = [[zero] * n for _ in range(n)]
    for (i, j), (expr, lineno) in sorted(g_entries.items(), key=lambda kv: kv[1][1]):
        a, b = i - 1, j - 1
        mirror = g_entries.get((j, i))
        if mirror is not None and i != j and mirror[0] != expr:
            raise ChartSyntaxError(
                f"conflicting expressions for g[{i}][{j}] and g[{j}][{i}] "
                f"(lines {lineno} and {mirror[1]})"
            )
        gtable[a][b] = expr
        gtable[b][a] = expr
    jtable: list[list[Expr]] = [[zero] * n for _ in range(n)]
    for (i, j), (expr, _) in j_entries.items():
        jtable[i - 1][j - 1] = expr

    return ChartSpec(
        m=m,
        coord_names=coords,
        metric_exprs=tuple(tuple(row) for row in gtable),
        j_exprs=tuple(tuple(row) for row in jtable),
        domain=tuple(domains.get(name, UNBOUNDED) for name in coords),
        default_points=tuple(points),
    )


def serialize_chart(spec: ChartSpec) -> str:
    """Canonical chart file text; parse(serialize(parse(t))) == parse(t)."""
    zero = Num(0.0)
    lines = [f"dim = {spec.m}", "coords = " + " ".join(spec.coord_names)]
    for name, (lo, hi) in zip(spec.coord_names, spec.domain):
        if (lo, hi) != UNBOUNDED:
            lines.append(f"domain {name} = {lo!r} {hi!r}")
    n = 2 * spec.m
    for i in range(n):
        for j in range(i, n):
            expr = spec.metric_exprs[i][j]
            if expr != zero:
                lines.append(f"g[{i + 1}][{j + 1}] = {to_source(expr)}")
    for i in range(n):
        for j in range(n):
            expr = spec.j_exprs[i][j]
            if expr != zero:
                lines.append(f"J[{i + 1}][{j + 1}] = {to_source(expr)}")
    for pt in spec.default_points:
        lines.append("point = " + " ".join(repr(v) for v in pt))
    return "\n".join(lines) + "\n"
