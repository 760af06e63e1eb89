"""Bundled model manifolds with ground-truth metadata.

Each model carries a chart (an expression chart, except for the sphere in
R^7 which uses a native embedding evaluator) together with the expected
class flags, curvature constants and classification verdict.  The expected
flags are validated against the class lattice at construction time: the
Kahler class is exactly the intersection of nearly Kahler and almost
Kahler, and the three curvature-identity classes are nested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import (
    COMPLEX_SPACE_FORM,
    NOT_CONSTANT_ANTIHOLOMORPHIC,
    REAL_SPACE_FORM,
)
from .charts import Chart, ChartEvalError, evaluate_chart_point, parse_chart
from .tensor_core import HermitianPoint

__all__ = [
    "cross7",
    "Sphere6Chart",
    "ExpectedProfile",
    "ModelDescriptor",
    "model_flat",
    "model_sphere6",
    "model_fubini_study",
    "model_complex_hyperbolic",
    "model_product_spheres",
    "MODEL_FACTORIES",
    "get_model",
    "model_names",
    "flat_chart_text",
    "fubini_study_chart_text",
    "complex_hyperbolic_chart_text",
    "product_spheres_chart_text",
    "bundled_chart_texts",
]

# Cayley multiplication table on the 7 imaginary units: each line (a, b, c)
# means e_a e_b = e_c cyclically (the e_n e_{n+1} = e_{n+3} convention).
_FANO_LINES = ((1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 7), (5, 6, 1), (6, 7, 2), (7, 1, 3))


def _structure_constants() -> np.ndarray:
    f = np.zeros((7, 7, 7))
    for line in _FANO_LINES:
        for a, b, c in (line, line[1:] + line[:1], line[2:] + line[:2]):
            f[a - 1, b - 1, c - 1] = 1.0
            f[b - 1, a - 1, c - 1] = -1.0
    return f


_F7 = _structure_constants()
_F7.setflags(write=False)


def cross7(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Seven dimensional cross product from the Cayley multiplication table.

    Bilinear, antisymmetric, with x cross (x cross y) = <x,y> x - |x|^2 y.
    """
    return np.einsum("ijk,i,j->k", _F7, x, y)


class Sphere6Chart:
    """Unit sphere in R^7, orthographic chart p -> (p, sqrt(1 - |p|^2)).

    The almost complex structure is J_P(V) = P cross V on tangent vectors
    of the embedded sphere, pulled back through the chart Jacobian.  This
    is the canonical nearly Kahler, non Kahler structure.
    """

    m = 3
    coord_names = ("x1", "x2", "x3", "x4", "x5", "x6")
    domain = ((-0.35, 0.35),) * 6
    default_points = (
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        (0.12, -0.07, 0.2, 0.05, -0.1, 0.08),
        (-0.2, 0.15, -0.05, 0.1, 0.07, -0.12),
    )

    def _embedding(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        w2 = 1.0 - float(p @ p)
        if w2 <= 0.0:
            raise ChartEvalError(f"point {p.tolist()} outside the chart hemisphere")
        w = math.sqrt(w2)
        P = np.concatenate([p, [w]])
        E = np.zeros((7, 6))
        E[:6, :] = np.eye(6)
        E[6, :] = -p / w
        return P, E, w2

    def metric_at(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        _, _, w2 = self._embedding(p)
        g = np.eye(6) + np.outer(p, p) / w2
        g.setflags(write=False)
        return g

    def j_at(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        P, E, _ = self._embedding(p)
        cross_with_p = np.einsum("abc,a->cb", _F7, P)  # v -> P cross v
        J = np.linalg.solve(self.metric_at(p), E.T @ cross_with_p @ E)
        J.setflags(write=False)
        return J

    def eval_point(self, p, tol: float = 1e-8) -> HermitianPoint:
        return evaluate_chart_point(self, p, tol)


# ---------------------------------------------------------------------------
# Chart text generators (the bundled .ahm files are emitted from these)
# ---------------------------------------------------------------------------


def _paired_coords(m: int) -> tuple[list[str], list[str], list[str]]:
    xs = [f"x{a}" for a in range(1, m + 1)]
    ys = [f"y{a}" for a in range(1, m + 1)]
    coords = [v for pair in zip(xs, ys) for v in pair]
    return xs, ys, coords


def _j_lines(m: int) -> list[str]:
    lines = []
    for a in range(m):
        lines.append(f"J[{2 * a + 2}][{2 * a + 1}] = 1")
        lines.append(f"J[{2 * a + 1}][{2 * a + 2}] = -1")
    return lines


def _point_lines(points) -> list[str]:
    return ["point = " + " ".join(repr(float(v)) for v in pt) for pt in points]


def flat_chart_text(m: int) -> str:
    _, _, coords = _paired_coords(m)
    lines = [f"# flat model, complex dimension {m}", f"dim = {m}",
             "coords = " + " ".join(coords)]
    lines += [f"g[{i}][{i}] = 1" for i in range(1, 2 * m + 1)]
    lines += _j_lines(m)
    lines += _point_lines([(0.0,) * 2 * m, tuple(0.1 * (k + 1) * (-1) ** k for k in range(2 * m))])
    return "\n".join(lines) + "\n"


def fubini_study_chart_text(m: int, c: float, points=None) -> str:
    """Standard metric of complex projective space in inhomogeneous coordinates.

    Normalized so holomorphic sectional curvature is c and g(0) = (4/c) Id;
    for the bundled c = 4 normalization g(0) is the identity.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if c <= 0:
        raise ValueError("holomorphic curvature c must be positive")
    s = repr(4.0 / c)
    xs, ys, coords = _paired_coords(m)
    r2 = "+".join(f"{v}^2" for v in coords)
    den = f"(1+{r2})^2"
    lines = [f"# projective model, complex dimension {m}, holomorphic curvature {c}",
             f"dim = {m}", "coords = " + " ".join(coords)]
    lines += [f"domain {v} = -2 2" for v in coords]
    for a in range(m):
        diag = f"{s}*(1+{r2}-{xs[a]}^2-{ys[a]}^2)/{den}"
        lines.append(f"g[{2 * a + 1}][{2 * a + 1}] = {diag}")
        lines.append(f"g[{2 * a + 2}][{2 * a + 2}] = {diag}")
    for a in range(m):
        for b in range(a + 1, m):
            xa, ya, xb, yb = xs[a], ys[a], xs[b], ys[b]
            xx = f"-{s}*({xa}*{xb}+{ya}*{yb})/{den}"
            lines.append(f"g[{2 * a + 1}][{2 * b + 1}] = {xx}")
            lines.append(f"g[{2 * a + 2}][{2 * b + 2}] = {xx}")
            lines.append(f"g[{2 * a + 1}][{2 * b + 2}] = -{s}*({xa}*{yb}-{ya}*{xb})/{den}")
            lines.append(f"g[{2 * a + 2}][{2 * b + 1}] = -{s}*({ya}*{xb}-{xa}*{yb})/{den}")
    lines += _j_lines(m)
    if points is None:
        points = [(0.0,) * 2 * m, tuple(0.05 * (k + 2) * (-1) ** k for k in range(2 * m))]
        if m >= 3:
            points.append(tuple(0.04 * (k + 1) * (-1) ** (k + 1) for k in range(2 * m)))
    lines += _point_lines(points)
    return "\n".join(lines) + "\n"


def complex_hyperbolic_chart_text(m: int, c: float, points=None) -> str:
    """Bounded-ball model with constant negative holomorphic curvature c."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if c >= 0:
        raise ValueError("holomorphic curvature c must be negative")
    s = repr(4.0 / abs(c))
    xs, ys, coords = _paired_coords(m)
    r2 = "+".join(f"{v}^2" for v in coords)
    den = f"(1-({r2}))^2"
    box = {1: 0.6, 2: 0.45, 3: 0.35}[m]
    lines = [f"# hyperbolic model, complex dimension {m}, holomorphic curvature {c}",
             f"dim = {m}", "coords = " + " ".join(coords)]
    lines += [f"domain {v} = -{box} {box}" for v in coords]
    for a in range(m):
        diag = f"{s}*(1-({r2})+{xs[a]}^2+{ys[a]}^2)/{den}"
        lines.append(f"g[{2 * a + 1}][{2 * a + 1}] = {diag}")
        lines.append(f"g[{2 * a + 2}][{2 * a + 2}] = {diag}")
    for a in range(m):
        for b in range(a + 1, m):
            xa, ya, xb, yb = xs[a], ys[a], xs[b], ys[b]
            xx = f"{s}*({xa}*{xb}+{ya}*{yb})/{den}"
            lines.append(f"g[{2 * a + 1}][{2 * b + 1}] = {xx}")
            lines.append(f"g[{2 * a + 2}][{2 * b + 2}] = {xx}")
            lines.append(f"g[{2 * a + 1}][{2 * b + 2}] = {s}*({xa}*{yb}-{ya}*{xb})/{den}")
            lines.append(f"g[{2 * a + 2}][{2 * b + 1}] = -{s}*({xa}*{yb}-{ya}*{xb})/{den}")
    lines += _j_lines(m)
    if points is None:
        points = [(0.0,) * 2 * m, tuple(0.04 * (k + 1) * (-1) ** k for k in range(2 * m))]
    lines += _point_lines(points)
    return "\n".join(lines) + "\n"


def product_spheres_chart_text(r1: float, r2: float) -> str:
    """Product of two round 2-spheres of the given radii, product structure.

    Each factor uses isothermal coordinates with conformal factor
    1 / (1 + rho^2 / (4 r^2))^2, so the factor curvature is 1 / r^2.
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radii must be positive")
    lines = [f"# product of round 2-spheres, radii {r1} and {r2}",
             "dim = 2", "coords = x1 y1 x2 y2"]
    for idx, r in ((1, r1), (2, r2)):
        k = repr(1.0 / (4.0 * r * r))
        factor = f"1/(1+{k}*(x{idx}^2+y{idx}^2))^2"
        lines.append(f"g[{2 * idx - 1}][{2 * idx - 1}] = {factor}")
        lines.append(f"g[{2 * idx}][{2 * idx}] = {factor}")
    lines += _j_lines(2)
    lines += _point_lines([(0.0, 0.0, 0.0, 0.0), (0.25, 0.1, -0.2, 0.3)])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpectedProfile:
    """Ground truth for a model: class flags, constants and the verdict.

    None means "not defined / not constant / not Einstein" for the float
    fields.  The flags must respect the class lattice: K is exactly
    NK and AK, K implies AH1, NK implies AH2, and AH1 => AH2 => AH3.
    """

    kahler: bool
    nearly_kahler: bool
    almost_kahler: bool
    ah1: bool
    ah2: bool
    ah3: bool
    antiholomorphic: float | None
    holomorphic: float | None
    einstein: float | None
    verdict_kind: str
    verdict_constant: float | None

    def __post_init__(self):
        if self.kahler != (self.nearly_kahler and self.almost_kahler):
            raise ValueError("lattice violation: K must equal NK and AK")
        if self.kahler and not self.ah1:
            raise ValueError("lattice violation: K implies AH1")
        if self.nearly_kahler and not self.ah2:
            raise ValueError("lattice violation: NK implies AH2")
        if self.ah1 and not self.ah2:
            raise ValueError("lattice violation: AH1 implies AH2")
        if self.ah2 and not self.ah3:
            raise ValueError("lattice violation: AH2 implies AH3")

    def flags(self) -> dict[str, bool]:
        return {
            "K": self.kahler,
            "NK": self.nearly_kahler,
            "AK": self.almost_kahler,
            "AH1": self.ah1,
            "AH2": self.ah2,
            "AH3": self.ah3,
        }


@dataclass(frozen=True)
class ModelDescriptor:
    name: str
    description: str
    chart: Chart
    expected: ExpectedProfile


_ALL_PASS = dict(kahler=True, nearly_kahler=True, almost_kahler=True,
                 ah1=True, ah2=True, ah3=True)


def model_flat(m: int) -> ModelDescriptor:
    return ModelDescriptor(
        name=f"flat{m}",
        description=f"flat space C^{m}, constant structure",
        chart=parse_chart(flat_chart_text(m)),
        expected=ExpectedProfile(
            **_ALL_PASS,
            antiholomorphic=0.0 if m >= 2 else None,
            holomorphic=0.0,
            einstein=0.0,
            verdict_kind=REAL_SPACE_FORM,
            verdict_constant=0.0,
        ),
    )


def model_sphere6() -> ModelDescriptor:
    return ModelDescriptor(
        name="s6",
        description="unit 6-sphere with the Cayley cross-product structure",
        chart=Sphere6Chart(),
        expected=ExpectedProfile(
            kahler=False, nearly_kahler=True, almost_kahler=False,
            ah1=False, ah2=True, ah3=True,
            antiholomorphic=1.0,
            holomorphic=1.0,
            einstein=5.0,
            verdict_kind=REAL_SPACE_FORM,
            verdict_constant=1.0,
        ),
    )


def model_fubini_study(m: int, c: float) -> ModelDescriptor:
    if m not in (1, 2, 3):
        raise ValueError("projective model supports m in {1, 2, 3}")
    return ModelDescriptor(
        name=f"cp{m}",
        description=f"complex projective space, holomorphic curvature {c}",
        chart=parse_chart(fubini_study_chart_text(m, c)),
        expected=ExpectedProfile(
            **_ALL_PASS,
            antiholomorphic=c / 4.0 if m >= 2 else None,
            holomorphic=c,
            einstein=(m + 1) * c / 2.0,
            verdict_kind=COMPLEX_SPACE_FORM,
            verdict_constant=c,
        ),
    )


def model_complex_hyperbolic(m: int, c: float) -> ModelDescriptor:
    if m not in (1, 2):
        raise ValueError("hyperbolic model supports m in {1, 2}")
    return ModelDescriptor(
        name=f"ch{m}",
        description=f"complex hyperbolic ball, holomorphic curvature {c}",
        chart=parse_chart(complex_hyperbolic_chart_text(m, c)),
        expected=ExpectedProfile(
            **_ALL_PASS,
            antiholomorphic=c / 4.0 if m >= 2 else None,
            holomorphic=c,
            einstein=(m + 1) * c / 2.0,
            verdict_kind=COMPLEX_SPACE_FORM,
            verdict_constant=c,
        ),
    )


def model_product_spheres(r1: float, r2: float) -> ModelDescriptor:
    """Negative control: Kahler, so AH3, but the antiholomorphic curvature
    is not constant (mixed planes are flat, in-factor planes are not)."""
    return ModelDescriptor(
        name="s2xs2",
        description=f"product of round 2-spheres, radii {r1} and {r2}",
        chart=parse_chart(product_spheres_chart_text(r1, r2)),
        expected=ExpectedProfile(
            **_ALL_PASS,
            antiholomorphic=None,
            holomorphic=None,
            einstein=(1.0 / r1**2 if r1 == r2 else None),
            verdict_kind=NOT_CONSTANT_ANTIHOLOMORPHIC,
            verdict_constant=None,
        ),
    )


MODEL_FACTORIES: dict[str, Callable[[], ModelDescriptor]] = {
    "flat2": lambda: model_flat(2),
    "s6": model_sphere6,
    "cp1": lambda: model_fubini_study(1, 4.0),
    "cp2": lambda: model_fubini_study(2, 4.0),
    "cp3": lambda: model_fubini_study(3, 4.0),
    "ch1": lambda: model_complex_hyperbolic(1, -4.0),
    "ch2": lambda: model_complex_hyperbolic(2, -4.0),
    "s2xs2": lambda: model_product_spheres(1.0, 2.0),
}


def model_names() -> tuple[str, ...]:
    return tuple(MODEL_FACTORIES)


def get_model(name: str) -> ModelDescriptor:
    factory = MODEL_FACTORIES.get(name)
    if factory is None:
        known = ", ".join(model_names())
        raise KeyError(f"unknown model {name!r} (known: {known})")
    return factory()


def bundled_chart_texts() -> dict[str, str]:
    """Chart file text for every chart-backed bundled model (all but s6)."""
    return {
        "flat2": flat_chart_text(2),
        "cp1": fubini_study_chart_text(1, 4.0),
        "cp2": fubini_study_chart_text(2, 4.0),
        "cp3": fubini_study_chart_text(3, 4.0),
        "ch1": complex_hyperbolic_chart_text(1, -4.0),
        "ch2": complex_hyperbolic_chart_text(2, -4.0),
        "s2xs2": product_spheres_chart_text(1.0, 2.0),
    }
