"""Plane statistics, adapted frames, residual checks and the verdict.

The sampling functions take an explicit seeded generator (or a seed), never
ambient random state, so every run is reproducible.  All functions are pure
and operate per point; multi-point constancy is a separate report produced
by `schur_check`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor_core import (
    Bilinear,
    CurvatureTensor,
    HermitianPoint,
    InvariantViolation,
    Plane,
    ah_identity_residual,
    build_from_decomposition,
    fit_pi_span,
    sectional_curvature,
)

__all__ = [
    "REAL_SPACE_FORM",
    "COMPLEX_SPACE_FORM",
    "NOT_CONSTANT_ANTIHOLOMORPHIC",
    "NOT_AH3",
    "INCONCLUSIVE",
    "CurvatureStats",
    "SpectralFrame",
    "Verdict",
    "SchurReport",
    "sample_antiholomorphic_planes",
    "sample_holomorphic_planes",
    "constancy",
    "adapted_eigenframe",
    "einstein_residual",
    "decomposition_residual",
    "bianchi2_residual",
    "proof_relation_32_residual",
    "classify",
    "schur_check",
]

REAL_SPACE_FORM = "real_space_form"
COMPLEX_SPACE_FORM = "complex_space_form"
NOT_CONSTANT_ANTIHOLOMORPHIC = "not_constant_antiholomorphic"
NOT_AH3 = "not_ah3"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CurvatureStats:
    """Sectional curvature statistics over a family of sampled planes."""

    kind: str
    samples: int
    mean: float
    max_deviation: float


@dataclass(frozen=True)
class SpectralFrame:
    """Adapted orthonormal basis (e_1, Je_1, ..., e_m, Je_m) diagonalizing S.

    basis[:, 2i] = e_i and basis[:, 2i+1] = J e_i; eigenvalues[i] is the
    eigenvalue shared by the J-invariant 2-plane span{e_i, Je_i}.
    """

    point: HermitianPoint
    basis: np.ndarray
    eigenvalues: tuple[float, ...]


@dataclass(frozen=True)
class Verdict:
    """Outcome of the constant-antiholomorphic-curvature classification."""

    kind: str
    constant: float | None
    residuals: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SchurReport:
    """Per-point curvature means and their spread across points."""

    kind: str
    nu_per_point: tuple[float, ...]
    spread: float


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _g_unit(point: HermitianPoint, v: np.ndarray) -> np.ndarray:
    return v / np.sqrt(float(v @ point.g @ v))


def sample_antiholomorphic_planes(ctx: HermitianPoint, n: int, rng) -> list[Plane]:
    """n orthonormal planes (x, y) with g(x, Jy) = 0, i.e. span(x,y) disjoint
    from its J-image.  Deterministic for a fixed seed.

    x is drawn on the g-unit sphere; y is drawn, g-projected off {x, Jx}
    and normalized, resampling if the projection degenerates.
    """
    if ctx.m < 2:
        raise InvariantViolation("antiholomorphic planes need complex dimension m >= 2")
    rng = _as_rng(rng)
    g = ctx.g
    planes = []
    for _ in range(n):
        x = _g_unit(ctx, rng.standard_normal(ctx.dim))
        jx = ctx.J @ x
        for attempt in range(100):
            y = rng.standard_normal(ctx.dim)
            y = y - float(y @ g @ x) * x - float(y @ g @ jx) * jx
            norm2 = float(y @ g @ y)
            if norm2 > 1e-12:
                break
        else:
            raise InvariantViolation("plane sampling degenerated 100 times in a row")
        planes.append(Plane(x=x, y=y / np.sqrt(norm2), kind="antiholomorphic"))
    return planes


def sample_holomorphic_planes(ctx: HermitianPoint, n: int, rng) -> list[Plane]:
    """n planes spanned by (x, Jx) with x on the g-unit sphere."""
    rng = _as_rng(rng)
    planes = []
    for _ in range(n):
        x = _g_unit(ctx, rng.standard_normal(ctx.dim))
        planes.append(Plane(x=x, y=ctx.J @ x, kind="holomorphic"))
    return planes


def constancy(R: CurvatureTensor, planes: list[Plane]) -> CurvatureStats:
    """Mean and max deviation of the sectional curvature over the planes."""
    if len(planes) < 1:
        raise InvariantViolation("constancy needs at least one plane")
    values = np.array([sectional_curvature(R, plane) for plane in planes])
    mean = float(values.mean())
    return CurvatureStats(
        kind=planes[0].kind,
        samples=len(planes),
        mean=mean,
        max_deviation=float(np.max(np.abs(values - mean))),
    )


def _cluster(eigenvalues: np.ndarray, merge_tol: float) -> list[slice]:
    """Group consecutive sorted eigenvalues whose gaps are below merge_tol."""
    slices = []
    start = 0
    for k in range(1, eigenvalues.size + 1):
        if k == eigenvalues.size or eigenvalues[k] - eigenvalues[k - 1] > merge_tol:
            slices.append(slice(start, k))
            start = k
    return slices


def adapted_eigenframe(S: Bilinear, merge_tol: float = 1e-8,
                       jtol: float = 1e-6) -> SpectralFrame:
    """Diagonalize S relative to g by a J-adapted orthonormal basis.

    Solves the symmetric eigenproblem of S relative to g; eigenvalues closer
    than merge_tol are merged into one eigenspace.  Within each eigenspace
    (J-invariant when S commutes with J) a unit vector e is picked, Je is
    adjoined, the 2-plane is deflated, and the process repeats.  If an
    eigenspace is not J-closed within jtol the input was not J-invariant.
    """
    pt = S.point
    g, J = pt.g, pt.J
    sym = 0.5 * (S.values + S.values.T)
    L = np.linalg.cholesky(g)
    Linv = np.linalg.inv(L)
    A = Linv @ sym @ Linv.T
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    vecs = Linv.T @ V  # columns are g-orthonormal generalized eigenvectors

    def g_dot(a, b):
        return float(a @ g @ b)

    basis_cols = []
    eigenvalues = []
    for block in _cluster(w, merge_tol):
        value = float(w[block].mean())
        cluster = [vecs[:, k] for k in range(block.start, block.stop)]
        full = list(cluster)
        while cluster:
            e = _g_unit(pt, cluster.pop(0))
            je = J @ e
            # J-closure: Je must stay inside the original eigenspace
            proj = sum(g_dot(je, u) * u for u in full)
            defect = float(np.sqrt(max(g_dot(je - proj, je - proj), 0.0)))
            if defect > jtol:
                raise InvariantViolation(
                    f"S is not J-invariant: eigenspace not J-closed (defect {defect:.3e})"
                )
            basis_cols += [e, je]
            eigenvalues.append(value)
            # deflate span{e, Je}: the remaining vectors span a space whose
            # dimension drops by one more; re-orthonormalize with pivoting
            reduced = [u - g_dot(u, e) * e - g_dot(u, je) * je for u in cluster]
            target = len(cluster) - 1
            cluster = []
            while len(cluster) < target:
                norms = [g_dot(u, u) for u in reduced]
                best = int(np.argmax(norms))
                if norms[best] < 1e-12:
                    raise InvariantViolation("eigenframe deflation degenerated")
                u = reduced.pop(best) / np.sqrt(norms[best])
                reduced = [v - g_dot(v, u) * u for v in reduced]
                cluster.append(u)
    return SpectralFrame(point=pt, basis=np.column_stack(basis_cols),
                         eigenvalues=tuple(eigenvalues))


def einstein_residual(S: Bilinear) -> tuple[float, float]:
    """(lambda, residual) with lambda = trace_g(S) / 2m and residual = max |S - lambda g|."""
    pt = S.point
    lam = float(np.trace(np.linalg.inv(pt.g) @ S.values)) / pt.dim
    return lam, float(np.max(np.abs(S.values - lam * pt.g)))


def decomposition_residual(R: CurvatureTensor, S: Bilinear, nu: float,
                           *, tol: float | None = None) -> float:
    """Max-norm gap between R and the curvature tensor rebuilt from (S, nu)."""
    rebuilt = build_from_decomposition(S, nu, tol=tol)
    return float(np.max(np.abs(R.values - rebuilt.values)))


def bianchi2_residual(nablaR: np.ndarray) -> float:
    """Max over basis 5-tuples of the cyclic sum

    (nabla_x R)(y,z,u,v) + (nabla_y R)(z,x,u,v) + (nabla_z R)(x,y,u,v)
    """
    cyc = (
        nablaR
        + np.einsum("yzxuv->xyzuv", nablaR)
        + np.einsum("zxyuv->xyzuv", nablaR)
    )
    return float(np.max(np.abs(cyc)))


def proof_relation_32_residual(frame: SpectralFrame, nablaS: np.ndarray,
                               nablaJ: np.ndarray, nu: float) -> float:
    """Residual of the eigenframe relation tying nabla S to nabla J:

        (nabla_{e_j} S)(e_i, e_j)
            + (lambda_i + lambda_j - 2 (2m-1) nu) g(J e_i, (nabla_{e_j} J) e_j)

    maximized over i != j.  Zero (up to discretization error) on spaces with
    constant antiholomorphic curvature; trivially small when both nabla S
    and the (nabla_X J)X defect vanish.
    """
    pt = frame.point
    m = pt.m
    g = pt.g
    lam = frame.eigenvalues
    worst = 0.0
    for i in range(m):
        e_i = frame.basis[:, 2 * i]
        je_i = frame.basis[:, 2 * i + 1]
        for j in range(m):
            if i == j:
                continue
            e_j = frame.basis[:, 2 * j]
            t1 = float(np.einsum("kab,k,a,b->", nablaS, e_j, e_i, e_j))
            v = np.einsum("kia,k,a->i", nablaJ, e_j, e_j)
            t2 = (lam[i] + lam[j] - 2.0 * (2 * m - 1) * nu) * float(je_i @ g @ v)
            worst = max(worst, abs(t1 + t2))
    return worst


def classify(R: CurvatureTensor, S: Bilinear, class_res, stats_holo: CurvatureStats,
             stats_antiholo: CurvatureStats | None, tol: float) -> Verdict:
    """Decide the verdict for one point from its curvature data.

    Order: not AH3 beats everything; then non-constant antiholomorphic
    curvature; then a least-squares split over span{pi1, pi2} decides
    between a real space form (b ~ 0) and a complex space form (b ~ a plus
    the Kahler condition).  Anything else is inconclusive, with all
    residuals attached.  At m = 1 antiholomorphic planes do not exist and
    pi2 = 3 pi1; there the verdict comes from constant holomorphic
    curvature plus the Kahler condition.
    """
    lam, einstein_defect = einstein_residual(S)
    residuals = {
        "ah3": ah_identity_residual(R, 3),
        "kahler": class_res.kahler,
        "einstein_lambda": lam,
        "einstein": einstein_defect,
        "holomorphic_deviation": stats_holo.max_deviation,
    }
    if stats_antiholo is not None:
        residuals["antiholomorphic_deviation"] = stats_antiholo.max_deviation

    if residuals["ah3"] > tol:
        return Verdict(NOT_AH3, None, residuals)

    if R.point.m == 1:
        if stats_holo.max_deviation <= tol and class_res.kahler <= tol:
            return Verdict(COMPLEX_SPACE_FORM, stats_holo.mean, residuals)
        return Verdict(INCONCLUSIVE, None, residuals)

    if stats_antiholo is None:
        raise InvariantViolation("antiholomorphic statistics required for m >= 2")
    if stats_antiholo.max_deviation > tol:
        return Verdict(NOT_CONSTANT_ANTIHOLOMORPHIC, None, residuals)

    a, b, fit_residual = fit_pi_span(R)
    residuals.update({"fit_a": a, "fit_b": b, "fit": fit_residual})
    if fit_residual <= tol and abs(b) <= tol:
        return Verdict(REAL_SPACE_FORM, a, residuals)
    if fit_residual <= tol and abs(b - a) <= tol and class_res.kahler <= tol:
        return Verdict(COMPLEX_SPACE_FORM, 4.0 * a, residuals)
    return Verdict(INCONCLUSIVE, None, residuals)


def schur_check(chart, points, h: float, n: int, seed) -> SchurReport:
    """Antiholomorphic curvature means at several points and their spread.

    A pointwise constant that is also constant across points (small spread)
    is the numerical shadow of the global-constancy statement for m > 2.
    For m = 1 the holomorphic means are reported instead.
    """
    from .calculus import riemann  # deferred: calculus depends on charts only

    if len(points) < 2:
        raise InvariantViolation("the multi-point constancy check needs >= 2 points")
    rng = _as_rng(seed)
    nus = []
    kind = "antiholomorphic" if chart.m >= 2 else "holomorphic"
    for p in points:
        R = riemann(chart, np.asarray(p, dtype=float), h)
        if chart.m >= 2:
            planes = sample_antiholomorphic_planes(R.point, n, rng)
        else:
            planes = sample_holomorphic_planes(R.point, n, rng)
        nus.append(constancy(R, planes).mean)
    spread = float(max(nus) - min(nus))
    return SchurReport(kind=kind, nu_per_point=tuple(nus), spread=spread)
