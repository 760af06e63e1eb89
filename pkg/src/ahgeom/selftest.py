"""Fast algebraic self-check: exact operator identities, no differentiation.

Covers the operator identity psi(g) = 2 pi2, the forward constancy of the
curvature decomposition on antiholomorphic planes, eigenframe
reconstruction, and exactness of the span fit.  Runs in a few seconds and
its pass/fail outcome does not depend on the seed.
"""

from __future__ import annotations

import numpy as np

from .analysis import adapted_eigenframe, constancy, sample_antiholomorphic_planes
from .tensor_core import (
    Bilinear,
    HermitianPoint,
    build_from_decomposition,
    fit_pi_span,
    pi1,
    pi2,
    psi,
    standard_j,
)

__all__ = ["random_hermitian_point", "random_j_invariant_bilinear", "run_selftest"]


def random_hermitian_point(m: int, rng: np.random.Generator,
                           spread: float = 0.25) -> HermitianPoint:
    """A random well-conditioned metric with a compatible complex structure.

    Conjugating the standard structure by P and taking g = P^T P keeps both
    invariants exact up to rounding.
    """
    n = 2 * m
    while True:
        P = np.eye(n) + spread * rng.standard_normal((n, n))
        if np.linalg.cond(P) < 20.0:
            break
    g = P.T @ P
    J = np.linalg.solve(P, standard_j(m) @ P)
    return HermitianPoint(m=m, g=0.5 * (g + g.T), J=J, tol=1e-8)


def random_j_invariant_bilinear(point: HermitianPoint, rng: np.random.Generator,
                                scale: float = 1.0) -> Bilinear:
    """Random symmetric J-invariant (0,2) tensor: the J-average of a symmetric one."""
    n = point.dim
    A = rng.standard_normal((n, n)) * scale
    A = 0.5 * (A + A.T)
    J = point.J
    return Bilinear(point, 0.5 * (A + J.T @ A @ J))


def run_selftest(seed: int = 42, verbose: bool = True) -> bool:
    rng = np.random.default_rng(seed)
    lines: list[str] = []
    ok = True

    def check(name: str, passed: bool, detail: str):
        nonlocal ok
        ok = ok and passed
        lines.append(f"{'pass' if passed else 'FAIL'}  {name}: {detail}")

    worst = 0.0
    for m in (1, 2, 3):
        pt = HermitianPoint.standard_flat(m)
        gap = float(np.max(np.abs(psi(Bilinear.from_metric(pt)).values - 2.0 * pi2(pt).values)))
        worst = max(worst, gap)
        pt = random_hermitian_point(m, rng)
        gap = float(np.max(np.abs(psi(Bilinear.from_metric(pt)).values - 2.0 * pi2(pt).values)))
        worst = max(worst, gap)
    check("psi(g) = 2 pi2 for m in {1,2,3}", worst < 1e-12, f"max gap {worst:.3e}")

    worst = 0.0
    for k in range(20):
        m = 2 + k % 2
        pt = random_hermitian_point(m, rng)
        S = random_j_invariant_bilinear(pt, rng)
        nu = float(rng.uniform(-2.0, 2.0))
        R = build_from_decomposition(S, nu, tol=1e-8)
        planes = sample_antiholomorphic_planes(pt, 64, rng)
        stats = constancy(R, planes)
        worst = max(worst, abs(stats.mean - nu) + stats.max_deviation)
    check("decomposition gives constant antiholomorphic curvature",
          worst < 1e-10, f"max |K - nu| {worst:.3e}")

    worst = 0.0
    for k in range(10):
        m = 2 + k % 2
        pt = random_hermitian_point(m, rng)
        S = random_j_invariant_bilinear(pt, rng)
        frame = adapted_eigenframe(S)
        rebuilt = np.zeros_like(S.values)
        for i, lam in enumerate(frame.eigenvalues):
            for v in (frame.basis[:, 2 * i], frame.basis[:, 2 * i + 1]):
                flat = pt.g @ v
                rebuilt += lam * np.outer(flat, flat)
        worst = max(worst, float(np.max(np.abs(S.values - rebuilt))))
    check("adapted eigenframe reconstructs S", worst < 1e-9, f"max gap {worst:.3e}")

    worst = 0.0
    for k in range(10):
        m = 1 + k % 3
        pt = random_hermitian_point(m, rng)
        a0, b0 = rng.uniform(-3.0, 3.0, size=2)
        R = pi1(pt)
        values = a0 * R.values + b0 * pi2(pt).values
        a, b, residual = fit_pi_span(type(R)(pt, values))
        worst = max(worst, residual)
        if m >= 2:
            worst = max(worst, abs(a - a0), abs(b - b0))
    check("span fit is exact on span members", worst < 1e-10, f"max defect {worst:.3e}")

    if verbose:
        for line in lines:
            print(line)
    return ok
