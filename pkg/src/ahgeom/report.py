"""Full per-point analysis pipeline and deterministic report assembly.

The report has three blocks: run metadata, one block per evaluation point,
and a global block (multi-point constancy plus the overall verdict and,
in model mode, the expected-vs-observed checks).  Identical arguments,
including the seed, produce byte-identical JSON; the text rendering shows
the same values to 12 significant digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import calculus
from .analysis import (
    INCONCLUSIVE,
    CurvatureStats,
    SchurReport,
    Verdict,
    adapted_eigenframe,
    classify,
    constancy,
    decomposition_residual,
    bianchi2_residual,
    einstein_residual,
    proof_relation_32_residual,
    sample_antiholomorphic_planes,
    sample_holomorphic_planes,
    schur_check,
)
from .calculus import ClassResiduals
from .charts import Chart
from .models import ModelDescriptor
from .tensor_core import InvariantViolation, ah_identity_residual, riemann_symmetry_residual

__all__ = ["PointReport", "AnalysisReport", "analyze_chart", "analyze_model", "EXPECTED_TOL"]

# Comparison width for expected-vs-observed constants (Einstein constant,
# curvature constants, verdict constants, multi-point spread).
EXPECTED_TOL = 1e-3


@dataclass(frozen=True)
class PointReport:
    point: tuple[float, ...]
    flags: dict[str, bool]
    class_residuals: ClassResiduals
    ah_residuals: dict[str, float]
    riemann_symmetry: float
    einstein_lambda: float
    einstein_residual: float
    holomorphic: CurvatureStats
    antiholomorphic: CurvatureStats | None
    nu: float
    decomposition_residual: float
    bianchi_residual: float
    eigenframe_relation_residual: float | None
    gray_ak2_residual: float
    verdict: Verdict


def _stats_dict(stats: CurvatureStats | None):
    if stats is None:
        return None
    return {
        "kind": stats.kind,
        "samples": stats.samples,
        "mean": stats.mean,
        "max_deviation": stats.max_deviation,
    }


def analyze_point(chart: Chart, p, index: int, *, tol: float, h: float,
                  samples: int, seed: int) -> PointReport:
    """Run every check at one point; deterministic for fixed arguments."""
    p = np.asarray(p, dtype=float)
    R = calculus.riemann(chart, p, h)
    pt = R.point
    S = calculus.ricci(R)
    cls = calculus.class_residuals(chart, p, h)
    NJ = calculus.nabla_J(chart, p, h)
    # The rank-5 derivative sits three difference levels above the metric,
    # where the roundoff floor scales like eps / h^3; a 4x step is near the
    # optimum there while h itself stays right for the second level.
    NR = calculus.nabla_R(chart, p, 4.0 * h)
    # metric compatibility lets nabla S come from contracting nabla R
    NS = np.einsum("pq,kpabq->kab", np.linalg.inv(pt.g), NR)

    ah = {f"AH{k}": ah_identity_residual(R, k) for k in (1, 2, 3)}
    flags = {
        "K": cls.kahler <= tol,
        "NK": cls.nearly_kahler <= tol,
        "AK": cls.almost_kahler <= tol,
        "AH1": ah["AH1"] <= tol,
        "AH2": ah["AH2"] <= tol,
        "AH3": ah["AH3"] <= tol,
    }

    rng = np.random.default_rng([seed, index])
    holo = constancy(R, sample_holomorphic_planes(pt, samples, rng))
    if pt.m >= 2:
        anti = constancy(R, sample_antiholomorphic_planes(pt, samples, rng))
        nu = anti.mean
    else:
        anti = None
        nu = holo.mean / 4.0

    lam, einstein_defect = einstein_residual(S)
    decomposition = decomposition_residual(R, S, nu, tol=max(tol, pt.tol))
    bianchi = bianchi2_residual(NR)
    try:
        frame = adapted_eigenframe(S, merge_tol=max(1e-8, tol), jtol=max(1e-6, tol))
        relation = proof_relation_32_residual(frame, NS, NJ, nu)
    except InvariantViolation:
        relation = None  # Ricci tensor not J-invariant: the relation does not apply
    gray = calculus.gray_ak2_residual(chart, p, h)
    verdict = classify(R, S, cls, holo, anti, tol)

    return PointReport(
        point=tuple(float(v) for v in p),
        flags=flags,
        class_residuals=cls,
        ah_residuals=ah,
        riemann_symmetry=riemann_symmetry_residual(R),
        einstein_lambda=lam,
        einstein_residual=einstein_defect,
        holomorphic=holo,
        antiholomorphic=anti,
        nu=nu,
        decomposition_residual=decomposition,
        bianchi_residual=bianchi,
        eigenframe_relation_residual=relation,
        gray_ak2_residual=gray,
        verdict=verdict,
    )


def _overall_verdict(points: list[PointReport]) -> Verdict:
    kinds = sorted({pr.verdict.kind for pr in points})
    if len(kinds) != 1:
        return Verdict(INCONCLUSIVE, None, {})
    constants = [pr.verdict.constant for pr in points]
    if any(c is None for c in constants):
        return Verdict(kinds[0], None, {})
    return Verdict(kinds[0], float(np.mean(constants)), {})


def _expected_checks(expected, points: list[PointReport], schur: SchurReport | None,
                     overall: Verdict, tol: float) -> list[dict]:
    """Compare observations against a ModelDescriptor's expected profile."""
    checks: list[dict] = []

    def add(name, expected_desc, observed_desc, ok):
        checks.append({
            "check": name,
            "expected": expected_desc,
            "observed": observed_desc,
            "ok": bool(ok),
        })

    for flag, want in expected.flags().items():
        got = [pr.flags[flag] for pr in points]
        add(f"flag {flag}", want, got, all(v == want for v in got))

    lams = [pr.einstein_lambda for pr in points]
    defects = [pr.einstein_residual for pr in points]
    if expected.einstein is not None:
        ok = all(abs(l - expected.einstein) <= EXPECTED_TOL for l in lams)
        ok = ok and all(d <= EXPECTED_TOL for d in defects)
        add("einstein constant", expected.einstein, lams, ok)
    else:
        add("not einstein", f"residual > {EXPECTED_TOL}", defects,
            all(d > EXPECTED_TOL for d in defects))

    antis = [pr.antiholomorphic for pr in points]
    if all(s is not None for s in antis):
        means = [s.mean for s in antis]
        devs = [s.max_deviation for s in antis]
        if expected.antiholomorphic is not None:
            ok = all(abs(v - expected.antiholomorphic) <= EXPECTED_TOL for v in means)
            ok = ok and all(d <= tol for d in devs)
            add("antiholomorphic constant", expected.antiholomorphic, means, ok)
        else:
            add("antiholomorphic not constant", f"max deviation > {tol}", devs,
                all(d > tol for d in devs))

    means = [pr.holomorphic.mean for pr in points]
    devs = [pr.holomorphic.max_deviation for pr in points]
    if expected.holomorphic is not None:
        ok = all(abs(v - expected.holomorphic) <= EXPECTED_TOL for v in means)
        ok = ok and all(d <= tol for d in devs)
        add("holomorphic constant", expected.holomorphic, means, ok)
    else:
        add("holomorphic not constant", f"max deviation > {tol}", devs,
            all(d > tol for d in devs))

    add("verdict kind", expected.verdict_kind, overall.kind,
        overall.kind == expected.verdict_kind)
    if expected.verdict_constant is not None:
        ok = overall.constant is not None and \
            abs(overall.constant - expected.verdict_constant) <= EXPECTED_TOL
        add("verdict constant", expected.verdict_constant, overall.constant, ok)

    if schur is not None and expected.antiholomorphic is not None:
        add("multi-point spread", f"<= {EXPECTED_TOL}", schur.spread,
            schur.spread <= EXPECTED_TOL)
    return checks


@dataclass(frozen=True)
class AnalysisReport:
    meta: dict
    points: list[PointReport]
    schur: SchurReport | None
    overall: Verdict
    expected_checks: list[dict] | None

    @property
    def passed(self) -> bool:
        if self.expected_checks is None:
            return True
        return all(c["ok"] for c in self.expected_checks)

    def to_dict(self) -> dict:
        points = []
        for pr in self.points:
            points.append({
                "point": list(pr.point),
                "flags": dict(pr.flags),
                "class_residuals": {
                    "kahler": pr.class_residuals.kahler,
                    "nearly_kahler": pr.class_residuals.nearly_kahler,
                    "almost_kahler": pr.class_residuals.almost_kahler,
                },
                "ah_residuals": dict(pr.ah_residuals),
                "riemann_symmetry_residual": pr.riemann_symmetry,
                "einstein": {"lambda": pr.einstein_lambda, "residual": pr.einstein_residual},
                "holomorphic": _stats_dict(pr.holomorphic),
                "antiholomorphic": _stats_dict(pr.antiholomorphic),
                "nu": pr.nu,
                "decomposition_residual": pr.decomposition_residual,
                "bianchi_residual": pr.bianchi_residual,
                "eigenframe_relation_residual": pr.eigenframe_relation_residual,
                "gray_ak2_residual": pr.gray_ak2_residual,
                "verdict": {
                    "kind": pr.verdict.kind,
                    "constant": pr.verdict.constant,
                    "residuals": dict(pr.verdict.residuals),
                },
            })
        global_block: dict = {
            "schur": None if self.schur is None else {
                "kind": self.schur.kind,
                "nu_per_point": list(self.schur.nu_per_point),
                "spread": self.schur.spread,
            },
            "verdict": {"kind": self.overall.kind, "constant": self.overall.constant},
        }
        if self.expected_checks is not None:
            global_block["expected_checks"] = self.expected_checks
            global_block["passed"] = self.passed
        return {"meta": self.meta, "points": points, "global": global_block}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        def num(v):
            return "n/a" if v is None else f"{v:.12g}"

        lines = [f"target: {self.meta['target']} ({self.meta['kind']})"]
        lines.append(
            f"tol={num(self.meta['tolerance'])}  h={num(self.meta['fd_step'])}  "
            f"samples={self.meta['samples']}  seed={self.meta['seed']}"
        )
        for i, pr in enumerate(self.points, start=1):
            lines.append("")
            lines.append(f"-- point {i}: ({', '.join(num(v) for v in pr.point)})")
            lines.append("   flags: " + "  ".join(
                f"{k}={'pass' if v else 'FAIL'}" for k, v in pr.flags.items()))
            c = pr.class_residuals
            lines.append(f"   class residuals: kahler={num(c.kahler)}  "
                         f"nearly_kahler={num(c.nearly_kahler)}  almost_kahler={num(c.almost_kahler)}")
            lines.append("   identity residuals: " + "  ".join(
                f"{k}={num(v)}" for k, v in pr.ah_residuals.items()))
            lines.append(f"   riemann symmetry residual: {num(pr.riemann_symmetry)}")
            lines.append(f"   einstein: lambda={num(pr.einstein_lambda)}  "
                         f"residual={num(pr.einstein_residual)}")
            h = pr.holomorphic
            lines.append(f"   holomorphic: mean={num(h.mean)}  "
                         f"max_deviation={num(h.max_deviation)}  samples={h.samples}")
            a = pr.antiholomorphic
            if a is None:
                lines.append("   antiholomorphic: n/a (m = 1)")
            else:
                lines.append(f"   antiholomorphic: mean={num(a.mean)}  "
                             f"max_deviation={num(a.max_deviation)}  samples={a.samples}")
            lines.append(f"   nu={num(pr.nu)}")
            lines.append(f"   decomposition residual: {num(pr.decomposition_residual)}")
            lines.append(f"   bianchi residual: {num(pr.bianchi_residual)}")
            lines.append(f"   eigenframe relation residual: "
                         f"{num(pr.eigenframe_relation_residual)}")
            lines.append(f"   gray ak2 residual: {num(pr.gray_ak2_residual)}")
            lines.append(f"   verdict: {pr.verdict.kind}"
                         + (f" ({num(pr.verdict.constant)})" if pr.verdict.constant is not None else ""))
        lines.append("")
        if self.schur is not None:
            lines.append(f"global {self.schur.kind} means: "
                         + " ".join(num(v) for v in self.schur.nu_per_point)
                         + f"  spread={num(self.schur.spread)}")
        lines.append(f"overall verdict: {self.overall.kind}"
                     + (f" ({num(self.overall.constant)})" if self.overall.constant is not None else ""))
        if self.expected_checks is not None:
            lines.append("")
            for c in self.expected_checks:
                lines.append(f"   {'ok  ' if c['ok'] else 'FAIL'} {c['check']}: "
                             f"expected {c['expected']}, observed {c['observed']}")
            lines.append(f"expected-vs-observed: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def analyze_chart(chart: Chart, points=None, *, name: str = "chart", kind: str = "chart",
                  tol: float = 1e-4, h: float = calculus.DEFAULT_STEP,
                  samples: int = 256, seed: int = 42,
                  expected=None) -> AnalysisReport:
    """Analyze a chart at the given points (default: its bundled points)."""
    if points is None:
        points = chart.default_points
    points = [tuple(float(v) for v in p) for p in points]
    if not points:
        raise ValueError("no evaluation points: pass points or add them to the chart")
    meta = {
        "target": name,
        "kind": kind,
        "tolerance": tol,
        "fd_step": h,
        "samples": samples,
        "seed": seed,
        "points": [list(p) for p in points],
    }
    reports = [
        analyze_point(chart, p, i, tol=tol, h=h, samples=samples, seed=seed)
        for i, p in enumerate(points)
    ]
    schur = schur_check(chart, points, h, samples, seed) if len(points) >= 2 else None
    overall = _overall_verdict(reports)
    checks = None
    if expected is not None:
        checks = _expected_checks(expected, reports, schur, overall, tol)
    return AnalysisReport(meta=meta, points=reports, schur=schur,
                          overall=overall, expected_checks=checks)


def analyze_model(model: ModelDescriptor, points=None, **kwargs) -> AnalysisReport:
    return analyze_chart(model.chart, points, name=model.name, kind="model",
                         expected=model.expected, **kwargs)
