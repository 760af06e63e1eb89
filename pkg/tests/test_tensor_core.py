"""Point-level operator tests against brute-force oracles.

The reference implementations below evaluate the defining formulas on full
basis vectors, term by term, independently of the einsum paths in the
package.
"""

import itertools

import numpy as np
import pytest

from ahgeom.selftest import random_hermitian_point, random_j_invariant_bilinear
from ahgeom.tensor_core import (
    Bilinear,
    CurvatureTensor,
    HermitianPoint,
    InvariantViolation,
    Plane,
    ah_identity_residual,
    build_from_decomposition,
    fit_pi_span,
    pi1,
    pi2,
    psi,
    riemann_symmetry_residual,
    sectional_curvature,
    standard_j,
)

# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------


def form(matrix, x, y):
    return float(x @ matrix @ y)


def psi_reference(pt, Q):
    """Literal six-term definition, expanded on basis vectors."""
    n, g, J = pt.dim, pt.g, pt.J
    e = np.eye(n)
    out = np.zeros((n, n, n, n))
    for x, y, z, u in itertools.product(range(n), repeat=4):
        X, Y, Z, U = e[x], e[y], e[z], e[u]
        out[x, y, z, u] = (
            form(g, X, J @ U) * form(Q, Y, J @ Z)
            - form(g, X, J @ Z) * form(Q, Y, J @ U)
            - 2.0 * form(g, X, J @ Y) * form(Q, Z, J @ U)
            + form(g, Y, J @ Z) * form(Q, X, J @ U)
            - form(g, Y, J @ U) * form(Q, X, J @ Z)
            - 2.0 * form(g, Z, J @ U) * form(Q, X, J @ Y)
        )
    return out


def pi1_reference(pt):
    n, g = pt.dim, pt.g
    e = np.eye(n)
    out = np.zeros((n, n, n, n))
    for x, y, z, u in itertools.product(range(n), repeat=4):
        out[x, y, z, u] = form(g, e[x], e[u]) * form(g, e[y], e[z]) \
            - form(g, e[x], e[z]) * form(g, e[y], e[u])
    return out


def pi2_reference(pt):
    n, g, J = pt.dim, pt.g, pt.J
    e = np.eye(n)
    out = np.zeros((n, n, n, n))
    for x, y, z, u in itertools.product(range(n), repeat=4):
        X, Y, Z, U = e[x], e[y], e[z], e[u]
        out[x, y, z, u] = (
            form(g, X, J @ U) * form(g, Y, J @ Z)
            - form(g, X, J @ Z) * form(g, Y, J @ U)
            - 2.0 * form(g, X, J @ Y) * form(g, Z, J @ U)
        )
    return out


# ---------------------------------------------------------------------------
# HermitianPoint invariants
# ---------------------------------------------------------------------------


class TestHermitianPoint:
    def test_standard_flat_is_valid(self):
        pt = HermitianPoint.standard_flat(3)
        assert pt.dim == 6
        assert np.allclose(pt.J @ pt.J, -np.eye(6))

    def test_rejects_asymmetric_metric(self):
        g = np.eye(4)
        g[0, 1] = 0.5
        with pytest.raises(InvariantViolation, match="not symmetric"):
            HermitianPoint(m=2, g=g, J=standard_j(2))

    def test_rejects_indefinite_metric(self):
        g = np.diag([1.0, -1.0, 1.0, 1.0])
        with pytest.raises(InvariantViolation, match="positive definite"):
            HermitianPoint(m=2, g=g, J=standard_j(2))

    def test_rejects_non_square_root_of_minus_id(self):
        with pytest.raises(InvariantViolation, match="-Id"):
            HermitianPoint(m=2, g=np.eye(4), J=np.eye(4))

    def test_rejects_incompatible_j(self):
        # a valid J for a different metric
        rng = np.random.default_rng(5)
        pt = random_hermitian_point(2, rng)
        with pytest.raises(InvariantViolation, match="compatible"):
            HermitianPoint(m=2, g=np.diag([4.0, 1.0, 1.0, 1.0]), J=pt.J)

    def test_arrays_are_immutable(self):
        pt = HermitianPoint.standard_flat(2)
        with pytest.raises(ValueError):
            pt.g[0, 0] = 2.0


# ---------------------------------------------------------------------------
# psi / pi1 / pi2
# ---------------------------------------------------------------------------


class TestPsi:
    def test_zero_input_gives_zero(self):
        pt = HermitianPoint.standard_flat(2)
        out = psi(Bilinear(pt, np.zeros((4, 4))))
        assert np.all(out.values == 0.0)

    def test_psi_of_metric_is_twice_pi2(self):
        rng = np.random.default_rng(1)
        for m in (1, 2, 3):
            for pt in (HermitianPoint.standard_flat(m), random_hermitian_point(m, rng)):
                gap = np.max(np.abs(psi(Bilinear.from_metric(pt)).values - 2.0 * pi2(pt).values))
                assert gap < 1e-12

    def test_matches_reference_on_random_input(self):
        rng = np.random.default_rng(2)
        pt = random_hermitian_point(2, rng)
        Q = random_j_invariant_bilinear(pt, rng)
        np.testing.assert_allclose(psi(Q).values, psi_reference(pt, Q.values),
                                   rtol=0, atol=1e-12)

    def test_frozen_value_flat_m2(self):
        # brute-force expansion of the six terms at the standard basis gives 6
        pt = HermitianPoint.standard_flat(2)
        ref = psi_reference(pt, pt.g)
        e1, je1 = 0, 1
        assert ref[e1, je1, je1, e1] == pytest.approx(6.0, abs=1e-14)
        assert psi(Bilinear.from_metric(pt)).values[e1, je1, je1, e1] == pytest.approx(6.0)

    def test_curvature_type_antisymmetries_for_admissible_q(self):
        rng = np.random.default_rng(3)
        # exact (bitwise) on the standard structure, where g and J are exact
        for m in (2, 3):
            pt = HermitianPoint.standard_flat(m)
            V = psi(random_j_invariant_bilinear(pt, rng)).values
            assert np.array_equal(V, -V.swapaxes(0, 1))
            assert np.array_equal(V, -V.swapaxes(2, 3))
        # within rounding on random structures, whose invariants hold to tol
        for m in (2, 3):
            pt = random_hermitian_point(m, rng)
            V = psi(random_j_invariant_bilinear(pt, rng)).values
            scale = np.max(np.abs(V)) + 1.0
            assert np.max(np.abs(V + V.swapaxes(0, 1))) < 1e-7 * scale
            assert np.max(np.abs(V + V.swapaxes(2, 3))) < 1e-7 * scale


class TestPi1:
    def test_orthonormal_plane_value(self):
        pt = HermitianPoint.standard_flat(2)
        v = pi1(pt).values
        assert v[0, 2, 2, 0] == 1.0

    def test_vanishes_on_repeated_first_arguments(self):
        pt = HermitianPoint.standard_flat(2)
        v = pi1(pt).values
        assert np.all(v[0, 0, :, :] == 0.0)

    def test_matches_reference(self):
        rng = np.random.default_rng(4)
        pt = random_hermitian_point(2, rng)
        np.testing.assert_allclose(pi1(pt).values, pi1_reference(pt), rtol=0, atol=1e-13)

    def test_sectional_curvature_of_scaled_pi1_is_constant(self):
        rng = np.random.default_rng(5)
        pt = random_hermitian_point(3, rng)
        c = -1.75
        R = CurvatureTensor(pt, c * pi1(pt).values)
        for _ in range(100):
            v = rng.standard_normal((2, pt.dim))
            plane = Plane(x=v[0], y=v[1])
            assert sectional_curvature(R, plane) == pytest.approx(c, abs=1e-10)


class TestPi2:
    def test_matches_reference(self):
        rng = np.random.default_rng(6)
        pt = random_hermitian_point(2, rng)
        np.testing.assert_allclose(pi2(pt).values, pi2_reference(pt), rtol=0, atol=1e-13)

    def test_vanishes_on_antiholomorphic_planes(self):
        # every term carries a factor g(x,Jy), g(x,Jx) or g(y,Jy), all zero
        pt = HermitianPoint.standard_flat(3)
        R = pi2(pt)
        rng = np.random.default_rng(7)
        from ahgeom.analysis import sample_antiholomorphic_planes

        for plane in sample_antiholomorphic_planes(pt, 50, rng):
            assert sectional_curvature(R, plane) == pytest.approx(0.0, abs=1e-12)

    def test_holomorphic_plane_value_is_three(self):
        pt = HermitianPoint.standard_flat(2)
        x = np.array([1.0, 0.0, 0.0, 0.0])
        plane = Plane(x=x, y=pt.J @ x, kind="holomorphic")
        assert sectional_curvature(pi2(pt), plane) == pytest.approx(3.0)


# ---------------------------------------------------------------------------
# AH identities
# ---------------------------------------------------------------------------


class TestAHIdentities:
    def test_complex_space_form_shape_passes_all(self):
        pt = HermitianPoint.standard_flat(2)
        R = CurvatureTensor(pt, pi1(pt).values + pi2(pt).values)
        for which in (1, 2, 3):
            assert ah_identity_residual(R, which) < 1e-12

    def test_pi1_passes_3_but_not_1(self):
        pt = HermitianPoint.standard_flat(2)
        R = pi1(pt)
        assert ah_identity_residual(R, 3) < 1e-12
        assert ah_identity_residual(R, 1) > 0.5

    def test_pi1_passes_2(self):
        # constant-curvature tensors satisfy the three-term identity exactly
        rng = np.random.default_rng(8)
        pt = random_hermitian_point(3, rng)
        assert ah_identity_residual(pi1(pt), 2) < 1e-12

    def test_zero_tensor_passes_all(self):
        pt = HermitianPoint.standard_flat(2)
        R = CurvatureTensor(pt, np.zeros((4, 4, 4, 4)))
        assert all(ah_identity_residual(R, k) == 0.0 for k in (1, 2, 3))

    def test_bad_identity_index_raises(self):
        pt = HermitianPoint.standard_flat(1)
        with pytest.raises(ValueError, match="identity index"):
            ah_identity_residual(pi1(pt), 4)


class TestRiemannSymmetryResidual:
    def test_algebraic_construction_is_exact(self):
        rng = np.random.default_rng(9)
        pt = random_hermitian_point(2, rng)
        S = random_j_invariant_bilinear(pt, rng)
        R = build_from_decomposition(S, 0.8, tol=1e-8)
        assert riemann_symmetry_residual(R) < 1e-12

    def test_pi1_is_symmetric(self):
        pt = HermitianPoint.standard_flat(3)
        assert riemann_symmetry_residual(pi1(pt)) == 0.0

    def test_detects_perturbation(self):
        pt = HermitianPoint.standard_flat(2)
        values = pi1(pt).values.copy()
        values[0, 1, 2, 3] += 1e-3
        assert riemann_symmetry_residual(CurvatureTensor(pt, values)) >= 1e-3


# ---------------------------------------------------------------------------
# Sectional curvature
# ---------------------------------------------------------------------------


class TestSectionalCurvature:
    def test_complex_space_form_plane_values(self):
        pt = HermitianPoint.standard_flat(2)
        R = CurvatureTensor(pt, pi1(pt).values + pi2(pt).values)
        x = np.array([1.0, 0.0, 0.0, 0.0])
        holo = Plane(x=x, y=pt.J @ x, kind="holomorphic")
        anti = Plane(x=x, y=np.array([0.0, 0.0, 1.0, 0.0]), kind="antiholomorphic")
        assert sectional_curvature(R, holo) == pytest.approx(4.0)
        assert sectional_curvature(R, anti) == pytest.approx(1.0)

    def test_zero_tensor(self):
        pt = HermitianPoint.standard_flat(2)
        R = CurvatureTensor(pt, np.zeros((4, 4, 4, 4)))
        plane = Plane(x=np.array([1.0, 0, 0, 0]), y=np.array([0, 1.0, 0, 0]))
        assert sectional_curvature(R, plane) == 0.0

    def test_degenerate_plane_raises(self):
        pt = HermitianPoint.standard_flat(2)
        x = np.array([1.0, 0, 0, 0])
        with pytest.raises(InvariantViolation, match="degenerate"):
            sectional_curvature(pi1(pt), Plane(x=x, y=2.0 * x))

    def test_invariant_under_plane_basis_change(self):
        rng = np.random.default_rng(10)
        pt = random_hermitian_point(2, rng)
        S = random_j_invariant_bilinear(pt, rng)
        R = build_from_decomposition(S, 0.3, tol=1e-8)
        x, y = rng.standard_normal((2, 4))
        k0 = sectional_curvature(R, Plane(x=x, y=y))
        for _ in range(20):
            a, b, c, d = rng.uniform(-2, 2, size=4)
            if abs(a * d - b * c) < 0.1:
                continue
            k1 = sectional_curvature(R, Plane(x=a * x + b * y, y=c * x + d * y))
            assert abs(k1 - k0) < 1e-10


# ---------------------------------------------------------------------------
# Decomposition construction and span fit
# ---------------------------------------------------------------------------


class TestBuildFromDecomposition:
    def test_unit_sphere_tensor_m3(self):
        # S = 5 g, nu = 1, m = 3: the psi term cancels the pi2 term exactly
        pt = HermitianPoint.standard_flat(3)
        R = build_from_decomposition(Bilinear(pt, 5.0 * pt.g), 1.0)
        np.testing.assert_allclose(R.values, pi1(pt).values, rtol=0, atol=1e-12)

    def test_complex_projective_plane_tensor(self):
        pt = HermitianPoint.standard_flat(2)
        R = build_from_decomposition(Bilinear(pt, 6.0 * pt.g), 1.0)
        np.testing.assert_allclose(R.values, pi1(pt).values + pi2(pt).values,
                                   rtol=0, atol=1e-12)

    def test_zero_inputs(self):
        pt = HermitianPoint.standard_flat(2)
        R = build_from_decomposition(Bilinear(pt, np.zeros((4, 4))), 0.0)
        assert np.all(R.values == 0.0)

    def test_gates_on_asymmetric_input(self):
        pt = HermitianPoint.standard_flat(2)
        S = np.zeros((4, 4))
        S[0, 1] = 1.0
        with pytest.raises(InvariantViolation, match="not symmetric"):
            build_from_decomposition(Bilinear(pt, S), 1.0)

    def test_gates_on_non_j_invariant_input(self):
        pt = HermitianPoint.standard_flat(2)
        S = np.diag([1.0, 2.0, 3.0, 4.0])  # symmetric but not J-invariant
        with pytest.raises(InvariantViolation, match="J-invariant"):
            build_from_decomposition(Bilinear(pt, S), 1.0)

    def test_output_satisfies_identities_2_and_3(self):
        rng = np.random.default_rng(12)
        for m in (2, 3):
            pt = HermitianPoint.standard_flat(m)
            S = random_j_invariant_bilinear(pt, rng)
            R = build_from_decomposition(S, float(rng.uniform(-1, 1)))
            assert ah_identity_residual(R, 2) < 1e-12
            assert ah_identity_residual(R, 3) < 1e-12


class TestFitPiSpan:
    def test_exact_span_member(self):
        pt = HermitianPoint.standard_flat(2)
        values = 2.0 * pi1(pt).values - 0.5 * pi2(pt).values
        a, b, res = fit_pi_span(CurvatureTensor(pt, values))
        assert (a, b) == (pytest.approx(2.0), pytest.approx(-0.5))
        assert res < 1e-12

    def test_pure_pi1(self):
        pt = HermitianPoint.standard_flat(3)
        a, b, res = fit_pi_span(pi1(pt))
        assert (a, b) == (pytest.approx(1.0), pytest.approx(0.0, abs=1e-13))
        assert res < 1e-12

    def test_projection_is_a_contraction(self):
        rng = np.random.default_rng(11)
        pt = HermitianPoint.standard_flat(2)
        E = 1e-6 * rng.standard_normal((4, 4, 4, 4))
        E *= 1e-6 / np.linalg.norm(E)
        values = pi1(pt).values + pi2(pt).values + E
        _, _, res = fit_pi_span(CurvatureTensor(pt, values))
        assert res <= 1e-6 + 1e-18

    def test_m1_degenerate_span(self):
        # at m = 1 the two generators are parallel (pi2 = 3 pi1); the fit
        # must still reproduce the tensor it is given
        pt = HermitianPoint.standard_flat(1)
        np.testing.assert_allclose(pi2(pt).values, 3.0 * pi1(pt).values, atol=1e-14)
        R = CurvatureTensor(pt, -4.0 * pi1(pt).values)
        a, b, res = fit_pi_span(R)
        assert res < 1e-12
        assert a + 3.0 * b == pytest.approx(-4.0)
