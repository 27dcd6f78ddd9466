import math

import numpy as np
import pytest

from sl2mc import (
    BasisChange,
    Ensemble,
    QPolynomial,
    TracelessGenerator,
    Unimodular2x2,
    angle_of_vector,
    build_transfer,
    conjugate_ensemble,
    drift_expansion,
    exponential,
    log_norm_gain,
    p_function,
    projective_act,
    unzoom,
    zoom,
)

from conftest import random_generator, random_unimodular


class TestAngleOfVector:
    def test_axis_cases(self):
        assert angle_of_vector((1.0, 0.0)) == 0.0
        assert angle_of_vector((0.0, -3.0)) == pytest.approx(math.pi / 2, abs=0)
        assert angle_of_vector((-1.0, -1.0)) == pytest.approx(math.pi / 4, rel=1e-15)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            angle_of_vector((0.0, 0.0))

    def test_range(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            v = rng.normal(size=2)
            t = angle_of_vector(v)
            assert 0.0 <= t < math.pi


class TestProjectiveAct:
    def test_rotation_shifts(self):
        rot = exponential(0.3, TracelessGenerator(0.0, -1.0, 1.0))
        assert projective_act(rot, 3.0) == pytest.approx(3.3 - math.pi, abs=1e-12)

    def test_diagonal_contraction(self):
        t = exponential(0.5, TracelessGenerator(1.0, 0.0, 0.0))
        assert projective_act(t, math.pi / 4) == pytest.approx(math.atan(math.exp(-1.0)), abs=1e-13)

    def test_identity_fixes(self):
        eye = Unimodular2x2.identity()
        for theta in np.linspace(0.0, math.pi, 13, endpoint=False):
            assert projective_act(eye, theta) == pytest.approx(theta, abs=1e-15)

    def test_cocycle(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a, b = random_unimodular(rng), random_unimodular(rng)
            theta = rng.uniform(0.0, math.pi)
            lhs = projective_act(a @ b, theta)
            rhs = projective_act(a, projective_act(b, theta))
            assert abs(lhs - rhs) <= 1e-10 or abs(abs(lhs - rhs) - math.pi) <= 1e-10

    def test_gain_additivity(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            a, b = random_unimodular(rng), random_unimodular(rng)
            theta = rng.uniform(0.0, math.pi)
            lhs = log_norm_gain(a @ b, theta)
            rhs = log_norm_gain(a, projective_act(b, theta)) + log_norm_gain(b, theta)
            assert abs(lhs - rhs) <= 1e-10


class TestLogNormGain:
    def test_diagonal(self):
        t = exponential(0.1, TracelessGenerator(1.0, 0.0, 0.0))
        assert log_norm_gain(t, 0.0) == pytest.approx(0.1, abs=1e-15)

    def test_rotation_gains_nothing(self):
        rot = exponential(0.77, TracelessGenerator(0.0, -1.0, 1.0))
        for theta in np.linspace(0.0, math.pi, 11, endpoint=False):
            assert log_norm_gain(rot, theta) == pytest.approx(0.0, abs=1e-14)

    def test_shear(self):
        assert log_norm_gain(Unimodular2x2(1.0, 1.0, 0.0, 1.0), math.pi / 2) == pytest.approx(
            0.5 * math.log(2.0), abs=1e-15
        )


class TestPFunction:
    def test_boundary_values(self):
        g = TracelessGenerator(0.4, -0.3, 0.9)
        assert p_function(g, 0.0) == pytest.approx(g.c, abs=0)
        assert p_function(g, math.pi / 2) == pytest.approx(-g.b, abs=1e-15)

    def test_pure_a(self):
        assert p_function(TracelessGenerator(1.0, 0.0, 0.0), math.pi / 4) == pytest.approx(-1.0, abs=1e-15)

    def test_harmonic_form(self):
        # -a sin2t + (c-b)/2 + (c+b)/2 cos2t equals the sin^2/cos^2 form
        rng = np.random.default_rng(3)
        for _ in range(50):
            g = random_generator(rng)
            theta = rng.uniform(0.0, math.pi)
            alt = (
                -g.a * math.sin(2 * theta)
                + 0.5 * (g.c - g.b)
                + 0.5 * (g.c + g.b) * math.cos(2 * theta)
            )
            assert p_function(g, theta) == pytest.approx(alt, abs=1e-14)


class TestDriftExpansion:
    def test_fully_centered_ensemble_has_zero_drift(self):
        # E[p] = 0 and E[q + p p'/2] = 0: pure rotation noise
        ens = Ensemble.from_atoms(
            [(0.5, TracelessGenerator(0.0, 1.0, -1.0)), (0.5, TracelessGenerator(0.0, -1.0, 1.0))]
        )
        for theta in np.linspace(0.0, math.pi, 9, endpoint=False):
            assert drift_expansion(ens, 0.1, theta) == 0.0

    def test_centered_has_no_drift(self, centered_vw_ensemble):
        # E[p] = 0 and E[q + p p'/2] = sin(4t)/2 here, so only the lam^2 term
        lam = 0.01
        for theta in np.linspace(0.0, math.pi, 9, endpoint=False):
            expect = lam * lam * 0.5 * math.sin(4 * theta)
            assert drift_expansion(centered_vw_ensemble, lam, theta) == pytest.approx(expect, abs=1e-15)

    def test_elliptic_normal_form_constant_drift(self):
        # mean generator eta*J gives E[p] = eta at every angle
        eta = 0.7
        ens = Ensemble.from_atoms([(1.0, TracelessGenerator(0.0, -eta, eta))])
        for theta in np.linspace(0.0, math.pi, 9, endpoint=False):
            assert drift_expansion(ens, 0.05, theta) == pytest.approx(0.05 * eta, abs=1e-15)

    def test_single_atom_first_order(self):
        ens = Ensemble.from_atoms([(1.0, TracelessGenerator(0.0, 0.0, 1.0))])
        got = drift_expansion(ens, 0.1, 0.0)
        # p(0) = c = 1; second order adds q + p p'/2 = 0 + 0 at theta = 0
        assert got == pytest.approx(0.1, abs=1e-15)

    def test_matches_exact_map_to_third_order(self):
        # |S(theta) - theta - lam p - lam^2 (q + p p'/2)| = O(lam^3):
        # the ratio to lam^3 stays bounded as lam is halved
        rng = np.random.default_rng(4)
        p = random_generator(rng)
        q = QPolynomial.constant(random_generator(rng))
        thetas = np.linspace(0.0, math.pi, 17, endpoint=False)
        ens = Ensemble.from_atoms([(1.0, p, q)])
        ratios = []
        lam = 1e-2
        while lam >= 1e-5:
            worst = 0.0
            for theta in thetas:
                t = build_transfer(lam, p, q)
                moved = projective_act(t, theta)
                diff = moved - theta
                if diff > math.pi / 2:
                    diff -= math.pi
                elif diff < -math.pi / 2:
                    diff += math.pi
                err = abs(diff - drift_expansion(ens, lam, theta))
                worst = max(worst, err / lam**3)
            ratios.append(worst)
            lam /= 2.0
        bound = 4.0 * ratios[0] + 1.0
        assert all(r <= bound for r in ratios)


class TestZoom:
    def test_fixed_points(self):
        for lam in (1e-4, 1e-2, 0.5, 1.0):
            assert zoom(lam, 0.0) == 0.0
            assert zoom(lam, math.pi / 2) == pytest.approx(math.pi / 2, abs=0)

    def test_identity_at_unit_coupling(self):
        for theta in np.linspace(0.0, math.pi, 11, endpoint=False):
            assert zoom(1.0, theta) == pytest.approx(theta, abs=1e-13)

    def test_inverse_pair_on_grid(self):
        thetas = np.linspace(0.0, math.pi, 1000, endpoint=False)
        for lam in (1e-4, 1e-3, 1e-2, 1e-1, 1.0):
            for theta in thetas:
                assert unzoom(lam, zoom(lam, theta)) == pytest.approx(theta, abs=1e-12)

    def test_monotone_bijection(self):
        thetas = np.linspace(0.0, math.pi, 2000, endpoint=False)
        for lam in (1e-4, 1e-2, 0.3):
            vals = np.array([zoom(lam, t) for t in thetas])
            assert np.all(np.diff(vals) > 0.0)
            assert vals[0] == 0.0 and vals[-1] < math.pi

    def test_rejects_nonpositive_coupling(self):
        with pytest.raises(ValueError):
            zoom(0.0, 0.3)
        with pytest.raises(ValueError):
            unzoom(-1.0, 0.3)


class TestConjugateEnsemble:
    def test_identity_change(self, centered_vw_ensemble):
        out = conjugate_ensemble(BasisChange.identity(), centered_vw_ensemble)
        for p, q in zip(out.generators, centered_vw_ensemble.generators):
            assert p == q

    def test_preserves_determinant(self):
        rng = np.random.default_rng(5)
        ens = Ensemble.from_atoms([(1.0, random_generator(rng))])
        m = BasisChange(np.array([[2.0, 1.0], [0.5, 1.0]]))
        out = conjugate_ensemble(m, ens)
        assert out.generators[0].det() == pytest.approx(ens.generators[0].det(), rel=1e-12)

    def test_traceless_by_construction(self):
        rng = np.random.default_rng(6)
        ens = Ensemble.from_atoms([(1.0, random_generator(rng))])
        m = BasisChange(rng.normal(size=(2, 2)) + 2 * np.eye(2))
        out = conjugate_ensemble(m, ens)
        # the representation stores only (a, b, c): trace is structurally zero;
        # conjugating back recovers the original entries
        back = conjugate_ensemble(m.inverse(), out)
        assert back.generators[0].a == pytest.approx(ens.generators[0].a, abs=1e-12)
        assert back.generators[0].b == pytest.approx(ens.generators[0].b, abs=1e-12)

    def test_singular_change_rejected(self):
        with pytest.raises(ValueError):
            BasisChange(np.array([[1.0, 2.0], [2.0, 4.0]]))
