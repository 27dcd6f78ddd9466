import math

import numpy as np
import pytest

from sl2mc import ChainConfig, build_transfer, conjugate_ensemble, run_chain_matrices
from sl2mc.models import (
    AndersonEdge,
    HarmonicChain,
    KronigPenney,
    build_ensemble,
    chain_conjugation,
    model_prediction,
    raw_matrix_ensemble,
    raw_transfer,
    reference_prediction,
)
from sl2mc.montecarlo import estimate_lyapunov
from sl2mc.perturbation import AnomalyTag, classify


CHAIN = HarmonicChain((0.5, 1.5), (0.5, 0.5), 0.1)
AND_HYP = AndersonEdge(1.0, (1.0, -1.0), (0.5, 0.5), 1e-2)
AND_ELL = AndersonEdge(-1.0, (1.0, -1.0), (0.5, 0.5), 1e-2)
KP_BELOW = KronigPenney(1, "below", (0.0, 0.5, 1.0, 1.5, 2.0), (0.2,) * 5, 1e-2)
KP_ABOVE = KronigPenney(1, "above", (0.0, 0.5, 1.0, 1.5, 2.0), (0.2,) * 5, 1e-2)


class TestSpecs:
    def test_chain_requires_positive_masses(self):
        with pytest.raises(ValueError):
            HarmonicChain((0.5, -1.0), (0.5, 0.5), 0.1)

    def test_chain_requires_probability_weights(self):
        with pytest.raises(ValueError):
            HarmonicChain((0.5, 1.5), (0.7, 0.7), 0.1)

    def test_anderson_requires_centered_potential(self):
        with pytest.raises(ValueError):
            AndersonEdge(1.0, (1.0, 0.0), (0.5, 0.5), 1e-2)

    def test_anderson_rejects_zero_offset(self):
        with pytest.raises(ValueError):
            AndersonEdge(0.0, (1.0, -1.0), (0.5, 0.5), 1e-2)

    def test_kp_band_index(self):
        with pytest.raises(ValueError):
            KronigPenney(0, "below", (1.0,), (1.0,), 1e-2)
        with pytest.raises(ValueError):
            KronigPenney(1, "sideways", (1.0,), (1.0,), 1e-2)


class TestBuildEnsemble:
    def test_chain_normal_form(self):
        ens, mu = build_ensemble(CHAIN)
        assert mu == 0.1
        mean = ens.mean_generator()
        # displayed normal form (0, -sqrt(Em); m/sqrt(Em), 0) with Em = 1
        assert mean.a == pytest.approx(0.0, abs=1e-15)
        assert mean.b == pytest.approx(-1.0, abs=1e-15)
        assert mean.c == pytest.approx(1.0, abs=1e-15)
        assert classify(ens).eta == pytest.approx(1.0, abs=1e-14)
        # only the lower-left entry fluctuates: p3 = m / sqrt(Em)
        assert {p.c for p in ens.generators} == {0.5, 1.5}

    def test_anderson_hyperbolic(self):
        ens, mu = build_ensemble(AND_HYP)
        assert mu == pytest.approx(0.1)
        cls = classify(ens)
        assert cls.tag is AnomalyTag.HYPERBOLIC and cls.eta == pytest.approx(1.0)

    def test_anderson_elliptic_below_band(self):
        ens, mu = build_ensemble(AND_ELL)
        assert classify(ens).tag is AnomalyTag.ELLIPTIC

    def test_kp_classifications(self):
        for spec, tag in ((KP_BELOW, AnomalyTag.ELLIPTIC), (KP_ABOVE, AnomalyTag.HYPERBOLIC)):
            ens, mu = build_ensemble(spec)
            assert mu == pytest.approx(0.1)
            assert classify(ens).tag is tag

    def test_kp_eta_matches_closed_form(self):
        eta = math.sqrt(1.0 / (2.0 * math.pi**2))
        for spec in (KP_BELOW, KP_ABOVE):
            ens, _ = build_ensemble(spec)
            assert classify(ens).eta == pytest.approx(eta, rel=1e-12)


class TestReferencePredictions:
    def test_chain_closed_form(self):
        ref = reference_prediction(CHAIN)
        assert ref.gamma_leading == pytest.approx(0.03125, abs=1e-15)

    def test_pipeline_agreement(self):
        for spec in (CHAIN, KP_BELOW, KP_ABOVE):
            ref = reference_prediction(spec)
            pipe = model_prediction(spec)
            assert abs(ref.gamma_leading - pipe.gamma_leading) <= 1e-9
            assert ref.anomaly.tag is pipe.anomaly.tag

    def test_anderson_hyperbolic_sqrt_law(self):
        ref = reference_prediction(AND_HYP)
        assert ref.gamma_leading == pytest.approx(1.0)
        # gamma = sqrt(w * lam): leading * mu with mu = sqrt(lam)
        _, mu = build_ensemble(AND_HYP)
        assert ref.gamma_leading * mu == pytest.approx(math.sqrt(1e-2))

    def test_anderson_below_band_warns(self):
        ref = reference_prediction(AND_ELL)
        pipe = model_prediction(AND_ELL)
        assert ref.gamma_leading == pytest.approx(pipe.gamma_leading, rel=1e-12)
        assert ref.gamma_leading == pytest.approx(0.125)  # Var(v)/(8|w|)
        assert any("negative for w<0" in n for n in ref.notes)

    def test_kp_sides_share_eta(self):
        assert reference_prediction(KP_BELOW).anomaly.eta == pytest.approx(
            reference_prediction(KP_ABOVE).anomaly.eta, rel=1e-14
        )


class TestRawTransfer:
    def test_chain_matrix_shape(self):
        t = raw_transfer(CHAIN, 1.5)
        np.testing.assert_allclose(
            t.as_matrix(), [[2.0 - 0.01 * 1.5, -1.0], [1.0, 0.0]], atol=1e-16
        )
        assert t.det() == pytest.approx(1.0, abs=1e-15)

    def test_anderson_matrix_shape(self):
        t = raw_transfer(AND_HYP, -1.0)
        e = 2.0 + 1.0 * 1e-2
        np.testing.assert_allclose(t.as_matrix(), [[e + 1e-2, -1.0], [1.0, 0.0]], atol=1e-16)

    def test_small_coupling_limit(self):
        t = raw_transfer(HarmonicChain((1.0,), (1.0,), 1e-9), 1.0)
        np.testing.assert_allclose(t.as_matrix(), [[2.0, -1.0], [1.0, 0.0]], atol=1e-15)

    def test_kp_raw_not_specified(self):
        with pytest.raises(ValueError, match="not specified"):
            raw_transfer(KP_BELOW, 1.0)
        with pytest.raises(ValueError):
            raw_matrix_ensemble(KP_BELOW)


class TestConjugationChain:
    def test_conjugation_reproduces_normal_form(self):
        # conjugating the raw-coordinate generators by M3 M2 M1 recovers the
        # displayed normal-form entries
        ens, mu = build_ensemble(CHAIN)
        m = chain_conjugation(CHAIN)
        raw_coords = conjugate_ensemble(m.inverse(), ens)
        back = conjugate_ensemble(m, raw_coords)
        for p, q in zip(back.generators, ens.generators):
            assert p.a == pytest.approx(q.a, abs=1e-12)
            assert p.b == pytest.approx(q.b, abs=1e-12)
            assert p.c == pytest.approx(q.c, abs=1e-12)

    def test_raw_matrix_conjugates_to_reduced(self):
        # M (raw T) M^{-1} equals the exponential model up to O(mu^3)
        ens, mu = build_ensemble(CHAIN)
        m = chain_conjugation(CHAIN).m
        minv = np.linalg.inv(m)
        for i, mass in enumerate(CHAIN.masses):
            raw = raw_transfer(CHAIN, mass).as_matrix()
            reduced = build_transfer(mu, ens.generators[i], ens.corrections[i]).as_matrix()
            assert np.max(np.abs(m @ raw @ minv - reduced)) <= 2.0 * mu**3


class TestRawVsReduced:
    def test_chain_lyapunov_match_at_moderate_budget(self):
        # conjugation invariance + O(omega^3) reduction error: the raw and
        # reduced Lyapunov estimates agree within noise at omega = 0.05
        spec = HarmonicChain((0.5, 1.5), (0.5, 0.5), 0.05)
        ens, mu = build_ensemble(spec)
        weights, mats = raw_matrix_ensemble(spec)
        cfg = ChainConfig(lam=mu, steps=500_000, burn_in=5_000, theta0=0.3, replicas=100, master_seed=55)
        reduced = estimate_lyapunov(ens, cfg)
        raw = run_chain_matrices(weights, mats, cfg, bins=8, n_harm=1)
        g = raw.replica_gamma()
        raw_val = float(np.mean(g))
        raw_err = float(np.std(g, ddof=1) / math.sqrt(len(g)))
        assert abs(raw_val - reduced.value) <= 3.0 * math.hypot(raw_err, reduced.stderr)
