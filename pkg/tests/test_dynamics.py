import math
import warnings

import mpmath
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from optoport.dynamics import (
    HBAR,
    K_B,
    Couplings,
    PhysicalParams,
    PrecisionWarning,
    closed_form_propagator,
    couplings_from_params,
    drift_matrix,
    evolve_initial,
    evolved_covariances,
    ladder_propagator,
    ladder_propagator_mp,
    nbar_from_temperature,
    propagator,
    temperature_from_nbar,
)
from optoport.gaussian import is_symplectic, symplectic_defect, symplectic_form

rates = st.floats(0.05, 3.0)
times = st.floats(0.0, 2.0)


def occupations(V):
    return [(V[2 * m, 2 * m] + V[2 * m + 1, 2 * m + 1] - 1) / 2 for m in range(3)]


def rel_diff(X, Y):
    return np.max(np.abs(X - Y)) / max(1.0, np.max(np.abs(Y)))


class TestCouplings:
    def test_reference_chi(self, ref_couplings):
        # [reference value] chi ~ theta ~ 5e5, reproduced within 20 %
        assert 4e5 <= ref_couplings.chi <= 6e5
        assert ref_couplings.theta == pytest.approx(5e5, rel=0.2)

    def test_reference_big_theta_order(self, ref_couplings):
        assert 3e2 <= ref_couplings.big_theta <= 3e3

    def test_gap_matches_formula(self, ref_params, ref_couplings):
        c = ref_couplings
        w1, w2 = ref_params.stokes_freq, ref_params.anti_stokes_freq
        assert c.theta == pytest.approx(c.chi * math.sqrt(w2 / w1), rel=1e-15)
        with mpmath.workdps(40):
            exact = mpmath.mpf(c.chi) * (mpmath.sqrt(mpmath.mpf(w2) / w1) - 1)
        assert c.gap == pytest.approx(float(exact), rel=1e-12)

    def test_big_theta_consistency(self, ref_couplings):
        c = ref_couplings
        with mpmath.workdps(40):
            exact = float(mpmath.mpf(c.theta) ** 2 - mpmath.mpf(c.chi) ** 2)
        # theta is rounded to double; the stored gap is the more accurate one
        assert c.big_theta**2 == pytest.approx(exact, rel=1e-6)
        assert c.big_theta**2 == pytest.approx(c.gap * (c.theta + c.chi), rel=1e-12)

    def test_power_scaling(self, ref_params):
        a = couplings_from_params(ref_params)
        b = couplings_from_params(ref_params.with_power(4 * ref_params.power))
        assert b.chi == pytest.approx(2 * a.chi, rel=1e-14)
        assert b.theta == pytest.approx(2 * a.theta, rel=1e-14)
        assert b.big_theta == pytest.approx(2 * a.big_theta, rel=1e-12)

    def test_incidence(self, ref_params):
        from dataclasses import replace

        c = couplings_from_params(replace(ref_params, incidence=math.pi / 3))
        assert c.chi == pytest.approx(0.5 * couplings_from_params(ref_params).chi, rel=1e-14)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            PhysicalParams(carrier=1e8, mech_freq=5e8)
        with pytest.raises(ValueError):
            PhysicalParams(power=-1)
        with pytest.raises(ValueError):
            PhysicalParams(det_bandwidth=6e8)

    def test_rwa_warning(self):
        with pytest.warns(UserWarning, match="rotating-wave"):
            PhysicalParams(det_bandwidth=1e8)

    def test_hyperbolic_has_no_frequency(self):
        with pytest.raises(ValueError):
            Couplings(2.0, 1.0).big_theta


class TestThermal:
    def test_zero(self):
        assert nbar_from_temperature(0.0, 5e8) == 0.0

    def test_ln2(self):
        Omega = 5e8
        T = HBAR * Omega / (K_B * math.log(2))
        assert nbar_from_temperature(T, Omega) == pytest.approx(1.0, rel=1e-14)

    def test_round_trip(self):
        Omega = 5e8
        T = temperature_from_nbar(1e3, Omega)
        assert T == pytest.approx(HBAR * Omega * 1e3 / K_B, rel=1e-3)
        assert nbar_from_temperature(T, Omega) == pytest.approx(1e3, rel=1e-9)

    def test_negative(self):
        with pytest.raises(ValueError):
            nbar_from_temperature(-1.0, 5e8)

    def test_params_occupation(self):
        assert PhysicalParams(nbar=3.0).mean_occupation() == 3.0
        T = temperature_from_nbar(10.0, 5e8)
        assert PhysicalParams(temperature=T).mean_occupation() == pytest.approx(10.0, rel=1e-12)


class TestDrift:
    @given(rates, rates)
    def test_hamiltonian_flow(self, chi, theta):
        A = drift_matrix(Couplings(chi, theta))
        om = symplectic_form(3)
        assert np.max(np.abs(A @ om + om @ A.T)) < 1e-12

    def test_beam_splitter_limit(self):
        theta, t = 1.3, 0.7
        S = scipy.linalg.expm(drift_matrix(Couplings(0.0, theta)) * t)
        c, s = math.cos(theta * t), math.sin(theta * t)
        # b(t) = cos b - sin a2, a2(t) = sin b + cos a2; a1 untouched
        assert np.allclose(S[0:2, 0:2], np.eye(2))
        assert np.allclose(S[2:4, 2:4], c * np.eye(2)) and np.allclose(S[2:4, 4:6], -s * np.eye(2))
        assert np.allclose(S[4:6, 2:4], s * np.eye(2)) and np.allclose(S[4:6, 4:6], c * np.eye(2))

    def test_parametric_limit(self):
        chi, t = 0.8, 0.9
        S = scipy.linalg.expm(drift_matrix(Couplings(chi, 0.0)) * t)
        ch, sh = math.cosh(chi * t), math.sinh(chi * t)
        z = np.diag([1.0, -1.0])
        assert np.allclose(S[0:2, 0:2], ch * np.eye(2)) and np.allclose(S[0:2, 2:4], sh * z)
        assert np.allclose(S[4:6, 4:6], np.eye(2))


class TestPropagator:
    def test_identity_at_zero(self, ref_couplings):
        assert np.array_equal(propagator(ref_couplings, 0.0), np.eye(6))
        assert np.allclose(closed_form_propagator(ref_couplings, 0.0), np.eye(6), atol=0)

    def test_negative_time(self, ref_couplings):
        with pytest.raises(ValueError):
            propagator(ref_couplings, -1.0)

    def test_period(self, ref_couplings):
        c = ref_couplings
        S = closed_form_propagator(c, 2 * math.pi / c.big_theta)
        assert rel_diff(S, np.eye(6)) < 1e-7

    def test_periodicity_random_times(self, ref_couplings, rng):
        c = ref_couplings
        T = 2 * math.pi / c.big_theta
        for t in rng.uniform(0, T, 20):
            a, b = closed_form_propagator(c, t), closed_form_propagator(c, t + T)
            assert rel_diff(b, a) < 1e-7

    def test_symplectic_reference(self, ref_couplings, rng):
        c = ref_couplings
        for x in rng.uniform(0, 2 * math.pi, 20):
            S = closed_form_propagator(c, x / c.big_theta)
            assert symplectic_defect(S) < 1e-9 * max(1.0, np.max(np.abs(S)) ** 2)

    def test_mp_matches_closed_form_at_reference(self, ref_couplings):
        # same float inputs for both routes: theta and theta - chi from the stored rates
        c = Couplings(ref_couplings.chi, ref_couplings.theta)
        for x in (1e-3, 0.5, 2.0):
            t = x / c.big_theta
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", PrecisionWarning)
                S = propagator(c, t, method="mp")
            assert rel_diff(S, closed_form_propagator(c, t)) < 1e-9

    def test_precision_warning(self):
        # hyperbolic regime: entries grow like exp(sqrt(chi^2 - theta^2) t) ~ 1e9
        with pytest.warns(PrecisionWarning):
            propagator(Couplings(2.0, 1.0), 12.0, method="expm")

    def test_degenerate_series(self):
        c = Couplings(1.5, 1.5)
        for t in (1e-3, 0.3, 1.0):
            S = scipy.linalg.expm(drift_matrix(c) * t)
            assert rel_diff(closed_form_propagator(c, t), S) < 1e-8

    def test_series_branch_continuity(self):
        c = Couplings(1.0, 1.0 + 1e-9)
        for t in (1e-3, 1.0, 10.0):
            S = scipy.linalg.expm(drift_matrix(c) * t)
            assert rel_diff(closed_form_propagator(c, t), S) < 1e-8

    def test_vectorized(self, ref_couplings):
        ts = np.linspace(0, 1e-2, 5)
        stack = closed_form_propagator(ref_couplings, ts)
        for S, t in zip(stack, ts):
            assert np.array_equal(S, closed_form_propagator(ref_couplings, t))

    def test_ladder_mp_agrees(self, ref_couplings):
        c = ref_couplings
        for x in (1e-3, 1.0, 4.0):
            t = x / c.big_theta
            K = ladder_propagator(c, t)
            with mpmath.workdps(40):
                Km = np.array([[float(v) for v in row] for row in ladder_propagator_mp(c, t)])
            assert rel_diff(K, Km) < 1e-9

    @settings(max_examples=100, deadline=None)
    @given(rates, rates, times)
    def test_closed_form_vs_expm(self, chi, theta, t):
        c = Couplings(chi, theta)
        assert rel_diff(closed_form_propagator(c, t), propagator(c, t, method="expm")) < 1e-9

    @settings(max_examples=50, deadline=None)
    @given(rates, rates, times)
    def test_symplectic_random(self, chi, theta, t):
        assert is_symplectic(closed_form_propagator(Couplings(chi, theta), t))


class TestEvolution:
    @given(st.floats(0, 1e3))
    def test_initial(self, nbar):
        s = evolve_initial(Couplings(0.5, 0.7), nbar, 0.0)
        assert np.allclose(s.cov, np.diag([0.5, 0.5, nbar + 0.5, nbar + 0.5, 0.5, 0.5]))
        assert np.array_equal(s.mean, np.zeros(6))

    @settings(deadline=None)
    @given(rates, rates, times)
    def test_purity_at_zero_temperature(self, chi, theta, t):
        s = evolve_initial(Couplings(chi, theta), 0.0, t)
        nu = s.symplectic_eigenvalues()
        assert np.allclose(nu, 0.5, atol=1e-9 * max(1.0, np.max(np.abs(s.cov))))

    def test_purity_reference(self, ref_couplings):
        c = ref_couplings
        s = evolve_initial(c, 0.0, 1e-3 / c.big_theta)
        assert np.allclose(s.symplectic_eigenvalues(), 0.5, atol=1e-9)

    @settings(deadline=None)
    @given(rates, times, st.floats(0, 1e3))
    def test_parametric_manley_rowe(self, chi, t, nbar):
        A, B, _ = occupations(evolve_initial(Couplings(chi, 0.0), nbar, t).cov)
        assert A - B == pytest.approx(-nbar, abs=1e-9 * max(1.0, A))

    @settings(deadline=None)
    @given(rates, times, st.floats(0, 1e3))
    def test_beam_splitter_manley_rowe(self, theta, t, nbar):
        A, B, E = occupations(evolve_initial(Couplings(0.0, theta), nbar, t).cov)
        assert B + E == pytest.approx(nbar, abs=1e-9 * max(1.0, nbar))
        assert A == pytest.approx(0.0, abs=1e-12)

    def test_method_equivalence(self):
        c = Couplings(0.6, 0.9)
        a = evolve_initial(c, 2.0, 1.3)
        b = evolve_initial(c, 2.0, 1.3, method="expm")
        assert a.allclose(b, rtol=1e-10, atol=1e-12)

    def test_vectorized_covariances(self, ref_couplings):
        c = ref_couplings
        ts = np.array([0.0, 1e-3, 0.1]) / c.big_theta
        V = evolved_covariances(c, 10.0, ts)
        for Vi, t in zip(V, ts):
            assert np.allclose(Vi, evolve_initial(c, 10.0, t).cov, rtol=1e-12, atol=1e-12)
