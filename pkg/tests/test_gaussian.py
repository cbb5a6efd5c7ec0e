import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optoport.gaussian import (
    DegenerateMeasurementWarning,
    GaussianState,
    GaussianStateError,
    NotSymplecticError,
    apply_symplectic,
    beam_splitter,
    displace,
    embed,
    heterodyne_condition,
    heterodyne_outcome_law,
    heterodyne_sample,
    homodyne_condition,
    log_negativity,
    make_coherent,
    make_thermal,
    make_vacuum,
    overlap_with_pure_gaussian,
    partial_trace,
    rotation,
    symplectic_form,
    tensor,
    two_mode_squeezing,
)

nbars = st.floats(0, 1e3, allow_nan=False)
amps = st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False)


def random_symplectic(rng, n):
    """Product of random rotations, squeezers and mixers."""
    S = np.eye(2 * n)
    for _ in range(3):
        for m in range(n):
            S = embed(rotation(rng.uniform(0, 2 * np.pi)), [m], n) @ S
        for m in range(n - 1):
            S = embed(two_mode_squeezing(rng.uniform(-1, 1)), [m, m + 1], n) @ S
            S = beam_splitter(n, m, m + 1) @ S
    return S


def random_state(rng, n, nbar_max=3.0):
    base = tensor(*(make_thermal(rng.uniform(0, nbar_max)) for _ in range(n)))
    s = apply_symplectic(base, random_symplectic(rng, n))
    return GaussianState(rng.normal(size=2 * n), s.cov)


class TestConstructors:
    def test_vacuum_single(self):
        v = make_vacuum(1)
        assert np.array_equal(v.mean, [0, 0])
        assert np.array_equal(v.cov, np.diag([0.5, 0.5]))

    def test_vacuum_three_modes(self):
        assert np.array_equal(make_vacuum(3).cov, 0.5 * np.eye(6))

    def test_vacuum_is_physical_and_pure(self):
        v = make_vacuum(2)
        assert v.is_physical()
        assert np.allclose(v.symplectic_eigenvalues(), 0.5)

    def test_zero_modes_rejected(self):
        with pytest.raises(GaussianStateError):
            make_vacuum(0)

    def test_thermal(self):
        assert make_thermal(0).allclose(make_vacuum(1))
        assert np.array_equal(make_thermal(1).cov, np.diag([1.5, 1.5]))
        assert make_thermal(1e3).symplectic_eigenvalues() == pytest.approx([1000.5], rel=1e-12)

    def test_negative_thermal_rejected(self):
        with pytest.raises(GaussianStateError):
            make_thermal(-0.1)

    @pytest.mark.parametrize(
        "alpha, mean", [(0, (0, 0)), (1, (math.sqrt(2), 0)), (1j, (0, math.sqrt(2)))]
    )
    def test_coherent_mean_convention(self, alpha, mean):
        s = make_coherent(alpha)
        assert np.allclose(s.mean, mean, atol=1e-15)
        assert np.array_equal(s.cov, 0.5 * np.eye(2))

    def test_asymmetric_covariance_rejected(self):
        with pytest.raises(GaussianStateError):
            GaussianState(np.zeros(2), np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_nonfinite_rejected(self):
        with pytest.raises(GaussianStateError):
            GaussianState(np.zeros(2), np.array([[np.inf, 0], [0, 1.0]]))

    def test_state_is_immutable(self):
        s = make_vacuum(1)
        with pytest.raises(ValueError):
            s.cov[0, 0] = 3.0

    def test_unphysical_detected(self):
        assert not GaussianState(np.zeros(2), 0.3 * np.eye(2)).is_physical()


class TestTensorAndTrace:
    def test_vacuum_product(self):
        assert tensor(make_vacuum(1), make_vacuum(1)).allclose(make_vacuum(2))

    @given(nbars)
    def test_thermal_vacuum(self, n):
        s = tensor(make_thermal(n), make_vacuum(1))
        assert np.allclose(s.cov, np.diag([n + 0.5, n + 0.5, 0.5, 0.5]))
        assert s.is_physical()

    def test_trace_keep_all_is_identity(self, rng):
        s = random_state(rng, 3)
        assert partial_trace(s, [0, 1, 2]).allclose(s)

    def test_trace_out_a2(self):
        s = tensor(make_vacuum(1), make_thermal(7.0), make_vacuum(1))
        assert np.allclose(partial_trace(s, [0, 1]).cov, np.diag([0.5, 0.5, 7.5, 7.5]))

    def test_trace_preserves_physicality(self, rng):
        for _ in range(10):
            s = random_state(rng, 3)
            assert partial_trace(s, [2, 0]).is_physical()

    def test_trace_rejects_bad_modes(self, rng):
        s = random_state(rng, 2)
        with pytest.raises(GaussianStateError):
            partial_trace(s, [])
        with pytest.raises(GaussianStateError):
            partial_trace(s, [0, 0])
        with pytest.raises(GaussianStateError):
            partial_trace(s, [2])


class TestDisplace:
    def test_vacuum_to_coherent(self):
        assert displace(make_vacuum(1), 0, math.sqrt(2), 0).allclose(make_coherent(1))

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_displacements_commute_and_add(self, a, b, c, d):
        s = make_thermal(1.0)
        one = displace(displace(s, 0, a, b), 0, c, d)
        two = displace(displace(s, 0, c, d), 0, a, b)
        assert np.allclose(one.mean, two.mean)
        assert np.allclose(one.mean, [a + c, b + d])

    def test_covariance_bitwise_unchanged(self, rng):
        s = random_state(rng, 2)
        assert np.array_equal(displace(s, 1, 0.3, -2.0).cov, s.cov)

    def test_bad_mode(self):
        with pytest.raises(GaussianStateError):
            displace(make_vacuum(1), 1, 0, 0)


class TestSymplectic:
    def test_identity(self, rng):
        s = random_state(rng, 2)
        assert apply_symplectic(s, np.eye(4)).allclose(s)

    @given(st.floats(0, 2 * math.pi))
    def test_rotation_leaves_vacuum(self, phi):
        assert apply_symplectic(make_vacuum(1), rotation(phi)).allclose(make_vacuum(1))

    @given(st.floats(-2, 2))
    def test_two_mode_squeezing_keeps_purity(self, r):
        s = apply_symplectic(make_vacuum(2), two_mode_squeezing(r))
        assert np.allclose(s.symplectic_eigenvalues(), 0.5, atol=1e-9)

    def test_non_symplectic_rejected_with_defect(self):
        with pytest.raises(NotSymplecticError, match="defect"):
            apply_symplectic(make_vacuum(1), np.diag([2.0, 2.0]))

    def test_invariance_of_symplectic_spectrum(self, rng):
        for _ in range(20):
            s = random_state(rng, 3)
            S = random_symplectic(rng, 3)
            out = apply_symplectic(s, S)
            assert np.allclose(out.symplectic_eigenvalues(), s.symplectic_eigenvalues(), atol=1e-9)
            assert out.is_physical()

    def test_building_blocks_are_symplectic(self):
        om = symplectic_form(2)
        for S in (two_mode_squeezing(0.7), beam_splitter(2, 0, 1), embed(rotation(0.3), [1], 2)):
            assert np.allclose(S @ om @ S.T, om)


class TestHeterodyne:
    def test_product_state_untouched(self):
        s = tensor(make_thermal(2.0), make_vacuum(1))
        post = heterodyne_condition(s, 1, 0.7 - 0.2j)
        assert post.allclose(make_thermal(2.0))

    def test_vacuum_outcome_law(self):
        m, G = heterodyne_outcome_law(make_vacuum(2), 1)
        assert np.allclose(m, 0)
        assert np.allclose(G, np.eye(2))

    def test_posterior_covariance_independent_of_outcome(self, rng):
        s = random_state(rng, 3)
        covs = [heterodyne_condition(s, 2, complex(*rng.normal(size=2) * 3)).cov for _ in range(10)]
        for c in covs[1:]:
            assert np.max(np.abs(c - covs[0])) < 1e-12

    def test_sample_deterministic(self):
        s = tensor(make_thermal(1.0), make_vacuum(1))
        a1, _ = heterodyne_sample(s, 1, np.random.default_rng(3))
        a2, _ = heterodyne_sample(s, 1, np.random.default_rng(3))
        assert a1 == a2

    def test_posterior_matches_condition(self, rng):
        s = random_state(rng, 2)
        alpha, post = heterodyne_sample(s, 0, rng)
        assert post.allclose(heterodyne_condition(s, 0, alpha), rtol=0, atol=0)

    def test_vacuum_sample_covariance(self):
        s = tensor(make_vacuum(1), make_vacuum(1))
        rng = np.random.default_rng(99)
        n = 100_000
        m, G = heterodyne_outcome_law(s, 0)
        xs = rng.multivariate_normal(m, G, size=n, method="cholesky")
        C = np.cov(xs.T)
        # standard error of a sample variance of a unit Gaussian is sqrt(2/n)
        se = math.sqrt(2 / n)
        assert abs(C[0, 0] - 1) < 3 * se and abs(C[1, 1] - 1) < 3 * se
        assert abs(C[0, 1]) < 3 / math.sqrt(n)

    def test_law_of_total_covariance(self):
        rng = np.random.default_rng(5)
        s = random_state(rng, 2, nbar_max=1.0)
        n = 100_000
        m, G = heterodyne_outcome_law(s, 1)
        ys = rng.multivariate_normal(m, G, size=n, method="cholesky")
        post_cov = heterodyne_condition(s, 1, 0).cov
        means = np.array([heterodyne_condition(s, 1, complex(*y) / math.sqrt(2)).mean for y in ys[:20000]])
        recon = post_cov + np.cov(means.T)
        prior = s.mode_cov(0)
        # entries are O(1); sample covariance error ~ |V| sqrt(2/n) at n = 2e4
        tol = 3 * np.max(np.abs(prior)) * math.sqrt(2 / means.shape[0])
        assert np.max(np.abs(recon - prior)) < tol
        assert np.allclose(means.mean(axis=0), s.mode_mean(0), atol=tol)


class TestHomodyne:
    def test_product_state_spectator(self):
        s = tensor(make_thermal(3.0), make_coherent(1 + 1j))
        post = homodyne_condition(s, 1, "x", 0.4)
        assert post.allclose(make_thermal(3.0))

    def test_epr_collapse(self):
        s = apply_symplectic(make_vacuum(2), two_mode_squeezing(1.0))
        post = homodyne_condition(s, 0, "x", 0.2)
        assert post.cov[0, 0] < s.cov[2, 2]
        assert post.cov[0, 0] == pytest.approx(0.5 / math.cosh(2.0), rel=1e-9)

    def test_idempotent(self, rng):
        s = random_state(rng, 2)
        once = homodyne_condition(s, 0, "p", 0.3, keep_mode=True)
        with pytest.warns(DegenerateMeasurementWarning):
            twice = homodyne_condition(once, 0, "p", 0.3, keep_mode=True)
        assert np.allclose(once.cov, twice.cov, atol=1e-12)
        assert np.allclose(once.mean, twice.mean, atol=1e-12)

    def test_degenerate_flagged(self, rng):
        s = homodyne_condition(random_state(rng, 2), 0, "x", 0.0, keep_mode=True)
        with pytest.warns(DegenerateMeasurementWarning):
            homodyne_condition(s, 0, "x", 0.0, keep_mode=True)

    def test_bad_quadrature(self):
        with pytest.raises(GaussianStateError):
            homodyne_condition(make_vacuum(2), 0, "q", 0.0)


class TestOverlap:
    @given(amps)
    def test_identical_coherent(self, a):
        s = make_coherent(a)
        assert overlap_with_pure_gaussian(s, s) == pytest.approx(1.0, abs=1e-12)

    @given(amps, st.floats(0, 100))
    def test_added_noise(self, a, N):
        s = make_coherent(a)
        out = GaussianState(s.mean, s.cov + N * np.eye(2))
        assert overlap_with_pure_gaussian(s, out) == pytest.approx(1 / (1 + N), rel=1e-12)

    def test_far_apart(self):
        assert overlap_with_pure_gaussian(make_coherent(0), make_coherent(10)) < 1e-10

    @settings(max_examples=50)
    @given(amps, amps)
    def test_symmetric_for_pure(self, a, b):
        x, y = make_coherent(a), make_coherent(b)
        assert overlap_with_pure_gaussian(x, y) == pytest.approx(overlap_with_pure_gaussian(y, x), abs=1e-15)

    def test_coherent_overlap_formula(self):
        a, b = 0.3 + 0.1j, -0.5 + 0.7j
        assert overlap_with_pure_gaussian(make_coherent(a), make_coherent(b)) == pytest.approx(
            math.exp(-abs(a - b) ** 2), rel=1e-12
        )

    def test_mixed_reference_rejected(self):
        with pytest.raises(GaussianStateError):
            overlap_with_pure_gaussian(make_thermal(1.0), make_vacuum(1))


class TestLogNegativity:
    def test_vacuum_product(self):
        assert log_negativity(make_vacuum(2)) == 0.0

    @given(st.floats(0, 2))
    def test_two_mode_squeezed(self, r):
        s = apply_symplectic(make_vacuum(2), two_mode_squeezing(r))
        assert log_negativity(s) == pytest.approx(2 * r / math.log(2), abs=1e-9)

    @given(nbars, nbars)
    def test_thermal_product(self, a, b):
        assert log_negativity(tensor(make_thermal(a), make_thermal(b))) == 0.0

    def test_wrong_mode_count(self):
        with pytest.raises(GaussianStateError):
            log_negativity(make_vacuum(3))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pipeline_preserves_physicality(seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, 3)
    s = apply_symplectic(s, random_symplectic(rng, 3))
    s = heterodyne_condition(s, 2, complex(*rng.normal(size=2)))
    s = displace(s, 0, *rng.normal(size=2))
    assert s.is_physical()
    assert partial_trace(s, [1]).is_physical()
