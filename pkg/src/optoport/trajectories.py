"""Monte-Carlo simulation of single teleportation runs.

Each run samples the heterodyne record of ``a2``, the two Bell outcomes and
applies Bob's displacement, all by exact Gaussian conditioning. Nothing here
uses the A..F coefficients except to set the heterodyne gains, so the ensemble
average is an independent estimate of the closed-form fidelity.

Seeding is counter based: trajectory ``k`` of a run with seed ``s`` draws from
``SeedSequence(s, spawn_key=(k,))``. Serial, chunked and parallel execution
therefore produce the same records.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import Couplings, evolve_initial
from .gaussian import (
    GaussianState,
    beam_splitter,
    condition_gaussian,
    displace,
    heterodyne_sample,
    homodyne_condition,
    make_coherent,
    overlap_with_pure_gaussian,
    partial_trace,
    apply_symplectic,
    tensor,
)
from .protocol import SELECTED_VARIANT, SignVariant, displacement_gains, extract_coefficients

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One realized run.

    ``x_plus`` and ``p_minus`` hold the two Bell outcomes. For ``mix = -1``
    variants they are the ``X-`` and ``P+`` readings.
    """

    alpha: complex
    x_plus: float
    p_minus: float
    out_state: GaussianState
    overlap: float


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@functools.lru_cache(maxsize=64)
def _prepared(c: Couplings, nbar: float, t: float, variant: SignVariant):
    st = evolve_initial(c, nbar, t)
    return st, displacement_gains(extract_coefficients(st), variant)


def _bell_indices(mix: int) -> tuple[int, int]:
    # after the mixer: mode 0 carries (in + a1)/sqrt2, mode 1 carries (in - a1)/sqrt2
    return (0, 3) if mix > 0 else (2, 1)


def bell_state(posterior: GaussianState, alpha_in: complex) -> GaussianState:
    """Input mode mixed with ``a1``; mode order ``(in+a1, in-a1, b)``."""
    joint = tensor(make_coherent(alpha_in), posterior)
    return apply_symplectic(joint, beam_splitter(3, 0, 1), check=False)


def bell_measure(
    mixed: GaussianState, variant: SignVariant, rng: np.random.Generator, sequential: bool = False
) -> tuple[float, float, GaussianState]:
    """Sample the two commuting Bell quadratures; returns outcomes and Bob's conditional state.

    The joint draw is the default. ``sequential=True`` samples one homodyne
    after the other, which must give the same law.
    """
    ix, ip = _bell_indices(variant.mix)
    if sequential:
        mx, mp = ix // 2, ip // 2
        xq = float(rng.normal(mixed.mean[ix], np.sqrt(mixed.cov[ix, ix])))
        s1 = homodyne_condition(mixed, mx, "x", xq, keep_mode=True)
        pq = float(rng.normal(s1.mean[ip], np.sqrt(max(s1.cov[ip, ip], 0.0))))
        s2 = homodyne_condition(s1, mp, "p", pq, keep_mode=True)
        return xq, pq, partial_trace(GaussianState(s2.mean, _physical_block(s2.cov)), [2])
    idx = [ix, ip]
    m = mixed.mean[idx]
    G = mixed.cov[np.ix_(idx, idx)]
    xq, pq = rng.multivariate_normal(m, G, method="cholesky")
    mean, cov = condition_gaussian(mixed.mean, mixed.cov, idx, [xq, pq])
    return float(xq), float(pq), GaussianState(mean[4:6], cov[4:6, 4:6])


def _physical_block(cov: np.ndarray) -> np.ndarray:
    # only Bob's block of a keep_mode conditional covariance is a quantum state
    out = cov.copy()
    out[:4, :] = 0.0
    out[:, :4] = 0.0
    out[:4, :4] = 0.5 * np.eye(4)
    return out


def feed_forward(
    bob: GaussianState,
    alpha: complex,
    x_meas: float,
    p_meas: float,
    gains: tuple[float, float],
    variant: SignVariant,
) -> GaussianState:
    gx, gp = gains
    dx = SQRT2 * x_meas + gx * SQRT2 * alpha.real
    dp = -variant.feed * SQRT2 * p_meas + gp * SQRT2 * alpha.imag
    return displace(bob, 0, dx, dp)


def run_trajectory(
    c: Couplings,
    nbar: float,
    t: float,
    alpha_in: complex,
    seed: int,
    index: int = 0,
    variant: SignVariant = SELECTED_VARIANT,
    gains: tuple[float, float] | None = None,
    sequential: bool = False,
) -> TrajectoryRecord:
    """Simulate one run: heterodyne on ``a2``, Bell measurement, displacement of ``b``."""
    st, default_gains = _prepared(c, float(nbar), float(t), variant)
    gains = default_gains if gains is None else gains
    rng = trajectory_rng(seed, index)
    alpha, post = heterodyne_sample(st, 2, rng)
    xq, pq, bob = bell_measure(bell_state(post, alpha_in), variant, rng, sequential)
    out = feed_forward(bob, alpha, xq, pq, gains, variant)
    return TrajectoryRecord(alpha, xq, pq, out, overlap_with_pure_gaussian(make_coherent(alpha_in), out))


def _overlaps(args) -> np.ndarray:
    c, nbar, t, alpha_in, seed, lo, hi, variant, gains = args
    return np.array(
        [run_trajectory(c, nbar, t, alpha_in, seed, k, variant, gains).overlap for k in range(lo, hi)]
    )


def _chunks(n: int, parts: int):
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def trajectory_overlaps(
    c: Couplings,
    nbar: float,
    t: float,
    alpha_in: complex,
    n_traj: int,
    seed: int,
    variant: SignVariant = SELECTED_VARIANT,
    gains: tuple[float, float] | None = None,
    jobs: int = 1,
) -> np.ndarray:
    """Per-trajectory overlaps ordered by trajectory index."""
    tasks = [(c, nbar, t, alpha_in, seed, lo, hi, variant, gains) for lo, hi in _chunks(n_traj, max(jobs, 1) * 4)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_overlaps, tasks))
    else:
        parts = [_overlaps(a) for a in tasks]
    return np.concatenate(parts)


def estimate_fidelity(
    c: Couplings,
    nbar: float,
    t: float,
    alpha_in: complex,
    n_traj: int,
    seed: int,
    variant: SignVariant = SELECTED_VARIANT,
    jobs: int = 1,
) -> tuple[float, float]:
    """Sample mean and standard error of the per-run overlap."""
    if n_traj < 100:
        raise ValueError("n_traj must be at least 100")
    ov = trajectory_overlaps(c, nbar, t, alpha_in, n_traj, seed, variant, jobs=jobs)
    return float(ov.mean()), float(ov.std(ddof=1) / np.sqrt(ov.size))


def conditional_output_mean(
    post: GaussianState,
    alpha: complex,
    alpha_in: complex,
    gains: tuple[float, float],
    variant: SignVariant,
) -> np.ndarray:
    """Bob's final mean given the heterodyne record, averaged over Bell outcomes.

    Unit Bell gains make Bob's quadratures ``X_b + X_in + s X_a1`` and
    ``P_b - f (P_in - s P_a1)`` plus the heterodyne correction.
    """
    s, f = variant.mix, variant.feed
    m = post.mean
    xin = make_coherent(alpha_in).mean
    return np.array(
        [
            m[2] + xin[0] + s * m[0] + gains[0] * SQRT2 * alpha.real,
            m[3] - f * (xin[1] - s * m[1]) + gains[1] * SQRT2 * alpha.imag,
        ]
    )


def mean_transport_check(
    c: Couplings,
    nbar: float,
    t: float,
    alpha_in: complex,
    n_traj: int,
    seed: int,
    variant: SignVariant = SELECTED_VARIANT,
    gains: tuple[float, float] | None = None,
) -> float:
    """Largest ``|E[out mean | alpha] - input mean|`` over sampled heterodyne records.

    Correct gains make Bob's expected mean independent of ``alpha`` and equal
    to the input; any gain error shows up linearly in ``alpha``.
    """
    st, default_gains = _prepared(c, float(nbar), float(t), variant)
    gains = default_gains if gains is None else gains
    target = make_coherent(alpha_in).mean
    worst = 0.0
    for k in range(n_traj):
        alpha, post = heterodyne_sample(st, 2, trajectory_rng(seed, k))
        dev = conditional_output_mean(post, alpha, alpha_in, gains, variant) - target
        worst = max(worst, float(np.max(np.abs(dev))))
    return worst
