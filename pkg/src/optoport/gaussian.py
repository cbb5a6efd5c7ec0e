"""Multimode Gaussian states in the quadrature representation.

Conventions used throughout the package:

* hbar = 1 and ``X = (a + a^dag)/sqrt(2)``, ``P = -i(a - a^dag)/sqrt(2)``, so the
  vacuum covariance matrix is ``I/2`` (not ``I`` as in some CV literature).
* Quadratures are interleaved per mode: ``(X1, P1, X2, P2, ...)``.
* Covariance entries are symmetrized second moments,
  ``V_ij = <v_i v_j + v_j v_i>/2 - <v_i><v_j>``.
* A coherent amplitude ``alpha`` maps to the quadrature mean
  ``sqrt(2) * (Re alpha, Im alpha)``. Heterodyne outcomes use the same embedding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SYMMETRY_ATOL = 1e-10
PHYSICALITY_ATOL = 1e-9
# symplectic eigenvalues of large covariances are only known to ~eps * |V|
PHYSICALITY_RTOL = 64 * np.finfo(float).eps
SYMPLECTIC_ATOL = 1e-9
DEGENERATE_VARIANCE = 1e-12

_OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


class GaussianStateError(ValueError):
    """Invalid Gaussian state or operation argument."""


class NotSymplecticError(GaussianStateError):
    pass


class DegenerateMeasurementWarning(RuntimeWarning):
    pass


def symplectic_form(n: int) -> np.ndarray:
    """Block-diagonal symplectic form with blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n), _OMEGA1)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an ``n``-mode Gaussian state.

    Instances are immutable; every operation in this module returns a new state.
    Physicality is not enforced on construction (conditioning on a homodyne
    outcome legitimately produces a singular classical covariance); use
    :meth:`is_physical` to check it.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise GaussianStateError(f"mean must have even, nonzero length, got {mean.size}")
        if cov.shape != (mean.size, mean.size):
            raise GaussianStateError(
                f"cov shape {cov.shape} does not match mean length {mean.size}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise GaussianStateError("mean and cov must be finite")
        scale = max(1.0, float(np.max(np.abs(cov))))
        asym = float(np.max(np.abs(cov - cov.T)))
        if asym > SYMMETRY_ATOL * scale:
            raise GaussianStateError(f"cov is not symmetric (max asymmetry {asym:.3g})")
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "cov", _readonly(0.5 * (cov + cov.T)))

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def mode_mean(self, mode: int) -> np.ndarray:
        return self.mean[2 * mode : 2 * mode + 2]

    def mode_cov(self, mode: int) -> np.ndarray:
        return self.cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2]

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def physicality_defect(self) -> float:
        """How far the smallest symplectic eigenvalue falls below 1/2 (<= 0 if physical)."""
        return 0.5 - float(self.symplectic_eigenvalues().min())

    def is_physical(self, atol: float = PHYSICALITY_ATOL) -> bool:
        scale = float(np.max(np.abs(self.cov)))
        return self.physicality_defect() <= atol + PHYSICALITY_RTOL * scale

    def allclose(self, other: "GaussianState", rtol: float = 1e-9, atol: float = 1e-12) -> bool:
        return (
            self.n_modes == other.n_modes
            and np.allclose(self.mean, other.mean, rtol=rtol, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=rtol, atol=atol)
        )

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes}, mean={self.mean!r}, cov=...)"


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of ``cov`` (ascending, one value per mode)."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ cov))
    return np.sort(ev)[::2]


def quadrature_mean(alpha: complex) -> np.ndarray:
    """Quadrature embedding ``sqrt(2) (Re alpha, Im alpha)`` of a complex amplitude."""
    alpha = complex(alpha)
    return np.sqrt(2.0) * np.array([alpha.real, alpha.imag])


def amplitude(xp: Sequence[float]) -> complex:
    """Inverse of :func:`quadrature_mean`."""
    return complex(xp[0], xp[1]) / np.sqrt(2.0)


# -- constructors -------------------------------------------------------------


def make_vacuum(n: int = 1) -> GaussianState:
    if int(n) != n or n < 1:
        raise GaussianStateError(f"mode count must be a positive integer, got {n!r}")
    n = int(n)
    return GaussianState(np.zeros(2 * n), 0.5 * np.eye(2 * n))


def make_thermal(nbar: float) -> GaussianState:
    if not nbar >= 0:
        raise GaussianStateError(f"mean occupation must be >= 0, got {nbar!r}")
    return GaussianState(np.zeros(2), (nbar + 0.5) * np.eye(2))


def make_coherent(alpha: complex) -> GaussianState:
    return GaussianState(quadrature_mean(alpha), 0.5 * np.eye(2))


def tensor(*states: GaussianState) -> GaussianState:
    """Product state; modes are concatenated in argument order."""
    if not states:
        raise GaussianStateError("tensor() needs at least one state")
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((mean.size, mean.size))
    i = 0
    for s in states:
        k = s.mean.size
        cov[i : i + k, i : i + k] = s.cov
        i += k
    return GaussianState(mean, cov)


# -- Gaussian unitaries -------------------------------------------------------


def _check_mode(s: GaussianState, mode: int) -> int:
    if not 0 <= mode < s.n_modes:
        raise GaussianStateError(f"mode {mode} out of range for {s.n_modes}-mode state")
    return int(mode)


def displace(s: GaussianState, mode: int, dx: float, dp: float) -> GaussianState:
    """Phase-space translation of one mode; the covariance is passed through untouched."""
    mode = _check_mode(s, mode)
    mean = s.mean.copy()
    mean[2 * mode] += dx
    mean[2 * mode + 1] += dp
    return GaussianState(mean, s.cov)


def symplectic_defect(S: np.ndarray) -> float:
    """``max |S Omega S^T - Omega|`` for a square ``2n x 2n`` matrix."""
    S = np.asarray(S, dtype=float)
    om = symplectic_form(S.shape[0] // 2)
    return float(np.max(np.abs(S @ om @ S.T - om)))


def is_symplectic(S: np.ndarray, atol: float = SYMPLECTIC_ATOL) -> bool:
    S = np.asarray(S, dtype=float)
    return symplectic_defect(S) <= atol * max(1.0, float(np.max(np.abs(S))) ** 2)


def apply_symplectic(s: GaussianState, S: np.ndarray, check: bool = True) -> GaussianState:
    """Act with a symplectic matrix: ``mean -> S mean``, ``cov -> S cov S^T``.

    The defect tolerance is scaled by ``max|S|^2`` since that is the size of the
    entries of ``S Omega S^T`` being compared.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != s.cov.shape:
        raise GaussianStateError(f"symplectic matrix shape {S.shape} != {s.cov.shape}")
    if check and not is_symplectic(S):
        raise NotSymplecticError(f"matrix is not symplectic (defect {symplectic_defect(S):.3e})")
    return GaussianState(S @ s.mean, S @ s.cov @ S.T)


def rotation(phi: float) -> np.ndarray:
    """Single-mode phase rotation ``a -> a exp(-i phi)``."""
    c, si = np.cos(phi), np.sin(phi)
    return np.array([[c, si], [-si, c]])


def two_mode_squeezing(r: float) -> np.ndarray:
    """Symplectic matrix of ``exp[r (a1^dag a2^dag - a1 a2)]`` on two modes."""
    ch, sh = np.cosh(r), np.sinh(r)
    z = np.diag([1.0, -1.0])
    return np.block([[ch * np.eye(2), sh * z], [sh * z, ch * np.eye(2)]])


def beam_splitter(n: int, i: int, j: int) -> np.ndarray:
    """Balanced mixer on modes ``i, j`` of ``n``: outputs ``(i+j)/sqrt2`` and ``(i-j)/sqrt2``."""
    S = np.eye(2 * n)
    h = 1.0 / np.sqrt(2.0)
    for q in range(2):
        a, b = 2 * i + q, 2 * j + q
        S[a, a], S[a, b] = h, h
        S[b, a], S[b, b] = h, -h
    return S


def embed(S_local: np.ndarray, modes: Sequence[int], n: int) -> np.ndarray:
    """Embed a symplectic matrix acting on ``modes`` into an ``n``-mode identity."""
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
    S = np.eye(2 * n)
    S[np.ix_(idx, idx)] = S_local
    return S


# -- reductions and measurements ----------------------------------------------


def _mode_indices(modes: Sequence[int]) -> np.ndarray:
    return np.array([q for m in modes for q in (2 * m, 2 * m + 1)], dtype=int)


def partial_trace(s: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Reduced state on ``keep`` (in the given order)."""
    keep = [_check_mode(s, m) for m in keep]
    if not keep:
        raise GaussianStateError("keep must list at least one mode")
    if len(set(keep)) != len(keep):
        raise GaussianStateError(f"duplicate modes in keep={keep}")
    idx = _mode_indices(keep)
    return GaussianState(s.mean[idx], s.cov[np.ix_(idx, idx)])


def condition_gaussian(
    mean: np.ndarray,
    cov: np.ndarray,
    idx: Sequence[int],
    values: Sequence[float],
    noise: np.ndarray | None = None,
    pinv: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Condition a joint Gaussian on noisy observations ``y = v[idx] + noise``.

    Returns the posterior mean and covariance of *all* variables (the observed
    components included). With ``pinv=True`` the innovation covariance is
    pseudo-inverted, which is what a noiseless (homodyne) observation of an
    already-sharp quadrature needs.
    """
    idx = np.asarray(idx, dtype=int)
    values = np.asarray(values, dtype=float)
    G = cov[np.ix_(idx, idx)]
    if noise is not None:
        G = G + noise
    cross = cov[:, idx]
    innov = values - mean[idx]
    if pinv:
        gain = cross @ np.linalg.pinv(G, rcond=1e-15, hermitian=True)
    else:
        gain = np.linalg.solve(G, cross.T).T
    new_mean = mean + gain @ innov
    new_cov = cov - gain @ cross.T
    return new_mean, 0.5 * (new_cov + new_cov.T)


def _drop_mode(mean, cov, mode):
    keep = np.array([q for q in range(mean.size) if q // 2 != mode], dtype=int)
    return GaussianState(mean[keep], cov[np.ix_(keep, keep)])


def heterodyne_condition(s: GaussianState, mode: int, alpha: complex) -> GaussianState:
    """State of the remaining modes after heterodyne detection of ``mode`` with outcome ``alpha``.

    Heterodyne is projection onto a coherent state, i.e. a noisy observation of
    both quadratures with vacuum noise ``I/2`` added. The posterior covariance
    does not depend on ``alpha``.
    """
    mode = _check_mode(s, mode)
    if s.n_modes < 2:
        raise GaussianStateError("heterodyne conditioning needs at least one unmeasured mode")
    idx = [2 * mode, 2 * mode + 1]
    G = s.mode_cov(mode) + 0.5 * np.eye(2)
    if np.linalg.det(G) <= 0:
        raise GaussianStateError("singular heterodyne covariance; the input state is corrupted")
    mean, cov = condition_gaussian(s.mean, s.cov, idx, quadrature_mean(alpha), 0.5 * np.eye(2))
    return _drop_mode(mean, cov, mode)


def heterodyne_outcome_law(s: GaussianState, mode: int) -> tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of the heterodyne outcome ``sqrt2 (Re alpha, Im alpha)``."""
    mode = _check_mode(s, mode)
    return s.mode_mean(mode).copy(), s.mode_cov(mode) + 0.5 * np.eye(2)


def heterodyne_sample(
    s: GaussianState, mode: int, rng: np.random.Generator
) -> tuple[complex, GaussianState]:
    """Draw a heterodyne outcome and return it with the posterior of the other modes."""
    m, G = heterodyne_outcome_law(s, mode)
    xp = rng.multivariate_normal(m, G, method="cholesky")
    alpha = amplitude(xp)
    return alpha, heterodyne_condition(s, mode, alpha)


_QUAD = {"x": 0, "p": 1}


def _quadrature_index(s: GaussianState, mode: int, quadrature: str) -> int:
    try:
        return 2 * mode + _QUAD[quadrature.lower()]
    except (KeyError, AttributeError):
        raise GaussianStateError(f"quadrature must be 'x' or 'p', got {quadrature!r}") from None


def homodyne_condition(
    s: GaussianState, mode: int, quadrature: str, result: float, keep_mode: bool = False
) -> GaussianState:
    """Condition on an ideal homodyne measurement of one quadrature.

    By default the measured mode is removed. ``keep_mode=True`` keeps it, with
    the measured quadrature collapsed to zero variance; that classical
    conditional covariance is not a physical quantum state but makes repeated
    conditioning well defined (and idempotent).
    """
    mode = _check_mode(s, mode)
    q = _quadrature_index(s, mode, quadrature)
    var = s.cov[q, q]
    if var < DEGENERATE_VARIANCE:
        warnings.warn(
            f"measured quadrature variance {var:.3g} is degenerate",
            DegenerateMeasurementWarning,
            stacklevel=2,
        )
    mean, cov = condition_gaussian(s.mean, s.cov, [q], [result], pinv=True)
    if keep_mode:
        return GaussianState(mean, cov)
    if s.n_modes < 2:
        raise GaussianStateError("no modes left after homodyne; pass keep_mode=True")
    return _drop_mode(mean, cov, mode)


def homodyne_sample(
    s: GaussianState, mode: int, quadrature: str, rng: np.random.Generator, keep_mode: bool = False
) -> tuple[float, GaussianState]:
    q = _quadrature_index(s, _check_mode(s, mode), quadrature)
    result = float(rng.normal(s.mean[q], np.sqrt(max(s.cov[q, q], 0.0))))
    return result, homodyne_condition(s, mode, quadrature, result, keep_mode=keep_mode)


# -- figures of merit ---------------------------------------------------------


def overlap_with_pure_gaussian(pure_in: GaussianState, out: GaussianState) -> float:
    """``<psi|rho|psi>`` for a pure single-mode Gaussian ``psi`` and Gaussian ``rho``.

    With the vacuum-1/2 convention this is
    ``exp(-d^T (V_in + V_out)^-1 d / 2) / sqrt(det(V_in + V_out))``;
    two identical pure states give exactly 1.
    """
    if pure_in.n_modes != 1 or out.n_modes != 1:
        raise GaussianStateError("overlap is defined here for single-mode states")
    nu = pure_in.symplectic_eigenvalues()[0]
    if abs(nu - 0.5) > 1e-9:
        raise GaussianStateError(f"reference state is not pure (symplectic eigenvalue {nu:.12g})")
    V = pure_in.cov + out.cov
    d = out.mean - pure_in.mean
    F = np.exp(-0.5 * d @ np.linalg.solve(V, d)) / np.sqrt(np.linalg.det(V))
    return float(min(max(F, 0.0), 1.0))


def log_negativity(s: GaussianState) -> float:
    """Logarithmic negativity (base 2) of a two-mode Gaussian state."""
    if s.n_modes != 2:
        raise GaussianStateError("log_negativity expects a two-mode state")
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    nu = symplectic_eigenvalues(flip @ s.cov @ flip)[0]
    # eigenvalues carry ~eps |V| rounding; do not report that as entanglement
    if nu >= 0.5 - PHYSICALITY_RTOL * max(1.0, float(np.max(np.abs(s.cov)))):
        return 0.0
    return -float(np.log2(2.0 * nu))
