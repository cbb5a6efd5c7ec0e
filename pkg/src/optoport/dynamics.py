"""Radiation-pressure coupling constants and the three-mode Gaussian dynamics.

The effective interaction between the Stokes sideband ``a1``, the mirror mode
``b`` and the anti-Stokes sideband ``a2`` is

    H = -i chi (a1 b - a1^dag b^dag) - i theta (a2 b^dag - a2^dag b),   hbar = 1.

Heisenberg equations, ``dO/dt = i[H, O]``::

    [H, a1] = -i chi b^dag                  ->  da1/dt = chi b^dag
    [H, b]  = -i chi a1^dag + i theta a2    ->  db/dt  = chi a1^dag - theta a2
    [H, a2] = -i theta b                    ->  da2/dt = theta b

(using ``[a1^dag b^dag, a1] = -b^dag``, ``[a2 b^dag, b] = -a2`` and
``[a2^dag b, a2] = -b``). The triple ``u = (a1, b^dag, a2^dag)`` is closed:
``du/dt = M u`` with ``M = [[0, chi, 0], [chi, 0, -theta], [0, theta, 0]]``.
``M`` has eigenvalues ``0, +-i Theta``, ``Theta^2 = theta^2 - chi^2``, and
``M^3 = -Theta^2 M``, so ``exp(M t) = I + sin(Theta t)/Theta M +
(1 - cos(Theta t))/Theta^2 M^2`` exactly; the motion is periodic in
``2 pi / Theta`` with no secular growth.

Frequencies quoted in Hz for the laser/mirror parameters are used directly as
angular frequencies (rad/s).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import mpmath
import numpy as np
import scipy.linalg
from scipy import constants

from .gaussian import GaussianState, apply_symplectic, make_thermal, make_vacuum, tensor

HBAR = constants.hbar
K_B = constants.k
C_LIGHT = constants.c

# ladder ordering (a1, b^dag, a2^dag): sign of the P quadrature relative to the ladder operator
_CONJ = np.array([1.0, -1.0, -1.0])
ENTRY_WARN = 1e8


class PrecisionWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class PhysicalParams:
    """Laser and mirror parameters, SI units, angular frequencies in rad/s.

    Either ``temperature`` (K) or ``nbar`` sets the initial mirror occupation;
    ``damping`` (mechanical gamma_m, 1/s) only enters timing estimates.
    """

    power: float = 10.0
    carrier: float = 2e15
    mech_freq: float = 5e8
    mass: float = 1e-10
    det_bandwidth: float = 1e7
    mode_bandwidth: float = 1e3
    incidence: float = 0.0
    temperature: float | None = None
    nbar: float | None = None
    damping: float = 1.0

    def __post_init__(self):
        for name in ("power", "carrier", "mech_freq", "mass", "det_bandwidth", "mode_bandwidth"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if not self.damping >= 0:
            raise ValueError(f"damping must be >= 0, got {self.damping!r}")
        if self.mech_freq >= self.carrier:
            raise ValueError("mechanical frequency must be below the optical carrier")
        if self.det_bandwidth >= self.mech_freq:
            raise ValueError("detection bandwidth must be below the mechanical frequency (RWA)")
        if self.det_bandwidth > self.mech_freq / 10:
            warnings.warn(
                "detection bandwidth above mech_freq/10; rotating-wave approximation is marginal",
                stacklevel=2,
            )
        if self.temperature is not None and self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.nbar is not None and self.nbar < 0:
            raise ValueError("nbar must be >= 0")

    @property
    def stokes_freq(self) -> float:
        return self.carrier - self.mech_freq

    @property
    def anti_stokes_freq(self) -> float:
        return self.carrier + self.mech_freq

    def mean_occupation(self) -> float:
        if self.nbar is not None:
            return float(self.nbar)
        if self.temperature is not None:
            return nbar_from_temperature(self.temperature, self.mech_freq)
        return 0.0

    def with_power(self, power: float) -> "PhysicalParams":
        return replace(self, power=power)


@dataclass(frozen=True)
class Couplings:
    """Parametric rate ``chi`` and beam-splitter rate ``theta`` (rad/s).

    ``gap = theta - chi`` is stored separately because at realistic parameters
    it is seven orders of magnitude smaller than ``chi``; recovering it by
    subtraction would cost ~10 significant digits of ``Theta``.
    """

    chi: float
    theta: float
    gap: float | None = None

    def __post_init__(self):
        if self.gap is None:
            object.__setattr__(self, "gap", float(self.theta) - float(self.chi))
        if self.chi < 0 or self.theta < 0:
            raise ValueError("coupling rates must be non-negative")

    @property
    def theta_sq_minus_chi_sq(self) -> float:
        return self.gap * (self.theta + self.chi)

    @property
    def big_theta(self) -> float:
        g2 = self.theta_sq_minus_chi_sq
        if g2 < 0:
            raise ValueError("theta < chi: the dynamics is hyperbolic and has no frequency Theta")
        return math.sqrt(g2)

    def scaled(self, factor: float) -> "Couplings":
        return Couplings(self.chi * factor, self.theta * factor, self.gap * factor)


def couplings_from_params(p: PhysicalParams) -> Couplings:
    w1 = p.stokes_freq
    chi = math.cos(p.incidence) * math.sqrt(
        p.power * p.det_bandwidth**2 * w1
        / (2.0 * p.mass * p.mode_bandwidth * C_LIGHT**2 * p.mech_freq)
    )
    # sqrt(w2/w1) - 1 without cancellation
    excess = math.expm1(0.5 * math.log1p(2.0 * p.mech_freq / w1))
    return Couplings(chi=chi, theta=chi * (1.0 + excess), gap=chi * excess)


def nbar_from_temperature(temperature: float, mech_freq: float) -> float:
    """Bose-Einstein occupation ``1/(exp(hbar Omega / k_B T) - 1)``."""
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * mech_freq / (K_B * temperature))


def temperature_from_nbar(nbar: float, mech_freq: float) -> float:
    if nbar < 0:
        raise ValueError("nbar must be >= 0")
    if nbar == 0:
        return 0.0
    return HBAR * mech_freq / (K_B * math.log1p(1.0 / nbar))


# -- generators -----------------------------------------------------------------


def ladder_drift(c: Couplings) -> np.ndarray:
    """``M`` with ``d/dt (a1, b^dag, a2^dag) = M (a1, b^dag, a2^dag)``."""
    return np.array(
        [
            [0.0, c.chi, 0.0],
            [c.chi, 0.0, -c.theta],
            [0.0, c.theta, 0.0],
        ]
    )


def ladder_to_quadrature(K: np.ndarray) -> np.ndarray:
    """Quadrature matrix of a real linear map on ``(a1, b^dag, a2^dag)``.

    Row ``i`` of ``K`` expresses ``u_i(t)`` in terms of ``u_j(0)``. Taking
    hermitian parts gives the X rows; P rows pick up a sign ``s_i s_j`` with
    ``s = (+1, -1, -1)`` marking the conjugated operators.
    """
    K = np.asarray(K, dtype=float)
    S = np.zeros(K.shape[:-2] + (6, 6))
    S[..., 0::2, 0::2] = K
    S[..., 1::2, 1::2] = K * np.outer(_CONJ, _CONJ)
    return S


def drift_matrix(c: Couplings) -> np.ndarray:
    """Matrix ``A`` with ``d<v>/dt = A <v>``, ``v = (X_a1, P_a1, X_b, P_b, X_a2, P_a2)``."""
    return ladder_to_quadrature(ladder_drift(c))


def _flow_functions(c: Couplings, t):
    """``sin(Theta t)/Theta``, ``(1 - cos(Theta t))/Theta^2`` and ``cos(Theta t)``.

    Continued analytically to ``Theta^2 <= 0`` (hyperbolic and degenerate cases).
    """
    t = np.asarray(t, dtype=float)
    g2 = c.theta_sq_minus_chi_sq
    k = math.sqrt(abs(g2))
    x = k * t
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    ks = k if k > 0 else 1.0
    # series in x^2 = -Theta^2 t^2 * sign; exact branches elsewhere
    sgn = 1.0 if g2 >= 0 else -1.0
    sin_series = t * (1 - sgn * x**2 / 6 + x**4 / 120)
    omc_series = t**2 / 2 * (1 - sgn * x**2 / 12 + x**4 / 360)
    if g2 >= 0:
        sin_over = np.where(small, sin_series, np.sin(xs) / ks)
        one_minus_cos = np.where(small, omc_series, 2 * np.sin(xs / 2) ** 2 / ks**2)
        cos = np.cos(x)
    else:
        sin_over = np.where(small, sin_series, np.sinh(xs) / ks)
        one_minus_cos = np.where(small, omc_series, 2 * np.sinh(xs / 2) ** 2 / ks**2)
        cos = np.cosh(x)
    return sin_over, one_minus_cos, cos


def ladder_propagator(c: Couplings, t) -> np.ndarray:
    """Closed-form ``K(t) = exp(M t)`` on ``(a1, b^dag, a2^dag)``; vectorized over ``t``::

        a1(t)     = (1 + chi^2 f) a1 + chi s b^dag - chi theta f a2^dag
        b^dag(t)  = chi s a1 + cos(Theta t) b^dag - theta s a2^dag
        a2^dag(t) = chi theta f a1 + theta s b^dag + (1 - theta^2 f) a2^dag

    with ``s = sin(Theta t)/Theta`` and ``f = (1 - cos(Theta t))/Theta^2``.
    """
    s, f, co = _flow_functions(c, t)
    chi, th = c.chi, c.theta
    K = np.empty(np.shape(s) + (3, 3))
    K[..., 0, 0] = 1 + chi * chi * f
    K[..., 0, 1] = chi * s
    K[..., 0, 2] = -chi * th * f
    K[..., 1, 0] = chi * s
    K[..., 1, 1] = co
    K[..., 1, 2] = -th * s
    K[..., 2, 0] = chi * th * f
    K[..., 2, 1] = th * s
    K[..., 2, 2] = 1 - th * th * f
    return K


def closed_form_propagator(c: Couplings, t) -> np.ndarray:
    """Analytic quadrature propagator ``S(t)``; vectorized over ``t``."""
    return ladder_to_quadrature(ladder_propagator(c, t))


def stiffness(c: Couplings, t: float) -> float:
    """``|A| t``: the norm the matrix exponential has to fight through."""
    return float(np.max(np.abs(drift_matrix(c)))) * abs(t) * 6


def _expm_mp(A: np.ndarray, t: float, dps: int) -> np.ndarray:
    with mpmath.workdps(dps):
        M = mpmath.matrix(A.tolist()) * mpmath.mpf(t)
        E = mpmath.expm(M)
        return np.array([[float(E[i, j]) for j in range(E.cols)] for i in range(E.rows)])


def propagator(c: Couplings, t: float, method: str = "auto") -> np.ndarray:
    """Symplectic propagator ``S(t) = exp(A t)`` by direct matrix exponentiation.

    ``method="expm"`` uses double-precision scaling-and-squaring; ``"mp"`` runs
    the exponential in extended precision (mpmath) and rounds the result.
    ``"auto"`` picks ``expm`` when ``|A| t`` is small and ``mp`` otherwise:
    at realistic parameters ``|A| t`` reaches 10^4 while the entries of
    ``S`` stay at 10^6, and double-precision squaring loses every digit.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    A = drift_matrix(c)
    stiff = stiffness(c, t)
    if method == "auto":
        method = "expm" if stiff < 200 else "mp"
    if method == "expm":
        S = scipy.linalg.expm(A * t)
    elif method == "mp":
        dps = 30 + int(2 * math.log10(max(stiff, 1.0)))
        S = _expm_mp(A, t, dps)
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.max(np.abs(S)) > ENTRY_WARN:
        warnings.warn(
            f"propagator entries reach {np.max(np.abs(S)):.2e}; covariances lose precision",
            PrecisionWarning,
            stacklevel=2,
        )
    return S


def initial_state(nbar: float) -> GaussianState:
    """Sidebands in vacuum, mirror thermal; mode order ``(a1, b, a2)``."""
    return tensor(make_vacuum(1), make_thermal(nbar), make_vacuum(1))


def evolve_initial(c: Couplings, nbar: float, t: float, method: str = "closed") -> GaussianState:
    """Three-mode state ``(a1, b, a2)`` after an interaction time ``t``.

    ``method="closed"`` (default) uses the analytic propagator; any
    :func:`propagator` method name is accepted as well.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    S = closed_form_propagator(c, t) if method == "closed" else propagator(c, t, method)
    return apply_symplectic(initial_state(nbar), S, check=False)


def evolved_covariances(c: Couplings, nbar: float, t) -> np.ndarray:
    """Covariance matrices ``S(t) V0 S(t)^T`` for an array of times, shape ``(..., 6, 6)``."""
    S = closed_form_propagator(c, t)
    v0 = np.array([0.5, 0.5, nbar + 0.5, nbar + 0.5, 0.5, 0.5])
    V = np.einsum("...ik,k,...jk->...ij", S, v0, S)
    return 0.5 * (V + np.swapaxes(V, -1, -2))


def ladder_propagator_mp(c: Couplings, t: float) -> list[list]:
    """:func:`ladder_propagator` evaluated in the current mpmath precision.

    The float inputs (``chi``, ``gap``, ``t``) are taken as exact binary values,
    so results agree with the double-precision version to its rounding error.
    """
    chi = mpmath.mpf(c.chi)
    gap = mpmath.mpf(c.gap)
    th = chi + gap
    g2 = gap * (th + chi)
    t = mpmath.mpf(t)
    if g2 > 0:
        k = mpmath.sqrt(g2)
        s = mpmath.sin(k * t) / k
        f = 2 * mpmath.sin(k * t / 2) ** 2 / g2
        co = mpmath.cos(k * t)
    elif g2 < 0:
        k = mpmath.sqrt(-g2)
        s = mpmath.sinh(k * t) / k
        f = -2 * mpmath.sinh(k * t / 2) ** 2 / g2
        co = mpmath.cosh(k * t)
    else:
        s, f, co = t, t * t / 2, mpmath.mpf(1)
    return [
        [1 + chi * chi * f, chi * s, -chi * th * f],
        [chi * s, co, -th * s],
        [chi * th * f, th * s, 1 - th * th * f],
    ]
