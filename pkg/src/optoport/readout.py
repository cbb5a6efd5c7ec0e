"""Heisenberg coefficients of the combined sideband mode ``a1(t) - a2^dag(t)``.

Under the three-mode flow the combination stays in the span of
``a1(0), b^dag(0), a2^dag(0)``::

    a1(t) - a2^dag(t) = c_a1 a1(0) + c_b b^dag(0) + c_a2 a2^dag(0)

with, writing ``s = sin(Theta t)/Theta`` and ``f = (1 - cos Theta t)/Theta^2``,

    c_a1 = 1 - chi (theta - chi) f
    c_b  = (chi - theta) s
    c_a2 = -1 + theta (theta - chi) f

The reference closed form kept in :func:`printed_coefficients` differs from
this: its ``a2^dag`` coefficient is ``(theta - chi)/(theta + chi)`` at ``t = 0``
and its ``b^dag`` coefficient carries ``chi + theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Couplings, closed_form_propagator, ladder_propagator


@dataclass(frozen=True)
class ReadoutCoefficients:
    c_b: float
    c_a1: float
    c_a2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c_b, self.c_a1, self.c_a2])


def _flow(c: Couplings, t: float):
    th = c.big_theta
    x = th * t
    s = t if th == 0 else math.sin(x) / th
    f = t * t / 2 if th == 0 else 2 * math.sin(x / 2) ** 2 / (th * th)
    return s, f, math.cos(x)


def readout_coefficients(c: Couplings, t: float, sigma: int = 1) -> ReadoutCoefficients:
    """Coefficients of ``a1(t) - a2^dag(t)``.

    ``sigma = -1`` flips the sign of ``theta`` in the beam-splitter term; that
    flow has the same frequency ``Theta`` and reproduces the ``chi + theta``
    magnitude of the reference ``b^dag`` coefficient.
    """
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    if t < 0:
        raise ValueError("t must be >= 0")
    if sigma == 1:
        K = ladder_propagator(c, t)
        return ReadoutCoefficients(c_b=K[0, 1] - K[2, 1], c_a1=K[0, 0] - K[2, 0], c_a2=K[0, 2] - K[2, 2])
    s, f, _ = _flow(c, t)
    th = -c.theta
    chi = c.chi
    # rows of I + s M + f M^2 for M = [[0, chi, 0], [chi, 0, -th], [0, th, 0]]
    k0 = np.array([1 + chi * chi * f, chi * s, -chi * th * f])
    k2 = np.array([chi * th * f, th * s, 1 - th * th * f])
    d = k0 - k2
    return ReadoutCoefficients(c_b=d[1], c_a1=d[0], c_a2=d[2])


def readout_from_quadratures(c: Couplings, t: float) -> ReadoutCoefficients:
    """Same coefficients read off the quadrature propagator ``S(t)``.

    With ``a = (X + iP)/sqrt2``: the ``a1(0)`` coefficient of ``a1(t)`` is
    ``S[0,0]``, its ``b^dag(0)`` coefficient is ``S[0,2]``, and ``a2^dag(t)``
    has ``a1(0)`` coefficient ``S[4,0]`` etc., all real in this flow.
    """
    S = closed_form_propagator(c, t)
    return ReadoutCoefficients(c_b=S[0, 2] - S[4, 2], c_a1=S[0, 0] - S[4, 0], c_a2=S[0, 4] - S[4, 4])


def printed_coefficients(c: Couplings, t: float) -> ReadoutCoefficients:
    """The reference closed form, evaluated without cancellation.

    ``b^dag``: ``(chi + theta) sin(Theta t)/Theta``;
    ``a1``: ``[theta^2 - chi^2 cos - chi theta + chi theta cos]/Theta^2 = gap (theta + chi cos)/Theta^2``;
    ``a2^dag``: ``-[chi theta + chi theta cos - chi^2 - theta^2 cos]/Theta^2 = -gap (chi - theta cos)/Theta^2``.
    """
    s, f, _ = _flow(c, t)
    g2 = c.theta_sq_minus_chi_sq
    one_minus_cos = f * g2
    gap = c.gap
    a1 = gap * (c.theta + c.chi - c.chi * one_minus_cos) / g2
    a2 = -gap * (-gap + c.theta * one_minus_cos) / g2
    return ReadoutCoefficients(c_b=(c.chi + c.theta) * s, c_a1=a1, c_a2=a2)


def printed_formula_residual(c: Couplings, t: float, sigma: int = 1) -> ReadoutCoefficients:
    """``printed - derived`` per coefficient. Reported, never asserted to vanish."""
    p = printed_coefficients(c, t)
    d = readout_coefficients(c, t, sigma)
    return ReadoutCoefficients(c_b=p.c_b - d.c_b, c_a1=p.c_a1 - d.c_a1, c_a2=p.c_a2 - d.c_a2)


def dominance_condition(c: Couplings) -> float:
    """``theta (theta - chi) / [Theta (theta + chi)]``; the mirror term dominates when this is << 1."""
    return c.theta * c.gap / (c.big_theta * (c.theta + c.chi))
