"""Power-noise sensitivity of the scaled time and the thermal timing budget."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import PhysicalParams, couplings_from_params

# Reference relation dP/P = d(Theta t) / (2 Theta t), i.e. slope d ln(Theta t)/d ln P = 2.
REFERENCE_SLOPE = 2.0


@dataclass(frozen=True)
class PowerSensitivity:
    rel_step: float
    rel_change: float  # Delta(Theta t)/(Theta t) for a forward step Delta P/P = rel_step
    slope: float  # central-difference d ln(Theta t) / d ln P
    reference_slope: float

    @property
    def discrepancy_factor(self) -> float:
        return self.reference_slope / self.slope


def power_sensitivity(p: PhysicalParams, rel_step: float = 1e-6) -> PowerSensitivity:
    """Finite-difference response of ``Theta t`` (fixed ``t``) to the laser power."""
    base = couplings_from_params(p).big_theta
    up = couplings_from_params(p.with_power(p.power * (1 + rel_step))).big_theta
    down = couplings_from_params(p.with_power(p.power * (1 - rel_step))).big_theta
    slope = (math.log(up) - math.log(down)) / (math.log1p(rel_step) - math.log1p(-rel_step))
    return PowerSensitivity(rel_step, up / base - 1.0, slope, REFERENCE_SLOPE)


def decoherence_time(damping: float, nbar: float) -> float:
    """``1/(gamma_m nbar)``: time for the mirror to absorb one thermal phonon from its bath."""
    rate = damping * nbar
    return math.inf if rate == 0 else 1.0 / rate


@dataclass(frozen=True)
class TimingBudget:
    nbar: float
    decoherence_time: float
    window_time: float  # duration of the F > 1/2 interval
    pulse_time: float  # interaction time at maximum fidelity

    @property
    def pulse_fraction(self) -> float:
        return self.pulse_time / self.decoherence_time
