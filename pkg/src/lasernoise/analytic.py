"""Closed-form linewidth baselines at the mean-field steady state.

Above threshold the line is set by phase diffusion from spontaneous emission
into the mode,

    FWHM = gamma_r * n_e_bar * (1 + alpha^2) / (2 * n_a_bar),

the Schawlow-Townes form with the Henry index-fluctuation enhancement.
Below threshold the line is the gain-narrowed cold-cavity width
kappa - G with G = gamma_r*(2*n_e_bar - n0).  Both are asymptotic anchors:
no closed form is claimed through the threshold transition itself, where the
stochastic engine is the reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ratemodel import LaserParams, gamma_r, steady_state

__all__ = ["AnalyticLinewidth", "schawlow_townes", "below_threshold_reference"]


@dataclass(frozen=True)
class AnalyticLinewidth:
    fwhm: float        # angular FWHM [1/ps]
    r_sp: float        # spontaneous rate into the mode, gamma_r * n_e_bar
    n_a_bar: float
    alpha: float


def schawlow_townes(params: LaserParams) -> AnalyticLinewidth:
    """Phase-diffusion FWHM = R_sp (1 + alpha^2) / (2 n_a_bar) at steady state."""
    state = steady_state(params)
    if state.n_a <= 0.0:
        raise ValueError("steady-state photon number is zero; "
                         "phase-diffusion linewidth undefined")
    r_sp = gamma_r(params) * state.n_e
    fwhm = r_sp * (1.0 + params.alpha ** 2) / (2.0 * state.n_a)
    return AnalyticLinewidth(fwhm=fwhm, r_sp=r_sp, n_a_bar=state.n_a,
                             alpha=params.alpha)


def below_threshold_reference(params: LaserParams) -> float:
    """Photon-lifetime-dominated width kappa - G at the steady state.

    Stationarity of the photon equation makes kappa - G = gamma_r*n_e/n_a,
    so the value is positive for any pumped steady state; a non-positive
    result would mean gain above loss, where this reference does not apply.
    """
    state = steady_state(params)
    width = params.kappa - gamma_r(params) * (2.0 * state.n_e - params.n0)
    if width <= 0.0:
        raise ValueError("net gain reaches the cavity loss; photon-lifetime "
                         "reference not applicable above threshold")
    return width
