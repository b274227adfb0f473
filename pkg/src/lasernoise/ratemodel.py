"""Mean-field rate-equation model of a nanolaser.

Photon number n_a and excited-emitter number n_e evolve as

    dn_a/dt = gamma_r*(2*n_e - n0)*n_a + gamma_r*n_e - kappa*n_a
    dn_e/dt = P*(n0 - n_e) - gamma_r*(2*n_e - n0)*n_a - gamma_r*n_e - gamma_a*n_e

with an emitter-cavity coupling rate

    gamma_r = 4*g^2 / (P + kappa + gamma_d + gamma_a)

obtained by adiabatic elimination of the material polarization, valid while
g < P + kappa + gamma_d + gamma_a.  All rates are per picosecond; P, gamma_a
and gamma_d are per emitter.  This module provides the parameter container,
the deterministic dynamics (fixed-step RK4), the steady state, the inversion
pump and validity diagnostics used by the stochastic engine and by the
analytic linewidth baselines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "LaserParams",
    "MeanFieldState",
    "MeanFieldTrajectory",
    "ValidityReport",
    "gamma_r",
    "mean_field_rhs",
    "integrate_mean_field",
    "steady_state",
    "inversion_pump",
    "validity_check",
    "relaxation_time",
    "default_burn_in",
]


@dataclass(frozen=True)
class LaserParams:
    """Physical configuration of the laser.

    g        light-matter coupling rate [1/ps]
    kappa    cavity decay rate [1/ps]
    gamma_a  non-radiative + non-lasing-mode decay per emitter [1/ps]
    gamma_d  pure dephasing per emitter [1/ps]
    n0       total emitter count (>= 1)
    pump     pump rate per emitter [1/ps]
    alpha    linewidth enhancement factor (>= 0, dimensionless)
    """

    g: float
    kappa: float
    gamma_a: float
    gamma_d: float
    n0: int
    pump: float
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("g", "kappa", "gamma_a", "gamma_d", "pump", "alpha"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if int(self.n0) != self.n0 or self.n0 < 1:
            raise ValueError(f"n0 must be an integer >= 1, got {self.n0!r}")
        object.__setattr__(self, "n0", int(self.n0))

    def with_pump(self, pump: float) -> "LaserParams":
        return replace(self, pump=pump)

    def with_n0(self, n0: int) -> "LaserParams":
        return replace(self, n0=n0)


@dataclass(frozen=True)
class MeanFieldState:
    """Mean photon number and mean excited-emitter number."""

    n_a: float
    n_e: float


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the adiabatic-elimination validity check."""

    valid: bool
    margin: float  # (P + kappa + gamma_d + gamma_a) / g; > 1 means valid


@dataclass(frozen=True)
class MeanFieldTrajectory:
    t: np.ndarray
    n_a: np.ndarray
    n_e: np.ndarray

    @property
    def final(self) -> MeanFieldState:
        return MeanFieldState(float(self.n_a[-1]), float(self.n_e[-1]))


def gamma_r(params: LaserParams) -> float:
    """Emitter-cavity coupling rate 4 g^2 / (P + kappa + gamma_d + gamma_a)."""
    denom = params.pump + params.kappa + params.gamma_d + params.gamma_a
    if denom <= 0.0:
        raise ValueError("gamma_r undefined: P + kappa + gamma_d + gamma_a must be > 0")
    return 4.0 * params.g * params.g / denom


def mean_field_rhs(state: MeanFieldState, params: LaserParams) -> tuple[float, float]:
    """Right-hand sides (dn_a/dt, dn_e/dt) of the rate equations."""
    gr = gamma_r(params)
    n_a, n_e = state.n_a, state.n_e
    net_stim = gr * (2.0 * n_e - params.n0) * n_a
    dn_a = net_stim + gr * n_e - params.kappa * n_a
    dn_e = params.pump * (params.n0 - n_e) - net_stim - gr * n_e - params.gamma_a * n_e
    return dn_a, dn_e


def _max_rate(params: LaserParams) -> float:
    return max(params.pump, params.kappa, params.gamma_a, params.gamma_d,
               gamma_r(params) * params.n0, 1e-12)


def integrate_mean_field(params: LaserParams, init: MeanFieldState,
                         t_end: float, dt: float) -> MeanFieldTrajectory:
    """Integrate the rate equations with fixed-step classical RK4.

    Raises RuntimeError if the solution leaves the physical box
    n_a >= 0, 0 <= n_e <= n0 (the symptom of a too-large step).
    """
    if dt <= 0.0 or t_end < 0.0:
        raise ValueError("need dt > 0 and t_end >= 0")
    n_steps = int(math.ceil(t_end / dt))
    t = np.empty(n_steps + 1)
    na = np.empty(n_steps + 1)
    ne = np.empty(n_steps + 1)
    t[0], na[0], ne[0] = 0.0, init.n_a, init.n_e

    def rhs(y_a, y_e):
        return mean_field_rhs(MeanFieldState(y_a, y_e), params)

    tol = 1e-9 * max(1.0, params.n0)
    y_a, y_e = init.n_a, init.n_e
    for i in range(n_steps):
        h = min(dt, t_end - i * dt)
        k1a, k1e = rhs(y_a, y_e)
        k2a, k2e = rhs(y_a + 0.5 * h * k1a, y_e + 0.5 * h * k1e)
        k3a, k3e = rhs(y_a + 0.5 * h * k2a, y_e + 0.5 * h * k2e)
        k4a, k4e = rhs(y_a + h * k3a, y_e + h * k3e)
        y_a += h * (k1a + 2.0 * k2a + 2.0 * k3a + k4a) / 6.0
        y_e += h * (k1e + 2.0 * k2e + 2.0 * k3e + k4e) / 6.0
        if y_a < -tol or y_e < -tol or y_e > params.n0 + tol:
            raise RuntimeError(
                f"mean-field integration unstable at t={t[i] + h:.6g} "
                f"(n_a={y_a:.6g}, n_e={y_e:.6g}); reduce dt below "
                f"{0.01 / _max_rate(params):.3g} ps")
        t[i + 1] = (i + 1) * dt if (i + 1) < n_steps else t_end
        na[i + 1] = y_a
        ne[i + 1] = y_e
    return MeanFieldTrajectory(t, na, ne)


def steady_state(params: LaserParams) -> MeanFieldState:
    """Physical stationary point of the rate equations.

    Eliminating n_a = gamma_r*n_e / (kappa - G) with G = gamma_r*(2*n_e - n0)
    turns the stationarity conditions into a quadratic in n_e; the root with
    n_a >= 0 and 0 <= n_e <= n0 is returned.  Residuals of both equations are
    verified to < 1e-10 of the throughput scale kappa*n_a + P*n0.
    """
    gr = gamma_r(params)
    P, kap, ga, n0 = params.pump, params.kappa, params.gamma_a, float(params.n0)

    # quadratic a*n_e^2 + b*n_e + c = 0 from (A - B n_e)(C - D n_e) = G*gr*n_e
    a = 2.0 * gr * (P + ga)
    b = -(2.0 * gr * P * n0 + (P + gr + ga) * (kap + gr * n0) - gr * gr * n0)
    c = P * n0 * (kap + gr * n0)

    scale = abs(a) + abs(b) + abs(c)
    if abs(a) <= 1e-14 * scale:
        roots = [] if b == 0.0 else [-c / b]
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            if disc < -1e-12 * b * b:
                raise RuntimeError("no real stationary point (discriminant < 0)")
            disc = 0.0
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        roots = [q / a]
        if q != 0.0:
            roots.append(c / q)

    tol = 1e-9 * max(1.0, n0)
    candidates = []
    for n_e in roots:
        if not (-tol <= n_e <= n0 + tol):
            continue
        loss = kap - gr * (2.0 * n_e - n0)
        if loss <= 0.0:
            continue
        n_a = gr * n_e / loss
        if n_a < -tol:
            continue
        candidates.append(MeanFieldState(max(n_a, 0.0), min(max(n_e, 0.0), n0)))

    if not candidates:
        raise RuntimeError(f"no physical steady state found for {params}")
    if len(candidates) > 1:
        candidates.sort(key=lambda s: s.n_a, reverse=True)
        warnings.warn("degenerate steady-state roots; picking the larger n_a",
                      RuntimeWarning, stacklevel=2)
    state = candidates[0]

    resid = mean_field_rhs(state, params)
    resid_scale = kap * state.n_a + P * n0
    limit = 1e-10 * resid_scale if resid_scale > 0.0 else 1e-14
    if max(abs(resid[0]), abs(resid[1])) > limit:
        raise RuntimeError(f"steady-state residual {resid} exceeds {limit:.3g}")
    return state


def inversion_pump(params: LaserParams, tol: float = 1e-10, max_iter: int = 200) -> float:
    """Pump rate at which the stimulated-emission-free steady state is inverted.

    With negligible photon number, n_e = P*n0/(P + gamma_r + gamma_a), so
    n_e = n0/2 requires P = gamma_r(P) + gamma_a.  Solved by fixed-point
    iteration; gamma_r depends only weakly on P, so this contracts fast.
    """
    P = params.gamma_a + gamma_r(params.with_pump(0.0))
    trace = [P]
    for _ in range(max_iter):
        P_next = params.gamma_a + gamma_r(params.with_pump(P))
        trace.append(P_next)
        if abs(P_next - P) <= tol * (1.0 + abs(P_next)):
            return P_next
        P = P_next
    raise RuntimeError(f"inversion pump iteration did not converge; trace tail "
                       f"{trace[-5:]}")


def validity_check(params: LaserParams) -> ValidityReport:
    """Adiabatic-elimination check g < P + kappa + gamma_d + gamma_a.

    Returns the margin (P + kappa + gamma_d + gamma_a)/g; warns when <= 1.
    """
    denom = params.pump + params.kappa + params.gamma_d + params.gamma_a
    margin = math.inf if params.g == 0.0 else denom / params.g
    valid = margin > 1.0
    if margin <= 1.0:
        warnings.warn(
            f"adiabatic elimination marginal: (P+kappa+gamma_d+gamma_a)/g = "
            f"{margin:.3g} <= 1; rate-equation model unreliable",
            RuntimeWarning, stacklevel=2)
    return ValidityReport(valid=valid, margin=margin)


def relaxation_time(params: LaserParams) -> float:
    """Slowest mean-field relaxation time 1/|Re lambda| at the steady state."""
    state = steady_state(params)
    gr = gamma_r(params)
    n_a, n_e = state.n_a, state.n_e
    jac = np.array([
        [gr * (2.0 * n_e - params.n0) - params.kappa, 2.0 * gr * n_a + gr],
        [-gr * (2.0 * n_e - params.n0),
         -params.pump - 2.0 * gr * n_a - gr - params.gamma_a],
    ])
    eigs = np.linalg.eigvals(jac)
    decay = -eigs.real
    if np.any(decay <= 0.0):
        # stationary point should be attracting; fall back to the slowest rate
        return 1.0 / _max_rate(params)
    return float(1.0 / decay.min())


def default_burn_in(params: LaserParams) -> float:
    """Transient-removal default: ten times the slowest relaxation time."""
    return 10.0 * relaxation_time(params)
