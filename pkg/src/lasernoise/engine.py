"""Event-driven stochastic realization of the laser birth-death process.

The rate equations are read as a continuous-time Markov chain on the integer
pair (n_a, n_e) with six elementary transitions:

    pump                   P*(n0 - n_e)        (n_a, n_e+1)
    spontaneous emission   gamma_r*n_e         (n_a+1, n_e-1)   random-phase kick
    stimulated emission    gamma_r*n_e*n_a     (n_a+1, n_e-1)   phase kept
    stimulated absorption  gamma_r*(n0-n_e)*n_a(n_a-1, n_e+1)   phase kept
    cavity loss            kappa*n_a           (n_a-1, n_e)     phase kept
    non-radiative decay    gamma_a*n_e         (n_a, n_e-1)

sampled exactly (exponential waiting times, rate-proportional selection).
The cavity field is E(t) = sqrt(n_a) * exp(i*phi) in the rotating frame.  A
spontaneous photon adds a unit phasor at a uniform random angle; the summed
field direction becomes the new phase and the amplitude is projected back to
sqrt(n_a + 1).  Between events the phase drifts deterministically by
alpha*gamma_r*n_e*dt (carrier-induced index change), which is exact for the
piecewise-constant n_e of the chain.

simulate() runs a JIT-compiled kernel; simulate_reference() is a slow pure
Python twin built from the public single-step operations.  Both consume the
same PCG64 stream, so for a given seed the event sequence, populations,
dwell times and event counts agree exactly; sampled field values agree to
floating-point rounding (the compiled and interpreted paths may use libm
implementations that differ in the last bit of sin/cos).  The test suite
relies on this to validate the kernel.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .ratemodel import LaserParams, gamma_r

__all__ = [
    "EventKind",
    "SystemState",
    "RateSet",
    "EngineOverrides",
    "FieldTrajectory",
    "event_rates",
    "next_event",
    "apply_event",
    "phase_kick",
    "lef_drift",
    "simulate",
    "simulate_reference",
    "run_ensemble",
]

TWO_PI = 6.283185307179586


class EventKind(enum.IntEnum):
    PUMP = 0
    SPONTANEOUS_EMISSION = 1
    STIMULATED_EMISSION = 2
    STIMULATED_ABSORPTION = 3
    CAVITY_LOSS = 4
    NONRADIATIVE_DECAY = 5


# (d n_a, d n_e) per EventKind value
_EVENT_STEPS = ((0, 1), (1, -1), (1, -1), (-1, 1), (-1, 0), (0, -1))


@dataclass(frozen=True)
class SystemState:
    """Integer populations plus unwrapped field phase at time t [ps]."""

    n_a: int
    n_e: int
    phi: float
    t: float


@dataclass(frozen=True)
class RateSet:
    """The six transition rates [1/ps] at a given state."""

    pump: float
    spontaneous: float
    stimulated: float
    absorption: float
    loss: float
    nonradiative: float

    @property
    def total(self) -> float:
        # fixed left-to-right summation; the kernel accumulates identically
        return ((((self.pump + self.spontaneous) + self.stimulated)
                 + self.absorption) + self.loss) + self.nonradiative

    def as_array(self) -> np.ndarray:
        return np.array([self.pump, self.spontaneous, self.stimulated,
                         self.absorption, self.loss, self.nonradiative])


@dataclass(frozen=True)
class EngineOverrides:
    """Test-harness instrumentation for simulate().

    source_rate injects photons at a constant rate (random phase, emitters
    untouched) -- used to check the decoupled-cavity Poisson statistics.
    disable_spontaneous zeroes the spontaneous channel so the phase evolves
    by LEF drift alone.  initial_n_a/initial_n_e start the chain away from
    vacuum so phase bookkeeping can be probed without spontaneous events.
    """

    source_rate: float = 0.0
    disable_spontaneous: bool = False
    initial_n_a: int = 0
    initial_n_e: int = 0


_NO_OVERRIDES = EngineOverrides()


@dataclass
class FieldTrajectory:
    """Uniformly sampled complex field plus population record.

    samples[k] = sqrt(n_a) * exp(i*phi) at t_k = burn_in + k*sample_dt, with
    populations held from the last event and the phase advanced by the exact
    LEF drift inside the inter-event interval.  dwell_hist[n] is the time
    spent with exactly n photons between burn_in and t_end; event_counts
    holds post-burn-in event totals indexed by EventKind (index 6 = injected
    source events).
    """

    params: LaserParams
    seed: int
    sample_dt: float
    burn_in: float
    t_end: float
    samples: np.ndarray
    n_a: np.ndarray
    n_e: np.ndarray
    event_counts: np.ndarray
    n_events: int
    dwell_hist: np.ndarray
    dwell_total: float

    @property
    def times(self) -> np.ndarray:
        return self.burn_in + self.sample_dt * np.arange(len(self.samples))

    def with_samples(self, samples: np.ndarray) -> "FieldTrajectory":
        return replace(self, samples=samples)


def event_rates(state: SystemState, params: LaserParams,
                overrides: EngineOverrides = _NO_OVERRIDES) -> RateSet:
    """The six transition rates at `state`.

    stimulated - absorption reproduces the net gain term
    gamma_r*(2*n_e - n0)*n_a of the rate equations exactly.
    """
    if state.n_a < 0 or not (0 <= state.n_e <= params.n0):
        raise ValueError(f"state out of bounds: {state}")
    gr = gamma_r(params)
    spon = 0.0 if overrides.disable_spontaneous else gr * state.n_e
    return RateSet(
        pump=params.pump * (params.n0 - state.n_e),
        spontaneous=spon,
        stimulated=gr * state.n_e * state.n_a,
        absorption=gr * (params.n0 - state.n_e) * state.n_a,
        loss=params.kappa * state.n_a,
        nonradiative=params.gamma_a * state.n_e,
    )


def next_event(state: SystemState, params: LaserParams,
               rng: np.random.Generator) -> tuple[float, EventKind | None]:
    """Draw (waiting time, event kind) for one exact SSA step.

    Returns (inf, None) from an absorbing state (total rate zero).
    """
    rates = event_rates(state, params)
    total = rates.total
    if total <= 0.0:
        return math.inf, None
    dt = rng.standard_exponential() / total
    u = rng.random() * total
    c = rates.pump
    if u < c:
        return dt, EventKind.PUMP
    c += rates.spontaneous
    if u < c:
        return dt, EventKind.SPONTANEOUS_EMISSION
    c += rates.stimulated
    if u < c:
        return dt, EventKind.STIMULATED_EMISSION
    c += rates.absorption
    if u < c:
        return dt, EventKind.STIMULATED_ABSORPTION
    c += rates.loss
    if u < c:
        return dt, EventKind.CAVITY_LOSS
    return dt, EventKind.NONRADIATIVE_DECAY


def phase_kick(n_a: int, phi: float, theta: float) -> float:
    """Phase after adding a unit phasor at angle theta to a field sqrt(n_a)*e^{i phi}.

    Returns arg(sqrt(n_a)*e^{i phi} + e^{i theta}) unwrapped to within pi of
    the previous phi; the caller then projects the amplitude to sqrt(n_a+1).
    """
    amp = math.sqrt(n_a)
    raw = math.atan2(amp * math.sin(phi) + math.sin(theta),
                     amp * math.cos(phi) + math.cos(theta))
    d = raw - phi
    # wrap the increment into (-pi, pi]
    return phi + (d - TWO_PI * math.ceil(d / TWO_PI - 0.5))


def lef_drift(phi: float, n_e: int, params: LaserParams, dt: float) -> float:
    """Deterministic phase advance alpha*gamma_r*n_e*dt over an interval."""
    if dt < 0.0:
        raise ValueError("dt must be >= 0")
    return phi + ((params.alpha * gamma_r(params)) * n_e) * dt


def apply_event(state: SystemState, event: EventKind, rng: np.random.Generator,
                params: LaserParams) -> SystemState:
    """Apply one transition; only spontaneous emission touches the phase."""
    rates = event_rates(state, params)
    if rates.as_array()[int(event)] <= 0.0:
        raise ValueError(f"infeasible event {event.name} in state {state}")
    d_na, d_ne = _EVENT_STEPS[int(event)]
    phi = state.phi
    if event == EventKind.SPONTANEOUS_EMISSION:
        theta = TWO_PI * rng.random()
        phi = phase_kick(state.n_a, phi, theta)
    return SystemState(state.n_a + d_na, state.n_e + d_ne, phi, state.t)


@njit(cache=True, nogil=True)
def _kernel(n0, pump, kappa, gamma_a, gr, alpha, source_rate, spon_on,
            na0, ne0, t_end, burn_in, sample_dt, rng,
            samples, na_out, ne_out, counts, hist):  # pragma: no cover - jitted
    n_samples = samples.shape[0]
    t = 0.0
    na = na0
    ne = ne0
    phi = 0.0
    k = 0
    n_events = 0
    drift = alpha * gr

    while True:
        r_pump = pump * (n0 - ne)
        r_spon = gr * ne if spon_on else 0.0
        r_stim = gr * ne * na
        r_abs = gr * (n0 - ne) * na
        r_loss = kappa * na
        r_nonrad = gamma_a * ne
        total = ((((r_pump + r_spon) + r_stim) + r_abs) + r_loss) + r_nonrad
        total = total + source_rate

        if total <= 0.0:
            # absorbing: hold the state to t_end
            while k < n_samples:
                ts = burn_in + k * sample_dt
                ph = phi + (drift * ne) * (ts - t)
                amp = math.sqrt(na)
                samples[k] = amp * math.cos(ph) + 1j * amp * math.sin(ph)
                na_out[k] = na
                ne_out[k] = ne
                k += 1
            lo = t if t > burn_in else burn_in
            if t_end > lo:
                if na >= hist.shape[0]:
                    grown = np.zeros(2 * na + 2, dtype=hist.dtype)
                    grown[:hist.shape[0]] = hist
                    hist = grown
                hist[na] += t_end - lo
            break

        dt = rng.standard_exponential() / total
        t_new = t + dt

        while k < n_samples:
            ts = burn_in + k * sample_dt
            if ts >= t_new:
                break
            ph = phi + (drift * ne) * (ts - t)
            amp = math.sqrt(na)
            samples[k] = amp * math.cos(ph) + 1j * amp * math.sin(ph)
            na_out[k] = na
            ne_out[k] = ne
            k += 1

        lo = t if t > burn_in else burn_in
        hi = t_new if t_new < t_end else t_end
        if hi > lo:
            if na >= hist.shape[0]:
                grown = np.zeros(2 * na + 2, dtype=hist.dtype)
                grown[:hist.shape[0]] = hist
                hist = grown
            hist[na] += hi - lo

        if t_new >= t_end:
            break

        phi = phi + ((drift * ne) * dt)
        u = rng.random() * total
        c = r_pump
        if u < c:
            ev = 0
            ne += 1
        else:
            c += r_spon
            if u < c:
                ev = 1
                theta = TWO_PI * rng.random()
                amp = math.sqrt(na)
                raw = math.atan2(amp * math.sin(phi) + math.sin(theta),
                                 amp * math.cos(phi) + math.cos(theta))
                d = raw - phi
                phi = phi + (d - TWO_PI * math.ceil(d / TWO_PI - 0.5))
                na += 1
                ne -= 1
            else:
                c += r_stim
                if u < c:
                    ev = 2
                    na += 1
                    ne -= 1
                else:
                    c += r_abs
                    if u < c:
                        ev = 3
                        na -= 1
                        ne += 1
                    else:
                        c += r_loss
                        if u < c:
                            ev = 4
                            na -= 1
                        else:
                            c += r_nonrad
                            if u < c:
                                ev = 5
                                ne -= 1
                            else:
                                # injected photon source: random-phase photon
                                ev = 6
                                theta = TWO_PI * rng.random()
                                amp = math.sqrt(na)
                                raw = math.atan2(
                                    amp * math.sin(phi) + math.sin(theta),
                                    amp * math.cos(phi) + math.cos(theta))
                                d = raw - phi
                                phi = phi + (d - TWO_PI * math.ceil(d / TWO_PI - 0.5))
                                na += 1
        n_events += 1
        if t_new >= burn_in:
            counts[ev] += 1
        t = t_new

    return n_events, hist


def _sample_count(t_end: float, burn_in: float, sample_dt: float) -> int:
    return int(math.floor((t_end - burn_in) / sample_dt))


def _check_run_args(t_end, burn_in, sample_dt):
    if not (t_end > burn_in >= 0.0):
        raise ValueError("need t_end > burn_in >= 0")
    if sample_dt <= 0.0:
        raise ValueError("need sample_dt > 0")


def simulate(params: LaserParams, seed: int, t_end: float, burn_in: float,
             sample_dt: float,
             overrides: EngineOverrides = _NO_OVERRIDES,
             hist_hint: int = 256) -> FieldTrajectory:
    """Run one exact-SSA trajectory from the empty state (n_a=n_e=0, phi=0).

    Samples the field on the uniform grid t_k = burn_in + k*sample_dt,
    k < floor((t_end-burn_in)/sample_dt).  Bit-reproducible for a fixed seed;
    the PRNG is an independent PCG64 stream per trajectory.
    """
    _check_run_args(t_end, burn_in, sample_dt)
    if overrides.initial_n_a < 0 or not (0 <= overrides.initial_n_e <= params.n0):
        raise ValueError("initial populations out of bounds")
    n_samples = _sample_count(t_end, burn_in, sample_dt)
    samples = np.empty(n_samples, dtype=np.complex128)
    na_out = np.empty(n_samples, dtype=np.int64)
    ne_out = np.empty(n_samples, dtype=np.int64)
    counts = np.zeros(7, dtype=np.int64)
    hist = np.zeros(max(hist_hint, 16), dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(seed))

    n_events, hist = _kernel(
        params.n0, params.pump, params.kappa, params.gamma_a, gamma_r(params),
        params.alpha, overrides.source_rate,
        not overrides.disable_spontaneous,
        overrides.initial_n_a, overrides.initial_n_e,
        t_end, burn_in, sample_dt, rng,
        samples, na_out, ne_out, counts, hist)

    return FieldTrajectory(
        params=params, seed=seed, sample_dt=sample_dt, burn_in=burn_in,
        t_end=t_end, samples=samples, n_a=na_out, n_e=ne_out,
        event_counts=counts, n_events=int(n_events),
        dwell_hist=np.trim_zeros(hist, trim="b"), dwell_total=t_end - burn_in)


def simulate_reference(params: LaserParams, seed: int, t_end: float,
                       burn_in: float, sample_dt: float,
                       overrides: EngineOverrides = _NO_OVERRIDES) -> FieldTrajectory:
    """Pure-Python twin of simulate(), built from the single-step operations.

    Slow; used to validate the compiled kernel (identical seed => identical
    trajectory to the last bit).
    """
    _check_run_args(t_end, burn_in, sample_dt)
    if overrides.initial_n_a < 0 or not (0 <= overrides.initial_n_e <= params.n0):
        raise ValueError("initial populations out of bounds")
    n_samples = _sample_count(t_end, burn_in, sample_dt)
    samples = np.empty(n_samples, dtype=np.complex128)
    na_out = np.empty(n_samples, dtype=np.int64)
    ne_out = np.empty(n_samples, dtype=np.int64)
    counts = np.zeros(7, dtype=np.int64)
    hist = np.zeros(16, dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(seed))

    state = SystemState(overrides.initial_n_a, overrides.initial_n_e, 0.0, 0.0)
    t = 0.0
    k = 0
    n_events = 0

    def emit_until(limit, na, ne, phi):
        nonlocal k
        while k < n_samples:
            ts = burn_in + k * sample_dt
            if ts >= limit:
                break
            ph = lef_drift(phi, ne, params, ts - t)
            amp = math.sqrt(na)
            samples[k] = amp * math.cos(ph) + 1j * amp * math.sin(ph)
            na_out[k] = na
            ne_out[k] = ne
            k += 1

    def accumulate_dwell(t_new, na):
        nonlocal hist
        lo = t if t > burn_in else burn_in
        hi = t_new if t_new < t_end else t_end
        if hi > lo:
            if na >= len(hist):
                grown = np.zeros(2 * na + 2)
                grown[:len(hist)] = hist
                hist = grown
            hist[na] += hi - lo

    while True:
        rates = event_rates(state, params, overrides)
        total = rates.total + overrides.source_rate
        if total <= 0.0:
            emit_until(math.inf, state.n_a, state.n_e, state.phi)
            accumulate_dwell(t_end, state.n_a)
            break
        dt = rng.standard_exponential() / total
        t_new = t + dt
        emit_until(t_new, state.n_a, state.n_e, state.phi)
        accumulate_dwell(t_new, state.n_a)
        if t_new >= t_end:
            break
        phi = lef_drift(state.phi, state.n_e, params, dt)
        state = SystemState(state.n_a, state.n_e, phi, t_new)
        u = rng.random() * total
        ev = None
        c = rates.pump
        if u < c:
            ev = EventKind.PUMP
        else:
            c += rates.spontaneous
            if u < c:
                ev = EventKind.SPONTANEOUS_EMISSION
            else:
                c += rates.stimulated
                if u < c:
                    ev = EventKind.STIMULATED_EMISSION
                else:
                    c += rates.absorption
                    if u < c:
                        ev = EventKind.STIMULATED_ABSORPTION
                    else:
                        c += rates.loss
                        if u < c:
                            ev = EventKind.CAVITY_LOSS
                        else:
                            c += rates.nonradiative
                            if u < c:
                                ev = EventKind.NONRADIATIVE_DECAY
        if ev is None:
            # injected source event: photon with a random phase, emitters kept
            theta = TWO_PI * rng.random()
            state = SystemState(state.n_a + 1, state.n_e,
                                phase_kick(state.n_a, state.phi, theta), t_new)
            ev_index = 6
        else:
            state = apply_event(state, ev, rng, params)
            state = SystemState(state.n_a, state.n_e, state.phi, t_new)
            ev_index = int(ev)
        n_events += 1
        if t_new >= burn_in:
            counts[ev_index] += 1
        t = t_new

    return FieldTrajectory(
        params=params, seed=seed, sample_dt=sample_dt, burn_in=burn_in,
        t_end=t_end, samples=samples, n_a=na_out, n_e=ne_out,
        event_counts=counts, n_events=n_events,
        dwell_hist=np.trim_zeros(hist, trim="b"), dwell_total=t_end - burn_in)


def run_ensemble(params: LaserParams, n_traj: int, base_seed: int,
                 t_end: float, burn_in: float, sample_dt: float,
                 overrides: EngineOverrides = _NO_OVERRIDES,
                 threads: int = 1, hist_hint: int = 256) -> list[FieldTrajectory]:
    """Independent trajectories with seeds base_seed + i.

    Per-trajectory streams are independent PCG64 instances, so the result is
    identical whether run serially or on a thread pool (the kernel releases
    the GIL).
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    seeds = [base_seed + i for i in range(n_traj)]
    if threads <= 1 or n_traj == 1:
        return [simulate(params, s, t_end, burn_in, sample_dt, overrides,
                         hist_hint) for s in seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(simulate, params, s, t_end, burn_in, sample_dt,
                               overrides, hist_hint) for s in seeds]
        return [f.result() for f in futures]
