"""Batch sweeps over pump rate or emitter count, with CSV emission.

Each (grid point, method) pair becomes one result row; per-point failures
are recorded in the row and the sweep continues.  Methods:

    sta        stochastic trajectories -> g2(0), linewidth, mean populations
    me         master-equation reference (n0 <= 3)
    analytic   Schawlow-Townes form and the photon-lifetime width
    meanfield  deterministic steady state only

Seeds are deterministic: point i uses base_seed + i*n_traj + member index,
so reruns of the same config reproduce every data column byte for byte
(wall_time is the only exception).
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .analytic import below_threshold_reference, schawlow_townes
from .config import RunConfig
from .engine import FieldTrajectory, run_ensemble
from .master_equation import g2_zero_me, linewidth_me, mean_photon_me, solve_steady
from .observables import g1, linewidth, photon_statistics
from .ratemodel import LaserParams, default_burn_in, gamma_r, steady_state

__all__ = ["SweepRow", "sweep", "write_rows", "CSV_COLUMNS", "resolve_controls"]


@dataclass
class SweepRow:
    method: str
    sweep_variable: str
    n0: int
    pump_per_emitter: float
    pump_total: float
    mean_na: float = math.nan
    mean_ne: float = math.nan
    g2: float = math.nan
    g2_se: float = math.nan
    fwhm: float = math.nan
    fwhm_se: float = math.nan
    center: float = math.nan
    fwhm_lifetime_ref: float = math.nan
    fwhm_schawlow_townes: float = math.nan
    n_traj: int = 0
    seed_base: int = 0
    n_events: int = 0
    status: str = "ok"
    message: str = ""
    wall_time_s: float = 0.0


CSV_COLUMNS = tuple(f.name for f in fields(SweepRow))


def resolve_controls(params: LaserParams, config: RunConfig):
    """Fill auto simulation controls from the mean-field model.

    sample_dt resolves both the cold-cavity width and (with a safety margin)
    the LEF-shifted carrier; t_end targets a few hundred coherence times
    beyond the burn-in so the g1 decade fit is statistically meaningful.
    """
    burn_in = config.burn_in
    if burn_in is None:
        burn_in = default_burn_in(params)
    state = steady_state(params)
    width_guess = params.kappa - gamma_r(params) * (2.0 * state.n_e - params.n0)
    if state.n_a > 0.0:
        width_guess += (gamma_r(params) * state.n_e
                        * (1.0 + params.alpha ** 2) / (2.0 * state.n_a))
    sample_dt = config.sample_dt
    if sample_dt is None:
        sample_dt = min(0.1 / params.kappa, 0.01 / width_guess)
        drift = params.alpha * gamma_r(params) * state.n_e
        if drift > 0.0:
            sample_dt = min(sample_dt, 0.5 / drift)
    t_end = config.t_end
    if t_end is None:
        span = max(400.0 * 2.0 / width_guess / max(config.n_traj, 1),
                   2000.0 * sample_dt)
        t_end = burn_in + span
    return t_end, burn_in, sample_dt


def _fit_lag(trajectories):
    n = min(t.samples.size for t in trajectories)
    dt = trajectories[0].sample_dt
    return (n - 1) * dt / 5.0


def _sta_row(row: SweepRow, params: LaserParams, config: RunConfig,
             point_index: int) -> FieldTrajectory:
    t_end, burn_in, sample_dt = resolve_controls(params, config)
    seed = config.base_seed + point_index * config.n_traj
    ensemble = run_ensemble(params, config.n_traj, seed, t_end, burn_in,
                            sample_dt, threads=config.threads)
    stats = photon_statistics(ensemble)
    row.mean_na = stats.mean
    row.g2 = stats.g2_zero
    row.g2_se = stats.g2_se
    row.mean_ne = float(np.mean([t.n_e.mean() for t in ensemble]))
    row.seed_base = seed
    row.n_traj = config.n_traj
    row.n_events = int(sum(t.n_events for t in ensemble))
    if stats.mean > 0.0:
        acf = g1(ensemble, max_lag=_fit_lag(ensemble))
        est = linewidth(acf)
        if est.resolved:
            row.fwhm = est.fwhm
            row.fwhm_se = (est.ci[1] - est.ci[0]) / (2.0 * 1.96 * 2.0)
            row.center = est.center
        else:
            row.status = "partial"
            row.message = "; ".join(est.flags)
    else:
        row.status = "partial"
        row.message = "zero field; no linewidth"
    return ensemble[0]


def _me_row(row: SweepRow, params: LaserParams):
    rho, _gen = solve_steady(params)
    row.mean_na = mean_photon_me(rho)
    row.g2 = g2_zero_me(rho)
    est = linewidth_me(params)
    row.fwhm = est.fwhm
    row.fwhm_se = (est.ci[1] - est.ci[0]) / (2.0 * 1.96 * 2.0)
    row.center = est.center


def _analytic_row(row: SweepRow, params: LaserParams):
    st = schawlow_townes(params)
    row.fwhm = st.fwhm
    row.fwhm_schawlow_townes = st.fwhm
    row.mean_na = st.n_a_bar
    row.fwhm_lifetime_ref = below_threshold_reference(params)


def _meanfield_row(row: SweepRow, params: LaserParams):
    state = steady_state(params)
    row.mean_na = state.n_a
    row.mean_ne = state.n_e


def sweep(config: RunConfig, keep_trajectories: bool = True):
    """Run every (point, method) pair; returns (rows, plot_payload).

    plot_payload maps point index -> a representative trajectory for the
    phase-portrait and histogram plots (sta runs only).
    """
    rows: list[SweepRow] = []
    payload: dict[int, FieldTrajectory] = {}
    for i, (n0, pump) in enumerate(config.points()):
        params = replace(config.laser, n0=n0, pump=pump)
        for method in config.methods:
            row = SweepRow(method=method, sweep_variable=config.sweep_variable,
                           n0=n0, pump_per_emitter=pump, pump_total=n0 * pump)
            started = time.perf_counter()
            try:
                if method == "sta":
                    traj = _sta_row(row, params, config, i)
                    if keep_trajectories:
                        payload[i] = traj
                elif method == "me":
                    _me_row(row, params)
                elif method == "analytic":
                    _analytic_row(row, params)
                elif method == "meanfield":
                    _meanfield_row(row, params)
            except Exception as exc:  # per-point failures stay in-row
                row.status = "error"
                row.message = f"{type(exc).__name__}: {exc}"
            row.wall_time_s = time.perf_counter() - started
            rows.append(row)
    return rows, payload


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(rows, path):
    """RFC-4180-style CSV with a fixed, documented column order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_cell(getattr(row, name)) for name in CSV_COLUMNS])
