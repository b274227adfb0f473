"""Estimators for photon statistics, field correlation, spectrum and linewidth.

The emission spectrum is the Fourier transform of the first-order field
autocorrelation

    g1(tau) = <E(t+tau) E*(t)> / <|E|^2>,
    S(omega) = scale * dtau * sum_k w_k g1(tau_k) exp(-i omega tau_k)

over the two-sided Hermitian extension g1(-tau) = g1(tau)*, with a taper
window (Hann by default); a rotation exp(+i Omega tau) of g1 peaks at
omega = +Omega.  The linewidth is extracted either from a linear
fit of ln|g1| over the decade |g1| in [0.8, 0.2] (FWHM = 2 * |slope|, exact
for a Lorentzian line) or from a free-center Lorentzian fit of S(omega).
Both paths see the full complex field, so below threshold -- where intensity
rather than phase noise sets the line -- no special casing is needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize, stats

from .engine import FieldTrajectory
from .ratemodel import gamma_r

__all__ = [
    "PhotonStatistics",
    "AutocorrelationEstimate",
    "SpectrumEstimate",
    "LinewidthEstimate",
    "photon_statistics",
    "g1",
    "spectrum",
    "linewidth",
    "subtract_mean_drift",
    "poisson_chi2_pvalue",
]


@dataclass(frozen=True)
class PhotonStatistics:
    """Photon-number distribution and its factorial moments."""

    n: np.ndarray             # photon numbers with nonzero weight
    p: np.ndarray             # probabilities, sum to 1
    mean: float               # <n>
    second_factorial: float   # <n(n-1)>
    g2_zero: float            # <n(n-1)> / <n>^2, nan when <n> = 0
    mean_se: float
    g2_se: float
    weighting: str            # "dwell" or "sample"
    flags: tuple = ()


@dataclass(frozen=True)
class AutocorrelationEstimate:
    lags: np.ndarray          # tau_k = k * sample_dt, k = 0..K
    values: np.ndarray        # complex g1, values[0] == 1
    counts: np.ndarray        # (origin, member) pairs entering each lag
    mean_intensity: float     # <|E|^2> used for normalization
    sample_dt: float


@dataclass(frozen=True)
class SpectrumEstimate:
    omega: np.ndarray         # angular frequency [1/ps], ascending
    values: np.ndarray        # S(omega) >= 0
    window: str
    resolution_bandwidth: float  # grid spacing 2*pi/(lag span)
    scale: float              # mean intensity; integral S domega/(2 pi) = scale


@dataclass(frozen=True)
class LinewidthEstimate:
    fwhm: float               # angular FWHM [1/ps]
    center: float             # line center [1/ps angular]
    method: str               # "exponential-g1" or "lorentzian-spectrum"
    residual: float           # rms fit residual (log-domain for the g1 fit)
    ci: tuple                 # ~95% interval for fwhm
    resolved: bool = True
    flags: tuple = ()
    alternate: "LinewidthEstimate | None" = None


def _as_trajectories(record) -> list[FieldTrajectory]:
    if isinstance(record, FieldTrajectory):
        return [record]
    return list(record)


def _moments_from_hist(n: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    total = w.sum()
    mean = float((n * w).sum() / total)
    second = float((n * (n - 1.0) * w).sum() / total)
    return mean, second


def _g2_of(mean, second):
    return second / (mean * mean) if mean > 0.0 else math.nan


def photon_statistics(record, weighting: str = "auto") -> PhotonStatistics:
    """Photon-number histogram, <n>, <n(n-1)> and g2(0).

    Accepts a FieldTrajectory, a list of them, or a plain integer array of
    photon-number samples.  Trajectories use the dwell-time-weighted record
    accumulated during simulation ("dwell"); arrays and weighting="sample"
    use the uniform grid.  Standard errors come from the member spread
    (ensembles) or from 16 time blocks (single records).
    """
    if isinstance(record, np.ndarray):
        samples = np.asarray(record)
        if samples.size == 0:
            raise ValueError("empty sample record")
        hist = np.bincount(samples.astype(np.int64))
        n = np.arange(len(hist))
        mean, second = _moments_from_hist(n, hist.astype(float))
        blocks = np.array_split(samples, min(16, samples.size))
        piece = [(b.mean(), (b * (b - 1.0)).mean()) for b in blocks if b.size]
        g2s = np.array([_g2_of(m, s) for m, s in piece])
        means = np.array([m for m, _ in piece])
        nb = len(piece)
        good = np.isfinite(g2s)
        g2_se = (float(g2s[good].std(ddof=1) / math.sqrt(good.sum()))
                 if good.sum() > 1 else math.nan)
        mean_se = float(means.std(ddof=1) / math.sqrt(nb)) if nb > 1 else math.nan
        keep = hist > 0
        flags = () if mean > 0 else ("mean-zero",)
        return PhotonStatistics(n[keep], hist[keep] / hist.sum(), mean, second,
                                _g2_of(mean, second), mean_se, g2_se,
                                "sample", flags)

    trajectories = _as_trajectories(record)
    if not trajectories:
        raise ValueError("no trajectories given")
    use_dwell = weighting in ("auto", "dwell")
    if weighting == "dwell" and any(t.dwell_hist.size == 0 for t in trajectories):
        raise ValueError("trajectory carries no dwell histogram")
    if weighting == "auto" and any(t.dwell_hist.size == 0 for t in trajectories):
        use_dwell = False

    per_member = []
    if use_dwell:
        width = max(t.dwell_hist.size for t in trajectories)
        pooled = np.zeros(width)
        for t in trajectories:
            pooled[:t.dwell_hist.size] += t.dwell_hist
            per_member.append(_moments_from_hist(
                np.arange(t.dwell_hist.size), t.dwell_hist))
        n = np.arange(width)
        mean, second = _moments_from_hist(n, pooled)
        weights = pooled
        kind = "dwell"
    else:
        allsamp = np.concatenate([t.n_a for t in trajectories])
        if allsamp.size == 0:
            raise ValueError("no samples in record")
        return photon_statistics(allsamp)

    if len(per_member) > 1:
        g2s = np.array([_g2_of(m, s) for m, s in per_member])
        means = np.array([m for m, _ in per_member])
        nb = len(per_member)
        good = np.isfinite(g2s)
        g2_se = (float(g2s[good].std(ddof=1) / math.sqrt(good.sum()))
                 if good.sum() > 1 else math.nan)
        mean_se = float(means.std(ddof=1) / math.sqrt(nb))
    else:
        t = trajectories[0]
        if t.n_a.size >= 32:
            blocks = np.array_split(t.n_a, 16)
            piece = [(b.mean(), (b * (b - 1.0)).mean()) for b in blocks]
            g2s = np.array([_g2_of(m, s) for m, s in piece])
            means = np.array([m for m, _ in piece])
            good = np.isfinite(g2s)
            g2_se = (float(g2s[good].std(ddof=1) / 4.0)
                     if good.sum() > 1 else math.nan)
            mean_se = float(means.std(ddof=1) / 4.0)
        else:
            g2_se = mean_se = math.nan

    keep = weights > 0
    flags = () if mean > 0 else ("mean-zero",)
    return PhotonStatistics(np.arange(len(weights))[keep],
                            weights[keep] / weights.sum(), mean, second,
                            _g2_of(mean, second), mean_se, g2_se, kind, flags)


def _autocorr_fft(x: np.ndarray, n_lags: int) -> np.ndarray:
    """c_k = sum_i x[i+k] * conj(x[i]) for k = 0..n_lags, via zero-padded FFT."""
    n = x.size
    nfft = 1 << int(math.ceil(math.log2(2 * n)))
    f = np.fft.fft(x, n=nfft)
    c = np.fft.ifft(f * np.conj(f))[:n_lags + 1]
    c[0] = np.vdot(x, x).real  # exact zero-lag power
    return c


def g1(record, max_lag: float) -> AutocorrelationEstimate:
    """Normalized field autocorrelation over all time origins and members.

    max_lag must not exceed a fifth of the (shortest) trajectory span;
    beyond that the estimate is statistically meaningless.
    """
    trajectories = _as_trajectories(record)
    dt = trajectories[0].sample_dt
    if any(abs(t.sample_dt - dt) > 1e-12 * dt for t in trajectories):
        raise ValueError("trajectories must share sample_dt")
    min_n = min(t.samples.size for t in trajectories)
    if min_n < 2:
        raise ValueError("trajectories too short for autocorrelation")
    span = (min_n - 1) * dt
    if max_lag > span / 5.0 + 1e-12:
        raise ValueError(f"max_lag {max_lag:.4g} exceeds span/5 = {span / 5.0:.4g}")
    n_lags = int(math.floor(max_lag / dt))

    acc = np.zeros(n_lags + 1, dtype=np.complex128)
    counts = np.zeros(n_lags + 1, dtype=np.int64)
    power = 0.0
    total = 0
    for t in trajectories:
        x = t.samples
        acc += _autocorr_fft(x, n_lags)
        counts += x.size - np.arange(n_lags + 1)
        power += np.vdot(x, x).real
        total += x.size
    mean_intensity = power / total
    if mean_intensity <= 0.0:
        raise ValueError("zero field throughout record; g1 undefined")
    values = acc / counts / mean_intensity
    values[0] = 1.0  # zero-lag is its own normalizer
    return AutocorrelationEstimate(
        lags=dt * np.arange(n_lags + 1), values=values, counts=counts,
        mean_intensity=mean_intensity, sample_dt=dt)


_WINDOWS = {
    "hann": np.hanning,
    "boxcar": np.ones,
}


def spectrum(acf: AutocorrelationEstimate, window: str = "hann",
             pad_factor: int = 4) -> SpectrumEstimate:
    """Windowed Fourier transform of the Hermitian-extended autocorrelation.

    pad_factor zero-pads the lag record to interpolate the frequency grid;
    the resolution bandwidth 2*pi/(lag span) is unchanged by padding.
    """
    if window not in _WINDOWS:
        raise ValueError(f"unknown window {window!r}; options {sorted(_WINDOWS)}")
    if pad_factor < 1:
        raise ValueError("pad_factor must be >= 1")
    k = acf.values.size - 1
    dt = acf.sample_dt
    two_sided = np.concatenate([np.conj(acf.values[:0:-1]), acf.values])
    m = two_sided.size  # 2k + 1, tau from -k*dt to +k*dt
    w = _WINDOWS[window](m)
    x = two_sided * w
    nfft = m * pad_factor
    # S(omega_j) = dt * sum_m x_m exp(-i omega_j (m - k) dt): a rotation
    # exp(+i Omega tau) in g1 appears as a peak at omega = +Omega, matching
    # the sign of the LEF drift reported as the line center
    raw = np.fft.fft(x, n=nfft)
    j = np.arange(nfft)
    raw = raw * np.exp(2j * np.pi * j * k / nfft)
    omega = 2.0 * np.pi * np.fft.fftfreq(nfft, d=dt)
    order = np.argsort(omega)
    values = dt * raw.real[order] * acf.mean_intensity
    omega = omega[order]
    floor = values.min()
    if floor < -1e-6 * max(values.max(), 1e-300):
        warnings.warn(f"spectrum has a significantly negative bin ({floor:.3g})",
                      RuntimeWarning, stacklevel=2)
    np.clip(values, 0.0, None, out=values)
    return SpectrumEstimate(omega=omega, values=values, window=window,
                            resolution_bandwidth=2.0 * np.pi / (m * dt),
                            scale=acf.mean_intensity)


def _fit_g1_linewidth(acf: AutocorrelationEstimate,
                      fit_range=(0.8, 0.2)) -> LinewidthEstimate:
    hi, lo = fit_range
    mag = np.abs(acf.values)
    below = np.nonzero(mag < lo)[0]
    flags = []
    if below.size == 0:
        return LinewidthEstimate(
            fwhm=math.nan, center=math.nan, method="exponential-g1",
            residual=math.nan, ci=(math.nan, math.nan), resolved=False,
            flags=("unresolved: |g1| does not decay below "
                   f"{lo} within max_lag",))
    k_end = int(below[0])
    sel = np.arange(1, k_end)
    sel = sel[mag[sel] <= hi]
    if sel.size < 3:
        sel = np.arange(1, max(k_end, 2))
        flags.append("short-fit-range")
    tau = acf.lags[sel]
    y = np.log(mag[sel])
    design = np.vstack([np.ones_like(tau), tau]).T
    coef = np.linalg.lstsq(design, y, rcond=None)[0]
    slope = coef[1]
    resid = y - design @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    dof = max(sel.size - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    slope_se = math.sqrt(cov[1, 1])
    fwhm = 2.0 * abs(slope)
    half = 2.0 * 1.96 * slope_se
    if sel.size >= 6 and rms > 0.02:
        # curvature check: a quadratic term that soaks up most of the
        # residual means the decay is not exponential over the fit window
        quad = np.vstack([np.ones_like(tau), tau, tau ** 2]).T
        resid_q = y - quad @ np.linalg.lstsq(quad, y, rcond=None)[0]
        rms_q = float(np.sqrt(np.mean(resid_q ** 2)))
        if rms > 2.0 * rms_q:
            flags.append("non-exponential")
            warnings.warn(
                "g1 decay deviates from exponential over the fit window "
                f"(log rms {rms:.3g} vs {rms_q:.3g} with curvature); "
                "consider the spectrum fit", RuntimeWarning, stacklevel=3)
    # line center from the phase slope over the same lag window
    phase = np.unwrap(np.angle(acf.values[:k_end + 1]))
    center = float(np.polyfit(acf.lags[:k_end + 1], phase, 1)[0])
    return LinewidthEstimate(fwhm=fwhm, center=center, method="exponential-g1",
                             residual=rms, ci=(fwhm - half, fwhm + half),
                             resolved=True, flags=tuple(flags))


def _lorentzian(omega, amp, center, hwhm, offset):
    return amp * hwhm ** 2 / ((omega - center) ** 2 + hwhm ** 2) + offset


def _fit_spectrum_linewidth(spec: SpectrumEstimate) -> LinewidthEstimate:
    omega, s = spec.omega, spec.values
    peak = int(np.argmax(s))
    amp0 = float(s[peak])
    if amp0 <= 0.0:
        return LinewidthEstimate(math.nan, math.nan, "lorentzian-spectrum",
                                 math.nan, (math.nan, math.nan), resolved=False,
                                 flags=("empty-spectrum",))
    center0 = float(omega[peak])
    above = s > amp0 / 2.0
    hwhm0 = max((above.sum() / 2.0) * (omega[1] - omega[0]),
                omega[1] - omega[0])
    try:
        popt, pcov = optimize.curve_fit(
            _lorentzian, omega, s, p0=[amp0, center0, hwhm0, 0.0],
            bounds=([0.0, omega[0], 0.0, -np.inf],
                    [np.inf, omega[-1], omega[-1] - omega[0], np.inf]),
            maxfev=20000)
    except RuntimeError:
        return LinewidthEstimate(math.nan, math.nan, "lorentzian-spectrum",
                                 math.nan, (math.nan, math.nan), resolved=False,
                                 flags=("fit-failed",))
    amp, center, hwhm, _ = popt
    resid = s - _lorentzian(omega, *popt)
    rms = float(np.sqrt(np.mean(resid ** 2)) / amp)
    hwhm_se = math.sqrt(max(pcov[2, 2], 0.0))
    fwhm = 2.0 * hwhm
    half = 2.0 * 1.96 * hwhm_se
    return LinewidthEstimate(fwhm=fwhm, center=float(center),
                             method="lorentzian-spectrum", residual=rms,
                             ci=(fwhm - half, fwhm + half), resolved=True)


def linewidth(estimate, method: str = "auto",
              fit_range=(0.8, 0.2)) -> LinewidthEstimate:
    """FWHM of the emission line from a g1 estimate or a spectrum.

    method "auto" picks the exponential-|g1| fit for autocorrelations and
    the Lorentzian fit for spectra; "both" (autocorrelation input) reports
    the spectrum fit in `alternate`.
    """
    if isinstance(estimate, AutocorrelationEstimate):
        if method in ("auto", "g1"):
            return _fit_g1_linewidth(estimate, fit_range)
        if method == "spectrum":
            return _fit_spectrum_linewidth(spectrum(estimate))
        if method == "both":
            primary = _fit_g1_linewidth(estimate, fit_range)
            return replace(primary, alternate=_fit_spectrum_linewidth(
                spectrum(estimate)))
        raise ValueError(f"unknown method {method!r}")
    if isinstance(estimate, SpectrumEstimate):
        return _fit_spectrum_linewidth(estimate)
    raise TypeError("estimate must be AutocorrelationEstimate or SpectrumEstimate")


def subtract_mean_drift(traj: FieldTrajectory, n_e_bar: float | None = None) -> FieldTrajectory:
    """Remove the mean LEF rotation exp(i*alpha*gamma_r*n_e_bar*t) from the samples.

    n_e_bar defaults to the sampled mean excitation; pass the mean-field
    steady-state value for an a-priori reference.  Visualization aid only --
    |E| and the photon record are untouched.
    """
    if n_e_bar is None:
        if traj.n_e.size == 0:
            raise ValueError("trajectory has no samples to average n_e over")
        n_e_bar = float(traj.n_e.mean())
    rate = traj.params.alpha * gamma_r(traj.params) * n_e_bar
    rotated = traj.samples * np.exp(-1j * rate * traj.times)
    return traj.with_samples(rotated)


def poisson_chi2_pvalue(samples: np.ndarray, min_expected: float = 5.0) -> float:
    """Chi-square goodness-of-fit p-value against Poisson(mean of samples).

    Bins with expected count below min_expected are pooled from the tails.
    The caller is responsible for passing decorrelated samples.
    """
    samples = np.asarray(samples, dtype=np.int64)
    n = samples.size
    lam = samples.mean()
    if lam <= 0.0:
        raise ValueError("degenerate sample set")
    top = int(samples.max()) + 1
    observed = np.bincount(samples, minlength=top + 1).astype(float)
    expected = stats.poisson.pmf(np.arange(top + 1), lam) * n
    expected[-1] += (1.0 - stats.poisson.cdf(top, lam)) * n

    # pool sparse bins inward from both tails
    lo = 0
    while expected[lo] < min_expected and lo < len(expected) - 2:
        expected[lo + 1] += expected[lo]
        observed[lo + 1] += observed[lo]
        lo += 1
    hi = len(expected) - 1
    while expected[hi] < min_expected and hi > lo + 1:
        expected[hi - 1] += expected[hi]
        observed[hi - 1] += observed[hi]
        hi -= 1
    obs = observed[lo:hi + 1]
    exp = expected[lo:hi + 1]
    exp *= obs.sum() / exp.sum()
    statistic, p = stats.chisquare(obs, exp, ddof=1)
    return float(p)
