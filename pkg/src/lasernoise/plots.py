"""SVG plot emission for sweep results; every figure gets a paired CSV."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np

from .observables import photon_statistics, subtract_mean_drift

__all__ = ["emit_plots"]

_METHOD_STYLE = {
    "sta": dict(marker="o", linestyle="-", color="tab:blue"),
    "me": dict(marker="s", linestyle="--", color="tab:red"),
    "analytic": dict(marker=None, linestyle=":", color="tab:green"),
    "meanfield": dict(marker=None, linestyle="-.", color="tab:gray"),
}


def _axis_values(rows):
    if rows and rows[0].sweep_variable == "n0":
        return [r.n0 for r in rows], "emitter count n0"
    return [r.pump_total for r in rows], "total pump rate n0*P [1/ps]"


def _write_csv(path, header, columns):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for record in zip(*columns):
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in record])


def _plot_quantity(rows, attr, err_attr, ylabel, stem, outdir, logy):
    produced = []
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    any_data = False
    for method in sorted({r.method for r in rows}):
        subset = [r for r in rows if r.method == method
                  and math.isfinite(getattr(r, attr))]
        if not subset:
            continue
        any_data = True
        x, xlabel = _axis_values(subset)
        y = [getattr(r, attr) for r in subset]
        err = [getattr(r, err_attr) for r in subset] if err_attr else None
        style = _METHOD_STYLE.get(method, {})
        if err and all(math.isfinite(e) for e in err):
            ax.errorbar(x, y, yerr=err, label=method, **style)
        else:
            ax.plot(x, y, label=method, **style)
        _write_csv(outdir / f"{stem}_{method}.csv",
                   ["x", attr] + ([err_attr] if err_attr else []),
                   [x, y] + ([err] if err_attr else []))
        produced.append(outdir / f"{stem}_{method}.csv")
    if not any_data:
        plt.close(fig)
        return produced
    ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(_axis_values(rows)[1])
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    target = outdir / f"{stem}.svg"
    fig.savefig(target)
    plt.close(fig)
    produced.append(target)
    return produced


def _plot_phase_portrait(tag, traj, outdir):
    samples = traj.samples[:20000]
    fig, ax = plt.subplots(figsize=(3.8, 3.6))
    ax.scatter(samples.real, samples.imag, s=1.5, alpha=0.35, linewidths=0)
    ax.set_xlabel("Re E")
    ax.set_ylabel("Im E")
    ax.set_aspect("equal")
    fig.tight_layout()
    target = outdir / f"phase_portrait_{tag}.svg"
    fig.savefig(target)
    plt.close(fig)
    _write_csv(outdir / f"phase_portrait_{tag}.csv", ["re", "im"],
               [samples.real.tolist(), samples.imag.tolist()])
    return [target, outdir / f"phase_portrait_{tag}.csv"]


def _plot_histogram(tag, traj, outdir):
    stats = photon_statistics(traj)
    fig, ax = plt.subplots(figsize=(3.8, 3.0))
    ax.bar(stats.n, stats.p, width=0.9)
    ax.set_xlabel("photon number n")
    ax.set_ylabel("p(n)")
    fig.tight_layout()
    target = outdir / f"photon_histogram_{tag}.svg"
    fig.savefig(target)
    plt.close(fig)
    _write_csv(outdir / f"photon_histogram_{tag}.csv", ["n", "p"],
               [stats.n.tolist(), stats.p.tolist()])
    return [target, outdir / f"photon_histogram_{tag}.csv"]


def _plot_field_trace(tag, traj, outdir):
    limit = min(traj.samples.size, 20000)
    t = traj.times[:limit]
    raw = traj.samples[:limit]
    columns = [t.tolist(), raw.real.tolist()]
    header = ["t_ps", "re_e"]
    fig, ax = plt.subplots(figsize=(5.0, 3.0))
    ax.plot(t, raw.real, lw=0.6, label="Re E")
    if traj.params.alpha > 0.0:
        flat = subtract_mean_drift(traj).samples[:limit]
        ax.plot(t, flat.real, lw=0.6, label="Re E, mean drift removed")
        columns.append(flat.real.tolist())
        header.append("re_e_drift_removed")
    ax.set_xlabel("t [ps]")
    ax.set_ylabel("Re E")
    ax.legend(fontsize=8)
    fig.tight_layout()
    target = outdir / f"field_trace_{tag}.svg"
    fig.savefig(target)
    plt.close(fig)
    _write_csv(outdir / f"field_trace_{tag}.csv", header, columns)
    return [target, outdir / f"field_trace_{tag}.csv"]


def emit_plots(rows, trajectories, outdir) -> list[Path]:
    """Write sweep figures and their data files; returns the created paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    produced = []
    produced += _plot_quantity(rows, "g2", "g2_se", "g2(0)", "g2_vs_pump",
                               outdir, logy=False)
    produced += _plot_quantity(rows, "fwhm", "fwhm_se",
                               "linewidth FWHM [1/ps]", "linewidth_vs_pump",
                               outdir, logy=True)
    for index in sorted(trajectories):
        traj = trajectories[index]
        tag = f"point{index:02d}"
        if traj.samples.size == 0:
            continue
        produced += _plot_phase_portrait(tag, traj, outdir)
        if traj.dwell_hist.size:
            produced += _plot_histogram(tag, traj, outdir)
        produced += _plot_field_trace(tag, traj, outdir)
    return produced
