"""Linewidth across the micro/meso/macroscopic emitter-count regimes.

At a fixed per-emitter pump the stochastic sampler runs unchanged from a
single emitter to a thousand; the dense quantum reference is feasible only
up to three emitters, and the analytic phase-diffusion width applies at the
macroscopic end.  This scan stitches the three views together on one curve.

Reduced statistics keep the script at a few minutes; expect a few percent
of scatter on the linewidths.

    python demos/emitter_scaling.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import lasernoise as ln
from lasernoise.master_equation import linewidth_me
from lasernoise.ratemodel import gamma_r

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

pump = 0.63
grid = (1, 2, 3, 10, 30, 100)
sta, me, analytic = {}, {}, {}
for n0 in grid:
    p = ln.preset("emitter_scaling", n0=n0, pump=pump)
    st = ln.schawlow_townes(p).fwhm
    burn = ln.default_burn_in(p)
    span = min(4.0 / st, 120000.0)
    ens = ln.run_ensemble(p, n_traj=6, base_seed=700 + n0,
                          t_end=burn + span, burn_in=burn, sample_dt=2.0,
                          threads=2)
    acf = ln.g1(ens, max_lag=(ens[0].samples.size - 1) * 2.0 / 5)
    est = ln.linewidth(acf)
    sta[n0] = est.fwhm
    analytic[n0] = st
    if n0 <= 3:
        me[n0] = linewidth_me(p).fwhm
    me_txt = f"  me = {me[n0]:.6f}" if n0 in me else ""
    print(f"n0 = {n0:4d}: sta = {est.fwhm:.6f}  analytic = {st:.6f}{me_txt}")

fig, ax = plt.subplots(figsize=(5.5, 3.8))
ax.loglog(list(sta), list(sta.values()), "o-", label="stochastic")
ax.loglog(list(me), list(me.values()), "s", label="master equation")
ax.loglog(list(analytic), list(analytic.values()), ":",
          label="phase-diffusion form")
ax.set_xlabel("emitter count n0")
ax.set_ylabel("linewidth FWHM [1/ps]")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "emitter_scaling.svg")
print("wrote", OUT / "emitter_scaling.svg")
