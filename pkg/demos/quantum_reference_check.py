"""Cross-checking the stochastic sampler against the quantum reference.

For a single emitter everything is exactly computable from the Lindblad
generator: photon moments from the steady-state density operator and the
field correlation from quantum regression.  This script overlays both
methods at one pump: the photon statistics coincide to well under a
percent, while the field correlation of the stochastic phase model decays
faster at few-photon occupation -- worth knowing before trusting absolute
linewidths in that regime (ratios and trends are unaffected).

    python demos/quantum_reference_check.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import lasernoise as ln
from lasernoise.master_equation import (g2_zero_me, mean_photon_me,
                                        solve_steady, spectrum_me)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

p = ln.preset("five_emitter", n0=1, pump=0.63)
rho, gen = solve_steady(p)
acf_me, spec_me = spectrum_me(gen, rho, max_lag=400.0, n_lags=800)

burn = ln.default_burn_in(p)
ens = ln.run_ensemble(p, n_traj=12, base_seed=900, t_end=burn + 20000.0,
                      burn_in=burn, sample_dt=0.5, threads=2)
stats = ln.photon_statistics(ens)
acf = ln.g1(ens, max_lag=400.0)
spec = ln.spectrum(acf)

print(f"mean photons:  stochastic {stats.mean:.4f}   "
      f"quantum {mean_photon_me(rho):.4f}")
print(f"g2(0):         stochastic {stats.g2_zero:.4f}   "
      f"quantum {g2_zero_me(rho):.4f}")

fig, axes = plt.subplots(1, 2, figsize=(9, 3.4))
axes[0].semilogy(acf_me.lags, np.abs(acf_me.values), label="quantum")
axes[0].semilogy(acf.lags, np.abs(acf.values), "--", label="stochastic")
axes[0].set_xlabel("lag [ps]")
axes[0].set_ylabel("|g1|")
axes[0].set_ylim(1e-3, 1.1)
axes[0].legend(fontsize=8)
axes[1].plot(spec_me.omega, spec_me.values / spec_me.values.max(),
             label="quantum")
axes[1].plot(spec.omega, spec.values / spec.values.max(), "--",
             label="stochastic")
axes[1].set_xlim(-0.3, 0.3)
axes[1].set_xlabel("omega [1/ps]")
axes[1].set_ylabel("S(omega), peak-normalized")
axes[1].legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "quantum_reference_check.svg")
print("wrote", OUT / "quantum_reference_check.svg")
