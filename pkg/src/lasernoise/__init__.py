"""Stochastic simulator of nanolaser intensity and phase noise.

Exact birth-death sampling of the laser rate equations with a phase model
for the cavity field, plus the estimators (photon statistics, spectra,
linewidths), a small master-equation reference and analytic baselines used
to validate it.
"""

from .analytic import AnalyticLinewidth, below_threshold_reference, schawlow_townes
from .engine import (EngineOverrides, EventKind, FieldTrajectory, RateSet,
                     SystemState, apply_event, event_rates, lef_drift,
                     next_event, phase_kick, run_ensemble, simulate,
                     simulate_reference)
from .master_equation import (DensityOperator, HilbertConfig, Liouvillian,
                              build_generator, g2_zero_me, linewidth_me,
                              mean_photon_me, solve_steady, spectrum_me,
                              steady_state_density)
from .observables import (AutocorrelationEstimate, LinewidthEstimate,
                          PhotonStatistics, SpectrumEstimate, g1, linewidth,
                          photon_statistics, poisson_chi2_pvalue, spectrum,
                          subtract_mean_drift)
from .presets import PRESETS, preset
from .ratemodel import (LaserParams, MeanFieldState, MeanFieldTrajectory,
                        ValidityReport, default_burn_in, gamma_r,
                        integrate_mean_field, inversion_pump, mean_field_rhs,
                        relaxation_time, steady_state, validity_check)

__version__ = "0.1.0"
