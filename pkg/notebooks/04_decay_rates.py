"""
Measuring a dispersive decay rate
=================================

The Cauchy problem is solved exactly in frequency space, one small matrix
exponential per lattice point.  The sup norm of the solution is sampled on a
geometric time grid and a power law is fitted to it.  In one space dimension
the thermo-elastic solution decays like ``(1+t)^(-1/2)``.
"""

import numpy as np

from thermoelastic.evolve import EXPERIMENTS, run_decay

cfg = EXPERIMENTS["1d"]
run = run_decay(cfg)
fit = run.fit
print(f"fitted exponent {fit.exponent:.4f}  (95% CI [{fit.ci_low:.4f}, {fit.ci_high:.4f}])")
print(f"expected {cfg.expected} +- {cfg.tolerance}; spectral abscissa {run.spectral_abscissa:.2e}")

###############################################################################
# The normalised trace, every fifth sample.

for line in run.trace_csv().splitlines()[::5]:
    print(line)

###############################################################################
# Halving the frequency spacing leaves the exponent unchanged.

fine = run_decay(cfg, refine=True)
print(f"refined exponent {fine.fit.exponent:.4f}, change {abs(fine.fit.exponent - fit.exponent):.2e}")
print("local slopes:", np.round(np.diff(np.log(run.norms)) / np.diff(np.log1p(run.times)), 2)[::6])
