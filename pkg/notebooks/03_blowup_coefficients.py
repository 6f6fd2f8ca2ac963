"""
Eigenvalues near degenerate directions
======================================

Around the cubic corner direction ``(1, 1, 1)/sqrt(3)`` the double eigenvalue
of ``A(eta)`` splits linearly in the distance ``eps``.  Around a face
direction it splits quadratically.  Finite differences of the numerical
eigenvalues recover the predicted coefficients.
"""

import numpy as np

from thermoelastic.blowup import (
    ConicChart,
    UniplanarChart,
    conic_B1,
    conic_B1_measured,
    conic_split_fd,
    uniplanar_quadratic_fd,
)

lam, mu, tau = 2.0, 2.0, 8.0

###############################################################################
# Conic points
# ------------

chart = ConicChart(lam, mu, tau)
print("predicted |split|      ", abs(chart.split))
print("sqrt2 (-tau+2mu+lam)/3 ", abs(np.sqrt(2) * (-tau + 2 * mu + lam) / 3))
for phi in (0.3, 1.9, 4.0):
    print(f"  phi={phi}: finite difference {abs(conic_split_fd(lam, mu, tau, phi)):.10f}")

###############################################################################
# The first-order part of the system symbol in the chart frame, compared
# with a one-sided finite difference.

b1 = conic_B1(lam, mu, tau, 1.0, 0.7)
fd = conic_B1_measured(lam, mu, tau, 1.0, 1.0, 1.0, 0.7)
print("max |B1 - finite difference| =", np.max(np.abs(b1 - fd)))

###############################################################################
# Uniplanar points
# ----------------
# The quadratic coefficients are twice the eigenvalues of a 2x2 block built
# from ``C`` and the off-diagonal coefficient ``D'``.

uni = UniplanarChart(lam, mu, tau)
for phi in (0.4, 1.1):
    print(f"phi={phi}: predicted {2 * uni.block_eigs(phi)}, measured {uniplanar_quadratic_fd(lam, mu, tau, phi)}")
