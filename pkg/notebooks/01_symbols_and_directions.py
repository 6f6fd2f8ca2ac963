"""
Symbols, direction classes and eigenvalue asymptotics
=====================================================

A cubic medium with moduli ``lam = mu = 2`` and ``tau = 8`` is coupled to
heat conduction with ``gamma = kappa = 1``.  We classify a few frequency
directions, look at the spectrum of the first-order symbol ``B(xi)`` and
compare it with the small- and large-frequency expansions.
"""

import numpy as np

from thermoelastic.media import MediumSpec, symbol_at
from thermoelastic.spectral import classify
from thermoelastic.symbol import (
    build_B,
    large_xi_expansion,
    loglog_slope,
    match_eigenvalues,
    numeric_eigenvalues,
    predicted_large,
    predicted_small,
    small_xi_expansion,
)

medium = MediumSpec.cubic(lam=2, mu=2, tau=8)
gamma, kappa = 1.0, 1.0

###############################################################################
# Direction classes
# -----------------
# A direction is hyperbolic when one coupling ``a_j`` vanishes, parabolic when
# none does, and degenerate when ``A(eta)`` has a repeated eigenvalue.

for eta in ([1, 2, 3], [0.6, 0.8, 0.0], [1, 1, 1], [1, 0, 0]):
    rep = classify(medium, gamma, eta)
    print(f"eta={eta!s:16} kind={rep.kind:11} eigenvalues={np.round(rep.eigenvalues, 4)}")

###############################################################################
# The first-order symbol
# ----------------------
# ``trace B = i kappa |xi|^2`` and ``det B = (-1)^n i kappa |xi|^2 det A``.

xi = 1.7 * np.array([1, 2, 3]) / np.sqrt(14)
sys_ = build_B(medium, gamma, kappa, xi)
print("trace B       ", np.trace(sys_.B))
print("i kappa |xi|^2", 1j * kappa * xi @ xi)
print("det B         ", np.linalg.det(sys_.B))
print("-i kappa |xi|^2 det A", -1j * kappa * (xi @ xi) * np.linalg.det(symbol_at(medium, xi)))

###############################################################################
# Asymptotic expansions
# ---------------------
# The residual of the small-frequency expansion shrinks like ``|xi|^3`` and
# that of the large-frequency expansion like ``|xi|^-1``.

rep = classify(medium, gamma, [1, 2, 3])
small = small_xi_expansion(rep, gamma, kappa)
large = large_xi_expansion(rep, gamma, kappa)
print("b0 + 2 sum b_j =", small.b0 + 2 * np.sum(small.b))
print("heat offset at large |xi| =", large.heat_offset)


def residual(r, predict, coeffs):
    p = predict(rep, gamma, kappa, r, coeffs)
    return np.max(np.abs(match_eigenvalues(p, numeric_eigenvalues(medium, gamma, kappa, rep.eta, r)) - p))


rs = np.geomspace(1e-3, 1e-2, 8)
print("small-|xi| residual slope", loglog_slope(rs, [residual(r, predicted_small, small) for r in rs]))
rs = np.geomspace(1e2, 1e3, 8)
print("large-|xi| residual slope", loglog_slope(rs, [residual(r, predicted_large, large) for r in rs]))
