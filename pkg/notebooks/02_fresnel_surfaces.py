"""
Fresnel surfaces and their singular points
==========================================

The Fresnel (slowness) surface collects the points ``eta / omega_j(eta)``.
For cubic media its sheets touch at the corner directions (conic points)
and at the face directions (uniplanar points).  Hexagonal media have
rotationally symmetric sheets that touch along whole circles.
"""

import numpy as np

from thermoelastic.fresnel import (
    convexity_check,
    cubic_hyperbolic_section,
    detect_singularities,
    hexagonal_hyperbolic_sheet,
    planar_cut,
    sugimoto_index,
)
from thermoelastic.media import MediumSpec

cubic = MediumSpec.cubic(lam=1, mu=1, tau=4)
hexagonal = MediumSpec.hexagonal(4, 10, 2, 4, 2)

###############################################################################
# A planar cut
# ------------
# In the plane ``z = 0`` the two slow sheets meet on the coordinate axes.

lines = planar_cut(cubic, "z=0", 720)
gap = np.abs(np.hypot(lines[0].x, lines[0].y) - np.hypot(lines[1].x, lines[1].y))
print("angles where sheets 0 and 1 touch:", np.degrees(lines[0].angle[gap < 1e-12]))

###############################################################################
# Singularity census
# ------------------

for name, m in (("cubic", cubic), ("hexagonal", hexagonal)):
    census = detect_singularities(m)
    print(name, census.counts())
    for s in census.singularities[:3]:
        print("   ", s.type, np.round(s.direction, 4), "sheets", s.sheets)

###############################################################################
# Contact orders
# --------------
# Sections over hyperbolic great circles are convex curves of index 2, and the
# genuine hyperbolic sheet of the hexagonal medium is strictly convex.

for which in ("axis", "diagonal"):
    print(which, "section index", sugimoto_index(cubic_hyperbolic_section(1, 1, 4, which))[0])
rep = convexity_check(hexagonal_hyperbolic_sheet(4, 2, 2, 1500))
print("hexagonal sheet convex:", rep.convex, "curvature range", rep.min_curvature, rep.max_curvature)
