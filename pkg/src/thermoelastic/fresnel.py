"""Fresnel (slowness) surfaces: sampling, planar cuts, singular points,
contact orders of curve sections and convexity of sheets.

Sheet ``j`` (0-based) is ``{eta / omega_j(eta)}`` with ``omega_j`` ascending,
so radii decrease with ``j`` and the last sheet is the inner one.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.spatial import cKDTree

from .media import positivity_check, sphere_points, symbol_at, symbol_batch


@dataclass
class FresnelSample:
    sheet: int
    eta: np.ndarray
    radius: float
    point: np.ndarray
    gap: float


class NonPositiveMedium(ValueError):
    pass


def _require_positive(medium):
    rep = positivity_check(medium, sample_count=500, refine=False)
    if not rep.positive:
        raise NonPositiveMedium(f"medium is not positive (min eigenvalue {rep.min_eig:.3g})")


def _newton_radius(medium, eta, j, r):
    """One Newton step on ``kappa_j(r eta) - 1`` (``d/dr = 2 kappa_j(eta) r``)."""
    k = np.linalg.eigvalsh(symbol_at(medium, r * eta))[j]
    return r - (k - 1.0) / (2.0 * k / r)


def membership_residual(medium, point):
    """``min_j |kappa_j(point) - 1|``; zero on the Fresnel surface."""
    return float(np.min(np.abs(np.linalg.eigvalsh(symbol_at(medium, point)) - 1.0)))


def sample_directions(medium, etas, newton=True):
    """Fresnel samples for every sheet at the given unit directions."""
    etas = np.asarray(etas, dtype=float)
    etas = etas / np.linalg.norm(etas, axis=1, keepdims=True)
    w = np.linalg.eigvalsh(symbol_batch(medium, etas))
    out = []
    n = medium.n
    for i, eta in enumerate(etas):
        gaps = np.diff(w[i]) if n > 1 else np.array([np.inf])
        for j in range(n):
            r = 1.0 / np.sqrt(w[i, j])
            if newton:
                r = _newton_radius(medium, eta, j, r)
            local = min(gaps[j - 1] if j > 0 else np.inf, gaps[j] if j < n - 1 else np.inf)
            out.append(FresnelSample(j, eta, float(r), r * eta, float(local)))
    return out


def sample_surface(medium, resolution):
    """Quasi-uniform samples of all sheets (``resolution`` directions)."""
    _require_positive(medium)
    return sample_directions(medium, sphere_points(medium.n, resolution))


def surface_to_csv(samples):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eta1", "eta2", "eta3", "radius", "sheet"])
    for s in samples:
        w.writerow([repr(float(x)) for x in s.eta] + [repr(s.radius), s.sheet])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# planar cuts


def parse_plane(spec):
    """Unit normal of a plane through the origin.

    Accepts ``x=0``/``y=0``/``z=0`` (also ``eta1=0`` etc.), ``n=a,b,c`` or a
    3-sequence.
    """
    if not isinstance(spec, str):
        n = np.asarray(spec, dtype=float)
        return n / np.linalg.norm(n)
    s = spec.replace(" ", "").lower()
    axes = {"x": 0, "y": 1, "z": 2, "eta1": 0, "eta2": 1, "eta3": 2}
    if s.startswith("n="):
        n = np.array([float(v) for v in s[2:].split(",")])
        return n / np.linalg.norm(n)
    name, _, val = s.partition("=")
    if name in axes and val in ("0", "0.0"):
        n = np.zeros(3)
        n[axes[name]] = 1.0
        return n
    raise ValueError(f"unsupported plane spec {spec!r}; use x=0, y=0, z=0 or n=a,b,c")


def plane_basis(normal):
    """In-plane orthonormal ``(u, v)`` with ``u`` the projection of the
    coordinate axis least aligned with the normal (lowest index on ties)."""
    normal = np.asarray(normal, dtype=float)
    k = int(np.argmin(np.abs(normal)))
    u = np.eye(3)[k] - normal[k] * normal
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    return u, v


@dataclass
class Polyline:
    sheet: int
    angle: np.ndarray
    x: np.ndarray
    y: np.ndarray


def planar_cut(medium, plane, resolution=720):
    """Per-sheet polylines of the Fresnel surface cut by a plane.

    Two-dimensional media ignore ``plane``.
    """
    _require_positive(medium)
    th = 2 * np.pi * np.arange(resolution) / resolution
    if medium.n == 2:
        etas = np.column_stack([np.cos(th), np.sin(th)])
        u, v = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    else:
        u, v = plane_basis(parse_plane(plane))
        etas = np.cos(th)[:, None] * u + np.sin(th)[:, None] * v
    w = np.linalg.eigvalsh(symbol_batch(medium, etas))
    lines = []
    for j in range(medium.n):
        r = 1.0 / np.sqrt(w[:, j])
        lines.append(Polyline(j, th, r * np.cos(th), r * np.sin(th)))
    return lines


def polylines_to_csv(lines):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["angle", "x", "y", "sheet"])
    for ln in lines:
        for a, x, y in zip(ln.angle, ln.x, ln.y):
            w.writerow([repr(float(a)), repr(float(x)), repr(float(y)), ln.sheet])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# singular points


@dataclass
class Singularity:
    direction: np.ndarray
    type: str
    sheets: tuple
    split_exponent: float | None
    points: list = field(default_factory=list)

    def to_dict(self):
        d = {"direction": [float(x) for x in self.direction], "type": self.type,
             "sheets": list(self.sheets),
             "split_exponent": None if self.split_exponent is None else float(self.split_exponent)}
        if self.points:
            d["points"] = [[float(x) for x in p] for p in self.points]
        return d


@dataclass
class SingularityCensus:
    global_degenerate: bool
    singularities: list

    def counts(self):
        out = {}
        for s in self.singularities:
            out[s.type] = out.get(s.type, 0) + 1
        return out

    def to_json(self):
        return json.dumps({"global_degenerate": self.global_degenerate,
                           "counts": self.counts(),
                           "singularities": [s.to_dict() for s in self.singularities]},
                          indent=2)


def _rel_gap(medium, eta, j):
    a = symbol_at(medium, eta)
    w = np.linalg.eigvalsh(a)
    return (w[j + 1] - w[j]) / np.linalg.norm(a)


def _tangent_frame(eta):
    u, v = plane_basis(eta)
    return u, v


def _gaps_batch(medium, etas, j):
    a = symbol_batch(medium, etas / np.linalg.norm(etas, axis=1, keepdims=True))
    w = np.linalg.eigvalsh(a)
    return (w[:, j + 1] - w[:, j]) / np.linalg.norm(a, axis=(1, 2))


#: 5 x 5 pattern of the compass search in tangent coordinates
_PATTERN = np.array([(x, y) for x in np.linspace(-1, 1, 5) for y in np.linspace(-1, 1, 5)])
_CENTRE = 12


def _refine_batch(medium, starts, j, step, min_step=1e-13, max_iter=600, give_up=1e-4):
    """Vectorised compass search for minima of the ``(j, j+1)`` relative gap.

    Every start probes a 5 x 5 tangent pattern of half-width ``step``, moves
    to the best point and halves the step when the centre is best.  The gap
    is not smooth at conic points, so a derivative-free search is used.
    Starts whose step has collapsed to ``1e-6`` while the gap is still above
    ``give_up`` are frozen early (non-touching minima).
    """
    c = np.array(starts, dtype=float)
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    r = np.full(len(c), float(step))
    g = _gaps_batch(medium, c, j)
    active = np.ones(len(c), dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        e = c[idx]
        k = np.argmin(np.abs(e), axis=1)
        u = np.eye(3)[k] - e[np.arange(len(e)), k][:, None] * e
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        v = np.cross(e, u)
        pts = (e[:, None, :] + r[idx, None, None]
               * (_PATTERN[None, :, :1] * u[:, None, :] + _PATTERN[None, :, 1:] * v[:, None, :]))
        pts /= np.linalg.norm(pts, axis=2, keepdims=True)
        gp = _gaps_batch(medium, pts.reshape(-1, 3), j).reshape(len(idx), -1)
        best = np.argmin(gp, axis=1)
        # keep the centre on ties so that the step can shrink
        best = np.where(gp[np.arange(len(idx)), best] < gp[:, _CENTRE], best, _CENTRE)
        c[idx] = pts[np.arange(len(idx)), best]
        g[idx] = gp[np.arange(len(idx)), best]
        r[idx] = np.where(best == _CENTRE, 0.5 * r[idx], r[idx])
        active[idx] = (r[idx] > min_step) & ~((r[idx] < 1e-6) & (g[idx] > give_up))
    return c, g


def _refine(medium, eta0, j, step=1e-2):
    """Refine a single start; returns the direction and its relative gap."""
    c, g = _refine_batch(medium, [eta0], j, step)
    return c[0], float(g[0])


RAY_EPS = np.geomspace(1e-4, 1e-2, 7)


def split_exponents(medium, eta, j, eps=RAY_EPS, rays=8):
    """Fitted exponents of the ``(j, j+1)`` gap along ``rays`` geodesic rays,
    plus the largest relative gap seen along the flattest ray."""
    u, v = _tangent_frame(eta)
    exps, flat = [], np.inf
    for k in range(rays):
        a = 2 * np.pi * k / rays
        d = np.cos(a) * u + np.sin(a) * v
        g = np.array([_rel_gap(medium, np.cos(e) * eta + np.sin(e) * d, j) for e in eps])
        flat = min(flat, float(g[-1]))
        if np.all(g > 0):
            exps.append(np.polyfit(np.log(eps), np.log(g), 1)[0])
        else:
            exps.append(np.inf)
    return np.array(exps), flat


def classify_split(exponent):
    if 0.8 <= exponent <= 1.2:
        return "conic"
    if 1.8 <= exponent <= 2.2:
        return "uniplanar"
    return "other"


def _geodesic(eta, d, s):
    return np.cos(s) * eta + np.sin(s) * d


def _ring_minimum(medium, eta, j, rho, count=72):
    """Smallest relative gap on the ring of geodesic radius ``rho`` and the
    direction (unit tangent) where it is attained, plus the ring median."""
    u, v = _tangent_frame(eta)

    def gap(a):
        return _rel_gap(medium, _geodesic(eta, np.cos(a) * u + np.sin(a) * v, rho), j)

    al = 2 * np.pi * np.arange(count) / count
    g = np.array([gap(a) for a in al])
    k = int(np.argmin(g))
    h = 2 * np.pi / count
    res = minimize_scalar(gap, bounds=(al[k] - h, al[k] + h), method="bounded",
                          options={"xatol": 1e-13})
    a = res.x
    return float(res.fun), np.cos(a) * u + np.sin(a) * v, float(np.median(g))


def _project_to_curve(medium, q, d, j, width):
    """Move ``q`` perpendicular to the tangent ``d`` onto the gap minimum."""
    w = np.cross(q, d)
    w /= np.linalg.norm(w)
    res = minimize_scalar(lambda s: _rel_gap(medium, _geodesic(q, w, s), j),
                          bounds=(-width, width), method="bounded", options={"xatol": 1e-14})
    return _geodesic(q, w, res.x), float(res.fun)


def trace_degenerate_curve(medium, eta, j, step=0.02, max_steps=2000):
    """Follow a curve of degenerate directions through ``eta`` by continuation.

    Stops when the curve closes up or the gap leaves the degenerate set.
    """
    _, d, _ = _ring_minimum(medium, eta, j, step)
    pts = [eta]
    p = eta
    for _ in range(max_steps):
        q = _geodesic(p, d, step)
        q, val = _project_to_curve(medium, q, np.cross(np.cross(p, d), q), j, step)
        if val > 1e-6:
            break
        t = q - p - ((q - p) @ q) * q
        d = t / np.linalg.norm(t)
        pts.append(q)
        p = q
        if len(pts) > 3 and np.linalg.norm(q - eta) < 0.75 * step:
            break
    return np.array(pts)


def detect_singularities(medium, resolution=80000, tol=1e-8, global_fraction=0.5,
                         ring=1e-2, ring_ratio=1e-3):
    """Locate directions where adjacent sheets touch.

    Candidates are grid-local minima of the relative gap, refined together
    by a compass search in tangent coordinates; a refined gap below ``tol`` counts as
    a touching point.  The type comes from the median gap exponent along 8
    rays.  A point is part of a curve of degenerate directions when the gap
    on a small ring around it drops to (almost) zero; such curves are traced
    and reported once each, as type ``curve``.  Media degenerate at more
    than ``global_fraction`` of the grid get a global flag instead.
    """
    _require_positive(medium)
    if medium.n != 3:
        raise ValueError("singularity detection is implemented for n = 3")
    etas = sphere_points(3, resolution)
    a = symbol_batch(medium, etas)
    w = np.linalg.eigvalsh(a)
    norms = np.linalg.norm(a, axis=(1, 2))
    gaps = np.diff(w, axis=1) / norms[:, None]
    if np.mean(np.min(gaps, axis=1) <= tol) > global_fraction:
        return SingularityCensus(True, [])
    tree = cKDTree(etas)
    _, nbr = tree.query(etas, k=11)
    spacing = np.sqrt(4 * np.pi / resolution)
    out, curves = [], []
    for j in range(2):
        g = gaps[:, j]
        is_min = np.all(g[:, None] <= g[nbr[:, 1:]], axis=1)
        starts = np.flatnonzero(is_min & (g < 0.5 * np.median(g)))
        starts = starts[np.argsort(g[starts], kind="stable")]
        ends, vals = _refine_batch(medium, etas[starts], j, 2 * spacing)
        for i, eta, val in zip(starts, ends, vals):
            if val > tol:
                continue
            if any(cj == j and np.min(np.linalg.norm(c - etas[i], axis=1)) < 0.05
                   for c, cj in curves):
                continue
            if any(s.sheets[0] == j and np.linalg.norm(eta - s.direction) < 1e-4 for s in out):
                continue
            lo, _, med = _ring_minimum(medium, eta, j, ring)
            if lo < ring_ratio * med:
                pts = trace_degenerate_curve(medium, eta, j)
                curves.append((pts, j))
                out.append(Singularity(eta, "curve", (j, j + 1), None, points=list(pts)))
                continue
            ex, _ = split_exponents(medium, eta, j)
            med_ex = float(np.median(ex))
            out.append(Singularity(eta, classify_split(med_ex), (j, j + 1), med_ex))
    # curves found before a nearby isolated candidate cannot absorb it; drop
    # point entries that actually lie on a traced curve
    keep = []
    for s in out:
        if s.type != "curve" and any(cj == s.sheets[0] and np.min(np.linalg.norm(c - s.direction, axis=1)) < 0.05
                                     for c, cj in curves):
            continue
        keep.append(s)
    return SingularityCensus(False, keep)


# ---------------------------------------------------------------------------
# contact orders


@dataclass
class ContactOrder:
    """Contact order of a curve with its tangent line.

    ``value`` is set when two consecutive stencil widths agree; otherwise
    ``interval = (k_min, 6)``.
    """

    value: int | None
    interval: tuple | None
    per_h: dict

    def __int__(self):
        if self.value is None:
            raise ValueError(f"contact order undetermined, interval {self.interval}")
        return self.value


def _order_at(curve, t0, h, degree, max_order, npts):
    t = np.linspace(-h, h, npts)
    pts = np.array([curve(t0 + s) for s in t])
    p0 = np.asarray(curve(t0), dtype=float)
    scale = max(np.max(np.abs(pts)), 1e-300)
    x = t / h
    cx = np.polynomial.polynomial.polyfit(x, pts[:, 0] - p0[0], degree)
    cy = np.polynomial.polynomial.polyfit(x, pts[:, 1] - p0[1], degree)
    tan = np.array([cx[1], cy[1]])
    tn = np.linalg.norm(tan)
    if tn == 0:
        return None
    tan /= tn
    # coefficients of the normal deviation, already multiplied by h^k
    dev = np.abs(tan[0] * cy - tan[1] * cx)
    noise = 1e3 * np.finfo(float).eps * scale
    total = np.sum(dev[2:])
    for k in range(2, max_order + 1):
        if dev[k] > noise and dev[k] > 1e-6 * total:
            return k
    return None


def contact_order(curve, t0, hs=(1e-2, 1e-3, 1e-4), degree=8, max_order=6, npts=41):
    """Order of contact between a planar curve and its tangent at ``t0``.

    ``curve`` maps a parameter to ``(x, y)`` and is evaluated on centred
    stencils of half-width ``h``; the deviation from the tangent line is
    fitted by a degree-``degree`` polynomial and the first significant
    coefficient of order ``>= 2`` is the estimate.  Orders above
    ``max_order`` are reported as ``max_order``.
    """
    per_h = {h: _order_at(curve, t0, h, degree, max_order, npts) for h in hs}
    vals = [per_h[h] for h in hs]
    for a, b in zip(vals[:-1], vals[1:]):
        if a is not None and a == b:
            return ContactOrder(a, None, per_h)
    known = [v for v in vals if v is not None]
    kmin = min(known) if known else 2
    return ContactOrder(None, (kmin, max_order), per_h)


def signed_curvature(curve, t, h=1e-4):
    p = np.array([curve(t + k * h) for k in (-2, -1, 0, 1, 2)], dtype=float)
    d1 = (p[0] - 8 * p[1] + 8 * p[3] - p[4]) / (12 * h)
    d2 = (-p[0] + 16 * p[1] - 30 * p[2] + 16 * p[3] - p[4]) / (12 * h * h)
    return (d1[0] * d2[1] - d1[1] * d2[0]) / np.linalg.norm(d1) ** 3


def sugimoto_index(curve, t_range=(0.0, 2 * np.pi), samples=720, max_order=6):
    """Maximal contact order of a closed curve with its tangent lines.

    Curvature zeros are located by sign changes (and near-zero minima of
    ``|k|``) on a grid, refined, and their contact orders computed; a curve
    without curvature zeros has index 2.
    """
    ts = np.linspace(*t_range, samples, endpoint=False)
    k = np.array([signed_curvature(curve, t) for t in ts])
    scale = np.max(np.abs(k))
    zeros = []
    for i in range(samples):
        a, b = ts[i], ts[(i + 1) % samples] + (t_range[1] - t_range[0]) * (i + 1 == samples)
        ka, kb = k[i], k[(i + 1) % samples]
        if ka == 0:
            zeros.append(a)
        elif ka * kb < 0:
            zeros.append(brentq(lambda t: signed_curvature(curve, t), a, b, xtol=1e-14))
    ak = np.abs(k)
    for i in range(samples):
        if ak[i] < 1e-3 * scale and ak[i] <= ak[i - 1] and ak[i] <= ak[(i + 1) % samples]:
            res = minimize(lambda t: abs(signed_curvature(curve, t[0])), [ts[i]],
                           method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-16})
            if res.fun < 1e-6 * scale:
                zeros.append(float(res.x[0]))
    best, detail = 2, []
    for t0 in zeros:
        c = contact_order(curve, t0, max_order=max_order)
        val = c.value if c.value is not None else c.interval[0]
        detail.append((float(t0), c))
        best = max(best, val)
    return best, detail


# ---------------------------------------------------------------------------
# curves from the cubic and hexagonal analysis


def cubic_hyperbolic_section(lam, mu, tau, which="diagonal"):
    """Section of the Fresnel sheet over a cubic hyperbolic great circle.

    ``which="axis"``: circle ``eta_3 = 0`` with eigenvalue ``mu``;
    ``which="diagonal"``: circle in the plane ``eta_2 = eta_3`` with
    eigenvalue ``mu + (tau - lam - 2 mu)/2 sin^2 phi``.
    Returns a parametrised planar curve ``phi -> (x, y)``.
    """
    if which == "axis":
        def kap(phi):
            return mu
    elif which == "diagonal":
        def kap(phi):
            return mu + 0.5 * (tau - lam - 2 * mu) * np.sin(phi) ** 2
    else:
        raise ValueError("which must be 'axis' or 'diagonal'")

    def curve(phi):
        r = 1.0 / np.sqrt(kap(phi))
        return np.array([r * np.cos(phi), r * np.sin(phi)])

    return curve


def uniplanar_indicatrix(lam, mu, tau, branch=1, printed=False):
    """Indicator curve of a cubic uniplanar point.

    ``rho(phi)^2 (mu + b(phi)) = 1`` with ``b = (C ± sqrt(C^2 cos^2 2phi +
    D'^2 sin^2 2phi))/2`` from the corrected second-order block.  With
    ``printed=True`` the printed ``mu + C ± sqrt(C^2 cos^2 + D^2 sin^2)``
    with ``D = lam + mu`` is used instead.  Returns ``None`` when
    ``mu + b`` changes sign (the section is not a closed curve).
    """
    c = ((tau - mu) ** 2 - (lam + mu) ** 2) / (tau - mu)
    if printed:
        d, half = lam + mu, 1.0
    else:
        d, half = (lam + mu) * (tau - lam - 2 * mu) / (tau - mu), 0.5

    def level(phi):
        root = np.sqrt(c * c * np.cos(2 * phi) ** 2 + d * d * np.sin(2 * phi) ** 2)
        return mu + half * (c + branch * root)

    grid = level(np.linspace(0, 2 * np.pi, 2000))
    if np.any(grid <= 0) and np.any(grid >= 0):
        return None
    sgn = np.sign(grid[0])

    def curve(phi):
        r = 1.0 / np.sqrt(sgn * level(phi))
        return np.array([r * np.cos(phi), r * np.sin(phi)])

    return curve


# ---------------------------------------------------------------------------
# convexity


@dataclass
class ConvexityReport:
    convex: bool
    min_curvature: float
    max_curvature: float


def _as_points(samples):
    if isinstance(samples, np.ndarray):
        return samples
    if samples and isinstance(samples[0], FresnelSample):
        return np.array([s.point for s in samples])
    return np.asarray(samples, dtype=float)


def convexity_check(samples, neighbours=24, singular_tol=1e-6):
    """Principal curvatures of a sampled closed sheet by local quadric fits.

    Normals point towards the origin (the sheets are star-shaped), so a
    sphere of radius ``r`` has curvatures ``1/r``.  ``FresnelSample`` input
    is rejected if any sample sits at a singular point (gap below
    ``singular_tol``).
    """
    if samples is not None and len(samples) and isinstance(samples[0], FresnelSample):
        if min(s.gap for s in samples) < singular_tol:
            raise ValueError("sheet sample contains a singular point")
    pts = _as_points(samples)
    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=neighbours + 1)
    kmin, kmax = np.inf, -np.inf
    for i, p in enumerate(pts):
        nb = pts[idx[i]] - p
        # normal from the neighbourhood covariance, oriented inwards
        _, _, vt = np.linalg.svd(nb - nb.mean(axis=0))
        nrm = vt[2]
        if nrm @ p > 0:
            nrm = -nrm
        u, v = vt[0], np.cross(nrm, vt[0])
        x, y, z = nb @ u, nb @ v, nb @ nrm
        m = np.column_stack([x * x, x * y, y * y, x, y])
        coef, *_ = np.linalg.lstsq(m, z, rcond=None)
        a, b, c, dx, dy = coef
        # shape operator of the graph z(x, y) at the origin
        g = np.array([[1 + dx * dx, dx * dy], [dx * dy, 1 + dy * dy]])
        hmat = np.array([[2 * a, b], [b, 2 * c]]) / np.sqrt(1 + dx * dx + dy * dy)
        k = np.linalg.eigvals(np.linalg.solve(g, hmat)).real
        kmin, kmax = min(kmin, k.min()), max(kmax, k.max())
    return ConvexityReport(bool(kmin > 0), float(kmin), float(kmax))


def sheet_points(medium, j, resolution):
    """Points of sheet ``j`` on a quasi-uniform direction grid."""
    etas = sphere_points(medium.n, resolution)
    w = np.linalg.eigvalsh(symbol_batch(medium, etas))
    return etas / np.sqrt(w[:, j])[:, None], np.min(np.abs(np.diff(w, axis=1)), axis=1)


def hexagonal_hyperbolic_sheet(tau1, lam1, mu, resolution):
    """The genuine hyperbolic sheet ``{kappa_h(eta)^{-1/2} eta}`` of hexagonal media
    with ``kappa_h = (tau1 - lam1)/2 (eta1^2 + eta2^2) + mu eta3^2``."""
    etas = sphere_points(3, resolution)
    kap = 0.5 * (tau1 - lam1) * (etas[:, 0] ** 2 + etas[:, 1] ** 2) + mu * etas[:, 2] ** 2
    return etas / np.sqrt(kap)[:, None]


def singularities_to_json(census):
    return census.to_json()
