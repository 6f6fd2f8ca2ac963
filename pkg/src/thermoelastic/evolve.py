"""Exact propagation of the thermo-elastic Cauchy problem in frequency space
and measurement of dispersive decay.

The solver works with the energy variables ``W = (sqrt(A(xi)) U, U_t, theta)``
(hats dropped).  In these variables the system reads ``W_t = G(xi) W`` with

    G = [[ 0,        sqrt(A), 0              ],
         [-sqrt(A),  0,       -i gamma xi    ],
         [ 0,       -i gamma xi^T, -kappa |xi|^2]],

which is similar to ``i B(xi)`` via the change of variables
``V_pm = M^T(P -+ i Q)`` (``P = sqrt(A) U``, ``Q = U_t``), so the spectrum of
``G`` is ``i spec B``.  Using ``G`` avoids choosing eigenframes, which are
discontinuous at degenerate directions, while ``|W|^2 = E`` is the energy
density (``dE/dt = -2 kappa |xi|^2 |theta|^2``).

Frequencies live on a regular lattice ``xi = c + F (m * d)`` with an
orthonormal frame ``F``, integer offsets ``m`` and spacing ``d``; only lattice
points inside the data support are stored.  Physical fields on the dual grid
are periodic with period ``2 pi / d``; a co-moving window (a spatial shift
``x_c``) follows each mode group so that the period only has to contain the
group's own footprint.
"""
from __future__ import annotations

import json
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import expm

from .media import MediumSpec, symbol_batch
from .symbol import contour_projection

COND_LIMIT = 1e8


class AliasingWarning(UserWarning):
    pass


class EmptySupportError(ValueError):
    pass


class InsufficientSpanError(ValueError):
    pass


# ---------------------------------------------------------------------------
# symbols


def _symbol(medium, xis):
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    if medium.n == 1:
        return medium.params["tau"] * xis[:, :, None] * xis[:, None, :]
    return symbol_batch(medium, xis)


def sqrt_symbol(medium, xis):
    """``sqrt(A(xi))`` for an ``(m, n)`` array of frequencies."""
    w, v = np.linalg.eigh(_symbol(medium, xis))
    return np.einsum("mij,mj,mkj->mik", v, np.sqrt(np.clip(w, 0.0, None)), v)


def generator(medium, gamma, kappa, xis):
    """Generator ``G(xi)`` of ``W_t = G W`` for each row of ``xis``."""
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    m, n = xis.shape
    g = np.zeros((m, 2 * n + 1, 2 * n + 1), dtype=complex)
    s = sqrt_symbol(medium, xis)
    g[:, :n, n:2 * n] = s
    g[:, n:2 * n, :n] = -s
    g[:, n:2 * n, 2 * n] = -1j * gamma * xis
    g[:, 2 * n, n:2 * n] = -1j * gamma * xis
    g[:, 2 * n, 2 * n] = -kappa * np.einsum("mi,mi->m", xis, xis)
    return g


def frames(medium, xis):
    """Gauge-fixed eigenframes ``(kappa_j(xi), M(xi))`` (largest entry of
    each eigenvector made positive)."""
    w, v = np.linalg.eigh(_symbol(medium, xis))
    idx = np.argmax(np.abs(v), axis=1)
    sgn = np.sign(np.take_along_axis(v, idx[:, None, :], axis=1))
    sgn[sgn == 0] = 1
    return w, v * sgn


def w_to_v(medium, xis, w):
    """Energy variables to the diagonalised variables ``V = (V_+, V_-, theta)``."""
    n = medium.n
    _, m = frames(medium, xis)
    p = np.einsum("mji,mj->mi", m, w[:, :n])
    q = np.einsum("mji,mj->mi", m, w[:, n:2 * n])
    return np.concatenate([p - 1j * q, -p - 1j * q, w[:, 2 * n:]], axis=1)


def v_to_w(medium, xis, v):
    n = medium.n
    _, m = frames(medium, xis)
    vp, vm = v[:, :n], v[:, n:2 * n]
    p = np.einsum("mij,mj->mi", m, (vp - vm) / 2)
    q = np.einsum("mij,mj->mi", m, 1j * (vp + vm) / 2)
    return np.concatenate([p, q, v[:, 2 * n:]], axis=1)


# ---------------------------------------------------------------------------
# lattices, cutoffs and data


@dataclass
class FrequencyLattice:
    """Regular frequency lattice ``center + frame @ (m * spacing)``."""

    shape: tuple
    spacing: np.ndarray
    center: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        self.shape = tuple(int(s) for s in self.shape)
        self.spacing = np.asarray(self.spacing, dtype=float).reshape(-1)
        self.center = np.asarray(self.center, dtype=float).reshape(-1)
        self.frame = np.asarray(self.frame, dtype=float)

    @property
    def n(self):
        return len(self.shape)

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def period(self):
        return 2 * np.pi / self.spacing

    @classmethod
    def centred(cls, shape, spacing):
        n = len(shape)
        spacing = np.broadcast_to(np.asarray(spacing, dtype=float), (n,))
        return cls(shape, spacing, np.zeros(n), np.eye(n))

    @classmethod
    def oriented(cls, direction, radius, shape, spacing):
        """3D lattice whose third axis is ``direction``, centred at
        ``radius * direction``."""
        from .fresnel import plane_basis

        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        u, v = plane_basis(d)
        spacing = np.broadcast_to(np.asarray(spacing, dtype=float), (3,))
        return cls(shape, spacing, radius * d, np.column_stack([u, v, d]))

    def refined(self):
        """Twice the points per axis at half the spacing (same frequency box,
        doubled physical period)."""
        return FrequencyLattice(tuple(2 * s for s in self.shape), self.spacing / 2,
                                self.center, self.frame)

    def offsets(self):
        """Integer offsets ``m`` (centred) of every lattice point, C order."""
        axes = [np.arange(s) - s // 2 for s in self.shape]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def points(self, offsets=None):
        if offsets is None:
            offsets = self.offsets()
        return self.center + (offsets * self.spacing) @ self.frame.T

    def to_dict(self):
        return {"shape": list(self.shape), "spacing": self.spacing.tolist(),
                "center": self.center.tolist(), "frame": self.frame.tolist()}


def smooth_step(x):
    """C-infinity step: 0 for ``x <= 0``, 1 for ``x >= 1``."""
    x = np.asarray(x, dtype=float)
    f = lambda s: np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    a, b = f(x), f(1 - x)
    return a / (a + b)


@dataclass(frozen=True)
class CapCutoff:
    """0-homogeneous direction cutoff: 1 within ``inner * half_angle`` of
    ``center``, 0 beyond ``half_angle``."""

    center: tuple
    half_angle: float
    inner: float = 0.5

    def __call__(self, xis):
        c = np.asarray(self.center, dtype=float)
        c = c / np.linalg.norm(c)
        r = np.linalg.norm(xis, axis=1)
        cosang = np.where(r > 0, xis @ c / np.where(r > 0, r, 1), 1.0)
        ang = np.arccos(np.clip(cosang, -1, 1))
        a0 = self.inner * self.half_angle
        return 1 - smooth_step((ang - a0) / (self.half_angle - a0))


@dataclass(frozen=True)
class RadialCutoff:
    """Radial cutoff in ``|xi|``.

    ``kind="high"``: ``chi(s) = 0`` for ``s <= eps``, 1 for ``s >= 2 eps``;
    ``kind="low"``: ``1 - chi``; ``kind="band"``: 1 on
    ``|s - r0| <= width/4``, 0 for ``|s - r0| >= width/2``.
    """

    kind: str
    eps: float = 0.0
    r0: float = 0.0
    width: float = 0.0

    def __call__(self, xis):
        s = np.linalg.norm(xis, axis=1)
        if self.kind == "high":
            return smooth_step((s - self.eps) / self.eps)
        if self.kind == "low":
            return 1 - smooth_step((s - self.eps) / self.eps)
        if self.kind == "band":
            q = self.width / 4
            return 1 - smooth_step((np.abs(s - self.r0) - q) / q)
        if self.kind == "gauss":
            return np.exp(-0.5 * (s / self.eps) ** 2)
        raise ValueError(f"unknown radial cutoff {self.kind!r}")


@dataclass
class SpectralData:
    """Energy-variable data ``W_hat`` stored on a pruned lattice."""

    lattice: FrequencyLattice
    index: np.ndarray
    values: np.ndarray

    def xis(self):
        return self.lattice.points(self.lattice.offsets()[self.index])

    def offsets(self):
        return self.lattice.offsets()[self.index]


def _field(spec, xis, shape):
    if spec is None:
        return np.zeros((len(xis),) + shape)
    if callable(spec):
        return np.asarray(spec(xis)).reshape((len(xis),) + shape)
    return np.broadcast_to(np.asarray(spec, dtype=complex), (len(xis),) + shape)


def make_data(lattice, profile, p=None, q=None, theta=None):
    """``W_hat_0 = profile(xi) * (p, q, theta)``; points where the profile
    vanishes are pruned.  ``p``, ``q`` are length-``n`` vectors or callables of
    the frequencies, ``theta`` a scalar or callable."""
    xis = lattice.points()
    prof = np.asarray(profile(xis), dtype=float)
    keep = np.flatnonzero(prof != 0)
    if keep.size == 0:
        raise EmptySupportError("data profile vanishes on the lattice")
    x = xis[keep]
    n = lattice.n
    w = np.concatenate([_field(p, x, (n,)), _field(q, x, (n,)),
                        _field(theta, x, ()).reshape(-1, 1)], axis=1).astype(complex)
    return SpectralData(lattice, keep, prof[keep, None] * w)


def microlocalize(data, psi=None, chi=None):
    """Multiply by a direction cutoff ``psi`` and a radial cutoff ``chi``."""
    xis = data.xis()
    f = np.ones(len(xis))
    if psi is not None:
        f = f * psi(xis)
    if chi is not None:
        f = f * chi(xis)
    keep = f != 0
    if not np.any(keep):
        raise EmptySupportError("empty support after microlocalisation")
    return SpectralData(data.lattice, data.index[keep], f[keep, None] * data.values[keep])


# ---------------------------------------------------------------------------
# propagation


@dataclass
class EvolutionState:
    """Energy-variable state ``W_hat(t, xi)`` on the stored lattice points."""

    medium: MediumSpec
    gamma: float
    kappa: float
    data: SpectralData
    t: float
    values: np.ndarray
    fallback_count: int = 0

    def V(self):
        """The diagonalised ``V`` variables (requires eigenframes)."""
        return w_to_v(self.medium, self.data.xis(), self.values)

    def energy(self):
        """``(2 pi)^-n int |W_hat|^2 d xi`` (the physical L2 norm squared)."""
        lat = self.data.lattice
        return float(np.sum(np.abs(self.values) ** 2) * np.prod(lat.spacing) / (2 * np.pi) ** lat.n)


def _pairwise_sum(x):
    """Pairwise tree reduction along axis 0 with a fixed topology."""
    x = np.asarray(x)
    while x.shape[0] > 1:
        if x.shape[0] % 2:
            x = np.concatenate([x, np.zeros((1,) + x.shape[1:], dtype=x.dtype)])
        x = x[0::2] + x[1::2]
    return x[0]


class Propagator:
    """Per-frequency spectral decomposition of ``G`` for a data set.

    Eigenvalues are sorted by ``Im lambda`` (``= Re nu``), so group labels
    refer to that ordering.  Points whose eigenvector matrix has condition
    number at least ``cond_limit`` are propagated with ``scipy.linalg.expm``
    and split into groups by contour-integral projections.
    """

    def __init__(self, medium, gamma, kappa, data, groups=None, cond_limit=COND_LIMIT,
                 dtype=np.complex128, chunk=65536):
        self.medium, self.gamma, self.kappa, self.data = medium, gamma, kappa, data
        m = 2 * medium.n + 1
        self.groups = [list(range(m))] if groups is None else [list(g) for g in groups]
        xis = data.xis()
        self.xis = xis
        npts = len(xis)
        self.lam = np.zeros((npts, m), dtype=complex)
        modes = np.zeros((npts, m, m), dtype=dtype)
        fallback = np.zeros(npts, dtype=bool)
        for s in range(0, npts, chunk):
            sl = slice(s, s + chunk)
            g = generator(medium, gamma, kappa, xis[sl])
            lam, r = np.linalg.eig(g)
            order = np.argsort(lam.imag, axis=1, kind="stable")
            lam = np.take_along_axis(lam, order, axis=1)
            r = np.take_along_axis(r, order[:, None, :], axis=2)
            cond = np.linalg.cond(r)
            bad = ~(np.isfinite(cond) & (cond < cond_limit))
            good = ~bad
            coef = np.zeros((len(lam), m), dtype=complex)
            if np.any(good):
                coef[good] = np.linalg.solve(r[good], data.values[sl][good][..., None])[..., 0]
            # modes[p, k, :] = R[:, k] * coef_k
            modes[sl] = (r * coef[:, None, :]).transpose(0, 2, 1)
            self.lam[sl] = lam
            fallback[sl] = bad
        self.modes = modes
        self.fallback = fallback
        self._fallback_setup()
        self.spectral_abscissa = float(np.max(self.lam.real))

    def _fallback_setup(self):
        idx = np.flatnonzero(self.fallback)
        self.fb_index = idx
        if idx.size == 0:
            self.fb_G = None
            self.fb_proj = None
            return
        g = generator(self.medium, self.gamma, self.kappa, self.xis[idx])
        self.fb_G = g
        proj = []
        for k, gk in enumerate(g):
            lam = self.lam[idx[k]]
            pk = []
            for grp in self.groups:
                if len(grp) == len(lam):
                    pk.append(np.eye(len(lam)))
                    continue
                centre = np.mean(lam[grp])
                others = [j for j in range(len(lam)) if j not in grp]
                spread = np.max(np.abs(lam[grp] - centre))
                gap = np.min(np.abs(lam[others] - centre))
                radius = 0.5 * (spread + gap)
                pk.append(contour_projection(gk, centre, radius))
            proj.append(pk)
        self.fb_proj = proj

    @property
    def fallback_count(self):
        return int(self.fb_index.size)

    def field_hat(self, t, group=None):
        """``W_hat(t)`` on the stored points, for one group (index into
        ``groups``) or the full field."""
        members = list(range(self.lam.shape[1])) if group is None else self.groups[group]
        e = np.exp(self.lam[:, members] * t)
        out = np.einsum("pk,pkc->pc", e, self.modes[:, members, :].astype(complex))
        if self.fb_G is not None:
            for k, i in enumerate(self.fb_index):
                w = expm(t * self.fb_G[k]) @ self.data.values[i]
                out[i] = w if group is None else self.fb_proj[k][group] @ w
        return out

    def state(self, t):
        return EvolutionState(self.medium, self.gamma, self.kappa, self.data, t,
                              self.field_hat(t), self.fallback_count)

    def group_velocity(self, group, t=0.0, max_points=20000, h=1e-6):
        """Energy-weighted mean of ``grad Re nu`` over a group's members
        (mean over the group, so merged pairs are smooth)."""
        members = self.groups[group]
        weight = np.sum(np.abs(self.modes[:, members, :]) ** 2, axis=2)
        weight = np.sum(weight * np.exp(2 * t * self.lam[:, members].real), axis=1)
        if not np.any(weight > 0):
            return np.zeros(self.medium.n)
        stride = max(1, len(weight) // max_points)
        sel = np.arange(0, len(weight), stride)
        x0 = self.xis[sel]
        w = weight[sel]
        n = self.medium.n
        grad = np.zeros((len(sel), n))
        for a in range(n):
            step = h * max(1.0, float(np.max(np.linalg.norm(x0, axis=1))))
            vals = []
            for sgn in (1, -1):
                xs = x0.copy()
                xs[:, a] += sgn * step
                lam = np.linalg.eigvals(generator(self.medium, self.gamma, self.kappa, xs))
                lam = np.sort(lam.imag, axis=1)  # Re nu, ascending
                vals.append(np.mean(lam[:, members], axis=1))
            grad[:, a] = (vals[0] - vals[1]) / (2 * step)
        return np.sum(grad * w[:, None], axis=0) / np.sum(w)


def propagate(medium, gamma, kappa, data, t, cond_limit=COND_LIMIT):
    """``EvolutionState`` at time ``t`` (per-frequency ``exp(t G)``)."""
    return Propagator(medium, gamma, kappa, data, cond_limit=cond_limit).state(t)


# ---------------------------------------------------------------------------
# physical fields and norms


@dataclass
class PhysicalField:
    magnitude: np.ndarray
    cell: np.ndarray
    shift: np.ndarray
    leakage: float


def physical_field(data, values, shift=None, pad=None):
    """Pointwise Euclidean norm of the physical field on the dual grid.

    ``shift`` moves the window centre to ``x_c`` (a phase ``exp(i x_c.xi)``);
    ``pad`` is a per-axis zero-padding factor (default: 4 in 1D, 2 per axis
    otherwise, i.e. at least 4 in total).  The magnitude is unaffected by the
    lattice centre (demodulation).  ``leakage`` is the energy fraction in
    the outer tenth of the window along any axis.
    """
    lat = data.lattice
    n = lat.n
    if pad is None:
        pad = 4 if n == 1 else 2
    pad = np.broadcast_to(np.asarray(pad, dtype=int), (n,))
    shape = tuple(int(s * p) for s, p in zip(lat.shape, pad))
    offs = data.offsets()
    pos = tuple((offs[:, a] % shape[a]) for a in range(n))
    xis = data.xis()
    phase = np.ones(len(xis), dtype=complex)
    if shift is not None:
        phase = np.exp(1j * (xis @ np.asarray(shift, dtype=float)))
    scale = np.prod(shape) * np.prod(lat.spacing) / (2 * np.pi) ** n
    mag2 = np.zeros(shape)
    dt = np.complex64 if values.dtype == np.complex64 else np.complex128
    for c in range(values.shape[1]):
        arr = np.zeros(shape, dtype=dt)
        arr[pos] = values[:, c] * phase
        f = np.fft.ifftn(arr)
        mag2 += (f.real.astype(float) ** 2 + f.imag.astype(float) ** 2)
    mag = np.sqrt(mag2) * scale
    cell = lat.period / np.asarray(shape)
    total = float(np.sum(mag2))
    leak = 0.0
    if total > 0:
        for a in range(n):
            k = max(1, shape[a] // 20)
            # fft ordering puts the window centre at index 0 and its edge
            # around shape // 2
            sl = [slice(None)] * n
            sl[a] = np.arange(shape[a] // 2 - k, shape[a] // 2 + k)
            leak = max(leak, float(np.sum(mag2[tuple(sl)]) / total))
    return PhysicalField(mag, cell, np.zeros(n) if shift is None else np.asarray(shift), leak)


def nyquist_fraction(data, values, cells=2):
    """Energy fraction on lattice points within ``cells`` of the box edge."""
    offs = data.offsets()
    half = np.asarray(data.lattice.shape) // 2
    lo = -half
    hi = np.asarray(data.lattice.shape) - half - 1
    near = np.any((offs - lo < cells) | (hi - offs < cells), axis=1)
    e = np.sum(np.abs(values) ** 2, axis=1)
    tot = float(np.sum(e))
    return float(np.sum(e[near]) / tot) if tot > 0 else 0.0


def physical_norms(state, q, shift=None, pad=None, warn=True):
    """``|| sqrt(A(D)) U, U_t, theta ||_q`` for ``q`` in ``{2, inf}``.

    ``q = 2`` is computed on the physical grid (Parseval makes it equal to
    the frequency-side norm).  Emits an ``AliasingWarning`` when more than
    1% of the energy sits within two lattice cells of the frequency box edge.
    """
    if q not in (2, np.inf, "inf"):
        raise ValueError("q must be 2 or inf")
    frac = nyquist_fraction(state.data, state.values)
    if warn and frac > 0.01:
        warnings.warn(f"aliasing: {frac:.1%} of the energy near the lattice edge", AliasingWarning)
    fld = physical_field(state.data, state.values, shift=shift, pad=pad)
    if q == 2:
        return float(np.sqrt(np.sum(fld.magnitude ** 2) * np.prod(fld.cell)))
    return float(np.max(fld.magnitude))


# ---------------------------------------------------------------------------
# decay fits


@dataclass
class DecayFit:
    exponent: float
    ci_low: float
    ci_high: float
    samples: int
    span_decades: float

    def to_dict(self):
        return asdict(self)


def geometric_times(t0=1.0, t1=1e3, ratio=1.25):
    k = int(np.floor(np.log(t1 / t0) / np.log(ratio) + 1e-9))
    return t0 * ratio ** np.arange(k + 1)


def decay_fit(t, y, window=None, offset=1.0, n_boot=1000, seed=0, level=0.95):
    """Least-squares slope of ``log y`` against ``log(offset + t)``.

    Needs at least 8 samples spanning 1.5 decades of ``t`` inside
    ``window``; the confidence interval is a pairs bootstrap.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    sel = np.ones(len(t), dtype=bool)
    if window is not None:
        sel = (t >= window[0]) & (t <= window[1])
    t, y = t[sel], y[sel]
    if len(t) < 8:
        raise InsufficientSpanError(f"{len(t)} samples, need at least 8")
    span = float(np.log10(t.max() / t.min()))
    if span < 1.5 - 1e-9:
        raise InsufficientSpanError(f"samples span {span:.2f} decades, need 1.5")
    x = np.log(offset + t)
    ly = np.log(y)
    slope = float(np.polyfit(x, ly, 1)[0])
    rng = np.random.default_rng(seed)
    boots = np.empty(n_boot)
    for b in range(n_boot):
        k = rng.integers(0, len(x), len(x))
        if np.ptp(x[k]) == 0:
            boots[b] = slope
            continue
        boots[b] = np.polyfit(x[k], ly[k], 1)[0]
    a = (1 - level) / 2
    return DecayFit(slope, float(np.quantile(boots, a)), float(np.quantile(boots, 1 - a)),
                    int(len(t)), span)


# ---------------------------------------------------------------------------
# decay experiments


@dataclass
class DecayConfig:
    """A reproducible decay measurement."""

    label: str
    medium: str
    gamma: float
    kappa: float
    shape: tuple
    spacing: tuple
    direction: tuple | None = None
    radius: float = 0.0
    cap_half_angle: float | None = None
    radial: dict | None = None
    p: tuple | None = None
    q: tuple | None = None
    theta: float | None = None
    p_mode: str | None = None
    groups: list | None = None
    times: tuple = (1.0, 1e3, 1.25)
    fit_window: tuple | None = None
    expected: float | None = None
    tolerance: float | None = None
    dtype: str = "complex64"

    def to_dict(self):
        return asdict(self)

    def lattice(self):
        if self.direction is None:
            return FrequencyLattice.centred(self.shape, self.spacing)
        return FrequencyLattice.oriented(self.direction, self.radius, self.shape, self.spacing)


def _hexagonal_genuine(xis):
    """Unit vector ``(xi_2, -xi_1, 0)/|.|`` spanning the genuine hyperbolic mode."""
    v = np.stack([xis[:, 1], -xis[:, 0], np.zeros(len(xis))], axis=1)
    nrm = np.linalg.norm(v, axis=1, keepdims=True)
    return v / np.where(nrm > 0, nrm, 1)


def build_data(cfg, lattice=None):
    lat = cfg.lattice() if lattice is None else lattice
    rad = None
    if cfg.radial is not None:
        rad = RadialCutoff(**cfg.radial)
    cap = None
    if cfg.cap_half_angle is not None:
        cap = CapCutoff(tuple(cfg.direction), cfg.cap_half_angle)

    def profile(xis):
        f = np.ones(len(xis))
        if rad is not None:
            f = f * rad(xis)
        if cap is not None:
            f = f * cap(xis)
        return f

    p = cfg.p
    if cfg.p_mode == "hexagonal-genuine":
        p = _hexagonal_genuine
    return make_data(lat, profile, p=p, q=cfg.q, theta=cfg.theta)


@dataclass
class DecayRun:
    config: DecayConfig
    times: np.ndarray
    norms: np.ndarray
    fit: DecayFit
    group_norms: np.ndarray
    max_leakage: float
    max_nyquist: float
    fallback_count: int
    spectral_abscissa: float
    lattice_points: int
    elapsed: float

    def trace_csv(self, q="inf"):
        """Norm trace relative to the value at ``t = 1`` (or the first time)."""
        lines = ["t,norm_q,q,label"]
        k = int(np.argmin(np.abs(self.times - 1.0)))
        for t, v in zip(self.times, self.norms / self.norms[k]):
            lines.append(f"{float(t)!r},{float(v)!r},{q},{self.config.label}")
        return "\n".join(lines) + "\n"

    def manifest(self):
        lat = self.config.lattice()
        return {"config": self.config.to_dict(), "lattice": lat.to_dict(),
                "fit": self.fit.to_dict(), "max_window_leakage": self.max_leakage,
                "max_nyquist_fraction": self.max_nyquist,
                "fallback_count": self.fallback_count,
                "spectral_abscissa": self.spectral_abscissa,
                "stored_points": self.lattice_points, "elapsed_s": self.elapsed}


def run_decay(cfg, refine=False, progress=None, skip_ratio=1e-3, seed=0):
    """Propagate, measure the co-moving L-infinity norm per mode group and
    fit the decay exponent.  The reported norm at each time is the maximum
    over groups, each evaluated in its own window centred at
    ``-t * (group velocity)``; this is the L-infinity norm of the full field
    once the groups have separated."""
    start = time.perf_counter()
    medium = MediumSpec.from_shorthand(cfg.medium)
    lat = cfg.lattice()
    if refine:
        lat = lat.refined()
    data = build_data(cfg, lat)
    dtype = np.complex64 if cfg.dtype == "complex64" else np.complex128
    prop = Propagator(medium, cfg.gamma, cfg.kappa, data, groups=cfg.groups, dtype=dtype)
    times = geometric_times(*cfg.times)
    ng = len(prop.groups)
    active = [float(np.sum(np.abs(prop.modes[:, g, :]) ** 2)) for g in prop.groups]
    tot = sum(active)
    norms = np.zeros((len(times), ng))
    leak, nyq = 0.0, 0.0
    cell = np.prod(lat.spacing) / (2 * np.pi) ** lat.n
    live = [gi for gi in range(ng) if active[gi] > 1e-14 * tot]
    vel = {gi: prop.group_velocity(gi) for gi in live}
    for k, t in enumerate(times):
        fields = {gi: prop.field_hat(t, gi) for gi in live}
        # sup |W_g| <= (2 pi)^-n sum |W_hat_g| d xi: groups whose bound is far
        # below the running maximum cannot carry the L-infinity norm
        bound = {gi: float(np.sum(np.linalg.norm(f, axis=1)) * cell) for gi, f in fields.items()}
        best = 0.0
        for gi in sorted(live, key=lambda g: -bound[g]):
            if bound[gi] < skip_ratio * best:
                norms[k, gi] = np.nan
                continue
            vals = fields[gi].astype(dtype)
            fld = physical_field(data, vals, shift=-t * vel[gi])
            norms[k, gi] = float(np.max(fld.magnitude))
            best = max(best, norms[k, gi])
            leak = max(leak, fld.leakage)
            nyq = max(nyq, nyquist_fraction(data, vals))
            if progress:
                progress(gi, t, norms[k, gi])
    total = np.nanmax(norms, axis=1)
    fit = decay_fit(times, total, window=cfg.fit_window, seed=seed)
    if leak > 0.01:
        warnings.warn(f"window leakage {leak:.1%}", AliasingWarning)
    if nyq > 0.01:
        warnings.warn(f"aliasing: {nyq:.1%} of the energy near the lattice edge", AliasingWarning)
    return DecayRun(cfg, times, total, fit, norms, leak, nyq, prop.fallback_count,
                    prop.spectral_abscissa, len(data.index), time.perf_counter() - start)


# Desk-scale configurations for the decay-rate table checks.  Lattices are
# sized so that each group's footprint at t = 1e3 fits in one period.

SQ3 = (1 / np.sqrt(3),) * 3

EXPERIMENTS = {
    "1d": DecayConfig(
        label="1d", medium="1d:1", gamma=1.0, kappa=1.0,
        shape=(2 ** 15,), spacing=(2 * np.pi / 4096.0,),
        radial={"kind": "gauss", "eps": 1.0}, p=(1.0,), q=(0.0,), theta=1.0,
        fit_window=(10.0, 1e3), expected=-0.5, tolerance=0.1, dtype="complex128"),
    "conic": DecayConfig(
        label="conic", medium="cubic:8,2,2", gamma=1.0, kappa=1.0,
        shape=(96, 96, 14), spacing=(2 * np.pi / 1400.0, 2 * np.pi / 1400.0, 2 * np.pi / 128.0),
        direction=SQ3, radius=5.0, cap_half_angle=0.04,
        radial={"kind": "band", "r0": 5.0, "width": 0.5},
        p=(1.0, 2.0, 3.0), q=(0.0, 0.0, 0.0), theta=0.0,
        groups=[[0], [1, 2], [3], [4, 5], [6]],
        fit_window=(20.0, 1e3), expected=-0.5, tolerance=0.15),
    "parabolic": DecayConfig(
        label="parabolic", medium="cubic:8,2,2", gamma=1.0, kappa=1.0,
        shape=(80, 80, 54), spacing=(2 * np.pi / 2000.0, 2 * np.pi / 2000.0, 2 * np.pi / 400.0),
        direction=(1 / np.sqrt(14), 2 / np.sqrt(14), 3 / np.sqrt(14)), radius=0.40,
        cap_half_angle=0.15, radial={"kind": "gauss", "eps": 1.0},
        p=(0.0, 0.0, 0.0), q=(0.0, 0.0, 0.0), theta=1.0,
        groups=[[3]],
        fit_window=(20.0, 1e3), expected=-1.5, tolerance=0.2),
    "hexagonal": DecayConfig(
        label="hexagonal", medium="hexagonal:4,10,2,4,2", gamma=1.0, kappa=1.0,
        shape=(96, 96, 14), spacing=(2 * np.pi / 360.0, 2 * np.pi / 360.0, 2 * np.pi / 128.0),
        direction=(np.sqrt(0.4), 0.0, np.sqrt(0.6)), radius=5.0, cap_half_angle=0.15,
        radial={"kind": "band", "r0": 5.0, "width": 0.5},
        p_mode="hexagonal-genuine", q=(0.0, 0.0, 0.0), theta=0.0,
        groups=[[k] for k in range(7)],
        fit_window=(20.0, 1e3), expected=-1.0, tolerance=0.15),
}


def manifest_json(run):
    return json.dumps(run.manifest(), indent=2, default=float)
