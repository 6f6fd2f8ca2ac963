"""Blow-up charts around degenerate directions of cubic media, and the
rotational reduction of hexagonal media.

Every expansion function returns the predicted leading terms next to the
values measured from the exact symbol, so callers can look at residuals
instead of trusting the formulas.  Where the printed coefficients and the
exact perturbation theory disagree both are returned (``*_printed`` fields
next to the corrected ones).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .media import MediumSpec, symbol_at
from .symbol import b_matrix_1d, build_B
from .spectral import Eigenframe

SQ2, SQ3, SQ6 = np.sqrt(2.0), np.sqrt(3.0), np.sqrt(6.0)

#: fixed orthogonal diagonaliser of A at the conic direction (1,1,1)/sqrt(3)
M_TILDE = np.array([
    [SQ2, -1.0, SQ3],
    [SQ2, -1.0, -SQ3],
    [SQ2, 2.0, 0.0],
]) / SQ6


class ExcludedParameters(ValueError):
    """Raised when a proposition's hypotheses on the moduli fail."""


# ---------------------------------------------------------------------------
# generic tools


def block_diagonalize_step(h0, h1, blocks, tol=1e-12):
    """First corrector ``N`` of the block-diagonalisation scheme.

    With ``d = diag(h0)`` and block labels ``blocks`` (one label per index),
    ``N_ik = h1_ik / (d_k - d_i)`` for ``i``, ``k`` in different blocks and
    zero inside blocks.  Then
    ``(I + eps N)^{-1} (h0 + eps h1) (I + eps N)`` is block diagonal up to
    ``O(eps^2)``.
    """
    d = np.diag(np.asarray(h0, dtype=float))
    h1 = np.asarray(h1)
    blocks = np.asarray(blocks)
    n = len(d)
    out = np.zeros_like(h1, dtype=np.result_type(h1, float))
    for i in range(n):
        for k in range(n):
            if blocks[i] == blocks[k]:
                continue
            gap = d[k] - d[i]
            if abs(gap) <= tol * max(1.0, np.max(np.abs(d))):
                raise ValueError(f"diagonal entries {i} and {k} are not separated")
            out[i, k] = h1[i, k] / gap
    return out


def fd_derivative(f, x0=0.0, h=1e-3, order=1):
    """Five-point centred difference with one Richardson step.

    ``order`` is 1 or 2.  The stencil error is ``O(h^4)``; the Richardson
    step combines ``h`` and ``h/2`` to cancel it.
    """
    def stencil(hh):
        fm2, fm1, fp1, fp2 = f(x0 - 2 * hh), f(x0 - hh), f(x0 + hh), f(x0 + 2 * hh)
        if order == 1:
            return (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * hh)
        if order == 2:
            return (-fp2 + 16 * fp1 - 30 * f(x0) + 16 * fm1 - fm2) / (12 * hh * hh)
        raise ValueError("order must be 1 or 2")

    d1, d2 = stencil(h), stencil(h / 2)
    return (16 * d2 - d1) / 15


def _rel(a, b):
    a, b = complex(a), complex(b)
    return abs(a - b) / max(abs(b), 1e-300)


@dataclass
class CheckRecord:
    """One predicted/measured comparison with its tolerance."""

    name: str
    predicted: complex
    measured: complex
    tol: float
    params: dict = field(default_factory=dict)

    @property
    def rel_error(self):
        return _rel(self.measured, self.predicted)

    @property
    def passed(self):
        return bool(self.rel_error <= self.tol)

    def to_dict(self):
        def enc(z):
            z = complex(z)
            return z.real if z.imag == 0 else [z.real, z.imag]
        return {"name": self.name, "params": self.params, "predicted": enc(self.predicted),
                "measured": enc(self.measured), "rel_error": self.rel_error,
                "tol": self.tol, "pass": self.passed}


def report_json(records):
    """Validation report grouped by check name."""
    out = {}
    for r in records:
        out.setdefault(r.name, []).append(r.to_dict())
    return json.dumps(out, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# conic chart around (1,1,1)/sqrt(3)


def conic_eta(eps, phi):
    return (np.sqrt(1.0 - eps * eps) * M_TILDE[:, 0]
            + eps * np.cos(phi) * M_TILDE[:, 1] + eps * np.sin(phi) * M_TILDE[:, 2])


@dataclass(frozen=True)
class ConicChart:
    lam: float
    mu: float
    tau: float

    def __post_init__(self):
        if self.lam + self.mu == 0:
            raise ExcludedParameters("conic chart needs lam + mu != 0")
        if self.tau == self.lam + 2 * self.mu:
            raise ExcludedParameters("tau = lam + 2 mu is isotropic and excluded")

    @property
    def medium(self):
        return MediumSpec.cubic(lam=self.lam, mu=self.mu, tau=self.tau)

    @property
    def kappa1_bar(self):
        return (self.tau + 2 * self.lam + 4 * self.mu) / 3

    @property
    def kappa2_bar(self):
        return (self.tau + self.mu - self.lam) / 3

    @property
    def omega1_bar(self):
        return np.sqrt(self.kappa1_bar)

    @property
    def omega2_bar(self):
        return np.sqrt(self.kappa2_bar)

    @property
    def split(self):
        """Linear coefficient of ``kappa_{2,3}``: sqrt(2)(-tau+2mu+lam)/3."""
        return SQ2 * (-self.tau + 2 * self.mu + self.lam) / 3

    @property
    def delta1(self):
        return (-self.tau + 2 * self.mu + self.lam) / (SQ6 * np.sqrt(self.tau + self.mu - self.lam))

    @property
    def delta2(self):
        """Coupling coefficient from first-order perturbation theory."""
        return 2 * (self.lam + 2 * self.mu - self.tau) / (3 * (self.lam + self.mu))

    @property
    def delta2_printed(self):
        return 2 * (self.mu + 2 * self.lam - self.tau) / (3 * (self.lam + self.mu))

    @property
    def A0(self):
        return np.diag([self.kappa1_bar, self.kappa2_bar, self.kappa2_bar])

    def A1(self, phi):
        c, s = np.cos(phi), np.sin(phi)
        f = (2 * self.tau - self.mu + self.lam) / 3
        return (f * np.array([[0, c, s], [c, 0, 0], [s, 0, 0]])
                + self.split * np.array([[0, 0, 0], [0, -c, s], [0, s, c]]))

    def N1(self, phi):
        return block_diagonalize_step(self.A0, self.A1(phi), [0, 1, 1])

    def N1_printed(self, phi):
        c, s = np.cos(phi), np.sin(phi)
        f = (2 * self.tau - self.mu + self.lam) / (3 * (self.lam + self.mu))
        return f * np.array([[0, c, s], [-c, 0, 0], [-s, 0, 0]])

    @staticmethod
    def M2(phi):
        c, s = np.cos(phi / 2), np.sin(phi / 2)
        return np.array([[1, 0, 0], [0, s, c], [0, c, -s]])

    def chart_symbol(self, eps, phi):
        """``M~^T A(eta(eps, phi)) M~`` (exact, not truncated)."""
        return M_TILDE.T @ symbol_at(self.medium, conic_eta(eps, phi)) @ M_TILDE

    def chart_frame(self, eps, phi):
        """First-order chart diagonaliser ``M~ (I + eps N1) M~2``, columns normalised."""
        m = M_TILDE @ (np.eye(3) + eps * self.N1(phi)) @ self.M2(phi)
        return m / np.linalg.norm(m, axis=0)


def _pair_indices(values, centre):
    return np.sort(np.argsort(np.abs(np.asarray(values) - centre))[:2])


def conic_eigen_expansion(lam, mu, tau, eps, phi):
    """Predicted and measured ``kappa_j`` on the conic chart.

    The degenerate pair is compared as an unordered ``±`` pair.
    """
    ch = ConicChart(lam, mu, tau)
    w = np.linalg.eigvalsh(symbol_at(ch.medium, conic_eta(eps, phi)))
    k1 = int(np.argmin(np.abs(w - ch.kappa1_bar)))
    pair = np.sort(np.delete(w, k1))
    pred_pair = np.sort([ch.kappa2_bar + ch.split * eps, ch.kappa2_bar - ch.split * eps])
    predicted = np.concatenate([[ch.kappa1_bar], pred_pair])
    measured = np.concatenate([[w[k1]], pair])
    return {"predicted": predicted, "measured": measured,
            "residual": measured - predicted}


def _conic_branch(values_at, centre, eps, phi):
    """Analytic eigenvalue branch through the conic point along the line
    ``eps -> eta(eps, phi)``: upper member of the pair for ``eps > 0`` and
    the lower member at ``(|eps|, phi + pi)`` for ``eps < 0``."""
    if eps == 0:
        vals = values_at(0.0, phi)
        return vals[_pair_indices(vals, centre)].mean()
    ee, pp = (eps, phi) if eps > 0 else (-eps, phi + np.pi)
    vals = values_at(ee, pp)
    pair = vals[_pair_indices(vals, centre)]
    pair = pair[np.argsort(pair.real)]
    return pair[1] if eps > 0 else pair[0]


def conic_split_fd(lam, mu, tau, phi, h=1e-3):
    """Finite-difference recovery of the linear splitting of ``kappa_{2,3}``."""
    ch = ConicChart(lam, mu, tau)

    def vals(e, p):
        return np.linalg.eigvalsh(symbol_at(ch.medium, conic_eta(e, p)))

    return float(fd_derivative(lambda e: _conic_branch(vals, ch.kappa2_bar, e, phi), 0.0, h))


def conic_coupling_leading(lam, mu, tau, eps, phi):
    """Leading coupling functions on the conic chart.

    Returns the predicted ``(1, eps d2 sin(3phi/2), eps d2 cos(3phi/2))``,
    the measured orthonormal-frame couplings sign-aligned with the chart
    frame, and the gauge-invariant residuals ``a2^2 + a3^2 - eps^2 d2^2``
    and ``a1^2 - 1``.
    """
    ch = ConicChart(lam, mu, tau)
    eta = conic_eta(eps, phi)
    w, v = np.linalg.eigh(symbol_at(ch.medium, eta))
    ref = ch.chart_frame(eps, phi)
    k1 = int(np.argmin(np.abs(w - ch.kappa1_bar)))
    pair = [k for k in range(3) if k != k1]
    # order pair columns like the chart frame (kappa_2 has the "+split" sign)
    order = [k1] + sorted(pair, key=lambda k: -np.sign(ch.split) * w[k])
    v = v[:, order]
    v *= np.where(np.einsum("ij,ij->j", v, ref) < 0, -1.0, 1.0)
    a = v.T @ eta
    d2 = ch.delta2
    predicted = np.array([1.0, eps * d2 * np.sin(1.5 * phi), eps * d2 * np.cos(1.5 * phi)])
    return {
        "predicted": predicted,
        "measured": a,
        "pair_residual": float(a[1] ** 2 + a[2] ** 2 - (eps * d2) ** 2),
        "a1_residual": float(a[0] ** 2 - 1.0),
        "pair_printed_residual": float(a[1] ** 2 + a[2] ** 2 - (eps * ch.delta2_printed) ** 2),
    }


def _b_eigs(medium, gamma, kappa, xi_norm, eta, frame=None):
    sys = build_B(medium, gamma, kappa, xi_norm * eta, frame=frame)
    return np.linalg.eigvals(sys.B)


def conic_B0(lam, mu, tau, gamma, kappa, xi_norm):
    """``|xi|^{-1} B`` at ``eps = 0`` in the chart frame (7x7)."""
    ch = ConicChart(lam, mu, tau)
    om = np.array([ch.omega1_bar, ch.omega2_bar, ch.omega2_bar])
    a = np.array([1.0, 0.0, 0.0])
    from .symbol import assemble_B
    b = assemble_B(om, a, gamma, kappa, 1.0)
    b[-1, -1] = 1j * kappa * xi_norm
    return b


def conic_B_expansion(lam, mu, tau, gamma, kappa, xi_norm, eps, phi):
    """Predicted and measured spectrum of ``B`` on the conic chart."""
    ch = ConicChart(lam, mu, tau)
    if gamma ** 2 + lam + mu == 0:
        raise ExcludedParameters("needs gamma^2 + lam + mu != 0")
    r = xi_norm
    one_d = np.linalg.eigvals(b_matrix_1d(ch.omega1_bar, gamma, kappa, r))
    hyp = [s1 * ch.omega2_bar * r + s2 * ch.delta1 * r * eps for s1 in (1, -1) for s2 in (1, -1)]
    predicted = np.concatenate([one_d, hyp])
    frame = None
    if eps == 0:
        frame = Eigenframe(np.diag(ch.A0), M_TILDE, 0.0)
    measured = _b_eigs(ch.medium, gamma, kappa, r, conic_eta(eps, phi), frame)
    from .symbol import match_eigenvalues
    measured = match_eigenvalues(predicted, measured)
    res = np.abs(measured - predicted)
    scaled = res / (r * eps * eps) if eps > 0 else res
    return {"predicted": predicted, "measured": measured, "residual": res,
            "scaled_residual": scaled}


def conic_B_split_fd(lam, mu, tau, gamma, kappa, xi_norm, phi, h=1e-3):
    """``d/d eps`` of the hyperbolic B-eigenvalue branch near ``+omega2_bar |xi|``,
    divided by ``|xi|``; predicted to be ``|delta1|``."""
    ch = ConicChart(lam, mu, tau)
    r = xi_norm
    frame0 = Eigenframe(np.diag(ch.A0), M_TILDE, 0.0)

    def vals(e, p):
        return _b_eigs(ch.medium, gamma, kappa, r, conic_eta(e, p), frame0 if e == 0 else None)

    d = fd_derivative(lambda e: _conic_branch(vals, ch.omega2_bar * r, e, phi), 0.0, h)
    return complex(d) / r


def conic_B1(lam, mu, tau, gamma, phi, printed=False):
    """First-order term ``B^(1)`` of ``|xi|^{-1} B`` on the conic chart.

    Built from the chart: the diagonal carries ``d omega/d eps`` (``±delta1``
    for the ``+omega`` pair and the negatives for the ``-omega`` pair), the
    last column ``i gamma a'_j`` and the last row ``-(i gamma/2) a'_j`` with
    ``a'_{2,3} = delta2 (sin, cos)(3 phi/2)``.  ``printed=True`` reproduces the
    printed matrix instead (same diagonal signs in both pairs, a missing
    ``1/2`` in the last row, uncorrected ``delta2``).
    """
    ch = ConicChart(lam, mu, tau)
    d1 = ch.delta1
    d2 = ch.delta2_printed if printed else ch.delta2
    s, c = np.sin(1.5 * phi), np.cos(1.5 * phi)
    b = np.zeros((7, 7), dtype=complex)
    diag = [0, d1, -d1, 0, d1, -d1, 0] if printed else [0, d1, -d1, 0, -d1, d1, 0]
    b[np.arange(7), np.arange(7)] = diag
    for row, f in ((1, s), (2, c), (4, s), (5, c)):
        b[row, 6] = 1j * gamma * d2 * f
        b[6, row] = -0.5j * gamma * d2 * f
    if printed:
        b[6, 2] = -1j * gamma * d2 * c
    return b


def conic_B1_measured(lam, mu, tau, gamma, kappa, xi_norm, phi, eps=1e-6):
    """One-sided difference ``(B(eps) - B(0)) / (eps |xi|)`` in the chart
    frame, with the exact eigenvectors sign-aligned to the chart columns."""
    ch = ConicChart(lam, mu, tau)
    r = xi_norm

    def chart_B(e):
        eta = conic_eta(e, phi)
        w, v = np.linalg.eigh(symbol_at(ch.medium, eta))
        ref = ch.chart_frame(e, phi)
        if e == 0:
            w, v = np.diag(ch.A0).copy(), ref
        else:
            k1 = int(np.argmin(np.abs(w - ch.kappa1_bar)))
            pair = [k for k in range(3) if k != k1]
            order = [k1] + sorted(pair, key=lambda k: -np.sign(ch.split) * w[k])
            w, v = w[order], v[:, order]
            v = v * np.where(np.einsum("ij,ij->j", v, ref) < 0, -1.0, 1.0)
        return build_B(ch.medium, gamma, kappa, r * eta, frame=(w, v)).B

    return (chart_B(eps) - chart_B(0.0)) / (eps * r)


def conic_separation(lam, mu, tau, gamma, kappa, xi_grid):
    """Minimum distance between the five eigenvalue groups of ``B0(|xi|)``.

    ``B0`` does not depend on ``phi``.
    """
    best = np.inf
    for r in xi_grid:
        w = np.linalg.eigvals(conic_B0(lam, mu, tau, gamma, kappa, r))
        ch = ConicChart(lam, mu, tau)
        groups = [ch.omega2_bar, -ch.omega2_bar]
        rest = [z for z in w if min(abs(z - g) for g in groups) > 1e-9 * max(1, abs(z))]
        pts = np.array(groups + rest)
        d = np.abs(pts[:, None] - pts[None, :])
        best = min(best, float(np.min(d[np.triu_indices(len(pts), 1)])))
    return best


# ---------------------------------------------------------------------------
# uniplanar chart around (1,0,0)


def uniplanar_eta(eps, phi):
    return np.array([np.sqrt(1.0 - eps * eps), eps * np.cos(phi), eps * np.sin(phi)])


@dataclass(frozen=True)
class UniplanarChart:
    lam: float
    mu: float
    tau: float

    def __post_init__(self):
        if self.tau == self.mu:
            raise ExcludedParameters("uniplanar chart needs tau != mu")

    @property
    def medium(self):
        return MediumSpec.cubic(lam=self.lam, mu=self.mu, tau=self.tau)

    @property
    def C(self):
        return ((self.tau - self.mu) ** 2 - (self.lam + self.mu) ** 2) / (self.tau - self.mu)

    @property
    def D(self):
        """The printed off-diagonal constant ``lam + mu``."""
        return self.lam + self.mu

    @property
    def D_eff(self):
        """Off-diagonal constant of the exact second-order block,
        ``(lam+mu)(tau-lam-2mu)/(tau-mu)``."""
        return (self.lam + self.mu) * (self.tau - self.lam - 2 * self.mu) / (self.tau - self.mu)

    @property
    def A0(self):
        return np.diag([self.tau, self.mu, self.mu])

    def A1(self, phi):
        c, s = np.cos(phi), np.sin(phi)
        return (self.lam + self.mu) * np.array([[0, c, s], [c, 0, 0], [s, 0, 0]])

    def A2(self, phi):
        c, s = np.cos(phi), np.sin(phi)
        s2 = np.sin(2 * phi)
        return ((self.tau - self.mu) * np.diag([-1, c * c, s * s])
                + 0.5 * (self.lam + self.mu) * np.array([[0, 0, 0], [0, 0, s2], [0, s2, 0]]))

    def N1(self, phi):
        return block_diagonalize_step(self.A0, self.A1(phi), [0, 1, 1])

    def block(self, phi, d=None):
        """The 2x2 second-order block ``[[C c^2, d s c], [d s c, C s^2]]``."""
        d = self.D_eff if d is None else d
        c, s = np.cos(phi), np.sin(phi)
        return np.array([[self.C * c * c, d * s * c], [d * s * c, self.C * s * s]])

    def block_eigs(self, phi, d=None):
        """``(C ± sqrt(C^2 - (C^2 - d^2) sin^2 2phi)) / 2``, larger first."""
        d = self.D_eff if d is None else d
        root = np.sqrt(self.C ** 2 - (self.C ** 2 - d ** 2) * np.sin(2 * phi) ** 2)
        return np.array([(self.C + root) / 2, (self.C - root) / 2])

    def M2(self, phi, d=None):
        """Rotation diagonalising :meth:`block`, first column for the larger
        eigenvalue; continuous in ``phi`` including ``phi = pi/2, 3pi/2``."""
        d = self.D_eff if d is None else d
        c = self.C
        if c * d >= 0:
            z = 0.5 * (c + d) + 0.5 * (c - d) * np.exp(-4j * phi)
            two_theta = 2 * phi + np.angle(z)
        else:
            z = 0.5 * (c - d) + 0.5 * (c + d) * np.exp(4j * phi)
            two_theta = -2 * phi + np.angle(z)
        t = two_theta / 2
        return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])

    def coupling_first_order(self, phi):
        """``a_{2,3}/eps`` in the e2, e3 basis before the block rotation."""
        f = (self.tau - self.lam - 2 * self.mu) / (self.tau - self.mu)
        return f * np.array([np.cos(phi), np.sin(phi)])


def uniplanar_eigen_expansion(lam, mu, tau, eps, phi, d=None):
    """Predicted and measured ``kappa_j`` near ``(1,0,0)``.

    ``d`` selects the off-diagonal constant (default: the exact ``D_eff``;
    pass ``chart.D`` for the printed form).
    """
    if lam + mu == 0 or tau == lam + 2 * mu:
        raise ExcludedParameters("needs lam + mu != 0 and tau != lam + 2 mu")
    ch = UniplanarChart(lam, mu, tau)
    w = np.linalg.eigvalsh(symbol_at(ch.medium, uniplanar_eta(eps, phi)))
    k1 = int(np.argmin(np.abs(w - tau)))
    pair = np.sort(np.delete(w, k1))[::-1]
    b = ch.block_eigs(phi, d)
    predicted = np.array([tau - ch.C * eps ** 2, mu + b[0] * eps ** 2, mu + b[1] * eps ** 2])
    measured = np.concatenate([[w[k1]], pair])
    res = measured - predicted
    return {"predicted": predicted, "measured": measured, "residual": res,
            "scaled_residual": np.abs(res) / eps ** 3 if eps > 0 else np.abs(res)}


def uniplanar_quadratic_fd(lam, mu, tau, phi, h=1e-3):
    """Second ``eps``-derivatives of the degenerate pair at ``eps = 0``
    (larger first); predicted ``C ± sqrt(...)``."""
    ch = UniplanarChart(lam, mu, tau)

    def member(k):
        def f(e):
            w = np.linalg.eigvalsh(symbol_at(ch.medium, uniplanar_eta(abs(e), phi)))
            return np.sort(w[_pair_indices(w, mu)])[::-1][k]
        return f

    return np.array([fd_derivative(member(k), 0.0, h, order=2) for k in (0, 1)])


def uniplanar_B0(lam, mu, tau, gamma, kappa, xi_norm):
    """``|xi|^{-1} B`` at ``eps = 0`` in the uniplanar chart frame (7x7)."""
    from .symbol import assemble_B
    om = np.sqrt([tau, mu, mu])
    b = assemble_B(om, np.array([1.0, 0.0, 0.0]), gamma, kappa, 1.0)
    b[-1, -1] = 1j * kappa * xi_norm
    return b


def uniplanar_thermal_block(lam, mu, tau, gamma, kappa, xi_norm, phi, sign=1):
    """Exact ``eps^2`` coefficient matrix (units of ``|xi|``) for the pair
    near ``sign * sqrt(mu) |xi|``.

    Sum of the elastic part ``sign * block / (2 sqrt(mu))`` and the
    second-order heat-mode coupling ``(gamma^2/2) g a a^T`` where ``g`` is
    the heat-heat entry of the reduced resolvent of ``B0``.
    """
    ch = UniplanarChart(lam, mu, tau)
    b0 = uniplanar_B0(lam, mu, tau, gamma, kappa, xi_norm)
    cluster = [1, 2] if sign > 0 else [4, 5]
    others = [k for k in range(7) if k not in cluster]
    z = sign * np.sqrt(mu)
    res = np.linalg.inv(z * np.eye(len(others)) - b0[np.ix_(others, others)])
    g = res[-1, -1]
    a = ch.coupling_first_order(phi)
    return sign * ch.block(phi) / (2 * np.sqrt(mu)) + 0.5 * gamma ** 2 * g * np.outer(a, a)


def uniplanar_B_expansion(lam, mu, tau, gamma, kappa, xi_norm, eps, phi):
    """Predicted and measured spectrum of ``B`` near the uniplanar direction.

    Returns three predictions of the degenerate modes: ``printed``
    (``(C ± sqrt(..D..))/(4 sqrt mu)``), ``elastic`` (same with ``D_eff``)
    and ``full`` (elastic plus the thermal second-order shift).
    """
    if mu == tau or mu == tau + gamma ** 2:
        raise ExcludedParameters("needs mu != tau and mu != tau + gamma^2")
    from .symbol import match_eigenvalues
    ch = UniplanarChart(lam, mu, tau)
    r = xi_norm
    sq = np.sqrt(mu)
    one_d = np.linalg.eigvals(b_matrix_1d(np.sqrt(tau), gamma, kappa, r))

    def hyp(coeffs_plus, coeffs_minus):
        out = [sq * r + r * eps ** 2 * c for c in coeffs_plus]
        out += [-sq * r + r * eps ** 2 * c for c in coeffs_minus]
        return np.array(out)

    printed = ch.block_eigs(phi, ch.D) / (2 * sq)
    elastic = ch.block_eigs(phi) / (2 * sq)
    full_p = np.linalg.eigvals(uniplanar_thermal_block(lam, mu, tau, gamma, kappa, r, phi, 1))
    full_m = np.linalg.eigvals(uniplanar_thermal_block(lam, mu, tau, gamma, kappa, r, phi, -1))
    preds = {
        "printed": np.concatenate([one_d, hyp(printed, -printed)]),
        "elastic": np.concatenate([one_d, hyp(elastic, -elastic)]),
        "full": np.concatenate([one_d, hyp(full_p, full_m)]),
    }
    frame = None
    if eps == 0:
        frame = Eigenframe(np.array([tau, mu, mu]), np.eye(3), 0.0)
    measured_raw = _b_eigs(ch.medium, gamma, kappa, r, uniplanar_eta(eps, phi), frame)
    out = {}
    for k, p in preds.items():
        m = match_eigenvalues(p, measured_raw)
        res = np.abs(m - p)
        # kappa_1 = tau - C eps^2 moves the 1D modes at second order, so only
        # the degenerate modes are expected to have an O(eps^3) remainder
        out[k] = {"predicted": p, "measured": m, "residual": res,
                  "one_d_scaled": res[:3] / (r * eps ** 2) if eps > 0 else res[:3],
                  "degenerate_scaled": res[3:] / (r * eps ** 3) if eps > 0 else res[3:]}
    return out


def uniplanar_B_quadratic_fd(lam, mu, tau, gamma, kappa, xi_norm, phi, h=1e-3):
    """``eps^2`` coefficients (units of ``|xi|``) of the B-eigenvalue pair
    near ``+sqrt(mu)|xi|``, sorted by real part (larger first)."""
    ch = UniplanarChart(lam, mu, tau)
    r = xi_norm
    frame0 = Eigenframe(np.array([tau, mu, mu]), np.eye(3), 0.0)

    def member(k):
        def f(e):
            e = abs(e)
            w = _b_eigs(ch.medium, gamma, kappa, r, uniplanar_eta(e, phi),
                        frame0 if e == 0 else None)
            pair = w[_pair_indices(w, np.sqrt(mu) * r)]
            return pair[np.argsort(-pair.real)][k]
        return f

    return np.array([fd_derivative(member(k), 0.0, h, order=2) / (2 * r) for k in (0, 1)])


# ---------------------------------------------------------------------------
# hexagonal media


@dataclass
class HexagonalReduction:
    """Rotational reduction of a hexagonal symbol at latitude ``psi``.

    ``degenerate_eta3_sq`` lists the latitudes where ``A(eta)`` has a double
    eigenvalue away from the poles; ``parallel_eta3_sq`` the latitude where
    ``eta`` is an eigenvector of ``A(eta)``; ``printed_eta3_sq`` the value of
    the closed form ``(lam2+2mu-tau1)/(2lam2+4mu+tau1-tau2)`` (``None`` when
    outside ``[0, 1]``).
    """

    psi: float
    hyperbolic_value: float
    block: np.ndarray
    trace: float
    det: float
    trace_printed: float
    det_printed: float
    degenerate_eta3_sq: list
    parallel_eta3_sq: float | None
    printed_eta3_sq: float | None

    def to_dict(self):
        return {
            "psi": self.psi, "hyperbolic_value": self.hyperbolic_value,
            "block": self.block.tolist(), "trace": self.trace, "det": self.det,
            "trace_printed": self.trace_printed, "det_printed": self.det_printed,
            "degenerate_eta3_sq": self.degenerate_eta3_sq,
            "parallel_eta3_sq": self.parallel_eta3_sq,
            "printed_eta3_sq": self.printed_eta3_sq,
        }


def hexagonal_eta(psi, phi=0.0):
    return np.array([np.cos(phi) * np.cos(psi), np.sin(phi) * np.cos(psi), np.sin(psi)])


def hexagonal_moving_basis(eta):
    """Columns: the hyperbolic vector ``(eta2, -eta1, 0)/rho``, ``eta`` and
    the meridian vector completing the frame (``rho = sqrt(eta1^2+eta2^2)``)."""
    e1, e2, e3 = eta
    rho = np.hypot(e1, e2)
    if rho == 0:
        raise ValueError("the moving basis is undefined on the poles")
    b1 = np.array([e2, -e1, 0.0]) / rho
    b3 = np.array([e1 * e3, e2 * e3, -rho * rho]) / rho
    return np.column_stack([b1, eta, b3])


def _in_unit(x):
    return float(x) if (x is not None and np.isfinite(x) and 0 <= x <= 1) else None


def hexagonal_reduce(tau1, tau2, lam1, lam2, mu, psi, phi=0.0):
    medium = MediumSpec.hexagonal(tau1, tau2, lam1, lam2, mu)
    eta = hexagonal_eta(psi, phi)
    basis = hexagonal_moving_basis(eta)
    a = basis.T @ symbol_at(medium, eta) @ basis
    hyp = (tau1 - lam1) / 2 * (eta[0] ** 2 + eta[1] ** 2) + mu * eta[2] ** 2
    blk = a[1:, 1:]
    c2, s2 = np.cos(psi) ** 2, np.sin(psi) ** 2
    sin2 = np.sin(2 * psi) ** 2
    trace_printed = mu + tau1 * c2 + tau2 * s2
    det_printed = mu * tau1 * c2 ** 2 + mu * tau2 * s2 ** 2 + (tau1 * tau2 - 2 * lam2 - lam2 ** 2) / 4 * sin2

    # det(block - h) is a quadratic in x = eta3^2; fit it exactly on three nodes
    def resid(x):
        ps = np.arcsin(np.sqrt(x))
        e = hexagonal_eta(ps)
        bb = hexagonal_moving_basis(e)
        m = (bb.T @ symbol_at(medium, e) @ bb)[1:, 1:]
        h = (tau1 - lam1) / 2 * (1 - x) + mu * x
        return np.linalg.det(m - h * np.eye(2))

    xs = np.array([0.0, 0.5, 0.9])
    coef = np.polyfit(xs, [resid(x) for x in xs], 2)
    roots = np.roots(coef)
    deg = sorted(float(z.real) for z in roots
                 if abs(z.imag) < 1e-12 and -1e-12 <= z.real < 1 - 1e-9)
    par_den = 2 * lam2 + 4 * mu - tau1 - tau2
    parallel = (lam2 + 2 * mu - tau1) / par_den if par_den != 0 else None
    pr_den = 2 * lam2 + 4 * mu + tau1 - tau2
    printed = (lam2 + 2 * mu - tau1) / pr_den if pr_den != 0 else None
    return HexagonalReduction(
        psi=float(psi), hyperbolic_value=float(hyp), block=blk,
        trace=float(np.trace(blk)), det=float(np.linalg.det(blk)),
        trace_printed=float(trace_printed), det_printed=float(det_printed),
        degenerate_eta3_sq=[max(0.0, x) for x in deg],
        parallel_eta3_sq=_in_unit(parallel), printed_eta3_sq=_in_unit(printed),
    )


def hexagonal_det_formula(tau1, tau2, lam1, lam2, mu, psi):
    """Exact determinant of the 2x2 block."""
    c2, s2 = np.cos(psi) ** 2, np.sin(psi) ** 2
    return (mu * tau1 * c2 ** 2 + mu * tau2 * s2 ** 2
            + (tau1 * tau2 - 2 * lam2 * mu - lam2 ** 2) / 4 * np.sin(2 * psi) ** 2)
