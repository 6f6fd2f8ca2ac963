"""The first-order thermo-elastic system symbol B(xi) and its eigenvalues.

Unknowns are ordered ``(V_+ (n entries), V_- (n entries), theta)`` with
``V_± = (D_t ± D^{1/2}(xi)) M^T(eta) U_hat``.  The last row carries
``-(i gamma / 2) a_j(xi)``; with this sign ``det(nu - B)`` is exactly

    (nu - i kappa |xi|^2) prod_j (nu^2 - kappa_j) - nu gamma^2 sum_j a_j^2 prod_{k!=j} (nu^2 - kappa_k).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .media import symbol_at
from .spectral import (
    COUPLING_TOL,
    DEGENERACY_TOL,
    GAMMA_DEGENERACY_TOL,
    Eigenframe,
    classify,
    eigenframe,
)

PROJECTOR_COND_LIMIT = 1e8
BISECT_RTOL = 1e-12
BISECT_MAXITER = 200


class GammaDegenerateError(ValueError):
    pass


def assemble_B(omega, a, gamma, kappa, xi_norm):
    """Dense ``B`` from frequencies ``omega_j(xi)`` and couplings ``a_j(xi)``.

    Works on stacked inputs: ``omega`` and ``a`` of shape ``(..., n)`` and
    ``xi_norm`` of shape ``(...)``.
    """
    omega = np.asarray(omega, dtype=float)
    a = np.asarray(a, dtype=float)
    n = omega.shape[-1]
    m = 2 * n + 1
    b = np.zeros(omega.shape[:-1] + (m, m), dtype=complex)
    idx = np.arange(n)
    b[..., idx, idx] = omega
    b[..., n + idx, n + idx] = -omega
    col = 1j * gamma * a
    b[..., idx, m - 1] = col
    b[..., n + idx, m - 1] = col
    row = -0.5j * gamma * a
    b[..., m - 1, idx] = row
    b[..., m - 1, n + idx] = row
    b[..., m - 1, m - 1] = 1j * kappa * np.asarray(xi_norm, dtype=float) ** 2
    return b


@dataclass
class SystemSymbol:
    """``B(xi)`` together with the ingredients it was built from.

    ``omega`` and ``a`` are the 1-homogeneous quantities ``omega_j(xi)`` and
    ``a_j(xi) = r_j . xi``; ``kappas`` are the eigenvalues of ``A(xi)``.
    """

    n: int
    xi: np.ndarray
    kappas: np.ndarray
    omega: np.ndarray
    a: np.ndarray
    gamma: float
    kappa: float
    frame: np.ndarray
    B: np.ndarray

    @property
    def xi_norm(self):
        return float(np.linalg.norm(self.xi))


def build_B(medium, gamma, kappa, xi, frame=None):
    """Assemble ``B(xi)``.

    ``frame`` may be an :class:`Eigenframe`, or a pair ``(values, vectors)``
    valid for ``eta = xi/|xi|``.  Without one, the gauge-fixed eigenframe is
    used; that is refused at degenerate directions, where the frame is not
    continuous and must be supplied by the caller.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    r = float(np.linalg.norm(xi))
    if r == 0:
        raise ValueError("B(xi) is assembled for xi != 0")
    eta = xi / r
    if frame is None:
        a_eta = symbol_at(medium, eta)
        frame = eigenframe(a_eta)
        if frame.gap <= DEGENERACY_TOL * np.linalg.norm(a_eta):
            raise ValueError("degenerate direction: supply a continuous eigenframe")
    values, vectors = (frame.values, frame.vectors) if isinstance(frame, Eigenframe) else frame
    values = np.asarray(values, dtype=float)
    vectors = np.asarray(vectors, dtype=float)
    kappas = values * r * r
    omega = r * np.sqrt(values)
    a = vectors.T @ xi
    b = assemble_B(omega, a, gamma, kappa, r)
    return SystemSymbol(len(xi), xi, kappas, omega, a, float(gamma), float(kappa), vectors, b)


def b_matrix_1d(tau, gamma, kappa, xi):
    """The 3x3 symbol of one-dimensional thermo-elasticity."""
    return np.array([
        [tau * xi, 0, 1j * gamma * xi],
        [0, -tau * xi, 1j * gamma * xi],
        [-0.5j * gamma * xi, -0.5j * gamma * xi, 1j * kappa * xi * xi],
    ], dtype=complex)


def char_poly(sys, nu):
    """Closed-form characteristic polynomial ``det(nu - B(xi))``."""
    nu = np.asarray(nu, dtype=complex)
    r2 = sys.xi_norm ** 2
    f = (nu[..., None] ** 2 - sys.kappas)
    total = (nu - 1j * sys.kappa * r2) * np.prod(f, axis=-1)
    n = sys.n
    acc = 0
    for j in range(n):
        others = np.prod(np.delete(f, j, axis=-1), axis=-1) if n > 1 else 1.0
        acc = acc + sys.a[j] ** 2 * others
    return total - nu * sys.gamma ** 2 * acc


def char_poly_direct(sys, nu):
    m = sys.B.shape[0]
    return complex(np.linalg.det(nu * np.eye(m) - sys.B))


@dataclass
class SpectralDecomposition:
    values: np.ndarray
    projections: np.ndarray
    clusters: list
    defective: bool
    condition: float


def _contour_projection(b, centre, radius, nodes=64):
    m = b.shape[0]
    eye = np.eye(m)
    p = np.zeros((m, m), dtype=complex)
    for th in 2 * np.pi * (np.arange(nodes) + 0.5) / nodes:
        z = centre + radius * np.exp(1j * th)
        p += radius * np.exp(1j * th) * np.linalg.inv(z * eye - b)
    return p / nodes


contour_projection = _contour_projection


def _single_linkage(values, tol):
    order = np.argsort(values.real)
    groups = []
    for i in order:
        for g in groups:
            if np.min(np.abs(values[g] - values[i])) < tol:
                g.append(int(i))
                break
        else:
            groups.append([int(i)])
    # merge transitively
    merged = True
    while merged:
        merged = False
        for x in range(len(groups)):
            for y in range(x + 1, len(groups)):
                d = np.min(np.abs(values[groups[x]][:, None] - values[groups[y]][None, :]))
                if d < tol:
                    groups[x] += groups.pop(y)
                    merged = True
                    break
            if merged:
                break
    return groups


def eigenvalues_B(sys_or_matrix, cond_limit=PROJECTOR_COND_LIMIT, cluster_rtol=1e-5):
    """Eigenvalues of ``B`` with eigenprojections.

    Projections are products of right eigenvectors with rows of their
    inverse.  If the eigenvector matrix is worse conditioned than
    ``cond_limit`` the eigenvalues are clustered and each cluster's
    projection is obtained from a trapezoidal contour integral of the
    resolvent; the same merged projection is then reported for every member.
    """
    b = sys_or_matrix.B if isinstance(sys_or_matrix, SystemSymbol) else np.asarray(sys_or_matrix)
    w, r = np.linalg.eig(b)
    cond = float(np.linalg.cond(r))
    m = len(w)
    if cond <= cond_limit:
        l = np.linalg.inv(r)
        proj = np.einsum("ik,kj->kij", r, l)
        return SpectralDecomposition(w, proj, [[k] for k in range(m)], False, cond)
    scale = max(np.max(np.abs(w)), 1e-300)
    groups = _single_linkage(w, cluster_rtol * scale)
    proj = np.zeros((m, m, m), dtype=complex)
    for g in groups:
        centre = np.mean(w[g])
        spread = np.max(np.abs(w[g] - centre))
        others = [k for k in range(m) if k not in g]
        gap = np.min(np.abs(w[others] - centre)) if others else scale
        radius = max(2 * spread, 0.5 * gap) if spread > 0 else 0.5 * gap
        radius = min(radius, 0.5 * gap + 0.5 * spread)
        pg = _contour_projection(b, centre, radius)
        for k in g:
            proj[k] = pg / len(g)
    return SpectralDecomposition(w, proj, groups, True, cond)


def match_eigenvalues(predicted, values):
    """Permutation of ``values`` closest (assignment sense) to ``predicted``."""
    predicted = np.asarray(predicted, dtype=complex)
    values = np.asarray(values, dtype=complex)
    cost = np.abs(predicted[:, None] - values[None, :])
    rows, cols = linear_sum_assignment(cost)
    return values[cols[np.argsort(rows)]]


# ---------------------------------------------------------------------------
# small-|xi| data


def _bisect(f, lo, hi):
    flo = f(lo)
    for _ in range(BISECT_MAXITER):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= BISECT_RTOL * abs(mid):
            break
    return 0.5 * (lo + hi)


def solve_nu_tilde(report, gamma, coupling_tol=COUPLING_TOL, gamma_tol=GAMMA_DEGENERACY_TOL):
    """Non-zero eigenvalues ``nu_tilde_1 < ... < nu_tilde_n`` of ``B_1(eta)``.

    Roots ``s = nu_tilde^2`` of ``1/gamma^2 = sum_j a_j^2/(s - kappa_j)`` are
    bracketed between consecutive poles (and above the top pole by
    ``gamma^2 sum a_j^2``) and found by bisection.  Each hyperbolic index
    contributes ``omega_j`` itself.
    """
    if report.couplings is None:
        raise ValueError("nu_tilde is not defined at degenerate directions")
    kap = np.asarray(report.eigenvalues, dtype=float)
    a = np.asarray(report.couplings, dtype=float)
    g2 = gamma ** 2
    active = np.abs(a) > coupling_tol
    for j in np.flatnonzero(~active):
        k = active
        res = 1.0 / g2 - np.sum(a[k] ** 2 / (kap[j] - kap[k]))
        if abs(res) <= gamma_tol / g2:
            raise GammaDegenerateError(f"direction is gamma-degenerate for mode {j}")
    ka, aa = kap[active], a[active] ** 2

    def f(s):
        return np.sum(aa / (s - ka)) - 1.0 / g2

    scale = max(float(np.max(kap)), 1.0)
    inset = 1e-14 * scale
    roots = []
    for lo, hi in zip(ka[:-1], ka[1:]):
        roots.append(_bisect(f, lo + inset, hi - inset))
    if len(ka):
        top = ka[-1]
        roots.append(_bisect(f, top + inset, top + g2 * np.sum(aa) * (1 + 1e-9) + inset))
    roots += list(kap[~active])
    s = np.sort(np.array(roots, dtype=float))
    return np.sqrt(s)


@dataclass
class ExpansionCoefficients:
    """Small- and large-|xi| leading coefficients along one direction.

    Small |xi|: ``nu_0 ~ i kappa |xi|^2 b0`` and
    ``nu_j^± ~ ±|xi| nu_tilde_j + i kappa |xi|^2 b_j``.
    Large |xi|: ``nu_0 ~ i kappa |xi|^2 + heat_offset`` and
    ``nu_j^± ~ ±|xi| omega_j + i mode_offsets_j``.
    """

    nu_tilde: np.ndarray | None = None
    b0: float | None = None
    b: np.ndarray | None = None
    omega: np.ndarray | None = None
    heat_offset: complex | None = None
    mode_offsets: np.ndarray | None = None

    def to_dict(self):
        out = {}
        if self.nu_tilde is not None:
            out["0"] = {"b": self.b0}
            for j, (nt, bj) in enumerate(zip(self.nu_tilde, self.b)):
                out[str(j + 1)] = {"nu_tilde": float(nt), "b": float(bj)}
        if self.omega is not None:
            out.setdefault("0", {})["heat_offset_imag"] = float(np.imag(self.heat_offset))
            for j, (om, off) in enumerate(zip(self.omega, self.mode_offsets)):
                d = out.setdefault(str(j + 1), {})
                d["omega"] = float(om)
                d["imag_offset"] = float(off)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def small_xi_expansion(report, gamma, kappa):
    """``b_0`` and ``b_j`` of the small-|xi| expansion (``kappa`` is unused
    in the coefficients and only scales ``i kappa |xi|^2 b``)."""
    nu_t = solve_nu_tilde(report, gamma)
    kap = np.asarray(report.eigenvalues, dtype=float)
    a2 = np.asarray(report.couplings, dtype=float) ** 2
    g2 = gamma ** 2
    b0 = 1.0 / (1.0 + g2 * np.sum(a2 / kap))
    b = np.empty(len(nu_t))
    for j, nt in enumerate(nu_t):
        s = nt * nt
        d = s - kap
        hit = np.abs(d) <= 1e-14 * max(s, 1.0)
        if np.any(hit & (a2 <= COUPLING_TOL ** 2)):
            # a hyperbolic eigenvalue omega_k of B_1 is not damped at second order
            b[j] = 0.0
            continue
        b[j] = 1.0 / (1.0 + g2 * np.sum(a2 * (s + kap) / d ** 2))
    return ExpansionCoefficients(nu_tilde=nu_t, b0=float(b0), b=b)


def large_xi_expansion(report, gamma, kappa):
    """Leading large-|xi| data.

    The heat-mode offset is ``-i gamma^2/kappa``: the mode offsets
    ``gamma^2 a_j^2/(2 kappa)`` summed over ``±`` and ``j`` give
    ``gamma^2/kappa``, and ``trace B = i kappa |xi|^2`` forces the heat mode
    to compensate.
    """
    if report.couplings is None:
        raise ValueError("large-|xi| expansion needs a non-degenerate direction")
    a2 = np.asarray(report.couplings, dtype=float) ** 2
    return ExpansionCoefficients(
        omega=np.sqrt(np.asarray(report.eigenvalues, dtype=float)),
        heat_offset=-1j * gamma ** 2 / kappa,
        mode_offsets=gamma ** 2 * a2 / (2 * kappa),
    )


def predicted_small(report, gamma, kappa, xi_norm, coeffs=None):
    """Leading-order eigenvalues of ``B(xi_norm * eta)`` as ``|xi| -> 0``."""
    c = coeffs or small_xi_expansion(report, gamma, kappa)
    r = xi_norm
    vals = [1j * kappa * r * r * c.b0]
    for nt, bj in zip(c.nu_tilde, c.b):
        vals += [r * nt + 1j * kappa * r * r * bj, -r * nt + 1j * kappa * r * r * bj]
    return np.array(vals)


def predicted_large(report, gamma, kappa, xi_norm, coeffs=None):
    c = coeffs or large_xi_expansion(report, gamma, kappa)
    r = xi_norm
    vals = [1j * kappa * r * r + c.heat_offset]
    for om, off in zip(c.omega, c.mode_offsets):
        vals += [r * om + 1j * off, -r * om + 1j * off]
    return np.array(vals)


def numeric_eigenvalues(medium, gamma, kappa, eta, xi_norm, frame=None):
    eta = np.asarray(eta, dtype=float)
    sys = build_B(medium, gamma, kappa, xi_norm * eta / np.linalg.norm(eta), frame=frame)
    return np.linalg.eigvals(sys.B)


# ---------------------------------------------------------------------------
# imaginary parts near hyperbolic directions


def prop23_constants(report, j, gamma, kappa):
    """``C`` and ``D`` of the non-tangential limit at a j-hyperbolic point.

    ``lim a_j^2/(nu^2 - kappa_j) = C ∓ i D |xi|`` with
    ``C = (1 - gamma^2 sum_{k!=j} a_k^2/(kappa_j - kappa_k)) / gamma^2`` and
    ``D = kappa / (gamma^2 omega_j)``.
    """
    kap = np.asarray(report.eigenvalues, dtype=float)
    a = np.asarray(report.couplings, dtype=float)
    k = np.arange(len(kap)) != j
    c = (1.0 - gamma ** 2 * np.sum(a[k] ** 2 / (kap[j] - kap[k]))) / gamma ** 2
    d = kappa / (gamma ** 2 * np.sqrt(kap[j]))
    return float(c), float(d)


def prop23_ratio(report, j, gamma, kappa, xi_norm):
    """Predicted limit of ``Im nu_j^± / a_j(eta)^2`` at fixed ``|xi|``."""
    c, d = prop23_constants(report, j, gamma, kappa)
    om = np.sqrt(report.eigenvalues[j])
    return d * xi_norm ** 2 / (2 * om * (c * c + xi_norm ** 2 * d * d))


def mode_labels(n):
    return ["0"] + [f"{s}{j + 1}" for j in range(n) for s in ("+", "-")]


def label_eigenvalues(values, omega_xi):
    """Assign eigenvalues to heat/±j labels by real part ordering.

    The heat mode is the eigenvalue with the smallest ``|Re nu|``; the rest
    are paired with ``±omega_j(xi)`` by assignment.
    """
    values = np.asarray(values)
    n = len(omega_xi)
    k0 = int(np.argmin(np.abs(values.real)))
    rest = np.delete(values, k0)
    targets = np.array([s * w for w in omega_xi for s in (1, -1)], dtype=complex)
    cost = np.abs(rest.real[None, :] - targets.real[:, None])
    rows, cols = linear_sum_assignment(cost)
    ordered = rest[cols[np.argsort(rows)]]
    return np.concatenate([[values[k0]], ordered])[: 2 * n + 1]


def im_part_scan(medium, gamma, kappa, patch, xi_grid):
    """Tabulate eigenvalues of ``B(|xi| eta)`` over directions and radii.

    Returns a list of rows ``(eta, xi_norm, mode, re_nu, im_nu)``.
    """
    rows = []
    for eta in patch:
        eta = np.asarray(eta, dtype=float)
        eta = eta / np.linalg.norm(eta)
        rep = classify(medium, gamma, eta)
        if rep.kind == "degenerate":
            raise ValueError(f"patch contains a degenerate direction {eta}")
        frame = Eigenframe(rep.eigenvalues, rep.eigenvectors, rep.eig_gap)
        labels = mode_labels(len(eta))
        for r in xi_grid:
            sys = build_B(medium, gamma, kappa, r * eta, frame=frame)
            vals = label_eigenvalues(np.linalg.eigvals(sys.B), sys.omega)
            for lab, v in zip(labels, vals):
                rows.append((eta, float(r), lab, float(v.real), float(v.imag)))
    return rows


def scan_to_csv(rows):
    n = len(rows[0][0])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"eta_{i + 1}" for i in range(n)] + ["xi_norm", "mode", "re_nu", "im_nu"])
    for eta, r, lab, re, im in rows:
        w.writerow([repr(float(x)) for x in eta] + [repr(r), lab, repr(re), repr(im)])
    return buf.getvalue()


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
