"""Gauge-fixed eigenframes of A(eta), coupling functions and direction classes."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .media import symbol_at

DEGENERACY_TOL = 1e-8
COUPLING_TOL = 1e-8
KRYLOV_TOL = 1e-8
GAMMA_DEGENERACY_TOL = 1e-8


class Eigenframe(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray
    gap: float


def fix_gauge(vectors):
    """Flip columns so each has its largest-magnitude entry positive.

    Ties go to the lowest index (``argmax`` semantics).
    """
    vectors = np.array(vectors, dtype=float, copy=True)
    k = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[k, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigenframe(a):
    """Ascending eigenvalues, gauge-fixed orthonormal eigenvectors and gap.

    ``gap`` is the smallest spacing between consecutive eigenvalues
    (``inf`` for 1x1 input).
    """
    a = np.asarray(a, dtype=float)
    scale = np.linalg.norm(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if np.linalg.norm(a - a.T) > 1e-12 * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not symmetric")
    w, v = np.linalg.eigh(a)
    gap = float(np.min(np.diff(w))) if len(w) > 1 else float("inf")
    return Eigenframe(w, fix_gauge(v), gap)


def krylov_matrix(a, eta):
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    cols = [np.asarray(eta, dtype=float)]
    for _ in range(n - 1):
        cols.append(a @ cols[-1])
    return np.column_stack(cols)


def cyclic_dim(a, eta, tol=KRYLOV_TOL):
    """Dimension of span{eta, A eta, A^2 eta, ...} via singular values.

    ``A`` is rescaled to unit spectral norm first so the threshold
    ``tol * sigma_max`` is independent of the moduli's units.
    """
    a = np.asarray(a, dtype=float)
    s = np.linalg.norm(a, 2)
    if s > 0:
        a = a / s
    sv = np.linalg.svd(krylov_matrix(a, eta), compute_uv=False)
    return int(np.sum(sv > tol * sv[0]))


@dataclass
class DirectionReport:
    """Classification of one unit direction.

    ``kind`` is ``"degenerate"``, ``"hyperbolic"`` or ``"parabolic"``;
    ``hyperbolic_modes`` lists the (0-based) j with vanishing coupling.
    ``couplings`` is ``None`` for degenerate directions.
    """

    eta: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    couplings: np.ndarray | None
    kind: str
    hyperbolic_modes: tuple
    gamma_degenerate: tuple
    eig_gap: float

    FIELDS = ("n", "eta", "eigenvalues", "couplings", "kind",
              "hyperbolic_modes", "gamma_degenerate", "eig_gap")

    def to_dict(self):
        return {
            "n": int(len(self.eta)),
            "eta": [float(x) for x in self.eta],
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "couplings": None if self.couplings is None else [float(x) for x in self.couplings],
            "kind": self.kind,
            "hyperbolic_modes": [int(j) for j in self.hyperbolic_modes],
            "gamma_degenerate": [int(j) for j in self.gamma_degenerate],
            "eig_gap": float(self.eig_gap),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def csv_header(cls, n):
        cols = [f"eta_{i + 1}" for i in range(n)]
        cols += [f"kappa_{i + 1}" for i in range(n)]
        cols += [f"a_{i + 1}" for i in range(n)]
        return cols + ["kind", "hyperbolic_modes", "gamma_degenerate", "eig_gap"]

    def csv_row(self):
        n = len(self.eta)
        a = self.couplings if self.couplings is not None else [float("nan")] * n
        row = [repr(float(x)) for x in self.eta]
        row += [repr(float(x)) for x in self.eigenvalues]
        row += [repr(float(x)) for x in a]
        row += [self.kind,
                " ".join(str(j) for j in self.hyperbolic_modes),
                " ".join(str(j) for j in self.gamma_degenerate),
                repr(float(self.eig_gap))]
        return row


def reports_to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DirectionReport.csv_header(len(reports[0].eta)))
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def gamma_degeneracy_residual(values, couplings, j, gamma):
    """``1/gamma^2 - sum_{k != j} a_k^2 / (kappa_j - kappa_k)``."""
    k = np.arange(len(values)) != j
    return 1.0 / gamma ** 2 - float(np.sum(couplings[k] ** 2 / (values[j] - values[k])))


def classify(medium, gamma, eta, deg_tol=DEGENERACY_TOL, coupling_tol=COUPLING_TOL,
             gamma_tol=GAMMA_DEGENERACY_TOL):
    eta = np.asarray(eta, dtype=float)
    eta = eta / np.linalg.norm(eta)
    a = symbol_at(medium, eta)
    frame = eigenframe(a)
    degenerate = frame.gap <= deg_tol * np.linalg.norm(a)
    if degenerate:
        return DirectionReport(eta, frame.values, frame.vectors, None, "degenerate",
                               (), (), frame.gap)
    couplings = frame.vectors.T @ eta
    hyp = tuple(int(j) for j in np.flatnonzero(np.abs(couplings) <= coupling_tol))
    gdeg = tuple(j for j in hyp
                 if abs(gamma_degeneracy_residual(frame.values, couplings, j, gamma))
                 <= gamma_tol / gamma ** 2)
    kind = "hyperbolic" if hyp else "parabolic"
    return DirectionReport(eta, frame.values, frame.vectors, couplings, kind, hyp, gdeg,
                           frame.gap)


class DegeneratePathError(ValueError):
    def __init__(self, index, gap):
        super().__init__(f"path point {index} is degenerate (eigenvalue gap {gap:.3e})")
        self.index = index
        self.gap = gap


def _clusters(values, tol):
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > tol:
            groups.append(list(range(start, i)))
            start = i
    return groups


def track_frame(medium, path, seed_frame=None, deg_tol=DEGENERACY_TOL, allow_degenerate=False):
    """Continue an eigenframe along a path of unit directions.

    Columns of each new frame are matched to the predecessor by maximising
    the absolute overlap (assignment problem) and sign-aligned.  With
    ``allow_degenerate=True`` eigenvalue clusters are followed as subspaces:
    the cluster basis is the orthogonal Procrustes rotation closest to the
    predecessor's columns.
    """
    frames = []
    prev = None if seed_frame is None else np.asarray(seed_frame, dtype=float)
    for idx, eta in enumerate(path):
        a = symbol_at(medium, eta)
        w, v = np.linalg.eigh(a)
        tol = deg_tol * np.linalg.norm(a)
        gap = float(np.min(np.diff(w))) if len(w) > 1 else float("inf")
        if gap <= tol and not allow_degenerate:
            raise DegeneratePathError(idx, gap)
        if prev is None:
            v = fix_gauge(v)
        else:
            groups = _clusters(w, tol) if allow_degenerate else [[i] for i in range(len(w))]
            for g in groups:
                if len(g) > 1:
                    # Procrustes: rotate the cluster basis towards prev[:, g]
                    m = v[:, g].T @ prev[:, g]
                    u, _, vt = np.linalg.svd(m)
                    v[:, g] = v[:, g] @ (u @ vt)
            single = [g[0] for g in groups if len(g) == 1]
            if single:
                overlap = np.abs(prev[:, single].T @ v[:, single])
                rows, cols = linear_sum_assignment(-overlap)
                order = np.array(single)[cols[np.argsort(rows)]]
                w[single] = w[order]
                v[:, single] = v[:, order]
                dots = np.einsum("ij,ij->j", prev[:, single], v[:, single])
                v[:, single] *= np.where(dots < 0, -1.0, 1.0)
        frames.append(Eigenframe(w, v, gap))
        prev = v
    return frames


def couplings_along(path, frames):
    return np.array([f.vectors.T @ np.asarray(eta, float) for eta, f in zip(path, frames)])


def cubic_hyperbolic_det(lam, mu, tau, eta):
    """Krylov determinant of cubic 3D media and its factorised closed form.

    Returns ``(direct, closed, scale)`` where ``scale`` is the Hadamard
    bound ``|eta| |A eta| |A^2 eta|`` used for relative comparisons.
    """
    from .media import MediumSpec

    eta = np.asarray(eta, dtype=float)
    eta = eta / np.linalg.norm(eta)
    a = symbol_at(MediumSpec.cubic(lam=lam, mu=mu, tau=tau), eta)
    k = krylov_matrix(a, eta)
    direct = float(np.linalg.det(k))
    e1, e2, e3 = eta
    # cyclic ordering of the squared differences; (e1^2-e3^2) would flip the sign
    closed = ((tau - lam - 2 * mu) ** 3 * e1 * e2 * e3
              * (e1 ** 2 - e2 ** 2) * (e2 ** 2 - e3 ** 2) * (e3 ** 2 - e1 ** 2))
    scale = float(np.prod(np.linalg.norm(k, axis=0)))
    return direct, closed, scale
