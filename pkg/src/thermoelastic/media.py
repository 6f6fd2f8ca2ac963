"""Elastic media and their 2-homogeneous symbols A(xi).

A medium is described by a :class:`MediumSpec` holding a variant tag and a
flat parameter map.  The symbol is evaluated on unit directions from closed
forms and scaled by ``|xi|**2``.

Parameter orders used by :meth:`MediumSpec.from_shorthand`::

    isotropic:lam,mu
    cubic:tau,lam,mu
    rhombic:tau_1,...,tau_n,lam,mu
    hexagonal:tau1,tau2,lam1,lam2,mu
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

VARIANTS = ("isotropic", "cubic", "rhombic", "hexagonal", "generic")

_NAMES = {
    "isotropic": ("lam", "mu"),
    "cubic": ("tau", "lam", "mu"),
    "hexagonal": ("tau1", "tau2", "lam1", "lam2", "mu"),
}


@dataclass(frozen=True)
class CouplingConstants:
    """Thermo-elastic coupling ``gamma`` and thermal conductivity ``kappa``."""

    gamma: float
    kappa: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.kappa)):
            raise ValueError("coupling constants must be finite")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.gamma == 0:
            raise ValueError("gamma**2 must be positive")


@dataclass(frozen=True)
class MediumSpec:
    """Parametrised elastic medium.

    Use the constructors (:meth:`isotropic`, :meth:`cubic`, ...) rather than
    the raw initialiser.  ``params`` is a flat name -> value map; generic
    media keep their stiffness tensor in ``tensor`` and mirror it into
    ``params`` with keys ``c1111`` etc. (1-based indices).
    """

    variant: str
    n: int
    params: dict = field(default_factory=dict)
    tensor: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n}")
        for k, v in self.params.items():
            if not math.isfinite(float(v)):
                raise ValueError(f"parameter {k} is not finite: {v}")
        if self.variant == "hexagonal" and self.n != 3:
            raise ValueError("hexagonal media are three-dimensional")
        expected = self._param_names()
        if set(self.params) != set(expected):
            raise ValueError(
                f"{self.variant} medium expects parameters {expected}, "
                f"got {sorted(self.params)}"
            )

    # -- constructors ---------------------------------------------------
    @classmethod
    def isotropic(cls, lam, mu, n=3):
        return cls("isotropic", n, {"lam": float(lam), "mu": float(mu)})

    @classmethod
    def cubic(cls, lam, mu, tau, n=3):
        return cls("cubic", n, {"tau": float(tau), "lam": float(lam), "mu": float(mu)})

    @classmethod
    def rhombic(cls, lam, mu, taus):
        taus = [float(t) for t in taus]
        params = {f"tau{i + 1}": t for i, t in enumerate(taus)}
        params.update(lam=float(lam), mu=float(mu))
        return cls("rhombic", len(taus), params)

    @classmethod
    def hexagonal(cls, tau1, tau2, lam1, lam2, mu):
        vals = dict(tau1=tau1, tau2=tau2, lam1=lam1, lam2=lam2, mu=mu)
        return cls("hexagonal", 3, {k: float(v) for k, v in vals.items()})

    @classmethod
    def one_dimensional(cls, tau):
        """1D medium with wave speed ``tau``, i.e. ``A(xi) = tau**2 xi**2``."""
        return cls.cubic(lam=0.0, mu=1.0, tau=float(tau) ** 2, n=1)

    @classmethod
    def generic(cls, stiffness):
        """Medium from an order-4 stiffness tensor ``C[i,j,k,l]``.

        The tensor is symmetrised over the minor and major index pairs, so
        ``A(xi)[i,k] = sum_jl C[i,j,k,l] xi_j xi_l`` is always symmetric.
        """
        c = np.asarray(stiffness, dtype=float)
        n = c.shape[0]
        if c.shape != (n, n, n, n):
            raise ValueError(f"stiffness tensor must have shape (n,n,n,n), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("stiffness tensor has non-finite entries")
        c = (c + c.transpose(1, 0, 2, 3)) / 2
        c = (c + c.transpose(0, 1, 3, 2)) / 2
        c = (c + c.transpose(2, 3, 0, 1)) / 2
        params = {_tensor_key(idx): float(c[idx]) for idx in itertools.product(range(n), repeat=4)}
        return cls("generic", n, params, tensor=c)

    # -- helpers ----------------------------------------------------------
    def _param_names(self):
        if self.variant in _NAMES:
            return list(_NAMES[self.variant])
        if self.variant == "rhombic":
            return [f"tau{i + 1}" for i in range(self.n)] + ["lam", "mu"]
        return [_tensor_key(idx) for idx in itertools.product(range(self.n), repeat=4)]

    def __getitem__(self, name):
        return self.params[name]

    def stiffness_tensor(self):
        """Order-4 stiffness tensor equivalent to this medium."""
        n = self.n
        if self.variant == "generic":
            return self.tensor if self.tensor is not None else _tensor_from_params(self.params, n)
        if self.variant == "hexagonal":
            return _hexagonal_tensor(**self.params)
        p = self.params
        c = np.zeros((n, n, n, n))
        if self.variant == "isotropic":
            lam, mu = p["lam"], p["mu"]
            taus = [lam + 2 * mu] * n
        elif self.variant == "cubic":
            lam, mu = p["lam"], p["mu"]
            taus = [p["tau"]] * n
        else:
            lam, mu = p["lam"], p["mu"]
            taus = [p[f"tau{i + 1}"] for i in range(n)]
        for i in range(n):
            c[i, i, i, i] = taus[i]
            for j in range(n):
                if i != j:
                    c[i, i, j, j] = lam
                    c[i, j, i, j] = mu
                    c[i, j, j, i] = mu
        return c

    # -- serialisation ------------------------------------------------------
    def to_dict(self):
        return {"variant": self.variant, "n": self.n, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d):
        variant, n, params = d["variant"], int(d["n"]), {k: float(v) for k, v in d["params"].items()}
        if variant == "generic":
            return cls.generic(_tensor_from_params(params, n))
        return cls(variant, n, params)

    def dumps(self):
        # repr-based float formatting in json round-trips bit-exactly
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        Path(path).write_text(self.dumps() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path):
        return cls.loads(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_shorthand(cls, text):
        """Parse ``name:p1,p2,...`` with an optional ``;n=<dim>`` suffix."""
        head, _, opts = text.partition(";")
        name, _, body = head.partition(":")
        name = name.strip().lower()
        vals = [float(v) for v in body.split(",") if v.strip()]
        n = 3
        if opts:
            key, _, val = opts.partition("=")
            if key.strip() != "n":
                raise ValueError(f"unknown shorthand option {opts!r}")
            n = int(val)
        if name == "isotropic":
            _expect(name, vals, 2)
            return cls.isotropic(vals[0], vals[1], n=n)
        if name == "cubic":
            _expect(name, vals, 3)
            return cls.cubic(tau=vals[0], lam=vals[1], mu=vals[2], n=n)
        if name == "hexagonal":
            _expect(name, vals, 5)
            return cls.hexagonal(*vals)
        if name == "rhombic":
            if len(vals) < 3:
                raise ValueError("rhombic shorthand needs tau_1..tau_n,lam,mu")
            return cls.rhombic(lam=vals[-2], mu=vals[-1], taus=vals[:-2])
        if name in ("1d", "oned"):
            _expect(name, vals, 1)
            return cls.one_dimensional(vals[0])
        raise ValueError(f"unknown medium shorthand {name!r}")


def _expect(name, vals, k):
    if len(vals) != k:
        raise ValueError(f"{name} shorthand takes {k} parameters, got {len(vals)}")


def _tensor_key(idx):
    return "c" + "".join(str(i + 1) for i in idx)


def _tensor_from_params(params, n):
    c = np.zeros((n, n, n, n))
    for idx in itertools.product(range(n), repeat=4):
        c[idx] = params[_tensor_key(idx)]
    return c


def _hexagonal_tensor(tau1, tau2, lam1, lam2, mu):
    # Voigt order (11, 22, 33, 23, 13, 12) matching the rows of D(eta)
    voigt = np.zeros((6, 6))
    voigt[:3, :3] = [[tau1, lam1, lam2], [lam1, tau1, lam2], [lam2, lam2, tau2]]
    voigt[3, 3] = voigt[4, 4] = mu
    voigt[5, 5] = (tau1 - lam1) / 2
    pairs = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)]
    c = np.zeros((3, 3, 3, 3))
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            for ii, jj in {(i, j), (j, i)}:
                for kk, ll in {(k, l), (l, k)}:
                    c[ii, jj, kk, ll] = voigt[a, b]
    return c


def hexagonal_structure(tau1, tau2, lam1, lam2, mu):
    """The 6x6 structure matrix of hexagonal media."""
    c = np.zeros((6, 6))
    c[:3, :3] = [[tau1, lam1, lam2], [lam1, tau1, lam2], [lam2, lam2, tau2]]
    c[3, 3] = c[4, 4] = mu
    c[5, 5] = (tau1 - lam1) / 2
    return c


def hexagonal_d(eta):
    e1, e2, e3 = eta
    return np.array([
        [e1, 0, 0],
        [0, e2, 0],
        [0, 0, e3],
        [0, e3, e2],
        [e3, 0, e1],
        [e2, e1, 0],
    ], dtype=float)


def _unit_symbol(medium, eta):
    p = medium.params
    v = medium.variant
    if v == "isotropic":
        return p["mu"] * np.eye(medium.n) + (p["lam"] + p["mu"]) * np.outer(eta, eta)
    if v in ("cubic", "rhombic"):
        a = (p["lam"] + p["mu"]) * np.outer(eta, eta)
        if v == "cubic":
            taus = np.full(medium.n, p["tau"])
        else:
            taus = np.array([p[f"tau{i + 1}"] for i in range(medium.n)])
        np.fill_diagonal(a, (taus - p["mu"]) * eta ** 2 + p["mu"])
        return a
    if v == "hexagonal":
        d = hexagonal_d(eta)
        return d.T @ hexagonal_structure(**p) @ d
    c = medium.stiffness_tensor()
    return np.einsum("ijkl,j,l->ik", c, eta, eta)


def symbol_at(medium, xi):
    """Evaluate the elastic symbol ``A(xi)`` (symmetric ``n x n``).

    ``A(xi) = |xi|**2 A(xi/|xi|)``; ``xi = 0`` gives the zero matrix.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape[0] != medium.n:
        raise ValueError(f"direction has dimension {xi.shape[0]}, medium has n={medium.n}")
    if not np.all(np.isfinite(xi)):
        raise ValueError("non-finite frequency vector")
    r = float(np.linalg.norm(xi))
    if r == 0.0:
        return np.zeros((medium.n, medium.n))
    a = _unit_symbol(medium, xi / r)
    return r * r * a


def symbol_batch(medium, etas):
    """``A(eta)`` for an ``(m, n)`` array of directions (not normalised here)."""
    etas = np.asarray(etas, dtype=float)
    if medium.variant == "generic":
        return np.einsum("ijkl,mj,ml->mik", medium.stiffness_tensor(), etas, etas)
    if medium.variant == "hexagonal":
        c = medium.stiffness_tensor()
        return np.einsum("ijkl,mj,ml->mik", c, etas, etas)
    p = medium.params
    n = medium.n
    r2 = np.einsum("mi,mi->m", etas, etas)
    a = (p["lam"] + p["mu"]) * etas[:, :, None] * etas[:, None, :]
    idx = np.arange(n)
    if medium.variant == "isotropic":
        a[:, idx, idx] += p["mu"] * r2[:, None]
    else:
        if medium.variant == "cubic":
            taus = np.full(n, p["tau"])
        else:
            taus = np.array([p[f"tau{i + 1}"] for i in range(n)])
        a[:, idx, idx] = (taus - p["mu"]) * etas ** 2 + p["mu"] * r2[:, None]
    return a


# ---------------------------------------------------------------------------
# direction sampling and positivity


def sphere_points(n, count):
    """Deterministic quasi-uniform directions on the unit sphere in R^n.

    Fibonacci lattice for n=3, equispaced angles for n=2, and a scrambled
    Sobol sequence mapped through the Gaussian quantile for n >= 4.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if n == 1:
        return np.array([[1.0], [-1.0]])[: max(1, min(count, 2))]
    if n == 2:
        th = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(th), np.sin(th)])
    if n == 3:
        return fibonacci_sphere(count)
    from scipy.stats import norm, qmc

    u = qmc.Sobol(d=n, scramble=True, seed=12345).random(count)
    z = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def fibonacci_sphere(count):
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    rho = np.sqrt(np.clip(1 - z * z, 0, None))
    phi = np.pi * (3 - np.sqrt(5)) * k
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


@dataclass
class PositivityReport:
    positive: bool
    min_eig: float
    witness: np.ndarray


def positivity_check(medium, sample_count=2000, refine=True):
    """Minimum eigenvalue of ``A(eta)`` over sampled unit directions.

    The best lattice direction is polished by a local Nelder-Mead search
    (``refine=True``) so that borderline media are not misreported.
    """
    etas = sphere_points(medium.n, sample_count)
    mins = np.linalg.eigvalsh(symbol_batch(medium, etas))[:, 0]
    k = int(np.argmin(mins))
    best, witness = float(mins[k]), etas[k]
    if refine and medium.n >= 2:
        from scipy.optimize import minimize

        def f(x):
            r = np.linalg.norm(x)
            return np.linalg.eigvalsh(_unit_symbol(medium, x / r))[0] if r > 0 else np.inf

        # restart from a few of the lowest samples
        for start in etas[np.argsort(mins)[:4]]:
            res = minimize(f, start, method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
            if res.fun < best:
                best = float(res.fun)
                witness = res.x / np.linalg.norm(res.x)
    return PositivityReport(positive=best > 0, min_eig=best, witness=witness)


def cubic_positive_closed_form(lam, mu, tau):
    """Positivity of 3D cubic media: mu>0, tau>0, -2mu - tau/2 < lam < tau."""
    return mu > 0 and tau > 0 and (-2 * mu - tau / 2 < lam < tau)
