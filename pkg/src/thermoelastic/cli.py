"""Command-line front end.

Every subcommand is a pure function of its parsed options: it writes its
artifacts (CSV/JSON) and a ``<subcommand>.manifest.json`` recording the exact
configuration into the output directory, prints a one-line summary and
returns an exit code (0 success, 2 validation failure, 1 usage error).

The output directory defaults to ``$THERMOELASTIC_OUT`` and then to
``./thermoelastic-out``.  ``--medium`` accepts the shorthand
``name:p1,p2,...`` (see :mod:`thermoelastic.media`) or a path to a medium
JSON file; an existing file always wins.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import blowup, evolve, fresnel, media, spectral, symbol

OUT_ENV = "THERMOELASTIC_OUT"
DEFAULT_OUT = "thermoelastic-out"
EXIT_OK, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2

SUBCOMMANDS = (
    "media-check", "classify", "couplings", "expand-small", "expand-large", "im-scan",
    "fresnel-cut", "fresnel-surface", "singularities", "sugimoto", "blowup-conic",
    "blowup-uniplanar", "hexagonal", "evolve", "decay-scan", "validate-all",
)


class UsageError(Exception):
    """Malformed options or configuration (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# option parsing helpers


def parse_vector(text):
    try:
        v = np.array([float(x) for x in str(text).split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"malformed vector {text!r}") from exc
    if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
        raise UsageError(f"vector {text!r} must be finite and non-zero")
    return v


def parse_vectors(text):
    """``"1,2,3;1,0,0"`` -> list of vectors."""
    return [parse_vector(chunk) for chunk in str(text).split(";") if chunk.strip()]


def load_medium(text):
    path = Path(text)
    try:
        if path.is_file():
            return media.MediumSpec.load(path)
        return media.MediumSpec.from_shorthand(text)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad medium {text!r}: {exc}") from exc


def _require_cubic(medium):
    if medium.variant != "cubic" or medium.n != 3:
        raise UsageError("this subcommand needs a 3D cubic medium (cubic:tau,lam,mu)")
    return medium["lam"], medium["mu"], medium["tau"]


def _require_hexagonal(medium):
    if medium.variant != "hexagonal":
        raise UsageError("this subcommand needs a hexagonal medium (hexagonal:tau1,tau2,lam1,lam2,mu)")
    p = medium.params
    return p["tau1"], p["tau2"], p["lam1"], p["lam2"], p["mu"]


def _json(obj):
    def default(o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, complex):
            return [o.real, o.imag]
        raise TypeError(f"not serialisable: {type(o)}")
    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


def _cx(z):
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# run bookkeeping


class Run:
    """Collects artifacts of one subcommand and writes the manifest."""

    def __init__(self, args):
        self.args = args
        self.name = args.command
        self.out = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
        self.outputs = {}
        self.rng = np.random.default_rng(args.seed)

    def config(self):
        skip = {"func", "out"}
        return {k: v for k, v in sorted(vars(self.args).items()) if k not in skip}

    def write(self, suffix, text):
        self.out.mkdir(parents=True, exist_ok=True)
        fname = f"{self.name}{suffix}"
        (self.out / fname).write_text(text, encoding="utf-8")
        self.outputs[fname] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return self.out / fname

    def finish(self, code, extra=None):
        man = {"subcommand": self.name, "config": self.config(), "outputs": self.outputs,
               "exit_code": code}
        if extra:
            man.update(extra)
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / f"{self.name}.manifest.json").write_text(_json(man), encoding="utf-8")
        return code


def _records_status(records, informational=()):
    failed = [r for r in records if not r.passed and r.name not in informational]
    return (EXIT_VALIDATION if failed else EXIT_OK), failed


# ---------------------------------------------------------------------------
# subcommands


def cmd_media_check(run, a):
    m = load_medium(a.medium)
    rep = media.positivity_check(m, sample_count=a.samples)
    out = {"medium": m.to_dict(), "positive": rep.positive, "min_eig": rep.min_eig,
           "witness": rep.witness.tolist()}
    if m.variant == "cubic" and m.n == 3:
        out["closed_form_positive"] = media.cubic_positive_closed_form(m["lam"], m["mu"], m["tau"])
    run.write(".json", _json(out))
    code = EXIT_OK if rep.positive else EXIT_VALIDATION
    return code, f"positive={rep.positive} min_eig={rep.min_eig:.6g}"


def cmd_classify(run, a):
    m = load_medium(a.medium)
    eta = parse_vector(a.dir)
    if len(eta) != m.n:
        raise UsageError(f"--dir has {len(eta)} entries, medium has n={m.n}")
    rep = spectral.classify(m, a.gamma, eta, deg_tol=a.deg_tol, coupling_tol=a.coupling_tol,
                            gamma_tol=a.gamma_tol)
    run.write(".json", json.dumps(rep.to_dict(), indent=2) + "\n")
    return EXIT_OK, f"kind={rep.kind} hyperbolic_modes={list(rep.hyperbolic_modes)}"


def _directions(run, a, n):
    if a.dirs:
        etas = parse_vectors(a.dirs)
    else:
        etas = run.rng.standard_normal((a.count, n))
    etas = [np.asarray(e) / np.linalg.norm(e) for e in etas]
    if any(len(e) != n for e in etas):
        raise UsageError(f"directions must have {n} entries")
    return etas


def cmd_couplings(run, a):
    m = load_medium(a.medium)
    reports = [spectral.classify(m, a.gamma, e) for e in _directions(run, a, m.n)]
    run.write(".csv", spectral.reports_to_csv(reports))
    worst = max((abs(float(np.sum(r.couplings ** 2)) - 1.0) for r in reports
                 if r.couplings is not None), default=0.0)
    code = EXIT_OK if worst <= a.tol else EXIT_VALIDATION
    return code, f"{len(reports)} directions, max |sum a_j^2 - 1| = {worst:.2e}"


def _expansion(run, a, small):
    m = load_medium(a.medium)
    eta = parse_vector(a.dir)
    rep = spectral.classify(m, a.gamma, eta)
    if rep.kind == "degenerate":
        raise UsageError("expansions are defined at non-degenerate directions")
    if small:
        coeffs = symbol.small_xi_expansion(rep, a.gamma, a.kappa)
        predict = symbol.predicted_small
    else:
        coeffs = symbol.large_xi_expansion(rep, a.gamma, a.kappa)
        predict = symbol.predicted_large
    xs = np.geomspace(a.xi_min, a.xi_max, a.count)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["xi_norm", "max_residual"])
    res = []
    for x in xs:
        p = predict(rep, a.gamma, a.kappa, x, coeffs)
        v = symbol.match_eigenvalues(p, symbol.numeric_eigenvalues(m, a.gamma, a.kappa, rep.eta, x))
        res.append(float(np.max(np.abs(v - p))))
        w.writerow([repr(float(x)), repr(res[-1])])
    slope = symbol.loglog_slope(xs, res)
    out = {"direction": rep.eta.tolist(), "kind": rep.kind, "coefficients": coeffs.to_dict(),
           "residual_slope": slope}
    if small:
        out["trace_rule"] = coeffs.b0 + 2 * float(np.sum(coeffs.b))
        ok = slope >= a.min_slope
    else:
        ok = slope <= a.max_slope
    run.write(".json", _json(out))
    run.write(".csv", buf.getvalue())
    return (EXIT_OK if ok else EXIT_VALIDATION), f"residual slope {slope:.3f}"


def cmd_expand_small(run, a):
    return _expansion(run, a, small=True)


def cmd_expand_large(run, a):
    return _expansion(run, a, small=False)


def cmd_im_scan(run, a):
    m = load_medium(a.medium)
    patch = _directions(run, a, m.n)
    xs = np.geomspace(a.xi_min, a.xi_max, a.xi_count)
    try:
        rows = symbol.im_part_scan(m, a.gamma, a.kappa, patch, xs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    run.write(".csv", symbol.scan_to_csv(rows))
    low = min(r[4] / max(1.0, r[1] ** 2) for r in rows)
    code = EXIT_OK if low >= -1e-10 else EXIT_VALIDATION
    return code, f"{len(rows)} rows, min Im nu/max(1,|xi|^2) = {low:.3e}"


def _positive(m):
    try:
        fresnel._require_positive(m)
    except fresnel.NonPositiveMedium as exc:
        raise UsageError(str(exc)) from exc


def cmd_fresnel_cut(run, a):
    m = load_medium(a.medium)
    _positive(m)
    try:
        plane = fresnel.parse_plane(a.plane)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lines = fresnel.planar_cut(m, plane, resolution=a.resolution)
    run.write(".csv", fresnel.polylines_to_csv(lines))
    return EXIT_OK, f"{len(lines)} sheets x {a.resolution} points"


def cmd_fresnel_surface(run, a):
    m = load_medium(a.medium)
    _positive(m)
    samples = fresnel.sample_surface(m, a.resolution)
    run.write(".csv", fresnel.surface_to_csv(samples))
    worst = max(fresnel.membership_residual(m, s.point) for s in samples)
    code = EXIT_OK if worst <= a.tol else EXIT_VALIDATION
    return code, f"{len(samples)} samples, max membership residual {worst:.2e}"


def cmd_singularities(run, a):
    m = load_medium(a.medium)
    _positive(m)
    census = fresnel.detect_singularities(m, resolution=a.resolution, tol=a.tol)
    run.write(".json", fresnel.singularities_to_json(census))
    counts = census.counts() if not census.global_degenerate else {"global": 1}
    return EXIT_OK, "singularities: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))


def cmd_sugimoto(run, a):
    m = load_medium(a.medium)
    lam, mu, tau = _require_cubic(m)
    if a.curve == "uniplanar":
        curve = fresnel.uniplanar_indicatrix(lam, mu, tau, branch=a.branch, printed=a.printed)
        if curve is None:
            run.write(".json", _json({"curve": a.curve, "closed": False}))
            return EXIT_OK, "indicator curve is not closed for these moduli"
    else:
        curve = fresnel.cubic_hyperbolic_section(lam, mu, tau, which=a.curve)
    best, detail = fresnel.sugimoto_index(curve, samples=a.samples)
    out = {"curve": a.curve, "closed": True, "index": best,
           "curvature_zeros": [{"t": t, "order": c.value, "interval": c.interval}
                               for t, c in detail]}
    run.write(".json", _json(out))
    return EXIT_OK, f"Sugimoto index {best} ({len(detail)} curvature zeros)"


def _phis(count):
    # avoid the symmetry angles where the chart parametrisation is special
    return (np.arange(count) + 0.37) * 2 * np.pi / count


def conic_records(lam, mu, tau, gamma, kappa, xi_norm, phis, h=1e-3, tol=1e-3):
    ch = blowup.ConicChart(lam, mu, tau)
    params = dict(lam=lam, mu=mu, tau=tau)
    recs = []
    for phi in phis:
        p = dict(params, phi=float(phi))
        recs.append(blowup.CheckRecord("conic_split", abs(ch.split),
                                       abs(blowup.conic_split_fd(lam, mu, tau, phi, h)), tol, p))
        fd = blowup.conic_B_split_fd(lam, mu, tau, gamma, kappa, xi_norm, phi, h)
        recs.append(blowup.CheckRecord("conic_B_split", abs(ch.delta1), abs(fd), tol,
                                       dict(p, gamma=gamma, kappa=kappa, xi=xi_norm)))
    return recs


def uniplanar_records(lam, mu, tau, gamma, kappa, xi_norm, phis, h=1e-3, tol=1e-3):
    """Records for the corrected uniplanar coefficients plus ``*_printed``
    records for the printed forms (informational)."""
    ch = blowup.UniplanarChart(lam, mu, tau)
    params = dict(lam=lam, mu=mu, tau=tau)
    recs = []
    for phi in phis:
        p = dict(params, phi=float(phi))
        fd = blowup.uniplanar_quadratic_fd(lam, mu, tau, phi, h)
        for k, (pc, pp) in enumerate(zip(2 * ch.block_eigs(phi), 2 * ch.block_eigs(phi, ch.D))):
            recs.append(blowup.CheckRecord("uniplanar_quadratic", pc, fd[k], tol, dict(p, branch=k)))
            recs.append(blowup.CheckRecord("uniplanar_quadratic_printed", pp, fd[k], tol,
                                           dict(p, branch=k)))
        pb = dict(p, gamma=gamma, kappa=kappa, xi=xi_norm)
        fdb = blowup.uniplanar_B_quadratic_fd(lam, mu, tau, gamma, kappa, xi_norm, phi, h)
        full = np.linalg.eigvals(blowup.uniplanar_thermal_block(lam, mu, tau, gamma, kappa,
                                                                xi_norm, phi, 1))
        full = full[np.argsort(-full.real)]
        printed = ch.block_eigs(phi, ch.D) / (2 * np.sqrt(mu))
        for k in range(2):
            recs.append(blowup.CheckRecord("uniplanar_B", full[k], fdb[k], tol, dict(pb, branch=k)))
            recs.append(blowup.CheckRecord("uniplanar_B_printed", printed[k], fdb[k], tol,
                                           dict(pb, branch=k)))
    return recs


PRINTED = ("uniplanar_quadratic_printed", "uniplanar_B_printed")


def _blowup(run, a, kind):
    m = load_medium(a.medium)
    lam, mu, tau = _require_cubic(m)
    fn = conic_records if kind == "conic" else uniplanar_records
    try:
        recs = fn(lam, mu, tau, a.gamma, a.kappa, a.xi, _phis(a.phis), a.h, a.tol)
    except blowup.ExcludedParameters as exc:
        raise UsageError(str(exc)) from exc
    run.write(".json", blowup.report_json(recs))
    code, failed = _records_status(recs, PRINTED)
    worst = max(r.rel_error for r in recs if r.name not in PRINTED)
    return code, f"{len(recs)} checks, {len(failed)} failed, worst rel. error {worst:.2e}"


def cmd_blowup_conic(run, a):
    return _blowup(run, a, "conic")


def cmd_blowup_uniplanar(run, a):
    return _blowup(run, a, "uniplanar")


def hexagonal_records(tau1, tau2, lam1, lam2, mu, psis, tol=1e-10):
    m = media.MediumSpec.hexagonal(tau1, tau2, lam1, lam2, mu)
    p = dict(tau1=tau1, tau2=tau2, lam1=lam1, lam2=lam2, mu=mu)
    recs, reductions = [], []
    for psi in psis:
        red = blowup.hexagonal_reduce(tau1, tau2, lam1, lam2, mu, psi)
        reductions.append(red.to_dict())
        w = np.linalg.eigvalsh(media.symbol_at(m, blowup.hexagonal_eta(psi)))
        blk = np.linalg.eigvalsh(red.block)
        pred = np.sort(np.concatenate([[red.hyperbolic_value], blk]))
        for k in range(3):
            recs.append(blowup.CheckRecord("hexagonal_spectrum", pred[k], w[k], tol,
                                           dict(p, psi=float(psi), k=k)))
        recs.append(blowup.CheckRecord("hexagonal_trace", red.trace_printed, red.trace, tol,
                                       dict(p, psi=float(psi))))
        recs.append(blowup.CheckRecord(
            "hexagonal_det", blowup.hexagonal_det_formula(tau1, tau2, lam1, lam2, mu, psi),
            red.det, tol, dict(p, psi=float(psi))))
        recs.append(blowup.CheckRecord("hexagonal_det_printed", red.det_printed, red.det, tol,
                                       dict(p, psi=float(psi))))
    return recs, reductions


def cmd_hexagonal(run, a):
    m = load_medium(a.medium)
    args = _require_hexagonal(m)
    psis = np.linspace(0.05, np.pi / 2 - 0.05, a.count)
    recs, reductions = hexagonal_records(*args, psis, a.tol)
    run.write(".json", _json({"checks": json.loads(blowup.report_json(recs)),
                              "reductions": reductions}))
    code, failed = _records_status(recs, ("hexagonal_det_printed",))
    deg = reductions[0]["degenerate_eta3_sq"]
    return code, f"{len(recs)} checks, {len(failed)} failed, degenerate eta3^2 = {deg}"


def _experiment(a):
    if a.experiment not in evolve.EXPERIMENTS:
        raise UsageError(f"unknown experiment {a.experiment!r}; "
                         f"choose from {sorted(evolve.EXPERIMENTS)}")
    cfg = evolve.EXPERIMENTS[a.experiment]
    if a.medium is not None:
        cfg = evolve.DecayConfig(**{**cfg.to_dict(), "medium": a.medium})
    if a.gamma is not None or a.kappa is not None:
        cfg = evolve.DecayConfig(**{**cfg.to_dict(),
                                    "gamma": cfg.gamma if a.gamma is None else a.gamma,
                                    "kappa": cfg.kappa if a.kappa is None else a.kappa})
    return cfg


def cmd_evolve(run, a):
    import warnings

    cfg = _experiment(a)
    m = load_medium(cfg.medium)
    lat = cfg.lattice().refined() if a.refine else cfg.lattice()
    data = evolve.build_data(cfg, lat)
    prop = evolve.Propagator(m, cfg.gamma, cfg.kappa, data)
    times = [float(t) for t in str(a.times).split(",")]
    q = np.inf if a.q == "inf" else 2
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "norm_q", "q", "label"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", evolve.AliasingWarning)
        for t in times:
            w.writerow([repr(float(t)), repr(float(evolve.physical_norms(prop.state(t), q))), a.q, cfg.label])
    run.write(".csv", buf.getvalue())
    extra = {"lattice": lat.to_dict(), "experiment": cfg.to_dict(),
             "spectral_abscissa": prop.spectral_abscissa,
             "fallback_count": prop.fallback_count,
             "warnings": [str(c.message) for c in caught]}
    run.extra = extra
    code = EXIT_OK if prop.spectral_abscissa <= 1e-10 else EXIT_VALIDATION
    return code, f"{len(times)} times on {len(data.index)} lattice points"


def cmd_decay_scan(run, a):
    import warnings

    cfg = _experiment(a)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", evolve.AliasingWarning)
        res = evolve.run_decay(cfg, refine=a.refine, seed=a.seed)
    run.write(".csv", res.trace_csv())
    man = res.manifest()
    man.pop("elapsed_s", None)
    man["warnings"] = [str(c.message) for c in caught]
    run.write(".json", _json(man))
    ok = True
    if cfg.expected is not None:
        ok = abs(res.fit.exponent - cfg.expected) <= cfg.tolerance
    return (EXIT_OK if ok else EXIT_VALIDATION), (
        f"exponent {res.fit.exponent:.4f} [{res.fit.ci_low:.4f}, {res.fit.ci_high:.4f}]"
        f" expected {cfg.expected} +- {cfg.tolerance} ({res.elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# validate-all

#: pinned tolerances of the invariant suites
VALIDATE_TOLS = {"identity": 1e-9, "coupling": 1e-10, "trace_rule": 1e-10,
                 "membership": 1e-10, "spectrum": 1e-10, "blowup": 1e-3,
                 "im_floor": 1e-10}


def _check(name, value, tol, **params):
    return {"name": name, "value": float(value), "tol": tol, "pass": bool(value <= tol),
            "params": params}


def suite_identities(m, gamma, kappa, rng, count=200):
    """trace B, det B and the closed characteristic polynomial."""
    tol = VALIDATE_TOLS["identity"]
    worst_tr = worst_det = worst_cp = 0.0
    for _ in range(count):
        eta = rng.standard_normal(m.n)
        eta /= np.linalg.norm(eta)
        r = 10 ** rng.uniform(-2, 2)
        rep = spectral.classify(m, gamma, eta)
        if rep.kind == "degenerate":
            continue
        sys_ = symbol.build_B(m, gamma, kappa, r * eta)
        tr = np.trace(sys_.B)
        worst_tr = max(worst_tr, abs(tr - 1j * kappa * r * r) / (kappa * r * r))
        det_a = np.linalg.det(media.symbol_at(m, r * eta))
        target = (-1) ** m.n * 1j * kappa * r * r * det_a
        worst_det = max(worst_det, abs(np.linalg.det(sys_.B) - target) / abs(target))
        nu = complex(rng.standard_normal(), rng.standard_normal()) * r
        cp, cd = symbol.char_poly(sys_, nu), symbol.char_poly_direct(sys_, nu)
        worst_cp = max(worst_cp, abs(cp - cd) / max(abs(cd), 1e-300))
    return [_check("trace_B", worst_tr, tol), _check("det_B", worst_det, tol),
            _check("char_poly", worst_cp, tol)]


def suite_couplings(m, gamma, kappa, rng, count=200):
    worst_a = worst_b = 0.0
    for _ in range(count):
        eta = rng.standard_normal(m.n)
        rep = spectral.classify(m, gamma, eta)
        if rep.kind == "degenerate":
            continue
        worst_a = max(worst_a, abs(float(np.sum(rep.couplings ** 2)) - 1))
        if rep.kind != "parabolic":
            continue
        try:
            c = symbol.small_xi_expansion(rep, gamma, kappa)
        except symbol.GammaDegenerateError:
            continue
        worst_b = max(worst_b, abs(c.b0 + 2 * float(np.sum(c.b)) - 1))
    return [_check("coupling_normalisation", worst_a, VALIDATE_TOLS["coupling"]),
            _check("trace_rule", worst_b, VALIDATE_TOLS["trace_rule"])]


def suite_spectrum(m, gamma, kappa, rng, count=100):
    """Upper half-plane and sum of eigenprojections."""
    low = proj = 0.0
    for _ in range(count):
        eta = rng.standard_normal(m.n)
        r = 10 ** rng.uniform(-2, 2)
        rep = spectral.classify(m, gamma, eta)
        if rep.kind == "degenerate":
            continue
        sys_ = symbol.build_B(m, gamma, kappa, r * rep.eta)
        dec = symbol.eigenvalues_B(sys_)
        scale = max(1.0, float(np.max(np.abs(dec.values))))
        low = max(low, float(-np.min(dec.values.imag)) / scale)
        proj = max(proj, float(np.linalg.norm(np.sum(dec.projections, axis=0) - np.eye(len(dec.values)))))
    return [_check("im_nu_nonnegative", max(low, 0.0), VALIDATE_TOLS["im_floor"]),
            _check("projection_sum", proj, 1e-8)]


def suite_fresnel(m, resolution=400):
    if m.n != 3:
        return []
    samples = fresnel.sample_surface(m, resolution)
    worst = max(fresnel.membership_residual(m, s.point) for s in samples)
    return [_check("fresnel_membership", worst, VALIDATE_TOLS["membership"])]


def suite_variant(m, gamma, kappa):
    """Variant-specific structure: cubic blow-ups and census, hexagonal
    reduction."""
    out = []
    if m.variant == "cubic" and m.n == 3:
        lam, mu, tau = m["lam"], m["mu"], m["tau"]
        if tau != lam + 2 * mu and lam + mu != 0 and tau != mu:
            recs = conic_records(lam, mu, tau, gamma, kappa, 1.0, _phis(4))
            recs += uniplanar_records(lam, mu, tau, gamma, kappa, 1.0, _phis(4))
            for name in sorted({r.name for r in recs} - set(PRINTED)):
                worst = max(r.rel_error for r in recs if r.name == name)
                out.append(_check(name, worst, VALIDATE_TOLS["blowup"]))
            census = fresnel.detect_singularities(m)
            c = census.counts()
            miss = abs(c.get("conic", 0) - 8) + abs(c.get("uniplanar", 0) - 6)
            out.append(_check("singularity_census", miss, 0, counts=c))
    if m.variant == "hexagonal":
        p = m.params
        recs, _ = hexagonal_records(p["tau1"], p["tau2"], p["lam1"], p["lam2"], p["mu"],
                                    np.linspace(0.05, 1.5, 8))
        for name in ("hexagonal_spectrum", "hexagonal_trace", "hexagonal_det"):
            worst = max(r.rel_error for r in recs if r.name == name)
            out.append(_check(name, worst, VALIDATE_TOLS["spectrum"]))
    return out


def cmd_validate_all(run, a):
    m = load_medium(a.medium)
    rep = media.positivity_check(m)
    suites = {"positivity": [_check("min_eig_negated", -rep.min_eig, 0.0)]}
    if rep.positive:
        suites["identities"] = suite_identities(m, a.gamma, a.kappa, run.rng)
        suites["couplings"] = suite_couplings(m, a.gamma, a.kappa, run.rng)
        suites["spectrum"] = suite_spectrum(m, a.gamma, a.kappa, run.rng)
        suites["fresnel"] = suite_fresnel(m)
        suites["structure"] = suite_variant(m, a.gamma, a.kappa)
    checks = [c for v in suites.values() for c in v]
    failed = [c["name"] for c in checks if not c["pass"]]
    run.write(".json", _json({"tolerances": VALIDATE_TOLS, "suites": suites, "failed": failed}))
    code = EXIT_VALIDATION if failed else EXIT_OK
    return code, f"{len(checks)} checks, {len(failed)} failed" + (f": {failed}" if failed else "")


# ---------------------------------------------------------------------------
# parser


def _common(p, medium_required=True, coupling=True):
    p.add_argument("--medium", required=medium_required, default=None,
                   help="shorthand name:p1,p2,... or path to a medium JSON file")
    if coupling:
        p.add_argument("--gamma", type=float, default=1.0, help="thermo-elastic coupling")
        p.add_argument("--kappa", type=float, default=1.0, help="thermal conductivity")
    p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--workers", type=int, default=1,
                   help="worker count (recorded; computations run in one process)")


def build_parser():
    parser = _Parser(prog="thermoelastic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, **kw):
        p = sub.add_parser(name, help=help_)
        _common(p, **kw)
        p.set_defaults(func=func)
        return p

    p = add("media-check", cmd_media_check, "positivity of the elastic symbol", coupling=False)
    p.add_argument("--samples", type=int, default=2000)

    p = add("classify", cmd_classify, "classify one direction")
    p.add_argument("--dir", required=True, help="direction, e.g. 1,2,3")
    p.add_argument("--deg-tol", type=float, default=spectral.DEGENERACY_TOL)
    p.add_argument("--coupling-tol", type=float, default=spectral.COUPLING_TOL)
    p.add_argument("--gamma-tol", type=float, default=spectral.GAMMA_DEGENERACY_TOL)

    p = add("couplings", cmd_couplings, "coupling functions over directions")
    p.add_argument("--dirs", default=None, help="semicolon-separated directions")
    p.add_argument("--count", type=int, default=200, help="random directions if --dirs is absent")
    p.add_argument("--tol", type=float, default=1e-10)

    for name, func, lo, hi in (("expand-small", cmd_expand_small, 1e-3, 1e-1),
                               ("expand-large", cmd_expand_large, 1e2, 1e4)):
        p = add(name, func, f"{name.split('-')[1]}-|xi| expansion and residuals")
        p.add_argument("--dir", required=True)
        p.add_argument("--xi-min", type=float, default=lo)
        p.add_argument("--xi-max", type=float, default=hi)
        p.add_argument("--count", type=int, default=8)
        if name == "expand-small":
            p.add_argument("--min-slope", type=float, default=2.9)
        else:
            p.add_argument("--max-slope", type=float, default=-0.9)

    p = add("im-scan", cmd_im_scan, "eigenvalues of B over directions and radii")
    p.add_argument("--dirs", default=None)
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--xi-min", type=float, default=1e-2)
    p.add_argument("--xi-max", type=float, default=1e2)
    p.add_argument("--xi-count", type=int, default=9)

    p = add("fresnel-cut", cmd_fresnel_cut, "planar cut of the Fresnel surface", coupling=False)
    p.add_argument("--plane", default="z=0", help="x=0, y=0, z=0 or n=a,b,c")
    p.add_argument("--resolution", type=int, default=720)

    p = add("fresnel-surface", cmd_fresnel_surface, "sample the Fresnel surface", coupling=False)
    p.add_argument("--resolution", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("singularities", cmd_singularities, "singular points of the Fresnel surface",
            coupling=False)
    p.add_argument("--resolution", type=int, default=80000)
    p.add_argument("--tol", type=float, default=1e-8)

    p = add("sugimoto", cmd_sugimoto, "Sugimoto index of a planar section", coupling=False)
    p.add_argument("--curve", choices=("diagonal", "axis", "uniplanar"), default="diagonal")
    p.add_argument("--branch", type=int, choices=(1, -1), default=1)
    p.add_argument("--printed", action="store_true", help="use the printed indicator curve")
    p.add_argument("--samples", type=int, default=720)

    for name, func in (("blowup-conic", cmd_blowup_conic), ("blowup-uniplanar", cmd_blowup_uniplanar)):
        p = add(name, func, f"{name.split('-')[1]} blow-up coefficient recovery")
        p.add_argument("--xi", type=float, default=1.0)
        p.add_argument("--phis", type=int, default=8)
        p.add_argument("--h", type=float, default=1e-3)
        p.add_argument("--tol", type=float, default=1e-3)

    p = add("hexagonal", cmd_hexagonal, "rotational reduction of hexagonal media", coupling=False)
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-10)

    for name, func in (("evolve", cmd_evolve), ("decay-scan", cmd_decay_scan)):
        p = sub.add_parser(name, help="propagate a decay experiment" if name == "evolve"
                           else "fit a decay exponent")
        p.add_argument("--experiment", default="1d", help=f"one of {sorted(evolve.EXPERIMENTS)}")
        p.add_argument("--medium", default=None, help="override the experiment's medium")
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--kappa", type=float, default=None)
        p.add_argument("--refine", action="store_true", help="use the doubled lattice")
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        if name == "evolve":
            p.add_argument("--times", default="0,1,10,100")
            p.add_argument("--q", choices=("2", "inf"), default="inf")
        p.set_defaults(func=func)

    add("validate-all", cmd_validate_all, "run every invariant suite")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    run = Run(args)
    run.extra = None
    try:
        code, summary = args.func(run, args)
    except UsageError as exc:
        sys.stderr.write(f"thermoelastic {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"thermoelastic {args.command}: I/O error: {exc}\n")
        return EXIT_USAGE
    run.finish(code, run.extra)
    status = "ok" if code == EXIT_OK else "VALIDATION FAILED"
    print(f"{args.command}: {status}: {summary}")
    return code


if __name__ == "__main__":
    sys.exit(main())
