"""Eigenframes, Krylov rank, direction classes and frame tracking."""
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoelastic.media import MediumSpec, symbol_at
from thermoelastic.spectral import (
    DegeneratePathError,
    DirectionReport,
    classify,
    couplings_along,
    cubic_hyperbolic_det,
    cyclic_dim,
    eigenframe,
    fix_gauge,
    krylov_matrix,
    reports_to_csv,
    track_frame,
)

CUBIC = MediumSpec.cubic(lam=2, mu=2, tau=8)
unit3 = st.tuples(*[st.floats(-1, 1)] * 3).map(np.array).filter(lambda v: np.linalg.norm(v) > 0.1)


def test_isotropic_frame_has_eta_as_top_eigenvector():
    eta = np.array([0.0, 0.0, 1.0])
    f = eigenframe(symbol_at(MediumSpec.isotropic(1, 1), eta))
    assert np.allclose(f.values, [1, 1, 3])
    assert abs(abs(f.vectors[:, 2] @ eta) - 1) < 1e-12


def test_diagonal_matrix_frame():
    f = eigenframe(np.diag([2.0, 5.0, 7.0]))
    assert np.allclose(f.values, [2, 5, 7])
    assert np.allclose(f.vectors, np.eye(3))


def test_conic_direction_has_double_eigenvalue():
    f = eigenframe(symbol_at(CUBIC, np.ones(3) / np.sqrt(3)))
    assert np.allclose(f.values, [8 / 3, 8 / 3, 20 / 3], atol=1e-12)
    assert f.gap < 1e-12


@settings(max_examples=50, deadline=None)
@given(unit3)
def test_gauge_is_deterministic_and_orthonormal(v):
    a = symbol_at(CUBIC, v / np.linalg.norm(v))
    f1, f2 = eigenframe(a), eigenframe(a.copy())
    assert np.array_equal(f1.vectors, f2.vectors)
    assert np.allclose(f1.vectors.T @ f1.vectors, np.eye(3), atol=1e-12)
    # largest entry of each column is positive
    k = np.argmax(np.abs(f1.vectors), axis=0)
    assert np.all(f1.vectors[k, np.arange(3)] > 0)
    assert np.array_equal(fix_gauge(-f1.vectors), f1.vectors)


def test_cyclic_dim_on_hyperbolic_circle():
    th = 0.7
    assert cyclic_dim(symbol_at(CUBIC, [np.cos(th), np.sin(th), 0]), [np.cos(th), np.sin(th), 0]) == 2


def test_cyclic_dim_isotropic_is_one():
    # A(eta) eta = (lam + 2 mu) eta, so the Krylov space is the line through eta
    rng = np.random.default_rng(1)
    for _ in range(20):
        eta = rng.normal(size=3)
        eta /= np.linalg.norm(eta)
        a = symbol_at(MediumSpec.isotropic(1.3, 0.7), eta)
        assert np.linalg.matrix_rank(krylov_matrix(a, eta), tol=1e-8) == 1
        assert cyclic_dim(a, eta) == 1


def test_cyclic_dim_generic_is_full():
    eta = np.array([1, 2, 3]) / np.sqrt(14)
    assert cyclic_dim(symbol_at(CUBIC, eta), eta) == 3


def test_classify_uniplanar_and_conic_degenerate():
    assert classify(CUBIC, 1.0, [1, 0, 0]).kind == "degenerate"
    assert classify(CUBIC, 1.0, [1, 1, 1]).kind == "degenerate"


def test_classify_one_dimensional_is_parabolic():
    rep = classify(MediumSpec.one_dimensional(2.0), 1.0, [1.0])
    assert rep.kind == "parabolic"
    assert abs(rep.couplings[0]) == pytest.approx(1.0)


def test_classify_parabolic_and_hyperbolic():
    rep = classify(CUBIC, 1.0, [1, 2, 3])
    assert rep.kind == "parabolic"
    assert np.sum(rep.couplings ** 2) == pytest.approx(1.0, abs=1e-12)
    hyp = classify(CUBIC, 1.0, [0.6, 0.8, 0.0])
    assert hyp.kind == "hyperbolic"
    assert len(hyp.hyperbolic_modes) == 1
    j = hyp.hyperbolic_modes[0]
    # the hyperbolic eigenvalue on the circle eta_3 = 0 is mu
    assert hyp.eigenvalues[j] == pytest.approx(2.0, abs=1e-12)


def test_report_serialisation():
    rep = classify(CUBIC, 1.0, [1, 2, 3])
    d = json.loads(rep.to_json())
    assert d["kind"] == "parabolic"
    text = reports_to_csv([rep, classify(CUBIC, 1.0, [3, 1, 2])])
    lines = text.strip().splitlines()
    assert lines[0] == ",".join(DirectionReport.csv_header(3))
    assert len(lines) == 3


def test_direct_determinant_matches_brute_force():
    eta = np.array([1, 2, 3]) / np.sqrt(14)
    direct, closed, scale = cubic_hyperbolic_det(2, 2, 8, eta)
    a = symbol_at(CUBIC, eta)
    oracle = np.linalg.det(np.column_stack([eta, a @ eta, a @ a @ eta]))
    assert direct == pytest.approx(oracle, rel=1e-12)
    assert abs(direct - closed) <= 1e-10 * scale
    e1, e2, e3 = eta ** 2
    printed = 8 * np.prod(eta) * (e1 - e2) * (e1 - e3) * (e2 - e3)
    # the printed product carries the opposite overall sign
    assert direct == pytest.approx(-printed, rel=1e-10)


@pytest.mark.parametrize("eta", [[1, 0, 0], [0.6, 0.8, 0.0], [1, 1, 0.3]])
def test_determinant_vanishes_on_great_circles(eta):
    direct, closed, scale = cubic_hyperbolic_det(2, 2, 8, eta)
    assert abs(direct) <= 1e-12 * max(scale, 1)
    assert abs(closed) <= 1e-12 * max(scale, 1)


@settings(max_examples=100, deadline=None)
@given(unit3, st.floats(0.2, 5), st.floats(-1, 5), st.floats(0.5, 12))
def test_determinant_closed_form_property(v, mu, lam, tau):
    direct, closed, scale = cubic_hyperbolic_det(lam, mu, tau, v / np.linalg.norm(v))
    assert abs(direct - closed) <= 1e-10 * max(scale, 1e-300) + 1e-14


def test_tracking_closed_loop_returns_to_start():
    base = np.array([1, 2, 3]) / np.sqrt(14)
    u = np.cross(base, [0, 0, 1])
    u /= np.linalg.norm(u)
    w = np.cross(base, u)
    s = np.linspace(0, 2 * np.pi, 201)
    path = [np.cos(0.05) * base + np.sin(0.05) * (np.cos(t) * u + np.sin(t) * w) for t in s]
    frames = track_frame(CUBIC, path)
    assert np.allclose(frames[0].vectors, frames[-1].vectors, atol=1e-6)


def test_tracking_towards_hyperbolic_circle_is_continuous():
    ths = np.linspace(0.4, 0.0, 200)
    path = [np.array([np.cos(0.5), np.sin(0.5) * 0.8, 0.0]) + np.array([0, 0, t]) for t in ths]
    path = [p / np.linalg.norm(p) for p in path]
    frames = track_frame(CUBIC, path)
    a = couplings_along(path, frames)
    # dense-path oracle: ten times finer tracking gives the same endpoint couplings
    fine = np.linspace(0.4, 0.0, 2000)
    fpath = [np.array([np.cos(0.5), np.sin(0.5) * 0.8, t]) for t in fine]
    fpath = [p / np.linalg.norm(p) for p in fpath]
    fa = couplings_along(fpath, track_frame(CUBIC, fpath))
    assert np.allclose(a[-1], fa[-1], atol=1e-10)
    assert np.max(np.abs(np.diff(a, axis=0))) < 0.05
    assert np.sum(np.abs(a[-1]) < 1e-10) == 1


def test_tracking_isotropic_path():
    iso = MediumSpec.isotropic(1, 1)
    path = [np.array([np.cos(t), np.sin(t), 0.2]) for t in np.linspace(0, 1, 50)]
    path = [p / np.linalg.norm(p) for p in path]
    frames = track_frame(iso, path, allow_degenerate=True)
    a = couplings_along(path, frames)
    assert np.allclose(np.abs(a[:, 2]), 1.0, atol=1e-10)
    assert np.allclose(a[:, :2], 0.0, atol=1e-10)


def test_tracking_through_degenerate_point_raises():
    path = [np.array([1.0, 0.1 - k * 0.05, 0.0]) for k in range(5)]
    path = [p / np.linalg.norm(p) for p in path]
    with pytest.raises(DegeneratePathError):
        track_frame(CUBIC, path)
