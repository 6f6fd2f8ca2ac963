"""The first-order system symbol B(xi) and its eigenvalue asymptotics."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoelastic.media import MediumSpec, symbol_at
from thermoelastic.spectral import DirectionReport, classify
from thermoelastic.symbol import (
    GammaDegenerateError,
    ExpansionCoefficients,
    b_matrix_1d,
    build_B,
    char_poly,
    char_poly_direct,
    eigenvalues_B,
    im_part_scan,
    large_xi_expansion,
    loglog_slope,
    match_eigenvalues,
    numeric_eigenvalues,
    predicted_large,
    predicted_small,
    prop23_ratio,
    scan_to_csv,
    small_xi_expansion,
    solve_nu_tilde,
)

CUBIC = MediumSpec.cubic(lam=2, mu=2, tau=8)
ETA = np.array([1, 2, 3]) / np.sqrt(14)

media = st.sampled_from([
    MediumSpec.cubic(lam=2, mu=2, tau=8),
    MediumSpec.cubic(lam=1, mu=1, tau=4),
    MediumSpec.isotropic(1.0, 0.5),
    MediumSpec.hexagonal(4, 10, 2, 4, 2),
    MediumSpec.cubic(lam=0.5, mu=1, tau=3, n=2),
    MediumSpec.one_dimensional(1.7),
])


def _direction(medium, raw):
    v = np.asarray(raw[: medium.n], dtype=float)
    if np.linalg.norm(v) < 0.1:
        v = np.array([0.3, 0.5, 0.9])[: medium.n]
    return v / np.linalg.norm(v)


def _any_frame(medium, eta):
    # the identities hold in every orthonormal eigenframe, including degenerate ones
    return np.linalg.eigh(symbol_at(medium, eta))


raw3 = st.tuples(*[st.floats(-1, 1)] * 3)


def test_one_dimensional_symbol_matches_closed_form():
    m = MediumSpec.one_dimensional(1.5)
    for xi in [0.3, 2.0]:
        sys = build_B(m, 0.7, 1.3, [xi])
        expected = np.array([
            [1.5 * xi, 0, 0.7j * xi],
            [0, -1.5 * xi, 0.7j * xi],
            [-0.35j * xi, -0.35j * xi, 1.3j * xi * xi],
        ])
        assert np.allclose(sys.B, expected)
        assert np.allclose(b_matrix_1d(1.5, 0.7, 1.3, xi), expected)


def test_decoupled_symbol_is_block_diagonal():
    sys = build_B(CUBIC, 0.0, 1.0, 2 * ETA)
    off = sys.B - np.diag(np.diag(sys.B))
    assert np.all(off == 0)
    w = np.sqrt(np.linalg.eigvalsh(symbol_at(CUBIC, 2 * ETA)))
    assert np.allclose(np.sort(np.diag(sys.B).real[:6]), np.sort(np.concatenate([w, -w])))
    assert sys.B[-1, -1] == pytest.approx(4j)


@settings(max_examples=100, deadline=None)
@given(media, raw3, st.floats(1e-2, 1e2), st.floats(0.1, 3), st.floats(0.1, 3))
def test_trace_identity(medium, raw, r, gamma, kappa):
    eta = _direction(medium, raw)
    b = build_B(medium, gamma, kappa, r * eta, frame=_any_frame(medium, eta)).B
    assert abs(np.trace(b) - 1j * kappa * r * r) <= 1e-9 * kappa * r * r


@settings(max_examples=100, deadline=None)
@given(media, raw3, st.floats(1e-2, 1e2), st.floats(0.1, 3), st.floats(0.1, 3))
def test_determinant_identity(medium, raw, r, gamma, kappa):
    # det B = (-1)^n i kappa |xi|^2 det A(xi); the sign is +1 only in even dimension
    eta = _direction(medium, raw)
    b = build_B(medium, gamma, kappa, r * eta, frame=_any_frame(medium, eta)).B
    rhs = (-1) ** medium.n * 1j * kappa * r * r * np.linalg.det(symbol_at(medium, r * eta))
    assert abs(np.linalg.det(b) - rhs) <= 1e-9 * abs(rhs)


def test_printed_determinant_sign_fails_in_odd_dimension():
    b = build_B(CUBIC, 1.0, 1.0, ETA).B
    printed = 1j * np.linalg.det(symbol_at(CUBIC, ETA))
    assert np.linalg.det(b) == pytest.approx(-printed, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(media, raw3, st.floats(0.1, 10), st.floats(-3, 3), st.floats(-3, 3))
def test_char_poly_matches_direct_determinant(medium, raw, r, re, im):
    eta = _direction(medium, raw)
    sys = build_B(medium, 1.1, 0.8, r * eta, frame=_any_frame(medium, eta))
    nu = complex(re, im)
    direct = char_poly_direct(sys, nu)
    assert abs(char_poly(sys, nu) - direct) <= 1e-9 * max(1.0, abs(direct))


def test_char_poly_at_zero():
    sys = build_B(CUBIC, 1.0, 1.0, 0.7 * ETA)
    det_a = np.linalg.det(symbol_at(CUBIC, 0.7 * ETA))
    # det(-B) = -det B in odd size 7 and det B = -i kappa |xi|^2 det A for n = 3
    assert char_poly(sys, 0.0) == pytest.approx(1j * 0.49 * det_a, rel=1e-10)


def test_char_poly_one_dimensional_oracle():
    sys = build_B(MediumSpec.one_dimensional(1.0), 1.0, 1.0, [1.0])
    oracle = np.linalg.det(1j * np.eye(3) - b_matrix_1d(1.0, 1.0, 1.0, 1.0))
    assert char_poly(sys, 1j) == pytest.approx(oracle, rel=1e-12)


def test_char_poly_decoupled_root():
    sys = build_B(CUBIC, 0.0, 1.0, ETA)
    assert abs(char_poly(sys, sys.omega[0])) < 1e-12


def test_hyperbolic_direction_has_real_eigenvalues():
    eta = np.array([0.6, 0.8, 0.0])
    rep = classify(CUBIC, 1.0, eta)
    j = rep.hyperbolic_modes[0]
    w = numeric_eigenvalues(CUBIC, 1.0, 1.0, eta, 1.7)
    om = np.sqrt(rep.eigenvalues[j]) * 1.7
    for s in (1, -1):
        k = np.argmin(np.abs(w - s * om))
        assert abs(w[k] - s * om) < 1e-9


def test_decoupled_spectrum():
    w = np.linalg.eigvals(build_B(CUBIC, 0.0, 1.0, 1.5 * ETA).B)
    om = np.sqrt(np.linalg.eigvalsh(symbol_at(CUBIC, 1.5 * ETA)))
    expected = np.concatenate([om, -om, [2.25j]])
    assert np.allclose(np.sort_complex(w), np.sort_complex(expected), atol=1e-12)


def test_one_dimensional_small_xi_heat_mode():
    w = np.linalg.eigvals(b_matrix_1d(1.0, 1.0, 1.0, 0.01))
    nu0 = w[np.argmin(np.abs(w.real))]
    assert abs(nu0.imag - 0.5e-4) < 1e-6


def test_nu_tilde_one_dimensional():
    rep = classify(MediumSpec.one_dimensional(3.0), 4.0, [1.0])
    assert solve_nu_tilde(rep, 4.0) == pytest.approx([5.0], rel=1e-12)


def test_nu_tilde_decoupling_limit():
    rep = classify(CUBIC, 1e-4, ETA)
    assert np.allclose(solve_nu_tilde(rep, 1e-4), np.sqrt(rep.eigenvalues), rtol=1e-7)


def test_nu_tilde_interlacing_against_polynomial_roots():
    rep = classify(CUBIC, 1.0, ETA)
    kap, a2 = rep.eigenvalues, rep.couplings ** 2
    # clear denominators of 1 = sum a_j^2 / (s - kappa_j) (gamma = 1)
    poly = np.poly(kap)
    for j in range(3):
        poly = poly - np.concatenate([[0], a2[j] * np.poly(np.delete(kap, j))])
    oracle = np.sqrt(np.sort(np.roots(poly).real))
    nt = solve_nu_tilde(rep, 1.0)
    assert np.allclose(nt, oracle, rtol=1e-10)
    om = np.sqrt(kap)
    assert om[0] < nt[0] < om[1] < nt[1] < om[2] < nt[2]


def test_gamma_degenerate_direction_is_refused():
    kap = np.array([1.0, 2.0, 3.0])
    a = np.array([0.6, 0.8, 0.0])
    gamma = 1 / np.sqrt(0.36 / 2 + 0.64 / 1)
    rep = DirectionReport(np.zeros(3), kap, np.eye(3), a, "hyperbolic", (2,), (2,), 1.0)
    with pytest.raises(GammaDegenerateError):
        solve_nu_tilde(rep, gamma)


def test_one_dimensional_small_coefficients():
    rep = classify(MediumSpec.one_dimensional(1.0), 1.0, [1.0])
    c = small_xi_expansion(rep, 1.0, 1.0)
    assert c.b0 == pytest.approx(0.5, abs=1e-12)
    assert c.b == pytest.approx([0.25], abs=1e-12)
    tau, gamma = 2.0, 3.0
    c = small_xi_expansion(classify(MediumSpec.one_dimensional(tau), gamma, [1.0]), gamma, 1.0)
    assert c.b0 == pytest.approx(tau ** 2 / (tau ** 2 + gamma ** 2), abs=1e-12)
    assert c.b[0] == pytest.approx(gamma ** 2 / (2 * (tau ** 2 + gamma ** 2)), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(raw3, st.floats(0.2, 3))
def test_trace_rule(raw, gamma):
    eta = _direction(CUBIC, raw)
    rep = classify(CUBIC, gamma, eta)
    if rep.kind != "parabolic":
        return
    c = small_xi_expansion(rep, gamma, 1.0)
    assert abs(c.b0 + 2 * np.sum(c.b) - 1) <= 1e-10


def test_hyperbolic_mode_is_undamped_at_second_order():
    rep = classify(CUBIC, 1.0, [0.6, 0.8, 0.0])
    c = small_xi_expansion(rep, 1.0, 1.0)
    assert np.min(np.abs(c.b)) <= 1e-10
    assert abs(c.b0 + 2 * np.sum(c.b) - 1) <= 1e-10


def test_small_expansion_residual_is_cubic():
    rep = classify(CUBIC, 1.0, ETA)
    c = small_xi_expansion(rep, 1.0, 1.0)
    rs = np.geomspace(1e-3, 1e-2, 8)
    res = [np.max(np.abs(match_eigenvalues(predicted_small(rep, 1.0, 1.0, r, c),
                                           numeric_eigenvalues(CUBIC, 1.0, 1.0, ETA, r))
                         - predicted_small(rep, 1.0, 1.0, r, c))) for r in rs]
    assert loglog_slope(rs, res) >= 2.9


def test_large_expansion_one_dimensional():
    rep = classify(MediumSpec.one_dimensional(1.0), 1.0, [1.0])
    c = large_xi_expansion(rep, 1.0, 1.0)
    assert c.mode_offsets[0] == pytest.approx(0.5)
    w = np.linalg.eigvals(b_matrix_1d(1.0, 1.0, 1.0, 1e3))
    hyp = w[np.abs(w.real) > 1]
    assert np.allclose(hyp.imag, 0.5, atol=1e-3)


def test_large_expansion_cubic_mode_offset():
    rep = classify(CUBIC, 1.0, ETA)
    c = large_xi_expansion(rep, 1.0, 1.0)
    assert c.mode_offsets[0] == pytest.approx(rep.couplings[0] ** 2 / 2)
    w = numeric_eigenvalues(CUBIC, 1.0, 1.0, ETA, 1e3)
    k = np.argmin(np.abs(w - 1e3 * np.sqrt(rep.eigenvalues[0])))
    assert w[k].imag == pytest.approx(c.mode_offsets[0], rel=1e-3)


@pytest.mark.parametrize("gamma,kappa", [(1.0, 1.0), (2.0, 1.0), (0.5, 3.0)])
def test_heat_offset_scales_with_gamma_squared(gamma, kappa):
    rep = classify(CUBIC, gamma, ETA)
    c = large_xi_expansion(rep, gamma, kappa)
    r = 1e3
    w = numeric_eigenvalues(CUBIC, gamma, kappa, ETA, r)
    nu0 = w[np.argmax(w.imag)]
    assert (nu0 - 1j * kappa * r * r).imag == pytest.approx(c.heat_offset.imag, rel=1e-3)
    assert c.heat_offset == pytest.approx(-1j * gamma ** 2 / kappa)


def test_large_expansion_residual_decays():
    rep = classify(CUBIC, 1.0, ETA)
    rs = np.geomspace(1e2, 1e3, 8)
    res = []
    for r in rs:
        p = predicted_large(rep, 1.0, 1.0, r)
        res.append(np.max(np.abs(match_eigenvalues(p, numeric_eigenvalues(CUBIC, 1.0, 1.0, ETA, r)) - p)))
    assert loglog_slope(rs, res) <= -0.9


def test_imaginary_parts_bounded_below_on_parabolic_patch():
    patch = [ETA, np.array([1, 2, 2.8]), np.array([1.1, 2, 3])]
    rows = im_part_scan(CUBIC, 1.0, 1.0, patch, [0.5, 1, 5, 20])
    for r in (0.5, 1, 5, 20):
        assert min(row[4] for row in rows if row[1] == r) > 0
    text = scan_to_csv(rows)
    assert text.splitlines()[0] == "eta_1,eta_2,eta_3,xi_norm,mode,re_nu,im_nu"


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_imaginary_part_ratio_near_hyperbolic_circle(r):
    base = classify(CUBIC, 1.0, [0.6, 0.8, 0.0])
    j = base.hyperbolic_modes[0]
    limit = prop23_ratio(base, j, 1.0, 1.0, r)
    eta = np.array([0.6, 0.8, 0.0]) * np.cos(1e-3) + np.array([0, 0, 1.0]) * np.sin(1e-3)
    rep = classify(CUBIC, 1.0, eta)
    w = numeric_eigenvalues(CUBIC, 1.0, 1.0, eta, r)
    k = np.argmin(np.abs(w - r * np.sqrt(rep.eigenvalues[j])))
    assert w[k].imag / rep.couplings[j] ** 2 == pytest.approx(limit, rel=1e-2)


def test_hyperbolic_mode_damping_follows_coupling_squared():
    ds = np.geomspace(1e-3, 1e-1, 8)
    r = 0.05
    vals = []
    for d in ds:
        eta = np.array([0.6, 0.8, 0.0]) * np.cos(d) + np.array([0, 0, 1.0]) * np.sin(d)
        rep = classify(CUBIC, 1.0, eta)
        c = small_xi_expansion(rep, 1.0, 1.0)
        vals.append(c.b[np.argmin(np.abs(c.nu_tilde - np.sqrt(2.0)))])
    # b_j ~ a_j^2 ~ d^2 as the direction approaches the circle
    assert loglog_slope(ds, vals) == pytest.approx(2.0, abs=0.1)


def test_projections_resolve_identity():
    sys = build_B(CUBIC, 1.0, 1.0, ETA)
    dec = eigenvalues_B(sys)
    assert not dec.defective
    assert np.allclose(dec.projections.sum(axis=0), np.eye(7), atol=1e-10)
    for k, p in enumerate(dec.projections):
        assert np.allclose(sys.B @ p, dec.values[k] * p, atol=1e-9)


def test_defective_matrix_uses_contour_projection():
    jordan = np.array([[1.0, 1.0, 0], [0, 1.0, 0], [0, 0, 3.0]], dtype=complex)
    dec = eigenvalues_B(jordan)
    assert dec.defective
    assert np.allclose(dec.projections.sum(axis=0), np.eye(3), atol=1e-8)


def test_expansion_serialisation():
    rep = classify(CUBIC, 1.0, ETA)
    c = small_xi_expansion(rep, 1.0, 1.0)
    d = c.to_dict()
    assert set(d) == {"0", "1", "2", "3"}
    assert isinstance(ExpansionCoefficients().to_dict(), dict)
