"""Elastic media: symbols, serialisation and positivity."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoelastic.media import (
    MediumSpec,
    cubic_positive_closed_form,
    hexagonal_d,
    hexagonal_structure,
    positivity_check,
    sphere_points,
    symbol_at,
    symbol_batch,
)

unit3 = st.tuples(*[st.floats(-1, 1)] * 3).map(np.array).filter(lambda v: np.linalg.norm(v) > 0.1)


def test_isotropic_symbol_on_axis():
    # A = mu I + (lam + mu) eta eta^T at eta = e1
    a = symbol_at(MediumSpec.isotropic(1, 1), [1, 0, 0])
    assert np.allclose(a, np.diag([3, 1, 1]), atol=1e-14)


@pytest.mark.parametrize("lam,mu,tau", [(2, 2, 8), (1, 1, 4), (-0.5, 3, 7)])
def test_cubic_symbol_on_axis(lam, mu, tau):
    a = symbol_at(MediumSpec.cubic(lam=lam, mu=mu, tau=tau), [1, 0, 0])
    assert np.allclose(a, np.diag([tau, mu, mu]), atol=1e-14)


def test_hexagonal_symbol_at_pole_matches_matrix_product():
    # oracle: explicit D^T C D with the structure matrix written out by hand
    c = np.array([
        [4, 2, 4, 0, 0, 0],
        [2, 4, 4, 0, 0, 0],
        [4, 4, 10, 0, 0, 0],
        [0, 0, 0, 2, 0, 0],
        [0, 0, 0, 0, 2, 0],
        [0, 0, 0, 0, 0, 1],
    ], dtype=float)
    d = np.zeros((6, 3))
    d[2, 2] = d[3, 1] = d[4, 0] = 1.0
    a = symbol_at(MediumSpec.hexagonal(4, 10, 2, 4, 2), [0, 0, 1])
    assert np.allclose(a, d.T @ c @ d)
    assert np.allclose(a, np.diag([2, 2, 10]))


def test_hexagonal_structure_matrix():
    c = hexagonal_structure(4, 10, 2, 4, 2)
    assert c[5, 5] == 1.0 and c[3, 3] == c[4, 4] == 2.0
    assert np.allclose(c, c.T)


@settings(max_examples=60, deadline=None)
@given(unit3)
def test_hexagonal_tensor_and_matrix_forms_agree(v):
    m = MediumSpec.hexagonal(4, 10, 2, 4, 2)
    eta = v / np.linalg.norm(v)
    via_tensor = np.einsum("ijkl,j,l->ik", m.stiffness_tensor(), eta, eta)
    via_matrix = hexagonal_d(eta).T @ hexagonal_structure(4, 10, 2, 4, 2) @ hexagonal_d(eta)
    assert np.allclose(via_tensor, via_matrix, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(unit3, st.floats(0.1, 5), st.floats(-0.5, 5), st.floats(0.1, 10))
def test_cubic_tensor_and_closed_form_agree(v, mu, lam, tau):
    m = MediumSpec.cubic(lam=lam, mu=mu, tau=tau)
    eta = v / np.linalg.norm(v)
    oracle = np.einsum("ijkl,j,l->ik", m.stiffness_tensor(), eta, eta)
    assert np.allclose(symbol_at(m, eta), oracle, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(unit3, st.floats(0.01, 100))
def test_symbol_is_two_homogeneous_and_symmetric(v, s):
    m = MediumSpec.cubic(lam=2, mu=2, tau=8)
    a1 = symbol_at(m, v)
    a2 = symbol_at(m, s * v)
    assert np.allclose(a1, a1.T)
    assert np.allclose(a2, s * s * a1, rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(unit3, st.floats(0.1, 5), st.floats(-1.9, 5))
def test_isotropic_spectrum(v, mu, lam):
    eta = v / np.linalg.norm(v)
    w = np.linalg.eigvalsh(symbol_at(MediumSpec.isotropic(lam, mu), eta))
    expected = np.sort([mu, mu, lam + 2 * mu])
    assert np.allclose(w, expected, atol=1e-10)


def test_symbol_batch_matches_pointwise():
    m = MediumSpec.hexagonal(4, 10, 2, 4, 2)
    etas = sphere_points(3, 50)
    batch = symbol_batch(m, etas)
    for e, a in zip(etas, batch):
        assert np.allclose(a, symbol_at(m, e))


def test_zero_frequency_gives_zero_matrix():
    assert np.all(symbol_at(MediumSpec.cubic(lam=2, mu=2, tau=8), [0, 0, 0]) == 0)


def test_isotropic_positive_for_negative_lambda():
    assert positivity_check(MediumSpec.isotropic(-1.5, 1)).positive


def test_cubic_violating_lambda_below_tau_is_not_positive():
    rep = positivity_check(MediumSpec.cubic(lam=5, mu=1, tau=4))
    assert not rep.positive
    assert rep.min_eig < 0


def test_zero_medium_is_not_positive():
    rep = positivity_check(MediumSpec.isotropic(0, 0))
    assert not rep.positive
    assert rep.min_eig == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("lam", np.linspace(-5, 5, 11) + 0.3)
@pytest.mark.parametrize("tau", [0.5, 2.0, 4.0])
def test_positivity_agrees_with_closed_form(lam, tau):
    mu = 1.0
    closed = cubic_positive_closed_form(lam, mu, tau)
    # the shifted grid keeps every case away from the boundary of the region
    assert min(abs(lam - tau), abs(lam + 2 * mu + tau / 2)) > 0.1
    assert positivity_check(MediumSpec.cubic(lam=lam, mu=mu, tau=tau)).positive == closed


def test_shorthand_and_json_round_trip(tmp_path):
    for text in ["cubic:8,2,2", "isotropic:1,1", "hexagonal:4,10,2,4,2", "1d:3",
                 "rhombic:5,6,7,1,2", "isotropic:1,2;n=2"]:
        m = MediumSpec.from_shorthand(text)
        assert MediumSpec.loads(m.dumps()) == m
        path = tmp_path / "m.json"
        m.save(path)
        assert MediumSpec.load(path) == m


def test_cubic_shorthand_parameter_order():
    m = MediumSpec.from_shorthand("cubic:8,2,3")
    assert (m["tau"], m["lam"], m["mu"]) == (8.0, 2.0, 3.0)


def test_one_dimensional_wave_speed():
    m = MediumSpec.one_dimensional(3.0)
    assert symbol_at(m, [2.0])[0, 0] == pytest.approx(36.0)


@pytest.mark.parametrize("bad", ["cubic:1,2", "foo:1", "cubic:a,b,c", "isotropic:1,1;k=2"])
def test_malformed_shorthand_raises(bad):
    with pytest.raises(ValueError):
        MediumSpec.from_shorthand(bad)


def test_generic_tensor_is_symmetrised():
    rng = np.random.default_rng(0)
    c = rng.normal(size=(3, 3, 3, 3))
    m = MediumSpec.generic(c)
    t = m.stiffness_tensor()
    assert np.allclose(t, t.transpose(1, 0, 2, 3))
    assert np.allclose(t, t.transpose(2, 3, 0, 1))
    a = symbol_at(m, [0.3, -0.2, 0.9])
    assert np.allclose(a, a.T)


def test_rhombic_replaces_diagonal_only():
    m = MediumSpec.rhombic(lam=1, mu=2, taus=[5, 6, 7])
    for i, tau in enumerate([5, 6, 7]):
        e = np.zeros(3)
        e[i] = 1
        assert symbol_at(m, e)[i, i] == pytest.approx(tau)
