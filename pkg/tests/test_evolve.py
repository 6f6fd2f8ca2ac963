"""Frequency-space propagation, physical norms and decay fits."""
import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoelastic.media import MediumSpec, symbol_at
from thermoelastic.symbol import build_B, match_eigenvalues
from thermoelastic.evolve import (
    EXPERIMENTS,
    AliasingWarning,
    CapCutoff,
    EmptySupportError,
    FrequencyLattice,
    InsufficientSpanError,
    Propagator,
    RadialCutoff,
    decay_fit,
    generator,
    geometric_times,
    make_data,
    microlocalize,
    nyquist_fraction,
    physical_norms,
    propagate,
    run_decay,
    smooth_step,
    v_to_w,
    w_to_v,
)

CUBIC = MediumSpec.cubic(lam=2, mu=2, tau=8)
ONE_D = MediumSpec.one_dimensional(1.0)


def small_cubic_data(theta=1.0, p=(1.0, 0.5, -0.2), q=(0.0, 0.3, 0.1)):
    lat = FrequencyLattice.centred((12, 12, 12), 0.5)
    return make_data(lat, RadialCutoff("gauss", eps=1.0), p=p, q=q, theta=theta)


@settings(max_examples=30, deadline=None)
@given(st.tuples(*[st.floats(-3, 3)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1))
def test_generator_is_similar_to_i_B(xi):
    xi = np.array(xi)
    lam = np.linalg.eigvals(generator(CUBIC, 1.3, 0.7, xi[None])[0])
    eta = xi / np.linalg.norm(xi)
    frame = np.linalg.eigh(symbol_at(CUBIC, eta))
    nu = np.linalg.eigvals(build_B(CUBIC, 1.3, 0.7, xi, frame=frame).B)
    # doubled eigenvalues make sorting unstable, so pair them by assignment
    assert np.allclose(match_eigenvalues(1j * nu, lam), 1j * nu, atol=1e-9 * max(1, xi @ xi))


def test_energy_variables_round_trip():
    rng = np.random.default_rng(2)
    xis = rng.normal(size=(20, 3))
    w = rng.normal(size=(20, 7)) + 1j * rng.normal(size=(20, 7))
    assert np.allclose(v_to_w(CUBIC, xis, w_to_v(CUBIC, xis, w)), w)


def test_time_zero_is_identity():
    data = small_cubic_data()
    assert np.allclose(propagate(CUBIC, 1.0, 1.0, data, 0.0).values, data.values, atol=1e-12)


def test_trivial_microlocalisation_is_identity():
    data = small_cubic_data()
    same = microlocalize(data)
    assert np.array_equal(same.values, data.values)
    ones = microlocalize(data, psi=lambda x: np.ones(len(x)), chi=lambda x: np.ones(len(x)))
    assert np.array_equal(ones.values, data.values)


def test_empty_support_raises():
    data = small_cubic_data()
    with pytest.raises(EmptySupportError):
        microlocalize(data, chi=lambda x: np.zeros(len(x)))


def test_decoupled_elastic_energy_is_conserved():
    data = small_cubic_data(theta=0.0)
    e0 = propagate(CUBIC, 0.0, 1.0, data, 0.0).energy()
    for t in (1.0, 7.5, 40.0):
        assert propagate(CUBIC, 0.0, 1.0, data, t).energy() == pytest.approx(e0, rel=1e-8)


def test_decoupled_heat_part_follows_heat_semigroup():
    data = small_cubic_data(theta=1.0, p=(0, 0, 0), q=(0, 0, 0))
    st_ = propagate(CUBIC, 0.0, 1.0, data, 0.8)
    xi2 = np.sum(data.xis() ** 2, axis=1)
    assert np.allclose(st_.values[:, 6], data.values[:, 6] * np.exp(-0.8 * xi2), atol=1e-12)
    assert np.allclose(st_.values[:, :6], 0)


def test_time_reversibility_without_coupling():
    data = small_cubic_data(theta=0.0)
    prop = Propagator(CUBIC, 0.0, 1.0, data)
    fwd = prop.field_hat(5.0)
    back = Propagator(CUBIC, 0.0, 1.0, dataclasses.replace(data, values=fwd)).field_hat(-5.0)
    assert np.allclose(back, data.values, atol=1e-8)


def test_energy_decreases_with_coupling():
    data = small_cubic_data()
    es = [propagate(CUBIC, 1.0, 1.0, data, t).energy() for t in (0, 1, 5, 20)]
    assert all(a >= b for a, b in zip(es, es[1:]))


def test_spectral_abscissa_non_positive():
    prop = Propagator(CUBIC, 1.0, 1.0, small_cubic_data())
    assert prop.spectral_abscissa <= 1e-10


def test_single_frequency_damping_rate():
    # one lattice point at xi = 0.01 carrying a pure +1 hyperbolic mode; the
    # small-frequency expansion predicts the rate kappa gamma^2 xi^2 / (2 (tau + gamma^2))
    xi = 0.01
    lat = FrequencyLattice([1], [1.0], [xi], np.eye(1))
    g = generator(ONE_D, 1.0, 1.0, np.array([[xi]]))[0]
    vals, vecs = np.linalg.eig(g)
    k = int(np.argmax(vals.imag))
    w0 = vecs[:, k]
    data = make_data(lat, lambda x: np.ones(len(x)), p=w0[:1], q=w0[1:2], theta=w0[2])
    prop = Propagator(ONE_D, 1.0, 1.0, data)
    ts = np.array([0.0, 2e4, 4e4])
    amp = [np.linalg.norm(prop.field_hat(t)[0]) for t in ts]
    rate = -np.polyfit(ts, np.log(amp), 1)[0]
    assert rate == pytest.approx(2.5e-5, rel=0.05)


def test_parseval():
    data = small_cubic_data()
    st_ = propagate(CUBIC, 1.0, 1.0, data, 2.0)
    assert physical_norms(st_, 2) ** 2 == pytest.approx(st_.energy(), rel=1e-8)


def test_high_frequency_parabolic_data_decays_exponentially():
    lat = FrequencyLattice.oriented(np.array([1, 2, 3]) / np.sqrt(14), 2.0, (10, 10, 10), 0.1)
    data = make_data(lat, lambda x: np.ones(len(x)), p=(1.0, 0.0, 0.0), q=(0.0, 0.0, 0.0), theta=0.0)
    data = microlocalize(data, psi=CapCutoff((1, 2, 3), 0.3), chi=RadialCutoff("high", eps=1.0))
    prop = Propagator(CUBIC, 1.0, 1.0, data)
    ts = np.array([50.0, 100.0, 200.0, 400.0])
    norms = [np.sqrt(prop.state(t).energy()) for t in ts]
    rate = -np.polyfit(ts, np.log(norms), 1)[0]
    assert rate > 0
    assert np.all(np.diff(np.log(norms)) < 0)


def test_cutoffs():
    assert smooth_step(-1) == 0 and smooth_step(2) == 1
    assert smooth_step(0.5) == pytest.approx(0.5)
    cap = CapCutoff((0, 0, 1), 0.2)
    assert cap(np.array([[0, 0, 1.0], [1.0, 0, 0]])) == pytest.approx([1, 0])
    band = RadialCutoff("band", r0=5, width=1)
    assert band(np.array([[5.0, 0, 0], [6.0, 0, 0]])) == pytest.approx([1, 0])
    with pytest.raises(ValueError):
        RadialCutoff("wedge")(np.zeros((1, 3)))


def test_lattice_refinement_keeps_the_box():
    lat = FrequencyLattice.oriented((0, 0, 1), 3.0, (8, 8, 4), (0.1, 0.1, 0.2))
    fine = lat.refined()
    assert fine.shape == (16, 16, 8)
    assert np.allclose(fine.period, 2 * lat.period)
    assert np.allclose(lat.center, [0, 0, 3])


def test_aliasing_warning():
    lat = FrequencyLattice.centred((16,), 0.5)
    data = make_data(lat, lambda x: np.ones(len(x)), p=(1.0,), q=(0.0,), theta=0.0)
    assert nyquist_fraction(data, data.values) > 0.01
    st_ = propagate(ONE_D, 1.0, 1.0, data, 0.0)
    with pytest.warns(AliasingWarning):
        physical_norms(st_, np.inf)


def test_decay_fit_power_law():
    t = geometric_times()
    fit = decay_fit(t, (1 + t) ** -1.0)
    assert fit.exponent == pytest.approx(-1.0, abs=0.01)
    assert fit.ci_low <= fit.exponent <= fit.ci_high
    fit0 = decay_fit(t, t ** -1.0, offset=0.0)
    assert fit0.exponent == pytest.approx(-1.0, abs=1e-10)


def test_decay_fit_needs_span():
    t = np.geomspace(1, 10, 20)
    with pytest.raises(InsufficientSpanError):
        decay_fit(t, t ** -0.5)
    with pytest.raises(InsufficientSpanError):
        decay_fit(np.geomspace(1, 1e3, 5), np.ones(5))


def test_geometric_times():
    t = geometric_times()
    assert t[0] == 1.0 and t[-1] <= 1e3 and np.allclose(t[1:] / t[:-1], 1.25)


def test_one_dimensional_decay_rate():
    run = run_decay(EXPERIMENTS["1d"])
    assert run.fit.exponent == pytest.approx(-0.5, abs=0.1)
    assert run.spectral_abscissa <= 1e-10
    lines = run.trace_csv().splitlines()
    assert lines[0] == "t,norm_q,q,label"
    assert float(lines[1].split(",")[1]) == pytest.approx(1.0)


def test_decay_run_is_deterministic():
    cfg = dataclasses.replace(EXPERIMENTS["1d"], shape=(2 ** 13,), spacing=(2 * np.pi / 1024.0,),
                              times=(1.0, 100.0, 1.25), fit_window=(1.0, 100.0))
    a, b = run_decay(cfg), run_decay(cfg)
    assert a.trace_csv() == b.trace_csv()
    assert a.fit == b.fit
