import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from walshctl.errors import ConfigError
from walshctl.qubit import (
    ConstantNoise,
    FidelityVector,
    NoiseTrace,
    PolynomialNoise,
    SampledNoise,
    SinusoidNoise,
    WalshNoise,
    analytic_phase,
    analytic_phases,
    analytic_protocol,
    batch_fidelities,
    build_wdd_control,
    chain_product,
    propagate,
    propagator,
    su2_steps,
    walsh_test_signal,
)
from walshctl.walsh import hamming_order

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def expm_hermitian(H, t):
    """Oracle: exp(-iHt) through an eigendecomposition."""
    w, v = np.linalg.eigh(H)
    return v @ np.diag(np.exp(-1j * w * t)) @ v.conj().T


@given(st.floats(0, 50), st.sampled_from([(1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 0)]),
       st.floats(-20, 20), st.floats(1e-4, 2))
def test_su2_step_matches_matrix_exponential(omega, axis, delta, dt):
    U = su2_steps(np.array([omega]), np.array([axis], dtype=float), np.array([delta]), np.array([dt]))[0]
    H = 0.5 * (omega * (axis[0] * SX + axis[1] * SY + axis[2] * SZ) + delta * SZ)
    assert np.allclose(U, expm_hermitian(H, dt), atol=1e-10)


def test_chain_product_order():
    rng = np.random.default_rng(0)
    U = su2_steps(rng.uniform(0, 5, 7), np.tile([1.0, 0, 0], (7, 1)), rng.uniform(-1, 1, 7), np.full(7, 0.3))
    ref = np.eye(2)
    for u in U:
        ref = u @ ref
    assert np.allclose(chain_product(U), ref)


def test_gamma3_rows():
    T, tp = 8.0, 0.1
    ctl = build_wdd_control(3, T, tp, grid=3)
    table = ctl.as_table()
    assert len(table) == 12
    assert [a for _, _, a in table] == ["x", "I", "I", "x", "I", "I", "I", "I", "x", "I", "I", "-y"]
    assert ctl.pulse_times() == pytest.approx([2.0, 6.0])
    assert ctl.duration == pytest.approx(T + tp / 2)


def test_spin_echo_control():
    ctl = build_wdd_control(1, 1.0, 1e-3)
    assert ctl.pulse_times() == pytest.approx([0.5])
    assert len(ctl.rows) == 5


def test_pulse_longer_than_segment_rejected():
    with pytest.raises(ConfigError):
        build_wdd_control(3, 1.0, 0.3)


def test_ramsey_matches_analytic():
    noise = ConstantNoise(0.4)
    ctl = build_wdd_control(0, 1.0, 1e-6)
    P = propagate(ctl, noise, 1.0, 1.0).fidelity()
    assert P == pytest.approx((1 + math.sin(0.4)) / 2, abs=1e-6)


def test_echo_cancels_constant_noise():
    # finite pulses leave a residue of order gamma * b * tau_pi
    ctl = build_wdd_control(1, 1.0, 1e-6)
    assert propagate(ctl, ConstantNoise(3.0), 1.0, 1.0).fidelity() == pytest.approx(0.5, abs=1e-5)


def test_propagator_unitary():
    U = propagator(build_wdd_control(5, 1.0, 0.01), SinusoidNoise(2.0, 7.0, 0.3), 1.5, 1.0)
    assert np.allclose(U @ U.conj().T, np.eye(2), atol=1e-12)


@pytest.mark.parametrize("l", [0, 1, 3, 5, 12])
def test_unitary_agrees_with_analytic_for_walsh_noise(l):
    noise = WalshNoise.random(16, 0.1, 1.0, seed=l)
    ctl = build_wdd_control(l, 1.0, 1e-6)
    P = propagate(ctl, noise, 1.0, 1.0).fidelity()
    assert P == pytest.approx(analytic_protocol(l, noise, 1.0, 1.0)[1], abs=1e-5)


def test_walsh_test_signal_phase():
    noise = walsh_test_signal(5, 0.25, 2.0, 8)
    phi = analytic_phases(noise, 1.0, 2.0, 8)
    assert phi == pytest.approx([0, 0, 0, 0, 0, 0.5, 0, 0], abs=1e-12)


def test_fast_phases_match_direct():
    noise = SinusoidNoise(1.0, 5.0, 0.2)
    fast = analytic_phases(noise, 1.3, 1.0, 16)
    direct = [float(analytic_phase(k, noise, 1.3, 1.0)) for k in range(16)]
    assert fast == pytest.approx(direct, abs=1e-9)


@given(st.integers(1, 63))
def test_polynomial_suppression(l):
    h = hamming_order(l)
    below = PolynomialNoise(tuple([Fraction(1)] * h), Fraction(1))
    assert analytic_phase(l, below, Fraction(1), Fraction(1)) == 0
    at = PolynomialNoise(tuple([Fraction(0)] * h + [Fraction(1)]), Fraction(1))
    assert analytic_phase(l, at, Fraction(1), Fraction(1)) != 0


def test_polynomial_phase_value():
    cubic = PolynomialNoise((0, 0, 0, Fraction(1)), Fraction(1))
    assert analytic_phase(7, cubic, Fraction(1), Fraction(1)) == Fraction(-3, 256)


@pytest.mark.parametrize("noise", [
    ConstantNoise(0.5),
    SinusoidNoise(1.0, 3.0, 0.1),
    PolynomialNoise((1.0, -2.0), 1.0),
    SampledNoise(np.array([1.0, -1.0, 0.5, 0.0]), 1.0),
    WalshNoise.random(8, 0.3, 1.0, seed=4),
])
def test_noise_round_trip(noise):
    back = NoiseTrace.from_dict(noise.to_dict())
    t = np.linspace(0, 0.99, 7)
    assert np.allclose(back.integral(np.zeros_like(t), t), noise.integral(np.zeros_like(t), t))
    assert back.to_json() == noise.to_json()


def test_walsh_noise_is_seeded():
    a = WalshNoise.random(16, 1.0, 1.0, seed=3)
    b = WalshNoise.random(16, 1.0, 1.0, seed=3)
    assert np.array_equal(a.weights, b.weights)


def test_batch_methods_agree():
    noise = WalshNoise.random(8, 0.05, 1.0, seed=2)
    a = batch_fidelities(noise, 1.0, 1.0, 8)
    u = batch_fidelities(noise, 1.0, 1.0, 8, "unitary")
    assert np.max(np.abs(a.P - u.P)) < 1e-5


def test_fidelity_vector_bounds():
    with pytest.raises(ValueError):
        FidelityVector(np.array([1.2]), 1.0, 1.0)
    fv = FidelityVector(np.array([0.5, 0.75]), 2.0, 1.0)
    assert FidelityVector.from_dict(fv.to_dict()).P.tolist() == [0.5, 0.75]
