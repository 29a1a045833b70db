import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admmlp.admm import AdmmState, DecoderConfig, check_update, decode, variable_update
from admmlp.channel import ChannelConfig, frame_rng, llr, transmit
from admmlp.code_model import CodewordSampler, ParityCheckMatrix, syndrome_ok

from conftest import ml_decode


def hamming_frames(H, ebn0, count, seed):
    ch = ChannelConfig(ebn0, 4 / 7, saturate=False)
    sampler = CodewordSampler(H)
    for k in range(count):
        rng = frame_rng(seed, k)
        c = sampler.sample(rng)
        yield c, llr(transmit(c, ch, rng), ch)


def test_variable_update_examples():
    assert variable_update([0.5, 0.5, 0.5], 0.0) == 0.5
    assert variable_update([1 / 3] * 3, 2.0) == 0.0
    assert variable_update([1, 1], -0.4) == 1.0
    with pytest.raises(ValueError):
        variable_update([], 0.0)


def test_check_update_examples():
    z, lam, m = check_update([0.5] * 3, [0.0] * 3)
    assert np.array_equal(z, [0.5] * 3) and not lam.any() and np.array_equal(m, [0.5] * 3)
    z, lam, m = check_update([1.0] * 3, [0.0] * 3)
    assert np.allclose(z, 2 / 3) and np.allclose(lam, 1 / 3) and np.allclose(m, 1 / 3)
    z, lam, m = check_update([0.0] * 4, [0.0] * 4)
    assert not (z.any() or lam.any() or m.any())
    with pytest.raises(ValueError):
        check_update([0.1, 0.2], [0.0])


def test_message_identity_is_two_z_minus_v():
    rng = np.random.default_rng(2)
    for _ in range(200):
        x = rng.uniform(0, 1, 5)
        lam0 = rng.normal(0, 0.3, 5)
        z, lam, m = check_update(x, lam0)
        assert np.allclose(m, 2 * z - (x + lam0), atol=1e-14)
        assert np.array_equal(m, z - lam)


def test_strong_llrs_decode_immediately(hamming):
    d = decode(hamming, np.full(7, 10.0))
    assert not d.hard.any()
    assert d.integral and d.ml_certificate and d.converged
    assert d.iterations_used <= 3


def test_noiseless_limit(hamming):
    for c, g in hamming_frames(hamming, 30.0, 20, 0):
        d = decode(hamming, g)
        assert np.array_equal(d.hard, c)


def test_integral_outputs_are_ml(hamming, hamming_codewords):
    for c, g in hamming_frames(hamming, 3.0, 300, 9):
        d = decode(hamming, g)
        if d.integral:
            assert np.array_equal(d.hard, ml_decode(hamming_codewords, g))


def test_stepper_matches_kernel(tanner):
    rng = np.random.default_rng(3)
    g = rng.normal(0.6, 1.0, tanner.n)
    st_ = AdmmState(tanner, g)
    for _ in range(12):
        st_.step()
        assert np.all((st_.x >= 0) & (st_.x <= 1))
        assert np.array_equal(st_.msg, st_.z - st_.lam)
    # the kernel reports x from its last variable sweep
    d = decode(tanner, g, DecoderConfig(12, early_termination=False))
    assert np.allclose(d.x, st_.x, atol=1e-12)


def test_deterministic(tanner):
    g = np.random.default_rng(4).normal(1.0, 1.5, tanner.n)
    assert decode(tanner, g) == decode(tanner, g)


def test_scale_invariance_of_converged_decisions(hamming):
    checked = 0
    for _, g in hamming_frames(hamming, 3.0, 100, 21):
        base = decode(hamming, g, DecoderConfig(2000))
        for c in (0.5, 2.0):
            other = decode(hamming, g, DecoderConfig(2000, llr_scale=c))
            if base.integral and other.integral:
                assert np.array_equal(base.hard, other.hard)
                checked += 1
    assert checked > 150


def test_early_termination_only_on_codewords(tanner):
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = rng.normal(0.4, 1.0, tanner.n)
        d = decode(tanner, g, DecoderConfig(60))
        if d.iterations_used < 60:
            assert syndrome_ok(tanner, d.hard) and d.integral


def test_rejects_bad_input(hamming):
    with pytest.raises(ValueError):
        decode(hamming, np.ones(6))
    with pytest.raises(ValueError):
        decode(hamming, np.array([np.inf] + [1.0] * 6))
    H = ParityCheckMatrix.from_check_lists(3, [[0], [0, 1, 2]])
    with pytest.raises(ValueError):
        decode(H, np.ones(3))
    with pytest.raises(ValueError):
        DecoderConfig(max_iterations=0)
    with pytest.raises(ValueError):
        DecoderConfig(integrality_tolerance=0.5)


@given(st.lists(st.floats(-20, 20), min_size=7, max_size=7), st.integers(1, 40))
@settings(max_examples=50)
def test_estimates_stay_in_unit_cube(hamming, gamma, iters):
    d = decode(hamming, np.array(gamma), DecoderConfig(iters, early_termination=False))
    assert np.all((d.x >= 0) & (d.x <= 1))
    assert d.iterations_used == iters
