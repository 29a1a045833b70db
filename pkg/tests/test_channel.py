import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from admmlp.channel import ChannelConfig, bpsk, frame_rng, llr, transmit

UNIT = ChannelConfig(0.0, 0.5)  # sigma = 1


def sigma_config(sigma, **kw):
    return ChannelConfig(10 * math.log10(1 / (2 * 0.5 * sigma ** 2)), 0.5, **kw)


def test_sigma_formula():
    assert UNIT.sigma == pytest.approx(1.0)
    assert sigma_config(0.8).sigma == pytest.approx(0.8)
    assert ChannelConfig(math.inf, 0.5).sigma == 0.0
    with pytest.raises(ValueError):
        ChannelConfig(1.0, 1.0)


def test_llr_examples():
    assert llr([0.0], UNIT)[0] == 0.0
    assert llr([0.5], ChannelConfig(0.0, 0.5, saturate=False))[0] == pytest.approx(1.0)
    assert llr([3.7], UNIT)[0] == pytest.approx(4.0)
    assert llr([3.7], UNIT, fixed_scale=True)[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        llr([0.1], ChannelConfig(math.inf, 0.5))


def test_sigma_saturation_mode():
    cfg = sigma_config(0.8, saturation="sigma")
    assert llr([5.0], cfg)[0] == pytest.approx(2 * 0.8 / 0.64)
    assert llr([5.0], cfg, fixed_scale=True)[0] == pytest.approx(1.0)


def test_noiseless_limit():
    c = np.array([0, 1, 1, 0, 1])
    assert np.array_equal(transmit(c, ChannelConfig(math.inf, 0.5), frame_rng(0, 0)), bpsk(c))


def test_seeded_streams():
    c = np.zeros(64, dtype=np.uint8)
    a = transmit(c, UNIT, frame_rng(3, 17))
    assert np.array_equal(a, transmit(c, UNIT, frame_rng(3, 17)))
    assert not np.array_equal(a, transmit(c, UNIT, frame_rng(3, 18)))
    assert not np.array_equal(a, transmit(c, UNIT, frame_rng(4, 17)))
    with pytest.raises(ValueError):
        frame_rng(-1, 0)


def test_noise_variance():
    cfg = sigma_config(0.8)
    y = transmit(np.zeros(1_000_000, dtype=np.uint8), cfg, frame_rng(1, 0))
    assert np.var(y - 1.0) == pytest.approx(0.64, rel=0.01)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30), st.booleans(),
       st.sampled_from(["output", "sigma"]))
def test_sign_and_monotonicity(ys, sat, mode):
    y = np.sort(np.array(ys))
    cfg = ChannelConfig(1.0, 0.5, sat, mode)
    g = llr(y, cfg)
    assert np.array_equal(np.sign(g), np.sign(y))
    assert np.all(np.diff(g) >= 0)
    assert np.all(np.abs(llr(y, cfg, fixed_scale=True)) <= 1.0 + 1e-12) or not sat
