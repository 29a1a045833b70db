import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from admmlp.bp import BpConfig, boxplus, bp_decode
from admmlp.code_model import syndrome_ok

from conftest import ml_decode

llrs = st.floats(-30, 30, allow_nan=False)


def test_strong_llrs(hamming):
    d = bp_decode(hamming, np.full(7, 10.0))
    assert not d.hard.any() and d.iterations_used == 1 and d.converged


def test_boxplus_matches_definition():
    want = 2 * math.atanh(math.tanh(1.0) * math.tanh(1.0))
    assert boxplus(2.0, 2.0) == pytest.approx(want, abs=1e-12)
    assert boxplus(2.0, 2.0) == pytest.approx(1.3250, abs=1e-4)


@given(llrs, llrs)
def test_boxplus_against_tanh_rule(a, b):
    ta, tb = math.tanh(a / 2), math.tanh(b / 2)
    if abs(ta * tb) < 1 - 1e-9:
        assert boxplus(a, b) == pytest.approx(2 * math.atanh(ta * tb), abs=1e-7)


def test_boxplus_huge_magnitudes():
    assert boxplus(800.0, 900.0) == pytest.approx(800.0)
    assert boxplus(-800.0, 900.0) == pytest.approx(-800.0)
    assert boxplus(0.0, 50.0) == 0.0


@given(llrs, llrs, llrs)
def test_boxplus_associative(a, b, c):
    assert boxplus(boxplus(a, b), c) == pytest.approx(boxplus(a, boxplus(b, c)), abs=1e-9)


def test_single_error_corrected(hamming, hamming_codewords):
    for c in hamming_codewords:
        for i in range(7):
            g = np.where(c == 0, 6.0, -6.0)
            g[i] = -0.5 * g[i]
            d = bp_decode(hamming, g)
            assert np.array_equal(d.hard, c)
            assert np.array_equal(d.hard, ml_decode(hamming_codewords, g))


def test_sign_symmetry(hamming):
    # every check has even degree, so negating all LLRs complements every decision
    rng = np.random.default_rng(0)
    for _ in range(100):
        g = rng.normal(1.5, 2.0, 7)
        a, b = bp_decode(hamming, g, BpConfig(50)), bp_decode(hamming, -g, BpConfig(50))
        assert np.array_equal(a.hard, 1 - b.hard)
        assert a.iterations_used == b.iterations_used


def test_termination_only_on_codewords(tanner):
    rng = np.random.default_rng(1)
    for _ in range(40):
        d = bp_decode(tanner, rng.normal(0.8, 2.0, tanner.n), BpConfig(30))
        assert d.converged == syndrome_ok(tanner, d.hard)
        if d.iterations_used < 30:
            assert d.converged


def test_clamp(tanner):
    g = np.random.default_rng(2).normal(2.0, 2.0, tanner.n)
    d = bp_decode(tanner, g, BpConfig(50, llr_clamp=20.0))
    assert d.converged
    with pytest.raises(ValueError):
        BpConfig(llr_clamp=0.0)
    with pytest.raises(ValueError):
        bp_decode(tanner, g[:-1])
