import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdrcodesign import _pykernels, kernels
from sdrcodesign.wifi.coding import conv_encode

fast = kernels.compiled()
needs_compiled = pytest.mark.skipif(fast is None, reason="compiled kernels not built")


def twiddles(n):
    tw = np.exp(-2j * np.pi * np.arange(n // 2) / n)
    return np.rint(tw.real * 32768).astype(np.int64), np.rint(tw.imag * 32768).astype(np.int64)


def test_selection():
    assert kernels.IMPLEMENTATION in ("cython", "python")
    if kernels.IMPLEMENTATION == "cython":
        assert kernels.viterbi_soft is fast.viterbi_soft


@needs_compiled
class TestAgreement:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 300), st.integers(0, 2**32 - 1), st.floats(0.0, 2.0),
           st.booleans())
    def test_viterbi(self, n, seed, sigma, terminated):
        rng = np.random.default_rng(seed)
        bits = rng.integers(0, 2, n).astype(np.uint8)
        soft = 1.0 - 2.0 * conv_encode(bits) + sigma * rng.standard_normal(2 * n)
        soft[rng.random(2 * n) < 0.1] = 0.0
        np.testing.assert_array_equal(_pykernels.viterbi_soft(soft, n, terminated),
                                      fast.viterbi_soft(soft, n, terminated))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 40), st.integers(0, 200), st.integers(0, 2**32 - 1))
    def test_fir_float(self, k, n, seed):
        rng = np.random.default_rng(seed)
        taps = rng.standard_normal(k)
        x = rng.standard_normal(n + k - 1) + 1j * rng.standard_normal(n + k - 1)
        np.testing.assert_allclose(_pykernels.fir_complex(taps, x), fast.fir_complex(taps, x),
                                   rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(_pykernels.fir_real(taps, x.real), fast.fir_real(taps, x.real),
                                   rtol=1e-12, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 40), st.integers(0, 200), st.integers(0, 20),
           st.integers(0, 2**32 - 1))
    def test_fir_int(self, k, n, frac_bits, seed):
        rng = np.random.default_rng(seed)
        taps = rng.integers(-2**15, 2**15, k).astype(np.int64)
        x = rng.integers(-2**31, 2**31, n + k - 1).astype(np.int64)
        np.testing.assert_array_equal(_pykernels.fir_int(taps, x, frac_bits),
                                      fast.fir_int(taps, x, frac_bits))

    @pytest.mark.parametrize("lag,window", [(16, 48), (16, 32), (1, 1), (64, 64)])
    def test_autocorr(self, lag, window):
        rng = np.random.default_rng(lag + window)
        x = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
        x[200:400] = 0
        c0, r0 = _pykernels.autocorr(x, lag, window)
        c1, r1 = fast.autocorr(x, lag, window)
        np.testing.assert_allclose(c0, c1, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(r0, r1, rtol=1e-9, atol=1e-9)

    @pytest.mark.parametrize("n", [8, 64, 256, 2048])
    @pytest.mark.parametrize("shift", [0, 1, 2])
    def test_fixed_fft(self, n, shift):
        rng = np.random.default_rng(n)
        tw_re, tw_im = twiddles(n)
        shifts = np.full(int(np.log2(n)), shift, dtype=np.int64)
        re = rng.integers(-32768, 32768, (4, n)).astype(np.int64)
        im = rng.integers(-32768, 32768, (4, n)).astype(np.int64)
        a, b = (re.copy(), im.copy()), (re.copy(), im.copy())
        ovf_py = _pykernels.fixed_fft(*a, tw_re, tw_im, shifts)
        ovf_c = fast.fixed_fft(*b, tw_re, tw_im, shifts)
        assert bool(ovf_py) == bool(ovf_c)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])
