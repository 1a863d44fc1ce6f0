"""Time the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Prints one CSV
row per kernel with the best-of-N time of each implementation and the
speedup. Both implementations are checked for identical output first.
"""

import argparse
import sys
import timeit

import numpy as np

from sdrcodesign import _pykernels, kernels
from sdrcodesign.wifi.coding import conv_encode


def cases(rng):
    bits = rng.integers(0, 2, 1000).astype(np.uint8)
    bits[-6:] = 0
    code = conv_encode(bits).astype(np.float64)
    soft = (1.0 - 2.0 * code) + 0.3 * rng.standard_normal(code.size)
    taps = rng.standard_normal(63)
    x = rng.standard_normal(8192 + 62) + 1j * rng.standard_normal(8192 + 62)
    itaps = np.rint(taps * 2**12).astype(np.int64)
    ix = rng.integers(-2**15, 2**15, 8192 + 62).astype(np.int64)
    ac = rng.standard_normal(4096 + 63) + 1j * rng.standard_normal(4096 + 63)
    n = 64
    tw = np.exp(-2j * np.pi * np.arange(n // 2) / n)
    tw_re = np.rint(tw.real * 32768).astype(np.int64)
    tw_im = np.rint(tw.imag * 32768).astype(np.int64)
    fre = rng.integers(-8192, 8192, (256, n)).astype(np.int64)
    fim = rng.integers(-8192, 8192, (256, n)).astype(np.int64)
    shifts = np.ones(6, dtype=np.int64)

    def fft(mod):
        re, im = fre.copy(), fim.copy()
        mod.fixed_fft(re, im, tw_re, tw_im, shifts)
        return re, im

    return {
        "viterbi_soft (1000 bits)": lambda m: m.viterbi_soft(soft, bits.size, True),
        "fir_complex (63 taps, 8192)": lambda m: m.fir_complex(taps, x),
        "fir_real (63 taps, 8192)": lambda m: m.fir_real(taps, x.real.copy()),
        "fir_int (63 taps, 8192)": lambda m: m.fir_int(itaps, ix, 12),
        "autocorr (lag 16, 4096)": lambda m: m.autocorr(ac, 16, 48),
        "fixed_fft (256 x 64)": fft,
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b) or np.allclose(a, b, rtol=1e-12, atol=1e-9)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=3)
    args = ap.parse_args(argv)
    fast = kernels.compiled()
    if fast is None:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print("kernel,python_ms,cython_ms,speedup")
    for name, fn in cases(rng).items():
        if not same(fn(_pykernels), fn(fast)):
            print(f"{name}: implementations disagree", file=sys.stderr)
            return 1
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=args.number, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fn(fast), number=args.number, repeat=args.repeat))
        tp, tc = 1e3 * tp / args.number, 1e3 * tc / args.number
        print(f"{name},{tp:.3f},{tc:.3f},{tp / tc:.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
