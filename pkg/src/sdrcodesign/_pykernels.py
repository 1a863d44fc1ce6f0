"""Pure-numpy implementations of the hot kernels.

Every function here has a twin in ``_kernels.pyx`` that performs the same
floating-point operations in the same order, so both produce identical
results. Keep them in sync.
"""

import numpy as np

G0 = 0o133
G1 = 0o171

NEG_INF = -1e300


def _parity(x):
    return bin(x).count("1") & 1


def _branch_signs():
    # For next state ns and predecessor choice x: +1 when the expected coded
    # bit is 0, -1 when it is 1.
    sa = np.empty((2, 64))
    sb = np.empty((2, 64))
    for ns in range(64):
        b = ns >> 5
        for x in range(2):
            prev = ((ns & 31) << 1) | x
            w = (b << 6) | prev
            sa[x, ns] = 1.0 - 2.0 * _parity(w & G0)
            sb[x, ns] = 1.0 - 2.0 * _parity(w & G1)
    return sa, sb


_SA, _SB = _branch_signs()
_PREV0 = (np.arange(64) & 31) << 1
_PREV1 = _PREV0 | 1


def viterbi_soft(soft, n_bits, terminated=True):
    """Decode ``n_bits`` information bits of the K=7 (133, 171) code.

    ``soft`` holds ``2 * n_bits`` mother-code metrics (A, B per step);
    positive favours a 0 bit, zero is an erasure.
    """
    soft = np.ascontiguousarray(soft, dtype=np.float64)
    if soft.shape[0] < 2 * n_bits:
        raise ValueError("soft input shorter than 2 * n_bits")
    pm = np.full(64, NEG_INF)
    pm[0] = 0.0
    dec = np.empty((n_bits, 64), dtype=np.uint8)
    sa0, sa1 = _SA
    sb0, sb1 = _SB
    for i in range(n_bits):
        la = soft[2 * i]
        lb = soft[2 * i + 1]
        m0 = pm[_PREV0] + (sa0 * la + sb0 * lb)
        m1 = pm[_PREV1] + (sa1 * la + sb1 * lb)
        d = m1 > m0
        npm = np.where(d, m1, m0)
        pm = npm - npm.max()
        dec[i] = d
    state = 0 if terminated else int(np.argmax(pm))
    out = np.empty(n_bits, dtype=np.uint8)
    for i in range(n_bits - 1, -1, -1):
        out[i] = state >> 5
        state = ((state & 31) << 1) | int(dec[i, state])
    return out


def fir_complex(taps, xh):
    """Valid-mode FIR: ``xh`` carries ``len(taps) - 1`` history samples."""
    taps = np.asarray(taps, dtype=np.float64)
    xh = np.asarray(xh, dtype=np.complex128)
    k_len = taps.shape[0]
    n = xh.shape[0] - (k_len - 1)
    acc = np.zeros(max(n, 0), dtype=np.complex128)
    if n <= 0:
        return acc
    re = np.zeros(n)
    im = np.zeros(n)
    xr = xh.real
    xi = xh.imag
    for k in range(k_len):
        lo = k_len - 1 - k
        re = re + taps[k] * xr[lo:lo + n]
        im = im + taps[k] * xi[lo:lo + n]
    acc.real = re
    acc.imag = im
    return acc


def fir_real(taps, xh):
    taps = np.asarray(taps, dtype=np.float64)
    xh = np.asarray(xh, dtype=np.float64)
    k_len = taps.shape[0]
    n = xh.shape[0] - (k_len - 1)
    acc = np.zeros(max(n, 0))
    for k in range(k_len):
        lo = k_len - 1 - k
        acc = acc + taps[k] * xh[lo:lo + n]
    return acc


def fir_int(taps, xh, frac_bits):
    """Integer FIR with Q``frac_bits`` taps, rounded half away from zero."""
    taps = np.asarray(taps, dtype=np.int64)
    xh = np.asarray(xh, dtype=np.int64)
    k_len = taps.shape[0]
    n = xh.shape[0] - (k_len - 1)
    acc = np.zeros(max(n, 0), dtype=np.int64)
    for k in range(k_len):
        lo = k_len - 1 - k
        acc += taps[k] * xh[lo:lo + n]
    out = _round_shift(acc, frac_bits)
    return np.clip(out, -2**31, 2**31 - 1).astype(np.int32)


def _round_shift(v, k):
    if k == 0:
        return v
    half = np.int64(1) << (k - 1)
    mag = (np.abs(v) + half) >> k
    return np.where(v < 0, -mag, mag)


def autocorr(xh, lag, window):
    """Lagged autocorrelation and symmetric normalisation.

    ``xh`` carries ``lag + window - 1`` history samples. For each new sample
    ``n`` returns ``C[n] = sum_k x[n-k-lag] * conj(x[n-k])`` and
    ``|C| / sqrt(P * P_lag)`` (zero when either power is zero).
    """
    xh = np.asarray(xh, dtype=np.complex128)
    hist = lag + window - 1
    n = xh.shape[0] - hist
    if n <= 0:
        return np.zeros(0, np.complex128), np.zeros(0)
    # products[m] pairs xh[m] (lagged) with xh[m + lag] (current)
    cur = xh[lag:]
    old = xh[:-lag]
    pr = old.real * cur.real + old.imag * cur.imag
    pi = old.imag * cur.real - old.real * cur.imag
    pc = cur.real * cur.real + cur.imag * cur.imag
    po = old.real * old.real + old.imag * old.imag
    cre = np.zeros(n)
    cim = np.zeros(n)
    p = np.zeros(n)
    pl = np.zeros(n)
    for k in range(window):
        lo = window - 1 - k
        cre = cre + pr[lo:lo + n]
        cim = cim + pi[lo:lo + n]
        p = p + pc[lo:lo + n]
        pl = pl + po[lo:lo + n]
    den = np.sqrt(p * pl)
    ratio = np.zeros(n)
    ok = den > 0.0
    ratio[ok] = np.sqrt(cre[ok] * cre[ok] + cim[ok] * cim[ok]) / den[ok]
    return cre + 1j * cim, ratio


def fixed_fft(re, im, tw_re, tw_im, shifts):
    """In-place radix-2 DIT on bit-reversed int64 rows of Q1.15 samples.

    ``tw_re``/``tw_im`` hold N/2 twiddles scaled by 2**15 (1.0 == 32768).
    Each butterfly output is rounded once (half away from zero) after a
    right shift of ``15 + shifts[stage]`` and saturated to 16 bits.
    Returns True when any saturation occurred.
    """
    rows, n = re.shape
    overflow = False
    half = 1
    stage = 0
    while half < n:
        span = 2 * half
        step = n // span
        k = np.arange(half) * step
        wr = tw_re[k]
        wi = tw_im[k]
        sh = 15 + int(shifts[stage])
        a_idx = (np.arange(n // span)[:, None] * span + np.arange(half)[None, :]).ravel()
        b_idx = a_idx + half
        wr_t = np.tile(wr, n // span)
        wi_t = np.tile(wi, n // span)
        ar = re[:, a_idx] << 15
        ai = im[:, a_idx] << 15
        br = re[:, b_idx]
        bi = im[:, b_idx]
        tr = br * wr_t - bi * wi_t
        ti = br * wi_t + bi * wr_t
        outs = []
        for v in (ar + tr, ai + ti, ar - tr, ai - ti):
            r = _round_shift(v, sh)
            if np.any(r > 32767) or np.any(r < -32768):
                overflow = True
                r = np.clip(r, -32768, 32767)
            outs.append(r)
        re[:, a_idx], im[:, a_idx], re[:, b_idx], im[:, b_idx] = outs
        half = span
        stage += 1
    return overflow
