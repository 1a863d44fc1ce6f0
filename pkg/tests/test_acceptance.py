"""End-to-end acceptance checks.

Each test records one PASS/FAIL line, printed in the terminal summary under
"acceptance criteria", and then asserts the outcome.
"""

import json
import math
import time

import numpy as np
import pytest

from sdrcodesign.accel import DeviceFftBackend, TransferModel, dequantize, estimate_transfer_time, quantize
from sdrcodesign.cli import dft_reference, main
from sdrcodesign.dsp import FirFilter, VectorSink, VectorSource, design_lowpass, fft, fir_reference
from sdrcodesign.profiler import compare, profile, utilization
from sdrcodesign.runtime import COMPLEX32, FlowGraph
from sdrcodesign.wifi import (
    MCS_TABLE,
    Receiver,
    apply_channel,
    build_capture,
    compute_per,
    conv_encode,
    deinterleave,
    depuncture,
    descramble,
    interleave,
    measure_per,
    per_sweep,
    puncture,
    random_psdus,
    receive,
    scramble,
    viterbi_decode,
)


def check(log, number, ok, detail):
    log.append((number, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, detail


def capture(n_frames, length, m, snr_db, seed, cfo=0.0):
    psdus = random_psdus(n_frames, length, seed)
    x, _ = build_capture(psdus, m, seed=seed)
    return psdus, apply_channel(x, cfo=cfo, snr_db=snr_db, seed=seed + 1)


def snr_db(ref, test):
    return 10 * math.log10(np.sum(np.abs(ref) ** 2) / np.sum(np.abs(test - ref) ** 2))


def test_01_perfect_loopback(acceptance_log):
    t0 = time.perf_counter()
    failures = []
    frames = {1: 10, 64: 100, 1500: 100, 4095: 10}
    for m in MCS_TABLE:
        for length, count in frames.items():
            psdus = random_psdus(count, length, seed=length)
            x, _ = build_capture(psdus, m, seed=length)
            events = receive(x)
            r = compute_per(psdus, events)
            if r.per != 0.0 or [e.psdu for e in events] != psdus:
                failures.append(f"{m.name}/{length}: per {r.per}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    check(acceptance_log, 1, ok,
          f"8 MCS x lengths {sorted(frames)} per=0, {elapsed:.1f} s"
          + (f"; failures {failures}" if failures else ""))


def test_02_awgn_monotone(acceptance_log):
    snrs = [5, 10, 15, 20, 25]
    res = per_sweep("BPSK-1/2", snrs, n_frames=200, length=100, seed=21)
    pers = [res[float(s)].per for s in snrs]
    monotone = all(b <= a for a, b in zip(pers, pers[1:]))
    check(acceptance_log, 2, monotone and pers[-1] < 0.01,
          "BPSK-1/2 PER " + ", ".join(f"{s} dB {p:.3f}" for s, p in zip(snrs, pers)))


@pytest.mark.parametrize("cfo", [-20e3, 20e3])
def test_03_cfo_recovery(acceptance_log, cfo):
    r = measure_per("QPSK-1/2", 20, n_frames=100, length=100, seed=31, cfo=cfo)
    check(acceptance_log, 3, r.per <= 0.02, f"cfo {cfo / 1e3:+.0f} kHz at 20 dB: per {r.per:.3f}")


def test_04_fft_fidelity(acceptance_log):
    rng = np.random.default_rng(41)
    worst = 0.0
    for n in (8, 64, 256):
        x = rng.standard_normal((100, n)) + 1j * rng.standard_normal((100, n))
        worst = max(worst, float(np.max(np.abs(fft(n, x) - dft_reference(x)))))
    x = 0.5 * (rng.uniform(-1, 1, (100, 64)) + 1j * rng.uniform(-1, 1, (100, 64))) / math.sqrt(2)
    dev = DeviceFftBackend().transform(x)
    ref = np.fft.fft(x, axis=1)
    min_snr = min(snr_db(r, d) for r, d in zip(ref, dev))
    check(acceptance_log, 4, worst <= 1e-5 and min_snr >= 60,
          f"software max |err| {worst:.2e}; device min SNR {min_snr:.1f} dB")


def test_05_transfer_model(acceptance_log):
    m = TransferModel()
    exact = estimate_transfer_time(m, 1.2e9) == 1.0
    rng = np.random.default_rng(51)
    counts = np.sort(rng.integers(0, 10**12, 1000))
    times = [estimate_transfer_time(m, int(c)) for c in counts]
    monotone = all(b >= a for a, b in zip(times, times[1:]))
    bounded = all(t >= c / 1.2e9 for t, c in zip(times, counts))
    check(acceptance_log, 5, exact and monotone and bounded,
          f"1.2e9 bytes -> {estimate_transfer_time(m, 1.2e9)} s; monotone {monotone}; "
          f"lower-bounded {bounded}")


def test_06_scheduler_invariance(acceptance_log):
    _, x = capture(50, 80, "QAM16-1/2", 22, seed=61, cfo=7e3)
    outputs = {}
    for chunk in (1, 7, 64, 4096):
        for workers in (1, 4):
            events = receive(x, chunk=chunk, workers=workers)
            outputs[chunk, workers] = json.dumps([e.to_dict() for e in events]).encode()
    ref = outputs[4096, 1]
    same = all(v == ref for v in outputs.values())
    n_events = len(json.loads(ref))
    check(acceptance_log, 6, same and n_events == 50,
          f"{len(outputs)} scheduler configurations, {n_events} events, identical {same}")


def test_07_profiler_closure(acceptance_log):
    _, x = capture(10, 200, "QPSK-3/4", 25, seed=71)
    a, b = Receiver(x), Receiver(x, backend=DeviceFftBackend())
    a.run()
    b.run()
    total = sum(utilization(a.report).percents().values())
    off = Receiver(x, profiling=False)
    off.run()
    zeros = all(c.calls == 0 and c.cycles == 0 and c.time_ns == 0
                for c in off.report.counters.blocks)
    ab = compare(profile(a.report), profile(b.report))
    ba = compare(profile(b.report), profile(a.report))
    anti = all(p.delta == -q.delta for p, q in zip(ab.rows, ba.rows)) and \
        [(r.key, r.metric) for r in ab.rows] == [(r.key, r.metric) for r in ba.rows]
    check(acceptance_log, 7, abs(total - 100) <= 0.01 and zeros and anti,
          f"percent sum {total:.4f}; disabled all zero {zeros}; antisymmetric {anti}")


def test_08_inverse_pairs(acceptance_log):
    rng = np.random.default_rng(81)
    inter = True
    for mod, n_bpsc in (("BPSK", 1), ("QPSK", 2), ("QAM16", 4), ("QAM64", 6)):
        for _ in range(1000):
            bits = rng.integers(0, 2, 48 * n_bpsc * int(rng.integers(1, 4))).astype(np.uint8)
            inter &= np.array_equal(deinterleave(interleave(bits, mod), mod), bits)
    scram = True
    for seed in range(1, 128):
        plain = np.concatenate([np.zeros(7, np.uint8), rng.integers(0, 2, 300).astype(np.uint8)])
        back, found = descramble(scramble(plain, seed))
        scram &= np.array_equal(back, plain) and found == seed
    punct = True
    for rate in ("1/2", "2/3", "3/4"):
        coded = rng.standard_normal(72)
        sent = puncture(coded, rate)
        back = depuncture(sent, rate, fill=np.nan)
        kept = ~np.isnan(back)
        punct &= back.size == coded.size and kept.sum() == sent.size
        punct &= np.array_equal(back[kept], coded[kept])
        punct &= np.array_equal(puncture(back, rate), sent)
    x = 0.999 * (rng.uniform(-1, 1, 100_000) + 1j * rng.uniform(-1, 1, 100_000))
    err = dequantize(quantize(x)) - x
    qerr = max(np.max(np.abs(err.real)), np.max(np.abs(err.imag)))
    ok = inter and scram and punct and qerr <= 2.0 ** -16
    check(acceptance_log, 8, ok,
          f"interleaver {inter}; scrambler 127 seeds {scram}; puncture {punct}; "
          f"quantize max err {qerr:.3e}")


def test_09_viterbi_two_flips(acceptance_log):
    rng = np.random.default_rng(91)
    failures = 0
    for _ in range(500):
        info = rng.integers(0, 2, 200).astype(np.uint8)
        bits = np.concatenate([info, np.zeros(6, np.uint8)])
        code = conv_encode(bits)
        flips = rng.choice(code.size, 2, replace=False)
        code[flips] ^= 1
        soft = 1.0 - 2.0 * code.astype(np.float64)
        failures += not np.array_equal(viterbi_decode(soft, "1/2", bits.size)[:200], info)
    check(acceptance_log, 9, failures == 0, f"{500 - failures}/500 two-flip placements recovered")


def test_10_fir_demo(acceptance_log, tmp_path):
    def tone_db(freq):
        out = tmp_path / f"{freq:.0f}.csv"
        assert main(["demo-fir", "--frequency", str(freq), "--out", str(out), "--seed", "0",
                     "--duration", "0.5"]) == 0
        rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
        k = int(round(freq * 1024 / 32e3))
        return max(float(r[2]) for r in rows[k - 1:k + 2])

    attenuation = tone_db(1e3) - tone_db(8e3)
    taps = design_lowpass(2e3, 1e3, 32e3)
    x = np.random.default_rng(101).standard_normal(5000).astype(np.complex64)
    g = FlowGraph()
    sink = VectorSink(COMPLEX32)
    g.chain(VectorSource(x), FirFilter(taps, COMPLEX32), sink, capacity=64)
    g.run(chunk=7)
    err = float(np.max(np.abs(sink.data() - fir_reference(taps.coefficients, x))))
    check(acceptance_log, 10, attenuation >= 40 and err <= 1e-5,
          f"stop band {attenuation:.1f} dB below pass band; streaming vs oracle {err:.2e}")


def test_11_backend_ab(acceptance_log):
    psdus, x = capture(100, 100, "QAM16-1/2", 20, seed=111)
    sw, dev = Receiver(x), Receiver(x, backend=DeviceFftBackend())
    ea, eb = sw.run(), dev.run()
    same = [(e.start, e.fcs_ok) for e in ea] == [(e.start, e.fcs_ok) for e in eb]
    rep = compare(profile(sw.report), profile(dev.report))
    modeled = rep.block("fft", "modeled_ns").b
    check(acceptance_log, 11, same and modeled > 0,
          f"fcs_ok unchanged {same} over {len(ea)} events "
          f"(per {compute_per(psdus, ea).per:.3f}); fft modeled {modeled / 1e3:.1f} us")
