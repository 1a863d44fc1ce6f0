import math

import numpy as np
import pytest

from sdrcodesign.dsp import GaussianStream
from sdrcodesign.wifi import (
    DEFAULT_PARAMS,
    AlignmentError,
    FrameError,
    Receiver,
    align_symbols,
    apply_channel,
    autocorr_ratio,
    build_capture,
    compute_per,
    correct_cfo,
    detect_frame,
    encode_frame,
    equalize,
    equalize_block,
    estimate_channel,
    map_bits,
    mcs,
    measure_per,
    n_data_symbols,
    random_psdus,
    receive,
)
from sdrcodesign.wifi.coding import PILOT_POLARITY
from sdrcodesign.wifi.params import LTF_FREQ, STF_TIME, TIME_SCALE
from sdrcodesign.wifi.sync import CfoCorrector
from sdrcodesign.wifi.tx import ofdm_symbols

P = DEFAULT_PARAMS
FS = P.sample_rate


def frame_at(offset, psdu=b"\x42" * 60, name="QPSK-1/2", total=None, seed=0x5D):
    f = encode_frame(psdu, mcs(name), scrambler_seed=seed)
    total = total or offset + len(f) + 400
    x = np.zeros(total, np.complex64)
    x[offset:offset + len(f)] = f
    return x, f


def ltf_ffts(x, start):
    """Unscaled FFTs of the two LTF periods starting at ``start``."""
    return np.stack([np.fft.fft(x[start:start + 64]), np.fft.fft(x[start + 64:start + 128])])


def random_data_symbols(rng, count, first_index=1):
    bits = rng.integers(0, 2, 96 * count).astype(np.uint8)
    pts = map_bits(bits, "QPSK").reshape(count, 48)
    return pts, ofdm_symbols(pts, first_index)


class TestEncoder:
    @pytest.mark.parametrize("name", ["BPSK-1/2", "QAM16-3/4", "QAM64-2/3"])
    @pytest.mark.parametrize("length", [1, 77, 1500])
    def test_length(self, name, length):
        m = mcs(name)
        f = encode_frame(bytes(length), m)
        assert len(f) == 320 + 80 * (1 + n_data_symbols(length, m))
        assert f.dtype == np.complex64

    def test_stf_periodicity(self):
        f = encode_frame(b"abc", mcs("BPSK-1/2"))
        periods = f[:160].reshape(10, 16)
        assert np.all(periods == periods[0])

    def test_pilot_polarity(self):
        f = encode_frame(bytes(300), mcs("QPSK-3/4"))
        n_sym = (len(f) - 400) // 80
        body = f[400:].reshape(n_sym, 80)[:, 16:]
        spec = np.fft.fft(body, axis=1) / TIME_SCALE
        pilots = spec[:, P.pilot_bins]
        expected = PILOT_POLARITY[1:1 + n_sym, None] * np.array([1, 1, 1, -1])
        np.testing.assert_allclose(pilots, expected, atol=1e-5)

    def test_cyclic_prefix(self):
        f = encode_frame(bytes(40), mcs("QAM16-1/2"))
        sym = f[320:400]
        np.testing.assert_array_equal(sym[:16], sym[64:])

    @pytest.mark.parametrize("length", [0, 4096])
    def test_length_range(self, length):
        with pytest.raises(ValueError):
            encode_frame(bytes(length), mcs("BPSK-1/2"))


class TestDetection:
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_noise_has_no_triggers(self, seed):
        z = GaussianStream(seed).complex_normal(10**5)
        assert detect_frame(z, threshold=0.9) == []

    def test_ideal_stf_ratio(self):
        r = autocorr_ratio(np.tile(STF_TIME, 4))
        np.testing.assert_allclose(r[64 + 16:], 1.0, atol=1e-9)

    def test_single_trigger_in_window(self):
        x, _ = frame_at(1000)
        x = apply_channel(x, snr_db=20, seed=4)
        trig = detect_frame(x)
        assert len(trig) == 1
        assert 1000 <= trig[0].index <= 1160

    def test_coarse_cfo(self):
        x, _ = frame_at(500)
        x = apply_channel(x, cfo=50e3, snr_db=30, seed=5)
        trig = detect_frame(x)
        assert abs(trig[0].cfo - 50e3) < 5e3

    def test_streaming_matches_one_shot(self):
        x, _ = frame_at(300, total=6000)
        x = np.concatenate([x, x])
        one = detect_frame(x)
        from sdrcodesign.wifi import FrameDetector

        det = FrameDetector()
        chunked = []
        for i in range(0, len(x), 97):
            chunked.extend(det.process(x[i:i + 97]))
        assert [t.index for t in chunked] == [t.index for t in one]
        np.testing.assert_allclose([t.cfo for t in chunked], [t.cfo for t in one], rtol=1e-9)

    def test_bad_threshold(self):
        with pytest.raises(ValueError):
            detect_frame(np.zeros(10), threshold=1.5)


class TestCfo:
    def test_zero_is_identity(self):
        x = GaussianStream(1).complex_normal(100)
        np.testing.assert_array_equal(correct_cfo(x, 0.0), x)

    def test_inverse_rotation(self):
        x = GaussianStream(2).complex_normal(1000)
        y = correct_cfo(correct_cfo(x, 1234.5), -1234.5)
        assert np.max(np.abs(y - x)) < 1e-5

    def test_removes_impairment(self):
        _, f = frame_at(0)
        imp = apply_channel(f, cfo=3e3)
        assert np.max(np.abs(correct_cfo(imp, 3e3) - f)) < 1e-4

    def test_phase_continuous_chunks(self):
        x = GaussianStream(3).complex_normal(500)
        c = CfoCorrector()
        c.retune(7e3, 0)
        pieces = [c.process(x[i:i + 33], i) for i in range(0, 500, 33)]
        np.testing.assert_allclose(np.concatenate(pieces), correct_cfo(x, 7e3), atol=1e-6)


class TestAlignment:
    def test_exact_start(self):
        x, _ = frame_at(1000)
        trig = detect_frame(x)[0]
        al = align_symbols(x, trig)
        assert al.start == 1000 + 192 and al.frame_start == 1000

    @pytest.mark.parametrize("jitter", [-4, -2, 0, 3, 4])
    def test_trigger_jitter(self, jitter):
        x, _ = frame_at(1000)
        trig = detect_frame(x)[0]
        assert align_symbols(x, trig.index + jitter).start == 1192

    def test_fine_cfo(self):
        x, _ = frame_at(800)
        x = apply_channel(x, cfo=1e3)
        al = align_symbols(x, detect_frame(x)[0])
        assert abs(al.cfo - 1e3) <= 100

    def test_noise_rejected(self):
        z = GaussianStream(4).complex_normal(2000)
        with pytest.raises(AlignmentError):
            align_symbols(z, 100)

    def test_truncated(self):
        x, _ = frame_at(100)
        with pytest.raises(AlignmentError):
            align_symbols(x[:300], 100)


class TestChannelEstimate:
    def test_ideal(self):
        _, f = frame_at(0)
        est = estimate_channel(ltf_ffts(f, 192))
        np.testing.assert_allclose(est.gains(), 1.0, atol=1e-5)

    def test_flat_gain(self):
        _, f = frame_at(0)
        g = 2 * np.exp(1j * np.pi / 4)
        est = estimate_channel(ltf_ffts(f * g, 192))
        np.testing.assert_allclose(est.gains(), g, atol=1e-5)

    def test_two_tap_matches_dft(self):
        _, f = frame_at(0)
        taps = np.array([1.0, 0.4 - 0.3j])
        y = np.convolve(f, taps)
        est = estimate_channel(ltf_ffts(y, 192))
        occ = P.bins(P.occupied_carriers)
        h_true = np.fft.fft(taps, 64)
        np.testing.assert_allclose(est.h[occ], h_true[occ], atol=1e-4)

    def test_degenerate(self):
        with pytest.raises(FrameError) as info:
            estimate_channel(np.zeros((2, 64)))
        assert info.value.reason == "degenerate-channel"


class TestEqualizer:
    def _setup(self, gain=1.0, count=6):
        rng = np.random.default_rng(7)
        pts, td = random_data_symbols(rng, count)
        ltf = np.tile(np.fft.ifft(LTF_FREQ) * TIME_SCALE, 2) * gain
        est = estimate_channel(np.stack([np.fft.fft(ltf[:64]), np.fft.fft(ltf[64:])]))
        freq = np.fft.fft(td.reshape(count, 80)[:, 16:] * gain, axis=1)
        return pts, est, freq

    def test_flat_channel(self):
        pts, est, freq = self._setup()
        np.testing.assert_allclose(equalize_block(freq, est, 1), pts, atol=1e-5)
        np.testing.assert_allclose(equalize(freq[0], est, 1), pts[0], atol=1e-5)

    def test_scale_invariance(self):
        alpha = 0.3 - 1.7j
        pts, est, freq = self._setup(gain=alpha)
        np.testing.assert_allclose(equalize_block(freq, est, 1), pts, atol=1e-5)

    def test_phase_drift(self):
        pts, est, freq = self._setup(count=20)
        drift = np.exp(1j * np.deg2rad(2.0) * np.arange(1, 21))[:, None]
        out = equalize_block(freq * drift, est, 1)
        resid = np.rad2deg(np.angle(np.sum(out * np.conj(pts), axis=1)))
        assert np.max(np.abs(resid)) < 0.5

    def test_timing_slope_removed(self):
        pts, est, freq = self._setup()
        k = np.fft.fftfreq(64, 1 / 64)
        out = equalize_block(freq * np.exp(1j * 0.01 * k), est, 1)
        np.testing.assert_allclose(out, pts, atol=1e-5)

    def test_degenerate_pilots(self):
        _, est, freq = self._setup()
        freq[:, P.pilot_bins] = 0
        with pytest.raises(FrameError):
            equalize_block(freq, est, 1)


class TestApplyChannel:
    def test_identity(self):
        x = GaussianStream(5).complex_normal(300).astype(np.complex64)
        np.testing.assert_array_equal(apply_channel(x), x)

    def test_snr_calibration(self):
        _, f = frame_at(0, psdu=bytes(1000))
        y = apply_channel(f, snr_db=20, seed=9)
        noise = y.astype(np.complex128) - f
        snr = 10 * math.log10(np.mean(np.abs(f) ** 2) / np.mean(np.abs(noise) ** 2))
        assert abs(snr - 20) <= 0.3

    def test_convolution(self):
        x = GaussianStream(6).complex_normal(200)
        y = apply_channel(x, taps=[1, 0.3j])
        ref = np.zeros(201, complex)
        for n in range(201):
            ref[n] = (x[n] if n < 200 else 0) + (0.3j * x[n - 1] if n >= 1 else 0)
        assert np.max(np.abs(y - ref)) < 1e-6

    def test_pad_and_determinism(self):
        x = np.ones(50, np.complex64)
        a = apply_channel(x, snr_db=10, start_pad=25, seed=1)
        b = apply_channel(x, snr_db=10, start_pad=25, seed=1)
        assert len(a) == 75 and np.array_equal(a, b)
        assert np.all(a[:25] != 0)

    def test_empty_taps(self):
        with pytest.raises(ValueError):
            apply_channel(np.ones(4), taps=[])


class TestReceiver:
    def test_loopback_hundred_frames(self):
        psdus = random_psdus(100, 120, seed=1)
        x, starts = build_capture(psdus, mcs("QPSK-3/4"), seed=2)
        events = receive(x)
        assert [e.psdu for e in events] == psdus
        assert all(e.fcs_ok for e in events)
        assert [e.start for e in events] == list(starts)

    def test_high_snr_bpsk(self):
        r = measure_per("BPSK-1/2", 25, n_frames=100, length=100, seed=3)
        assert r.passed >= 99

    def test_empty_input(self):
        assert receive(np.zeros(0, np.complex64)) == []

    def test_noise_only(self):
        assert receive(GaussianStream(8).complex_normal(20000)) == []

    def test_multipath_and_cfo(self):
        psdus = random_psdus(20, 200, seed=4)
        x, _ = build_capture(psdus, mcs("QAM16-1/2"), seed=5)
        x = apply_channel(x, cfo=-40e3, snr_db=28, taps=[1, 0, 0.25j, -0.1], seed=6)
        assert compute_per(psdus, receive(x)).per == 0.0

    def test_cfo_tolerance_noiseless(self):
        psdus = random_psdus(10, 100, seed=7)
        x, _ = build_capture(psdus, mcs("QAM16-3/4"), seed=8)
        for cfo in (-62.5e3, 62.5e3):
            assert compute_per(psdus, receive(apply_channel(x, cfo=cfo))).per == 0.0

    def test_short_psdu_has_no_fcs(self):
        x, _ = build_capture([b"\x07\x08"], mcs("BPSK-3/4"))
        (ev,) = receive(x)
        assert ev.psdu == b"\x07\x08" and ev.fcs_ok and not ev.fcs_present

    def test_corrupt_fcs_reported(self):
        psdus = random_psdus(1, 50, seed=9)
        bad = psdus[0][:-1] + bytes([psdus[0][-1] ^ 1])
        x, _ = build_capture([bad], mcs("QPSK-1/2"))
        (ev,) = receive(x)
        assert ev.psdu == bad and not ev.fcs_ok

    def test_fused_stage_same_events(self):
        psdus = random_psdus(10, 300, seed=10)
        x, _ = build_capture(psdus, mcs("QAM64-3/4"), seed=11)
        a, b = Receiver(x), Receiver(x, fused=True)
        ea, eb = a.run(chunk=64), b.run(chunk=64)
        assert [e.to_dict() for e in ea] == [e.to_dict() for e in eb]
        assert "fft_equalizer" in b.report.counters.names()
        assert "fft" not in b.report.counters.names()

    def test_seed_and_cfo_in_events(self):
        psdus = random_psdus(3, 60, seed=12)
        x, _ = build_capture(psdus, mcs("QPSK-1/2"), seed=13)
        x = apply_channel(x, cfo=10e3)
        events = receive(x)
        assert all(abs(e.cfo_applied - 10e3) < 500 for e in events)
        assert len({e.scrambler_seed for e in events}) == 3


class TestPer:
    def test_arithmetic(self):
        sent = [bytes([i]) * 8 for i in range(100)]

        class Ev:
            def __init__(self, psdu, ok=True):
                self.psdu, self.fcs_ok = psdu, ok

        assert compute_per(sent, [Ev(p) for p in sent]).per == 0.0
        assert compute_per(sent, []).per == 1.0
        r = compute_per(sent, [Ev(p) for p in sent[:95]] + [Ev(sent[99], ok=False)])
        assert r.per == pytest.approx(0.05) and r.detected == 96 and r.passed == 95

    def test_duplicates_count_once(self):
        class Ev:
            psdu, fcs_ok = b"same", True

        assert compute_per([b"same", b"other"], [Ev(), Ev()]).passed == 1

    def test_empty_sent(self):
        with pytest.raises(ValueError):
            compute_per([], [])
