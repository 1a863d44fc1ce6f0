import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdrcodesign.accel import (
    DEVICE_ID,
    FORWARD,
    INVERSE,
    REGISTER_MAP,
    DeviceBusyError,
    DeviceFftBackend,
    FftConfig,
    FftDevice,
    JobSizeError,
    NotConfiguredError,
    RangeError,
    ReadOnlyRegisterError,
    TransferModel,
    UnknownRegisterError,
    as_backend,
    default_schedule,
    dequantize,
    estimate_transfer_time,
    fixed_fft,
    pack_schedule,
    quantize,
    unpack_schedule,
)
from sdrcodesign.accel import registers as R
from sdrcodesign.dsp import fft


def snr_db(ref, test):
    return 10 * math.log10(np.sum(np.abs(ref) ** 2) / np.sum(np.abs(test - ref) ** 2))


def rand_complex(rng, shape, peak=0.5):
    return peak * (rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))


class TestRegisters:
    def test_readback(self):
        dev = FftDevice()
        dev.write_register(R.NFFT_LOG2, 6)
        assert dev.read_register(R.NFFT_LOG2) == 6

    @pytest.mark.parametrize("value", [2, 12, 15])
    def test_size_out_of_range(self, value):
        dev = FftDevice()
        dev.write_register(R.NFFT_LOG2, 6)
        with pytest.raises(RangeError):
            dev.write_register(R.NFFT_LOG2, value)
        assert dev.status & R.STATUS_ERROR
        assert dev.read_register(R.NFFT_LOG2) == 6

    def test_id(self):
        dev = FftDevice()
        assert dev.read_register(R.ID) == DEVICE_ID
        with pytest.raises(ReadOnlyRegisterError):
            dev.write_register(R.ID, 0)

    def test_unknown_address(self):
        with pytest.raises(UnknownRegisterError):
            FftDevice().read_register(0x40)

    def test_width_mask(self):
        dev = FftDevice()
        with pytest.raises(RangeError):
            dev.write_register(R.CTRL, 2)

    def test_cp_must_fit(self):
        dev = FftDevice()
        dev.write_register(R.NFFT_LOG2, 3)
        with pytest.raises(RangeError):
            dev.write_register(R.CP_LEN, 8)
        dev.write_register(R.CP_LEN, 7)

    def test_error_write_one_to_clear(self):
        dev = FftDevice()
        with pytest.raises(RangeError):
            dev.write_register(R.NFFT_LOG2, 1)
        dev.write_register(R.STATUS, R.STATUS_ERROR)
        assert dev.status == 0

    def test_capability_limit(self):
        dev = FftDevice(max_log2=8)
        with pytest.raises(RangeError):
            dev.write_register(R.NFFT_LOG2, 9)
        assert not dev.supports(512) and dev.supports(256)

    def test_map_is_documented(self):
        assert [r.address for r in REGISTER_MAP] == [0x00, 0x04, 0x08, 0x0C, 0x10, 0x14]
        assert all(r.reset == 0 for r in REGISTER_MAP if r.name != "ID")


class TestConfigure:
    def test_forward(self):
        dev = FftDevice()
        cfg = dev.configure(direction=FORWARD, fft_size=64)
        assert cfg == FftConfig(FORWARD, 64, 0, default_schedule(6))
        assert dev.read_register(R.NFFT_LOG2) == 6
        assert unpack_schedule(dev.read_register(R.SCALE_SCHED), 6) == (1,) * 6

    def test_inverse_with_cp(self):
        dev = FftDevice()
        dev.configure(direction=INVERSE, fft_size=64, cp_len=16)
        out = dev.submit(np.zeros((64, 2), np.int16)).output
        assert out.shape == (80, 2)

    @pytest.mark.parametrize("kwargs", [dict(fft_size=63), dict(fft_size=4096),
                                        dict(fft_size=64, cp_len=64),
                                        dict(fft_size=8, scale_sched=(1, 1))])
    def test_invalid(self, kwargs):
        with pytest.raises(JobSizeError):
            FftDevice().configure(**kwargs)

    def test_reconfigure_shrink(self):
        dev = FftDevice()
        dev.configure(fft_size=256, cp_len=100)
        assert dev.configure(fft_size=64, cp_len=16).cp_len == 16

    def test_unconfigured(self):
        with pytest.raises(NotConfiguredError):
            FftDevice().submit(np.zeros((64, 2), np.int16))


class TestBusy:
    def test_protocol(self):
        dev = FftDevice()
        dev.configure(fft_size=8)
        dev.start(np.zeros((8, 2), np.int16))
        assert dev.busy
        with pytest.raises(DeviceBusyError):
            dev.start(np.zeros((8, 2), np.int16))
        with pytest.raises(DeviceBusyError):
            dev.configure(fft_size=16)
        with pytest.raises(R.DeviceBusyError):
            dev.write_register(R.CP_LEN, 1)
        done = dev.wait()
        assert dev.status & R.STATUS_DONE and not dev.busy
        assert done.output.shape == (8, 2)

    def test_bad_buffer(self):
        dev = FftDevice()
        dev.configure(fft_size=8)
        with pytest.raises(JobSizeError):
            dev.submit(np.zeros((9, 2), np.int16))
        with pytest.raises(JobSizeError):
            dev.submit(np.full((8, 2), 40000))


class TestQuantize:
    def test_zero(self):
        q = quantize(0.0)
        assert q.tolist() == [0, 0] and dequantize(q) == 0.0

    def test_saturation(self):
        q = quantize(1.0 + 0j)
        assert q.tolist() == [32767, 0]
        assert dequantize(q) == 32767 / 32768
        assert quantize(-2.0 - 2j).tolist() == [-32768, -32768]

    def test_ties_to_even(self):
        assert quantize(np.array([0.5, 1.5, 2.5]) / 32768).tolist() == [[0, 0], [2, 0], [2, 0]]

    def test_round_trip_bound(self):
        rng = np.random.default_rng(0)
        x = rand_complex(rng, 10_000, peak=0.999)
        err = dequantize(quantize(x)) - x
        assert np.max(np.abs(err.real)) <= 2.0 ** -16
        assert np.max(np.abs(err.imag)) <= 2.0 ** -16

    def test_representable_exact(self):
        q = np.random.default_rng(1).integers(-32768, 32768, (100, 2)).astype(np.int16)
        np.testing.assert_array_equal(quantize(dequantize(q)), q)

    def test_full_scale(self):
        assert quantize(2.0, full_scale=4.0).tolist() == [16384, 0]
        with pytest.raises(ValueError):
            quantize(1.0, full_scale=0.0)

    @settings(max_examples=50)
    @given(st.lists(st.integers(0, 3), min_size=1, max_size=11))
    def test_schedule_pack(self, shifts):
        assert unpack_schedule(pack_schedule(shifts), len(shifts)) == tuple(shifts)


class TestDatapath:
    def test_impulse_flat(self):
        q = np.zeros((64, 2), np.int16)
        q[0, 0] = 32767
        out, ovf = fixed_fft(q)
        assert not ovf
        assert np.ptp(out[:, 0]) <= 1 and np.all(np.abs(out[:, 1]) <= 1)
        assert abs(int(out[0, 0]) - 32767 / 64) <= 1

    def test_forced_overflow(self):
        dev = FftDevice()
        dev.configure(fft_size=64, scale_sched=(0,) * 6)
        done = dev.submit(np.full((64, 2), 32767, np.int16))
        assert done.overflow and dev.status & R.STATUS_OVERFLOW
        assert done.output.max() == 32767

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_float_fft(self, seed):
        rng = np.random.default_rng(seed)
        x = rand_complex(rng, 64)
        out, ovf = fixed_fft(quantize(x))
        assert not ovf
        assert snr_db(fft(64, x) / 64, dequantize(out)) >= 60

    def test_inverse_direction(self):
        rng = np.random.default_rng(9)
        x = rand_complex(rng, 32)
        out, _ = fixed_fft(quantize(x), inverse=True)
        ref = np.fft.ifft(x)
        assert snr_db(ref, dequantize(out)) >= 55

    def test_cp_semantics(self):
        rng = np.random.default_rng(2)
        dev = FftDevice()
        dev.configure(direction=INVERSE, fft_size=64, cp_len=16)
        out = dev.submit(quantize(rand_complex(rng, (3, 64)))).output
        np.testing.assert_array_equal(out[:, :16], out[:, -16:])

    def test_forward_strips_cp(self):
        rng = np.random.default_rng(3)
        body = quantize(rand_complex(rng, 64))
        junk = quantize(rand_complex(rng, 16))
        dev = FftDevice()
        dev.configure(fft_size=64, cp_len=16)
        with_cp = dev.submit(np.concatenate([junk, body])).output
        np.testing.assert_array_equal(with_cp, fixed_fft(body)[0])


class TestTransferModel:
    def test_peak_rate(self):
        assert estimate_transfer_time(TransferModel(), 1.2e9) == 1.0
        assert estimate_transfer_time(TransferModel(), 0) == 0.0

    def test_one_job(self):
        assert estimate_transfer_time(TransferModel(), 512) == pytest.approx(4.2667e-7, rel=1e-4)
        dev = FftDevice()
        dev.configure(fft_size=64)
        done = dev.submit(np.zeros((64, 2), np.int16))
        assert done.bytes_in + done.bytes_out == 512
        assert done.modeled_time == pytest.approx(512 / 1.2e9 + 64 * 6 / 150e6)

    def test_setup_latency(self):
        m = TransferModel(setup_s=2e-6)
        assert estimate_transfer_time(m, 0) == 2e-6

    @settings(max_examples=100)
    @given(st.integers(0, 10**12), st.integers(0, 10**12), st.floats(0, 1e-3))
    def test_monotone_lower_bound(self, a, b, setup):
        m = TransferModel(setup_s=setup)
        lo, hi = sorted((a, b))
        assert estimate_transfer_time(m, lo) <= estimate_transfer_time(m, hi)
        assert estimate_transfer_time(m, hi) >= hi / 1.2e9

    def test_negative(self):
        with pytest.raises(ValueError):
            estimate_transfer_time(TransferModel(), -1)


class TestBackend:
    def test_capability(self):
        be = as_backend()
        assert be.supports(64) and not be.supports(63)
        assert 64 in be.device.capabilities["sizes"]

    @pytest.mark.parametrize("n", [8, 64, 256])
    def test_forward_snr(self, n):
        rng = np.random.default_rng(n)
        x = rng.standard_normal((20, n)) + 1j * rng.standard_normal((20, n))
        y = DeviceFftBackend().transform(x)
        assert snr_db(fft(n, x), y) >= 60 - 3 * (math.log2(n) - 6)

    def test_inverse_matches_convention(self):
        rng = np.random.default_rng(4)
        x = rand_complex(rng, (4, 64))
        y = DeviceFftBackend().transform(x, inverse=True)
        assert snr_db(np.fft.ifft(x, axis=1), y) >= 55

    def test_costs_reported(self):
        be = DeviceFftBackend()
        be.transform(np.ones((10, 64), np.complex64))
        modeled, emulated = be.last_cost
        assert modeled == pytest.approx(10 * 512 / 1.2e9 + 10 * 384 / 150e6)
        assert emulated > 0 and be.calls == 1

    def test_configuration_cached(self):
        be = DeviceFftBackend()
        be.transform(np.ones((2, 64)))
        epoch = be.device.config_epoch
        be.transform(np.ones((2, 64)))
        assert be.device.config_epoch == epoch
        be.transform(np.ones((2, 32)))
        assert be.device.config_epoch > epoch

    def test_foreign_reconfiguration_noticed(self):
        be = DeviceFftBackend()
        x = np.random.default_rng(5).standard_normal(64) + 0j
        ref = be.transform(x)
        be.device.configure(direction=INVERSE, fft_size=64)
        np.testing.assert_array_equal(be.transform(x), ref)

    def test_unsupported(self):
        with pytest.raises(ValueError):
            DeviceFftBackend().transform(np.ones(63))

    def test_zero_vector(self):
        np.testing.assert_array_equal(DeviceFftBackend().transform(np.zeros(16)), 0)
