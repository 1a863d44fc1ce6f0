"""``sdrcd`` command line: waveform generation, receive, PER, FIR demo and FFT benchmark.

Exit codes: 0 the command ran to completion, 1 usage error, 2 I/O or
format error.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
import time
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from ..accel import DeviceFftBackend, TransferModel
from ..dsp import (
    ComplexToReal,
    CosineSource,
    FirFilter,
    FloatToInt,
    GaussianNoiseAdder,
    IntToFloat,
    SoftwareFftBackend,
    SpectrumSink,
    Throttle,
    design_lowpass,
)
from ..dsp.fft import is_pow2
from ..profiler import compare, export, profile
from ..runtime import INT32, REAL32, FlowGraph, Termination
from ..wifi import (
    DEFAULT_PARAMS,
    apply_channel,
    build_capture,
    compute_per,
    mcs,
    random_psdus,
)
from ..wifi.frame import MAX_PSDU
from ..wifi.rx import Receiver
from .formats import (
    FormatError,
    read_events,
    read_iq,
    read_manifest,
    write_events,
    write_iq,
    write_manifest,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_backend(name: str, setup_us: float = 0.0):
    if name == "software":
        return SoftwareFftBackend()
    if name == "device":
        return DeviceFftBackend(model=TransferModel(setup_s=setup_us * 1e-6))
    raise UsageError(f"unknown backend {name!r}")


def _seed(value) -> int:
    return secrets.randbits(31) if value is None else int(value)


# ------------------------------------------------------------------- tx / rx


def cmd_tx(args) -> int:
    try:
        m = mcs(args.mcs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.count < 0:
        raise UsageError("--count must be >= 0")
    seed = _seed(args.seed)
    if args.psdu_file:
        psdus = read_manifest(args.psdu_file)
        if args.count:
            psdus = psdus[:args.count]
    else:
        if not 1 <= args.length <= MAX_PSDU:
            raise UsageError(f"--length must lie in 1..{MAX_PSDU}")
        psdus = random_psdus(args.count, args.length, seed)
    if any(not 1 <= len(p) <= MAX_PSDU for p in psdus):
        raise UsageError(f"PSDU lengths must lie in 1..{MAX_PSDU}")
    fs = args.sample_rate
    params = DEFAULT_PARAMS if fs == DEFAULT_PARAMS.sample_rate else type(DEFAULT_PARAMS)(sample_rate=fs)
    if psdus:
        samples, _ = build_capture(psdus, m, args.gap, params, seed)
        samples = apply_channel(samples, cfo=args.cfo_hz, snr_db=args.snr_db, seed=seed + 1,
                                sample_rate=fs)
    else:
        samples = np.zeros(0, np.complex64)
    manifest = args.manifest or f"{args.out}.manifest"
    try:
        write_iq(args.out, samples, fs, description=f"{len(psdus)} frames {m.name}",
                 seed=seed, mcs=m.name, count=len(psdus), snr_db=_json_float(args.snr_db),
                 cfo_hz=args.cfo_hz)
        write_manifest(manifest, psdus)
    except OSError as exc:
        raise FormatError(f"cannot write output: {exc}") from None
    print(f"wrote {len(psdus)} frames ({len(samples)} samples) to {args.out}; "
          f"manifest {manifest}; seed {seed}")
    return EXIT_OK


def _json_float(x: float):
    return x if np.isfinite(x) else None


def cmd_rx(args) -> int:
    samples, meta = read_iq(args.input)
    fs = float(meta.get("sample_rate_hz", args.sample_rate))
    params = DEFAULT_PARAMS if fs == DEFAULT_PARAMS.sample_rate else type(DEFAULT_PARAMS)(sample_rate=fs)
    rx = Receiver(samples, params, make_backend(args.backend, args.setup_us),
                  threshold=args.threshold, profiling=args.profile is not None, fused=args.fused)
    events = rx.run(chunk=args.chunk, workers=args.workers)
    for e in events:
        print(f"{e.start} {e.mcs.name} {len(e.psdu)} {'ok' if e.fcs_ok else 'bad'} {e.psdu.hex()}")
    try:
        if args.events:
            write_events(args.events, events)
        if args.profile:
            with open(args.profile, "wb") as fh:
                fh.write(export(profile(rx.report), "json"))
    except OSError as exc:
        raise FormatError(f"cannot write output: {exc}") from None
    print(f"{len(events)} frames, {sum(e.fcs_ok for e in events)} with good FCS", file=sys.stderr)
    return EXIT_OK


def cmd_per(args) -> int:
    sent = read_manifest(args.manifest)
    events = [SimpleNamespace(**d) for d in read_events(args.events)]
    if not sent:
        raise UsageError("manifest is empty")
    r = compute_per(sent, events)
    print(json.dumps({"sent": r.sent, "detected": r.detected, "passed": r.passed, "per": r.per}))
    return EXIT_OK


def cmd_compare(args) -> int:
    """Receive one capture with both backends and report the per-stage differences."""
    samples, meta = read_iq(args.input)
    fs = float(meta.get("sample_rate_hz", args.sample_rate))
    params = DEFAULT_PARAMS if fs == DEFAULT_PARAMS.sample_rate else type(DEFAULT_PARAMS)(sample_rate=fs)
    runs = []
    for name in ("software", "device"):
        rx = Receiver(samples, params, make_backend(name, args.setup_us), threshold=args.threshold,
                      fused=args.fused)
        runs.append((rx.run(chunk=args.chunk), rx))
    (ea, ra), (eb, rb) = runs
    same = [(e.start, e.psdu, e.fcs_ok) for e in ea] == [(e.start, e.psdu, e.fcs_ok) for e in eb]
    report = compare(profile(ra.report), profile(rb.report))
    stage = "fft_equalizer" if args.fused else "fft"
    fft = report.block(stage)
    fft_m = report.block(stage, "modeled_ns")
    print(f"events identical: {same}")
    print(f"fft stage host cycles: {fft.a} -> {fft.b} ({fft.delta_pct:+.1f}%)"
          if fft.delta_pct is not None else f"fft stage host cycles: {fft.a} -> {fft.b}")
    print(f"fft stage modeled device time: {fft_m.b / 1e3:.1f} us")
    if args.out:
        try:
            with open(args.out, "wb") as fh:
                fh.write(export(report, args.format))
        except OSError as exc:
            raise FormatError(f"cannot write output: {exc}") from None
    return EXIT_OK


# -------------------------------------------------------------------- FIR demo


@dataclass
class FirDemoResult:
    sink: SpectrumSink
    graph: FlowGraph
    report: object

    @property
    def peak_bin(self) -> int:
        return int(np.argmax(self.sink.power()))

    @property
    def peak_frequency(self) -> float:
        return float(self.sink.frequencies()[self.peak_bin])

    def power_db_at(self, frequency: float, width: int = 1) -> float:
        """Largest bin power (dB) within ``width`` bins of ``frequency``."""
        k = int(round(frequency * self.sink.fft_size / self.sink.sample_rate))
        db = self.sink.spectrum_db()
        lo, hi = max(k - width, 0), min(k + width + 1, len(db))
        return float(db[lo:hi].max())

    def csv(self) -> str:
        return self.sink.to_csv()


def demo_fir(frequency: float, sample_rate: float = 32e3, amplitude: float = 0.5,
             noise_stddev: float = 0.01, cutoff: float = 2e3, transition: float | None = None,
             backend="software", duration: float = 1.0, fft_size: int = 1024, seed: int = 0,
             realtime: bool = False, frac_bits: int = 15, chunk: int | None = None) -> FirDemoResult:
    """Tone plus noise through a fixed-point low-pass FIR into an averaged spectrum.

    Chain: cosine, Gaussian noise, throttle, complex to real, float to int
    (Q``frac_bits``), int32 FIR, int to float, spectrum sink.
    """
    transition = cutoff / 2 if transition is None else transition
    if duration <= 0:
        raise ValueError("duration must be positive")
    if not is_pow2(fft_size) or fft_size < 8:
        raise ValueError("fft_size must be a power of two >= 8")
    be = make_backend(backend) if isinstance(backend, str) else backend
    scale = float(1 << frac_bits)
    g = FlowGraph("fir_demo")
    src = CosineSource(frequency, sample_rate, amplitude)
    noise = GaussianNoiseAdder(seed, noise_stddev)
    thr = Throttle(sample_rate if realtime else None, unbounded=not realtime)
    c2r = ComplexToReal()
    f2i = FloatToInt(scale)
    fir = FirFilter(design_lowpass(cutoff, transition, sample_rate), INT32, name="fir_filter",
                    frac_bits=frac_bits)
    i2f = IntToFloat(scale)
    sink = SpectrumSink(fft_size, REAL32, be, sample_rate, name="fft_sink")
    g.chain(src, noise, thr, c2r, f2i, fir, i2f, sink)
    report = g.run(Termination.items(int(round(duration * sample_rate))), chunk=chunk)
    return FirDemoResult(sink, g, report)


def cmd_demo_fir(args) -> int:
    seed = _seed(args.seed)
    try:
        res = demo_fir(args.frequency, args.sample_rate, args.amplitude, args.noise_stddev,
                       args.cutoff, args.transition, make_backend(args.backend, args.setup_us),
                       args.duration, args.fft_size, seed, args.realtime)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        with open(args.out, "w") as fh:
            fh.write(res.csv())
        if args.profile:
            doc = json.loads(export(profile(res.report), "json"))
            doc["seed"] = seed
            with open(args.profile, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
    except OSError as exc:
        raise FormatError(f"cannot write output: {exc}") from None
    print(f"peak {res.peak_frequency:.1f} Hz at {res.power_db_at(res.peak_frequency):.2f} dB; "
          f"tone bin {res.power_db_at(args.frequency):.2f} dB; seed {seed}; spectrum {args.out}")
    return EXIT_OK


# ------------------------------------------------------------------ FFT bench


def dft_reference(x) -> np.ndarray:
    """Direct O(N^2) DFT over the last axis."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    k = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return x @ w.T


def bench_fft(sizes, iterations: int = 100, backends=("software", "device"), seed: int = 0,
              batch: int = 1, setup_us: float = 0.0) -> list:
    """Mean host time, modeled device time and max error vs the DFT per size and backend."""
    rows = []
    rng = np.random.default_rng(seed)
    for n in sizes:
        n = int(n)
        if not is_pow2(n) or n < 8 or n > 2048:
            raise UsageError(f"unsupported FFT size {n}")
        x = 0.5 * (rng.uniform(-1, 1, (batch, n)) + 1j * rng.uniform(-1, 1, (batch, n)))
        ref = dft_reference(x)
        for name in backends:
            be = make_backend(name, setup_us)
            y = be.transform(x)
            err = float(np.max(np.abs(y - ref)))
            modeled = 0.0
            t0 = time.perf_counter()
            for _ in range(iterations):
                be.transform(x)
                cost = getattr(be, "last_cost", None)
                if cost is not None:
                    modeled += cost[0]
            host = time.perf_counter() - t0
            rows.append({
                "size": n, "backend": name, "batch": batch,
                "mean_us": 1e6 * host / iterations,
                "modeled_us": 1e6 * modeled / iterations,
                "max_error": err,
            })
    return rows


def cmd_bench_fft(args) -> int:
    rows = bench_fft(args.sizes, args.iterations, args.backends, _seed(args.seed), args.batch,
                     args.setup_us)
    lines = ["size,backend,batch,mean_us,modeled_us,max_error"]
    for r in rows:
        lines.append(f"{r['size']},{r['backend']},{r['batch']},{r['mean_us']:.3f},"
                     f"{r['modeled_us']:.3f},{r['max_error']:.3e}")
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise FormatError(f"cannot write output: {exc}") from None
    sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sdrcd", description="802.11p receiver, FFT accelerator model and profiler")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def backend_opts(sp):
        sp.add_argument("--backend", choices=("software", "device"), default="software")
        sp.add_argument("--setup-us", type=float, default=0.0,
                        help="per-job DMA setup latency of the device model")

    tx = sub.add_parser("tx", help="encode frames into an IQ file")
    tx.add_argument("--mcs", default="BPSK-1/2")
    tx.add_argument("--count", type=int, default=10)
    tx.add_argument("--length", type=int, default=100, help="PSDU bytes for random frames")
    tx.add_argument("--psdu-file", help="manifest of PSDUs to send instead of random ones")
    tx.add_argument("--snr-db", type=float, default=float("inf"))
    tx.add_argument("--cfo-hz", type=float, default=0.0)
    tx.add_argument("--gap", type=int, default=400, help="zero samples between frames")
    tx.add_argument("--seed", type=int)
    tx.add_argument("--sample-rate", type=float, default=DEFAULT_PARAMS.sample_rate)
    tx.add_argument("--out", required=True)
    tx.add_argument("--manifest")
    tx.set_defaults(func=cmd_tx)

    rx = sub.add_parser("rx", help="decode frames from an IQ file")
    rx.add_argument("input")
    backend_opts(rx)
    rx.add_argument("--threshold", type=float, default=0.56)
    rx.add_argument("--sample-rate", type=float, default=DEFAULT_PARAMS.sample_rate)
    rx.add_argument("--chunk", type=int)
    rx.add_argument("--workers", type=int, default=1)
    rx.add_argument("--fused", action="store_true", help="run FFT and equalizer as one stage")
    rx.add_argument("--events", help="write events as JSON lines")
    rx.add_argument("--profile", help="write the profiler report (JSON)")
    rx.set_defaults(func=cmd_rx)

    per = sub.add_parser("per", help="packet error rate from a manifest and an event log")
    per.add_argument("--manifest", required=True)
    per.add_argument("--events", required=True)
    per.set_defaults(func=cmd_per)

    cmp_ = sub.add_parser("compare", help="A/B the software and device FFT backends on a capture")
    cmp_.add_argument("input")
    cmp_.add_argument("--setup-us", type=float, default=0.0)
    cmp_.add_argument("--threshold", type=float, default=0.56)
    cmp_.add_argument("--sample-rate", type=float, default=DEFAULT_PARAMS.sample_rate)
    cmp_.add_argument("--chunk", type=int)
    cmp_.add_argument("--fused", action="store_true", help="run FFT and equalizer as one stage")
    cmp_.add_argument("--out")
    cmp_.add_argument("--format", choices=("json", "csv"), default="json")
    cmp_.set_defaults(func=cmd_compare)

    fir = sub.add_parser("demo-fir", help="tone through a fixed-point FIR into a spectrum CSV")
    fir.add_argument("--frequency", type=float, default=1e3)
    fir.add_argument("--sample-rate", type=float, default=32e3)
    fir.add_argument("--amplitude", type=float, default=0.5)
    fir.add_argument("--noise-stddev", type=float, default=0.01)
    fir.add_argument("--cutoff", type=float, default=2e3)
    fir.add_argument("--transition", type=float)
    fir.add_argument("--duration", type=float, default=1.0, help="seconds of signal")
    fir.add_argument("--fft-size", type=int, default=1024)
    fir.add_argument("--realtime", action="store_true", help="throttle to the sample rate")
    fir.add_argument("--seed", type=int)
    fir.add_argument("--out", required=True)
    fir.add_argument("--profile")
    backend_opts(fir)
    fir.set_defaults(func=cmd_demo_fir)

    bench = sub.add_parser("bench-fft", help="compare FFT backends")
    bench.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024])
    bench.add_argument("--iterations", type=int, default=100)
    bench.add_argument("--batch", type=int, default=1, help="vectors per transform call")
    bench.add_argument("--backends", nargs="+", choices=("software", "device"),
                       default=["software", "device"])
    bench.add_argument("--setup-us", type=float, default=0.0)
    bench.add_argument("--seed", type=int)
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_bench_fft)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sdrcd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"sdrcd: {exc}", file=sys.stderr)
        return EXIT_IO
