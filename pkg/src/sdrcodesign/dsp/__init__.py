"""Signal-processing blocks and the reference floating-point FFT."""

from .blocks import (
    ComplexToReal,
    CosineSource,
    FloatToInt,
    GaussianNoiseAdder,
    IntToFloat,
    NullSink,
    StreamToVector,
    Throttle,
    VectorSink,
    VectorSource,
    VectorToStream,
    float_to_int,
    int_to_float,
)
from .fft import FORWARD, INVERSE, FftPlan, SoftwareFftBackend, fft, ifft, plan
from .filters import FirFilter, FirTaps, design_lowpass, fir_reference
from .rng import GaussianStream
from .spectrum import SpectrumSink

__all__ = [
    "FORWARD", "INVERSE", "ComplexToReal", "CosineSource", "FftPlan", "FirFilter", "FirTaps",
    "FloatToInt", "GaussianNoiseAdder", "GaussianStream", "IntToFloat", "NullSink",
    "SoftwareFftBackend", "SpectrumSink", "StreamToVector", "Throttle", "VectorSink", "VectorSource",
    "VectorToStream", "design_lowpass", "fft", "fir_reference", "float_to_int", "ifft",
    "int_to_float", "plan",
]
