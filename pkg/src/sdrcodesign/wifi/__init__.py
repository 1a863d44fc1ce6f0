"""802.11p OFDM physical layer: reference transmitter, receiver chain and PER harness."""

from .channel import apply_channel
from .coding import (
    append_fcs,
    bits_to_bytes,
    bytes_to_bits,
    check_fcs,
    conv_encode,
    crc32,
    deinterleave,
    depuncture,
    descramble,
    interleave,
    puncture,
    scramble,
    scrambler_sequence,
    viterbi_decode,
)
from .decode import decode_data, decode_signal
from .equalizer import ChannelEstimate, equalize, equalize_block, estimate_channel
from .frame import FrameError, FrameEvent, SignalError, SignalField, n_data_symbols, parse_signal, signal_field
from .modulation import demap, hard_decision, map_bits
from .params import DEFAULT_PARAMS, MCS_TABLE, Mcs, OfdmParams, mcs
from .per import PerResult, build_capture, compute_per, measure_per, per_sweep, random_psdus
from .rx import Receiver, receive
from .sync import (
    Alignment,
    AlignmentError,
    FrameDetector,
    Trigger,
    align_symbols,
    autocorr_ratio,
    correct_cfo,
    detect_frame,
)
from .tx import encode_frame

__all__ = [
    "DEFAULT_PARAMS", "MCS_TABLE", "Alignment", "AlignmentError", "ChannelEstimate",
    "FrameDetector", "FrameError", "FrameEvent", "Mcs", "OfdmParams", "PerResult", "Receiver",
    "SignalError", "SignalField", "Trigger", "align_symbols", "append_fcs", "apply_channel",
    "autocorr_ratio", "bits_to_bytes", "build_capture", "bytes_to_bits", "check_fcs",
    "compute_per", "conv_encode", "correct_cfo", "crc32", "decode_data", "decode_signal",
    "deinterleave", "demap", "depuncture", "descramble", "detect_frame", "encode_frame",
    "equalize", "equalize_block", "estimate_channel", "hard_decision", "interleave", "map_bits",
    "mcs", "measure_per", "n_data_symbols", "parse_signal", "per_sweep", "puncture",
    "random_psdus", "receive", "scramble", "scrambler_sequence", "signal_field", "viterbi_decode",
]
