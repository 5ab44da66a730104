"""Quaternary belief propagation with ordered-statistics post-processing
for stabilizer codes under depolarizing noise."""

__version__ = "0.1.0"

from .bp4 import BpConfig, DecodeOutcome, decode
from .codes import (
    CodeParseError,
    CodeValidationError,
    StabilizerCode,
    color_code_666,
    five_qubit_code,
    load_code_file,
    make_code,
    save_code_file,
    surface_code,
    toric_code,
    xzzx_code,
)
from .osd4 import OsdSolution, osd_w
from .simulator import (
    DecoderConfig,
    RunStats,
    StopRule,
    ThresholdEstimate,
    estimate_threshold,
    run_point,
    sweep,
)

__all__ = [
    "BpConfig", "DecodeOutcome", "decode",
    "CodeParseError", "CodeValidationError", "StabilizerCode", "color_code_666", "five_qubit_code",
    "load_code_file", "make_code", "save_code_file", "surface_code", "toric_code", "xzzx_code",
    "OsdSolution", "osd_w",
    "DecoderConfig", "RunStats", "StopRule", "ThresholdEstimate", "estimate_threshold", "run_point", "sweep",
]
