"""Continuous wavelet vocoder: analysis, wavelet decomposition and synthesis."""

from ._core import (
    AlignmentFailure,
    Error,
    FilterInstability,
    FormatError,
    InvalidArgument,
    TrainingFailure,
    analyze,
    copysyn,
    cwt_forward,
    cwt_inverse,
    f0_rmse,
    mcd,
    mexican_hat,
    read_features,
    read_wav,
    synthesize,
    write_features,
    write_wav,
)

__all__ = [
    "AlignmentFailure",
    "Error",
    "FilterInstability",
    "FormatError",
    "InvalidArgument",
    "TrainingFailure",
    "analyze",
    "copysyn",
    "cwt_forward",
    "cwt_inverse",
    "f0_rmse",
    "mcd",
    "mexican_hat",
    "read_features",
    "read_wav",
    "synthesize",
    "write_features",
    "write_wav",
]
