"""Cycle-accurate model of a Walsh-function classical controller for qubits."""

from walshctl.walsh import (
    PaleyIndex,
    BinaryWaveform,
    SignedWaveform,
    WalshSpectrum,
    rademacher_eval,
    walsh_eval,
    sample_grid,
    transition_points,
    hamming_order,
    decompose,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "PaleyIndex",
    "BinaryWaveform",
    "SignedWaveform",
    "WalshSpectrum",
    "rademacher_eval",
    "walsh_eval",
    "sample_grid",
    "transition_points",
    "hamming_order",
    "decompose",
    "synthesize",
]
