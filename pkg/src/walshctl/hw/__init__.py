"""Cycle-accurate model of the controller output stage."""

from walshctl.hw.config import (
    ClockModel,
    Mode,
    ModulationConfig,
    SynthConfig,
    TimingConfig,
)
from walshctl.hw.generators import (
    RademacherGenerator,
    generator_stream,
    walsh_generator_comb,
    walsh_generator_word,
)
from walshctl.hw.modulation import ModulationGenerator, modulation_generator_run
from walshctl.hw.pipeline import CycleLedger, PipelineRun, run_pipeline
from walshctl.hw.sequencer import TimingSequencer, TriggerEvent, timing_sequencer_run
from walshctl.hw.synth import FilterSynthesizer, SumWeights, dds_lookup, qam_multiply, sum_weights

__all__ = [
    "ClockModel",
    "CycleLedger",
    "FilterSynthesizer",
    "Mode",
    "ModulationConfig",
    "ModulationGenerator",
    "PipelineRun",
    "RademacherGenerator",
    "SumWeights",
    "SynthConfig",
    "TimingConfig",
    "TimingSequencer",
    "TriggerEvent",
    "dds_lookup",
    "generator_stream",
    "modulation_generator_run",
    "qam_multiply",
    "run_pipeline",
    "sum_weights",
    "timing_sequencer_run",
    "walsh_generator_comb",
    "walsh_generator_word",
]
