"""Entanglement telegraph at desk scale.

Models the two-pipe entangled-pair device whose sender toggles which-path
detectors and whose receiver watches an interference screen, reproduces the
claimed faster-than-light telegraph under a naive collapse model, refutes it
under unitary quantum mechanics with exact no-signaling checks, and computes
the two-telegraph signal-to-the-past loop geometry with its inconsistent
automaton.
"""

from .device import (
    DeviceConfig,
    EraserConditionals,
    ScreenDistribution,
    build_joint_state,
    coherent_distribution,
    eraser_conditionals,
    incoherent_distribution,
    pipe_amplitude,
    write_distributions_csv,
)
from .nosignal import (
    NoSignalReport,
    channel_mutual_information,
    eraser_decomposition_check,
    jensen_shannon_bits,
    plugin_mutual_information,
    total_variation,
    verify_no_signaling,
)
from .protocol import (
    DecisionResult,
    Detector,
    EnsembleSchedule,
    HitRecord,
    INTERFERENCE,
    ModelMode,
    NO_INTERFERENCE,
    SampleSizeResult,
    TransmissionPlan,
    TransmissionResult,
    decide_bit,
    ensemble_schedule,
    log_likelihood_ratio,
    required_sample_size,
    sample_hits,
    screen_marginal,
    throughput_check,
    transmit_message,
)
from .quantum import (
    DensityMatrix,
    MeasurementBasis,
    QuantumStateError,
    StateVector,
    born_measure,
    born_probabilities,
    density_from_state,
    normalize,
    partial_trace,
    trace_distance,
    which_subsystem_basis,
)
from .relativity import (
    AutomatonRule,
    Event,
    FrameVelocity,
    IDENTITY_RULE,
    NEGATION_RULE,
    ParadoxTrace,
    PrivilegedFrame,
    StateDependentFrames,
    automaton_fixed_points,
    boost,
    build_paradox,
    interval,
    signal_reception,
)
from .rng import stream

__version__ = "0.1.0"

__all__ = [
    "AutomatonRule",
    "DecisionResult",
    "DensityMatrix",
    "Detector",
    "DeviceConfig",
    "EnsembleSchedule",
    "EraserConditionals",
    "Event",
    "FrameVelocity",
    "HitRecord",
    "IDENTITY_RULE",
    "INTERFERENCE",
    "MeasurementBasis",
    "ModelMode",
    "NEGATION_RULE",
    "NO_INTERFERENCE",
    "NoSignalReport",
    "ParadoxTrace",
    "PrivilegedFrame",
    "QuantumStateError",
    "SampleSizeResult",
    "ScreenDistribution",
    "StateDependentFrames",
    "StateVector",
    "TransmissionPlan",
    "TransmissionResult",
    "automaton_fixed_points",
    "boost",
    "born_measure",
    "born_probabilities",
    "build_joint_state",
    "build_paradox",
    "channel_mutual_information",
    "coherent_distribution",
    "decide_bit",
    "density_from_state",
    "ensemble_schedule",
    "eraser_conditionals",
    "eraser_decomposition_check",
    "incoherent_distribution",
    "interval",
    "jensen_shannon_bits",
    "log_likelihood_ratio",
    "normalize",
    "partial_trace",
    "pipe_amplitude",
    "plugin_mutual_information",
    "required_sample_size",
    "sample_hits",
    "screen_marginal",
    "signal_reception",
    "stream",
    "throughput_check",
    "total_variation",
    "trace_distance",
    "transmit_message",
    "verify_no_signaling",
    "which_subsystem_basis",
    "write_distributions_csv",
]
