"""OFDM radar simulation with sub-Nyquist sampling and phase-coded waveforms.

Modules:
    params    numerology, derived metrics, code configuration
    waveform  symbol generation, phase codes, frame assembly
    channel   delay/Doppler/noise channel, time-domain synthesis
    receiver  sub-band folding and division-based unfolding
    rdproc    range-Doppler maps, peaks, ambiguity prediction, floors
    harness   config-driven experiment runner and sweeps (CLI: snsradar)
"""
from .params import (
    SPEED_OF_LIGHT,
    CodeConfig,
    RadarMetrics,
    RadarParams,
    default_params,
    derive_metrics,
    unambiguous_limits,
)
from .waveform import (
    QAM16,
    QPSK,
    PhaseCodeSet,
    assemble_pc_frame,
    assemble_sns_frame,
    code_interference_matrix,
    freq_code_block,
    gen_symbols,
    make_code_set,
    time_code,
)
from .channel import (
    SampleStream,
    Target,
    TargetScenario,
    apply_channel,
    cp_sample_count,
    delay_stream,
    noise_matrix,
    synth_time_domain,
    target_matrix,
    time_channel,
)
from .receiver import (
    FULL,
    PC_SNS,
    SNS,
    FoldedFrame,
    UnfoldedFrame,
    fold_frequency,
    fold_time,
    unfold,
)
from .rdproc import (
    Peak,
    PeakReport,
    RangeDopplerMap,
    compare_noise_floors,
    detect_peaks,
    export_map_binary,
    export_map_csv,
    load_map_binary,
    predict_ambiguities,
    range_doppler_map,
    sns_mismatch_floor_db,
    thermal_floor_db,
)
from .harness import (
    PRESETS,
    ConfigError,
    ExperimentConfig,
    ExperimentReport,
    SweepReport,
    emit_config,
    load_config,
    parse_config,
    run_experiment,
    run_sweep,
    validate_config,
)

__version__ = "0.1.0"
