"""Higher-order synchronization in thermally coupled VO2 relaxation oscillators."""
__version__ = "0.1.0"

from .model import (
    Integrator, NetworkConfig, NetworkState, NoiseMode, OscillatorSpec, SwitchParams, SwitchState,
    TraceBundle, analytic_period, effective_threshold, sample_noise, simulate, step,
    STRONG_SWITCH_1, STRONG_SWITCH_2, WEAK_SWITCH_1, WEAK_SWITCH_2,
)
from .metrics import (
    AnalyzerConfig, SyncEstimate, Verdict, capacity, detect_epochs, estimate_sync,
    extract_spikes, mean_frequency, reduce_fraction,
)
from .sweep import SweepConfig, SweepMap, SweepSummary, scan_parameter, staircase_cut, summarize, sweep2d
from .chain import ChainConfig, ChainReport, chain_report, chain_sweep, predict_end_to_end, simulate_chain
from .logic import compose_shr, logic_rule_decimal, logic_rule_sync, logic_rule_threshold
