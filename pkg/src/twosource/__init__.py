"""Quantum limits and a near-optimal protocol for telling one faint source from two."""

from .asymptotics import (
    ChernoffReport,
    asymptotic_error,
    chernoff_analytic,
    chernoff_numeric,
    s_overlap,
)
from .discrimination import (
    BoundReport,
    MinimalMReport,
    advantage_sweep,
    certify_forbidden_asymmetric,
    certify_no_forbidden_symmetric,
    direct_guess,
    forbidden_threshold_asymmetric,
    helstrom_m_shot,
    helstrom_one_shot,
    minimal_m,
    trace_norm_symmetric,
)
from .model import (
    HypothesisPair,
    ScenarioKind,
    ScenarioParams,
    build_states,
    overlap_delta,
    overlap_tau,
    psf_overlap_oracle,
)
from .simulate import SimConfig, SimReport, run_experiment
from .sliver import (
    ModeProbabilities,
    ProtocolReport,
    decide,
    mode_probabilities,
    protocol_error,
    saturation,
    semiclassical_oracle,
    sliver_exponent,
)

__version__ = "0.1.0"
