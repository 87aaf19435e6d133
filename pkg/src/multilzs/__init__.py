"""Landau-Zener-Stueckelberg interference in a qubit coupled to N two-level systems."""
from .model import (
    NotTraversedError,
    PathDescriptor,
    PatternGrid,
    SystemSpec,
    TrianglePulse,
    crossing_times,
    drive_value,
    mhz_to_rad_per_ns,
    path_energy,
    adiabatic_phase_rates,
    path_phases,
)
from .impulse import (
    PHASE_MODELS,
    LzGateParams,
    cascade_evolve,
    lz_gate,
    lz_probability,
    path_amplitudes,
    pattern_sweep,
    return_probability,
    stokes_phase,
    two_tls_probability,
)

from .schrodinger import (
    NormDriftError,
    StepSizeError,
    build_hamiltonian,
    pattern_sweep_numeric,
    propagate,
    single_passage_check,
)
from .spectral import FtMap, extract_ridges, ft_map, predict_arcs
from .darkstate import DarkSystem, build_hd, dark_state, spectrum_vs_detuning
from .analysis import masked_correlation
from .config import ConfigError, RunConfig, load_config, parse_config

__version__ = "0.1.0"
