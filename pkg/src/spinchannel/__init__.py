"""Correlated qubit channels with a spin-chain memory environment.

The environment is an open XY chain in a transverse field; each carrier qubit
shifts the field on its chain site when excited. Echoes between conditional
chain evolutions are computed with free fermions and assembled into channel
fidelity, purity, Choi-state entropy and related bounds.
"""
from .analysis import (
    CriticalityScan,
    DecayFit,
    DifferenceScan,
    Revival,
    analytic_large_lambda_fidelity,
    brute_force_large_lambda_fidelity,
    fidelity_difference_scan,
    gaussian_rate,
    rate_scan,
    revival_period,
)
from .channel import (
    ChoiState,
    Estimate,
    SampledSeries,
    average_output_purity,
    average_transmission_fidelity,
    capacity_rate_estimate,
    channel_entropy,
    choi_state,
    exact_fidelity,
    exact_purity,
    exact_series,
    fano_upper_bound,
    haar_pair_probability,
    haar_probability_check,
    hashing_bound,
    renyi_lower_bound,
    sampled_fidelity,
    sampled_purity,
    sampled_series,
)
from .echo import EchoEngine, echo_matrix, echo_series, loschmidt_echo
from .errors import (
    ConfigError,
    DegenerateGroundState,
    InsufficientWindow,
    NoRevivalFound,
    NumericalFailure,
    SizeLimitExceeded,
    SpinChannelError,
)
from .freefermion import GroundState, build_nambu, ground_correlations, ground_energy, propagator
from .model import BasisString, ModelParams, broken_link_preset, chain_length, perturbed_sites, qubit_site

__version__ = "0.1.0"
