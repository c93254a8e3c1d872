"""Entanglement concentration by phonon counting on a three-mode ladder state.

The package splits along the physics: `model` holds the closed-form
scalars (occupations, pair distribution, pre-measurement value),
`negativity` the partial-transpose block engine, `channels` the
detector channels (perfect, finite-efficiency, threshold on/off),
`perturbation` the small-inefficiency expansion, and `cli` the sweep
front end.
"""
from .channels import (
    DetectorEfficiency,
    MeasurementRecord,
    imperfect_entanglement_numeric,
    imperfect_outcome_prob,
    imperfect_post_state,
    off_entanglement,
    on_entanglement,
    on_post_state,
    perfect_entanglement,
    perfect_entanglement_gaussian,
    perfect_post_state,
    traced_two_mode_state,
)
from .model import (
    DEFAULT_POLICY,
    Cooperativities,
    EntanglementValue,
    GaussianMoments,
    InputError,
    ModeOccupations,
    NumericalError,
    PairDistribution,
    StabilityError,
    TruncationPolicy,
    gaussian_moments,
    occupations,
    pair_coeff,
    phonon_prob,
    pre_measurement_entanglement,
    pre_measurement_instability_limit,
    three_mode_amplitude,
)
from .negativity import (
    PtBlock,
    TwoModeLadderMixture,
    TwoModeLadderPure,
    block_eigenvalues,
    build_pt_blocks,
    log_negativity,
    schmidt_log_negativity,
)
from .perturbation import (
    EtaWeights,
    OmegaFactor,
    eta_weights,
    expansion_parameter,
    first_order_entanglement,
    g_coupling,
    omega_factor,
    second_order_entanglement,
)

__version__ = "0.1.0"

__all__ = [
    "Cooperativities",
    "DEFAULT_POLICY",
    "DetectorEfficiency",
    "EntanglementValue",
    "EtaWeights",
    "GaussianMoments",
    "InputError",
    "MeasurementRecord",
    "ModeOccupations",
    "NumericalError",
    "OmegaFactor",
    "PairDistribution",
    "PtBlock",
    "StabilityError",
    "TruncationPolicy",
    "TwoModeLadderMixture",
    "TwoModeLadderPure",
    "block_eigenvalues",
    "build_pt_blocks",
    "eta_weights",
    "expansion_parameter",
    "first_order_entanglement",
    "g_coupling",
    "gaussian_moments",
    "imperfect_entanglement_numeric",
    "imperfect_outcome_prob",
    "imperfect_post_state",
    "log_negativity",
    "occupations",
    "off_entanglement",
    "omega_factor",
    "on_entanglement",
    "on_post_state",
    "pair_coeff",
    "perfect_entanglement",
    "perfect_entanglement_gaussian",
    "perfect_post_state",
    "phonon_prob",
    "pre_measurement_entanglement",
    "pre_measurement_instability_limit",
    "schmidt_log_negativity",
    "second_order_entanglement",
    "three_mode_amplitude",
    "traced_two_mode_state",
    "__version__",
]
