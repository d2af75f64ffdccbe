"""symflow: symbolic dynamics, thermodynamic formalism, and suspension flows.

Finite-alphabet subshifts with locally constant observables, spectral
pressure and equilibrium measures, conditional Birkhoff spectra in one and
two dimensions, suspension-flow entropy and spectra, constructive witness
measures, multi-horseshoe certificates, and a geometric Lorenz return-map
simulator.  The ``symflow`` console script exposes the batch interface.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import DomainError, InputError, SymflowError
from .sft import (
    Sft,
    LocallyConstantFunction,
    admissible_words,
    block_recode,
    perron_root,
    topological_entropy,
    validate_and_trim,
    is_irreducible,
)
from .measures import (
    InvariantMeasure,
    MarkovComponent,
    d_star,
    periodic_orbit_measure,
    random_markov_component,
    stationary,
    support_is_full,
)
from .thermo import PressureResult, pressure, verify_equilibrium
from .suspension import (
    SuspensionSystem,
    abramov_entropy,
    d_star_flow,
    flow_integral,
    flow_mixture_weights,
    flow_top_entropy,
)
from .spectrum import (
    BirkhoffRange,
    FlowRatioRange,
    RotationSet,
    SpectrumResult,
    birkhoff_range,
    conditional_entropy_spectrum,
    conditional_entropy_spectrum_2d,
    flow_conditional_spectrum,
    flow_ratio_range,
    rotation_set_2d,
)
from .witness import (
    birkhoff_witness_2d,
    intermediate_witness,
    low_entropy_mean_witness,
    orthant_combination,
)
from .horseshoe import (
    HorseshoePack,
    WordProcessMeasure,
    build_multi_horseshoe,
    certify_pack,
    lift_pack_to_flow,
)
from .lorenz import (
    EmpiricalStatistics,
    LorenzModel,
    Trajectory,
    empirical_statistics,
    simulate_return_map,
    validate_lorenz,
)

__all__ = [
    "__version__",
    "SymflowError",
    "InputError",
    "DomainError",
    "Sft",
    "LocallyConstantFunction",
    "admissible_words",
    "block_recode",
    "perron_root",
    "topological_entropy",
    "validate_and_trim",
    "is_irreducible",
    "InvariantMeasure",
    "MarkovComponent",
    "d_star",
    "periodic_orbit_measure",
    "random_markov_component",
    "stationary",
    "support_is_full",
    "PressureResult",
    "pressure",
    "verify_equilibrium",
    "SuspensionSystem",
    "abramov_entropy",
    "d_star_flow",
    "flow_integral",
    "flow_mixture_weights",
    "flow_top_entropy",
    "BirkhoffRange",
    "FlowRatioRange",
    "RotationSet",
    "SpectrumResult",
    "birkhoff_range",
    "conditional_entropy_spectrum",
    "conditional_entropy_spectrum_2d",
    "flow_conditional_spectrum",
    "flow_ratio_range",
    "rotation_set_2d",
    "birkhoff_witness_2d",
    "intermediate_witness",
    "low_entropy_mean_witness",
    "orthant_combination",
    "HorseshoePack",
    "WordProcessMeasure",
    "build_multi_horseshoe",
    "certify_pack",
    "lift_pack_to_flow",
    "EmpiricalStatistics",
    "LorenzModel",
    "Trajectory",
    "empirical_statistics",
    "simulate_return_map",
    "validate_lorenz",
]
