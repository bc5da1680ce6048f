"""Exciton absorption on extended-star and asymmetric-chain networks.

Simulates single-exciton trapping dynamics under pure dephasing, the
symmetry-reduced star dynamics, the defect-tuning speedup law, and the
classical (strong-dephasing) rate-model limit with its first-passage-time
validators.
"""

from .classical import (
    LaplaceWTD,
    RateModel,
    RecursionNonConvergent,
    SingularRateMatrix,
    build_rate_model,
    classical_absorption_time,
    classical_rates,
    evolve_rates,
    mfpt_closed_form,
    mfpt_via_inverse,
    mfpt_via_wtd,
)
from .liouville import (
    Liouvillian,
    NearDefective,
    Propagator,
    build_liouvillian,
    diagonalize,
    evolve,
    evolve_ode,
    survival_function,
)
from .networks import (
    BlochBasis,
    DensityMatrix,
    Hamiltonian,
    NetworkKind,
    NetworkSpec,
    build_hamiltonian,
    initial_state,
    star_to_chain,
)
from .observables import (
    AbsorptionCurve,
    AbsorptionResult,
    Engine,
    HorizonExceeded,
    TauMethod,
    absorption_curve,
    absorption_probability,
    absorption_series,
    absorption_time,
    absorption_time_for,
    critical_length,
    optimal_defect,
    speedup,
)
from .reduced import (
    ReducedGenerator,
    ReducedState,
    build_reduced_generator,
    evolve_reduced,
    reduce_density_matrix,
)
from .series import ObservableSeries, Provenance

__version__ = "0.1.0"

__all__ = [
    "AbsorptionCurve",
    "AbsorptionResult",
    "BlochBasis",
    "DensityMatrix",
    "Engine",
    "Hamiltonian",
    "HorizonExceeded",
    "LaplaceWTD",
    "Liouvillian",
    "NearDefective",
    "NetworkKind",
    "NetworkSpec",
    "ObservableSeries",
    "Propagator",
    "Provenance",
    "RateModel",
    "RecursionNonConvergent",
    "ReducedGenerator",
    "ReducedState",
    "SingularRateMatrix",
    "TauMethod",
    "absorption_curve",
    "absorption_probability",
    "absorption_series",
    "absorption_time",
    "absorption_time_for",
    "build_hamiltonian",
    "build_liouvillian",
    "build_rate_model",
    "build_reduced_generator",
    "classical_absorption_time",
    "classical_rates",
    "critical_length",
    "diagonalize",
    "evolve",
    "evolve_ode",
    "evolve_rates",
    "evolve_reduced",
    "initial_state",
    "mfpt_closed_form",
    "mfpt_via_inverse",
    "mfpt_via_wtd",
    "optimal_defect",
    "reduce_density_matrix",
    "speedup",
    "star_to_chain",
    "survival_function",
]
