"""Position-dependent-mass damped harmonic oscillators.

Closed-form trajectories obtained by mapping the constant-mass damped
oscillator through a point canonical transformation, an adaptive
integrator for the resulting mixed Lienard equations, and checks that tie
the two together.
"""

from .dho_core import (AmplitudeVector, DampingRegime, DhoParams, SolutionForm, classify_damping,
                       reference_energy, reference_solution)
from .dynamics import (EnergyLedger, LienardCoefficients, PhaseState, eom_rhs, energy,
                       hamiltonian, lienard_coefficients, momentum, rayleigh)
from .errors import (ConfigError, ConvergenceError, DomainError, InsufficientCrossings, PdmError,
                     QuadratureError, StepBudgetExceeded, StepUnderflow)
from .integrate import Event, IntegratorConfig, Trajectory, find_zero_crossings, integrate
from .profiles import (Branch, CustomProfile, MathewsLakshmanan, MorseExp, NdimML, PowerLaw,
                       ProfilePair, SingularRational, Uniform, deformation_from_mass, make_profile,
                       mass_from_deformation)
from .transform import (PdmScenario, admissible_amplitude, forward_map, inverse_map, pdm_path,
                        pdm_solution)
from .verify import (CheckReport, dissipation_check, isochronicity_check, oracle_compare,
                     phase_shrink_check, residual_check, roundtrip_check, run_suite)

__version__ = "0.1.0"

__all__ = ["AmplitudeVector", "DampingRegime", "DhoParams", "SolutionForm", "classify_damping",
           "reference_energy", "reference_solution", "EnergyLedger", "LienardCoefficients",
           "PhaseState", "eom_rhs", "energy", "hamiltonian", "lienard_coefficients", "momentum",
           "rayleigh", "ConfigError", "ConvergenceError", "DomainError", "InsufficientCrossings",
           "PdmError", "QuadratureError", "StepBudgetExceeded", "StepUnderflow", "Event",
           "IntegratorConfig", "Trajectory", "find_zero_crossings", "integrate", "Branch",
           "CustomProfile", "MathewsLakshmanan", "MorseExp", "NdimML", "PowerLaw", "ProfilePair",
           "SingularRational", "Uniform", "deformation_from_mass", "make_profile",
           "mass_from_deformation", "PdmScenario", "admissible_amplitude", "forward_map",
           "inverse_map", "pdm_path", "pdm_solution", "CheckReport", "dissipation_check",
           "isochronicity_check", "oracle_compare", "phase_shrink_check", "residual_check",
           "roundtrip_check", "run_suite"]
