"""Nonadiabatic dynamics and finite-time thermodynamics of a driven
two-level system coupled to a bosonic heat bath.

The package integrates a time-dependent quantum master equation in the
rotating frame attached to the instantaneous eigenstates, with closed-form
bath correlation functions, tabulated dissipator coefficients, exact-limit
oracles, and a CSV-producing CLI for reproducible parameter sweeps.
"""

from .bath import (BathParams, bose_occupation, correlation,
                   correlation_quadrature, spectral_density, trigamma)
from .errors import ConfigError, FrameMismatchError, NumericalError
from .harness import RunConfig, SweepSpec, run_sweep, run_trajectory
from .lzmodel import (Coupling, EigenFrame, ModelParams, PhaseState,
                      delta_phase, dynamic_phase, eigen_energy, eigenframe,
                      mixing_angle, nonadiabatic_amplitude,
                      nonadiabatic_coupling)
from .oracles import p_lz_exact, unitary_solver, unitary_transition_probability
from .propagator import (DensityMatrix, EvolutionMode, Frame,
                         TrajectoryRecord, effective_temperature, evolve,
                         rhs, thermal_state, to_lab_frame)
from .rates import (RateSet, RateTable, build_rate_table, memory_cutoff,
                    rate_set, rate_set_adiabatic)
from .thermo import ThermoRecord, accumulate, von_neumann_entropy

__version__ = "0.1.0"

__all__ = [
    "BathParams", "bose_occupation", "correlation", "correlation_quadrature",
    "spectral_density", "trigamma",
    "ConfigError", "FrameMismatchError", "NumericalError",
    "RunConfig", "SweepSpec", "run_sweep", "run_trajectory",
    "Coupling", "EigenFrame", "ModelParams", "PhaseState", "delta_phase",
    "dynamic_phase", "eigen_energy", "eigenframe", "mixing_angle",
    "nonadiabatic_amplitude", "nonadiabatic_coupling",
    "p_lz_exact", "unitary_solver", "unitary_transition_probability",
    "DensityMatrix", "EvolutionMode", "Frame", "TrajectoryRecord",
    "effective_temperature", "evolve", "rhs", "thermal_state", "to_lab_frame",
    "RateSet", "RateTable", "build_rate_table", "memory_cutoff", "rate_set",
    "rate_set_adiabatic",
    "ThermoRecord", "accumulate", "von_neumann_entropy",
    "__version__",
]
