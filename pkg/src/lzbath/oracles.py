"""Independent reference computations for acceptance and property tests.

The closed-form asymptotic transition probability and a direct fixed-basis
Schrodinger integrator.  The solver deliberately shares no code with the
rotating-frame propagator: different basis, different right-hand side, so
agreement between the two is a genuine cross-check of the frame machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import InvalidStateError, NumericalError
from .lzmodel import ModelParams

__all__ = ["ProbabilitySource", "LZProbabilityPoint", "p_lz_exact",
           "unitary_solver", "unitary_transition_probability"]


class ProbabilitySource(Enum):
    """Which computation produced a transition-probability value."""

    EXACT = "exact"
    TDQME = "tdqme"
    UNITARY_SOLVER = "unitary_solver"


@dataclass(frozen=True)
class LZProbabilityPoint:
    """One (sweep velocity, probability) sample with its provenance tag."""

    v: float
    p: float
    source: ProbabilitySource

    def __post_init__(self):
        if not self.v > 0.0:
            raise ValueError(f"sweep velocity must be > 0, got {self.v}")
        if not (0.0 <= self.p <= 1.0 + 1e-9):
            raise InvalidStateError(f"probability {self.p} outside [0, 1 + 1e-9]")


def p_lz_exact(v: float, eps: float = 1.0) -> float:
    """Asymptotic sweep transition probability 1 - exp(-pi*eps^2/v).

    Strictly decreasing in v; 1 in the slow limit, 0 in the sudden limit.
    """
    if not v > 0.0:
        raise ValueError(f"sweep velocity must be > 0, got {v}")
    return -math.expm1(-math.pi * eps * eps / v)


def unitary_solver(mp: ModelParams, psi0, t0: float | None = None,
                   tf: float | None = None, output_times=None, *,
                   rtol: float = 1e-10, atol: float = 1e-12):
    """Integrate the bare two-level Schrodinger equation in the fixed basis.

    No frame transformation and no bath: the Hamiltonian is applied directly
    as v*t*sigma_z + eps*sigma_x.  Returns the final state vector, or the
    (n, 2) array of states when `output_times` is given.  Norm preservation
    along the trajectory is the caller-checkable quality indicator.
    """
    psi = np.asarray(psi0, dtype=complex).reshape(2)
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-9:
        raise ValueError("initial state must be normalized")
    t_start = mp.t0 if t0 is None else float(t0)
    t_end = mp.tf if tf is None else float(tf)
    if output_times is None:
        t_out = np.array([t_end])
    else:
        t_out = np.asarray(output_times, dtype=float)
        if t_out.ndim != 1 or t_out.size < 1 or np.any(np.diff(t_out) <= 0.0):
            raise ValueError("output times must be a nonempty increasing 1-D array")
        if t_out[0] < t_start or t_out[-1] > t_end + 1e-9 * (t_end - t_start):
            raise ValueError("output times must lie within the integration window")

    y0 = np.array([psi[0].real, psi[0].imag, psi[1].real, psi[1].imag])
    y_out, status, last_t, _n_steps, max_norm = _kernels.schrodinger_kernel(
        y0, t_start, t_out, mp.v, mp.eps, mp.tau_lz, rtol, atol)
    if status == _kernels.STATUS_STEP_UNDERFLOW:
        raise NumericalError("Schrodinger integrator step size underflowed",
                             last_good_time=last_t)
    if status == _kernels.STATUS_MAX_STEPS:
        raise NumericalError("Schrodinger integrator exceeded the step budget",
                             last_good_time=last_t)
    if max_norm > 1e-8:
        raise NumericalError(f"state norm drifted by {max_norm:.3e}")

    states = y_out[:, 0] + 1j * y_out[:, 1], y_out[:, 2] + 1j * y_out[:, 3]
    states = np.column_stack(states)
    if output_times is None:
        return states[-1]
    return states


def unitary_transition_probability(mp: ModelParams, *, rtol: float = 1e-10,
                                   atol: float = 1e-12) -> float:
    """Probability of ending in |down> after starting from |up> at t0 (no bath)."""
    psi = unitary_solver(mp, np.array([1.0, 0.0]), rtol=rtol, atol=atol)
    return float(abs(psi[1]) ** 2)
