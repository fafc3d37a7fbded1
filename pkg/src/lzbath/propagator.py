"""Master-equation propagation in the rotating (adiabatic) frame.

The density matrix is integrated in the frame attached to the instantaneous
eigenstates at the start time, where the only Hamiltonian left is the
nonadiabatic coupling alpha_eg(t) (off-diagonal) plus, optionally, the
bath-induced level shifts.  The dissipator acts with the tabulated
time-dependent coefficients.  States are transformed back to the fixed
(diabatic) basis only at output samples.

Frames: the start time t0 is also the reference time of the frame rotation,
so the transformation is the identity at t0 and the rotating-frame matrix of
the initial state is just its matrix in the t0 eigenbasis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import FrameMismatchError, InvalidStateError, NumericalError
from .lzmodel import (ModelParams, dynamic_phase, eigen_energy, eigenframe,
                      nonadiabatic_amplitude, nonadiabatic_coupling)
from .rates import RateSet, RateTable, build_rate_table, rate_set

__all__ = [
    "Frame",
    "DensityMatrix",
    "EvolutionMode",
    "TrajectoryRecord",
    "rhs",
    "evolve",
    "to_lab_frame",
    "thermal_state",
    "effective_temperature",
]

logger = logging.getLogger(__name__)

_SIGMA_P = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_SIGMA_M = _SIGMA_P.conj().T
_SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)

_HERMITICITY_TOL = 1e-12
_TRACE_TOL = 1e-9
_NEGATIVITY_FLOOR = -1e-6


class Frame(Enum):
    """Which basis the stored 2x2 matrix refers to."""

    ADIABATIC = "adiabatic"   # eigenbasis of the drive at the start time
    LAB = "lab"               # fixed diabatic basis {up, down}


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix plus the frame tag its entries refer to."""

    matrix: np.ndarray
    frame: Frame

    @classmethod
    def from_state(cls, psi, frame: Frame) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(2)
        return cls(np.outer(psi, psi.conj()), frame)

    @classmethod
    def diabatic_up(cls) -> "DensityMatrix":
        return cls(np.diag([1.0, 0.0]).astype(complex), Frame.LAB)

    @classmethod
    def diabatic_down(cls) -> "DensityMatrix":
        return cls(np.diag([0.0, 1.0]).astype(complex), Frame.LAB)

    def validate(self) -> None:
        m = np.asarray(self.matrix)
        if m.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got shape {m.shape}")
        if np.abs(m - m.conj().T).max() > _HERMITICITY_TOL:
            raise InvalidStateError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(m) - 1.0) > _TRACE_TOL:
            raise InvalidStateError(f"density matrix trace {np.trace(m)} deviates from 1")
        lo = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
        if lo < _NEGATIVITY_FLOOR:
            raise InvalidStateError(f"density matrix eigenvalue {lo} below tolerated negativity")

    def min_eigenvalue(self) -> float:
        m = np.asarray(self.matrix)
        return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())


class _ModeKind(Enum):
    FULL = "full"
    NO_NONADIABATIC = "no_nonadiabatic"
    NO_DISSIPATION = "no_dissipation"


@dataclass(frozen=True)
class EvolutionMode:
    """Which generators act during the evolution.

    Exactly one of the three base modes is set; the full equation, the
    ablation without the nonadiabatic coupling, or the ablation without the
    dissipator.  The level-shift commutator belongs to the dissipative part
    and is additionally toggleable (it is negligible at weak coupling, and
    the toggle lets tests confirm that).
    """

    kind: _ModeKind = _ModeKind.FULL
    include_lamb_shift: bool = True

    @classmethod
    def full(cls, include_lamb_shift: bool = True) -> "EvolutionMode":
        return cls(_ModeKind.FULL, include_lamb_shift)

    @classmethod
    def no_nonadiabatic(cls, include_lamb_shift: bool = True) -> "EvolutionMode":
        return cls(_ModeKind.NO_NONADIABATIC, include_lamb_shift)

    @classmethod
    def no_dissipation(cls) -> "EvolutionMode":
        return cls(_ModeKind.NO_DISSIPATION, False)

    @classmethod
    def from_name(cls, name: str, include_lamb_shift: bool = True) -> "EvolutionMode":
        kind = _ModeKind(name)
        if kind is _ModeKind.NO_DISSIPATION:
            return cls(kind, False)
        return cls(kind, include_lamb_shift)

    @property
    def nonadiabatic_enabled(self) -> bool:
        return self.kind is not _ModeKind.NO_NONADIABATIC

    @property
    def dissipation_enabled(self) -> bool:
        return self.kind is not _ModeKind.NO_DISSIPATION


@dataclass(frozen=True)
class TrajectoryRecord:
    """Snapshot at one output time along a trajectory.

    rho_ad is the rotating-frame matrix (t0 eigenbasis); rho_lab the fixed
    diabatic-basis matrix.  Populations: p_up/p_down in the diabatic basis,
    p_e/p_g on the instantaneous eigenstates.
    """

    t: float
    rho_ad: np.ndarray
    rho_lab: np.ndarray
    p_up: float
    p_down: float
    p_e: float
    p_g: float
    rates: RateSet
    alpha_abs: float
    work_accum: float = 0.0


def rhs(t: float, rho: DensityMatrix, mp: ModelParams, mode: EvolutionMode,
        rates: RateTable | RateSet | None = None,
        alpha_override: complex | None = None) -> np.ndarray:
    """Time derivative of the rotating-frame density matrix (reference path).

    This is the explicit operator-algebra implementation used by tests and
    single evaluations; the integrator runs an equivalent flattened kernel.
    `alpha_override` substitutes a fixed nonadiabatic coupling (testing seam
    for closed-form comparisons).
    """
    if rho.frame is not Frame.ADIABATIC:
        raise FrameMismatchError("rhs operates on rotating-frame density matrices")
    m = np.asarray(rho.matrix, dtype=complex)
    out = np.zeros((2, 2), dtype=complex)

    if mode.nonadiabatic_enabled:
        alpha = alpha_override if alpha_override is not None \
            else nonadiabatic_coupling(t, mp)
        h = alpha * _SIGMA_P + np.conj(alpha) * _SIGMA_M
        out += -1j * (h @ m - m @ h)

    if mode.dissipation_enabled:
        if rates is None:
            rs = rate_set(t, mp)
        elif isinstance(rates, RateTable):
            rs = rates.lookup(t)
        else:
            rs = rates
        pp = _SIGMA_P @ _SIGMA_M
        mm = _SIGMA_M @ _SIGMA_P
        if mode.include_lamb_shift:
            hs = rs.s_plus * pp + rs.s_minus * mm
            out += -1j * (hs @ m - m @ hs)
        out += -rs.gamma_plus * ((pp @ m + m @ pp) - 2.0 * (_SIGMA_M @ m @ _SIGMA_P))
        out += -rs.gamma_minus * ((mm @ m + m @ mm) - 2.0 * (_SIGMA_P @ m @ _SIGMA_M))
        out += -2.0 * rs.gamma_z * (m - _SIGMA_Z @ m @ _SIGMA_Z)

    return out


def _zero_table(mp: ModelParams) -> RateTable:
    span = mp.tf - mp.t0
    return RateTable(t_split=mp.t0, head_t0=mp.t0 - span, head_dt=span / 3.0,
                     head_values=np.zeros((4, 5)), tail_t0=mp.t0,
                     tail_dt=span / 3.0, tail_values=np.zeros((4, 5)),
                     max_spacing=span)


def _basis_matrix(t: float, mp: ModelParams, gauge_flip: bool) -> np.ndarray:
    w = eigenframe(t, mp).basis_matrix().astype(complex)
    if gauge_flip:
        w[:, 0] = -w[:, 0]
    return w


def _to_lab_matrix(t: float, rho_ad: np.ndarray, mp: ModelParams,
                   gauge_flip: bool) -> np.ndarray:
    # rho_ad is stored in coordinates of the start-time eigenbasis, in which
    # the frame rotation acts as |n(t0)> -> e^{i phi_n} |n(t)>; its matrix
    # from those coordinates to diabatic ones is W(t) * diag(e^{i phi_n}).
    phi = dynamic_phase(t, mp)
    d = np.array([np.exp(0.5j * phi), np.exp(-0.5j * phi)])
    u = _basis_matrix(t, mp, gauge_flip) * d[None, :]
    return u @ rho_ad @ u.conj().T


def to_lab_frame(t: float, rho: DensityMatrix, mp: ModelParams) -> DensityMatrix:
    """Rotate a rotating-frame state back to the fixed diabatic basis at time t.

    The map is unitary (trace and spectrum preserved).  At t = t0 the frame
    rotation is the identity operator, so the output is the same state, its
    entries merely re-expressed in the diabatic basis.
    """
    if rho.frame is not Frame.ADIABATIC:
        raise FrameMismatchError("to_lab_frame expects a rotating-frame state")
    return DensityMatrix(_to_lab_matrix(t, np.asarray(rho.matrix, dtype=complex),
                                        mp, False), Frame.LAB)


def thermal_state(mp: ModelParams, t: float) -> DensityMatrix:
    """Instantaneous Gibbs state of the drive Hamiltonian at time t (lab frame)."""
    e = eigen_energy(t, mp)
    frame = eigenframe(t, mp)
    x = mp.bath.beta * e
    pe = math.exp(-x) / (math.exp(-x) + math.exp(x)) if x < 350.0 else 0.0
    w = frame.basis_matrix().astype(complex)
    return DensityMatrix(w @ np.diag([pe, 1.0 - pe]).astype(complex) @ w.conj().T,
                         Frame.LAB)


def effective_temperature(record: TrajectoryRecord, mp: ModelParams) -> float:
    """Temperature read off the instantaneous population ratio across the gap:

        T_eff(t) = 2 E_e(t) / ln(P_down / P_up)

    +inf when the populations are equal; negative when they are inverted.
    """
    pu, pd = record.p_up, record.p_down
    if pu <= 0.0 or pd <= 0.0:
        raise ValueError("effective temperature needs strictly positive populations")
    if pu == pd:
        return math.inf
    return 2.0 * eigen_energy(record.t, mp) / math.log(pd / pu)


def _default_output_grid(mp: ModelParams, points_per_tau: float) -> np.ndarray:
    span = mp.tf - mp.t0
    n = max(2, int(math.ceil(span * points_per_tau / mp.tau_lz)) + 1)
    return np.linspace(mp.t0, mp.tf, n)


def evolve(mp: ModelParams, mode: EvolutionMode, rho0: DensityMatrix,
           output_grid=None, *, rates: RateTable | None = None,
           rtol: float = 1e-8, atol: float = 1e-10,
           output_points_per_tau: float = 16.0,
           rate_points_per_tau: float = 8.0,
           _gauge_flip: bool = False) -> list[TrajectoryRecord]:
    """Integrate the master equation over [t0, tf] and record snapshots.

    rho0 is a lab-frame density matrix; it is mapped into the rotating frame
    (an exact basis change at t0), integrated with an adaptive embedded
    Runge-Kutta pair, and every output sample is transformed back to the lab
    frame.  A rate table is built on demand when dissipation is active; pass
    `rates` to reuse one across runs.

    Raises NumericalError on step-size underflow or when the trace drifts
    beyond 1e-7.
    """
    if rho0.frame is not Frame.LAB:
        raise FrameMismatchError("evolve expects the initial state in the lab frame")
    rho0.validate()

    if output_grid is None:
        output_grid = _default_output_grid(mp, output_points_per_tau)
    t_out = np.asarray(output_grid, dtype=float)
    if t_out.ndim != 1 or t_out.size < 1:
        raise ValueError("output grid must be a nonempty 1-D array of times")
    if np.any(np.diff(t_out) <= 0.0):
        raise ValueError("output grid must be strictly increasing")
    pad = 1e-9 * (mp.tf - mp.t0)
    if t_out[0] < mp.t0 - pad or t_out[-1] > mp.tf + pad:
        raise ValueError(f"output grid must lie within [{mp.t0}, {mp.tf}]")

    w0 = _basis_matrix(mp.t0, mp, _gauge_flip)
    rho_ad0 = w0.conj().T @ np.asarray(rho0.matrix, dtype=complex) @ w0

    dissipative = mode.dissipation_enabled and mp.bath.gamma > 0.0
    if dissipative:
        table = rates if rates is not None else build_rate_table(mp, rate_points_per_tau)
    else:
        table = _zero_table(mp)

    y0 = np.array([
        rho_ad0[0, 0].real, rho_ad0[0, 0].imag,
        rho_ad0[0, 1].real, rho_ad0[0, 1].imag,
        rho_ad0[1, 0].real, rho_ad0[1, 0].imag,
        rho_ad0[1, 1].real, rho_ad0[1, 1].imag,
        0.0,  # work accumulator
    ])
    alpha_sign = -1.0 if _gauge_flip else 1.0
    y_out, status, last_t, n_steps, max_tr, max_he = _kernels.master_kernel(
        y0, mp.t0, t_out, mp.v, mp.eps, mp.tau_lz, mp.bath.omega_c,
        mode.nonadiabatic_enabled, dissipative,
        mode.include_lamb_shift and dissipative, alpha_sign,
        table.head_t0, table.head_dt, table.head_values, table.t_split,
        table.tail_t0, table.tail_dt, table.tail_values, rtol, atol)

    if status == _kernels.STATUS_STEP_UNDERFLOW:
        raise NumericalError("integrator step size underflowed",
                             last_good_time=last_t)
    if status == _kernels.STATUS_TRACE_DRIFT:
        raise NumericalError(f"trace drift exceeded 1e-7 (reached {max_tr:.3e})",
                             last_good_time=last_t)
    if status == _kernels.STATUS_MAX_STEPS:
        raise NumericalError("integrator exceeded the step budget",
                             last_good_time=last_t)

    records: list[TrajectoryRecord] = []
    min_eig = math.inf
    for i, t in enumerate(t_out):
        row = y_out[i]
        rho_ad = np.array([[row[0] + 1j * row[1], row[2] + 1j * row[3]],
                           [row[4] + 1j * row[5], row[6] + 1j * row[7]]])
        rho_lab = _to_lab_matrix(float(t), rho_ad, mp, _gauge_flip)
        rs = table.lookup(float(t)) if dissipative \
            else RateSet(float(t), 0.0, 0.0, 0.0, 0.0, 0.0)
        records.append(TrajectoryRecord(
            t=float(t),
            rho_ad=rho_ad,
            rho_lab=rho_lab,
            p_up=float(rho_lab[0, 0].real),
            p_down=float(rho_lab[1, 1].real),
            p_e=float(rho_ad[0, 0].real),
            p_g=float(rho_ad[1, 1].real),
            rates=rs,
            alpha_abs=float(nonadiabatic_amplitude(float(t), mp)),
            work_accum=float(row[8]),
        ))
        herm = 0.5 * (rho_ad + rho_ad.conj().T)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(herm).min()))

    if min_eig < _NEGATIVITY_FLOOR:
        logger.warning(
            "density matrix developed negativity %.3e beyond the monitoring "
            "floor %.0e (perturbative master equation; state left unclamped)",
            min_eig, _NEGATIVITY_FLOOR)

    logger.debug("evolution finished: %d steps, trace drift %.2e, hermiticity drift %.2e",
                 n_steps, max_tr, max_he)
    return records
