"""Deterministic geometry of the linearly driven two-level system.

The drive is H(t) = v*t*sigma_z + eps*sigma_x in the fixed (diabatic) basis
{|up>, |down>}.  Everything needed downstream is closed-form: instantaneous
eigenframe, mixing angle theta = atan2(eps, v*t) on the continuous branch
(0, pi), energies +-sqrt((v t)^2 + eps^2), the nonadiabatic coupling between
the instantaneous eigenstates, and the accumulated phase integrals via an
exact antiderivative (no quadrature anywhere in this module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bath import BathParams

__all__ = [
    "Coupling",
    "ModelParams",
    "EigenFrame",
    "PhaseState",
    "eigen_energy",
    "mixing_angle",
    "eigenframe",
    "nonadiabatic_amplitude",
    "nonadiabatic_coupling",
    "dynamic_phase",
    "delta_phase",
]

# Above this value of |v*x/eps| the antiderivative switches to its large-
# argument expansion; both branches agree to machine precision there.
_ASYMPTOTIC_U = 1e4


class Coupling(Enum):
    """Geometry of the system--bath coupling operator in the diabatic basis."""

    TRANSVERSE = "transverse"      # sigma_x coupling
    LONGITUDINAL = "longitudinal"  # sigma_z coupling


@dataclass(frozen=True)
class ModelParams:
    """Full physical specification of a driven, dissipative two-level run.

    v     sweep velocity (energy^2, > 0)
    eps   tunneling amplitude (energy, > 0); the minimal gap at t=0 is 2*eps
    bath  bath parameters
    t0    evolution start time (< 0)
    tf    evolution end time (> 0)

    tau_lz = eps/v is derived and cached: the time scale on which the
    avoided-crossing transition dominates.
    """

    v: float
    eps: float
    bath: BathParams
    t0: float
    tf: float
    coupling: Coupling = Coupling.TRANSVERSE
    tau_lz: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.v > 0.0:
            raise ValueError(f"sweep velocity v must be > 0, got {self.v}")
        if not self.eps > 0.0:
            raise ValueError(f"tunneling amplitude eps must be > 0, got {self.eps}")
        if not (self.t0 < 0.0 < self.tf):
            raise ValueError(f"time window must satisfy t0 < 0 < tf, got [{self.t0}, {self.tf}]")
        if not isinstance(self.coupling, Coupling):
            raise ValueError(f"coupling must be a Coupling enum member, got {self.coupling!r}")
        object.__setattr__(self, "tau_lz", self.eps / self.v)


@dataclass(frozen=True)
class EigenFrame:
    """Instantaneous eigenframe at one time.

    theta is on the continuous branch (0, pi) with theta(0) = pi/2 and
    theta -> pi (0) as t -> -inf (+inf).  Eigenvector coefficients are real
    (the gauge in which the adiabatic connection vanishes identically):

        vec_e = ( cos(theta/2), sin(theta/2) )
        vec_g = (-sin(theta/2), cos(theta/2) )

    expressed in the diabatic basis.
    """

    t: float
    theta: float
    energy_e: float
    vec_e: np.ndarray
    vec_g: np.ndarray

    def basis_matrix(self) -> np.ndarray:
        """Columns are the excited / ground eigenvectors in diabatic coordinates."""
        return np.column_stack([self.vec_e, self.vec_g])


@dataclass
class PhaseState:
    """Accumulated phase difference phi_eg(t) between the two eigenstates.

    phi_eg(t0) = 0 and d(phi_eg)/dt = -2*E_e(t); geometric contributions
    vanish identically in the real eigenvector gauge.
    """

    phi_eg: float = 0.0


def eigen_energy(t, mp: ModelParams):
    """Upper instantaneous energy E_e(t) = sqrt((v t)^2 + eps^2) >= eps."""
    return np.hypot(mp.v * np.asarray(t, dtype=float), mp.eps)[()] if np.ndim(t) == 0 \
        else np.hypot(mp.v * np.asarray(t, dtype=float), mp.eps)


def mixing_angle(t, mp: ModelParams):
    """Mixing angle theta(t) = atan2(eps, v t), continuous on (0, pi)."""
    return np.arctan2(mp.eps, mp.v * np.asarray(t, dtype=float))[()] if np.ndim(t) == 0 \
        else np.arctan2(mp.eps, mp.v * np.asarray(t, dtype=float))


def eigenframe(t: float, mp: ModelParams) -> EigenFrame:
    """Instantaneous eigenframe of the drive Hamiltonian at time t."""
    theta = math.atan2(mp.eps, mp.v * t)
    half = 0.5 * theta
    c, s = math.cos(half), math.sin(half)
    return EigenFrame(
        t=float(t),
        theta=theta,
        energy_e=math.hypot(mp.v * t, mp.eps),
        vec_e=np.array([c, s]),
        vec_g=np.array([-s, c]),
    )


def nonadiabatic_amplitude(t, mp: ModelParams):
    """|<e|d/dt g>| = eps*v/2 / ((v t)^2 + eps^2).

    A Lorentzian in t with maximum v/(2*eps) at the crossing and half-width
    tau_lz.
    """
    tt = np.asarray(t, dtype=float)
    vals = 0.5 * mp.eps * mp.v / ((mp.v * tt) ** 2 + mp.eps**2)
    return vals[()] if np.ndim(t) == 0 else vals


def _phase_antiderivative(x, v: float, eps: float):
    """Antiderivative F of twice the upper eigenenergy:

        F(x) = x*sqrt((v x)^2 + eps^2) + (eps^2/v)*asinh(v x / eps)

    so that integral_a^b 2*E_e = F(b) - F(a).  For |v x / eps| > 1e4 the
    equivalent large-argument expansion is used instead; the two branches
    agree to machine precision at the switch.
    """
    xx = np.asarray(x, dtype=float)
    u = v * xx / eps
    au = np.abs(u)
    direct = xx * np.hypot(v * xx, eps) + (eps * eps / v) * np.arcsinh(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = 1.0 / (au * au)
        asym = np.sign(xx) * (
            v * xx * xx * (1.0 + 0.5 * w - 0.125 * w * w)
            + (eps * eps / v) * (np.log(2.0 * au) + 0.25 * w - (3.0 / 32.0) * w * w)
        )
    vals = np.where(au > _ASYMPTOTIC_U, asym, direct)
    return vals[()] if np.ndim(x) == 0 else vals


def dynamic_phase(t, mp: ModelParams):
    """Accumulated phase difference phi_eg(t) = -integral_{t0}^{t} 2*E_e.

    The two dynamic phases are opposite (the spectrum is symmetric), so the
    single difference fully specifies the frame rotation.  phi_eg(t0) = 0.
    """
    tt = np.asarray(t, dtype=float)
    if np.any(tt < mp.t0):
        raise ValueError(f"dynamic phase is accumulated from t0={mp.t0}; got earlier time")
    vals = -(_phase_antiderivative(tt, mp.v, mp.eps)
             - _phase_antiderivative(mp.t0, mp.v, mp.eps))
    return vals[()] if np.ndim(t) == 0 else vals


def nonadiabatic_coupling(t: float, mp: ModelParams,
                          phase: PhaseState | None = None) -> complex:
    """Off-diagonal coefficient of the residual Hamiltonian in the rotating frame:

        alpha_eg(t) = -i * exp(-i*phi_eg(t)) * eps*v/2 / ((v t)^2 + eps^2)

    If no PhaseState is supplied the phase is computed from its closed form
    (which requires t >= t0).
    """
    phi = phase.phi_eg if phase is not None else dynamic_phase(t, mp)
    return -1j * np.exp(-1j * phi) * nonadiabatic_amplitude(t, mp)


def delta_phase(t, s, mp: ModelParams):
    """Phase integral Delta(t, s) = integral_0^s 2*E_e(t - tau) d tau, s >= 0.

    Evaluated exactly as F(t) - F(t - s); no quadrature.
    """
    ss = np.asarray(s, dtype=float)
    if np.any(ss < 0.0):
        raise ValueError("delta_phase requires lag s >= 0")
    vals = (_phase_antiderivative(t, mp.v, mp.eps)
            - _phase_antiderivative(np.asarray(t, dtype=float) - ss, mp.v, mp.eps))
    return vals[()] if (np.ndim(t) == 0 and np.ndim(s) == 0) else vals
