"""Time-dependent dissipator coefficients.

Five coefficients drive the dissipative part of the master equation at each
instant: two relaxation rates, one dephasing rate and two level shifts.  All
are lag integrals of the bath correlation function against mixing-angle
weights and the oscillatory phase factor exp(+-i Delta(t, s)):

    relaxation  Gamma+-(t) = w(t) int_0^{t-t0} ds w(t-s) Re[C(s) e^{+-i Delta(t,s)}]
    shifts      S+-(t)     = w(t) int_0^{t-t0} ds w(t-s) Im[C(s) e^{+-i Delta(t,s)}]
    dephasing   Gamma_z(t) = u(t) int_0^{t-t0} ds u(t-s) Re[C(s)]

with (w, u) = (cos theta, sin theta) for transverse coupling and the two
interchanged for longitudinal coupling.

The integrals are done on pre-sized panels (width limited by the local
oscillation rate 2*E_e(t-s) and by the smoothness scales of the integrand)
with a Gauss-Kronrod 15|7 rule per panel and adaptive bisection of any panel
whose embedded error estimate is too large.  The memory integral is
truncated at s_max = min(t - t0, 8*beta + 40/omega_c); beyond that the
correlation function is deep in its power-law tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bath import BathParams, bose_occupation, correlation, spectral_density
from .errors import NumericalError
from .lzmodel import Coupling, ModelParams, _phase_antiderivative

__all__ = [
    "RATE_COLUMNS",
    "RateSet",
    "RateTable",
    "memory_cutoff",
    "rate_set",
    "rate_set_adiabatic",
    "build_rate_table",
]

# Column order used everywhere a rate 5-vector appears (tables, kernels).
RATE_COLUMNS = ("gamma_plus", "gamma_minus", "gamma_z", "s_plus", "s_minus")

# Gauss-Kronrod 15|7 on [-1, 1]; Gauss nodes are the odd-indexed entries.
_GK_NODES = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_GK_WEIGHTS = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_G7_IDX = np.arange(1, 15, 2)
_G7_WEIGHTS = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])


@dataclass(frozen=True)
class RateSet:
    """The five dissipator coefficients at one instant.

    gamma_plus may dip negative transiently in the fast-sweep regime (the
    relaxation channel briefly turns into pumping); gamma_z is nonnegative
    up to quadrature tolerance.  Fields that a particular construction does
    not define (e.g. the closed-form adiabatic limit) are NaN.
    """

    t: float
    gamma_plus: float
    gamma_minus: float
    gamma_z: float
    s_plus: float
    s_minus: float

    def as_array(self) -> np.ndarray:
        return np.array([self.gamma_plus, self.gamma_minus, self.gamma_z,
                         self.s_plus, self.s_minus])


def memory_cutoff(bath: BathParams) -> float:
    """Default truncation of the lag integrals: 8*beta + 40/omega_c."""
    return 8.0 * bath.beta + 40.0 / bath.omega_c


def _panel_values(lo: np.ndarray, hi: np.ndarray, t: float, mp: ModelParams):
    """Kronrod estimates and error indicators for all panels at once.

    Returns (values, errors), both shaped (n_panels, 5) in RATE_COLUMNS
    order, without the outer mixing-angle prefactor.
    """
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    s = (mid[:, None] + half[:, None] * _GK_NODES[None, :]).ravel()

    c = correlation(s, mp.bath)
    cr, ci = c.real, c.imag
    delta = _phase_antiderivative(t, mp.v, mp.eps) - _phase_antiderivative(t - s, mp.v, mp.eps)
    cosd = np.cos(delta)
    sind = np.sin(delta)
    theta = np.arctan2(mp.eps, mp.v * (t - s))
    if mp.coupling is Coupling.TRANSVERSE:
        w_relax = np.cos(theta)
        w_deph = np.sin(theta)
    else:
        w_relax = np.sin(theta)
        w_deph = np.cos(theta)

    f = np.empty((5, s.size))
    f[0] = w_relax * (cr * cosd - ci * sind)   # Re[C e^{+i Delta}]
    f[1] = w_relax * (cr * cosd + ci * sind)   # Re[C e^{-i Delta}]
    f[2] = w_deph * cr
    f[3] = w_relax * (ci * cosd + cr * sind)   # Im[C e^{+i Delta}]
    f[4] = w_relax * (ci * cosd - cr * sind)   # Im[C e^{-i Delta}]
    f = f.reshape(5, lo.size, 15)

    k15 = (f @ _GK_WEIGHTS) * half[None, :]
    g7 = (f[:, :, _G7_IDX] @ _G7_WEIGHTS) * half[None, :]
    return k15.T.copy(), np.abs(k15 - g7).T.copy()


def _quad_tolerance(bath: BathParams, s_hi: float) -> float:
    c0 = abs(correlation(0.0, bath))
    s_scale = min(s_hi, 10.0 / bath.omega_c + 2.0 * bath.beta)
    return max(1e-10 * c0 * s_scale, 5e-17 * c0 * s_hi)


def rate_set(t: float, mp: ModelParams, *, s_max: float | None = None,
             tol: float | None = None, max_rounds: int = 40) -> RateSet:
    """Evaluate all five dissipator coefficients at time t by quadrature.

    `s_max` overrides the default memory truncation (used by convergence
    tests); `tol` is the absolute tolerance on each lag integral.  Raises
    NumericalError if adaptive bisection cannot reach the tolerance.
    """
    span_pad = 1e-9 * (mp.tf - mp.t0)
    if not (mp.t0 - span_pad <= t <= mp.tf + span_pad):
        raise ValueError(f"rate evaluation time {t} outside [{mp.t0}, {mp.tf}]")

    s_hi = min(t - mp.t0, s_max if s_max is not None else memory_cutoff(mp.bath))
    if mp.bath.gamma == 0.0 or s_hi <= 0.0:
        return RateSet(t, 0.0, 0.0, 0.0, 0.0, 0.0)

    if tol is None:
        tol = _quad_tolerance(mp.bath, s_hi)

    bounds = _kernels.rate_panel_bounds(t, s_hi, mp.v, mp.eps,
                                        mp.bath.omega_c, mp.tau_lz)
    lo, hi = bounds[:-1], bounds[1:]
    err_tot = math.inf
    for _ in range(max_rounds):
        vals, errs = _panel_values(lo, hi, t, mp)
        err_tot = float(errs.sum(axis=0).max())
        if err_tot <= tol:
            break
        bad = errs.max(axis=1) > tol / (2.0 * lo.size)
        if not bad.any():
            break
        mid = 0.5 * (lo[bad] + hi[bad])
        edges = np.sort(np.concatenate([lo, [hi[-1]], mid]))
        lo, hi = edges[:-1], edges[1:]
    else:
        raise NumericalError(
            f"lag quadrature for rates at t={t!r} did not converge",
            achieved_tol=err_tot)

    integrals = vals.sum(axis=0)
    theta_t = math.atan2(mp.eps, mp.v * t)
    if mp.coupling is Coupling.TRANSVERSE:
        pre_relax, pre_deph = math.cos(theta_t), math.sin(theta_t)
    else:
        pre_relax, pre_deph = math.sin(theta_t), math.cos(theta_t)
    return RateSet(
        t=float(t),
        gamma_plus=pre_relax * integrals[0],
        gamma_minus=pre_relax * integrals[1],
        gamma_z=pre_deph * integrals[2],
        s_plus=pre_relax * integrals[3],
        s_minus=pre_relax * integrals[4],
    )


def rate_set_adiabatic(t: float, mp: ModelParams) -> RateSet:
    """Closed-form slow-driving limit of the relaxation rates.

        Gamma+ = cos^2(theta) J(2 E_e) [n(2 E_e) + 1]
        Gamma- = cos^2(theta) J(2 E_e)  n(2 E_e)

    Even in t, and satisfying detailed balance Gamma+/Gamma- = e^{2 beta E_e}
    exactly.  Only defined for transverse coupling; the dephasing rate and
    shifts have no closed form here and are returned as NaN.
    """
    if mp.coupling is not Coupling.TRANSVERSE:
        raise ValueError("adiabatic-limit rates are defined for transverse coupling")
    e = math.hypot(mp.v * t, mp.eps)
    cos2 = (mp.v * t / e) ** 2
    j = spectral_density(2.0 * e, mp.bath)
    n = bose_occupation(2.0 * e, mp.bath)
    return RateSet(
        t=float(t),
        gamma_plus=cos2 * j * (n + 1.0),
        gamma_minus=cos2 * j * n,
        gamma_z=math.nan,
        s_plus=math.nan,
        s_minus=math.nan,
    )


@dataclass(frozen=True)
class RateTable:
    """Two-segment grid cache of rate_set over the evolution window.

    The coefficients ring at frequency ~2*E_e(t0) while the memory integral
    switches on (its upper limit sweeps through the oscillatory kernel), so
    the head segment [t0, t0 + s_max] is sampled finely enough to resolve
    that; after the switch-on the coefficients are smooth on the crossing
    time scale and the tail segment uses the regular spacing.  Lookup is
    local cubic interpolation, exact at the nodes.  Instances are immutable
    and safe to share across workers.
    """

    t_split: float
    head_t0: float
    head_dt: float
    head_values: np.ndarray     # (n_head, 5) in RATE_COLUMNS order
    tail_t0: float
    tail_dt: float
    tail_values: np.ndarray     # (n_tail, 5)
    max_spacing: float
    interpolation_order: int = 3

    def __post_init__(self):
        for vals, dt in ((self.head_values, self.head_dt), (self.tail_values, self.tail_dt)):
            if vals.ndim != 2 or vals.shape[1] != 5 or vals.shape[0] < 4:
                raise ValueError("rate table segments need at least 4 rows of 5 coefficients")
            if not dt > 0.0:
                raise ValueError("rate table grids must be strictly increasing")
            if not np.all(np.isfinite(vals)):
                raise ValueError("rate table contains non-finite coefficients")
        if max(self.head_dt, self.tail_dt) > self.max_spacing * (1.0 + 1e-12):
            raise ValueError("rate table spacing exceeds the declared maximum "
                             f"{self.max_spacing}")

    @property
    def t_start(self) -> float:
        return self.head_t0

    @property
    def t_stop(self) -> float:
        return self.tail_t0 + self.tail_dt * (self.tail_values.shape[0] - 1)

    @property
    def times(self) -> np.ndarray:
        """Full ordered grid (head then tail, duplicate split node dropped)."""
        head = self.head_t0 + self.head_dt * np.arange(self.head_values.shape[0])
        tail = self.tail_t0 + self.tail_dt * np.arange(self.tail_values.shape[0])
        return np.concatenate([head, tail[tail > self.t_split + 1e-15]])

    @property
    def grid_values(self) -> np.ndarray:
        tail = self.tail_t0 + self.tail_dt * np.arange(self.tail_values.shape[0])
        keep = tail > self.t_split + 1e-15
        return np.vstack([self.head_values, self.tail_values[keep]])

    def lookup(self, t: float) -> RateSet:
        gp, gm, gz, sp, sm = _kernels._interp5(
            self.head_t0, self.head_dt, self.head_values, self.t_split,
            self.tail_t0, self.tail_dt, self.tail_values, t)
        return RateSet(t=float(t), gamma_plus=gp, gamma_minus=gm, gamma_z=gz,
                       s_plus=sp, s_minus=sm)


def build_rate_table(mp: ModelParams, points_per_tau: float = 8.0, *,
                     s_max: float | None = None, tol: float | None = None) -> RateTable:
    """Tabulate rate_set over [t0, tf] (dense switch-on head + uniform tail).

    Tail spacing is at most tau_lz / points_per_tau; the head samples the
    switch-on ringing (frequency ~2 E_e(t0)) at 16 points per period so that
    cubic lookup stays inside the 1e-3 interpolation budget.  The returned
    table is the fast lookup path for propagation, while direct rate_set
    evaluation stays available as the accuracy reference.
    """
    if points_per_tau <= 0.0:
        raise ValueError("points_per_tau must be positive")
    span = mp.tf - mp.t0
    max_dt = mp.tau_lz / points_per_tau
    s_hi = s_max if s_max is not None else memory_cutoff(mp.bath)

    # The switch-on ring amplitude is ~|C(u)|/(2 E(t0)); past the lag where it
    # has fallen to 1e-3 of the kernel peak, the coarse tail grid absorbs the
    # remainder within the interpolation budget, so the dense head stops there.
    bath = mp.bath
    if bath.gamma > 0.0:
        tail_weight = 2.0 * bath.gamma * (bath.temperature / bath.omega_c + 1.0)
        u_ring = math.sqrt(tail_weight / (1e-3 * abs(correlation(0.0, bath))))
        head_len = min(s_hi, max(u_ring, 20.0 / bath.omega_c))
    else:
        head_len = s_hi
    t_split = min(mp.t0 + head_len, mp.tf)

    e0 = math.hypot(mp.v * mp.t0, mp.eps)
    head_target = min(max_dt, math.pi / (16.0 * e0))
    head_span = t_split - mp.t0
    n_head = max(4, int(math.ceil(head_span / head_target)) + 1)
    head_ts = np.linspace(mp.t0, t_split, n_head)

    tail_span = mp.tf - t_split
    if tail_span > 0.0:
        n_tail = max(4, int(math.ceil(tail_span / max_dt)) + 1)
        tail_ts = np.linspace(t_split, mp.tf, n_tail)
    else:
        # window shorter than the memory cutoff: the head covers everything
        tail_ts = np.linspace(mp.tf, mp.tf + 3.0 * max_dt, 4)

    head_values = np.zeros((len(head_ts), 5))
    tail_values = np.zeros((len(tail_ts), 5))
    if mp.bath.gamma != 0.0:
        for i, t in enumerate(head_ts):
            head_values[i] = rate_set(float(t), mp, s_max=s_max, tol=tol).as_array()
        for i, t in enumerate(tail_ts):
            if t <= mp.tf:
                tail_values[i] = rate_set(float(t), mp, s_max=s_max, tol=tol).as_array()
            else:
                tail_values[i] = tail_values[i - 1]
    return RateTable(
        t_split=float(t_split),
        head_t0=float(mp.t0), head_dt=float(head_ts[1] - head_ts[0]),
        head_values=head_values,
        tail_t0=float(tail_ts[0]), tail_dt=float(tail_ts[1] - tail_ts[0]),
        tail_values=tail_values,
        max_spacing=max_dt,
    )
