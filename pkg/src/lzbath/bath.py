"""Bosonic-bath special functions.

The bath enters the dynamics only through its Ohmic spectral density and the
two-time correlation function of the collective coupling operator,

    C(s) = gamma*omega_c^2 * [ 2*Re psi1(1/(beta*omega_c) + i*s/beta) / (beta*omega_c)^2
                               + 1/(s*omega_c + i)^2 ],

with psi1 the trigamma function.  This closed form is what the production
code evaluates; `correlation_quadrature` integrates the defining spectral
integral directly and exists purely as an independent cross-check.

Units: hbar = k_B = 1 everywhere, so energies, frequencies and inverse times
are interchangeable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BathParams",
    "spectral_density",
    "bose_occupation",
    "trigamma",
    "correlation",
    "correlation_quadrature",
]

# Bernoulli numbers B_2 .. B_16 for the trigamma asymptotic tail.
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)

# Recurrence-shift target: with Re(z) >= 8 the 8-term Bernoulli series is
# converged to ~1e-15 relative, comfortably below the 1e-12 requirement.
_ASYMPTOTIC_RE = 8.0


@dataclass(frozen=True)
class BathParams:
    """Ohmic bath with exponential cutoff, always in thermal equilibrium.

    gamma        dimensionless coupling strength (>= 0)
    omega_c      cutoff frequency (> 0)
    temperature  bath temperature (> 0)

    `beta` is derived and cached; it satisfies beta * temperature == 1 to
    machine precision by construction.
    """

    gamma: float
    omega_c: float
    temperature: float
    beta: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.gamma >= 0.0:
            raise ValueError(f"coupling strength gamma must be >= 0, got {self.gamma}")
        if not self.omega_c > 0.0:
            raise ValueError(f"cutoff omega_c must be > 0, got {self.omega_c}")
        if not self.temperature > 0.0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        object.__setattr__(self, "beta", 1.0 / self.temperature)


def _as_output(values: np.ndarray, scalar: bool):
    if scalar:
        return values[()].item()
    return values


def spectral_density(omega, bp: BathParams):
    """Ohmic spectral density pi*gamma*omega*exp(-omega/omega_c).

    Accepts scalars or arrays; omega must be nonnegative.  The density rises
    linearly at small omega and peaks at omega == omega_c.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("spectral density is defined for omega >= 0 only")
    vals = math.pi * bp.gamma * w * np.exp(-w / bp.omega_c)
    return _as_output(vals, np.ndim(omega) == 0)


def bose_occupation(omega, bp: BathParams):
    """Thermal occupation 1/(exp(beta*omega) - 1) for omega > 0.

    Underflow-safe: for beta*omega large the overflow of expm1 collapses
    cleanly to 0.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("Bose occupation diverges at omega <= 0")
    with np.errstate(over="ignore"):
        vals = 1.0 / np.expm1(bp.beta * w)
    return _as_output(vals, np.ndim(omega) == 0)


def trigamma(z):
    """Trigamma function psi1(z) = sum_{k>=0} 1/(z+k)^2 for complex z.

    Evaluated by shifting with the recurrence psi1(z) = psi1(z+1) + 1/z^2
    until Re(z) >= 8 and then summing the asymptotic Bernoulli series

        psi1(z) ~ 1/z + 1/(2 z^2) + sum_k B_{2k} / z^{2k+1}.

    Relative accuracy is ~1e-13 or better for Re(z) > 0, including far out
    on the imaginary direction.  Poles at non-positive real integers raise.
    """
    z_in = np.asarray(z, dtype=np.complex128)
    scalar = z_in.ndim == 0
    zc = z_in.reshape(-1).copy()

    on_axis = zc.imag == 0.0
    if np.any(on_axis & (zc.real <= 0.0) & (zc.real == np.floor(zc.real))):
        raise ValueError("trigamma has poles at non-positive real integers")

    acc = np.zeros_like(zc)
    while True:
        mask = zc.real < _ASYMPTOTIC_RE
        if not mask.any():
            break
        zm = zc[mask]
        acc[mask] += 1.0 / (zm * zm)
        zc[mask] = zm + 1.0

    w = 1.0 / (zc * zc)
    series = np.full_like(zc, _BERNOULLI[-1])
    for b in _BERNOULLI[-2::-1]:
        series = series * w + b
    vals = acc + 1.0 / zc + 0.5 * w + (w / zc) * series
    vals = vals.reshape(z_in.shape)
    return _as_output(vals, scalar)


def correlation(s, bp: BathParams):
    """Closed-form bath correlation function C(s) for time lags s >= 0.

    The trigamma term carries the (explicitly real) thermal contribution;
    the imaginary part comes only from the temperature-independent
    1/(s*omega_c + i)^2 term.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0):
        raise ValueError("correlation is defined for time lags s >= 0")
    bw = bp.beta * bp.omega_c
    z = 1.0 / bw + 1j * (s_arr / bp.beta)
    thermal = 2.0 * np.real(trigamma(z)) / (bw * bw)
    vacuum = 1.0 / (s_arr * bp.omega_c + 1j) ** 2
    vals = bp.gamma * bp.omega_c**2 * (thermal + vacuum)
    return _as_output(vals, np.ndim(s) == 0)


def correlation_quadrature(s: float, bp: BathParams, *, omega_max: float | None = None,
                           epsrel: float = 1e-12) -> complex:
    """Cross-check oracle: integrate the spectral form of C(s) numerically.

        C(s) = integral_0^inf dw gamma*w*exp(-w/omega_c)
                 * [coth(beta*w/2)*cos(w*s) - i*sin(w*s)]

    Adaptive panels split at omega_c, truncated at 50*omega_c by default
    (the exponential cutoff makes the remainder negligible).  The w -> 0
    limit of w*coth(beta*w/2) is taken analytically to avoid 0/0.  Accepts
    negative s as well, which the closed form does not; that makes this the
    reference for the conjugate-symmetry property C(-s) == conj(C(s)).

    Slow by design; shares no code with `correlation`.
    """
    from scipy.integrate import quad

    g, wc, beta = bp.gamma, bp.omega_c, bp.beta
    if omega_max is None:
        omega_max = 50.0 * wc

    def even_weight(w: float) -> float:
        # g * w * exp(-w/wc) * coth(beta*w/2), finite at w -> 0
        if w < 1e-8 * wc:
            return 2.0 * g / beta
        return g * w * math.exp(-w / wc) / math.tanh(0.5 * beta * w)

    def odd_weight(w: float) -> float:
        return g * w * math.exp(-w / wc)

    scale = g * wc * wc * (1.0 + 2.0 / (beta * wc))
    epsabs = 1e-14 * scale
    re = 0.0
    im = 0.0
    for lo, hi in ((0.0, wc), (wc, omega_max)):
        re += quad(even_weight, lo, hi, weight="cos", wvar=s,
                   epsabs=epsabs, epsrel=epsrel, limit=400)[0]
        im -= quad(odd_weight, lo, hi, weight="sin", wvar=s,
                   epsabs=epsabs, epsrel=epsrel, limit=400)[0]
    return complex(re, im)
