"""JIT-compiled numerical kernels.

Hot loops live here: the adaptive embedded Runge-Kutta integrators for the
master equation and for the bare Schrodinger oracle, the panel generator for
the memory-kernel quadrature, and cubic table interpolation.  Everything is
scalar float math so numba can compile it to tight machine code; the
module-level Python API wraps these with proper types and validation.

The master-equation state is carried as 9 reals: the full 2x2 complex
matrix (both off-diagonals independently, so that trace and Hermiticity
drift are genuine measurements of integrator quality rather than being
enforced structurally) plus the work accumulator.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Dormand-Prince 5(4) pair, FSAL.
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_TRACE_DRIFT = 2
STATUS_MAX_STEPS = 3

_TRACE_DRIFT_LIMIT = 1e-7
_MAX_STEPS = 200_000_000


@njit(cache=True)
def phase_antiderivative(x, v, eps):
    """Scalar twin of lzmodel._phase_antiderivative (kept bit-consistent by test)."""
    u = v * x / eps
    au = abs(u)
    if au > 1e4:
        w = 1.0 / (au * au)
        sgn = 1.0 if x >= 0.0 else -1.0
        return sgn * (v * x * x * (1.0 + 0.5 * w - 0.125 * w * w)
                      + (eps * eps / v) * (math.log(2.0 * au) + 0.25 * w - 0.09375 * w * w))
    return x * math.hypot(v * x, eps) + (eps * eps / v) * math.asinh(u)


@njit(cache=True)
def rate_panel_bounds(t, s_hi, v, eps, omega_c, tau_lz):
    """Panel boundaries for the lag integrals at observation time t.

    Width limits: (a) accumulated oscillation phase per panel, pi/2 near the
    head of the kernel, relaxed up to 4*pi deep in the power-law tail where
    the correlation amplitude is tiny (the Kronrod rule still resolves that,
    and the embedded error estimate guards it); (b) the smoothness scales of
    the correlation function and of the mixing-angle weights, which both
    grow linearly once s exceeds them.
    """
    smooth0 = 0.5 * min(1.0 / omega_c, tau_lz)
    # worst-case panel count for preallocation
    e_max = max(math.hypot(v * t, eps), math.hypot(v * (t - s_hi), eps))
    h_min = min(smooth0, math.pi / (4.0 * e_max))
    n_max = int(s_hi / h_min) + 8
    bounds = np.empty(n_max, dtype=np.float64)
    bounds[0] = 0.0
    k = 1
    s = 0.0
    while s < s_hi and k < n_max:
        relax = s * omega_c / 10.0
        if relax < 1.0:
            relax = 1.0
        elif relax > 8.0:
            relax = 8.0
        h = smooth0 + 0.25 * s
        e1 = math.hypot(v * (t - s), eps)
        osc = relax * math.pi / (4.0 * e1)
        if osc < h:
            h = osc
        e2 = math.hypot(v * (t - s - h), eps)
        if e2 > e1:
            osc = relax * math.pi / (4.0 * e2)
            if osc < h:
                h = osc
        s = s + h
        if s >= s_hi - 1e-12 * s_hi:
            s = s_hi
        bounds[k] = s
        k += 1
    return bounds[:k]


@njit(cache=True)
def _interp5_seg(tab_t0, tab_dt, vals, t):
    """Local cubic (4-point Lagrange) interpolation on one uniform segment.

    Exact at the nodes; stencil clamped at the segment edges.
    """
    n = vals.shape[0]
    x = (t - tab_t0) / tab_dt
    j = int(math.floor(x))
    if j < 1:
        j = 1
    if j > n - 3:
        j = n - 3
    u = x - j
    wm = -u * (u - 1.0) * (u - 2.0) / 6.0
    w0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0
    w1 = -(u + 1.0) * u * (u - 2.0) / 2.0
    w2 = (u + 1.0) * u * (u - 1.0) / 6.0
    gp = wm * vals[j - 1, 0] + w0 * vals[j, 0] + w1 * vals[j + 1, 0] + w2 * vals[j + 2, 0]
    gm = wm * vals[j - 1, 1] + w0 * vals[j, 1] + w1 * vals[j + 1, 1] + w2 * vals[j + 2, 1]
    gz = wm * vals[j - 1, 2] + w0 * vals[j, 2] + w1 * vals[j + 1, 2] + w2 * vals[j + 2, 2]
    sp = wm * vals[j - 1, 3] + w0 * vals[j, 3] + w1 * vals[j + 1, 3] + w2 * vals[j + 2, 3]
    sm = wm * vals[j - 1, 4] + w0 * vals[j, 4] + w1 * vals[j + 1, 4] + w2 * vals[j + 2, 4]
    return gp, gm, gz, sp, sm


@njit(cache=True)
def _interp5(h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals, t):
    """Rate lookup across the dense switch-on head and the uniform tail."""
    if t <= t_split:
        return _interp5_seg(h_t0, h_dt, h_vals, t)
    return _interp5_seg(l_t0, l_dt, l_vals, t)


@njit(cache=True)
def _master_rhs(t, y, dy, v, eps, f_t0, alpha_sign, l0_on, lb_on, lamb_on,
                h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals):
    eer, eei, egr, egi, ger, gei, ggr, ggi = (y[0], y[1], y[2], y[3],
                                              y[4], y[5], y[6], y[7])
    deer = 0.0
    deei = 0.0
    degr = 0.0
    degi = 0.0
    dger = 0.0
    dgei = 0.0
    dggr = 0.0
    dggi = 0.0

    e = math.hypot(v * t, eps)
    phi = -(phase_antiderivative(t, v, eps) - f_t0)
    cph = math.cos(phi)
    sph = math.sin(phi)

    if l0_on:
        a = alpha_sign * 0.5 * eps * v / (e * e)
        ar = -a * sph
        ai = -a * cph
        # q = alpha*ge - conj(alpha)*eg
        qr = ar * ger - ai * gei - ar * egr - ai * egi
        qi = ar * gei + ai * ger - ar * egi + ai * egr
        deer += qi
        deei += -qr
        dggr += -qi
        dggi += qr
        # -i*alpha*(gg - ee) on eg;  +i*conj(alpha)*(gg - ee) on ge
        wr = ggr - eer
        wi = ggi - eei
        pr = ar * wr - ai * wi
        pi = ar * wi + ai * wr
        degr += pi
        degi += -pr
        ur = ar * wr + ai * wi
        ui = ar * wi - ai * wr
        dger += -ui
        dgei += ur

    if lb_on:
        gp, gm, gz, sp, sm = _interp5(h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals, t)
        deer += -2.0 * gp * eer + 2.0 * gm * ggr
        deei += -2.0 * gp * eei + 2.0 * gm * ggi
        dggr += 2.0 * gp * eer - 2.0 * gm * ggr
        dggi += 2.0 * gp * eei - 2.0 * gm * ggi
        r = gp + gm + 4.0 * gz
        degr += -r * egr
        degi += -r * egi
        dger += -r * ger
        dgei += -r * gei
        if lamb_on:
            ds = sp - sm
            degr += ds * egi
            degi += -ds * egr
            dger += -ds * gei
            dgei += ds * ger

    dy[0] = deer
    dy[1] = deei
    dy[2] = degr
    dy[3] = degi
    dy[4] = dger
    dy[5] = dgei
    dy[6] = dggr
    dy[7] = dggi
    # tolerance-controlled work accumulator: dW/dt = v * <sigma_z> in the
    # fixed basis, expressed through the rotating-frame state
    cth = v * t / e
    sth = alpha_sign * eps / e
    dy[8] = v * (cth * (eer - ggr)
                 - sth * (cph * egr - sph * egi + cph * ger + sph * gei))


@njit(cache=True)
def _master_hmax(t, v, eps, tau_lz, omega_c, l0_on, atol):
    hm = 0.5 * min(tau_lz, 1.0 / omega_c)
    if l0_on:
        e = math.hypot(v * t, eps)
        a = 0.5 * eps * v / (e * e)
        # cap by the local phase rate only while the driven oscillation
        # amplitude is above the absolute tolerance
        if a / (2.0 * e) >= atol:
            osc = math.pi / (8.0 * e)
            if osc < hm:
                hm = osc
    return hm


@njit(cache=True)
def master_kernel(y0, t_start, t_out, v, eps, tau_lz, omega_c,
                  l0_on, lb_on, lamb_on, alpha_sign,
                  h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals,
                  rtol, atol):
    """Adaptive Dormand-Prince 5(4) integration of the rotating-frame master
    equation, landing exactly on every requested output time.

    Returns (y_out, status, last_t, n_steps, max_trace_err, max_herm_err).
    """
    n_out = t_out.shape[0]
    y_out = np.zeros((n_out, 9), dtype=np.float64)
    y = y0.copy()
    ynew = np.empty(9, dtype=np.float64)
    ystage = np.empty(9, dtype=np.float64)
    k1 = np.empty(9, dtype=np.float64)
    k2 = np.empty(9, dtype=np.float64)
    k3 = np.empty(9, dtype=np.float64)
    k4 = np.empty(9, dtype=np.float64)
    k5 = np.empty(9, dtype=np.float64)
    k6 = np.empty(9, dtype=np.float64)
    k7 = np.empty(9, dtype=np.float64)

    t = t_start
    t_end = t_out[n_out - 1]
    j = 0
    while j < n_out and t_out[j] <= t:
        for c in range(9):
            y_out[j, c] = y[c]
        j += 1

    max_tr = abs(y[0] + y[6] - 1.0) + abs(y[1] + y[7])
    max_he = 0.0
    n_steps = 0
    h_floor = 1e-13 * (t_end - t_start)

    f_t0 = phase_antiderivative(t_start, v, eps)
    _master_rhs(t, y, k1, v, eps, f_t0, alpha_sign, l0_on, lb_on, lamb_on,
                h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals)
    h = _master_hmax(t, v, eps, tau_lz, omega_c, l0_on, atol) * 0.1

    while j < n_out:
        if n_steps >= _MAX_STEPS:
            return y_out, STATUS_MAX_STEPS, t, n_steps, max_tr, max_he
        hmax = _master_hmax(t, v, eps, tau_lz, omega_c, l0_on, atol)
        if h > hmax:
            h = hmax
        landing = False
        if t + h >= t_out[j]:
            h = t_out[j] - t
            landing = True
        if h <= 0.0:
            # degenerate (duplicate output time); emit and continue
            for c in range(9):
                y_out[j, c] = y[c]
            j += 1
            h = hmax * 0.1
            continue

        for c in range(9):
            ystage[c] = y[c] + h * _A21 * k1[c]
        _master_rhs(t + _C2 * h, ystage, k2, v, eps, f_t0, alpha_sign,
                    l0_on, lb_on, lamb_on, h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals)
        for c in range(9):
            ystage[c] = y[c] + h * (_A31 * k1[c] + _A32 * k2[c])
        _master_rhs(t + _C3 * h, ystage, k3, v, eps, f_t0, alpha_sign,
                    l0_on, lb_on, lamb_on, h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals)
        for c in range(9):
            ystage[c] = y[c] + h * (_A41 * k1[c] + _A42 * k2[c] + _A43 * k3[c])
        _master_rhs(t + _C4 * h, ystage, k4, v, eps, f_t0, alpha_sign,
                    l0_on, lb_on, lamb_on, h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals)
        for c in range(9):
            ystage[c] = y[c] + h * (_A51 * k1[c] + _A52 * k2[c] + _A53 * k3[c] + _A54 * k4[c])
        _master_rhs(t + _C5 * h, ystage, k5, v, eps, f_t0, alpha_sign,
                    l0_on, lb_on, lamb_on, h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals)
        for c in range(9):
            ystage[c] = y[c] + h * (_A61 * k1[c] + _A62 * k2[c] + _A63 * k3[c]
                                    + _A64 * k4[c] + _A65 * k5[c])
        _master_rhs(t + h, ystage, k6, v, eps, f_t0, alpha_sign,
                    l0_on, lb_on, lamb_on, h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals)
        for c in range(9):
            ynew[c] = y[c] + h * (_B1 * k1[c] + _B3 * k3[c] + _B4 * k4[c]
                                  + _B5 * k5[c] + _B6 * k6[c])
        t_new = t_out[j] if landing else t + h
        _master_rhs(t_new, ynew, k7, v, eps, f_t0, alpha_sign,
                    l0_on, lb_on, lamb_on, h_t0, h_dt, h_vals, t_split, l_t0, l_dt, l_vals)

        err = 0.0
        for c in range(9):
            ec = h * (_E1 * k1[c] + _E3 * k3[c] + _E4 * k4[c]
                      + _E5 * k5[c] + _E6 * k6[c] + _E7 * k7[c])
            ay = abs(y[c])
            ay2 = abs(ynew[c])
            sc = atol + rtol * (ay if ay > ay2 else ay2)
            ec = ec / sc
            err += ec * ec
        err = math.sqrt(err / 9.0)
        n_steps += 1

        if err <= 1.0:
            t = t_new
            for c in range(9):
                y[c] = ynew[c]
                k1[c] = k7[c]
            tr = abs(y[0] + y[6] - 1.0) + abs(y[1] + y[7])
            if tr > max_tr:
                max_tr = tr
            he = abs(y[2] - y[4])
            he2 = abs(y[3] + y[5])
            if he2 > he:
                he = he2
            he2 = abs(y[1])
            if he2 > he:
                he = he2
            he2 = abs(y[7])
            if he2 > he:
                he = he2
            if he > max_he:
                max_he = he
            if tr > _TRACE_DRIFT_LIMIT:
                return y_out, STATUS_TRACE_DRIFT, t, n_steps, max_tr, max_he
            if landing:
                for c in range(9):
                    y_out[j, c] = y[c]
                j += 1
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
            if fac > 5.0:
                fac = 5.0
            h = h * fac
        else:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            h = h * fac
            if h < h_floor:
                return y_out, STATUS_STEP_UNDERFLOW, t, n_steps, max_tr, max_he

    return y_out, STATUS_OK, t, n_steps, max_tr, max_he


@njit(cache=True)
def _magnus_apply(y, t, h, v, eps):
    """One 4th-order Magnus step for the fixed-basis two-level problem.

    For H(t) = v*t*sigma_z + eps*sigma_x the two-point Gauss Magnus rotation
    vector has the closed form

        c = ( eps*h,  eps*v*h^3/6,  v*h*(t + h/2) )

    and the step applies exp(-i c.sigma), an exactly unitary 2x2 rotation,
    so the norm is preserved to round-off regardless of step size.
    """
    cx = eps * h
    cy = eps * v * h * h * h / 6.0
    cz = v * h * (t + 0.5 * h)
    w = math.sqrt(cx * cx + cy * cy + cz * cz)
    cw = math.cos(w)
    snc = math.sin(w) / w if w > 0.0 else 1.0
    ur, ui, dr, di = y[0], y[1], y[2], y[3]
    # -i*snc * (c . sigma) psi, with sigma in the fixed basis
    pu_r = cz * ur + cx * dr + cy * di
    pu_i = cz * ui + cx * di - cy * dr
    pd_r = cx * ur - cy * ui - cz * dr
    pd_i = cx * ui + cy * ur - cz * di
    return (cw * ur + snc * pu_i,
            cw * ui - snc * pu_r,
            cw * dr + snc * pd_i,
            cw * di - snc * pd_r)


@njit(cache=True)
def schrodinger_kernel(y0, t_start, t_out, v, eps, tau_lz, rtol, atol):
    """Adaptive Magnus(4) integration of the bare two-level Schrodinger
    equation in the fixed basis, with step-doubling error control.

    Each accepted step is the two-half-step solution, a product of exactly
    unitary rotations; the embedded estimate is the full-step/half-steps
    difference.  Returns (y_out, status, last_t, n_steps, max_norm_err).
    """
    n_out = t_out.shape[0]
    y_out = np.zeros((n_out, 4), dtype=np.float64)
    y = y0.copy()

    t = t_start
    t_end = t_out[n_out - 1]
    j = 0
    while j < n_out and t_out[j] <= t:
        for c in range(4):
            y_out[j, c] = y[c]
        j += 1

    max_norm = abs(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3] - 1.0)
    n_steps = 0
    h_floor = 1e-13 * (t_end - t_start)
    sc = atol + rtol
    # resolving the crossing feature (duration tau_lz, integrated weight
    # eps^2/v) only matters while that weight is above the error budget
    tau_cap = tau_lz if eps * eps / v > atol else math.inf
    e0 = math.hypot(v * t_start, eps)
    h = min(tau_cap, math.pi / (4.0 * e0), 0.1 * (t_end - t_start)) * 0.1

    while j < n_out:
        if n_steps >= _MAX_STEPS:
            return y_out, STATUS_MAX_STEPS, t, n_steps, max_norm
        e = math.hypot(v * t, eps)
        hmax = min(tau_cap, math.pi / (2.0 * e))
        if h > hmax:
            h = hmax
        landing = False
        if t + h >= t_out[j]:
            h = t_out[j] - t
            landing = True
        if h <= 0.0:
            for c in range(4):
                y_out[j, c] = y[c]
            j += 1
            h = hmax * 0.1
            continue

        f0, f1, f2, f3 = _magnus_apply(y, t, h, v, eps)
        a0, a1, a2, a3 = _magnus_apply(y, t, 0.5 * h, v, eps)
        yh = np.array([a0, a1, a2, a3])
        b0, b1, b2, b3 = _magnus_apply(yh, t + 0.5 * h, 0.5 * h, v, eps)

        err = math.sqrt(((b0 - f0) ** 2 + (b1 - f1) ** 2
                         + (b2 - f2) ** 2 + (b3 - f3) ** 2) / 4.0) / sc
        n_steps += 1

        if err <= 1.0:
            t = t_out[j] if landing else t + h
            y[0], y[1], y[2], y[3] = b0, b1, b2, b3
            nrm = abs(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3] - 1.0)
            if nrm > max_norm:
                max_norm = nrm
            if landing:
                for c in range(4):
                    y_out[j, c] = y[c]
                j += 1
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
            if fac > 5.0:
                fac = 5.0
            h = h * fac
        else:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            h = h * fac
            if h < h_floor:
                return y_out, STATUS_STEP_UNDERFLOW, t, n_steps, max_norm

    return y_out, STATUS_OK, t, n_steps, max_norm
