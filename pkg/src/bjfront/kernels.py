"""Scalar kernels for the Baiti-Jenssen flux.

States travel as plain ``(u, v, w)`` float triples so that the same code is
valid under numba and under plain Python.  Functions return a trailing
status flag instead of raising; the public wrappers in :mod:`bjfront.system`
and :mod:`bjfront.riemann` translate flags into exceptions.
"""
import math

from ._jit import njit
from .constants import (
    DEGENERATE_GAP,
    NEWTON_MAXIT,
    NEWTON_RES_TOL,
    NEWTON_STEP_TOL,
    RK4_MAX_STEP,
    RK4_MIN_STEPS,
)

OK = 0
FAIL_DEGENERATE = 1
FAIL_NEWTON = 2


@njit
def flux(u, v, w, eta):
    p1 = 2.0 * u * w - 2.0 * u * u * (v - 1.0)
    p3 = w * w - u * u * (v - 2.0) * v
    f1 = 4.0 * ((v - 1.0) * u - w) + eta * p1
    f2 = v * v
    f3 = 4.0 * (v * (v - 2.0) * u - (v - 1.0) * w) + eta * p3
    return f1, f2, f3


@njit
def jacobian(u, v, w, eta):
    """Row-major 3x3 Jacobian as a 9-tuple."""
    j11 = 4.0 * (v - 1.0) + eta * (2.0 * w - 4.0 * u * (v - 1.0))
    j12 = 4.0 * u - 2.0 * eta * u * u
    j13 = -4.0 + 2.0 * eta * u
    j31 = 4.0 * v * (v - 2.0) - 2.0 * eta * u * v * (v - 2.0)
    j32 = 4.0 * (2.0 * (v - 1.0) * u - w) - 2.0 * eta * u * u * (v - 1.0)
    j33 = -4.0 * (v - 1.0) + 2.0 * eta * w
    return j11, j12, j13, 0.0, 2.0 * v, 0.0, j31, j32, j33


@njit
def eigenvalues(u, v, w, eta):
    l1 = 2.0 * eta * (w - (v - 2.0) * u) - 4.0
    l2 = 2.0 * v
    l3 = 2.0 * eta * (w - v * u) + 4.0
    return l1, l2, l3


@njit
def lam(fam, u, v, w, eta):
    if fam == 1:
        return 2.0 * eta * (w - (v - 2.0) * u) - 4.0
    if fam == 2:
        return 2.0 * v
    return 2.0 * eta * (w - v * u) + 4.0


@njit
def r2(u, v, w, eta):
    """Second eigenvector with unit v-component; status flag last."""
    j11, j12, j13, _, _, _, j31, j32, j33 = jacobian(u, v, w, eta)
    a11 = j11 - 2.0 * v
    a22 = j33 - 2.0 * v
    det = a11 * a22 - j13 * j31
    l1, l2, l3 = eigenvalues(u, v, w, eta)
    if abs(l1 - l2) < DEGENERATE_GAP or abs(l3 - l2) < DEGENERATE_GAP:
        return 0.0, 1.0, 0.0, FAIL_DEGENERATE
    a = (-j12 * a22 + j13 * j32) / det
    c = (-a11 * j32 + j31 * j12) / det
    return a, 1.0, c, OK


@njit
def integral_curve2(s, u, v, w, eta):
    """Integral curve of r2 through (u, v, w), parameter = increment of v."""
    if s == 0.0:
        return u, v, w, OK
    n = int(math.ceil(abs(s) / RK4_MAX_STEP))
    if n < RK4_MIN_STEPS:
        n = RK4_MIN_STEPS
    h = s / n
    uu = u
    ww = w
    flag = OK
    for k in range(n):
        vv = v + k * h
        a1, _, c1, f1 = r2(uu, vv, ww, eta)
        a2, _, c2, f2 = r2(uu + 0.5 * h * a1, vv + 0.5 * h, ww + 0.5 * h * c1, eta)
        a3, _, c3, f3 = r2(uu + 0.5 * h * a2, vv + 0.5 * h, ww + 0.5 * h * c2, eta)
        a4, _, c4, f4 = r2(uu + h * a3, vv + h, ww + h * c3, eta)
        if f1 + f2 + f3 + f4 != OK:
            flag = FAIL_DEGENERATE
        uu += h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
        ww += h * (c1 + 2.0 * c2 + 2.0 * c3 + c4) / 6.0
    return uu, v + s, ww, flag


@njit
def hugoniot2(s, u, v, w, eta):
    """Point of the 2-Hugoniot locus of (u, v, w) with v-component v + s."""
    if s == 0.0:
        return u, v, w, OK
    vp = v + s
    lam_s = v + vp
    a, _, c, flag = r2(u, v, w, eta)
    if flag != OK:
        return u, vp, w, flag
    up = u + s * a
    wp = w + s * c
    g1, _, g3 = flux(u, v, w, eta)
    for _ in range(NEWTON_MAXIT):
        f1, _, f3 = flux(up, vp, wp, eta)
        r1 = f1 - g1 - lam_s * (up - u)
        r3 = f3 - g3 - lam_s * (wp - w)
        j11, _, j13, _, _, _, j31, _, j33 = jacobian(up, vp, wp, eta)
        a11 = j11 - lam_s
        a22 = j33 - lam_s
        det = a11 * a22 - j13 * j31
        du = -(a22 * r1 - j13 * r3) / det
        dw = -(-j31 * r1 + a11 * r3) / det
        up += du
        wp += dw
        if abs(du) + abs(dw) <= NEWTON_STEP_TOL * (1.0 + abs(up) + abs(wp)):
            return up, vp, wp, OK
    f1, _, f3 = flux(up, vp, wp, eta)
    res = abs(f1 - g1 - lam_s * (up - u)) + abs(f3 - g3 - lam_s * (wp - w))
    if res <= NEWTON_RES_TOL * (1.0 + abs(s)):
        return up, vp, wp, OK
    return up, vp, wp, FAIL_NEWTON


@njit
def wave_curve(fam, s, u, v, w, eta):
    """D_fam[s, U]; returns (u, v, w, flag)."""
    if fam == 1:
        return u + s, v, w + s * v, OK
    if fam == 3:
        return u + s, v, w + s * (v - 2.0), OK
    if s >= 0.0:
        return integral_curve2(s, u, v, w, eta)
    return hugoniot2(s, u, v, w, eta)


@njit
def compose(sig, s, tau, u, v, w, eta):
    """D3[tau, D2[s, D1[sig, U]]]."""
    u1, v1, w1, _ = wave_curve(1, sig, u, v, w, eta)
    u2, v2, w2, flag = wave_curve(2, s, u1, v1, w1, eta)
    u3, v3, w3, _ = wave_curve(3, tau, u2, v2, w2, eta)
    return u3, v3, w3, flag


@njit
def shock_speed_13(ul, vl, wl, ur, vr, wr, eta):
    """RH quotient on the component with the largest jump."""
    f1l, f2l, f3l = flux(ul, vl, wl, eta)
    f1r, f2r, f3r = flux(ur, vr, wr, eta)
    du = ur - ul
    dv = vr - vl
    dw = wr - wl
    if abs(du) >= abs(dv) and abs(du) >= abs(dw):
        return (f1r - f1l) / du
    if abs(dw) >= abs(dv):
        return (f3r - f3l) / dw
    return (f2r - f2l) / dv


@njit
def rh_residual(ul, vl, wl, ur, vr, wr, speed, eta):
    f1l, f2l, f3l = flux(ul, vl, wl, eta)
    f1r, f2r, f3r = flux(ur, vr, wr, eta)
    a = f1r - f1l - speed * (ur - ul)
    b = f2r - f2l - speed * (vr - vl)
    c = f3r - f3l - speed * (wr - wl)
    return math.sqrt(a * a + b * b + c * c)


@njit
def wave_speed(fam, prm, ul, vl, wl, ur, vr, wr, eta, lam_hat):
    """Front speed: shocks by RH, rarefaction fronts by lambda of the right state."""
    if fam == 4:
        return lam_hat
    if fam == 2:
        if prm < 0.0:
            return vl + vr
        return 2.0 * vr
    # D1 and D3 are lines along which lambda is affine, so the RH speed is
    # the mean of the end values; this avoids cancellation on tiny jumps
    if fam == 1:
        if prm < 0.0:
            return 0.5 * (lam(1, ul, vl, wl, eta) + lam(1, ur, vr, wr, eta))
        return lam(1, ur, vr, wr, eta)
    if prm > 0.0:
        return 0.5 * (lam(3, ul, vl, wl, eta) + lam(3, ur, vr, wr, eta))
    return lam(3, ur, vr, wr, eta)


@njit
def _solve2(a11, a12, a21, a22, b1, b2):
    det = a11 * a22 - a12 * a21
    return (a22 * b1 - a12 * b2) / det, (-a21 * b1 + a11 * b2) / det


@njit
def riemann(ul, vl, wl, ur, vr, wr, eta):
    """Strengths (sigma, s, tau) with D3[tau, D2[s, D1[sigma, UL]]] = UR.

    The v-equation is decoupled (only D2 moves v), so s = vR - vL exactly
    and a damped Newton iteration runs on the (u, w) components.
    """
    s = vr - vl
    v2 = vl + s
    # initial guess from the straight 1- and 3-directions
    um, _, wm, flag = wave_curve(2, s, ul, vl, wl, eta)
    if flag != OK:
        return 0.0, s, 0.0, flag
    sig, tau = _solve2(1.0, 1.0, vl, v2 - 2.0, ur - um, wr - wm)
    hfd = 1e-7
    res_old = 1e300
    for it in range(NEWTON_MAXIT):
        u1 = ul + sig
        w1 = wl + sig * vl
        u2, _, w2, flag = wave_curve(2, s, u1, vl, w1, eta)
        if flag != OK:
            return sig, s, tau, flag
        e1 = u2 + tau - ur
        e3 = w2 + tau * (v2 - 2.0) - wr
        res = abs(e1) + abs(e3)
        if res <= NEWTON_RES_TOL * 1e-2:
            return sig, s, tau, OK
        # d/dsigma of D2[s, UL + sigma r1]
        if s == 0.0:
            c1u = 1.0
            c1w = vl
        else:
            up_, _, wp_, _ = wave_curve(2, s, u1 + hfd, vl, w1 + hfd * vl, eta)
            um_, _, wm_, _ = wave_curve(2, s, u1 - hfd, vl, w1 - hfd * vl, eta)
            c1u = (up_ - um_) / (2.0 * hfd)
            c1w = (wp_ - wm_) / (2.0 * hfd)
        dsig, dtau = _solve2(c1u, 1.0, c1w, v2 - 2.0, -e1, -e3)
        # damping: backtrack while the residual grows
        lam_d = 1.0
        for _ in range(30):
            st = sig + lam_d * dsig
            tt = tau + lam_d * dtau
            u1t = ul + st
            w1t = wl + st * vl
            u2t, _, w2t, _ = wave_curve(2, s, u1t, vl, w1t, eta)
            rt = abs(u2t + tt - ur) + abs(w2t + tt * (v2 - 2.0) - wr)
            if rt < res or rt <= NEWTON_RES_TOL * 1e-2:
                break
            lam_d *= 0.5
        step = lam_d * (abs(dsig) + abs(dtau))
        sig += lam_d * dsig
        tau += lam_d * dtau
        if step <= NEWTON_STEP_TOL * (1.0 + abs(sig) + abs(tau)) and res < res_old:
            # one last residual check
            u1 = ul + sig
            w1 = wl + sig * vl
            u2, _, w2, _ = wave_curve(2, s, u1, vl, w1, eta)
            res = abs(u2 + tau - ur) + abs(w2 + tau * (v2 - 2.0) - wr)
            if res <= NEWTON_RES_TOL:
                return sig, s, tau, OK
        res_old = res
    u1 = ul + sig
    w1 = wl + sig * vl
    u2, _, w2, _ = wave_curve(2, s, u1, vl, w1, eta)
    res = abs(u2 + tau - ur) + abs(w2 + tau * (v2 - 2.0) - wr)
    if res <= NEWTON_RES_TOL:
        return sig, s, tau, OK
    return sig, s, tau, FAIL_NEWTON


@njit
def inverse_wave(fam, s, ur, vr, wr, eta):
    """U with D_fam[s, U] = UR."""
    if fam == 1:
        v = vr
        return ur - s, v, wr - s * v, OK
    if fam == 3:
        v = vr
        return ur - s, v, wr - s * (v - 2.0), OK
    if s >= 0.0:
        return integral_curve2(-s, ur, vr, wr, eta)
    # the Hugoniot relation is symmetric in the two states
    return hugoniot2(-s, ur, vr, wr, eta)
