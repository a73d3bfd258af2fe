"""Array-level Riemann solver kernels shared by :mod:`riemann` and the engine.

A wave list is returned as parallel arrays

    fam[n]     family (1, 2, 3, or 4 for non-physical)
    prm[n]     signed wave-curve parameter (NP: Euclidean jump size)
    st[n, 6]   left state (0:3) and right state (3:6)
    spd[n]     front speed
    kind[n]    0 shock, 1 rarefaction front, 2 non-physical
"""
import math

import numpy as np

from ._jit import njit
from . import kernels as K
from .constants import WAVE_FLOOR

SHOCK = 0
RAREFACTION = 1
NONPHYSICAL = 2
NPFAM = 4


@njit
def is_shock_side(fam, prm):
    if fam == 3:
        return prm > 0.0
    return prm < 0.0


@njit
def _n_pieces(fam, prm, nu):
    if abs(prm) <= WAVE_FLOOR:
        return 0
    if is_shock_side(fam, prm):
        return 1
    n = int(math.ceil(abs(prm) / nu - 1e-12))
    if n < 1:
        n = 1
    return n


@njit
def _emit(fam, prm, n, a, st, fam_o, prm_o, spd_o, kind_o, k, eta, lam_hat):
    """Write the n fronts of one elementary wave starting from state a."""
    ua, va, wa = a[0], a[1], a[2]
    flag = K.OK
    if n == 1:
        ub, vb, wb, flag = K.wave_curve(fam, prm, ua, va, wa, eta)
        st[k, 0] = ua
        st[k, 1] = va
        st[k, 2] = wa
        st[k, 3] = ub
        st[k, 4] = vb
        st[k, 5] = wb
        fam_o[k] = fam
        prm_o[k] = prm
        kind_o[k] = SHOCK if is_shock_side(fam, prm) else RAREFACTION
        spd_o[k] = K.wave_speed(fam, prm, ua, va, wa, ub, vb, wb, eta, lam_hat)
        a[0] = ub
        a[1] = vb
        a[2] = wb
        return k + 1, flag
    dp = prm / n
    ul, vl, wl = ua, va, wa
    for j in range(1, n + 1):
        ub, vb, wb, f = K.wave_curve(fam, prm * j / n, ua, va, wa, eta)
        if f != K.OK:
            flag = f
        st[k, 0] = ul
        st[k, 1] = vl
        st[k, 2] = wl
        st[k, 3] = ub
        st[k, 4] = vb
        st[k, 5] = wb
        fam_o[k] = fam
        prm_o[k] = dp
        kind_o[k] = RAREFACTION
        spd_o[k] = K.lam(fam, ub, vb, wb, eta)
        ul, vl, wl = ub, vb, wb
        k += 1
    a[0] = ul
    a[1] = vl
    a[2] = wl
    return k, flag


@njit
def waves_from_fan(sig, s, tau, ul, vl, wl, ur, vr, wr, eta, nu, lam_hat):
    """Expand a solved fan into fronts; the last right state is snapped to UR."""
    n1 = _n_pieces(1, sig, nu)
    n2 = _n_pieces(2, s, nu)
    n3 = _n_pieces(3, tau, nu)
    n = n1 + n2 + n3
    fam_o = np.zeros(n, np.int64)
    prm_o = np.zeros(n)
    st = np.zeros((n, 6))
    spd_o = np.zeros(n)
    kind_o = np.zeros(n, np.int64)
    a = np.empty(3)
    a[0] = ul
    a[1] = vl
    a[2] = wl
    k = 0
    flag = K.OK
    if n1 > 0:
        k, f = _emit(1, sig, n1, a, st, fam_o, prm_o, spd_o, kind_o, k, eta, lam_hat)
        flag = max(flag, f)
    if n2 > 0:
        k, f = _emit(2, s, n2, a, st, fam_o, prm_o, spd_o, kind_o, k, eta, lam_hat)
        flag = max(flag, f)
    if n3 > 0:
        k, f = _emit(3, tau, n3, a, st, fam_o, prm_o, spd_o, kind_o, k, eta, lam_hat)
        flag = max(flag, f)
    if n > 0:
        st[n - 1, 3] = ur
        st[n - 1, 4] = vr
        st[n - 1, 5] = wr
    return fam_o, prm_o, st, spd_o, kind_o, flag


@njit
def accurate_waves(ul, vl, wl, ur, vr, wr, eta, nu, lam_hat):
    sig, s, tau, flag = K.riemann(ul, vl, wl, ur, vr, wr, eta)
    fam_o, prm_o, st, spd_o, kind_o, f2 = waves_from_fan(
        sig, s, tau, ul, vl, wl, ur, vr, wr, eta, nu, lam_hat
    )
    return fam_o, prm_o, st, spd_o, kind_o, max(flag, f2)


@njit
def simplified_waves(fa, pa, fb, pb, ul, vl, wl, ur, vr, wr, eta, lam_hat, np_floor):
    """Simplified solver for the pairs (2,1), (3,2), (2,2) (left, right).

    Physical waves keep their incoming strengths and are laid out from the
    left state; the residual goes into one non-physical front.  Returns the
    wave arrays plus the size of a residual too small to be emitted
    (at most ``np_floor``), which is absorbed into the last physical wave.
    """
    if fa == 2 and fb == 2:
        nphys = 1
        f0 = 2
        p0 = pa + pb
        f1 = 0
        p1 = 0.0
    elif fa == 2 and fb == 1:
        nphys = 2
        f0 = 1
        p0 = pb
        f1 = 2
        p1 = pa
    else:
        nphys = 2
        f0 = 2
        p0 = pb
        f1 = 3
        p1 = pa
    flag = K.OK
    um, vm, wm, f = K.wave_curve(f0, p0, ul, vl, wl, eta)
    flag = max(flag, f)
    if nphys == 2:
        uq, vq, wq, f = K.wave_curve(f1, p1, um, vm, wm, eta)
        flag = max(flag, f)
    else:
        uq, vq, wq = um, vm, wm
    ju = ur - uq
    jv = vr - vq
    jw = wr - wq
    jump = math.sqrt(ju * ju + jv * jv + jw * jw)
    emit_np = jump > np_floor
    n = nphys + (1 if emit_np else 0)
    fam_o = np.zeros(n, np.int64)
    prm_o = np.zeros(n)
    st = np.zeros((n, 6))
    spd_o = np.zeros(n)
    kind_o = np.zeros(n, np.int64)
    fam_o[0] = f0
    prm_o[0] = p0
    st[0, 0] = ul
    st[0, 1] = vl
    st[0, 2] = wl
    st[0, 3] = um
    st[0, 4] = vm
    st[0, 5] = wm
    if nphys == 2:
        fam_o[1] = f1
        prm_o[1] = p1
        st[1, 0] = um
        st[1, 1] = vm
        st[1, 2] = wm
        st[1, 3] = uq
        st[1, 4] = vq
        st[1, 5] = wq
    if emit_np:
        fam_o[n - 1] = NPFAM
        prm_o[n - 1] = jump
        st[n - 1, 0] = uq
        st[n - 1, 1] = vq
        st[n - 1, 2] = wq
        st[n - 1, 3] = ur
        st[n - 1, 4] = vr
        st[n - 1, 5] = wr
        kind_o[n - 1] = NONPHYSICAL
        spd_o[n - 1] = lam_hat
        absorbed = 0.0
    else:
        st[nphys - 1, 3] = ur
        st[nphys - 1, 4] = vr
        st[nphys - 1, 5] = wr
        absorbed = jump
    for k in range(nphys):
        kind_o[k] = SHOCK if is_shock_side(fam_o[k], prm_o[k]) else RAREFACTION
        spd_o[k] = K.wave_speed(
            fam_o[k], prm_o[k], st[k, 0], st[k, 1], st[k, 2],
            st[k, 3], st[k, 4], st[k, 5], eta, lam_hat,
        )
    return fam_o, prm_o, st, spd_o, kind_o, flag, absorbed
