"""Flux, eigenstructure and wave-fan curves of the Baiti-Jenssen system.

Conserved variables are ``U = (u, v, w)``.  The flux is

    F1 = 4[(v-1)u - w] + eta * (2uw - 2u^2 (v-1))
    F2 = v^2
    F3 = 4[v(v-2)u - (v-1)w] + eta * (w^2 - u^2 (v-2) v)

1- and 3-wave fan curves are straight lines in the plane ``v = const``; the
second component obeys Burgers' equation on its own.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .constants import DEGENERATE_GAP, ETA_MAX, RH_REL_TOL
from .errors import NearDegenerate, NoConvergence, RHViolation, ZeroJump

__all__ = [
    "FluxParams",
    "state",
    "flux",
    "jacobian",
    "eigenvalues",
    "eigenvector",
    "wave_curve",
    "shock_speed",
    "rh_residual",
]

FAMILIES = (1, 2, 3)
NP = 4


@dataclass(frozen=True)
class FluxParams:
    eta: float

    def __post_init__(self):
        if not (0.0 <= self.eta < ETA_MAX):
            raise ValueError(f"eta must lie in [0, {ETA_MAX}), got {self.eta}")


def _eta(p):
    if isinstance(p, FluxParams):
        return float(p.eta)
    return float(p)


def state(u, v=None, w=None):
    """Coerce to a float array of length 3."""
    if v is None:
        arr = np.asarray(u, dtype=float).reshape(3)
    else:
        arr = np.array([u, v, w], dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("state components must be finite")
    return arr


def flux(U, p):
    u, v, w = state(U)
    return np.array(K.flux(u, v, w, _eta(p)))


def jacobian(U, p):
    u, v, w = state(U)
    return np.array(K.jacobian(u, v, w, _eta(p))).reshape(3, 3)


def eigenvalues(U, p):
    u, v, w = state(U)
    return K.eigenvalues(u, v, w, _eta(p))


def eigenvector(i, U, p):
    """Right eigenvector r_i; r1 = (1,0,v), r3 = (1,0,v-2), r2 has v-component 1."""
    u, v, w = state(U)
    if i == 1:
        return np.array([1.0, 0.0, v])
    if i == 3:
        return np.array([1.0, 0.0, v - 2.0])
    if i != 2:
        raise ValueError(f"family must be 1, 2 or 3, got {i}")
    a, _, c, flag = K.r2(u, v, w, _eta(p))
    if flag != K.OK:
        raise NearDegenerate(f"eigenvalues closer than {DEGENERATE_GAP} at {U}")
    return np.array([a, 1.0, c])


def wave_curve(i, s, U0, p):
    """D_i[s, U0]."""
    if i not in FAMILIES:
        raise ValueError(f"family must be 1, 2 or 3, got {i}")
    u, v, w = state(U0)
    uu, vv, ww, flag = K.wave_curve(i, float(s), u, v, w, _eta(p))
    if flag == K.FAIL_NEWTON:
        raise NoConvergence(f"2-Hugoniot Newton failed at s={s}, U0={U0}")
    if flag == K.FAIL_DEGENERATE:
        raise NearDegenerate(f"r2 undefined along the curve from {U0}")
    return np.array([uu, vv, ww])


def rh_residual(Uminus, Uplus, speed, p):
    a = state(Uminus)
    b = state(Uplus)
    return K.rh_residual(a[0], a[1], a[2], b[0], b[1], b[2], float(speed), _eta(p))


def shock_speed(Uminus, Uplus, i, p):
    a = state(Uminus)
    b = state(Uplus)
    jump = float(np.linalg.norm(b - a))
    if jump == 0.0:
        raise ZeroJump("identical states have no shock speed")
    eta = _eta(p)
    if i == 2:
        speed = a[1] + b[1]
    elif i in (1, 3):
        speed = K.shock_speed_13(a[0], a[1], a[2], b[0], b[1], b[2], eta)
    else:
        raise ValueError(f"family must be 1, 2 or 3, got {i}")
    res = K.rh_residual(a[0], a[1], a[2], b[0], b[1], b[2], speed, eta)
    if res > RH_REL_TOL * jump:
        raise RHViolation(f"RH residual {res:.3e} exceeds {RH_REL_TOL:g} * |jump|")
    return float(speed)
