"""Riemann solvers and the well-prepared data classifier.

Sign conventions: ``sigma < 0`` is a 1-shock, ``s < 0`` a 2-shock and
``tau > 0`` a 3-shock; the opposite signs are rarefactions.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from . import waves as W
from .constants import LAMBDA_HAT, NEWTON_MAXIT, WAVE_FLOOR
from .errors import (
    HypothesisViolated,
    NoConvergence,
    StateOutOfRange,
    UnsupportedPair,
    WrongSide,
)
from .system import _eta, eigenvector, state, wave_curve

__all__ = [
    "WaveFan",
    "ElementaryWave",
    "PredictionReport",
    "compose",
    "solve_riemann",
    "discretize_rarefaction",
    "accurate_solver",
    "simplified_solver",
    "classify_well_prepared",
]

KIND_NAMES = {W.SHOCK: "shock", W.RAREFACTION: "rarefaction_front", W.NONPHYSICAL: "non_physical"}


@dataclass(frozen=True)
class WaveFan:
    sigma: float
    s: float
    tau: float

    def as_tuple(self):
        return (self.sigma, self.s, self.tau)

    def all_shocks(self):
        return self.sigma < 0 and self.s < 0 and self.tau > 0


@dataclass
class ElementaryWave:
    family: int  # 1, 2, 3 or 4 (non-physical)
    signed_param: float
    Uleft: np.ndarray
    Uright: np.ndarray
    speed: float
    kind: str

    @property
    def strength(self):
        if self.family == 2:
            return abs(self.Uright[1] - self.Uleft[1])
        if self.family == 4:
            return float(np.linalg.norm(self.Uright - self.Uleft))
        return abs(self.Uright[0] - self.Uleft[0])

    @property
    def is_np(self):
        return self.family == 4


def compose(UL, fan, p):
    """D3[tau, D2[s, D1[sigma, UL]]]."""
    sig, s, tau = fan.as_tuple() if isinstance(fan, WaveFan) else fan
    U = wave_curve(1, sig, UL, p)
    U = wave_curve(2, s, U, p)
    return wave_curve(3, tau, U, p)


def solve_riemann(UL, UR, p, check_range=True):
    a = state(UL)
    b = state(UR)
    if check_range and (
        np.linalg.norm(a) >= 0.9 or np.linalg.norm(b) >= 0.9 or np.linalg.norm(b - a) >= 0.3
    ):
        raise StateOutOfRange(f"Riemann data outside the solver range: {a}, {b}")
    sig, s, tau, flag = K.riemann(a[0], a[1], a[2], b[0], b[1], b[2], _eta(p))
    if flag != K.OK:
        raise NoConvergence(f"Riemann Newton failed after {NEWTON_MAXIT} iterations")
    return WaveFan(float(sig), float(s), float(tau))


def _to_waves(arrs):
    fam, prm, st, spd, kind = arrs[:5]
    out = []
    for k in range(len(fam)):
        out.append(
            ElementaryWave(
                int(fam[k]), float(prm[k]), st[k, :3].copy(), st[k, 3:].copy(),
                float(spd[k]), KIND_NAMES[int(kind[k])],
            )
        )
    return out


def discretize_rarefaction(family, U0, s, nu, p, lambda_hat=LAMBDA_HAT):
    """Split a rarefaction into ceil(|s|/nu) equal fronts."""
    if family not in (1, 2, 3):
        raise ValueError(f"family must be 1, 2 or 3, got {family}")
    if W.is_shock_side(family, s):
        raise WrongSide(f"parameter {s} lies on the shock side of family {family}")
    if s == 0:
        return []
    u = state(U0)
    end = wave_curve(family, s, u, p)
    fan = [0.0, 0.0, 0.0]
    fan[family - 1] = float(s)
    arrs = W.waves_from_fan(fan[0], fan[1], fan[2], u[0], u[1], u[2],
                            end[0], end[1], end[2], _eta(p), float(nu), lambda_hat)
    return _to_waves(arrs)


def accurate_solver(UL, UR, p, nu, lambda_hat=LAMBDA_HAT):
    fan = solve_riemann(UL, UR, p)
    a = state(UL)
    b = state(UR)
    arrs = W.waves_from_fan(fan.sigma, fan.s, fan.tau, a[0], a[1], a[2],
                            b[0], b[1], b[2], _eta(p), float(nu), lambda_hat)
    return _to_waves(arrs)


def simplified_solver(incoming, p, lambda_hat=LAMBDA_HAT, nu=None):
    """Simplified solver for a pair of interacting physical waves.

    ``incoming`` is (left wave, right wave).  Pairs 2&1, 3&2 and 2&2 are
    handled here; 1&3, 1&1 and 3&3 delegate to the accurate solver.
    """
    left, right = incoming
    if left.is_np or right.is_np:
        raise UnsupportedPair("simplified solver takes two physical waves")
    fa, fb = left.family, right.family
    if not np.allclose(left.Uright, right.Uleft, atol=1e-7):
        raise ValueError("incoming waves do not share the middle state")
    Ul = state(left.Uleft)
    Ur = state(right.Uright)
    if (fa, fb) in ((3, 1), (1, 1), (3, 3)):
        step = nu if nu is not None else 1.0
        return accurate_solver(Ul, Ur, p, step, lambda_hat)
    if (fa, fb) not in ((2, 1), (3, 2), (2, 2)):
        raise UnsupportedPair(f"no simplified rule for the pair ({fa}, {fb})")
    arrs = W.simplified_waves(fa, left.signed_param, fb, right.signed_param,
                              Ul[0], Ul[1], Ul[2], Ur[0], Ur[1], Ur[2], _eta(p), lambda_hat,
                              WAVE_FLOOR)
    return _to_waves(arrs)


@dataclass
class PredictionReport:
    fan: WaveFan
    all_shocks: bool
    brackets: dict
    hypotheses: dict
    mode: str
    measured: dict = field(default_factory=dict)

    @property
    def in_brackets(self):
        return all(self.brackets.values())

    @property
    def ok(self):
        return self.all_shocks and self.in_brackets


def _base_dirs(UI, p):
    return eigenvector(1, UI, p), eigenvector(2, UI, p), eigenvector(3, UI, p)


def classify_well_prepared(Uminus, Uplus, UI, b, mode="plain", p=0.0, eps=0.1, strict=False):
    """Solve the Riemann problem (Uminus, Uplus) and check the well-prepared brackets.

    ``mode`` is one of

    * ``"plain"``
    * ``("compression", family, xi, Vminus)``
    * ``("mollified", samples)`` with ``samples`` a dict of per-node arrays
      ``weights, b, xi1, xi2, xi3, V`` (``V`` of shape (n, 3)); ``b`` and
      the ``xi`` arguments are then ignored in favour of the weighted sums.

    ``eps`` is the smallness constant used when checking the hypotheses.
    Hypothesis failures are reported in ``hypotheses``; with ``strict=True``
    they raise :class:`HypothesisViolated`.
    """
    Um = state(Uminus)
    Up = state(Uplus)
    UI = state(UI)
    r1, r2, r3 = _base_dirs(UI, p)
    hyp = {"near_UI": bool(np.linalg.norm(Um - UI) < eps)}
    measured = {"dist_UI": float(np.linalg.norm(Um - UI))}
    b = float(b)
    if isinstance(mode, str):
        mode = (mode,)
    name = mode[0]

    if name == "plain":
        dev = np.linalg.norm(Up - Um + b * r1 + b * r2 - b * r3)
        measured["deviation"] = float(dev)
        hyp["0<b<eps"] = 0.0 < b < eps
        hyp["deviation<eps*b"] = bool(dev < eps * b)
        lo = {"sigma": (-2 * b, 0.0), "s": (-2 * b, 0.0), "tau": (0.0, 2 * b)}
        strict_ineq = True
    elif name == "compression":
        _, fam, xi, Vm = mode
        Vm = state(Vm)
        xi = float(xi)
        signed = xi if fam == 3 else -xi
        shift = wave_curve(fam, signed, Vm, p) - Vm
        dev = np.linalg.norm(Up - Um - shift + b * r1 + b * r2 - b * r3)
        measured["deviation"] = float(dev)
        hyp["0<b<eps"] = 0.0 < b < eps
        hyp["0<xi<sqrt(eps*b)"] = 0.0 < xi < np.sqrt(eps * b)
        hyp["|V-U|<sqrt(eps)*b/xi"] = bool(np.linalg.norm(Vm - Um) < np.sqrt(eps) * b / xi)
        hyp["deviation<b/4"] = bool(dev < b / 4)
        lo = {"sigma": (-2 * b, 0.0), "s": (-2 * b, 0.0), "tau": (0.0, 2 * b)}
        key = {1: "sigma", 2: "s", 3: "tau"}[fam]
        a0, a1 = lo[key]
        lo[key] = (a0 - xi, a1 - xi) if fam != 3 else (a0 + xi, a1 + xi)
        strict_ineq = True
    elif name == "mollified":
        smp = mode[1]
        wts = np.asarray(smp["weights"], float)
        bt = np.asarray(smp["b"], float)
        x1 = np.asarray(smp["xi1"], float)
        x2 = np.asarray(smp["xi2"], float)
        x3 = np.asarray(smp["xi3"], float)
        V = np.asarray(smp["V"], float).reshape(-1, 3)
        b = float(wts @ bt)
        xi1, xi2, xi3 = float(wts @ x1), float(wts @ x2), float(wts @ x3)
        shift = np.zeros(3)
        for k in range(len(wts)):
            Z = wave_curve(1, -x1[k], V[k], p)
            Z = wave_curve(2, -x2[k], Z, p)
            Z = wave_curve(3, x3[k], Z, p)
            shift += wts[k] * (Z - V[k])
        dev = np.linalg.norm(Up - Um - shift + b * r1 + b * r2 - b * r3)
        measured.update(deviation=float(dev), b=b, xi1=xi1, xi2=xi2, xi3=xi3)
        root = np.sqrt(eps * bt)
        hyp["0<=b~<eps"] = bool(np.all((bt >= 0) & (bt < eps)))
        hyp["xi~<sqrt(eps*b~)"] = bool(
            np.all((x1 <= root) & (x2 <= root) & (x3 <= root))
        )
        vd = np.linalg.norm(V - Um, axis=1)
        hyp["xi~|V-U|<sqrt(eps)b~"] = bool(np.all((x1 + x2 + x3) * vd <= np.sqrt(eps) * bt))
        hyp["deviation<b/4"] = bool(dev < b / 4)
        lo = {
            "sigma": (-2 * b - xi1, -xi1),
            "s": (-2 * b - xi2, -xi2),
            "tau": (xi3, xi3 + 2 * b),
        }
        strict_ineq = False
    else:
        raise ValueError(f"unknown mode {name!r}")

    failed = [k for k, v in hyp.items() if not v]
    if strict and failed:
        raise HypothesisViolated(failed)
    fan = solve_riemann(Um, Up, p, check_range=False)
    vals = {"sigma": fan.sigma, "s": fan.s, "tau": fan.tau}
    br = {}
    for key, (a0, a1) in lo.items():
        x = vals[key]
        br[key] = bool(a0 < x < a1) if strict_ineq else bool(a0 <= x <= a1)
    return PredictionReport(fan, fan.all_shocks(), br, hyp, name, measured)

