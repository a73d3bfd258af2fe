"""Event-driven front tracking: public API over :mod:`bjfront.engine`.

Typical use::

    cfg = EngineConfig(nu=1e-2)
    sim = init_from_piecewise(states, positions, FluxParams(0.01), cfg)
    run_until(sim, 400.0)
    U = sample_solution(sim, np.linspace(-30, 30, 601))
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import engine as E
from .constants import EVENT_CAP, LAMBDA_HAT, TIE_EPS, WAVE_FLOOR
from .errors import EventStorm, InconsistentChain, NoConvergence, StateOutOfRange
from .system import _eta

__all__ = [
    "EngineConfig",
    "Front",
    "InteractionRecord",
    "SimState",
    "init_from_piecewise",
    "next_interaction",
    "resolve_interaction",
    "run_until",
    "sample_solution",
    "GROUP_NAMES",
    "TAXONOMY_NAMES",
]

GROUP_NAMES = {E.GA: "A", E.GB: "B", E.GC: "C", E.GNP: "NP"}
TAXONOMY_NAMES = {13: "13", 11: "11", 33: "33", 12: "12", 23: "23", 22: "22", E.TAX_NP: "NPx"}


def taxonomy_name(code):
    if code >= E.TAX_GAP:
        c = code - E.TAX_GAP
        return f"gap{c // 10}{c % 10}"
    return TAXONOMY_NAMES.get(code, str(code))
SOLVER_NAMES = {E.SOLV_ACC: "accurate", E.SOLV_SIMP: "simplified", E.SOLV_NP: "np"}
KIND_NAMES = {0: "shock", 1: "rarefaction_front", 2: "non_physical"}


@dataclass
class EngineConfig:
    nu: float
    mu_nu: float | None = None  # defaults to nu**2
    lambda_hat: float = LAMBDA_HAT
    t_end: float = math.inf
    domain: tuple = (-math.inf, math.inf)
    tie_epsilon: float = TIE_EPS
    event_cap: int = EVENT_CAP
    log_events: bool | str = True  # True, False or "A" (only A-vs-A events)
    log_vertices: bool = True
    chain_tol: float = 1e-7
    np_floor: float = WAVE_FLOOR  # NP residuals up to this size are absorbed
    vertex_floor: float = 0.0  # vertices of weaker fronts are not logged

    def __post_init__(self):
        if self.mu_nu is None:
            self.mu_nu = self.nu * self.nu
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if not self.mu_nu > 0:
            raise ValueError("mu_nu must be positive")
        if not self.lambda_hat > 6:
            raise ValueError("lambda_hat must exceed 6")
        if not 0 <= self.np_floor < 1e-8:
            raise ValueError("np_floor must lie in [0, 1e-8)")
        if self.log_events not in (True, False, "A"):
            raise ValueError("log_events must be True, False or 'A'")
        if not self.vertex_floor >= 0:
            raise ValueError("vertex_floor must be non-negative")
        if not self.domain[0] < self.domain[1]:
            raise ValueError("empty domain")


@dataclass
class Front:
    id: int
    family: int
    x: float
    speed: float
    Uleft: np.ndarray
    Uright: np.ndarray
    strength: float
    signed_param: float
    kind: str
    group: str
    generation: int
    birth_time: float
    frozen: bool = False

    @property
    def is_np(self):
        return self.family == 4


@dataclass
class InteractionRecord:
    t: float
    x: float
    incoming: list  # [(id, family, strength)]
    outgoing: list
    solver: str
    taxonomy: str

    def to_dict(self):
        return {
            "t": self.t,
            "x": self.x,
            "incoming": [dict(id=i, family=f, strength=s) for i, f, s in self.incoming],
            "outgoing": [dict(id=i, family=f, strength=s) for i, f, s in self.outgoing],
            "solver": self.solver,
            "taxonomy": self.taxonomy,
        }


def _cfg_array(eta, cfg):
    a = np.zeros(E.NCFG)
    a[E.C_ETA] = eta
    a[E.C_NU] = cfg.nu
    a[E.C_MU] = cfg.mu_nu
    a[E.C_LAMHAT] = cfg.lambda_hat
    a[E.C_XMIN] = cfg.domain[0]
    a[E.C_XMAX] = cfg.domain[1]
    a[E.C_TIE] = cfg.tie_epsilon
    a[E.C_CAP] = cfg.event_cap
    a[E.C_LOGEV] = {True: E.LOG_ALL, False: E.LOG_NONE, "A": E.LOG_AA}[cfg.log_events]
    a[E.C_LOGVX] = 1.0 if cfg.log_vertices else 0.0
    a[E.C_CHAIN] = cfg.chain_tol
    a[E.C_NPFLOOR] = cfg.np_floor
    a[E.C_VXMIN] = cfg.vertex_floor
    return a


def _grow(a, n):
    out = np.zeros((n,) + a.shape[1:], a.dtype)
    out[: a.shape[0]] = a
    return out


class SimState:
    """Mutable simulation state backed by flat arrays.

    Front rows are never reused, so a front id stays valid for the whole run
    and the logs can refer to it.
    """

    def __init__(self, leftmost_state, eta, config, n_hint=64):
        self.config = config
        self.eta = float(eta)
        self.leftmost_state = np.asarray(leftmost_state, float).copy()
        self.time = 0.0
        n = max(64, int(n_hint))
        self.fd = np.zeros((n, E.NFD))
        self.fi = np.zeros((n, E.NFI), np.int64)
        self.hf = np.zeros((4 * n, 2))
        self.hi = np.zeros((4 * n, 4), np.int64)
        self.ef = np.zeros((4 * n if config.log_events else 1, E.NEF))
        self.ei = np.zeros((self.ef.shape[0], E.NEI), np.int64)
        self.vf = np.zeros((4 * n if config.log_vertices else 1, 3))
        self.vi = np.zeros(self.vf.shape[0], np.int64)
        self.mi = np.zeros(E.NMI, np.int64)
        self.mi[E.M_HEAD] = -1
        self.mf = np.zeros(E.NMF)
        self.csum = np.zeros(E.MAXGEN)
        self.cmax = np.zeros(E.MAXGEN)
        self.cfg = _cfg_array(eta, config)
        self.margin = 3 * int(math.ceil(0.6 / config.nu)) + 8
        self.meta = {}

    # ---------------------------------------------------------- plumbing
    def _ensure(self):
        m = self.margin
        mi = self.mi
        if self.fd.shape[0] - mi[E.M_NF] < m:
            n = 2 * self.fd.shape[0] + m
            self.fd = _grow(self.fd, n)
            self.fi = _grow(self.fi, n)
        if self.hf.shape[0] - mi[E.M_HN] < 2 * m + 4:
            n = 2 * self.hf.shape[0] + 2 * m
            self.hf = _grow(self.hf, n)
            self.hi = _grow(self.hi, n)
        if self.config.log_events and self.ef.shape[0] - mi[E.M_NLOG] < 2:
            n = 2 * self.ef.shape[0] + 16
            self.ef = _grow(self.ef, n)
            self.ei = _grow(self.ei, n)
        if self.config.log_vertices and self.vf.shape[0] - mi[E.M_NVX] < 2 * m + 4:
            n = 2 * self.vf.shape[0] + 2 * m
            self.vf = _grow(self.vf, n)
            self.vi = _grow(self.vi, n)

    def _args(self):
        return (self.fd, self.fi, self.hf, self.hi, self.mi, self.mf, self.csum,
                self.cmax, self.ef, self.ei, self.vf, self.vi, self.cfg)

    # ------------------------------------------------------------ views
    @property
    def n_rows(self):
        return int(self.mi[E.M_NF])

    @property
    def n_events(self):
        return int(self.mi[E.M_NEV])

    @property
    def n_logged(self):
        return int(self.mi[E.M_NLOG])

    def order(self):
        """Row ids of alive and frozen fronts, left to right."""
        out = []
        k = int(self.mi[E.M_HEAD])
        fi = self.fi
        while k >= 0:
            out.append(k)
            k = int(fi[k, E.NEXT])
        return np.array(out, np.int64)

    def positions(self, ids=None, t=None):
        t = self.time if t is None else t
        ids = self.order() if ids is None else ids
        fd = self.fd
        frozen = self.fi[ids, E.STAT] == E.FROZEN
        x = fd[ids, E.X0] + fd[ids, E.SPD] * (t - fd[ids, E.T0])
        return np.where(frozen, fd[ids, E.X0], x)

    def front(self, k, t=None):
        k = int(k)
        fd, fi = self.fd, self.fi
        t = self.time if t is None else t
        return Front(
            id=k,
            family=int(fi[k, E.FAM]),
            x=float(self.positions(np.array([k]), t)[0]),
            speed=float(fd[k, E.SPD]),
            Uleft=fd[k, E.ULU:E.ULW + 1].copy(),
            Uright=fd[k, E.URU:E.URW + 1].copy(),
            strength=abs(float(fd[k, E.PRM])),
            signed_param=float(fd[k, E.PRM]),
            kind=KIND_NAMES[int(fi[k, E.KIND])],
            group=GROUP_NAMES[int(fi[k, E.GRP])],
            generation=int(fi[k, E.GEN]),
            birth_time=float(fd[k, E.TB]),
            frozen=bool(fi[k, E.STAT] == E.FROZEN),
        )

    @property
    def fronts(self):
        return [self.front(k) for k in self.order()]

    @property
    def event_log(self):
        return [self.record(j) for j in range(self.n_logged)]

    def record(self, j):
        ef, ei, fi = self.ef, self.ei, self.fi
        a, b = int(ei[j, 0]), int(ei[j, 1])
        inc = [(a, int(fi[a, E.FAM]), float(ef[j, 2])), (b, int(fi[b, E.FAM]), float(ef[j, 3]))]
        outs = []
        for q in range(min(int(ei[j, 8]), 4)):
            k = int(ei[j, 2 + q])
            outs.append((k, int(fi[k, E.FAM]), float(ef[j, 4 + q])))
        return InteractionRecord(
            float(ef[j, 0]), float(ef[j, 1]), inc, outs,
            SOLVER_NAMES[int(ei[j, 7])], taxonomy_name(int(ei[j, 6])),
        )

    def events(self):
        """Event log as a dict of numpy columns."""
        n = self.n_logged
        ef, ei = self.ef[:n], self.ei[:n]
        return {
            "t": ef[:, 0], "x": ef[:, 1], "s_in": ef[:, 2:4], "s_out": ef[:, 4:8],
            "in_ids": ei[:, 0:2], "out_ids": ei[:, 2:6], "taxonomy": ei[:, 6],
            "solver": ei[:, 7], "n_out": ei[:, 8],
        }

    def vertices(self):
        n = int(self.mi[E.M_NVX])
        return self.vi[:n], self.vf[:n]

    def polylines(self):
        """Vertex history per front id, ``{id: array of (t, x, strength)}``.

        Between consecutive vertices a front moves on a straight line (when
        ``vertex_floor`` is 0 every speed change is a vertex).
        """
        vi, vf = self.vertices()
        idx = np.lexsort((vf[:, 0], vi))
        ids = vi[idx]
        cuts = np.flatnonzero(np.diff(ids)) + 1
        return {int(g[0]): vf[idx[c0:c1]] for g, c0, c1 in
                zip(np.split(ids, cuts), np.r_[0, cuts], np.r_[cuts, ids.size])}

    def alive_at(self, t):
        """Ids of the fronts present at time t (born at or before t, not yet dead)."""
        n = self.n_rows
        fd = self.fd
        return np.flatnonzero((fd[:n, E.TB] <= t) & (fd[:n, E.TD] > t))

    def x_at(self, k, t, poly=None):
        """Position of front k at time t from its vertex history."""
        pts = self.polylines()[k] if poly is None else poly
        ts = pts[:, 0]
        if t < ts[0]:
            return math.nan
        j = int(np.searchsorted(ts, t, side="right")) - 1
        if j + 1 < ts.size:
            t0, x0 = pts[j, 0], pts[j, 1]
            t1, x1 = pts[j + 1, 0], pts[j + 1, 1]
            return x0 if t1 == t0 else x0 + (x1 - x0) * (t - t0) / (t1 - t0)
        if self.fi[k, E.STAT] == E.DEAD and t > self.fd[k, E.TD]:
            return math.nan
        return float(self.positions(np.array([k]), t)[0])

    def stats(self):
        mi, mf = self.mi, self.mf
        return {
            "time": self.time,
            "n_events": int(mi[E.M_NEV]),
            "n_fronts_created": int(mi[E.M_NF]),
            "n_alive": int(np.sum(self.fi[: self.n_rows, E.STAT] == E.ALIVE)),
            "rule_gaps": int(mi[E.M_RULEGAP]),
            "rarefactions_created": int(mi[E.M_RARE_NEW]),
            "np_created": int(mi[E.M_NP_NEW]),
            "new_2_waves": int(mi[E.M_NEW2]),
            "max_generation": int(mi[E.M_MAXGEN]),
            "np_total": float(mf[E.F_NP_SUM]),
            "np_total_max": float(mf[E.F_NP_MAX]),
            "np_absorbed": float(mf[E.F_NP_ABS]),
            "np_with_absorbed_max": float(mf[E.F_NPALL_MAX]),
        }

    def recompute_ledger(self):
        """Rebuild group totals from the current fronts (after re-tagging)."""
        self.mf[[E.F_SUMA, E.F_SUMB, E.F_NP_SUM]] = 0.0
        self.csum[:] = 0.0
        for k in self.order():
            E.ledger_add(self.fd, self.fi, k, 1.0, self.mf, self.csum, self.cmax)
        self.mf[E.F_MAXA] = self.mf[E.F_SUMA]
        self.mf[E.F_MAXB] = self.mf[E.F_SUMB]
        self.mf[E.F_NP_MAX] = self.mf[E.F_NP_SUM]
        self.mf[E.F_NPALL_MAX] = self.mf[E.F_NP_SUM] + self.mf[E.F_NP_ABS]
        self.cmax[:] = self.csum

    def _reschedule(self):
        self.mi[E.M_HN] = 0
        self._ensure()
        while self.hf.shape[0] < 3 * self.n_rows + 8:
            self.hf = _grow(self.hf, 2 * self.hf.shape[0])
            self.hi = _grow(self.hi, 2 * self.hi.shape[0])
        E.schedule_all(self.fd, self.fi, self.hf, self.hi, self.mi, self.cfg, self.time)


def _check_status(st, sim):
    if st == E.ST_STORM:
        raise EventStorm(f"interaction count reached the cap {sim.config.event_cap}")
    if st == E.ST_CHAIN:
        raise InconsistentChain(f"flanking states disagree near t={sim.mf[E.F_TIME]}")
    if st == E.ST_SOLVER:
        raise NoConvergence(f"Riemann solve failed near t={sim.mf[E.F_TIME]}")


def init_from_piecewise(states, positions, p, cfg, group="B"):
    """Resolve every jump of a piecewise-constant datum.

    ``states`` has one more entry than ``positions``.  All fronts get the
    initial ``group`` tag; :func:`bjfront.census.tag_initial_fronts` refines it.
    """
    S = np.asarray(states, float).reshape(-1, 3)
    X = np.asarray(positions, float).ravel()
    if S.shape[0] != X.shape[0] + 1:
        raise ValueError("need exactly one more state than positions")
    if np.any(np.diff(X) <= 0):
        raise ValueError("positions must be strictly increasing")
    if np.any(np.linalg.norm(S, axis=1) >= 0.9):
        raise StateOutOfRange("datum leaves the ball |U| < 0.9")
    sim = SimState(S[0], _eta(p), cfg, n_hint=3 * len(X) + 64)
    grp = {"A": E.GA, "B": E.GB}[group]
    nmax = 3 * len(X) * (1 + int(math.ceil(0.6 / cfg.nu)))
    if sim.fd.shape[0] < nmax:
        sim.fd = _grow(sim.fd, nmax)
        sim.fi = _grow(sim.fi, nmax)
    if cfg.log_vertices and sim.vf.shape[0] < nmax + 2 * sim.margin + 4:
        sim.vf = _grow(sim.vf, nmax + 2 * sim.margin + 4)
        sim.vi = _grow(sim.vi, sim.vf.shape[0])
    bad = E.init_fronts(sim.fd, sim.fi, sim.mi, sim.mf, sim.csum, sim.cmax,
                        sim.vf, sim.vi, sim.cfg, X, S, grp)
    if bad >= 0:
        raise NoConvergence(f"Riemann solve failed at jump {bad} (x={X[bad]})")
    sim.n_initial = sim.n_rows
    sim._reschedule()
    return sim


def next_interaction(sim, t_end=None):
    """Earliest crossing (t, x, id_left, id_right), or None before t_end.

    Domain exits met on the way are applied (the front is frozen)."""
    t_end = sim.config.t_end if t_end is None else t_end
    while True:
        e = E.peek_next(sim.fd, sim.fi, sim.hf, sim.hi, sim.mi, sim.cfg, t_end)
        if e < 0:
            return None
        t, x = float(sim.hf[e, 0]), float(sim.hf[e, 1])
        a, b, va, vb = (int(c) for c in sim.hi[e])
        if b < 0:
            sim._ensure()
            E.resolve(*sim._args(), e)
            sim.time = max(sim.time, t)
            continue
        # leave it queued for resolve_interaction
        E.heap_push(sim.hf, sim.hi, sim.mi, t, x, a, b, va, vb)
        return (t, x, a, b)


def resolve_interaction(sim, event):
    t, x, a, b = event
    a, b = int(a), int(b)
    if sim.fi[a, E.STAT] != E.ALIVE or sim.fi[b, E.STAT] != E.ALIVE or sim.fi[a, E.NEXT] != b:
        raise ValueError("event does not refer to adjacent live fronts")
    sim._ensure()
    n = int(sim.mi[E.M_HN])
    sim.hf[n] = (t, x)
    sim.hi[n] = (a, b, sim.fi[a, E.VER], sim.fi[b, E.VER])
    st = E.resolve(*sim._args(), n)
    _check_status(st, sim)
    sim.time = max(sim.time, float(t))
    return sim


def run_until(sim, t_end, max_events=0):
    """Process every interaction up to ``t_end``; returns ``sim``."""
    if t_end < sim.time:
        raise ValueError("t_end precedes the current time")
    while True:
        sim._ensure()
        before = sim.n_events
        st = E.run(*sim._args(), float(t_end), sim.margin, int(max_events))
        if st == E.ST_GROW:
            continue
        _check_status(st, sim)
        if max_events and sim.n_events - before >= max_events:
            sim.time = float(sim.mf[E.F_TIME])
            return sim
        break
    sim.time = float(t_end)
    return sim


def sample_solution(sim, x_grid, t=None):
    """Piecewise-constant evaluation; the right limit is taken at a front."""
    xg = np.asarray(x_grid, float)
    ids = sim.order()
    out = np.empty((xg.size, 3))
    if ids.size == 0:
        out[:] = sim.leftmost_state
        return out
    xs = sim.positions(ids, t)
    j = np.searchsorted(xs, xg, side="right")
    states = np.vstack([sim.fd[ids[0], E.ULU:E.ULW + 1], sim.fd[ids, E.URU:E.URW + 1]])
    return states[j]
