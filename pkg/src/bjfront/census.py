"""Group tags, strength ledgers, big-shock detection, shock counts and a
scalar Burgers oracle for the second component.

Group tags live in the engine tables (one row per front, rows never reused);
this module assigns them at t=0, replays the rules for cross-checking and
reads the logs afterwards.
"""
import heapq
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from . import engine as E
from .constants import BIG2_FRACTION, LEDGER_K_SLACK
from .datum import COMPRESSION, REGION_FAMILY
from .errors import LedgerViolation, RuleGap, ThresholdTooSmall, UntaggedFront
from .tracking import run_until

__all__ = [
    "GroupTag",
    "tag_of",
    "tag_initial_fronts",
    "propagate_tags",
    "LedgerSlice",
    "calibrate_K",
    "ledger_totals",
    "BigShockRecord",
    "BigShockReport",
    "run_with_snapshot",
    "detect_big_shocks",
    "count_shocks",
    "count_curve",
    "default_window",
    "BurgersFront",
    "BurgersSolution",
    "burgers_oracle",
    "burgers_deviation",
    "CensusReport",
    "build_report",
]

_CODE = {E.GA: "A", E.GB: "B", E.GC: "C", E.GNP: "NP"}
_RANK = {"A": 0, "B": 1, "C": 2, "NP": 3}


@dataclass(frozen=True)
class GroupTag:
    kind: str
    m: int = 0

    def __post_init__(self):
        if self.kind not in _RANK:
            raise ValueError(f"unknown group {self.kind!r}")
        if (self.kind == "C") != (self.m >= 1):
            raise ValueError("generation m >= 1 exactly for group C")

    def __str__(self):
        return f"C{self.m}" if self.kind == "C" else self.kind


def tag_of(sim, k):
    g = int(sim.fi[k, E.GRP])
    return GroupTag(_CODE[g], int(sim.fi[k, E.GEN]) if g == E.GC else 0)


# ------------------------------------------------------------------ tagging
def tag_initial_fronts(sim, regions=None, convention=None):
    """Assign A/B to the fronts present at t=0.

    With ``regions`` a front is A when its family is the compression family
    of a region (closed interval) containing its birth point, B otherwise.
    Without regions pass ``convention="all_A"`` (the W scenario).
    """
    if sim.n_events or sim.time != 0.0:
        raise ValueError("initial tags can only be assigned at t=0")
    n0 = sim.n_initial
    fd, fi = sim.fd, sim.fi
    birth = [None] * n0
    if regions is None:
        if convention != "all_A":
            raise ValueError("without regions the only convention is 'all_A'")
        fi[:n0, E.GRP] = E.GA
        sim.meta["tag_convention"] = "all_A"
    else:
        lo, hi = regions["L"][0], regions["R"][1]
        comp = [(n, regions[n], REGION_FAMILY[n]) for n in COMPRESSION]
        for k in range(n0):
            x = float(fd[k, E.X0])
            fam = int(fi[k, E.FAM])
            if not lo <= x <= hi:
                raise UntaggedFront(f"front {k} born at x={x} outside every region")
            hit = next((n for n, (a, b), f in comp if f == fam and a <= x <= b), None)
            if hit is not None:
                fi[k, E.GRP] = E.GA
                birth[k] = hit
            else:
                fi[k, E.GRP] = E.GB
                birth[k] = regions.locate(x) or ("R" if x == hi else None)
        sim.meta["tag_convention"] = "regions"
    fi[:n0, E.GEN] = 0
    sim.meta["birth_region"] = birth
    sim.recompute_ledger()
    sim.meta["ledger_t0"] = {"A": float(sim.mf[E.F_SUMA]), "B": float(sim.mf[E.F_SUMB])}
    return sim


def propagate_tags(record, tags):
    """Tags of the outgoing fronts of one interaction.

    ``tags`` maps the incoming ids to :class:`GroupTag`; the result maps the
    outgoing ids.  This mirrors the engine and is used to audit it.
    """
    tax = record.taxonomy
    if tax.startswith("gap"):
        raise RuleGap(f"no tagging rule for the pair {tax[3:]}")
    (ia, fa, _), (ib, fb, _) = record.incoming
    ta, tb = tags[ia], tags[ib]
    out = {}
    if tax in ("11", "33", "22") or (fa == fb):
        win = ta if _RANK[ta.kind] <= _RANK[tb.kind] else tb
    m = 0
    if fa != 2 and ta.kind == "C":
        m = ta.m
    if fb != 2 and tb.kind == "C":
        m = max(m, tb.m)
    prev = None
    for k, f, _ in record.outgoing:
        if k in (ia, ib):
            if f == fa and f == fb:
                out[k] = win
            else:
                out[k] = ta if k == ia else tb
        elif f == 4:
            out[k] = GroupTag("NP")
        elif prev is not None and prev[1] == f:
            out[k] = out[prev[0]]
        else:
            if tax == "NPx":
                raise RuleGap("a non-physical crossing created a physical wave")
            out[k] = GroupTag("C", m + 1)
        prev = (k, f)
    return out


# ------------------------------------------------------------------ ledger
@dataclass
class LedgerSlice:
    time: float
    K: float
    omega: float
    epsilon: float
    nu: float
    totals: dict
    maxima: dict
    bounds: dict
    ok: dict

    @property
    def all_ok(self):
        return all(self.ok.values())


def calibrate_K(ledger_t0, omega, epsilon, slack=LEDGER_K_SLACK):
    """Ledger constant from the t=0 group totals, times a fixed slack."""
    a = ledger_t0["A"] / omega
    b = ledger_t0["B"] / (omega * epsilon)
    return slack * max(a, b, 1e-300)


def ledger_totals(sim, omega, epsilon, K=None, strict=False):
    """Current and running-maximum group totals against the bounds.

    The maxima are taken over every event since t=0, so ``ok`` certifies
    the bounds at all event times.
    """
    if K is None:
        if "ledger_t0" not in sim.meta:
            raise ValueError("no t=0 totals recorded; call tag_initial_fronts first")
        K = calibrate_K(sim.meta["ledger_t0"], omega, epsilon)
    mf = sim.mf
    gens = [m for m in range(1, E.MAXGEN) if sim.cmax[m] > 0]
    totals = {"A": float(mf[E.F_SUMA]), "B": float(mf[E.F_SUMB]), "NP": float(mf[E.F_NP_SUM])}
    maxima = {"A": float(mf[E.F_MAXA]), "B": float(mf[E.F_MAXB]), "NP": float(mf[E.F_NPALL_MAX])}
    bounds = {"A": K * omega, "B": K * omega * epsilon, "NP": sim.config.nu}
    for m in gens:
        key = f"C{m}"
        totals[key] = float(sim.csum[m])
        maxima[key] = float(sim.cmax[m])
        bounds[key] = (2 * K * omega) ** (m + 1)
    ok = {k: maxima[k] <= bounds[k] for k in bounds}
    sl = LedgerSlice(sim.time, float(K), omega, epsilon, sim.config.nu, totals, maxima, bounds, ok)
    if strict and not sl.all_ok:
        diff = {k: (maxima[k], bounds[k]) for k, v in ok.items() if not v}
        raise LedgerViolation(f"ledger bounds exceeded: {diff}", diff)
    return sl


# ------------------------------------------------------------- big shocks
@dataclass
class BigShockRecord:
    region: str
    family: int
    front_id: int
    formation_time: float
    strength_at_formation: float
    strength_at_check: float
    threshold: float

    @property
    def ok(self):
        return math.isfinite(self.formation_time) and self.strength_at_check >= self.threshold


@dataclass
class BigShockReport:
    records: list
    t_check: float
    pair_merge_time: float
    pair_merge_bound: float

    @property
    def detected(self):
        return [r.region for r in self.records if r.ok and r.formation_time <= self.t_check]

    @property
    def ok(self):
        return len(self.detected) == len(COMPRESSION) and self.pair_merge_time <= self.pair_merge_bound

    def signature(self):
        """Region, family and (formed by t_check) for each record; seed-independent."""
        return tuple((r.region, r.family, r.ok and r.formation_time <= self.t_check)
                     for r in self.records)

    def as_dict(self):
        return {
            "records": [asdict(r) for r in self.records],
            "t_check": self.t_check,
            "pair_merge_time": self.pair_merge_time,
            "pair_merge_bound": self.pair_merge_bound,
            "detected": self.detected,
        }


def run_with_snapshot(sim, t_check, t_final):
    """Run to ``t_check``, store every row's strength there, then to ``t_final``."""
    run_until(sim, t_check)
    n = sim.n_rows
    snap = np.abs(sim.fd[:n, E.PRM]).copy()
    alive = sim.fi[:n, E.STAT] != E.DEAD
    sim.meta["snapshot"] = {"t": float(t_check), "strength": np.where(alive, snap, 0.0)}
    if t_final > t_check:
        run_until(sim, t_final)
    return sim


def _find(parent, k):
    root = k
    while parent[root] != root:
        root = parent[root]
    while parent[k] != root:
        parent[k], k = root, parent[k]
    return root


def detect_big_shocks(sim, omega, epsilon, t_check=1.2, pair_bound=math.inf):
    """Follow the merges among A fronts born in each compression region.

    Needs the event log (``log_events`` True or ``"A"``) and birth regions
    from :func:`tag_initial_fronts`.  A region's shock is formed at the first
    event after which its A fronts belong to a single merged front.  The
    2-shock pair merge time is the event joining the L2 and R2 fronts.
    """
    birth = sim.meta.get("birth_region")
    if birth is None:
        raise ValueError("tag_initial_fronts has not been called")
    ev = sim.events()
    parent = {}
    members = {}
    remaining = Counter()
    formed = {}
    for k, reg in enumerate(birth):
        if reg in REGION_FAMILY and sim.fi[k, E.GRP] == E.GA:
            parent[k] = k
            members[k] = Counter({reg: 1})
            remaining[reg] += 1
    for reg in COMPRESSION:
        if remaining[reg] == 1:
            k = next(i for i, r in enumerate(birth) if r == reg and i in parent)
            formed[reg] = (0.0, k, None)
    pair_t = math.inf
    t = ev["t"]
    ids_in = ev["in_ids"]
    ids_out = ev["out_ids"]
    s_out = ev["s_out"]
    for j in range(t.size):
        a, b = int(ids_in[j, 0]), int(ids_in[j, 1])
        if a not in parent or b not in parent:
            continue
        outs = ids_out[j]
        if (a in outs) and (b in outs):
            continue
        ra, rb = _find(parent, a), _find(parent, b)
        if ra == rb:
            continue
        # the continuing row of the merged front
        surv = a if a in outs else b
        q = int(np.where(outs == surv)[0][0]) if surv in outs else -1
        ca, cb = members[ra], members[rb]
        if ("L2" in ca and "R2" in cb) or ("R2" in ca and "L2" in cb):
            pair_t = min(pair_t, float(t[j]))
        for reg in set(ca) & set(cb):
            remaining[reg] -= 1
            if remaining[reg] == 1 and reg not in formed:
                formed[reg] = (float(t[j]), surv, float(s_out[j, q]) if q >= 0 else 0.0)
        parent[rb] = ra
        members[ra] = ca + cb
        del members[rb]
    snap = sim.meta.get("snapshot")
    thr13 = omega * math.sqrt(epsilon) / 2
    recs = []
    for reg in COMPRESSION:
        fam = REGION_FAMILY[reg]
        thr = BIG2_FRACTION * omega if fam == 2 else thr13
        if reg not in formed:
            recs.append(BigShockRecord(reg, fam, -1, math.inf, 0.0, 0.0, thr))
            continue
        tf, k, s_form = formed[reg]
        if s_form is None:
            s_form = float(abs(sim.fd[k, E.PRM]))
        if snap is not None and k < snap["strength"].size:
            s_chk = float(snap["strength"][k])
        else:
            s_chk = float(abs(sim.fd[k, E.PRM]))
        recs.append(BigShockRecord(reg, fam, int(k), tf, s_form, s_chk, thr))
    tc = snap["t"] if snap is not None else t_check
    return BigShockReport(recs, tc, pair_t, pair_bound)


# ---------------------------------------------------------------- counts
def default_window(T_tilde, q):
    return (0.0, 2.0 * T_tilde, -2.0 * q, 2.0 * q)


def _check_theta(sim, theta, omega):
    floor = sim.config.mu_nu / omega ** 2
    if not theta > floor:
        raise ThresholdTooSmall(f"theta={theta:g} must exceed mu_nu/omega^2={floor:g}")
    vfl = sim.config.vertex_floor
    if theta < vfl:
        raise ThresholdTooSmall(f"theta={theta:g} is below the logged vertex floor {vfl:g}")


def count_shocks(sim, theta, window, omega):
    """Distinct shock fronts that carry strength >= theta somewhere inside
    the open (t, x) window ``(t0, t1, x0, x1)``.

    Each front is followed along its vertex history; a straight segment
    with strength >= theta that meets the window counts the front once.
    Non-physical fronts and rarefaction fronts are not counted.
    """
    _check_theta(sim, theta, omega)
    return len(_shock_ids(sim, theta, window))


def _segment_hits(ta, xa, tb, xb, window):
    t0, t1, x0, x1 = window
    if tb <= ta:
        return t0 < ta < t1 and x0 < xa < x1
    lo, hi = max(ta, t0), min(tb, t1)
    c = (xb - xa) / (tb - ta)
    if c == 0.0:
        return lo < hi and x0 < xa < x1
    s0 = ta + (x0 - xa) / c
    s1 = ta + (x1 - xa) / c
    return max(lo, min(s0, s1)) < min(hi, max(s0, s1))


def _shock_ids(sim, theta, window):
    vi, vf = sim.vertices()
    cand = np.unique(vi[vf[:, 2] >= theta])
    cand = cand[sim.fi[cand, E.FAM] != 4]
    if cand.size == 0:
        return cand
    sel = np.isin(vi, cand)
    polys = {}
    for k, row in zip(vi[sel], vf[sel]):
        polys.setdefault(int(k), []).append(row)
    hit = []
    for k in cand:
        pts = np.array(polys[int(k)])
        pts = pts[np.argsort(pts[:, 0], kind="stable")]
        for i in range(pts.shape[0]):
            if pts[i, 2] < theta:
                continue
            ta, xa = pts[i, 0], pts[i, 1]
            if i + 1 < pts.shape[0]:
                tb, xb = pts[i + 1, 0], pts[i + 1, 1]
            else:
                tb = min(sim.time, sim.fd[k, E.TD])
                xb = sim.x_at(int(k), tb, pts) if tb > ta else xa
            if _segment_hits(ta, xa, tb, xb, window):
                hit.append(int(k))
                break
    return np.array(hit, np.int64)


def count_curve(sim, thetas, window, omega):
    """count(theta) on a grid, checked against the threshold floor."""
    for th in thetas:
        _check_theta(sim, th, omega)
    return [len(_shock_ids(sim, th, window)) for th in thetas]


# ---------------------------------------------------------------- Burgers
@dataclass
class BurgersFront:
    id: int
    v_left: float
    v_right: float
    points: list  # [(t, x)], last point extends with ``speed`` while alive
    speed: float
    alive: bool = True

    def x_at(self, t):
        for (ta, xa), (tb, xb) in zip(self.points, self.points[1:]):
            if ta <= t <= tb:
                return xa if tb == ta else xa + (xb - xa) * (t - ta) / (tb - ta)
        ta, xa = self.points[-1]
        return xa + self.speed * (t - ta)


@dataclass
class BurgersSolution:
    fronts: list
    t_end: float

    def positions(self, t):
        """Sorted positions of the fronts alive at time t."""
        xs = []
        for f in self.fronts:
            t_birth = f.points[0][0]
            t_death = math.inf if f.alive else f.points[-1][0]
            if t_birth <= t < t_death or (t == t_death == self.t_end):
                xs.append(f.x_at(t))
        return np.sort(np.array(xs))


def _burgers_speed(vl, vr):
    # shocks: RH for v^2; rarefaction fronts travel at the right characteristic speed
    return vl + vr if vl > vr else 2.0 * vr


def burgers_oracle(v_states, positions, t_end, nu):
    """Front tracking for v_t + (v^2)_x = 0 from a piecewise-constant datum."""
    v = [float(a) for a in v_states]
    xs = [float(a) for a in positions]
    if len(v) != len(xs) + 1:
        raise ValueError("need exactly one more state than positions")
    fronts = []
    order = []  # alive ids, left to right

    def spawn(vl, vr, x, t):
        ids = []
        if vl > vr:
            pieces = [(vl, vr)]
        elif vl < vr:
            n = max(1, math.ceil((vr - vl) / nu - 1e-12))
            grid = [vl + (vr - vl) * j / n for j in range(n + 1)]
            pieces = list(zip(grid[:-1], grid[1:]))
        else:
            pieces = []
        for a, b in pieces:
            f = BurgersFront(len(fronts), a, b, [(t, x)], _burgers_speed(a, b))
            fronts.append(f)
            ids.append(f.id)
        return ids

    for k, x in enumerate(xs):
        order.extend(spawn(v[k], v[k + 1], x, 0.0))

    def meet(i, j, now):
        a, b = fronts[i], fronts[j]
        if a.speed <= b.speed:
            return None
        ta, xa = a.points[-1]
        tb, xb = b.points[-1]
        # x_a(t) = xa + sa (t - ta) = x_b(t)
        t = (xb - xa + a.speed * ta - b.speed * tb) / (a.speed - b.speed)
        return max(t, now)

    heap = []
    seq = 0

    def push(i, j, now):
        nonlocal seq
        t = meet(i, j, now)
        if t is not None and t <= t_end:
            heapq.heappush(heap, (t, seq, i, j))
            seq += 1

    for i, j in zip(order, order[1:]):
        push(i, j, 0.0)
    while heap:
        t, _, i, j = heapq.heappop(heap)
        if not (fronts[i].alive and fronts[j].alive):
            continue
        pi = order.index(i)
        if pi + 1 >= len(order) or order[pi + 1] != j:
            continue
        x = fronts[i].x_at(t)
        for k in (i, j):
            fronts[k].points.append((t, x))
            fronts[k].alive = False
        new = spawn(fronts[i].v_left, fronts[j].v_right, x, t)
        order[pi:pi + 2] = new
        left = order[pi - 1] if pi > 0 else None
        right = order[pi + len(new)] if pi + len(new) < len(order) else None
        chain = ([left] if left is not None else []) + new + ([right] if right is not None else [])
        for a, b in zip(chain, chain[1:]):
            push(a, b, t)
    return BurgersSolution(fronts, float(t_end))


def _cluster(xs, tol):
    xs = np.sort(np.asarray(xs, float))
    if xs.size == 0:
        return xs
    keep = np.r_[True, np.diff(xs) > tol]
    return xs[keep]


def burgers_deviation(sim, solution, times, tol=1e-9):
    """Largest gap between the system's 2-fronts and the oracle fronts.

    At each time the two sets of positions are compared after collapsing
    points closer than ``tol`` (fronts meeting at that instant); a mismatch
    in the number of fronts gives ``inf``.
    """
    polys = sim.polylines()
    worst = 0.0
    for t in times:
        ids = [k for k in sim.alive_at(t) if sim.fi[k, E.FAM] == 2]
        xs = _cluster([sim.x_at(k, t, polys[k]) for k in ids], tol)
        xb = _cluster(solution.positions(t), tol)
        if xs.size != xb.size:
            near = [f.x_at(t) for f in solution.fronts
                    if f.points[0][0] <= t <= (f.points[-1][0] if not f.alive else math.inf)]
            xb = _cluster(near, tol)
            if xs.size != xb.size:
                return math.inf
        if xs.size:
            worst = max(worst, float(np.max(np.abs(xs - xb))))
    return worst


# ---------------------------------------------------------------- report
@dataclass
class CensusReport:
    time_slices: list = field(default_factory=list)
    big_shocks: dict = field(default_factory=dict)
    counts: list = field(default_factory=list)
    taxonomy: dict = field(default_factory=dict)
    np_total: float = 0.0
    stats: dict = field(default_factory=dict)

    def add_slice(self, sl):
        self.time_slices.append(asdict(sl))

    def as_dict(self):
        return asdict(self)

    def to_json(self, path=None):
        text = json.dumps(self.as_dict(), indent=2, default=_json_default, allow_nan=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def build_report(sim, omega, epsilon, thetas=(), window=None, big=None, K=None):
    """Assemble a :class:`CensusReport` from a finished run."""
    rep = CensusReport()
    if "ledger_t0" in sim.meta:
        rep.add_slice(ledger_totals(sim, omega, epsilon, K))
    if big is not None:
        rep.big_shocks = big.as_dict()
    if thetas and window is not None:
        rep.counts = [{"theta": float(th), "n": int(n)}
                      for th, n in zip(thetas, count_curve(sim, thetas, window, omega))]
    ev = sim.events()
    codes, n = np.unique(ev["taxonomy"], return_counts=True)
    from .tracking import taxonomy_name

    rep.taxonomy = {taxonomy_name(int(c)): int(m) for c, m in zip(codes, n)}
    st = sim.stats()
    rep.np_total = st["np_total"]
    rep.stats = st
    return rep
