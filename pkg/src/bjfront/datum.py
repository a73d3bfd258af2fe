"""Initial data: parameter ledger, state chain, regions, V, Psi, U~ and sampling."""
import csv
import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ._jit import njit
from . import kernels as K
from .errors import HypothesisViolated, InfeasibleEpsilon, MeshInfeasible, NoConvergence
from .quadrature import kernel_nodes
from .system import _eta, eigenvalues, eigenvector, state, wave_curve

log = logging.getLogger(__name__)

__all__ = [
    "ParamLedger",
    "make_params",
    "w_ledger",
    "StateChain",
    "build_state_chain",
    "Regions",
    "build_regions",
    "Profile",
    "build_V",
    "build_Psi",
    "build_tildeU",
    "mollify",
    "make_perturbation",
    "sample_mesh",
    "make_W",
    "export_profile_csv",
]

Q = 20.0
LEDGER_FIELDS = ("epsilon", "delta", "zeta_w", "eta", "omega", "zeta_c", "r",
                 "q", "frak_q", "frak_p", "T_tilde", "rho")


@dataclass(frozen=True)
class ParamLedger:
    epsilon: float
    delta: float
    zeta_w: float
    eta: float
    omega: float
    zeta_c: float
    r: float
    q: float
    frak_q: float
    frak_p: float
    T_tilde: float
    rho: float
    overrides: dict = field(default_factory=dict)
    violations: tuple = ()

    @property
    def feasible(self):
        return not self.violations

    @property
    def paper_faithful(self):
        return not self.overrides

    def as_dict(self):
        d = asdict(self)
        d["violations"] = list(self.violations)
        d["feasible"] = self.feasible
        d["paper_faithful"] = self.paper_faithful
        return d


def _check_inequalities(L):
    bad = []
    e = L.epsilon
    lhs = L.zeta_w * L.omega + L.zeta_c * L.rho + L.r * L.rho
    if not lhs < e * L.omega:
        bad.append(f"zeta_w*omega + zeta_c*rho + r*rho = {lhs:.6g} >= eps*omega = {e * L.omega:.6g}")
    if not e * L.omega < e ** 0.75 * L.zeta_w * L.eta:
        bad.append("eps*omega >= eps^(3/4)*zeta_w*eta")
    if not (L.r < e * L.zeta_c < e * L.omega < e * L.zeta_w):
        bad.append("r < eps*zeta_c < eps*omega < eps*zeta_w fails")
    if not math.hypot(L.delta, L.delta) < 0.5:
        bad.append(f"|U_I| = {math.hypot(L.delta, L.delta):.4g} >= 1/2")
    return tuple(bad)


def make_params(epsilon, overrides=None, strict=False):
    """Parameter ledger for a given epsilon.

    ``overrides`` replaces individual fields after the formulas are applied
    (T_tilde and rho are recomputed from omega unless overridden themselves)
    and marks the ledger as not paper-faithful.  Failed inequalities are
    listed in ``violations``; ``strict=True`` turns them into an error.
    The hyperbolicity window eta < 1/4 is always enforced.
    """
    e = float(epsilon)
    if not 0.0 < e < 1.0:
        raise InfeasibleEpsilon(f"epsilon must lie in (0, 1), got {e}", ["0<eps<1"])
    vals = dict(
        epsilon=e, delta=e, zeta_w=e / 2, eta=e ** 2, omega=e ** 3,
        zeta_c=e ** 9, r=e ** 10 / 2, q=Q, frak_q=Q + 3, frak_p=Q - 3,
    )
    ov = dict(overrides or {})
    unknown = set(ov) - set(LEDGER_FIELDS)
    if unknown:
        raise ValueError(f"unknown ledger fields {sorted(unknown)}")
    vals.update({k: float(v) for k, v in ov.items() if k not in ("T_tilde", "rho")})
    vals["T_tilde"] = float(ov.get("T_tilde", 2 * vals["q"] / (2 * vals["omega"])))
    vals["rho"] = float(ov.get("rho", 12 * vals["T_tilde"] + 40))
    if not vals["eta"] < 0.25:
        raise InfeasibleEpsilon(f"eta = {vals['eta']} leaves the window eta < 1/4", ["eta<1/4"])
    L = ParamLedger(**vals, overrides=ov)
    L = replace(L, violations=_check_inequalities(L))
    if strict and L.violations:
        raise InfeasibleEpsilon("parameter inequalities fail: " + "; ".join(L.violations),
                                L.violations)
    return L


def w_ledger(omega=0.05, delta=0.2, eta=0.01, q=Q):
    """Ledger for the three-state W datum, parametrised directly."""
    T = 2 * q / (2 * omega)
    return ParamLedger(
        epsilon=float("nan"), delta=delta, zeta_w=0.0, eta=eta, omega=omega, zeta_c=0.0,
        r=0.0, q=q, frak_q=q + 3, frak_p=q - 3, T_tilde=T, rho=12 * T + 40,
        overrides={"scenario": "W"},
    )


# ------------------------------------------------------------ state chain
@dataclass(frozen=True)
class StateChain:
    U_I: np.ndarray
    U_II: np.ndarray
    U_III: np.ndarray
    Uprime: np.ndarray
    Udprime: np.ndarray
    Ustar: np.ndarray
    Ustarstar: np.ndarray
    fan: tuple  # (tau, s, sigma)
    fan_star: tuple
    eta: float


def _R2(s, U, eta):
    u, v, w, flag = K.integral_curve2(float(s), U[0], U[1], U[2], eta)
    if flag != K.OK:
        raise NoConvergence("integral curve of r2 left the strictly hyperbolic region")
    return np.array([u, v, w])


def _cw_target(tau, s, sigma, U, eta):
    """D1[sigma, R2[s, D3[tau, U]]]."""
    A = wave_curve(3, tau, U, eta)
    B = _R2(s, A, eta)
    return wave_curve(1, sigma, B, eta)


def _solve_cw(U0, target, omega, eta):
    """Newton for (tau, sigma) with s fixed by the v-components."""
    s = float(target[1] - U0[1])
    x = np.array([omega, -omega])
    for _ in range(60):
        F = _cw_target(x[0], s, x[1], U0, eta) - target
        res = F[[0, 2]]
        if np.max(np.abs(res)) < 1e-15:
            break
        J = np.empty((2, 2))
        for j in range(2):
            d = np.zeros(2)
            d[j] = 1e-7
            Fp = _cw_target(x[0] + d[0], s, x[1] + d[1], U0, eta)[[0, 2]]
            Fm = _cw_target(x[0] - d[0], s, x[1] - d[1], U0, eta)[[0, 2]]
            J[:, j] = (Fp - Fm) / 2e-7
        x = x - np.linalg.solve(J, res)
    else:
        raise NoConvergence("compression strengths did not converge")
    return float(x[0]), s, float(x[1])


def build_state_chain(ledger, p=None, check=True):
    eta = _eta(p) if p is not None else ledger.eta
    om = ledger.omega
    UI = np.array([ledger.delta, 0.0, -ledger.delta])
    UII = wave_curve(3, om, wave_curve(2, -om, wave_curve(1, -om, UI, eta), eta), eta)
    UIII = wave_curve(3, om, wave_curve(2, -om, wave_curve(1, -om, UII, eta), eta), eta)
    if om == 0:
        z = (0.0, 0.0, 0.0)
        return StateChain(UI, UII, UIII, UI, UI, UII, UII, z, z, eta)
    fan = _solve_cw(UI, UII, om, eta)
    fan_s = _solve_cw(UII, UIII, om, eta)
    if check:
        bad = []
        for name, (t, s, g) in (("", fan), ("*", fan_s)):
            if not t > om / 2:
                bad.append(f"tau{name} > omega/2")
            if not s < -om / 2:
                bad.append(f"s{name} < -omega/2")
            if not g < -om / 2:
                bad.append(f"sigma{name} < -omega/2")
        if bad:
            raise HypothesisViolated(bad)
    Up = wave_curve(3, fan[0], UI, eta)
    Upp = _R2(fan[1], Up, eta)
    Us = wave_curve(3, fan_s[0], UII, eta)
    Uss = _R2(fan_s[1], Us, eta)
    return StateChain(UI, UII, UIII, Up, Upp, Us, Uss, fan, fan_s, eta)


# ---------------------------------------------------------------- regions
REGION_NAMES = ("L", "L3", "L'", "L2", "L''", "L1", "M", "R3", "R'", "R2", "R''", "R1", "R")
COMPRESSION = ("L3", "L2", "L1", "R3", "R2", "R1")
REGION_FAMILY = {"L3": 3, "L2": 2, "L1": 1, "R3": 3, "R2": 2, "R1": 1}


@dataclass(frozen=True)
class Regions:
    intervals: dict  # name -> (a, b), in the order of REGION_NAMES

    def __getitem__(self, name):
        return self.intervals[name]

    @property
    def endpoints(self):
        pts = []
        for n in REGION_NAMES:
            pts.extend(self.intervals[n])
        return np.array(pts)

    @property
    def R_w(self):
        return [self.intervals[n] for n in COMPRESSION]

    @property
    def R_c(self):
        return [self.intervals[n] for n in REGION_NAMES if n not in COMPRESSION]

    def locate(self, x):
        """Region name containing x (closed on the left), or None."""
        for n in REGION_NAMES:
            a, b = self.intervals[n]
            if a <= x < b:
                return n
        return None

    def length_w(self):
        return sum(b - a for a, b in self.R_w)


def build_regions(chain, ledger, p=None):
    eta = _eta(p) if p is not None else chain.eta
    lam = lambda i, U: eigenvalues(U, eta)[i - 1]  # noqa: E731
    q, fq, fp, rho = ledger.q, ledger.frak_q, ledger.frak_p, ledger.rho
    c = chain
    e = [
        -rho,
        -fq - lam(3, c.U_I),
        -fq - lam(3, c.Uprime),
        -q - lam(2, c.Uprime),
        -q - lam(2, c.Udprime),
        -fp - lam(1, c.Udprime),
        -fp - lam(1, c.U_II),
        fp - lam(3, c.U_II),
        fp - lam(3, c.Ustar),
        q - lam(2, c.Ustar),
        q - lam(2, c.Ustarstar),
        fq - lam(1, c.Ustarstar),
        fq - lam(1, c.U_III),
        rho,
    ]
    if np.any(np.diff(e) <= 0):
        raise ValueError(f"region endpoints are not increasing: {e}")
    return Regions({n: (float(e[k]), float(e[k + 1])) for k, n in enumerate(REGION_NAMES)})


# --------------------------------------------------------------- profiles
class Profile:
    """Callable x -> (n, 3) states with breakpoint and flatness metadata.

    ``flats`` lists intervals on which the profile is known to be constant;
    sampling skips them.  ``lipschitz`` is an upper bound on |U'|.
    """

    def __init__(self, fn, breakpoints=(), flats=(), lipschitz=math.inf, support=None,
                 name="profile"):
        self._fn = fn
        self.breakpoints = np.asarray(sorted(breakpoints), float)
        self.flats = [tuple(map(float, f)) for f in flats]
        self.lipschitz = float(lipschitz)
        self.support = support
        self.name = name

    def __call__(self, x):
        xa = np.atleast_1d(np.asarray(x, float))
        out = np.asarray(self._fn(xa), float).reshape(xa.size, 3)
        return out[0] if np.ndim(x) == 0 else out

    def __add__(self, other):
        f, g = self, other
        flats = _intersect_flats(f.flats, g.flats)
        return Profile(
            lambda x: f(x) + g(x),
            np.union1d(f.breakpoints, g.breakpoints),
            flats,
            f.lipschitz + g.lipschitz,
            name=f"{f.name}+{g.name}",
        )


def _intersect_flats(A, B):
    out = []
    for a0, a1 in A:
        for b0, b1 in B:
            lo, hi = max(a0, b0), min(a1, b1)
            if lo < hi:
                out.append((lo, hi))
    return sorted(out)


@njit
def _eval_segments(x, seg_a, seg_b, kind, base, anchor, lam0, eta, out):
    n = x.shape[0]
    m = seg_a.shape[0]
    for i in range(n):
        xi = x[i]
        j = 0
        while j < m - 1 and xi >= seg_b[j]:
            j += 1
        u = base[j, 0]
        v = base[j, 1]
        w = base[j, 2]
        k = kind[j]
        if k == 3:
            t = (xi - anchor[j] + lam0[j]) / (4.0 * eta)
            out[i, 0] = u + t
            out[i, 1] = v
            out[i, 2] = w + t * (v - 2.0)
        elif k == 1:
            t = (anchor[j] - lam0[j] - xi) / (4.0 * eta)
            out[i, 0] = u + t
            out[i, 1] = v
            out[i, 2] = w + t * v
        elif k == 2:
            t = 0.5 * (anchor[j] - xi) - v
            uu, vv, ww, _ = K.integral_curve2(t, u, v, w, eta)
            out[i, 0] = uu
            out[i, 1] = vv
            out[i, 2] = ww
        else:
            out[i, 0] = u
            out[i, 1] = v
            out[i, 2] = w


def build_V(chain, regions, ledger, p=None):
    """Six separated compression waves between the chain states.

    On each compression interval the curve parameter is explicit in x
    because lambda_1, lambda_3 vary linearly along their straight wave
    curves and lambda_2 = 2v.  Outside [-rho, rho] V is extended by its
    end values.
    """
    eta = _eta(p) if p is not None else chain.eta
    c = chain
    lam = lambda i, U: eigenvalues(U, eta)[i - 1]  # noqa: E731
    q, fq, fp = ledger.q, ledger.frak_q, ledger.frak_p
    table = {
        "L": (0, c.U_I, 0.0),
        "L3": (3, c.U_I, -fq),
        "L'": (0, c.Uprime, 0.0),
        "L2": (2, c.Uprime, -q),
        "L''": (0, c.Udprime, 0.0),
        "L1": (1, c.Udprime, -fp),
        "M": (0, c.U_II, 0.0),
        "R3": (3, c.U_II, fp),
        "R'": (0, c.Ustar, 0.0),
        "R2": (2, c.Ustar, q),
        "R''": (0, c.Ustarstar, 0.0),
        "R1": (1, c.Ustarstar, fq),
        "R": (0, c.U_III, 0.0),
    }
    seg_a = np.array([regions[n][0] for n in REGION_NAMES])
    seg_b = np.array([regions[n][1] for n in REGION_NAMES])
    kind = np.array([table[n][0] for n in REGION_NAMES], np.int64)
    base = np.array([table[n][1] for n in REGION_NAMES], float)
    anchor = np.array([table[n][2] for n in REGION_NAMES])
    lam0 = np.array([lam(max(k, 1), b) if k in (1, 3) else 0.0 for k, b in zip(kind, base)])
    seg_a[0] = -np.inf
    seg_b[-1] = np.inf

    def fn(x):
        out = np.empty((x.size, 3))
        _eval_segments(x, seg_a, seg_b, kind, base, anchor, lam0, eta, out)
        return out

    flats = [regions[n] for n in REGION_NAMES if n not in COMPRESSION]
    flats[0] = (-np.inf, flats[0][1])
    flats[-1] = (flats[-1][0], np.inf)
    r1 = np.linalg.norm(eigenvector(1, c.U_I, eta))
    r3 = np.linalg.norm(eigenvector(3, c.U_I, eta))
    r2 = max(np.linalg.norm(eigenvector(2, U, eta)) for U in (c.Uprime, c.Ustar))
    lip = max(r1, r3) / (4 * eta) * 1.01 + 0.5 * r2 * 1.01
    return Profile(fn, regions.endpoints, flats, lip, name="V")


def _Z_table(regions, ledger):
    """Breakpoints and values of Z(x) = int_0^x zeta, zeta = zeta_w on R_w, zeta_c else."""
    pts = []
    slopes = []
    for n in REGION_NAMES:
        a, b = regions[n]
        pts.append(a)
        slopes.append(ledger.zeta_w if n in COMPRESSION else ledger.zeta_c)
    pts.append(regions["R"][1])
    pts = np.array(pts)
    slopes = np.array(slopes)
    Z = np.concatenate([[0.0], np.cumsum(slopes * np.diff(pts))])
    # shift so that Z(0) = 0
    Z0 = np.interp(0.0, pts, Z)
    return pts, Z - Z0, slopes


def build_Psi(regions, ledger, U_I, p=None):
    eta = _eta(p) if p is not None else ledger.eta
    d = -eigenvector(1, U_I, eta) - eigenvector(2, U_I, eta) + eigenvector(3, U_I, eta)
    pts, Z, slopes = _Z_table(regions, ledger)

    def fn(x):
        z = np.interp(x, pts, Z)  # constant beyond +-rho
        return z[:, None] * d[None, :]

    flats = [(-np.inf, pts[0]), (pts[-1], np.inf)]
    if ledger.zeta_c == 0:
        flats += [regions[n] for n in REGION_NAMES if n not in COMPRESSION]
    flats = _merge_intervals(flats)
    lip = max(ledger.zeta_w, ledger.zeta_c) * np.linalg.norm(d)
    prof = Profile(fn, pts, flats, lip, name="Psi")
    prof.direction = d
    return prof


def _merge_intervals(iv):
    iv = sorted(iv)
    out = []
    for a, b in iv:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def build_tildeU(V, Psi, ledger):
    """V + Psi on ]-rho, rho[, linear ramps to zero over [3rho/2 ... rho] outside."""
    rho = ledger.rho
    core = V + Psi
    UL = core(-rho)
    UR = core(rho)
    w = rho / 2

    def fn(x):
        out = core(np.clip(x, -rho, rho))
        left = x < -rho
        right = x > rho
        if left.any():
            out[left] = UL[None, :] * np.clip(1 - (-rho - x[left]) / w, 0, 1)[:, None]
        if right.any():
            out[right] = UR[None, :] * np.clip(1 - (x[right] - rho) / w, 0, 1)[:, None]
        return out

    ramp = float(max(np.abs(UL).max(), np.abs(UR).max()) / w)
    flats = _intersect_flats(core.flats, [(-rho, rho)])
    flats += [(-np.inf, -1.5 * rho), (1.5 * rho, np.inf)]
    bp = np.union1d(core.breakpoints, [-1.5 * rho, -rho, rho, 1.5 * rho])
    prof = Profile(fn, bp, sorted(flats), max(core.lipschitz, ramp), support=(-1.5 * rho, 1.5 * rho),
                   name="tildeU")
    prof.core = core
    return prof


def mollify(profile, varsigma, n=32):
    """Convolution with the quartic bump of half-width varsigma."""
    if not varsigma > 0:
        raise ValueError("varsigma must be positive")
    z, m = kernel_nodes(n)
    h = float(varsigma)

    def fn(x):
        acc = np.zeros((x.size, 3))
        for zk, mk in zip(z, m):
            acc += mk * profile(x + h * zk)
        return acc

    flats = [(a + h, b - h) for a, b in profile.flats if b - a > 2 * h]
    bp = np.union1d(profile.breakpoints - h, profile.breakpoints + h)
    supp = None
    if profile.support is not None:
        supp = (profile.support[0] - h, profile.support[1] + h)
    return Profile(fn, bp, flats, profile.lipschitz, supp, name=f"mollified({profile.name})")


def make_perturbation(seed, r, rho, support=None, n_modes=None):
    """Random smooth profile P with sup|P| + sup|P'| < r.

    Each component is a sum of 5 to 20 sinusoids with random phases times
    the window (1 - y^2)^2 on every support interval, y the rescaled
    coordinate.  Amplitudes are scaled so that a rigorous bound on the
    W^{1,inf} norm (summed over components) equals 0.9 r.
    """
    rng = np.random.default_rng(seed)
    intervals = [(-rho, rho)] if support is None else [tuple(map(float, s)) for s in support]
    if r <= 0:
        return Profile(lambda x: np.zeros((x.size, 3)), (), [(-np.inf, np.inf)], 0.0,
                       name="zero")
    nm = int(rng.integers(5, 21)) if n_modes is None else int(n_modes)
    k = rng.uniform(0.1, 10.0, size=(3, nm))
    ph = rng.uniform(0, 2 * np.pi, size=(3, nm))
    a = rng.uniform(-1, 1, size=(3, nm))
    half_min = min((b - a_) / 2 for a_, b in intervals)
    wmax_d = 8.0 / (3.0 * math.sqrt(3.0)) / half_min  # sup |d/dx (1 - y^2)^2|
    bound = float(np.sum(np.abs(a) * (1 + wmax_d)) + np.sum(np.abs(a) * k))
    a *= 0.9 * r / bound

    ivs = np.array(intervals)

    def fn(x):
        out = np.zeros((x.size, 3))
        win = np.zeros(x.size)
        for lo, hi in ivs:
            c, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
            y = (x - c) / hw
            inside = np.abs(y) < 1
            win[inside] = (1 - y[inside] ** 2) ** 2
        idx = np.flatnonzero(win > 0)
        for c0 in range(0, idx.size, 65536):
            sel = idx[c0:c0 + 65536]
            xs = x[sel]
            for i in range(3):
                out[sel, i] = win[sel] * (np.sin(np.outer(xs, k[i]) + ph[i]) @ a[i])
        return out

    flats = []
    prev = -np.inf
    for lo, hi in sorted(intervals):
        if lo > prev:
            flats.append((prev, lo))
        prev = hi
    flats.append((prev, np.inf))
    prof = Profile(fn, ivs.ravel(), flats, 0.9 * r, name=f"perturbation({seed})")
    prof.w1inf_bound = 0.9 * r
    prof.intervals = intervals
    return prof


def sample_mesh(profile, h_nu, epsilon, domain=None, extra_points=()):
    """Piecewise-constant sampling of ``profile``.

    The grid contains every breakpoint of the profile inside ``domain`` plus
    ``extra_points``; each gap is split into equal cells no longer than
    ``h_nu``.  Flat stretches are not subdivided and consecutive equal
    samples are merged.  Returns (positions, states) with one more state
    than positions; the value on [x_i, x_{i+1}) is the sample at x_i.
    """
    h = float(h_nu)
    if not h > 0:
        raise ValueError("h_nu must be positive")
    lo, hi = domain if domain is not None else (profile.breakpoints.min(), profile.breakpoints.max())
    bp = np.concatenate([profile.breakpoints, np.asarray(extra_points, float)])
    bp = np.unique(np.concatenate([[lo, hi], bp[(bp > lo) & (bp < hi)]]))
    flats = profile.flats
    pieces = [bp[:1]]
    relaxed = 0
    for a, b in zip(bp[:-1], bp[1:]):
        L = b - a
        if any(f0 <= a and b <= f1 for f0, f1 in flats):
            pieces.append(np.array([b]))
            continue
        n = max(1, int(math.ceil(L / h - 1e-9)))
        if L / n < (1 - epsilon) * h:
            relaxed += 1
        pieces.append(a + L * np.arange(1, n + 1) / n)
    grid = np.concatenate(pieces)
    if relaxed:
        log.info("mesh: %d gaps shorter than (1-eps)h between forced points", relaxed)
    vals = profile(grid)
    keep = np.ones(grid.size, bool)
    keep[1:] = np.any(vals[1:] != vals[:-1], axis=1)
    positions = grid[keep][1:]
    states = vals[keep]
    sample_mesh.last_relaxed = relaxed
    return positions, states


sample_mesh.last_relaxed = 0


def make_W(chain, q=Q):
    return np.array([-q, q], float), np.vstack([chain.U_I, chain.U_II, chain.U_III])


def export_profile_csv(profile, grid, path):
    x = np.asarray(grid, float)
    U = profile(x)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "u", "v", "w"])
        for xi, (u, v, w) in zip(x, U):
            wr.writerow([f"{xi:.17g}", f"{u:.17g}", f"{v:.17g}", f"{w:.17g}"])
