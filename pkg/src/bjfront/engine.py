"""Array-based front tracking core.

All state lives in flat numpy arrays so that the event loop compiles under
numba.  :mod:`bjfront.tracking` wraps these arrays in a friendlier object.

Front table ``fd`` (float) columns and ``fi`` (int) columns are listed
below; a front keeps its row (its id) for its whole life.  Interactions
that continue an incoming wave reuse its row; new waves get new rows.
"""
import math

import numpy as np

from ._jit import njit
from . import kernels as K
from . import waves as Wv
from .constants import WAVE_FLOOR

# fd columns
X0, T0, SPD, ULU, ULV, ULW, URU, URV, URW, PRM, TB, TD = range(12)
NFD = 12
# fi columns
FAM, KIND, GRP, GEN, PREV, NEXT, STAT, VER = range(8)
NFI = 8
# groups
GA, GB, GC, GNP = 0, 1, 2, 3
# front status
DEAD, ALIVE, FROZEN = 0, 1, 2
# integer meta
(M_NF, M_HEAD, M_HN, M_NEV, M_NVX, M_STATUS, M_RULEGAP, M_RARE_NEW, M_NP_NEW, M_MAXGEN, M_SEQ,
 M_NEW2, M_NLOG) = range(13)
# event log modes (cfg[C_LOGEV])
LOG_NONE, LOG_ALL, LOG_AA = 0, 1, 2
NMI = 16
# float meta
F_TIME, F_NP_ABS, F_NP_SUM, F_NP_MAX, F_SUMA, F_SUMB, F_MAXA, F_MAXB, F_NPALL_MAX = range(9)
NMF = 16
# config
(C_ETA, C_NU, C_MU, C_LAMHAT, C_XMIN, C_XMAX, C_TIE, C_CAP, C_LOGEV, C_LOGVX, C_CHAIN,
 C_NPFLOOR, C_VXMIN) = range(13)
NCFG = 13
# event log widths: ef = t, x, s_in_a, s_in_b, s_out[4]; ei = a, b, out[4], tax, solver, nout
NEF = 8
NEI = 9
# run status
ST_DONE, ST_GROW, ST_STORM, ST_SOLVER, ST_CHAIN = 0, 1, 2, 3, 4
# taxonomy codes
TAX_NP = 99
TAX_GAP = 100  # + 10*fa + fb for a pair with no rule
# solver codes
SOLV_ACC, SOLV_SIMP, SOLV_NP = 0, 1, 2
MAXGEN = 64


@njit
def strength_of(fd, fi, k):
    return abs(fd[k, PRM])


@njit
def ledger_add(fd, fi, k, sign, mf, csum, cmax):
    s = sign * strength_of(fd, fi, k)
    g = fi[k, GRP]
    if g == GA:
        mf[F_SUMA] += s
        if mf[F_SUMA] > mf[F_MAXA]:
            mf[F_MAXA] = mf[F_SUMA]
    elif g == GB:
        mf[F_SUMB] += s
        if mf[F_SUMB] > mf[F_MAXB]:
            mf[F_MAXB] = mf[F_SUMB]
    elif g == GC:
        m = fi[k, GEN]
        if m >= MAXGEN:
            m = MAXGEN - 1
        csum[m] += s
        if csum[m] > cmax[m]:
            cmax[m] = csum[m]
    else:
        mf[F_NP_SUM] += s
        if mf[F_NP_SUM] > mf[F_NP_MAX]:
            mf[F_NP_MAX] = mf[F_NP_SUM]
        tot = mf[F_NP_SUM] + mf[F_NP_ABS]
        if tot > mf[F_NPALL_MAX]:
            mf[F_NPALL_MAX] = tot


@njit
def pos(fd, k, t):
    return fd[k, X0] + fd[k, SPD] * (t - fd[k, T0])


@njit
def add_vertex(vf, vi, mi, cfg, fi, k, t, x, strength, prev):
    """Log (t, x, strength) for row k; rarefaction fronts get a negative strength.

    With a vertex floor, a vertex is kept when the new or the previous
    strength ``prev`` reaches it, so segments above the floor are complete.
    """
    if cfg[C_LOGVX] == 0.0 or max(strength, prev) < cfg[C_VXMIN]:
        return
    if fi[k, KIND] == Wv.RAREFACTION:
        strength = -strength
    n = mi[M_NVX]
    vf[n, 0] = t
    vf[n, 1] = x
    vf[n, 2] = strength
    vi[n] = k
    mi[M_NVX] = n + 1


# ---------------------------------------------------------------- heap
@njit
def _heap_less(hf, hi, i, j):
    if hf[i, 0] < hf[j, 0]:
        return True
    if hf[i, 0] > hf[j, 0]:
        return False
    return hf[i, 1] < hf[j, 1]


@njit
def _heap_swap(hf, hi, i, j):
    for c in range(2):
        tmp = hf[i, c]
        hf[i, c] = hf[j, c]
        hf[j, c] = tmp
    for c in range(4):
        tmpi = hi[i, c]
        hi[i, c] = hi[j, c]
        hi[j, c] = tmpi


@njit
def heap_push(hf, hi, mi, t, x, a, b, va, vb):
    n = mi[M_HN]
    hf[n, 0] = t
    hf[n, 1] = x
    hi[n, 0] = a
    hi[n, 1] = b
    hi[n, 2] = va
    hi[n, 3] = vb
    mi[M_HN] = n + 1
    i = n
    while i > 0:
        par = (i - 1) // 2
        if _heap_less(hf, hi, i, par):
            _heap_swap(hf, hi, i, par)
            i = par
        else:
            break


@njit
def heap_pop(hf, hi, mi):
    """Remove the root; its fields are copied into row n-1 before returning n-1."""
    n = mi[M_HN] - 1
    _heap_swap(hf, hi, 0, n)
    mi[M_HN] = n
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        m = i
        if l < n and _heap_less(hf, hi, l, m):
            m = l
        if r < n and _heap_less(hf, hi, r, m):
            m = r
        if m == i:
            break
        _heap_swap(hf, hi, i, m)
        i = m
    return n


# ---------------------------------------------------------- scheduling
@njit
def schedule_pair(fd, fi, hf, hi, mi, a, b, tnow):
    if a < 0 or b < 0:
        return
    if fi[a, STAT] != ALIVE or fi[b, STAT] != ALIVE:
        return
    sa = fd[a, SPD]
    sb = fd[b, SPD]
    if sa <= sb:
        return
    xa = pos(fd, a, tnow)
    xb = pos(fd, b, tnow)
    dt = (xb - xa) / (sa - sb)
    if dt < 0.0:
        dt = 0.0
    heap_push(hf, hi, mi, tnow + dt, xa + sa * dt, a, b, fi[a, VER], fi[b, VER])


@njit
def schedule_exit(fd, fi, hf, hi, mi, cfg, k, tnow):
    if fi[k, STAT] != ALIVE:
        return
    s = fd[k, SPD]
    x = pos(fd, k, tnow)
    if s < 0.0 and cfg[C_XMIN] > -np.inf:
        dt = (cfg[C_XMIN] - x) / s
        if dt < 0.0:
            dt = 0.0
        heap_push(hf, hi, mi, tnow + dt, cfg[C_XMIN], k, -1, fi[k, VER], 0)
    elif s > 0.0 and cfg[C_XMAX] < np.inf:
        dt = (cfg[C_XMAX] - x) / s
        if dt < 0.0:
            dt = 0.0
        heap_push(hf, hi, mi, tnow + dt, cfg[C_XMAX], k, -1, fi[k, VER], 0)


@njit
def event_valid(fi, hi, e):
    a = hi[e, 0]
    b = hi[e, 1]
    if fi[a, STAT] != ALIVE or fi[a, VER] != hi[e, 2]:
        return False
    if b < 0:
        return True
    if fi[b, STAT] != ALIVE or fi[b, VER] != hi[e, 3]:
        return False
    return fi[a, NEXT] == b


@njit
def peek_next(fd, fi, hf, hi, mi, cfg, t_end):
    """Pop the next valid event (leftmost among ties); -1 if none before t_end.

    The chosen event is left at row mi[M_HN] (just past the live heap)."""
    tie = cfg[C_TIE]
    while mi[M_HN] > 0:
        e = heap_pop(hf, hi, mi)
        if not event_valid(fi, hi, e):
            continue
        if hf[e, 0] > t_end:
            # put it back
            heap_push(hf, hi, mi, hf[e, 0], hf[e, 1], hi[e, 0], hi[e, 1], hi[e, 2], hi[e, 3])
            return -1
        # look for simultaneous events further left
        t0 = hf[e, 0]
        bt = t0
        bx = hf[e, 1]
        ba = hi[e, 0]
        bb = hi[e, 1]
        bva = hi[e, 2]
        bvb = hi[e, 3]
        nheld = 0
        held_f = np.empty((0, 2))
        held_i = np.empty((0, 4), np.int64)
        while mi[M_HN] > 0 and hf[0, 0] <= t0 + tie:
            e2 = heap_pop(hf, hi, mi)
            if not event_valid(fi, hi, e2):
                continue
            if nheld == held_f.shape[0]:
                nf = np.empty((2 * nheld + 4, 2))
                ni = np.empty((2 * nheld + 4, 4), np.int64)
                nf[:nheld] = held_f[:nheld]
                ni[:nheld] = held_i[:nheld]
                held_f = nf
                held_i = ni
            if hf[e2, 1] < bx:
                held_f[nheld, 0] = bt
                held_f[nheld, 1] = bx
                held_i[nheld, 0] = ba
                held_i[nheld, 1] = bb
                held_i[nheld, 2] = bva
                held_i[nheld, 3] = bvb
                bt = hf[e2, 0]
                bx = hf[e2, 1]
                ba = hi[e2, 0]
                bb = hi[e2, 1]
                bva = hi[e2, 2]
                bvb = hi[e2, 3]
            else:
                held_f[nheld, 0] = hf[e2, 0]
                held_f[nheld, 1] = hf[e2, 1]
                for c in range(4):
                    held_i[nheld, c] = hi[e2, c]
            nheld += 1
        for j in range(nheld):
            heap_push(hf, hi, mi, held_f[j, 0], held_f[j, 1], held_i[j, 0],
                      held_i[j, 1], held_i[j, 2], held_i[j, 3])
        n = mi[M_HN]
        hf[n, 0] = bt
        hf[n, 1] = bx
        hi[n, 0] = ba
        hi[n, 1] = bb
        hi[n, 2] = bva
        hi[n, 3] = bvb
        return n
    return -1


# ------------------------------------------------------- front creation
@njit
def new_front(fd, fi, mi, fam, kind, prm, st, k_out, spd, x, t, grp, gen):
    k = mi[M_NF]
    mi[M_NF] = k + 1
    fd[k, X0] = x
    fd[k, T0] = t
    fd[k, SPD] = spd
    for c in range(6):
        fd[k, ULU + c] = st[k_out, c]
    fd[k, PRM] = prm
    fd[k, TB] = t
    fd[k, TD] = np.inf
    fi[k, FAM] = fam
    fi[k, KIND] = kind
    fi[k, GRP] = grp
    fi[k, GEN] = gen
    fi[k, PREV] = -1
    fi[k, NEXT] = -1
    fi[k, STAT] = ALIVE
    fi[k, VER] = 0
    return k


@njit
def reuse_front(fd, fi, k, fam, kind, prm, st, k_out, spd, x, t):
    fd[k, X0] = x
    fd[k, T0] = t
    fd[k, SPD] = spd
    for c in range(6):
        fd[k, ULU + c] = st[k_out, c]
    fd[k, PRM] = prm
    fi[k, FAM] = fam
    fi[k, KIND] = kind
    fi[k, VER] += 1


@njit
def init_fronts(fd, fi, mi, mf, csum, cmax, vf, vi, cfg, positions, states, grp0):
    """Resolve every jump of a piecewise-constant datum with the accurate solver."""
    eta = cfg[C_ETA]
    nu = cfg[C_NU]
    lam_hat = cfg[C_LAMHAT]
    last = -1
    n_rare = 0
    for j in range(positions.shape[0]):
        ul = states[j, 0]
        vl = states[j, 1]
        wl = states[j, 2]
        ur = states[j + 1, 0]
        vr = states[j + 1, 1]
        wr = states[j + 1, 2]
        if ul == ur and vl == vr and wl == wr:
            continue
        fam_o, prm_o, st, spd_o, kind_o, flag = Wv.accurate_waves(
            ul, vl, wl, ur, vr, wr, eta, nu, lam_hat
        )
        if flag != K.OK:
            mi[M_STATUS] = ST_SOLVER
            return j
        x = positions[j]
        for q in range(fam_o.shape[0]):
            k = new_front(fd, fi, mi, fam_o[q], kind_o[q], prm_o[q], st, q, spd_o[q],
                          x, 0.0, grp0, 0)
            if kind_o[q] == Wv.RAREFACTION:
                n_rare += 1
            if last >= 0:
                fi[last, NEXT] = k
                fi[k, PREV] = last
            else:
                mi[M_HEAD] = k
            last = k
            ledger_add(fd, fi, k, 1.0, mf, csum, cmax)
            add_vertex(vf, vi, mi, cfg, fi, k, 0.0, x, abs(prm_o[q]), 0.0)
    return -1


@njit
def schedule_all(fd, fi, hf, hi, mi, cfg, tnow):
    k = mi[M_HEAD]
    while k >= 0:
        nx = fi[k, NEXT]
        if nx >= 0:
            schedule_pair(fd, fi, hf, hi, mi, k, nx, tnow)
        schedule_exit(fd, fi, hf, hi, mi, cfg, k, tnow)
        k = nx


# ------------------------------------------------------------ resolution
@njit
def _rank(g):
    return g


@njit
def _merge_survivor(fi, a, b):
    ga = fi[a, GRP]
    gb = fi[b, GRP]
    if _rank(gb) < _rank(ga):
        return b, a
    return a, b


@njit
def _new_wave_tag(fi, a, b):
    """Group of a wave created at the interaction of a and b."""
    fa = fi[a, FAM]
    fb = fi[b, FAM]
    m = 0
    if fa != 2 and fi[a, GRP] == GC:
        m = fi[a, GEN]
    if fb != 2 and fi[b, GRP] == GC:
        m = max(m, fi[b, GEN])
    return GC, m + 1


@njit
def resolve(fd, fi, hf, hi, mi, mf, csum, cmax, ef, ei, vf, vi, cfg, e):
    t = hf[e, 0]
    a = hi[e, 0]
    b = hi[e, 1]
    eta = cfg[C_ETA]
    nu = cfg[C_NU]
    lam_hat = cfg[C_LAMHAT]
    mf[F_TIME] = t

    if b < 0:
        # front leaves the computational domain: freeze it
        x = hf[e, 1]
        fd[a, X0] = x
        fd[a, T0] = t
        fi[a, STAT] = FROZEN
        fi[a, VER] += 1
        add_vertex(vf, vi, mi, cfg, fi, a, t, x, strength_of(fd, fi, a), 0.0)
        return ST_DONE

    x = pos(fd, a, t)
    fa = fi[a, FAM]
    fb = fi[b, FAM]
    pa = fd[a, PRM]
    pb = fd[b, PRM]
    ul = fd[a, ULU]
    vl = fd[a, ULV]
    wl = fd[a, ULW]
    ur = fd[b, URU]
    vr = fd[b, URV]
    wr = fd[b, URW]
    gap = abs(fd[a, URU] - fd[b, ULU]) + abs(fd[a, URV] - fd[b, ULV]) + abs(fd[a, URW] - fd[b, ULW])
    if gap > cfg[C_CHAIN]:
        return ST_CHAIN
    sin_a = strength_of(fd, fi, a)
    sin_b = strength_of(fd, fi, b)
    ga_in = fi[a, GRP]
    gb_in = fi[b, GRP]

    solver = SOLV_ACC
    absorbed = 0.0
    # src[q]: row continued by outgoing q (-1 = new wave)
    if fa == 4:
        tax = TAX_NP
        solver = SOLV_NP
        uq, vq, wq, flag = K.wave_curve(fb, pb, ul, vl, wl, eta)
        if flag != K.OK:
            return ST_SOLVER
        ju = ur - uq
        jv = vr - vq
        jw = wr - wq
        jump = math.sqrt(ju * ju + jv * jv + jw * jw)
        nout = 2 if jump > cfg[C_NPFLOOR] else 1
        fam_o = np.zeros(nout, np.int64)
        prm_o = np.zeros(nout)
        st = np.zeros((nout, 6))
        spd_o = np.zeros(nout)
        kind_o = np.zeros(nout, np.int64)
        src = np.full(nout, -1, np.int64)
        fam_o[0] = fb
        prm_o[0] = pb
        kind_o[0] = fi[b, KIND]
        st[0, 0] = ul
        st[0, 1] = vl
        st[0, 2] = wl
        st[0, 3] = uq
        st[0, 4] = vq
        st[0, 5] = wq
        src[0] = b
        if nout == 2:
            fam_o[1] = 4
            prm_o[1] = jump
            kind_o[1] = Wv.NONPHYSICAL
            st[1, 0] = uq
            st[1, 1] = vq
            st[1, 2] = wq
            st[1, 3] = ur
            st[1, 4] = vr
            st[1, 5] = wr
            spd_o[1] = lam_hat
            src[1] = a
        else:
            st[0, 3] = ur
            st[0, 4] = vr
            st[0, 5] = wr
            absorbed = jump
        spd_o[0] = K.wave_speed(fb, pb, st[0, 0], st[0, 1], st[0, 2],
                                st[0, 3], st[0, 4], st[0, 5], eta, lam_hat)
    elif fa == 3 and fb == 1:
        tax = 13
        u1, v1, w1, _ = K.wave_curve(1, pb, ul, vl, wl, eta)
        fam_o = np.array([1, 3], np.int64)
        prm_o = np.array([pb, pa])
        st = np.zeros((2, 6))
        st[0, 0] = ul
        st[0, 1] = vl
        st[0, 2] = wl
        st[0, 3] = u1
        st[0, 4] = v1
        st[0, 5] = w1
        st[1, 0] = u1
        st[1, 1] = v1
        st[1, 2] = w1
        st[1, 3] = ur
        st[1, 4] = vr
        st[1, 5] = wr
        kind_o = np.array([fi[b, KIND], fi[a, KIND]], np.int64)
        spd_o = np.zeros(2)
        for q in range(2):
            spd_o[q] = K.wave_speed(fam_o[q], prm_o[q], st[q, 0], st[q, 1], st[q, 2],
                                    st[q, 3], st[q, 4], st[q, 5], eta, lam_hat)
        src = np.array([b, a], np.int64)
    elif fa == fb and fa != 2:
        tax = 11 if fa == 1 else 33
        p = pa + pb
        surv, lose = _merge_survivor(fi, a, b)
        if abs(p) <= WAVE_FLOOR:
            nout = 0
        else:
            nout = 1
        fam_o = np.full(nout, fa, np.int64)
        prm_o = np.full(nout, p)
        st = np.zeros((nout, 6))
        spd_o = np.zeros(nout)
        kind_o = np.zeros(nout, np.int64)
        src = np.full(nout, surv, np.int64)
        if nout == 1:
            st[0, 0] = ul
            st[0, 1] = vl
            st[0, 2] = wl
            st[0, 3] = ur
            st[0, 4] = vr
            st[0, 5] = wr
            kind_o[0] = Wv.SHOCK if Wv.is_shock_side(fa, p) else Wv.RAREFACTION
            spd_o[0] = K.wave_speed(fa, p, ul, vl, wl, ur, vr, wr, eta, lam_hat)
        else:
            absorbed = math.sqrt((ur - ul) ** 2 + (vr - vl) ** 2 + (wr - wl) ** 2)
    else:
        if fa == 2 and fb == 1:
            tax = 12
        elif fa == 3 and fb == 2:
            tax = 23
        elif fa == 2 and fb == 2:
            tax = 22
        else:
            tax = TAX_GAP + 10 * fa + fb
            mi[M_RULEGAP] += 1
        simple_ok = tax == 12 or tax == 23 or tax == 22
        if simple_ok and abs(pa) * abs(pb) < cfg[C_MU]:
            solver = SOLV_SIMP
            fam_o, prm_o, st, spd_o, kind_o, flag, absorbed = Wv.simplified_waves(
                fa, pa, fb, pb, ul, vl, wl, ur, vr, wr, eta, lam_hat, cfg[C_NPFLOOR]
            )
        else:
            fam_o, prm_o, st, spd_o, kind_o, flag = Wv.accurate_waves(
                ul, vl, wl, ur, vr, wr, eta, nu, lam_hat
            )
        if flag != K.OK:
            return ST_SOLVER
        nout = fam_o.shape[0]
        src = np.full(nout, -1, np.int64)
        used_a = False
        used_b = False
        for q in range(nout):
            f = fam_o[q]
            if f == 4:
                continue
            if f == fa and f == fb and not used_a and not used_b:
                surv, lose = _merge_survivor(fi, a, b)
                src[q] = surv
                used_a = True
                used_b = True
            elif f == fa and not used_a:
                src[q] = a
                used_a = True
            elif f == fb and not used_b:
                src[q] = b
                used_b = True

    # ---- apply: ledger out, kill non-continued incoming
    ledger_add(fd, fi, a, -1.0, mf, csum, cmax)
    ledger_add(fd, fi, b, -1.0, mf, csum, cmax)
    mf[F_NP_ABS] += absorbed
    left = fi[a, PREV]
    right = fi[b, NEXT]
    nout = fam_o.shape[0]
    cont_a = False
    cont_b = False
    for q in range(nout):
        if src[q] == a:
            cont_a = True
        if src[q] == b:
            cont_b = True
    if not cont_a:
        fi[a, STAT] = DEAD
        fd[a, TD] = t
        fi[a, VER] += 1
        add_vertex(vf, vi, mi, cfg, fi, a, t, x, 0.0, sin_a)
    if not cont_b:
        fi[b, STAT] = DEAD
        fd[b, TD] = t
        fi[b, VER] += 1
        add_vertex(vf, vi, mi, cfg, fi, b, t, x, 0.0, sin_b)

    gnew, mnew = _new_wave_tag(fi, a, b)
    rows = np.empty(nout, np.int64)
    prev_src = -1
    for q in range(nout):
        f = fam_o[q]
        if src[q] >= 0:
            k = src[q]
            reuse_front(fd, fi, k, f, kind_o[q], prm_o[q], st, q, spd_o[q], x, t)
            prev_src = k
        else:
            if f == 4:
                g, m = GNP, 0
                mi[M_NP_NEW] += 1
            elif prev_src >= 0 and fam_o[q - 1] == f:
                # extra pieces of a discretized rarefaction keep the parent tag
                g, m = fi[prev_src, GRP], fi[prev_src, GEN]
            else:
                g, m = gnew, mnew
                if f == 2:
                    mi[M_NEW2] += 1
            k = new_front(fd, fi, mi, f, kind_o[q], prm_o[q], st, q, spd_o[q], x, t, g, m)
            if kind_o[q] == Wv.RAREFACTION:
                mi[M_RARE_NEW] += 1
            if g == GC and m > mi[M_MAXGEN]:
                mi[M_MAXGEN] = m
            prev_src = k
        rows[q] = k
        ledger_add(fd, fi, k, 1.0, mf, csum, cmax)
        prev = sin_a if src[q] == a else (sin_b if src[q] == b else 0.0)
        add_vertex(vf, vi, mi, cfg, fi, k, t, x, abs(prm_o[q]), prev)

    # ---- relink
    prv = left
    for q in range(nout):
        k = rows[q]
        fi[k, PREV] = prv
        if prv >= 0:
            fi[prv, NEXT] = k
        else:
            mi[M_HEAD] = k
        prv = k
    if prv >= 0:
        fi[prv, NEXT] = right
    else:
        mi[M_HEAD] = right
    if right >= 0:
        fi[right, PREV] = prv

    # ---- log
    mode = cfg[C_LOGEV]
    if mode == LOG_ALL or (mode == LOG_AA and ga_in == GA and gb_in == GA):
        n = mi[M_NLOG]
        mi[M_NLOG] = n + 1
        ef[n, 0] = t
        ef[n, 1] = x
        ef[n, 2] = sin_a
        ef[n, 3] = sin_b
        ei[n, 0] = a
        ei[n, 1] = b
        for c in range(4):
            ef[n, 4 + c] = 0.0
            ei[n, 2 + c] = -1
        for q in range(min(nout, 4)):
            ei[n, 2 + q] = rows[q]
            ef[n, 4 + q] = abs(prm_o[q])
        ei[n, 6] = tax
        ei[n, 7] = solver
        ei[n, 8] = nout
    mi[M_NEV] += 1

    # ---- schedule
    if nout == 0:
        schedule_pair(fd, fi, hf, hi, mi, left, right, t)
    else:
        schedule_pair(fd, fi, hf, hi, mi, left, rows[0], t)
        for q in range(nout - 1):
            schedule_pair(fd, fi, hf, hi, mi, rows[q], rows[q + 1], t)
        schedule_pair(fd, fi, hf, hi, mi, rows[nout - 1], right, t)
        for q in range(nout):
            schedule_exit(fd, fi, hf, hi, mi, cfg, rows[q], t)
    return ST_DONE


@njit
def run(fd, fi, hf, hi, mi, mf, csum, cmax, ef, ei, vf, vi, cfg, t_end, margin, max_steps):
    """Process events up to t_end; returns a status code.

    Stops early with ST_GROW when any table has fewer than ``margin`` free
    rows, so the caller can enlarge the arrays and call again.
    """
    steps = 0
    while True:
        if fd.shape[0] - mi[M_NF] < margin or hf.shape[0] - mi[M_HN] < 2 * margin + 4:
            return ST_GROW
        if cfg[C_LOGEV] != 0.0 and ef.shape[0] - mi[M_NLOG] < 2:
            return ST_GROW
        if cfg[C_LOGVX] != 0.0 and vf.shape[0] - mi[M_NVX] < 2 * margin + 4:
            return ST_GROW
        if mi[M_NEV] >= cfg[C_CAP]:
            return ST_STORM
        if max_steps > 0 and steps >= max_steps:
            return ST_DONE
        e = peek_next(fd, fi, hf, hi, mi, cfg, t_end)
        if e < 0:
            mf[F_TIME] = max(mf[F_TIME], t_end)
            return ST_DONE
        st = resolve(fd, fi, hf, hi, mi, mf, csum, cmax, ef, ei, vf, vi, cfg, e)
        if st != ST_DONE:
            return st
        steps += 1
