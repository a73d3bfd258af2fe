"""Ready-made runs: the three-state W datum and the sampled Lipschitz datum.

Both return ``(sim, ctx)`` with the simulation tagged at t=0 and a context
dict holding the ledger and the geometry needed by the census.
"""
import math

import numpy as np

from .census import tag_initial_fronts
from .datum import (
    build_Psi,
    build_regions,
    build_state_chain,
    build_tildeU,
    build_V,
    make_params,
    make_perturbation,
    mollify,
    sample_mesh,
    w_ledger,
)
from .riemann import compose
from .system import FluxParams
from .tracking import EngineConfig, init_from_piecewise

# scaled mode used at desk scale: the ledger couplings of the smooth
# background Psi are switched off so that the run stays affordable and
# inside the solver range |U| < 0.9
LIPSCHITZ_V = {"zeta_c": 0.0, "zeta_w": 0.0}


def w_states(omega=0.05, delta=0.2, eta=0.01):
    p = FluxParams(eta)
    UI = np.array([delta, 0.0, -delta])
    UII = compose(UI, (-omega, -omega, omega), p)
    UIII = compose(UII, (-omega, -omega, omega), p)
    return np.vstack([UI, UII, UIII])


def w_scenario(omega=0.05, delta=0.2, eta=0.01, q=20.0, nu=0.01, mu_nu=1e-12, **engine):
    """Two jumps at -q and q, each resolved into three shocks of size omega."""
    L = w_ledger(omega=omega, delta=delta, eta=eta, q=q)
    S = w_states(omega, delta, eta)
    cfg = EngineConfig(nu=nu, mu_nu=mu_nu, **engine)
    sim = init_from_piecewise(S, [-q, q], FluxParams(eta), cfg)
    tag_initial_fronts(sim, convention="all_A")
    merge_t = 2 * q / (S[0, 1] - S[2, 1])
    ctx = {
        "scenario": "W", "ledger": L, "states": S, "positions": np.array([-q, q]),
        "omega": omega, "epsilon": float("nan"), "merge_time": merge_t,
        "window": (0.0, 2 * L.T_tilde, -2 * q, 2 * q), "params": FluxParams(eta),
    }
    return sim, ctx


def lipschitz_profile(epsilon=0.4, overrides=None):
    """Ledger, state chain, regions and the profile V (+ Psi when zeta_c > 0)."""
    ov = dict(LIPSCHITZ_V if overrides is None else overrides)
    L = make_params(epsilon, overrides=ov)
    chain = build_state_chain(L)
    R = build_regions(chain, L)
    V = build_V(chain, R, L)
    if L.zeta_c > 0 or L.zeta_w > 0:
        prof = build_tildeU(V, build_Psi(R, L, chain.U_I), L)
    else:
        prof = V
    return L, chain, R, prof


def perturbation_radius(epsilon):
    """Inflated radius eps * zeta_c, with zeta_c from the unscaled ledger."""
    return epsilon * make_params(epsilon).zeta_c


def lipschitz_scenario(epsilon=0.4, h_factor=1e-3, nu=0.01, mu_nu=None, overrides=None,
                       perturbation_seed=None, perturbation_r=None, varsigma=None,
                       **engine):
    """Sampled datum on ]-rho, rho[ with mesh h = h_factor * eta.

    With ``perturbation_seed`` a seeded W^{1,inf}-small perturbation
    supported on the compression regions is added before sampling.  With
    ``varsigma`` the profile is mollified at that half-width first.
    """
    L, chain, R, prof = lipschitz_profile(epsilon, overrides)
    if varsigma is not None:
        prof = mollify(prof, varsigma)
    pert = None
    if perturbation_seed is not None:
        r = perturbation_radius(epsilon) if perturbation_r is None else perturbation_r
        pert = make_perturbation(perturbation_seed, r, L.rho, support=R.R_w)
        prof = prof + pert
    pos, st = sample_mesh(prof, h_factor * L.eta, epsilon, domain=(-L.rho, L.rho))
    p = FluxParams(L.eta)
    engine.setdefault("domain", (-L.rho, L.rho))
    cfg = EngineConfig(nu=nu, mu_nu=mu_nu, **engine)
    sim = init_from_piecewise(st, pos, p, cfg)
    tag_initial_fronts(sim, R)
    ctx = {
        "scenario": "lipschitz", "ledger": L, "chain": chain, "regions": R, "profile": prof,
        "perturbation": pert, "omega": L.omega, "epsilon": epsilon, "params": p,
        "window": (0.0, 2 * L.T_tilde, -2 * L.q, 2 * L.q), "n_jumps": len(pos),
        "h": h_factor * L.eta, "varsigma": varsigma,
        "perturbation_r": None if pert is None else pert.w1inf_bound / 0.9,
    }
    return sim, ctx


def generation_thetas(omega, n=5, theta0=None):
    """theta_k = theta0 (omega/2)^k; the default theta0 sits half a decade below omega."""
    base = omega / 2
    t0 = omega * math.sqrt(base) if theta0 is None else theta0
    return [t0 * base ** k for k in range(n)]
