"""Command line: ``bjfront run``, ``bjfront verify`` and ``bjfront export-profile``.

Configs are TOML files with flat keys (plus optional ``[overrides]`` and
``[engine]`` tables).  Example::

    scenario = "W"
    t_end = 800.0
    output_dir = "out/w"
"""
import csv
import hashlib
import json
import math
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from . import engine as E
from .census import (
    _check_theta,
    build_report,
    calibrate_K,
    detect_big_shocks,
    run_with_snapshot,
    tag_of,
)
from .datum import export_profile_csv, make_params
from .errors import BJFrontError, ThresholdTooSmall
from .scenarios import (
    LIPSCHITZ_V,
    generation_thetas,
    lipschitz_profile,
    lipschitz_scenario,
    w_scenario,
)
from .tracking import run_until

SCENARIOS = ("W", "lipschitz_V", "tildeU", "mollified", "perturbed")
EXPORTS = ("fronts_csv", "events_jsonl", "census_json", "profile_csv")
ENGINE_KEYS = ("log_events", "log_vertices", "vertex_floor", "event_cap", "np_floor",
               "tie_epsilon", "lambda_hat", "chain_tol")
T_CHECK = 1.2


class ConfigError(BJFrontError):
    pass


@dataclass
class ScenarioConfig:
    scenario: str = "W"
    seed: int | None = None
    epsilon: float = 0.4
    nu: float = 0.01
    h_nu: float | None = None  # default 1e-3 * eta
    mu_nu: float | None = None
    t_end: float | None = None  # default 2 T~
    window: list | None = None  # [t0, t1, x0, x1]
    output_dir: str = "bjfront_out"
    export: list = field(default_factory=lambda: list(EXPORTS))
    overrides: dict | None = None
    varsigma: float | None = None
    perturbation_r: float | None = None
    thetas: list | None = None
    # W datum
    omega: float = 0.05
    delta: float = 0.2
    eta: float = 0.01
    q: float = 20.0
    engine: dict = field(default_factory=dict)

    def validate(self):
        m = re.fullmatch(r"perturbed\((\d+)\)", self.scenario)
        if m:
            self.scenario, self.seed = "perturbed", int(m.group(1))
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.scenario == "perturbed" and self.seed is None:
            raise ConfigError("scenario 'perturbed' needs a seed")
        bad = set(self.export) - set(EXPORTS)
        if bad:
            raise ConfigError(f"unknown export targets {sorted(bad)}")
        bad = set(self.engine) - set(ENGINE_KEYS)
        if bad:
            raise ConfigError(f"unknown engine keys {sorted(bad)}")
        if self.window is not None and len(self.window) != 4:
            raise ConfigError("window must be [t0, t1, x0, x1]")
        if self.t_end is not None and not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        return self

    @property
    def paper_faithful(self):
        if self.scenario == "W":
            return False
        return not self.effective_overrides()

    def effective_overrides(self):
        if self.overrides is not None:
            return dict(self.overrides)
        if self.scenario == "tildeU":
            return {}
        return dict(LIPSCHITZ_V)

    def hash(self):
        blob = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def load_config(path):
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    known = set(ScenarioConfig.__dataclass_fields__)
    bad = set(raw) - known
    if bad:
        raise ConfigError(f"unknown config keys {sorted(bad)}")
    return ScenarioConfig(**raw).validate()


def default_varsigma(epsilon):
    """Half the admissible width eps^2 eta zeta_c of the unscaled ledger."""
    L = make_params(epsilon)
    return 0.5 * epsilon ** 2 * L.eta * L.zeta_c


def build(cfg):
    """Initial SimState and context for a validated config."""
    if cfg.scenario == "W":
        return w_scenario(cfg.omega, cfg.delta, cfg.eta, cfg.q, nu=cfg.nu,
                          mu_nu=1e-12 if cfg.mu_nu is None else cfg.mu_nu, **cfg.engine)
    L = make_params(cfg.epsilon, overrides=cfg.effective_overrides())
    h = 1e-3 * L.eta if cfg.h_nu is None else cfg.h_nu
    kw = dict(cfg.engine)
    if cfg.scenario == "mollified":
        kw["varsigma"] = cfg.varsigma if cfg.varsigma is not None else default_varsigma(cfg.epsilon)
    if cfg.scenario == "perturbed":
        kw["perturbation_seed"] = cfg.seed
        kw["perturbation_r"] = cfg.perturbation_r
        kw.setdefault("np_floor", 1e-10)
    return lipschitz_scenario(cfg.epsilon, h / L.eta, nu=cfg.nu, mu_nu=cfg.mu_nu,
                              overrides=cfg.effective_overrides(), **kw)


def _g(v):
    return f"{float(v):.17g}"


def write_fronts_csv(sim, path, t_end):
    polys = sim.polylines()
    fd, fi = sim.fd, sim.fi
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\r\n")
        wr.writerow(["front_id", "family", "group", "t_birth", "t_death", "polyline"])
        for k in range(sim.n_rows):
            pts = polys.get(k, np.empty((0, 3)))
            tail = min(t_end, fd[k, E.TD])
            pts_txt = [f"{_g(t)} {_g(x)}" for t, x, _ in pts]
            if not pts.size or pts[-1, 0] < tail:
                x = sim.x_at(k, tail, pts) if pts.size else math.nan
                if math.isfinite(x):
                    pts_txt.append(f"{_g(tail)} {_g(x)}")
            wr.writerow([k, int(fi[k, E.FAM]), str(tag_of(sim, k)), _g(fd[k, E.TB]),
                         _g(fd[k, E.TD]), ";".join(pts_txt)])


def write_events_jsonl(sim, path):
    with open(path, "w", encoding="utf-8") as fh:
        for j in range(sim.n_logged):
            fh.write(json.dumps(sim.record(j).to_dict(), ensure_ascii=False) + "\n")


def _profile_fn(cfg, ctx):
    if cfg.scenario == "W":
        pos, S = ctx["positions"], ctx["states"]
        return lambda x: S[np.searchsorted(pos, x, side="right")]
    return ctx["profile"]


def _thetas(cfg, sim, omega):
    if cfg.thetas is not None:
        cand = cfg.thetas
    else:
        cand = [omega / 2] + generation_thetas(omega, 5)
    keep, skipped = [], []
    for th in cand:
        try:
            _check_theta(sim, float(th), omega)
            keep.append(float(th))
        except ThresholdTooSmall:
            skipped.append(float(th))
    return keep, skipped


def run_scenario(cfg, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sim, ctx = build(cfg)
    L = ctx["ledger"]
    omega = ctx["omega"]
    t_end = cfg.t_end if cfg.t_end is not None else 2 * L.T_tilde
    window = tuple(cfg.window) if cfg.window is not None else ctx["window"]
    big = None
    if cfg.scenario == "W":
        run_until(sim, t_end)
        eps = 1.0  # the W datum carries no B fronts
    else:
        eps = cfg.epsilon
        if t_end > T_CHECK:
            run_with_snapshot(sim, T_CHECK, t_end)
            big = detect_big_shocks(sim, omega, eps, T_CHECK, 2 * L.T_tilde)
        else:
            run_until(sim, t_end)
    thetas, skipped = _thetas(cfg, sim, omega)
    K = calibrate_K(sim.meta["ledger_t0"], omega, eps)
    rep = build_report(sim, omega, eps, thetas, window, big, K)
    if "fronts_csv" in cfg.export:
        write_fronts_csv(sim, out / "fronts.csv", t_end)
    if "events_jsonl" in cfg.export:
        write_events_jsonl(sim, out / "events.jsonl")
    if "census_json" in cfg.export:
        d = rep.as_dict()
        d["skipped_thetas"] = skipped
        d["window"] = list(window)
        with open(out / "census.json", "w", encoding="utf-8") as fh:
            json.dump(d, fh, indent=2, default=_jsonable)
    if "profile_csv" in cfg.export:
        x0, x1 = window[2], window[3]
        export_profile_csv(_profile_fn(cfg, ctx), np.linspace(x0, x1, 8001), out / "profile.csv")
    meta = {
        "version": __version__,
        "config_hash": cfg.hash(),
        "config": asdict(cfg),
        "scenario": cfg.scenario,
        "paper_faithful": cfg.paper_faithful,
        "overrides": cfg.effective_overrides() if cfg.scenario != "W" else {},
        "calibrated": {
            "ledger": L.as_dict(),
            "K": K,
            "omega": omega,
            "t_end": t_end,
            "h_nu": ctx.get("h"),
            "mu_nu": sim.config.mu_nu,
            "varsigma": ctx.get("varsigma"),
            "perturbation_r": ctx.get("perturbation_r"),
        },
        "stats": sim.stats(),
    }
    with open(out / "metadata.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_jsonable)
    return sim, rep


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    return str(o)


def _fail(exc, code=2):
    err = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("violations", "failed", "diff"):
        if hasattr(exc, attr):
            err[attr] = getattr(exc, attr)
    click.echo(json.dumps(err, default=_jsonable), err=True)
    sys.exit(code)


def _out_dir(default):
    return os.environ.get("BJFRONT_OUTPUT_DIR") or default


@click.group()
@click.version_option(__version__)
def main():
    """Front tracking runs, acceptance checks and profile export."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
def run(config_path):
    """Run the scenario described by a TOML config and write artifacts."""
    try:
        cfg = load_config(config_path)
        out = _out_dir(cfg.output_dir)
        sim, _ = run_scenario(cfg, out)
    except (BJFrontError, ValueError, TypeError, tomllib.TOMLDecodeError) as exc:
        _fail(exc)
    st = sim.stats()
    click.echo(f"{cfg.scenario}: {st['n_events']} events, {st['n_fronts_created']} fronts -> {out}")


@main.command()
@click.option("--only", multiple=True, help="Run just this suite (repeatable).")
@click.option("--mu-nu", type=float, default=None, help="Threshold for the Lipschitz-datum runs.")
@click.option("--list", "list_", is_flag=True, help="List the suite names and exit.")
def verify(only, mu_nu, list_):
    """Run the acceptance battery and print claim, status, measured value, tolerance."""
    from .acceptance import SUITES, format_table, run_suites

    if list_:
        click.echo("\n".join(SUITES))
        return
    try:
        rows = run_suites(only or None, echo=lambda s: click.echo(s, err=True), mu_nu=mu_nu)
    except KeyError as exc:
        _fail(exc)
    except BJFrontError as exc:
        _fail(exc, 1)
    click.echo(format_table(rows))
    failed = [r for r in rows if r.status == "FAIL"]
    click.echo(f"{len(rows) - len(failed)} of {len(rows)} checks passed or informational")
    sys.exit(1 if failed else 0)


@main.command("export-profile")
@click.option("--scenario", type=click.Choice(SCENARIOS), required=True)
@click.option("--epsilon", type=float, default=0.4, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--n", "n_points", type=int, default=8001, show_default=True)
@click.option("--xmin", type=float, default=None)
@click.option("--xmax", type=float, default=None)
@click.option("--output-dir", default="bjfront_out", show_default=True)
def export_profile(scenario, epsilon, seed, n_points, xmin, xmax, output_dir):
    """Write the initial profile of a scenario to profile.csv."""
    try:
        cfg = ScenarioConfig(scenario=scenario, epsilon=epsilon, seed=seed).validate()
        out = Path(_out_dir(output_dir))
        out.mkdir(parents=True, exist_ok=True)
        if scenario == "W":
            _, ctx = w_scenario(cfg.omega, cfg.delta, cfg.eta, cfg.q)
            fn = _profile_fn(cfg, ctx)
            lo, hi = -2 * cfg.q, 2 * cfg.q
        else:
            L, _, R, prof = lipschitz_profile(epsilon, cfg.effective_overrides())
            if scenario == "mollified":
                from .datum import mollify

                prof = mollify(prof, default_varsigma(epsilon))
            if scenario == "perturbed":
                from .datum import make_perturbation
                from .scenarios import perturbation_radius

                prof = prof + make_perturbation(seed, perturbation_radius(epsilon), L.rho,
                                                support=R.R_w)
            fn = prof
            lo, hi = -2 * L.q, 2 * L.q
        lo = lo if xmin is None else xmin
        hi = hi if xmax is None else xmax
        export_profile_csv(fn, np.linspace(lo, hi, n_points), out / "profile.csv")
    except (BJFrontError, ValueError) as exc:
        _fail(exc)
    click.echo(str(out / "profile.csv"))


if __name__ == "__main__":
    main()
