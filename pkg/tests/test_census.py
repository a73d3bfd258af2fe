import json
import math

import numpy as np
import pytest

from bjfront import engine as E
from bjfront.census import (
    GroupTag,
    build_report,
    burgers_oracle,
    calibrate_K,
    count_curve,
    count_shocks,
    ledger_totals,
    propagate_tags,
    tag_initial_fronts,
    tag_of,
)
from bjfront.errors import RuleGap, ThresholdTooSmall
from bjfront.scenarios import generation_thetas, lipschitz_scenario, w_scenario
from bjfront.tracking import InteractionRecord

A, B = GroupTag("A"), GroupTag("B")


def _rec(tax, incoming, outgoing):
    return InteractionRecord(1.0, 0.0, incoming, outgoing, "accurate", tax)


def test_group_tag_validation():
    assert str(GroupTag("C", 3)) == "C3"
    with pytest.raises(ValueError):
        GroupTag("C", 0)
    with pytest.raises(ValueError):
        GroupTag("A", 2)


def test_merge_rank():
    out = propagate_tags(_rec("33", [(0, 3, .01), (1, 3, .02)], [(1, 3, .03)]), {0: B, 1: A})
    assert out == {1: A}
    out = propagate_tags(_rec("33", [(0, 3, .01), (1, 3, .02)], [(0, 3, .03)]), {0: A, 1: A})
    assert out == {0: A}


def test_new_wave_generations():
    out = propagate_tags(_rec("12", [(0, 2, .01), (1, 1, .01)], [(1, 1, .01), (0, 2, .01), (2, 3, 1e-4)]),
                         {0: A, 1: A})
    assert out[2] == GroupTag("C", 1) and out[0] == A and out[1] == A
    out = propagate_tags(_rec("23", [(0, 3, .01), (1, 2, .01)], [(5, 1, 1e-4), (1, 2, .01), (0, 3, .01)]),
                         {0: GroupTag("C", 2), 1: B})
    assert out[5] == GroupTag("C", 3)


def test_np_and_gaps():
    out = propagate_tags(_rec("12", [(0, 2, .01), (1, 1, .01)], [(1, 1, .01), (0, 2, .01), (3, 4, 1e-6)]),
                         {0: A, 1: B})
    assert out[3] == GroupTag("NP")
    with pytest.raises(RuleGap):
        propagate_tags(_rec("gap14", [(0, 1, .01), (1, 4, .01)], []), {0: A, 1: B})
    with pytest.raises(RuleGap):
        propagate_tags(_rec("NPx", [(0, 4, 1e-6), (1, 1, .01)], [(1, 1, .01), (0, 4, 1e-6), (7, 3, 1e-9)]),
                       {0: GroupTag("NP"), 1: B})


def _audit(sim):
    tags = {k: tag_of(sim, k) for k in range(sim.n_initial)}
    for j in range(sim.n_logged):
        tags.update(propagate_tags(sim.record(j), tags))
    return tags


def test_replay_matches_engine(w_run):
    sim, _ = w_run
    tags = _audit(sim)
    assert len(tags) == sim.n_rows
    assert all(tags[k] == tag_of(sim, k) for k in tags)
    gens = [t.m for t in tags.values() if t.kind == "C"]
    assert max(gens) >= 3


def test_w_all_A():
    sim, _ = w_scenario()
    assert all(str(tag_of(sim, k)) == "A" for k in range(6))
    with pytest.raises(ValueError):
        tag_initial_fronts(sim)


def test_lipschitz_initial_tags():
    sim, ctx = lipschitz_scenario(0.4)
    R = ctx["regions"]
    fd, fi = sim.fd, sim.fi
    a, b = R["L2"]
    inside = [k for k in range(sim.n_initial) if a <= fd[k, E.X0] <= b]
    assert inside
    for k in inside:
        want = "A" if fi[k, E.FAM] == 2 else "B"
        assert str(tag_of(sim, k)) == want
    L = ctx["ledger"]
    K = calibrate_K(sim.meta["ledger_t0"], L.omega, 0.4)
    sl = ledger_totals(sim, L.omega, 0.4, K)
    assert sl.all_ok
    assert all(v == 0 for key, v in sl.totals.items() if key.startswith("C"))
    assert sl.totals["A"] <= K * L.omega


def test_counts_w(w_run):
    sim, ctx = w_run
    om = ctx["omega"]
    assert count_shocks(sim, 1.0, ctx["window"], om) == 0
    th = generation_thetas(om, 5)
    c = count_curve(sim, th, ctx["window"], om)
    assert c == sorted(c)
    assert count_shocks(sim, om ** 3, ctx["window"], om) >= 3
    with pytest.raises(ThresholdTooSmall):
        count_shocks(sim, 1e-12, ctx["window"], om)


def test_report_schema(w_run):
    sim, ctx = w_run
    om = ctx["omega"]
    th = generation_thetas(om, 3)
    rep = build_report(sim, om, 1.0, th, ctx["window"])
    d = json.loads(rep.to_json())
    assert [c["theta"] for c in d["counts"]] == th
    assert all(isinstance(c["n"], int) for c in d["counts"])
    assert d["taxonomy"]["22"] == 1


def test_burgers_single_shock():
    sol = burgers_oracle([0.1, -0.1], [0.0], 10.0, 0.1)
    (f,) = sol.fronts
    assert f.speed == 0.0 and sol.positions(7.0) == pytest.approx([0.0])


def test_burgers_merge_time():
    sol = burgers_oracle([0.3, 0.1, -0.1], [-1.0, 1.0], 10.0, 0.1)
    # speeds 0.4 and 0.0 close a gap of 2 at t = 5
    assert len(sol.positions(4.999)) == 2
    assert sol.positions(5.001) == pytest.approx([1.0 + 0.2 * 0.001])
    merged = sol.fronts[-1]
    assert merged.points[0] == pytest.approx((5.0, 1.0))


def test_burgers_rarefaction():
    sol = burgers_oracle([0.0, 0.25], [0.0], 1.0, 0.1)
    assert [f.speed for f in sol.fronts] == pytest.approx([2 / 12, 4 / 12, 6 / 12])


def test_lipschitz_run_ledger(v_run):
    sim, ctx = v_run
    sl = ledger_totals(sim, ctx["ledger"].omega, 0.4)
    assert sl.all_ok
    assert sim.stats()["rule_gaps"] == 0
    assert not math.isnan(sl.maxima["A"])
