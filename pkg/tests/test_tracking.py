import numpy as np
import pytest

from bjfront import engine as E
from bjfront.errors import EventStorm, StateOutOfRange
from bjfront.scenarios import w_scenario, w_states
from bjfront.system import wave_curve
from bjfront.tracking import (
    EngineConfig,
    init_from_piecewise,
    next_interaction,
    resolve_interaction,
    run_until,
    sample_solution,
)

CFG = EngineConfig(nu=0.1)


def _tv(sim):
    ids = sim.order()
    return float(np.sum(np.linalg.norm(sim.fd[ids, E.URU:E.URW + 1] - sim.fd[ids, E.ULU:E.ULW + 1], axis=1)))


def test_no_jumps():
    sim = init_from_piecewise(np.zeros((1, 3)), [], 0.01, CFG)
    assert sim.n_rows == 0
    assert next_interaction(sim, 10.0) is None
    run_until(sim, 5.0)
    assert sim.time == 5.0
    assert np.allclose(sample_solution(sim, [-1.0, 3.0]), 0)


def test_w_initial_fronts():
    sim, _ = w_scenario()
    fr = sim.fronts
    assert len(fr) == 6
    assert all(f.kind == "shock" for f in fr)
    assert [f.x for f in fr] == [-20.0] * 3 + [20.0] * 3
    assert [f.family for f in fr] == [1, 2, 3, 1, 2, 3]
    S = w_states()
    assert np.allclose(sample_solution(sim, [-30.0, 0.0, 30.0], 0.0), S)


def test_rarefaction_jump():
    UL = np.array([0.0, 0.25, 0.0])
    sim = init_from_piecewise([UL, wave_curve(2, 0.25, UL, 0.01)], [0.0], 0.01, CFG)
    assert [f.kind for f in sim.fronts] == ["rarefaction_front"] * 3


def test_out_of_range_datum():
    with pytest.raises(StateOutOfRange):
        init_from_piecewise([np.zeros(3), np.array([0.95, 0, 0])], [0.0], 0.01, CFG)


def test_symmetric_closure():
    U0 = np.array([0.0, 0.2, 0.0])
    U1 = wave_curve(2, -0.2, U0, 0.01)
    U2 = wave_curve(2, -0.2, U1, 0.01)
    sim = init_from_piecewise([U0, U1, U2], [0.0, 0.4], 0.01, CFG)
    t, x, a, b = next_interaction(sim)
    assert (t, x) == pytest.approx((1.0, 0.2))
    resolve_interaction(sim, (t, x, a, b))
    (f,) = sim.fronts
    assert f.family == 2 and f.signed_param == pytest.approx(-0.4)
    assert sim.time == pytest.approx(1.0)


def test_single_front_has_no_event():
    U0 = np.array([0.0, 0.2, 0.0])
    sim = init_from_piecewise([U0, wave_curve(1, -0.05, U0, 0.01)], [0.0], 0.01, CFG)
    assert next_interaction(sim, 100.0) is None


def test_w_first_event_is_13_crossing():
    sim, _ = w_scenario()
    t, x, a, b = next_interaction(sim)
    assert (sim.fi[a, E.FAM], sim.fi[b, E.FAM]) == (3, 1)
    assert sim.fd[a, E.X0] == -20.0 and sim.fd[b, E.X0] == 20.0
    Ul = sim.fd[a, E.ULU:E.ULW + 1].copy()
    sa, sb = sim.fd[a, E.PRM], sim.fd[b, E.PRM]
    resolve_interaction(sim, (t, x, a, b))
    # 1-shock continues left with its strength, the middle state is D1[sigma, U_l]
    assert sim.fi[b, E.NEXT] == a
    assert np.allclose(sim.fd[b, E.URU:E.URW + 1], wave_curve(1, sb, Ul, 0.01), atol=1e-12)
    assert sim.fd[a, E.PRM] == pytest.approx(sa, abs=1e-14)
    assert sim.fd[b, E.PRM] == pytest.approx(sb, abs=1e-14)
    assert sim.record(0).taxonomy == "13"


def test_33_merge_adds_parameters():
    U0 = np.array([0.05, 0.1, -0.05])
    U1 = wave_curve(3, 0.02, U0, 0.05)
    U2 = wave_curve(3, 0.03, U1, 0.05)
    sim = init_from_piecewise([U0, U1, U2], [0.0, 0.1], 0.05, CFG)
    run_until(sim, 30.0)
    (f,) = sim.fronts
    assert f.family == 3 and f.signed_param == pytest.approx(0.05, abs=1e-14)
    assert sim.record(0).taxonomy == "33"


def test_12_interaction_bounds():
    eta = 0.01
    U0 = np.array([0.1, 0.05, -0.1])
    s, sig = -0.02, -0.01
    Um = wave_curve(2, s, U0, eta)
    sim = init_from_piecewise([U0, Um, wave_curve(1, sig, Um, eta)], [0.0, 1.0], eta,
                              EngineConfig(nu=0.1, mu_nu=1e-12))
    resolve_interaction(sim, next_interaction(sim))
    fr = {f.family: f for f in sim.fronts}
    assert set(fr) == {1, 2, 3}
    assert fr[2].signed_param == pytest.approx(s, abs=1e-10)
    assert s * sig / 100 < fr[3].signed_param < 10 * s * sig
    assert -2 * abs(sig) < fr[1].signed_param < -abs(sig) / 2


def test_w_merge_and_tv(w_run):
    sim, ctx = w_run
    ev = sim.events()
    (t22,) = ev["t"][ev["taxonomy"] == 22]
    assert t22 == pytest.approx(ctx["merge_time"], rel=1e-12)
    twos = [f for f in sim.fronts if f.family == 2]
    assert len(twos) == 1
    sim0, _ = w_scenario()
    assert _tv(sim) <= 2 * _tv(sim0)


def test_chain_consistency(w_run):
    sim, _ = w_run
    ids = sim.order()
    fd = sim.fd
    assert np.allclose(fd[ids[:-1], E.URU:E.URW + 1], fd[ids[1:], E.ULU:E.ULW + 1], atol=1e-9)
    S = w_states()
    assert np.allclose(fd[ids[0], E.ULU:E.ULW + 1], S[0])
    assert np.allclose(fd[ids[-1], E.URU:E.URW + 1], S[2])


def test_sample_solution_jump(w_run):
    sim, _ = w_run
    k = sim.order()[2]
    x = sim.positions([k])[0]
    lr = sample_solution(sim, [x - 1e-9, x + 1e-9])
    assert np.allclose(lr[1] - lr[0], sim.fd[k, E.URU:E.URW + 1] - sim.fd[k, E.ULU:E.ULW + 1])


def test_determinism():
    a, _ = w_scenario()
    b, _ = w_scenario()
    run_until(a, 500.0)
    run_until(b, 500.0)
    n = a.n_rows
    assert n == b.n_rows
    assert np.array_equal(a.fd[:n], b.fd[:n]) and np.array_equal(a.fi[:n], b.fi[:n])


def test_event_cap():
    sim, _ = w_scenario(event_cap=5)
    with pytest.raises(EventStorm):
        run_until(sim, 800.0)


def test_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(nu=0.0)
    with pytest.raises(ValueError):
        EngineConfig(nu=0.1, log_events="B")
    with pytest.raises(ValueError):
        EngineConfig(nu=0.1, vertex_floor=-1.0)
    with pytest.raises(ValueError):
        EngineConfig(nu=0.1, lambda_hat=5.0)
    assert EngineConfig(nu=0.1).mu_nu == pytest.approx(0.01)


def test_event_log_modes():
    full, _ = w_scenario()
    aa, _ = w_scenario(log_events="A")
    off, _ = w_scenario(log_events=False)
    for s in (full, aa, off):
        run_until(s, 800.0)
    assert full.n_events == aa.n_events == off.n_events
    assert full.n_logged == full.n_events
    assert 0 < aa.n_logged < full.n_logged
    assert off.n_logged == 0
