import numpy as np
import pytest

from bjfront.errors import StateOutOfRange, UnsupportedPair, WrongSide
from bjfront.riemann import (
    ElementaryWave,
    accurate_solver,
    classify_well_prepared,
    compose,
    discretize_rarefaction,
    simplified_solver,
    solve_riemann,
)
from bjfront.scenarios import w_states
from bjfront.system import eigenvalues, eigenvector, wave_curve


def test_identical_states():
    U = np.array([0.1, 0.2, -0.1])
    assert solve_riemann(U, U, 0.05).as_tuple() == pytest.approx((0, 0, 0), abs=1e-14)
    assert accurate_solver(U, U, 0.05, 0.1) == []


def test_round_trip_example():
    UL = np.array([0.1, 0.0, -0.1])
    fan = (-0.02, -0.03, 0.01)
    got = solve_riemann(UL, compose(UL, fan, 0.01), 0.01)
    assert np.allclose(got.as_tuple(), fan, atol=1e-9, rtol=0)


def test_w_chain_fan():
    S = w_states(0.05, 0.2, 0.01)
    for a, b in ((0, 1), (1, 2)):
        fan = solve_riemann(S[a], S[b], 0.01)
        assert np.allclose(fan.as_tuple(), (-0.05, -0.05, 0.05), atol=1e-12)
        assert fan.all_shocks()


def test_range_guard():
    with pytest.raises(StateOutOfRange):
        solve_riemann((0.95, 0, 0), (0.9, 0, 0), 0.01)
    with pytest.raises(StateOutOfRange):
        solve_riemann((0.2, 0, 0), (-0.2, 0, 0), 0.01)


def test_discretize_rarefaction():
    assert discretize_rarefaction(2, (0, 0, 0), 0.0, 0.1, 0.0) == []
    w = discretize_rarefaction(2, (0, 0, 0), 0.25, 0.1, 0.0)
    assert len(w) == 3
    for f in w:
        assert f.Uright[1] - f.Uleft[1] == pytest.approx(0.25 / 3)
        assert f.speed == pytest.approx(2 * f.Uright[1])
        assert f.kind == "rarefaction_front"
    (one,) = discretize_rarefaction(1, (0, 0.1, 0), 0.05, 0.1, 0.1)
    assert one.speed == pytest.approx(eigenvalues(one.Uright, 0.1)[0])
    with pytest.raises(WrongSide):
        discretize_rarefaction(2, (0, 0, 0), -0.1, 0.1, 0.0)


def test_accurate_solver_shapes():
    UI = np.array([0.1, 0.0, -0.1])
    b, eta = 1e-3, 0.01
    r = [eigenvector(i, UI, eta) for i in (1, 2, 3)]
    Up = UI - b * r[0] - b * r[1] + b * r[2]
    w = accurate_solver(UI, Up, eta, 0.1)
    assert [f.family for f in w] == [1, 2, 3]
    assert all(f.kind == "shock" for f in w)
    UL = np.array([0.0, 0.25, 0.0])
    w = accurate_solver(UL, wave_curve(2, 0.25, UL, 0.01), 0.01, 0.1)
    assert len(w) == 3 and all(f.kind == "rarefaction_front" for f in w)


def _pair(U0, fa, pa, fb, pb, eta):
    Um = wave_curve(fa, pa, U0, eta)
    Ur = wave_curve(fb, pb, Um, eta)
    (left,) = accurate_solver(U0, Um, eta, 1.0)
    (right,) = accurate_solver(Um, Ur, eta, 1.0)
    return left, right


def test_simplified_21():
    eta = 0.01
    left, right = _pair(np.array([0.1, 0.05, -0.1]), 2, -0.01, 1, -0.001, eta)
    out = simplified_solver((left, right), eta)
    fams = [f.family for f in out]
    assert fams[:2] == [1, 2] and fams[-1] == 4
    assert out[0].signed_param == pytest.approx(-0.001, abs=1e-15)
    assert out[1].signed_param == pytest.approx(-0.01, abs=1e-15)
    npf = out[-1]
    assert npf.Uright[1] - npf.Uleft[1] == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(npf.Uright, right.Uright)


def test_simplified_22():
    eta = 0.01
    U0 = np.array([0.1, 0.05, -0.1])
    left, right = _pair(U0, 2, -0.01, 2, -0.01, eta)
    out = simplified_solver((left, right), eta)
    two = [f for f in out if f.family == 2]
    assert len(two) == 1
    assert two[0].Uright[1] - two[0].Uleft[1] == pytest.approx(-0.02, abs=1e-12)
    ref = [f for f in accurate_solver(U0, right.Uright, eta, 1.0) if f.family == 2][0]
    assert two[0].speed == pytest.approx(ref.speed, abs=1e-9)


def test_simplified_np_bound_grid():
    """NP strength of a 2&1 interaction is O(ab)."""
    eta = 0.05
    U0 = np.array([0.1, 0.05, -0.1])
    grid = np.linspace(1e-3, 0.05, 20)
    ratio = 0.0
    for a in grid:
        for b in grid:
            left, right = _pair(U0, 2, -a, 1, -b, eta)
            npf = simplified_solver((left, right), eta)[-1]
            ratio = max(ratio, npf.strength / (a * b))
    assert ratio < 10


def test_simplified_rejects_np():
    w = ElementaryWave(4, 0.0, np.zeros(3), np.ones(3) * 1e-3, 7.0, "non_physical")
    with pytest.raises(UnsupportedPair):
        simplified_solver((w, w), 0.01)


def test_well_prepared_plain():
    UI = np.array([0.1, 0.0, -0.1])
    b, eta = 1e-4, 1e-3
    r = [eigenvector(i, UI, eta) for i in (1, 2, 3)]
    rep = classify_well_prepared(UI, UI - b * r[0] - b * r[1] + b * r[2], UI, b, "plain", eta)
    assert rep.ok and all(rep.hypotheses.values())
    rep0 = classify_well_prepared(UI, UI, UI, 0.0, "plain", eta)
    assert rep0.fan.as_tuple() == pytest.approx((0, 0, 0), abs=1e-15)


def test_well_prepared_compression():
    UI = np.array([0.1, 0.0, -0.1])
    b, xi, eta = 1e-4, 1e-3, 1e-3
    r = [eigenvector(i, UI, eta) for i in (1, 2, 3)]
    shift = wave_curve(3, xi, UI, eta) - UI
    Up = UI + shift - b * r[0] - b * r[1] + b * r[2]
    rep = classify_well_prepared(UI, Up, UI, b, ("compression", 3, xi, UI), eta, eps=0.05)
    assert rep.ok
    assert xi < rep.fan.tau < xi + 2 * b
