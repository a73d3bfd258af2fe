import numpy as np
import pytest

from bjfront.datum import (
    COMPRESSION,
    REGION_NAMES,
    Profile,
    build_Psi,
    build_regions,
    build_state_chain,
    build_tildeU,
    build_V,
    make_params,
    make_perturbation,
    make_W,
    mollify,
    sample_mesh,
)
from bjfront.errors import InfeasibleEpsilon
from bjfront.quadrature import kernel, kernel_nodes
from bjfront.scenarios import LIPSCHITZ_V, lipschitz_profile
from bjfront.system import eigenvalues


@pytest.fixture(scope="module")
def setup():
    L = make_params(0.4)
    chain = build_state_chain(L)
    R = build_regions(chain, L)
    return L, chain, R


def test_ledger_values():
    L = make_params(0.4)
    assert (L.delta, L.zeta_w, L.eta, L.omega) == pytest.approx((0.4, 0.2, 0.16, 0.064))
    assert L.zeta_c == pytest.approx(2.62144e-4)
    assert L.r == pytest.approx(5.24288e-5)
    assert L.T_tilde == pytest.approx(312.5)
    assert L.rho == pytest.approx(3790.0)
    assert L.frak_q - L.frak_p == 6
    assert L.paper_faithful and not L.feasible


def test_ledger_rejects_eps_one():
    with pytest.raises(InfeasibleEpsilon):
        make_params(1.0)
    with pytest.raises(InfeasibleEpsilon):
        make_params(0.6)  # eta = 0.36
    with pytest.raises(InfeasibleEpsilon):
        make_params(0.4, strict=True)


def test_overrides_mark_ledger():
    L = make_params(0.4, overrides=LIPSCHITZ_V)
    assert not L.paper_faithful and L.zeta_c == 0.0
    with pytest.raises(ValueError):
        make_params(0.4, overrides={"nonsense": 1.0})


def test_state_chain(setup):
    L, c, _ = setup
    om = L.omega
    assert (c.U_I[1], c.U_II[1], c.U_III[1]) == pytest.approx((0.0, -om, -2 * om), abs=1e-15)
    tau, s, sigma = c.fan
    assert abs(tau - om) + abs(s + om) + abs(sigma + om) <= 1.0 * om ** 2


def test_regions(setup):
    L, c, R = setup
    assert list(R.intervals) == list(REGION_NAMES)
    a, b = R["L3"]
    lam3 = lambda U: eigenvalues(U, L.eta)[2]  # noqa: E731
    assert b - a == pytest.approx(lam3(c.U_I) - lam3(c.Uprime), rel=1e-9)
    assert b - a > 0
    assert R["L2"][0] - R["L3"][1] >= 6
    assert np.all(np.diff(R.endpoints) >= 0)
    assert R.locate(0.0) == "M"


def test_V(setup):
    L, c, R = setup
    V = build_V(c, R, L)
    assert np.allclose(V(np.array([-100.0, R["L"][1] - 1e-9])), c.U_I)
    assert np.allclose(V(np.array([R["R"][0] + 1e-9, 100.0])), c.U_III)
    for x in R.endpoints[1:-1]:
        assert np.allclose(V(x - 1e-10), V(x + 1e-10), atol=1e-8)
    a, b = R["L2"]
    xs = np.linspace(a, b, 201)
    slope = np.diff(V(xs)[:, 1]) / np.diff(xs)
    assert np.all(np.abs(slope + 0.5) < 0.05)


def test_psi_and_tildeU(setup):
    L, c, R = setup
    Psi = build_Psi(R, L, c.U_I)
    assert np.allclose(Psi(0.0), 0.0)
    U = build_tildeU(build_V(c, R, L), Psi, L)
    rho = L.rho
    assert np.allclose(U(np.array([-1.5 * rho, 1.5 * rho])), 0.0)
    xs = np.linspace(-1.5 * rho, -rho, 101)
    d = np.diff(U(xs), axis=0)
    assert np.all((d >= -1e-15).all(axis=0) | (d <= 1e-15).all(axis=0))
    x = np.array([-30.0, 0.0, 25.0])
    assert np.allclose(U(x), build_V(c, R, L)(x) + Psi(x))


def test_kernel():
    z, m = kernel_nodes(32)
    assert m.sum() == pytest.approx(1.0, abs=1e-12)
    assert kernel(np.array([1.0, -1.5]))[0] == 0.0
    assert np.sum(m * z * z) == pytest.approx(1 / 7, abs=1e-12)


def test_mollify():
    const = Profile(lambda x: np.tile([0.1, -0.2, 0.3], (x.size, 1)), name="c")
    assert np.allclose(mollify(const, 0.5)(np.linspace(-3, 3, 7)), [0.1, -0.2, 0.3])
    _, _, _, V = lipschitz_profile(0.4)
    vs = 0.01
    xs = np.linspace(-30, 30, 20001)
    assert np.max(np.abs(mollify(V, vs)(xs) - V(xs))) <= V.lipschitz * vs
    with pytest.raises(ValueError):
        mollify(V, 0.0)


def test_perturbation():
    r = 1e-3
    P = make_perturbation(7, r, 50.0, support=[(-10.0, -5.0), (5.0, 12.0)])
    xs = np.linspace(-50, 50, 400001)
    a = P(xs)
    assert np.array_equal(a, make_perturbation(7, r, 50.0, support=[(-10.0, -5.0), (5.0, 12.0)])(xs))
    d = np.abs(np.diff(a, axis=0)).max(axis=0) / (xs[1] - xs[0])
    assert np.abs(a).max(axis=0).sum() + d.sum() < r
    assert np.all(a[np.abs(xs) < 5] == 0)
    Z = make_perturbation(7, 0.0, 50.0)
    assert np.all(Z(xs[:100]) == 0)


def test_sample_mesh_constant():
    const = Profile(lambda x: np.tile([0.1, 0.0, -0.1], (x.size, 1)), (-1.0, 1.0), [(-np.inf, np.inf)])
    pos, st = sample_mesh(const, 0.01, 0.4, domain=(-1.0, 1.0))
    assert pos.size == 0 and st.shape == (1, 3)


def test_sample_mesh_lipschitz_V(setup):
    L, _, R, V = lipschitz_profile(0.4)
    h = 1e-3 * L.eta
    pos, st = sample_mesh(V, h, 0.4, domain=(-L.rho, L.rho))
    assert st.shape[0] == pos.size + 1
    for n in COMPRESSION:
        a, b = R[n]
        inside = pos[(pos >= a) & (pos <= b)]
        assert inside[-1] == b
        assert np.all(np.diff(inside) <= h * (1 + 1e-9))
    # outside the compression regions V is flat: no jumps there
    comp = np.zeros(pos.size, bool)
    for n in COMPRESSION:
        a, b = R[n]
        comp |= (pos >= a) & (pos <= b)
    assert comp.all()


def test_make_W(setup):
    _, c, _ = setup
    pos, S = make_W(c)
    assert list(pos) == [-20.0, 20.0]
    assert S[0, 1] + S[1, 1] > S[1, 1] + S[2, 1]
