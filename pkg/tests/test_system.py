import numpy as np
import pytest

from bjfront.errors import ZeroJump
from bjfront.system import (
    FluxParams,
    eigenvalues,
    eigenvector,
    flux,
    jacobian,
    rh_residual,
    shock_speed,
    wave_curve,
)


def test_flux_values():
    assert np.allclose(flux((0, 0, 0), 0.1), 0)
    assert np.allclose(flux((1, 1, 1), 0.0), (-4, 1, -4))
    assert np.allclose(flux((1, 1, 1), 0.1), (-3.8, 1, -3.8))


def test_jacobian_at_origin():
    ev = np.sort(np.linalg.eigvals(jacobian((0, 0, 0), 0.0)).real)
    assert np.allclose(ev, (-4, 0, 4))


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(0)
    h = 1e-6
    for _ in range(100):
        U = rng.uniform(-0.29, 0.29, 3)
        eta = rng.uniform(0, 0.24)
        J = jacobian(U, eta)
        fd = np.column_stack([(flux(U + h * e, eta) - flux(U - h * e, eta)) / (2 * h)
                              for e in np.eye(3)])
        assert np.max(np.abs(J - fd)) <= 1e-6
        assert np.allclose(J[1], (0, 2 * U[1], 0))


def test_eigenvalues():
    assert np.allclose(eigenvalues((0, 0, 0), 0.1), (-4, 0, 4))
    assert np.allclose(eigenvalues((0.1, 0, -0.1), 0.01), (-3.998, 0, 3.998))
    for x, y in ((0.2, -0.4), (-0.5, 0.1)):
        assert eigenvalues((x, 0.3, y), 0.2)[1] == pytest.approx(0.6)


def test_eigenvectors():
    for eta in (0.0, 0.1):
        assert np.allclose(eigenvector(1, (0, 1, 0), eta), (1, 0, 1))
        assert np.allclose(eigenvector(3, (0, 1, 0), eta), (1, 0, -1))
    r2 = eigenvector(2, (0, 0, 0), 0.0)
    assert r2[1] == 1.0
    assert np.linalg.norm(jacobian((0, 0, 0), 0.0) @ r2) <= 1e-9
    with pytest.raises(ValueError):
        eigenvector(4, (0, 0, 0), 0.0)


def test_r2_is_eigenvector_off_origin():
    U = np.array([0.1, 0.2, -0.15])
    r2 = eigenvector(2, U, 0.05)
    lam = eigenvalues(U, 0.05)[1]
    assert np.linalg.norm(jacobian(U, 0.05) @ r2 - lam * r2) <= 1e-9


def test_wave_curves():
    assert np.allclose(wave_curve(1, 0.5, (0, 1, 0), 0.1), (0.5, 1, 0.5))
    assert np.allclose(wave_curve(3, 0.5, (0, 1, 0), 0.1), (0.5, 1, -0.5))
    U = np.array([0.1, -0.2, 0.05])
    assert np.allclose(wave_curve(2, 0.0, U, 0.03), U)
    assert wave_curve(2, -0.04, U, 0.03)[1] == pytest.approx(-0.24)


def test_shock_speeds():
    assert shock_speed((0, 0.1, 0), (0, -0.1, 0), 2, 0.0) == pytest.approx(0.0, abs=1e-15)
    U = np.array([0.2, 0.1, -0.1])
    assert shock_speed(U, wave_curve(1, -1e-8, U, 0.0), 1, 0.0) == pytest.approx(-4.0, abs=1e-6)
    Ub = np.array([0.1, 0.2, -0.1])
    Ur = wave_curve(3, 0.05, Ub, 0.05)
    spd = shock_speed(Ub, Ur, 3, 0.05)
    assert np.linalg.norm(rh_residual(Ub, Ur, spd, 0.05)) <= 1e-7 * np.linalg.norm(Ur - Ub)
    with pytest.raises(ZeroJump):
        shock_speed(U, U, 1, 0.1)


def test_rh_residual():
    U = np.array([0.1, 0.2, 0.3])
    assert np.linalg.norm(rh_residual(U, U, 1.7, 0.1)) == 0
    rng = np.random.default_rng(3)
    for _ in range(50):
        U = rng.uniform(-0.3, 0.3, 3)
        Ur = wave_curve(1, -0.1, U, 0.05)
        assert np.linalg.norm(rh_residual(U, Ur, shock_speed(U, Ur, 1, 0.05), 0.05)) <= 1e-8


def test_flux_params_window():
    FluxParams(0.0)
    with pytest.raises(ValueError):
        FluxParams(0.25)
    with pytest.raises(ValueError):
        FluxParams(-0.01)
