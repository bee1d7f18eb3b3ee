import math

import numpy as np
import pytest
import scipy.special as sp

from conftest import farfield
from gibcfm import forward
from gibcfm.errors import ConfigError, ResonanceError, SingularMatrixError
from gibcfm.factorization import f_sharp_matrix
from gibcfm.forward import (FarFieldMatrix, ScatteringConfig, circle_coefficients, circle_config,
                            circle_series_oracle, gamma2, solve_forward)
from gibcfm.geometry import Kite
from gibcfm.surface import Coefficient, ImpedanceParams


def rel_sup(A, B):
    return np.abs(A - B).max() / np.abs(B).max()


def defect_matrix(ffm):
    n = ffm.n
    F = ffm.values * (2 * np.pi / n)
    im = (F - F.conj().T) / 2j
    return im - ffm.k * abs(gamma2(ffm.k)) ** 2 * (F.conj().T @ F), F


def test_gamma2_value():
    assert gamma2(2.0) == pytest.approx(np.exp(0.25j * np.pi) / math.sqrt(16 * math.pi), rel=1e-15)


def test_circle_oracle_equivalence():
    U = farfield("circle")
    ref = circle_series_oracle(1.0, 2.0, 0.1, 0.0, 50)
    assert rel_sup(U.values, ref.values) < 1e-6


def test_circle_oracle_other_parameters():
    for R, k, mu, lam in [(0.7, 3.0, 0.05, 0.5), (1.2, 1.0, -0.2, 0.0), (1.0, 2.0, 0.1 - 0.1j, -0.5j)]:
        U = solve_forward(circle_config(R, k, mu, lam, 24, 128))
        ref = circle_series_oracle(R, k, mu, lam, 24)
        assert rel_sup(U.values, ref.values) < 1e-8


def test_kite_spectral_convergence():
    ref = farfield("kite", m=384).values
    coarse = rel_sup(farfield("kite", m=64).values, ref)
    fine = rel_sup(farfield("kite", m=128).values, ref)
    assert fine < 1e-10
    assert coarse >= 100 * fine


def test_far_field_constant_against_near_field():
    R, k, mu, lam = 1.0, 2.0, 0.1, 0.0
    M = math.ceil(3 * k * R) + 15
    a = circle_coefficients(R, k, mu, lam, M)
    q = np.arange(-M, M + 1)
    rho = 1.0e5
    oracle = circle_series_oracle(R, k, mu, lam, 12)
    phis = 2 * np.pi * np.arange(12) / 12
    near = np.array([np.sum(1j ** q * a * sp.hankel1(q, k * rho) * np.exp(1j * q * p)) for p in phis])
    scaled = near * math.sqrt(rho) * np.exp(-1j * k * rho) / gamma2(k)
    assert np.max(np.abs(scaled - oracle.values[:, 0])) <= 1e-4 * np.abs(oracle.values).max()


def test_oracle_is_circulant():
    U = circle_series_oracle(1.0, 2.0, 0.1, 0.0, 50).values
    for s in range(1, 50):
        assert np.allclose(np.roll(np.roll(U, s, 0), s, 1), U, rtol=0, atol=1e-13 * np.abs(U).max())


def test_dirichlet_limit():
    R, k, n = 1.0, 2.0, 32
    stiff = circle_series_oracle(R, k, 0.0, 1.0e6, n).values
    M = math.ceil(3 * k * R) + 15
    q = np.arange(-M, M + 1)
    a = -sp.jv(q, k * R) / sp.hankel1(q, k * R)
    ang = 2 * np.pi * np.arange(n) / n
    soft = -4j * np.exp(1j * np.subtract.outer(ang, ang)[..., None] * q) @ a
    assert rel_sup(stiff, soft) < 1e-4


@pytest.mark.parametrize("kR", [0.5, 2.0, 8.0, 16.0])
def test_mode_tail_decay(kR):
    M = math.ceil(3 * kR) + 15
    a = circle_coefficients(1.0, kR, 0.1, 0.0, M)
    assert abs(a[0]) <= 1e-12 and abs(a[-1]) <= 1e-12


def test_coefficients_even_in_mode():
    a = circle_coefficients(1.3, 2.0, 0.1, 0.2, 20)
    assert np.array_equal(a, a[::-1])


def test_oracle_needs_enough_modes():
    with pytest.raises(ConfigError):
        circle_series_oracle(1.0, 2.0, 0.1, 0.0, 10, modes=5)


@pytest.mark.parametrize("name", ["kite", "ellipse", "circle"])
def test_reciprocity(name):
    for m in (128, 192):
        U = farfield(name, m=m).values
        n = U.shape[0]
        i = np.arange(n)
        swapped = U[np.ix_((i + n // 2) % n, (i + n // 2) % n)].T
        assert np.abs(U - swapped).max() <= 1e-8 * np.abs(U).max()


@pytest.mark.parametrize("name", ["kite", "circle", "ellipse"])
def test_energy_identity_real_impedance(name):
    D, F = defect_matrix(farfield(name, m=192))
    assert np.linalg.norm(D, 2) <= 1e-6 * np.linalg.norm(F, 2)


@pytest.mark.parametrize("name", ["kite", "circle"])
def test_absorbing_defect_psd(name):
    D, F = defect_matrix(farfield(name, lam=-0.5j, m=192))
    evals = np.linalg.eigvalsh(0.5 * (D + D.conj().T))
    assert evals.min() >= -1e-8 * np.linalg.norm(F, 2)
    assert evals.max() > 1e-4 * np.linalg.norm(F, 2)


def test_variable_coefficients_reciprocity_and_energy():
    mu = Coefficient(0.0, (0.1, 0.03), (0.0, 0.02))
    lam = Coefficient(0.0, (0.2, 0.1))
    cfg = ScatteringConfig(Kite(), ImpedanceParams(mu, lam), 2.0, 40, 160)
    U = solve_forward(cfg)
    V = U.values
    i = np.arange(40)
    assert np.abs(V - V[np.ix_((i + 20) % 40, (i + 20) % 40)].T).max() <= 1e-8 * np.abs(V).max()
    D, F = defect_matrix(U)
    assert np.linalg.norm(D, 2) <= 1e-6 * np.linalg.norm(F, 2)


def test_f_sharp_of_clean_data_is_psd():
    for name in ("kite", "ellipse"):
        evals = np.linalg.eigvalsh(f_sharp_matrix(farfield(name)))
        assert evals.min() >= -1e-10 * evals.max()


def test_coupling_does_not_change_far_field():
    imp = ImpedanceParams.constant(0.1, 0.0)
    a = solve_forward(ScatteringConfig(Kite(), imp, 2.0, 16, 128))
    b = solve_forward(ScatteringConfig(Kite(), imp, 2.0, 16, 128, coupling=-3.0))
    assert rel_sup(a.values, b.values) < 1e-10


def test_meta_and_solution():
    sol = solve_forward(circle_config(1.0, 2.0, 0.1, 0.0, 16, 64), return_solution=True)
    meta = sol.farfield.meta
    assert meta["m"] == 64 and meta["coupling"] == 2.0
    assert meta["condition_1norm"] >= 1 and 0 < meta["min_pivot_ratio"] <= 1
    assert sol.density.shape == (64, 16)


def test_resonance_error(monkeypatch):
    def singular(A, pivot_tol):
        raise SingularMatrixError("zero pivot", 7)

    monkeypatch.setattr(forward, "lu_factor", singular)
    with pytest.raises(ResonanceError, match="perturb k"):
        solve_forward(circle_config(1.0, 2.0, 0.1, 0.0, 16, 64))


@pytest.mark.parametrize("kwargs", [dict(m=63), dict(m=32), dict(n=4), dict(k=0.0), dict(coupling=0.0)])
def test_config_validation(kwargs):
    base = dict(curve=Kite(), impedance=ImpedanceParams.constant(0.1), k=2.0, n=16, m=64)
    base.update(kwargs)
    with pytest.raises(ConfigError):
        ScatteringConfig(**base)


def test_farfield_matrix_validation():
    with pytest.raises(ValueError):
        FarFieldMatrix(np.ones((2, 3)), 2.0)
    with pytest.raises(ValueError):
        FarFieldMatrix(np.array([[np.nan]]), 2.0)
