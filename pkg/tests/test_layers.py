import numpy as np
import pytest
import scipy.special as sp

from gibcfm.errors import SamplingError
from gibcfm.geometry import Circle, CurveGrid, Ellipse, Kite
from gibcfm.layers import (assemble_operators, directions, far_field_matrices, log_weights,
                           points_per_wavelength)
from gibcfm.special import hankel1

K_WAVE = 2.0


def circle_symbols(R, k, q):
    a = abs(q)
    x = k * R
    J, H, Jp, Hp = sp.jv(a, x), sp.hankel1(a, x), sp.jvp(a, x), sp.h1vp(a, x)
    c = 0.5j * np.pi * R
    return {"S": c * J * H, "K": c * k * Jp * H - 0.5, "Kp": c * k * J * Hp + 0.5,
            "Th": c * k * k * Jp * Hp}


def symbol_error(ops, R, k, modes):
    err = dict.fromkeys(("S", "K", "Kp", "Th"), 0.0)
    for q in modes:
        f = np.exp(1j * q * ops.grid.t)
        sym = circle_symbols(R, k, q)
        for name in err:
            A = getattr(ops, name)
            e = np.abs(A @ f - sym[name] * f).max() / max(1.0, abs(sym[name]))
            err[name] = max(err[name], e)
    return err


def operators(curve, m, k=K_WAVE):
    return assemble_operators(CurveGrid.build(curve, m), k)


def band(grid, frac=0.25):
    q = np.arange(-int(frac * grid.m), int(frac * grid.m) + 1)
    return np.exp(1j * np.outer(grid.t, q)) / np.sqrt(grid.m)


def point_source_traces(grid, k, z):
    d = grid.points - np.asarray(z, dtype=float)[:, None]
    r = np.hypot(*d)
    u = 0.25j * hankel1(0, k * r)
    du = -0.25j * k * hankel1(1, k * r) * np.sum(d * grid.normals, axis=0) / r
    return u, du


def plane_wave_traces(grid, k, theta):
    d = np.array([np.cos(theta), np.sin(theta)])
    u = np.exp(1j * k * (d @ grid.points))
    return u, 1j * k * (d @ grid.normals) * u


def test_log_weights_integrate_log_kernel():
    # int_0^{2pi} ln(4 sin^2((t - tau)/2)) cos(q tau) dtau = -2 pi cos(q t)/|q|, and 0 for q = 0
    m = 32
    R = log_weights(m)
    t = 2 * np.pi * np.arange(m) / m
    assert np.max(np.abs(R @ np.ones(m))) < 1e-13
    for q in (1, 3, 7):
        assert np.max(np.abs(R @ np.cos(q * t) + 2 * np.pi * np.cos(q * t) / q)) < 1e-13


def test_single_layer_constant_density_unit_circle():
    ops = operators(Circle(1.0), 128)
    expected = 0.5j * np.pi * sp.jv(0, 2.0) * sp.hankel1(0, 2.0)
    assert np.max(np.abs(ops.S @ np.ones(128) - expected)) < 1e-8


def test_single_layer_constant_density_by_direct_quadrature():
    # brute force: off-grid target, plain trapezoid with many nodes, then the limit r -> 1
    R, k = 1.0, 2.0
    tau = 2 * np.pi * (np.arange(20000) + 0.5) / 20000
    x = np.array([R, 0.0])
    y = R * np.array([np.cos(tau), np.sin(tau)])
    r = np.hypot(*(x[:, None] - y))
    direct = np.sum(0.25j * sp.hankel1(0, k * r)) * R * 2 * np.pi / tau.size
    ops = operators(Circle(R), 128)
    assert abs((ops.S @ np.ones(128))[0] - direct) < 1e-3


def test_circle_symbols_at_128():
    ops = operators(Circle(1.3), 128)
    err = symbol_error(ops, 1.3, K_WAVE, range(-48, 49))
    assert max(err.values()) < 1e-8, err


def test_circle_symbols_converge_64_to_128():
    modes = range(-28, 29)
    coarse = symbol_error(operators(Circle(1.0), 64), 1.0, K_WAVE, modes)
    fine = symbol_error(operators(Circle(1.0), 128), 1.0, K_WAVE, modes)
    for name in coarse:
        assert fine[name] < 1e-8
        assert coarse[name] >= 100 * fine[name], (name, coarse[name], fine[name])


@pytest.mark.parametrize("curve", [Kite(), Ellipse(2.0, 1.0)], ids=lambda c: c.kind)
def test_calderon_identities_band(curve):
    ops = operators(curve, 128)
    I = np.eye(128)
    F = band(ops.grid)
    pairs = {
        "SK'=KS": (ops.S @ ops.Kp, ops.K @ ops.S),
        "ThK=K'Th": (ops.Th @ ops.K, ops.Kp @ ops.Th),
        "STh=K^2-I/4": (ops.S @ ops.Th, ops.K @ ops.K - I / 4),
    }
    for name, (A, B) in pairs.items():
        rel = np.linalg.norm((A - B) @ F, 2) / np.linalg.norm(A @ F, 2)
        assert rel <= 1e-6, (name, rel)


def test_calderon_sk_max_norm_kite():
    ops = operators(Kite(), 128)
    res = np.abs(ops.S @ ops.Kp - ops.K @ ops.S).max()
    assert res <= 1e-6 * np.abs(ops.S).max()


def test_calderon_sign_error_is_detected():
    ops = operators(Kite(), 128)
    F = band(ops.grid)
    A = ops.S @ ops.Th
    wrong = ops.K @ ops.K + np.eye(128) / 4
    assert np.linalg.norm((A - wrong) @ F, 2) / np.linalg.norm(A @ F, 2) > 0.1


@pytest.mark.parametrize("curve", [Circle(1.0), Kite(), Ellipse(2.0, 1.0)], ids=lambda c: c.kind)
def test_interior_plane_wave_reproduction(curve):
    ops = operators(curve, 128)
    for theta in (0.0, 1.1, 4.0):
        u, du = plane_wave_traces(ops.grid, K_WAVE, theta)
        res0 = 0.5 * u + ops.K @ u - ops.S @ du
        res1 = 0.5 * du - ops.Kp @ du + ops.Th @ u
        assert np.max(np.abs(res0)) <= 1e-7
        assert np.max(np.abs(res1)) <= 1e-7 * K_WAVE


@pytest.mark.parametrize("curve,z", [(Circle(1.0), (0.1, 0.2)), (Kite(), (0.2, 0.3)),
                                     (Ellipse(2.0, 1.0), (-0.5, 0.1))], ids=["circle", "kite", "ellipse"])
def test_exterior_point_source_reproduction(curve, z):
    ops = operators(curve, 128)
    u, du = point_source_traces(ops.grid, K_WAVE, z)
    res = 0.5 * u - ops.K @ u + ops.S @ du
    assert np.max(np.abs(res)) <= 1e-7 * np.abs(u).max()


def test_interior_identity_fails_for_radiating_field():
    # the two projector identities are not interchangeable
    ops = operators(Circle(1.0), 128)
    u, du = point_source_traces(ops.grid, K_WAVE, (0.1, 0.2))
    res = 0.5 * u + ops.K @ u - ops.S @ du
    assert np.max(np.abs(res)) > 1e-2 * np.abs(u).max()


@pytest.mark.parametrize("curve", [Kite(), Ellipse(2.0, 1.0)], ids=lambda c: c.kind)
def test_weighted_symmetry(curve):
    ops = operators(curve, 128)
    W = ops.grid.weights[:, None]
    for A in (ops.S, ops.Th):
        B = W * A
        assert np.abs(B - B.T).max() <= 1e-10 * np.abs(B).max()
    assert np.abs(W * ops.Kp - (W * ops.K).T).max() <= 1e-10 * np.abs(W * ops.K).max()


def test_circle_operators_symmetric():
    ops = operators(Circle(1.0), 64)
    for A in (ops.S, ops.Th):
        assert np.abs(A - A.T).max() <= 1e-10 * np.abs(A).max()


def test_far_field_of_constant_single_layer_matches_large_radius():
    R, k, n = 1.0, 2.0, 16
    grid = CurveGrid.build(Circle(R), 256)
    ff = far_field_matrices(grid, k, n)
    far = ff.single @ np.ones(256)
    gamma = np.exp(0.25j * np.pi) / np.sqrt(8 * np.pi * k)
    rho = 1.0e5
    xhat = directions(n)
    for i in range(n):
        x = rho * xhat[:, i]
        r = np.hypot(*(x[:, None] - grid.points))
        near = np.sum(0.25j * sp.hankel1(0, k * r) * grid.weights)
        scaled = near * np.sqrt(rho) * np.exp(-1j * k * rho) / gamma
        assert abs(scaled - far[i]) <= 1e-4 * abs(far[i])
    assert np.allclose(far, 2 * np.pi * R * sp.jv(0, k * R), rtol=1e-12)


@pytest.mark.parametrize("curve", [Circle(1.0), Kite()], ids=lambda c: c.kind)
def test_point_source_far_field_normalization(curve):
    grid = CurveGrid.build(curve, 128)
    z = np.array([0.1, 0.2])
    u, du = point_source_traces(grid, K_WAVE, z)
    ff = far_field_matrices(grid, K_WAVE, 50)
    got = ff.double @ u - ff.single @ du
    expect = np.exp(-1j * K_WAVE * (ff.directions.T @ z))
    assert np.max(np.abs(got - expect)) < 1e-8


def test_far_field_linearity(rng):
    grid = CurveGrid.build(Kite(), 64)
    ff = far_field_matrices(grid, K_WAVE, 20)
    p1, p2 = rng.standard_normal((2, 64)) + 1j * rng.standard_normal((2, 64))
    a, b = 0.3 - 2j, 1.7
    for M in (ff.single, ff.double):
        assert np.allclose(M @ (a * p1 + b * p2), a * (M @ p1) + b * (M @ p2), rtol=1e-14, atol=1e-14)


def test_operators_finite():
    ops = operators(Kite(), 64, k=5.0)
    for A in (ops.S, ops.K, ops.Kp, ops.Th):
        assert np.all(np.isfinite(A))


def test_sampling_rules(caplog):
    with pytest.raises(SamplingError):
        operators(Kite(), 16)
    grid = CurveGrid.build(Kite(), 64)
    # kite perimeter is about 9.2: at k = 20 there are ~2 nodes per wavelength
    with pytest.raises(SamplingError):
        assemble_operators(grid, 20.0)
    assert 4 <= points_per_wavelength(grid, 6.0) < 10
    with caplog.at_level("WARNING"):
        assemble_operators(grid, 6.0)
    assert "points per wavelength" in caplog.text
