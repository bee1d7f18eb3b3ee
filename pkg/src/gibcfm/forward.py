"""Exterior scattering with a generalized impedance condition, plane-wave incidence.

The scattered field is sought as ``u_s = D phi - i eta_c S phi``.  Imposing
``d_nu u_s + Z u_s = -(d_nu u_i + Z u_i)`` on the exterior traces gives

    [Th - i eta_c (K' - I/2) + Z (K + I/2 - i eta_c S)] phi = f,

solved once per incident direction against a single LU factorization.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ResonanceError, SingularMatrixError
from .geometry import Circle, CurveGrid
from .layers import assemble_operators, directions, far_field_matrices
from .linalg import lu_factor
from .special import MAX_ORDER, bessel_jy_table
from .surface import ImpedanceParams, assemble_impedance

logger = logging.getLogger(__name__)

RESONANCE_PIVOT_TOL = 1.0e-12


def gamma2(k):
    """Far-field normalization constant ``exp(i pi/4) / sqrt(8 pi k)``."""
    return np.exp(0.25j * np.pi) / np.sqrt(8.0 * np.pi * k)


@dataclass
class FarFieldMatrix:
    """``values[i, j] ~ u_inf(xhat_i, theta_j)`` at angles ``2 pi i / n``.

    Rows index observation directions, columns incident directions.
    """

    values: np.ndarray
    k: float
    eta: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError(f"far-field matrix must be square, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("far-field matrix has non-finite entries")

    @property
    def n(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class ScatteringConfig:
    curve: object
    impedance: ImpedanceParams
    k: float
    n: int = 50
    m: int = 128
    coupling: float = None

    def __post_init__(self):
        if not self.k > 0:
            raise ConfigError(f"wavenumber must be positive, got {self.k}")
        if self.n < 8:
            raise ConfigError(f"need at least 8 directions, got {self.n}")
        if self.m < 64 or self.m % 2:
            raise ConfigError(f"quadrature nodes m={self.m} must be even and >= 64")
        if self.coupling is not None and self.coupling == 0:
            raise ConfigError("combined-field coupling must be non-zero")

    @property
    def eta_c(self):
        return self.k if self.coupling is None else self.coupling


@dataclass
class ForwardSolution:
    farfield: FarFieldMatrix
    density: np.ndarray
    grid: CurveGrid
    min_pivot_ratio: float


def system_matrix(ops, Z, eta_c):
    m = ops.S.shape[0]
    half = 0.5 * np.eye(m)
    return ops.Th - 1j * eta_c * (ops.Kp - half) + Z @ (ops.K + half - 1j * eta_c * ops.S)


def incident_traces(grid, k, n):
    """Dirichlet and Neumann traces of ``exp(i k theta_j . x)``, shape (m, n)."""
    theta = directions(n)
    u = np.exp(1j * k * (grid.points.T @ theta))
    du = 1j * k * (grid.normals.T @ theta) * u
    return u, du


def solve_forward(config, return_solution=False):
    """Far-field matrix of the GIBC obstacle for ``n`` incident plane waves."""
    grid = CurveGrid.build(config.curve, config.m)
    k, eta_c = config.k, config.eta_c
    ops = assemble_operators(grid, k)
    Z = assemble_impedance(grid, config.impedance)
    A = system_matrix(ops, Z, eta_c)
    try:
        lu = lu_factor(A, pivot_tol=RESONANCE_PIVOT_TOL)
    except SingularMatrixError as exc:
        raise ResonanceError(
            f"forward system singular at k={k} (pivot {exc.pivot_index}); "
            "this (Z, k) pair is at or near a resonance, perturb k slightly") from exc
    cond = np.abs(A).sum(axis=0).max() * np.abs(lu.solve(np.eye(config.m))).sum(axis=0).max()
    u, du = incident_traces(grid, k, config.n)
    rhs = -(du + Z @ u)
    phi = lu.solve(rhs)
    ff = far_field_matrices(grid, k, config.n)
    U = (ff.double - 1j * eta_c * ff.single) @ phi
    meta = {"m": config.m, "coupling": eta_c, "min_pivot_ratio": lu.min_pivot_ratio,
            "condition_1norm": float(cond)}
    logger.info("forward solve: k=%g n=%d m=%d cond_1 %.3e", k, config.n, config.m, cond)
    result = FarFieldMatrix(U, k, 0.0, meta)
    if return_solution:
        return ForwardSolution(result, phi, grid, lu.min_pivot_ratio)
    return result


def circle_coefficients(R, k, mu, lam, M):
    """Mode coefficients ``a_q``, ``q = -M..M``, of the scattered field on a disk.

    ``u_s = sum_q i^q a_q H_q(k r) exp(i q (phi - theta))`` with
    ``a_q = -(k J_q' + z_q J_q) / (k H_q' + z_q H_q)`` at ``kR`` and impedance
    symbol ``z_q = -mu q^2 / R^2 - lam``.
    """
    if M + 1 > MAX_ORDER:
        raise ConfigError(f"mode count {M} exceeds supported Bessel order {MAX_ORDER - 1}")
    x = k * R
    J, Y = bessel_jy_table(M + 1, np.array([x]))
    J, Y = J[:, 0], Y[:, 0]
    H = J + 1j * Y
    q = np.arange(M + 1)
    Jp = np.empty(M + 1)
    Hp = np.empty(M + 1, dtype=complex)
    Jp[0], Hp[0] = -J[1], -H[1]
    Jp[1:] = J[:M] - q[1:] / x * J[1:M + 1]
    Hp[1:] = H[:M] - q[1:] / x * H[1:M + 1]
    z = -mu * q**2 / R**2 - lam
    denom = k * Hp + z * H[:M + 1]
    if np.any(np.abs(denom) < 1.0e-12):
        bad = int(q[np.argmin(np.abs(denom))])
        raise ResonanceError(
            f"mode {bad}: k^2 is (numerically) an eigenvalue of -Delta associated with Z")
    a = -(k * Jp + z * J[:M + 1]) / denom
    # J_{-q} = (-1)^q J_q and H_{-q} = (-1)^q H_q leave a_q even in q
    return np.concatenate([a[:0:-1], a])


def circle_series_oracle(R, k, mu, lam, n, modes=None):
    """Far-field matrix of the disk of radius ``R`` from the mode series.

    The far-field constant follows from ``H_q(kr) ~ sqrt(2/(pi k r)) exp(i(kr - q pi/2 - pi/4))``:
    ``i^q H_q / gamma2 -> -4i / sqrt(r) * exp(ikr)``, so
    ``u_inf(xhat, theta) = -4i sum_q a_q exp(i q (phi_x - phi_theta))``.
    """
    min_modes = int(np.ceil(3 * k * R)) + 15
    M = min_modes if modes is None else int(modes)
    if M < min_modes:
        raise ConfigError(f"need at least {min_modes} modes, got {M}")
    a = circle_coefficients(R, k, complex(mu), complex(lam), M)
    q = np.arange(-M, M + 1)
    ang = 2.0 * np.pi * np.arange(n) / n
    delta = ang[:, None] - ang[None, :]
    U = -4j * np.tensordot(np.exp(1j * delta[..., None] * q), a, axes=([2], [0]))
    return FarFieldMatrix(U, k, 0.0, {"source": "circle-series", "R": R, "modes": M})


def circle_config(R, k, mu, lam, n, m):
    return ScatteringConfig(Circle(R), ImpedanceParams.constant(mu, lam), k, n, m)
