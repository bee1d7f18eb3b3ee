r"""Nystrom matrices of the Helmholtz boundary integral operators on smooth curves.

With ``G(x) = (i/4) H_0^(1)(k|x|)`` and the outward normal ``nu``:

* ``S psi(x)   = int G(x - y) psi(y) ds(y)``
* ``K phi(x)   = int dG(x - y)/dnu(y) phi(y) ds(y)``
* ``K' psi(x)  = int dG(x - y)/dnu(x) psi(y) ds(y)``
* ``Th phi(x)  = d/dnu(x) of the double layer``, via Maue's identity
  ``Th phi = d/ds S (d phi/ds) + k^2 nu . S(nu phi)``.

Exterior traces: ``gamma0+ D = K + I/2``, ``gamma1+ S = K' - I/2``,
``gamma0 S = S`` and ``gamma1 D = Th``.

Each weakly singular kernel ``M(t, tau)`` is split as
``M1 ln(4 sin^2((t - tau)/2)) + M2`` with analytic ``M1``, ``M2`` and the log
part is integrated exactly against the trigonometric interpolant (Kress'
weights ``R_j``), giving exponential convergence on analytic curves.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import AssemblyError, SamplingError
from .geometry import CurveGrid
from .special import EULER_GAMMA, bessel_jy_table
from .surface import surface_derivative_matrix

logger = logging.getLogger(__name__)

MIN_NODES = 32
MIN_POINTS_PER_WAVELENGTH = 4.0
WARN_POINTS_PER_WAVELENGTH = 10.0


def log_weights(m):
    r"""Kress weights ``R[i, j]`` for ``int ln(4 sin^2((t_i - tau)/2)) f(tau) dtau``.

    ``R_j(t) = -(2 pi / n) sum_{q=1}^{n-1} cos(q (t - t_j)) / q - (pi / n^2) cos(n (t - t_j))``
    with ``n = m / 2``.
    """
    n = m // 2
    s = 2.0 * np.pi * np.arange(m) / m
    q = np.arange(1, n)
    row = -(2.0 * np.pi / n) * (np.cos(np.outer(s, q)) / q).sum(axis=1) - (np.pi / n**2) * np.cos(n * s)
    idx = (np.arange(m)[:, None] - np.arange(m)[None, :]) % m
    return row[idx]


def points_per_wavelength(grid, k):
    return 2.0 * np.pi * grid.m / (k * grid.perimeter)


def check_sampling(grid, k):
    if grid.m < MIN_NODES:
        raise SamplingError(f"need at least {MIN_NODES} quadrature nodes, got {grid.m}")
    ppw = points_per_wavelength(grid, k)
    if ppw < MIN_POINTS_PER_WAVELENGTH:
        raise SamplingError(f"grid too coarse for k={k}: {ppw:.2f} points per wavelength "
                            f"(need >= {MIN_POINTS_PER_WAVELENGTH})")
    if ppw < WARN_POINTS_PER_WAVELENGTH:
        logger.warning("only %.1f points per wavelength at k=%g, m=%d; accuracy will suffer",
                       ppw, k, grid.m)
    return ppw


@dataclass(frozen=True, eq=False)
class BoundaryOperatorSet:
    grid: CurveGrid
    k: float
    S: np.ndarray
    K: np.ndarray
    Kp: np.ndarray
    Th: np.ndarray


@dataclass(frozen=True, eq=False)
class FarFieldKernel:
    """Maps densities on the grid to far-field samples at ``n`` uniform directions."""

    directions: np.ndarray   # (2, n)
    single: np.ndarray       # (n, m)
    double: np.ndarray       # (n, m)


def _split_kernels(grid, k):
    """Pieces shared by all kernels: distances, Bessel values, log weights."""
    m = grid.m
    X = grid.points
    diff = X[:, :, None] - X[:, None, :]          # x(t_i) - x(t_j)
    r = np.hypot(diff[0], diff[1])
    off = ~np.eye(m, dtype=bool)
    kr = k * r[off]
    J, Y = bessel_jy_table(1, kr)
    h0 = np.zeros((m, m), dtype=complex)
    h1_over_r = np.zeros((m, m), dtype=complex)
    j0 = np.ones((m, m))
    j1_over_r = np.zeros((m, m))
    h0[off] = J[0] + 1j * Y[0]
    h1_over_r[off] = (J[1] + 1j * Y[1]) / r[off]
    j0[off] = J[0]
    j1_over_r[off] = J[1] / r[off]
    tdiff = grid.t[:, None] - grid.t[None, :]
    logs = np.zeros((m, m))
    logs[off] = np.log(4.0 * np.sin(0.5 * tdiff[off]) ** 2)
    return diff, off, h0, h1_over_r, j0, j1_over_r, logs


def _nystrom(M, M1, diag_M2, logs, off, R, h):
    M2 = M - M1 * logs
    M2[~off] = diag_M2
    return R * M1 + h * M2


def assemble_operators(grid, k):
    """Assemble ``S``, ``K``, ``K'`` and ``Th`` on ``grid`` at wavenumber ``k``."""
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    check_sampling(grid, k)
    m = grid.m
    h = 2.0 * np.pi / m
    R = log_weights(m)
    diff, off, h0, h1_over_r, j0, j1_over_r, logs = _split_kernels(grid, k)
    jac = grid.jac
    nu = grid.normals
    d1, d2 = grid.tangents
    dd1, dd2 = grid.second

    # single layer
    M = 0.25j * h0 * jac[None, :]
    M1 = -j0 * jac[None, :] / (4.0 * np.pi)
    diag_S = (0.25j - EULER_GAMMA / (2.0 * np.pi) - np.log(0.5 * k * jac) / (2.0 * np.pi)) * jac
    S = _nystrom(M, M1, diag_S, logs, off, R, h)

    curv = (d2 * dd1 - d1 * dd2) / (4.0 * np.pi * jac**2)

    # double layer: nu(y) |x'(tau)| = (x2', -x1')(tau)
    dl = diff[0] * d2[None, :] - diff[1] * d1[None, :]
    L = 0.25j * k * h1_over_r * dl
    L1 = -k * j1_over_r * dl / (4.0 * np.pi)
    K = _nystrom(L, L1, curv, logs, off, R, h)

    # adjoint double layer
    adl = (diff[0] * nu[0][:, None] + diff[1] * nu[1][:, None]) * jac[None, :]
    Lp = -0.25j * k * h1_over_r * adl
    Lp1 = k * j1_over_r * adl / (4.0 * np.pi)
    Kp = _nystrom(Lp, Lp1, curv, logs, off, R, h)

    # Maue: Th = Ds S Ds + k^2 S_nu, S_nu kernel weighted by nu(x).nu(y)
    nn = nu[0][:, None] * nu[0][None, :] + nu[1][:, None] * nu[1][None, :]
    S_nu = _nystrom(M * nn, M1 * nn, diag_S, logs, off, R, h)
    Ds = surface_derivative_matrix(grid)
    Th = Ds @ S @ Ds + k**2 * S_nu

    for name, A in (("S", S), ("K", K), ("Kp", Kp), ("Th", Th)):
        if not np.all(np.isfinite(A)):
            raise AssemblyError(f"non-finite entries in {name}")
    return BoundaryOperatorSet(grid, float(k), S, K, Kp, Th)


def directions(n):
    """Uniform unit directions at angles ``2 pi i / n``, shape (2, n)."""
    a = 2.0 * np.pi * np.arange(n) / n
    return np.array([np.cos(a), np.sin(a)])


def far_field_matrices(grid, k, n):
    r"""Far-field evaluation matrices for single- and double-layer densities.

    The far field of ``G(. - z)`` is ``exp(-i k xhat . z)`` under the
    normalization ``u_s ~ gamma * u_inf * exp(ik|x|)/sqrt|x|`` with
    ``gamma = exp(i pi/4)/sqrt(8 pi k)``, so rows are
    ``exp(-i k xhat . y_j) w_j`` and ``d/dnu(y)`` of that for the double layer.
    """
    xhat = directions(n)
    w = grid.weights
    phase = np.exp(-1j * k * (xhat.T @ grid.points))
    single = phase * w[None, :]
    double = -1j * k * (xhat.T @ grid.normals) * phase * w[None, :]
    return FarFieldKernel(xhat, single, double)
