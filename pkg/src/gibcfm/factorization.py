r"""Factorization-method indicator with Tikhonov regularization and Morozov's rule.

From the far-field matrix ``U`` we form ``F# = |Re U| + |Im U|`` (operator real
and imaginary parts), diagonalize it, and for each sampling point ``z`` and
unit test vector ``phi`` evaluate

    w(z) = ( sum_j lam_j / (alpha + lam_j)^2 |(e_j, phi)|^2 )^(-1),

which is ``1 / ||g||^2`` for the Tikhonov solution of
``(alpha I + F#) g = F#^(1/2) phi``.  ``alpha`` is the root of the
discrepancy equation

    sum_j (alpha^2 - delta^2 lam_j) / (alpha + lam_j)^2 |(e_j, phi)|^2 = 0.

Inner products are plain (unweighted) dot products over the ``n`` direction
samples, and test vectors are normalized in the same norm; ``delta`` is
expressed in these units.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractError, DegenerateTestFunctionError
from .linalg import hermitian_abs, hermitian_eig

logger = logging.getLogger(__name__)

DEFAULT_THETAS = (0.0, math.pi / 4, 3 * math.pi / 4, math.pi)
ALT_THETAS = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4)
EIG_FLOOR = 1.0e-14
ALPHA_LO_FACTOR = 1.0e-14
DELTA_FLOOR = 1.0e-8
MOROZOV_XTOL = 2.0e-15    # relative bracket width at which bisection stops
MAX_BISECTIONS = 200
RHO_MIN = 1.0e-300


@dataclass(frozen=True, eq=False)
class SpectralData:
    values: np.ndarray          # descending, clamped at floor
    vectors: np.ndarray         # columns e_j
    k: float = None
    eta: float = 0.0
    n_clamped: int = 0
    min_raw_eigenvalue: float = 0.0

    @property
    def n(self):
        return self.values.size

    @property
    def lam1(self):
        return float(self.values[0])


def operator_parts(A):
    """``Re A = (A + A*)/2`` and ``Im A = (A - A*)/(2i)``, both Hermitian."""
    A = np.asarray(A, dtype=complex)
    Ah = A.conj().T
    return 0.5 * (A + Ah), (A - Ah) / 2j


def f_sharp_matrix(U, imag_abs=True):
    """``|Re U| + |Im U|`` (or ``|Re U| + Im U`` when ``imag_abs`` is False)."""
    A = U.values if hasattr(U, "values") else np.asarray(U)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError(f"far-field matrix must be square, got shape {A.shape}")
    re, im = operator_parts(A)
    out = hermitian_abs(re) + (hermitian_abs(im) if imag_abs else im)
    return 0.5 * (out + out.conj().T)


def build_f_sharp(U, imag_abs=True):
    """Eigen-decomposition of ``F#`` with eigenvalues clamped at ``1e-14 lam_1``."""
    F = f_sharp_matrix(U, imag_abs)
    eig = hermitian_eig(F)
    values = eig.values.copy()
    if values[0] <= 0:
        raise ContractError("F# has no positive eigenvalue")
    floor = EIG_FLOOR * values[0]
    clamped = int(np.sum(values < floor))
    raw_min = float(values[-1])
    if raw_min < -1e-10 * values[0]:
        logger.warning("F# has a negative eigenvalue %.3e (lam_1 = %.3e)", raw_min, values[0])
    values = np.maximum(values, floor)
    return SpectralData(values, eig.vectors, getattr(U, "k", None), getattr(U, "eta", 0.0),
                        clamped, raw_min)


def observation_angles(n):
    return 2.0 * np.pi * np.arange(n) / n


def test_vectors(z, k, n, kind="monopole", theta=0.0):
    """Normalized test vectors for sampling points ``z`` of shape (..., 2).

    Monopole samples are ``exp(-i k xhat . z)``, dipole samples are
    ``(p(theta) . xhat) exp(-i k xhat . z)`` with ``p = (cos theta, sin theta)``.
    Returns an array of shape ``(..., n)`` with unit Euclidean rows.
    """
    z = np.asarray(z, dtype=float)
    a = observation_angles(n)
    xhat = np.stack([np.cos(a), np.sin(a)])
    phase = np.exp(-1j * k * (z @ xhat))
    if kind == "monopole":
        v = phase
    elif kind == "dipole":
        v = (math.cos(theta) * xhat[0] + math.sin(theta) * xhat[1]) * phase
    else:
        raise ValueError(f"unknown test function kind {kind!r}")
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class TestFunction:
    z: tuple
    kind: str
    theta: float
    vector: np.ndarray


# keep pytest from collecting the dataclass above
TestFunction.__test__ = False


def make_test_function(z, kind, n, k, theta=0.0):
    vec = test_vectors(np.asarray(z, dtype=float), k, n, kind, theta)
    return TestFunction(tuple(np.asarray(z, dtype=float)), kind, float(theta), vec)


def projections(spectral, phis):
    """``rho[..., j] = |(e_j, phi)|^2`` for a stack of test vectors."""
    c = np.asarray(phis) @ spectral.vectors.conj()
    return c.real**2 + c.imag**2


def morozov_equation(alpha, lam, rho, delta):
    """Discrepancy function; ``alpha`` (P,), ``rho`` (P, n) -> (P,).

    ``lam`` is either shared, shape (n,), or per row, shape (P, n); ``delta``
    is a scalar or shape (P,).
    """
    a = np.asarray(alpha, dtype=float)[..., None]
    d2 = (np.asarray(delta, dtype=float) ** 2)[..., None] if np.ndim(delta) else delta**2
    return np.sum((a * a - d2 * np.abs(lam)) / (a + lam) ** 2 * rho, axis=-1)


@dataclass
class MorozovResult:
    alpha: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray
    below: np.ndarray    # no sign change: equation positive at alpha_lo
    above: np.ndarray    # root beyond delta*lam_1; bracket was widened


def morozov_alpha(lam, rho, delta, xtol=MOROZOV_XTOL, max_iter=MAX_BISECTIONS):
    """Root of the discrepancy equation by bisection in ``log alpha``.

    The equation is strictly increasing in ``alpha``.  The bracket is
    ``[1e-14 delta lam_1, delta lam_1]``; when the equation is still negative at
    the top the bracket is doubled until it changes sign (flagged ``above``),
    and when it is already positive at the bottom ``alpha_lo`` is returned
    (flagged ``below``).  Rows of ``rho`` are independent problems.

    Bisection runs until the bracket is ``xtol``-tight rather than stopping at
    a residual threshold, so the root is accurate to a few ulps in ``alpha``.
    """
    rho = np.atleast_2d(np.asarray(rho, dtype=float))
    P = rho.shape[0]
    lam = np.asarray(lam, dtype=float)
    lam = np.broadcast_to(lam, rho.shape)
    delta = np.broadcast_to(np.asarray(delta, dtype=float), (P,))
    if not np.all(delta > 0):
        raise ContractError("delta must be positive")
    total = rho.sum(axis=1)
    if np.any(total <= 0):
        raise ContractError("coefficients must not all vanish")

    def f(alpha, rows):
        return morozov_equation(alpha, lam[rows], rho[rows], delta[rows])

    every = np.arange(P)
    hi = delta * lam.max(axis=1)
    lo = ALPHA_LO_FACTOR * hi
    f_lo = f(lo, every)
    f_hi = f(hi, every)
    below = f_lo > 0
    above = f_hi < 0
    widen = np.nonzero(above)[0]
    while widen.size:
        lo[widen] = hi[widen]
        hi[widen] *= 2.0
        f_hi[widen] = f(hi[widen], widen)
        widen = widen[f_hi[widen] < 0]
    alpha = np.where(below, lo, hi)
    resid = np.where(below, f_lo, f_hi)
    iters = np.zeros(P, dtype=int)
    active = ~below & (resid != 0)
    for it in range(1, max_iter + 1):
        idx = np.nonzero(active)[0]
        if not idx.size:
            break
        mid = np.sqrt(lo[idx] * hi[idx])
        fm = f(mid, idx)
        alpha[idx], resid[idx], iters[idx] = mid, fm, it
        neg = fm < 0
        lo[idx[neg]] = mid[neg]
        hi[idx[~neg]] = mid[~neg]
        done = (fm == 0) | (hi[idx] <= lo[idx] * (1 + xtol))
        active[idx[done]] = False
    return MorozovResult(alpha, resid, iters, below, above)


def filtered_picard(lam, rho, alpha):
    a = np.asarray(alpha, dtype=float)[..., None]
    return np.sum(lam / (a + lam) ** 2 * rho, axis=-1)


def indicator_from_vectors(spectral, phis, delta):
    """``(w, alpha, morozov)`` for a stack of unit test vectors (P, n)."""
    phis = np.atleast_2d(phis)
    rho = projections(spectral, phis)
    if np.any(rho.sum(axis=1) < RHO_MIN):
        raise DegenerateTestFunctionError("test function orthogonal to every eigenvector")
    mor = morozov_alpha(spectral.values, rho, delta)
    w = 1.0 / filtered_picard(spectral.values, rho, mor.alpha)
    return w, mor.alpha, mor


def indicator_w(spectral, phi, delta):
    """Scalar indicator ``w`` and its Morozov parameter for one test function."""
    vec = phi.vector if isinstance(phi, TestFunction) else np.asarray(phi)
    w, alpha, _ = indicator_from_vectors(spectral, vec[None, :], delta)
    return float(w[0]), float(alpha[0])


def indicator_W(spectral, z, delta, thetas=DEFAULT_THETAS, k=None):
    """``W(z) = w_monopole(z) + min_theta w_dipole(z, theta)``."""
    if not len(thetas):
        raise ContractError("theta set must not be empty")
    k = spectral.k if k is None else k
    n = spectral.n
    mono = make_test_function(z, "monopole", n, k)
    w_mono, _ = indicator_w(spectral, mono, delta)
    w_dip = min(indicator_w(spectral, make_test_function(z, "dipole", n, k, th), delta)[0]
                for th in thetas)
    return w_mono + w_dip


@dataclass(frozen=True)
class GridSpec:
    xmin: float = -3.0
    xmax: float = 3.0
    ymin: float = -3.0
    ymax: float = 3.0
    resolution: int = 80

    def __post_init__(self):
        if self.resolution < 2 or not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ConfigError("sampling grid is degenerate")

    def axes(self):
        return (np.linspace(self.xmin, self.xmax, self.resolution),
                np.linspace(self.ymin, self.ymax, self.resolution))

    def points(self):
        """Sampling points in row-major order (y outer, x inner), shape (res*res, 2)."""
        xs, ys = self.axes()
        X, Y = np.meshgrid(xs, ys)
        return np.column_stack([X.ravel(), Y.ravel()])


@dataclass
class IndicatorMap:
    grid: GridSpec
    W: np.ndarray            # (res, res), [iy, ix]
    w_mono: np.ndarray
    w_dip: np.ndarray
    alpha_mono: np.ndarray
    delta: float
    meta: dict = field(default_factory=dict)

    def points(self):
        return self.grid.points()


def auto_delta(spectral, eta):
    """``delta = max(1e-8 sqrt(lam_1), eta sqrt(||F#||_2))``."""
    root = math.sqrt(spectral.lam1)
    return max(DELTA_FLOOR * root, eta * root)


def _evaluate_chunk(spectral, pts, delta, thetas, k):
    n = spectral.n
    w_mono, a_mono, mor = indicator_from_vectors(spectral, test_vectors(pts, k, n, "monopole"), delta)
    below, above = int(mor.below.sum()), int(mor.above.sum())
    w_dip = np.full(len(pts), np.inf)
    for th in thetas:
        w, _, m2 = indicator_from_vectors(spectral, test_vectors(pts, k, n, "dipole", th), delta)
        w_dip = np.minimum(w_dip, w)
        below += int(m2.below.sum())
        above += int(m2.above.sum())
    return w_mono, w_dip, a_mono, below, above


def run_inversion(U, grid=None, delta="auto", k=None, thetas=DEFAULT_THETAS,
                  imag_abs=True, threads=1, eta=None, chunk=400):
    """Indicator map ``W`` over a sampling grid from a (noisy) far-field matrix.

    ``delta="auto"`` uses :func:`auto_delta` with the matrix' recorded noise
    level (or ``eta`` if given).  Output does not depend on ``threads``.
    """
    grid = GridSpec() if grid is None else grid
    if k is not None and U.k is not None and abs(k - U.k) > 1e-12 * abs(U.k):
        raise ConfigError(f"wavenumber {k} does not match data (k={U.k})")
    k = U.k if k is None else k
    if not len(thetas):
        raise ConfigError("theta set must not be empty")
    spectral = build_f_sharp(U, imag_abs=imag_abs)
    eta = U.eta if eta is None else eta
    if delta == "auto":
        delta = auto_delta(spectral, eta)
    delta = float(delta)
    pts = grid.points()
    chunks = [pts[s:s + chunk] for s in range(0, len(pts), chunk)]
    work = lambda c: _evaluate_chunk(spectral, c, delta, thetas, k)  # noqa: E731
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    res = grid.resolution
    w_mono = np.concatenate([p[0] for p in parts]).reshape(res, res)
    w_dip = np.concatenate([p[1] for p in parts]).reshape(res, res)
    alpha = np.concatenate([p[2] for p in parts]).reshape(res, res)
    meta = {
        "k": k, "n": spectral.n, "delta": delta, "eta": eta,
        "thetas": list(thetas), "imag_abs": imag_abs,
        "lambda_1": spectral.lam1, "eigenvalues_clamped": spectral.n_clamped,
        "min_raw_eigenvalue": spectral.min_raw_eigenvalue,
        "morozov_below_interval": sum(p[3] for p in parts),
        "morozov_above_interval": sum(p[4] for p in parts),
    }
    if meta["morozov_below_interval"] or meta["morozov_above_interval"]:
        logger.warning("Morozov fallback: %d below, %d above the bracket",
                       meta["morozov_below_interval"], meta["morozov_above_interval"])
    return IndicatorMap(grid, w_mono + w_dip, w_mono, w_dip, alpha, delta, meta)
