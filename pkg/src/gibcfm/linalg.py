"""Small dense complex linear algebra.

LU solve with partial pivoting, a cyclic Jacobi eigensolver for Hermitian
matrices, and the operator absolute value built on top of it.  Sizes here are
at most a few hundred, so clarity wins over blocking or cache tricks.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, SingularMatrixError

DEFAULT_PIVOT_TOL = 1.0e-12


@dataclass(frozen=True)
class HermitianEig:
    """Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.

    ``vectors[:, j]`` is the unit eigenvector for ``values[j]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.conj().T


def _as_matrix(A, name="A"):
    A = np.asarray(A)
    if A.ndim != 2:
        raise ContractError(f"{name} must be a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractError(f"{name} has non-finite entries")
    return A


@dataclass(frozen=True)
class LUFactor:
    """Packed LU factors with row permutation, reusable for many right-hand sides."""

    lu: np.ndarray
    perm: np.ndarray
    min_pivot_ratio: float

    def solve(self, B):
        B = np.asarray(B)
        vec = B.ndim == 1
        n = self.lu.shape[0]
        if B.ndim not in (1, 2) or B.shape[0] != n:
            raise ContractError(f"right-hand side has shape {B.shape}, expected {n} rows")
        X = B.reshape(n, -1)[self.perm].astype(np.result_type(self.lu, B, 1.0), copy=True)
        for i in range(1, n):
            X[i] -= self.lu[i, :i] @ X[:i]
        for i in range(n - 1, -1, -1):
            X[i] = (X[i] - self.lu[i, i + 1:] @ X[i + 1:]) / self.lu[i, i]
        return X[:, 0] if vec else X


def lu_factor(A, pivot_tol=DEFAULT_PIVOT_TOL):
    """Gaussian elimination with partial pivoting.

    A pivot whose modulus falls below ``pivot_tol * max|A|`` raises
    :class:`SingularMatrixError` carrying the elimination step index.
    Pass ``pivot_tol=0`` to only reject exact zeros.
    """
    A = _as_matrix(A)
    n, ncols = A.shape
    if n != ncols:
        raise ContractError(f"matrix must be square, got {A.shape}")
    lu = A.astype(np.result_type(A, 1.0), copy=True)
    perm = np.arange(n)
    scale = np.abs(A).max() if n else 0.0
    min_ratio = np.inf
    for j in range(n):
        p = j + int(np.argmax(np.abs(lu[j:, j])))
        piv = abs(lu[p, j])
        if piv == 0.0 or piv <= pivot_tol * scale:
            raise SingularMatrixError(f"singular pivot at step {j} (|pivot| = {piv:.3e})", j)
        min_ratio = min(min_ratio, piv / scale)
        if p != j:
            lu[[j, p]] = lu[[p, j]]
            perm[[j, p]] = perm[[p, j]]
        lu[j + 1:, j] /= lu[j, j]
        lu[j + 1:, j + 1:] -= np.outer(lu[j + 1:, j], lu[j, j + 1:])
    return LUFactor(lu, perm, float(min_ratio))


def lu_solve(A, B, pivot_tol=0.0):
    """Solve ``A X = B`` by LU with partial pivoting."""
    return lu_factor(A, pivot_tol=pivot_tol).solve(B)


def _check_hermitian(A, tol):
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ContractError(f"matrix must be square, got {A.shape}")
    scale = np.abs(A).max() if A.size else 0.0
    if tol is None:
        tol = 1.0e-8 * scale
    dev = np.abs(A - A.conj().T).max() if A.size else 0.0
    if dev > tol:
        raise ContractError(f"matrix is not Hermitian: max|A - A*| = {dev:.3e} > {tol:.3e}")
    return 0.5 * (A + A.conj().T)


def _round_robin(n):
    """Pairings of the circle method: n-1 rounds of disjoint (p, q) pairs."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        if pairs:
            rounds.append(np.array(pairs).T)
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def hermitian_eig(A, tol_herm=None, max_sweeps=60):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps use the round-robin ordering, so each round applies ``n/2`` disjoint
    rotations at once.  Iteration stops when the off-diagonal Frobenius norm
    drops to roundoff level (``1e-14`` of the Frobenius norm).

    Raises
    ------
    ContractError
        If ``max|A - A*|`` exceeds ``tol_herm`` (default ``1e-8 max|A|``).
    """
    H = _check_hermitian(A, tol_herm).astype(complex)
    n = H.shape[0]
    V = np.eye(n, dtype=complex)
    total = np.linalg.norm(H)
    rounds = _round_robin(n)
    if total > 0:
        prev = np.inf
        for _ in range(max_sweeps):
            off = np.linalg.norm(H - np.diag(np.diag(H)))
            # roundoff floor is a few eps; stop there or on stagnation
            if off <= 1.0e-14 * total or (off <= 1.0e-12 * total and off > 0.5 * prev):
                break
            prev = off
            for P, Q in rounds:
                g = H[P, Q]
                mag = np.abs(g)
                active = mag > 1.0e-300
                if not np.any(active):
                    continue
                P, Q, g, mag = P[active], Q[active], g[active], mag[active]
                tau = (H[Q, Q].real - H[P, P].real) / (2.0 * mag)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ph = g / mag
                # columns: [hp, hq] <- [hp, hq] @ [[c, s ph], [-s conj(ph), c]]
                hp, hq = H[:, P].copy(), H[:, Q].copy()
                H[:, P] = c * hp - s * np.conj(ph) * hq
                H[:, Q] = s * ph * hp + c * hq
                hp, hq = H[P, :].copy(), H[Q, :].copy()
                H[P, :] = (c * hp.T - s * ph * hq.T).T
                H[Q, :] = (s * np.conj(ph) * hp.T + c * hq.T).T
                vp, vq = V[:, P].copy(), V[:, Q].copy()
                V[:, P] = c * vp - s * np.conj(ph) * vq
                V[:, Q] = s * ph * vp + c * vq
    values = np.diag(H).real.copy()
    order = np.argsort(-values, kind="stable")
    return HermitianEig(values[order], V[:, order])


def hermitian_abs(A, tol_herm=None):
    """``|A| = sum_i |lambda_i| e_i e_i^*`` for Hermitian ``A``."""
    eig = hermitian_eig(A, tol_herm=tol_herm)
    out = (eig.vectors * np.abs(eig.values)) @ eig.vectors.conj().T
    return 0.5 * (out + out.conj().T)
