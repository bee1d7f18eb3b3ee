r"""Cylindrical Bessel and Hankel functions of integer order.

All functions accept scalar or array arguments and are vectorized over ``x``.
The first kind :math:`J_m` comes from Miller's backward recurrence normalized by
:math:`J_0 + 2\sum_k J_{2k} = 1`; the second kind is seeded by the Neumann
series

.. math::
    Y_0(x) = \frac{2}{\pi}\left(\ln\frac{x}{2} + \gamma\right) J_0(x)
             - \frac{4}{\pi}\sum_{k\ge1} (-1)^k \frac{J_{2k}(x)}{k},

its derivative for :math:`Y_1`, and upward recurrence for higher orders.
Both recurrences run in their stable direction, so one table of orders
``0..max_order`` costs a single sweep.
"""

import numpy as np

from .errors import DomainError

MAX_ORDER = 128
MAX_ARG = 1.0e4
EULER_GAMMA = 0.57721566490153286061

_BIG = 1.0e250
_SMALL = 1.0e-250


def _check_args(max_order, x):
    if int(max_order) != max_order or max_order < 0 or max_order > MAX_ORDER:
        raise DomainError(f"order must be an integer in [0, {MAX_ORDER}], got {max_order}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("argument must be finite")
    if np.any(x < 0):
        raise DomainError("argument must be non-negative")
    if np.any(x > MAX_ARG):
        raise DomainError(f"argument exceeds supported range x <= {MAX_ARG}")
    return int(max_order), x


def _start_order(max_order, xmax):
    n = max(max_order, xmax) + 30.0 + 8.0 * xmax ** (1.0 / 3.0)
    n = int(n) + 1
    return n + (n % 2)


def _j_table(max_order, x, need_all=False):
    """Backward recurrence for J_0..J_N at positive ``x`` (1-D array).

    Returns the table truncated to ``max_order`` unless ``need_all`` is set,
    in which case the full table up to the start order is returned.
    """
    N = _start_order(max_order, float(x.max()) if x.size else 0.0)
    keep = N + 1 if need_all else max_order + 1
    table = np.zeros((keep, x.size))
    two_over_x = 2.0 / x
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1.0e-30)
    norm = np.zeros_like(x)
    for k in range(N, 0, -1):
        if k < keep:
            table[k] = j_cur
        if k % 2 == 0:
            norm += 2.0 * j_cur
        j_prev = k * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        big = np.abs(j_cur) > _BIG
        if np.any(big):
            scale = np.where(big, _SMALL, 1.0)
            j_cur = j_cur * scale
            j_next = j_next * scale
            norm = norm * scale
            table[k:] *= scale
    table[0] = j_cur
    norm += j_cur
    return table / norm


def bessel_jy_table(max_order, x, kind="jy"):
    """Tabulate ``J_m(x)`` and/or ``Y_m(x)`` for ``m = 0..max_order``.

    Parameters
    ----------
    max_order : int
        Highest order, at most :data:`MAX_ORDER`.
    x : array_like
        Non-negative arguments (strictly positive when ``Y`` is requested).
    kind : {"j", "jy"}
        Whether to also compute the second kind.

    Returns
    -------
    J : ndarray, shape ``(max_order + 1,) + x.shape``
    Y : ndarray, same shape (only when ``kind == "jy"``)
    """
    max_order, x = _check_args(max_order, x)
    want_y = kind == "jy"
    if want_y and np.any(x <= 0):
        raise DomainError("second-kind Bessel functions need x > 0")
    shape = x.shape
    flat = x.ravel()
    J = np.zeros((max_order + 1, flat.size))
    Y = np.zeros((max_order + 1, flat.size)) if want_y else None
    zero = flat == 0.0
    J[0, zero] = 1.0
    pos = ~zero
    if np.any(pos):
        xp = flat[pos]
        full = _j_table(max(max_order, 1), xp, need_all=want_y)
        J[:, pos] = full[: max_order + 1]
        if want_y:
            Y[:, pos] = _y_from_j(full, xp, max_order)
    J = J.reshape((max_order + 1,) + shape)
    if want_y:
        return J, Y.reshape((max_order + 1,) + shape)
    return J


def _y_from_j(full, x, max_order):
    nterms = (full.shape[0] - 2) // 2
    k = np.arange(1, nterms + 1)[:, None]
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    log_term = np.log(0.5 * x) + EULER_GAMMA
    y0 = (2.0 / np.pi) * log_term * full[0] - (4.0 / np.pi) * np.sum(sign * full[2 * k[:, 0]] / k, axis=0)
    # Y_1 = -Y_0', using J_0' = -J_1 and 2 J_n' = J_{n-1} - J_{n+1}
    djsum = np.sum(sign * (full[2 * k[:, 0] - 1] - full[2 * k[:, 0] + 1]) / k, axis=0)
    y1 = -((2.0 / np.pi) * (full[0] / x - log_term * full[1]) - (2.0 / np.pi) * djsum)
    Y = np.empty((max_order + 1, x.size))
    Y[0] = y0
    if max_order >= 1:
        Y[1] = y1
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, max_order):
            nxt = (2.0 * m / x) * Y[m] - Y[m - 1]
            # past overflow the true value is -inf; keep it instead of inf - inf
            Y[m + 1] = np.where(np.isfinite(Y[m]), nxt, -np.inf)
    return Y


def bessel_j(order, x):
    """Bessel function of the first kind ``J_order(x)`` for ``x >= 0``."""
    J = bessel_jy_table(order, x, kind="j")
    out = J[order]
    return float(out) if out.ndim == 0 else out


def bessel_y(order, x):
    """Bessel function of the second kind ``Y_order(x)`` for ``x > 0``."""
    _, Y = bessel_jy_table(order, x)
    out = Y[order]
    return float(out) if out.ndim == 0 else out


def hankel1(order, x):
    """Hankel function of the first kind ``H_order^(1)(x) = J + iY``."""
    J, Y = bessel_jy_table(order, x)
    out = J[order] + 1j * Y[order]
    return complex(out) if out.ndim == 0 else out


def hankel1_derivative(order, x):
    """Derivative of ``H_order^(1)`` via ``H_m' = H_{m-1} - (m/x) H_m``.

    For ``m = 0`` the recurrence is replaced by ``H_0' = -H_1``.
    """
    J, Y = bessel_jy_table(max(order, 1), x)
    H = J + 1j * Y
    if order == 0:
        out = -H[1]
    else:
        out = H[order - 1] - (order / np.asarray(x, dtype=float)) * H[order]
    return complex(out) if np.ndim(out) == 0 else out


def bessel_j_derivative(order, x):
    """Derivative of ``J_order`` from ``2 J_m' = J_{m-1} - J_{m+1}``."""
    J = bessel_jy_table(order + 1, x, kind="j")
    out = 0.5 * ((J[order - 1] if order > 0 else -J[1]) - J[order + 1])
    return float(out) if np.ndim(out) == 0 else out
