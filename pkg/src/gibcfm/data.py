"""Far-field noise model and the GIBCFF v1 interchange format.

File layout::

    GIBCFF v1 n=<n> k=<k> eta=<eta>
    i j re im        (n*n lines, 1-based, i = observation, j = incidence)

Numbers are written with ``%.17e`` (round-trip exact, locale independent).
"""

import logging
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .forward import FarFieldMatrix

logger = logging.getLogger(__name__)

HEADER_RE = re.compile(
    r"^GIBCFF v1 n=(?P<n>\d+) k=(?P<k>\S+) eta=(?P<eta>\S+)\s*$")


@dataclass(frozen=True)
class NoiseSpec:
    eta: float
    seed: int = 0

    def __post_init__(self):
        if not (0 <= self.eta < 1):
            raise ValueError(f"noise level must lie in [0, 1), got {self.eta}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a non-negative 64-bit integer")
        if self.eta > 0.5:
            logger.warning("noise level %.3g exceeds 50%%", self.eta)


def entry_uniforms(seed, i, j):
    """The pair ``(X1, X2)`` of uniforms on [-1, 1] for entry ``(i, j)``.

    Each entry owns a PCG64 stream keyed by ``SeedSequence(seed, spawn_key=(i, j))``,
    so draws do not depend on traversal order or on the matrix size.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i, j))))
    return rng.uniform(-1.0, 1.0, size=2)


def uniform_field(seed, rows, cols):
    X = np.empty((2, rows, cols))
    for i in range(rows):
        for j in range(cols):
            X[:, i, j] = entry_uniforms(seed, i, j)
    return X


def contaminate(U, spec):
    """Multiplicative noise ``u (1 + eta (X1 + i X2))``, X uniform on [-1, 1]."""
    values = U.values
    meta = dict(U.meta, noise_seed=spec.seed)
    if spec.eta == 0:
        return FarFieldMatrix(values.copy(), U.k, 0.0, meta)
    X = uniform_field(spec.seed, *values.shape)
    noisy = values * (1.0 + spec.eta * (X[0] + 1j * X[1]))
    return FarFieldMatrix(noisy, U.k, spec.eta, meta)


def _fmt(x):
    return "%.17e" % x


def format_farfield(U):
    n = U.n
    lines = [f"GIBCFF v1 n={n} k={_fmt(U.k)} eta={_fmt(U.eta)}"]
    v = U.values
    for i in range(n):
        for j in range(n):
            z = v[i, j]
            lines.append(f"{i + 1} {j + 1} {_fmt(z.real)} {_fmt(z.imag)}")
    return "\n".join(lines) + "\n"


def write_farfield(U, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_farfield(U))


def parse_farfield(text):
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("empty far-field file", 1)
    match = HEADER_RE.match(lines[0].strip())
    if not match:
        raise ParseError(f"malformed header {lines[0]!r}", 1)
    n = int(match["n"])
    try:
        k = float(match["k"])
        eta = float(match["eta"])
    except ValueError as exc:
        raise ParseError(f"bad number in header: {exc}", 1) from None
    if n < 1 or not math.isfinite(k) or k <= 0 or not math.isfinite(eta):
        raise ParseError("header values out of range", 1)
    body = [(no, ln) for no, ln in enumerate(lines[1:], start=2) if ln.strip()]
    if len(body) != n * n:
        raise ParseError(f"header declares n={n} ({n * n} entries) but file has {len(body)} rows",
                         body[-1][0] if body else 1)
    values = np.empty((n, n), dtype=complex)
    seen = np.zeros((n, n), dtype=bool)
    for no, ln in body:
        parts = ln.split()
        if len(parts) != 4:
            raise ParseError(f"expected 4 fields 'i j re im', got {len(parts)}", no)
        try:
            i, j = int(parts[0]), int(parts[1])
            re_, im_ = float(parts[2]), float(parts[3])
        except ValueError:
            raise ParseError(f"cannot parse row {ln!r}", no) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"index ({i}, {j}) outside 1..{n}", no)
        if seen[i - 1, j - 1]:
            raise ParseError(f"duplicate entry ({i}, {j})", no)
        if not (math.isfinite(re_) and math.isfinite(im_)):
            raise ParseError("non-finite value", no)
        seen[i - 1, j - 1] = True
        values[i - 1, j - 1] = complex(re_, im_)
    return FarFieldMatrix(values, k, eta, {})


def read_farfield(path):
    with open(path, encoding="ascii") as fh:
        return parse_farfield(fh.read())
