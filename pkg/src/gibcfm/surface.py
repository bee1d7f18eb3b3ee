"""Generalized impedance operator ``Z = div_G mu grad_G - lambda`` on a curve.

On a parameterized curve the surface gradient is ``(1/J) d/dt`` and the
surface divergence of a tangential field with component ``v`` is
``(1/J) d/dt v``, so

    (Z f)(t) = (1/J) d/dt [ mu (1/J) df/dt ] - lambda f.

Derivatives are taken spectrally on the uniform periodic grid.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GeometryError


def fourier_diff(samples):
    """Spectral derivative ``d/dt`` of periodic samples on ``t_i = 2 pi i / m``.

    Exact for trigonometric polynomials of degree ``< m/2``; the Nyquist
    coefficient is dropped.  Works along the first axis.
    """
    f = np.asarray(samples)
    m = f.shape[0]
    if m % 2:
        raise ValueError(f"fourier_diff needs an even number of samples, got {m}")
    freq = np.fft.fftfreq(m, d=1.0 / m)
    freq[m // 2] = 0.0
    shape = (m,) + (1,) * (f.ndim - 1)
    out = np.fft.ifft(1j * freq.reshape(shape) * np.fft.fft(f, axis=0), axis=0)
    if np.isrealobj(f):
        out = out.real
    return out


def diff_matrix(m):
    """Dense matrix of :func:`fourier_diff`: ``D_ij = (-1)^(i-j) cot((t_i - t_j)/2) / 2``."""
    if m % 2:
        raise ValueError(f"m must be even, got {m}")
    i = np.arange(m)
    d = (i[:, None] - i[None, :]) % m
    D = np.zeros((m, m))
    off = d != 0
    h = 2.0 * np.pi / m
    D[off] = 0.5 * np.where(d[off] % 2 == 0, 1.0, -1.0) / np.tan(0.5 * h * d[off])
    return D


@dataclass(frozen=True)
class Coefficient:
    """Complex function of the curve parameter, constant or trigonometric.

    ``value(t) = const + sum_k cos_[k] cos(k t) + sin_[k] sin(k t)`` with
    complex table entries.
    """

    const: complex = 0.0
    cos_: tuple = ()
    sin_: tuple = ()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, complex(self.const))
        for k, c in enumerate(self.cos_):
            out = out + c * np.cos(k * t)
        for k, s in enumerate(self.sin_):
            out = out + s * np.sin(k * t)
        return out

    @property
    def is_constant(self):
        return not any(self.cos_[1:]) and not any(self.sin_)

    @classmethod
    def from_json(cls, spec, path):
        if isinstance(spec, (int, float)):
            return cls(complex(spec))
        if not isinstance(spec, dict):
            raise ConfigError(f"{path}: expected number or object, got {spec!r}")
        if "re" in spec or "im" in spec:
            return cls(complex(spec.get("re", 0.0), spec.get("im", 0.0)))

        def table(re_key, im_key):
            re = list(spec.get(re_key, []))
            im = list(spec.get(im_key, []))
            n = max(len(re), len(im))
            re += [0.0] * (n - len(re))
            im += [0.0] * (n - len(im))
            return tuple(complex(a, b) for a, b in zip(re, im))

        return cls(0.0, table("cos_re", "cos_im"), table("sin_re", "sin_im"))

    def to_json(self):
        if not self.cos_ and not self.sin_:
            c = complex(self.const)
            return {"re": c.real, "im": c.imag}
        return {"cos_re": [c.real for c in self.cos_], "cos_im": [c.imag for c in self.cos_],
                "sin_re": [s.real for s in self.sin_], "sin_im": [s.imag for s in self.sin_]}


@dataclass(frozen=True)
class ImpedanceParams:
    """Coefficients ``(mu, lambda)`` of the surface operator.

    Construction checks, on 512 samples and with zero tolerance, that both
    imaginary parts are non-positive and that ``Re mu`` is either identically
    zero (classical impedance) or of one strict sign.
    """

    mu: Coefficient
    lam: Coefficient

    def __post_init__(self):
        t = 2.0 * np.pi * np.arange(512) / 512
        mu, lam = self.mu(t), self.lam(t)
        if np.any(mu.imag > 0) or np.any(lam.imag > 0):
            raise ConfigError("impedance coefficients must have non-positive imaginary parts")
        re = mu.real
        if not (np.all(mu == 0) or np.all(re > 0) or np.all(re < 0)):
            raise ConfigError("Re(mu) must be uniformly positive or uniformly negative")

    @classmethod
    def constant(cls, mu=0.0, lam=0.0):
        return cls(Coefficient(complex(mu)), Coefficient(complex(lam)))

    @property
    def is_real(self):
        t = 2.0 * np.pi * np.arange(64) / 64
        return bool(np.all(self.mu(t).imag == 0) and np.all(self.lam(t).imag == 0))

    @classmethod
    def from_json(cls, spec):
        return cls(Coefficient.from_json(spec.get("mu", 0.0), "/impedance/mu"),
                   Coefficient.from_json(spec.get("lambda", 0.0), "/impedance/lambda"))

    def to_json(self):
        return {"mu": self.mu.to_json(), "lambda": self.lam.to_json()}


def assemble_impedance(grid, params):
    """Dense ``m x m`` matrix of ``Z`` on the nodes of ``grid``."""
    if np.any(grid.jac <= 0):
        raise GeometryError("degenerate Jacobian on grid")
    D = diff_matrix(grid.m)
    mu = params.mu(grid.t)
    lam = params.lam(grid.t)
    inv_j = 1.0 / grid.jac
    return (inv_j[:, None] * D) @ ((mu * inv_j)[:, None] * D) - np.diag(lam)


def surface_derivative_matrix(grid):
    """Arc-length derivative ``d/ds = (1/J) d/dt`` as a matrix."""
    return (1.0 / grid.jac)[:, None] * diff_matrix(grid.m)
