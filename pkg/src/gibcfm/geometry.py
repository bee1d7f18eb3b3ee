"""Smooth closed planar curves given by 2*pi-periodic parameterizations.

Built-in curves are counterclockwise, so the outward normal is
``(y'(t), -x'(t)) / |x'(t)|``.  Custom curves are trigonometric polynomials

    x(t) = sum_k cos_x[k] cos(k t) + sin_x[k] sin(k t)

(same for ``y``, index ``k`` starting at 0) and are flipped to
counterclockwise on construction if their signed area is negative.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GeometryError

J_MIN = 1.0e-8


class Curve:
    """Base class; subclasses provide :meth:`_derivs` returning (x, x', x'')."""

    kind = "abstract"

    def _derivs(self, t):
        raise NotImplementedError

    def eval(self, t):
        return self._derivs(np.asarray(t, dtype=float))[0]

    def derivative(self, t):
        return self._derivs(np.asarray(t, dtype=float))[1]

    def second_derivative(self, t):
        return self._derivs(np.asarray(t, dtype=float))[2]

    def outward_normal(self, t):
        d = self.derivative(t)
        jac = np.hypot(d[0], d[1])
        if np.any(jac < J_MIN):
            raise GeometryError(f"degenerate parameterization: |x'(t)| < {J_MIN}")
        return np.array([d[1], -d[0]]) / jac

    def signed_area(self, m=512):
        t = 2.0 * np.pi * np.arange(m) / m
        x, d = self.eval(t), self.derivative(t)
        return 0.5 * np.sum(x[0] * d[1] - x[1] * d[0]) * (2.0 * np.pi / m)

    def polygon(self, m=4096):
        t = 2.0 * np.pi * np.arange(m) / m
        return self.eval(t).T

    def contains(self, z, m=4096):
        """Winding-number containment test against an ``m``-gon (``m >= 256``)."""
        z = np.asarray(z, dtype=float)
        return winding_number(self.polygon(max(m, 256)), z) != 0

    def to_dict(self):
        raise NotImplementedError


def winding_number(poly, z):
    """Winding number of closed polygon ``poly`` (shape (m, 2)) around points ``z``.

    ``z`` may be a single point ``(2,)`` or an array ``(..., 2)``.
    """
    z = np.asarray(z, dtype=float)
    pts = z.reshape(-1, 2)
    nxt = np.roll(poly, -1, axis=0)
    wn = np.empty(len(pts), dtype=int)
    for start in range(0, len(pts), 256):
        chunk = pts[start:start + 256]
        a = poly[None, :, :] - chunk[:, None, :]
        b = nxt[None, :, :] - chunk[:, None, :]
        cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
        dot = np.sum(a * b, axis=-1)
        total = np.sum(np.arctan2(cross, dot), axis=1)
        wn[start:start + 256] = np.rint(total / (2.0 * np.pi)).astype(int)
    return wn.reshape(z.shape[:-1]) if z.ndim > 1 else int(wn[0])


@dataclass(frozen=True)
class Circle(Curve):
    R: float = 1.0
    center: tuple = (0.0, 0.0)
    kind = "circle"

    def __post_init__(self):
        if not self.R > 0:
            raise ConfigError(f"circle radius must be positive, got {self.R}")

    def _derivs(self, t):
        c, s = np.cos(t), np.sin(t)
        R = self.R
        x = np.array([self.center[0] + R * c, self.center[1] + R * s])
        return x, np.array([-R * s, R * c]), np.array([-R * c, -R * s])

    def to_dict(self):
        return {"kind": "circle", "R": self.R}


@dataclass(frozen=True)
class Ellipse(Curve):
    a: float = 2.0
    b: float = 1.0
    kind = "ellipse"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ConfigError(f"ellipse semi-axes must be positive, got ({self.a}, {self.b})")

    def _derivs(self, t):
        c, s = np.cos(t), np.sin(t)
        a, b = self.a, self.b
        return np.array([a * c, b * s]), np.array([-a * s, b * c]), np.array([-a * c, -b * s])

    def to_dict(self):
        return {"kind": "ellipse", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Kite(Curve):
    """The kite ``(cos t + 0.65 cos 2t, 1.5 sin t)``."""

    kind = "kite"

    def _derivs(self, t):
        c, s = np.cos(t), np.sin(t)
        c2, s2 = np.cos(2 * t), np.sin(2 * t)
        x = np.array([c + 0.65 * c2, 1.5 * s])
        d = np.array([-s - 1.3 * s2, 1.5 * c])
        dd = np.array([-c - 2.6 * c2, -1.5 * s])
        return x, d, dd

    def to_dict(self):
        return {"kind": "kite"}


@dataclass(frozen=True)
class TrigCurve(Curve):
    """Trigonometric-polynomial curve from cosine/sine coefficient tables."""

    cos_x: tuple
    sin_x: tuple
    cos_y: tuple
    sin_y: tuple
    reversed_: bool = field(default=False, compare=False)
    kind = "custom"

    def _derivs(self, t):
        t = -t if self.reversed_ else t
        sgn = -1.0 if self.reversed_ else 1.0
        out = []
        for cos_c, sin_c in ((self.cos_x, self.sin_x), (self.cos_y, self.sin_y)):
            ca = np.asarray(cos_c, dtype=float)
            sa = np.asarray(sin_c, dtype=float)
            nk = max(ca.size, sa.size)
            ca = np.pad(ca, (0, nk - ca.size))
            sa = np.pad(sa, (0, nk - sa.size))
            k = np.arange(nk).reshape((-1,) + (1,) * np.ndim(t))
            ck, sk = np.cos(k * t), np.sin(k * t)
            ca = ca.reshape(k.shape)
            sa = sa.reshape(k.shape)
            f = np.sum(ca * ck + sa * sk, axis=0)
            df = np.sum(k * (-ca * sk + sa * ck), axis=0)
            ddf = np.sum(-k * k * (ca * ck + sa * sk), axis=0)
            out.append((f, sgn * df, ddf))
        return tuple(np.array([out[0][i], out[1][i]]) for i in range(3))

    def to_dict(self):
        return {"kind": "custom", "cos_x": list(self.cos_x), "sin_x": list(self.sin_x),
                "cos_y": list(self.cos_y), "sin_y": list(self.sin_y)}


def make_custom(cos_x, sin_x, cos_y, sin_y):
    curve = TrigCurve(tuple(cos_x), tuple(sin_x), tuple(cos_y), tuple(sin_y))
    area = curve.signed_area()
    if abs(area) < 1e-12:
        raise GeometryError("custom curve encloses no area")
    if area < 0:
        curve = TrigCurve(curve.cos_x, curve.sin_x, curve.cos_y, curve.sin_y, reversed_=True)
    return curve


def curve_from_dict(spec):
    """Build a curve from its JSON description (``{"kind": ...}``)."""
    kind = spec.get("kind")
    if kind == "kite":
        return Kite()
    if kind == "circle":
        return Circle(float(spec.get("R", 1.0)))
    if kind == "ellipse":
        return Ellipse(float(spec.get("a", 2.0)), float(spec.get("b", 1.0)))
    if kind == "custom":
        return make_custom(spec.get("cos_x", []), spec.get("sin_x", []),
                           spec.get("cos_y", []), spec.get("sin_y", []))
    raise ConfigError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True, eq=False)
class CurveGrid:
    """Curve sampled at ``t_i = 2 pi i / m`` with cached geometric quantities."""

    curve: Curve
    m: int
    t: np.ndarray
    points: np.ndarray       # (2, m)
    tangents: np.ndarray     # x'(t_i), (2, m)
    second: np.ndarray       # x''(t_i), (2, m)
    jac: np.ndarray          # |x'(t_i)|
    normals: np.ndarray      # outward unit normals, (2, m)

    @classmethod
    def build(cls, curve, m):
        if m <= 0 or m % 2:
            raise GeometryError(f"node count must be even and positive, got {m}")
        t = 2.0 * np.pi * np.arange(m) / m
        x, d, dd = curve._derivs(t)
        jac = np.hypot(d[0], d[1])
        if np.any(jac < J_MIN):
            raise GeometryError(f"degenerate parameterization: min |x'(t)| = {jac.min():.3e}")
        normals = np.array([d[1], -d[0]]) / jac
        if curve.signed_area() <= 0:
            raise GeometryError("curve must be counterclockwise (positive signed area)")
        return cls(curve, m, t, x, d, dd, jac, normals)

    @property
    def weights(self):
        """Trapezoidal arc-length weights ``J_i 2 pi / m``."""
        return self.jac * (2.0 * np.pi / self.m)

    @property
    def perimeter(self):
        return float(np.sum(self.weights))

    def is_simple(self):
        """Self-intersection check on the sampled polygon."""
        return polygon_is_simple(self.points.T)


def polygon_is_simple(poly):
    n = len(poly)
    a = poly
    b = np.roll(poly, -1, axis=0)
    for i in range(n):
        # segments i and j share no vertex when |i - j| > 1 (cyclically)
        j = np.arange(i + 2, n)
        if i == 0:
            j = j[j != n - 1]
        if j.size == 0:
            continue
        p, r = a[i], b[i] - a[i]
        q, s = a[j], b[j] - a[j]
        rxs = r[0] * s[:, 1] - r[1] * s[:, 0]
        qp = q - p
        with np.errstate(divide="ignore", invalid="ignore"):
            tt = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / rxs
            uu = (qp[:, 0] * r[1] - qp[:, 1] * r[0]) / rxs
        hit = (rxs != 0) & (tt >= 0) & (tt <= 1) & (uu >= 0) & (uu <= 1)
        if np.any(hit):
            return False
    return True


def distance_to_curve(curve, z, m=4096):
    """Distance from points ``z`` (..., 2) to the densely sampled curve."""
    poly = curve.polygon(m)
    z = np.asarray(z, dtype=float)
    pts = z.reshape(-1, 2)
    d = np.full(len(pts), np.inf)
    for start in range(0, len(pts), 256):
        chunk = pts[start:start + 256]
        dist = np.linalg.norm(chunk[:, None, :] - poly[None, :, :], axis=-1)
        d[start:start + 256] = dist.min(axis=1)
    return d.reshape(z.shape[:-1])
