"""Convex curves with positive curvature, stored by their support function.

A curve is described by h(theta), the signed distance from the origin to the
tangent line with outward normal e^{i theta}.  With that parametrization the
curve point, unit tangent and radius of curvature are

    lambda(theta) = (h + i h') e^{i theta}
    tangent       = i e^{i theta}
    rho(theta)    = h + h''

and a point z lies on the tangent line at theta exactly when
g(theta) = h(theta) - Re(z e^{-i theta}) vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import (
    CurvatureViolation,
    DegenerateTangency,
    NotInterior,
    SeriesFitError,
    SpecError,
)

TWO_PI = 2.0 * np.pi

VALIDATION_GRID = 4096
SCAN_GRID = 1024
TOL_THETA = 1e-12
SMALL_BATCH = 64
ELLIPSE_FIT_TOL = 1e-10


@dataclass(frozen=True)
class PlaneClass:
    """Position of a planar point relative to the curve.

    For exterior points ``minus_arc`` is the angle interval (start, end),
    start < end, on which g < 0 -- the tangency points facing z.  ``plus_arc``
    is the complementary interval.
    """

    label: str
    g_min: float
    tangency: tuple[float, float] | None = None
    minus_arc: tuple[float, float] | None = None
    plus_arc: tuple[float, float] | None = None

    @property
    def is_exterior(self) -> bool:
        return self.label == "Exterior"


@dataclass(frozen=True)
class SupportCurve:
    """h(theta) = c0 + sum_k a_k cos(k theta) + b_k sin(k theta)."""

    c0: float
    a: np.ndarray = field(default_factory=lambda: np.zeros(0))
    b: np.ndarray = field(default_factory=lambda: np.zeros(0))
    grid: int = VALIDATION_GRID
    label: str = ""
    fit_residual: float = 0.0
    m: float = field(init=False)
    h_min: float = field(init=False)

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        n = max(a.size, b.size)
        a = np.pad(a, (0, n - a.size))
        b = np.pad(b, (0, n - b.size))
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.grid < 8:
            raise ValueError("grid resolution must be at least 8")

        theta = np.linspace(0.0, TWO_PI, self.grid, endpoint=False)
        h = self.h(theta)
        if np.any(h <= 0):
            k = int(np.argmin(h))
            raise NotInterior(
                f"support function is not positive: h({theta[k]:.6f}) = {h[k]:.6g}"
            )
        rho = self.radius_of_curvature(theta)
        if np.any(rho <= 0):
            k = int(np.argmin(rho))
            raise CurvatureViolation(
                f"radius of curvature h + h'' = {rho[k]:.6g} <= 0 at theta = {theta[k]:.6f}"
            )
        object.__setattr__(self, "h_min", float(h.min()))
        object.__setattr__(self, "m", self._max_modulus(theta))

    @property
    def order(self) -> int:
        return self.a.size

    def _max_modulus(self, theta: np.ndarray) -> float:
        r = np.abs(self.point(theta))
        k = int(np.argmax(r))
        step = theta[1] - theta[0]
        res = minimize_scalar(
            lambda t: -abs(self.point(t)),
            bounds=(theta[k] - step, theta[k] + step),
            method="bounded",
            options={"xatol": 1e-13},
        )
        return float(max(r[k], -res.fun))

    def support(self, theta):
        """(h, h', h'') at theta, from one evaluation of the harmonics."""
        theta = np.asarray(theta, dtype=float)
        if self.order == 0:
            zero = np.zeros(theta.shape)
            return zero + self.c0, zero, zero
        k = np.arange(1, self.order + 1)
        flat = theta.ravel()
        if flat.size <= SMALL_BATCH:
            # few angles: one vectorised exp beats the per-harmonic loop
            powers = np.exp(1j * np.multiply.outer(k, flat))
        else:
            # e^{ik theta} by repeated multiplication; far cheaper than exp per entry
            base = np.exp(1j * flat)
            powers = np.empty((k.size, base.size), dtype=complex)
            powers[0] = base
            for j in range(1, k.size):
                np.multiply(powers[j - 1], base, out=powers[j])
        coef = self.a - 1j * self.b
        h = self.c0 + (coef @ powers).real
        h1 = ((1j * k * coef) @ powers).real
        h2 = ((-(k * k) * coef) @ powers).real
        return h.reshape(theta.shape), h1.reshape(theta.shape), h2.reshape(theta.shape)

    def h(self, theta, deriv: int = 0):
        """Support function or one of its first two derivatives."""
        if deriv not in (0, 1, 2):
            raise ValueError("deriv must be 0, 1 or 2")
        return self.support(theta)[deriv]

    def point(self, theta):
        """The curve point with outward normal e^{i theta}."""
        theta = np.asarray(theta, dtype=float)
        h, h1, _ = self.support(theta)
        return (h + 1j * h1) * np.exp(1j * theta)

    def unit_tangent(self, theta):
        return 1j * np.exp(1j * np.asarray(theta, dtype=float))

    def line_point(self, theta, t):
        return self.point(theta) + np.asarray(t) * self.unit_tangent(theta)

    def radius_of_curvature(self, theta):
        h, _, h2 = self.support(theta)
        return h + h2

    def g(self, z, theta):
        """h(theta) - Re(z e^{-i theta}); equals Im((z - lambda) / tangent)."""
        theta = np.asarray(theta, dtype=float)
        return self.h(theta) - np.real(z * np.exp(-1j * theta))

    def tol_on(self, z) -> float:
        return 1e-9 * (1.0 + abs(z))

    def classify(self, z: complex, scan: int = SCAN_GRID) -> PlaneClass:
        """Interior / OnCurve / Exterior, with tangency angles for exterior points."""
        z = complex(z)
        tol = self.tol_on(z)
        theta = np.linspace(0.0, TWO_PI, scan, endpoint=False)
        g = self.g(z, theta)
        k = int(np.argmin(g))
        step = TWO_PI / scan
        res = minimize_scalar(
            lambda t: float(self.g(z, t)),
            bounds=(theta[k] - step, theta[k] + step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        theta_min = float(res.x) % TWO_PI
        g_min = min(float(res.fun), float(g[k]))
        if g_min > tol:
            return PlaneClass("Interior", g_min)
        if abs(g_min) <= tol:
            return PlaneClass("OnCurve", g_min)

        # put the refined minimum on the scan so thin negative dips are bracketed
        theta = np.sort(np.append(theta, theta_min))
        g = self.g(z, theta)
        pos = g >= 0
        brackets = np.nonzero(pos != np.roll(pos, -1))[0]
        if brackets.size != 2:
            raise DegenerateTangency(
                f"{brackets.size} sign changes of the tangency function at z = {z}"
            )
        lo = theta[brackets]
        hi = np.where(brackets + 1 < theta.size, theta[(brackets + 1) % theta.size], TWO_PI + theta[0])
        root = np.array([
            brentq(lambda t: float(self.g(z, t)), a, b, xtol=TOL_THETA * 1e-3, rtol=4 * np.finfo(float).eps)
            for a, b in zip(lo, hi)
        ])
        r1, r2 = np.sort(root % TWO_PI)
        if self.g(z, 0.5 * (r1 + r2)) < 0:
            minus, plus = (r1, r2), (r2, r1 + TWO_PI)
        else:
            minus, plus = (r2, r1 + TWO_PI), (r1, r2)
        return PlaneClass(
            "Exterior",
            g_min,
            tangency=(float(r1), float(r2)),
            minus_arc=(float(minus[0]), float(minus[1])),
            plus_arc=(float(plus[0]), float(plus[1])),
        )


def circle(r: float, grid: int = VALIDATION_GRID) -> SupportCurve:
    return SupportCurve(float(r), grid=grid, label=f"circle:{r:g}")


def ellipse(a: float, b: float, grid: int = VALIDATION_GRID) -> SupportCurve:
    """Ellipse with semi-axes a (along x) and b; h = sqrt(a^2 cos^2 + b^2 sin^2).

    The support function is not a trigonometric polynomial, so it is fitted by
    a truncated Fourier series (the least-squares fit on an equispaced grid).
    """
    if a <= 0 or b <= 0:
        raise SpecError("ellipse semi-axes must be positive")

    def support(t):
        return np.sqrt((a * np.cos(t)) ** 2 + (b * np.sin(t)) ** 2)

    n = 4096
    theta = np.linspace(0.0, TWO_PI, n, endpoint=False)
    coef = np.fft.rfft(support(theta)) / n
    c0 = coef[0].real
    ak = 2.0 * coef[1:].real
    bk = -2.0 * coef[1:].imag
    mag = np.hypot(ak, bk)
    keep = np.nonzero(mag > 1e-16 * c0)[0]
    order = int(keep[-1]) + 1 if keep.size else 0
    if order > n // 4:
        raise SeriesFitError(f"ellipse({a}, {b}) needs more than {n // 4} harmonics")
    ak, bk = ak[:order], bk[:order]

    check = theta + np.pi / n
    k = np.arange(1, order + 1)
    kt = np.multiply.outer(check, k)
    fitted = c0 + np.cos(kt) @ ak + np.sin(kt) @ bk
    residual = float(np.max(np.abs(fitted - support(check))))
    if residual > ELLIPSE_FIT_TOL:
        raise SeriesFitError(f"ellipse fit residual {residual:.3g} exceeds {ELLIPSE_FIT_TOL}")
    return SupportCurve(c0, ak, bk, grid=grid, label=f"ellipse:{a:g},{b:g}", fit_residual=residual)


def fourier(coeffs, grid: int = VALIDATION_GRID) -> SupportCurve:
    """Build from [c0, a1, b1, a2, b2, ...]."""
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise SpecError("fourier curve needs at least the constant term")
    rest = coeffs[1:]
    if len(rest) % 2:
        rest.append(0.0)
    label = "fourier:" + ",".join(f"{c:g}" for c in coeffs)
    return SupportCurve(coeffs[0], rest[0::2], rest[1::2], grid=grid, label=label)


def parse_curve(spec: str, grid: int = VALIDATION_GRID) -> SupportCurve:
    """Parse "circle:R", "ellipse:A,B" or "fourier:c0,a1,b1,...".

    Raises SpecError for malformed strings and the CurveError subclasses for
    curves that violate positivity or curvature.
    """
    kind, _, args = spec.strip().partition(":")
    try:
        values = [float(v) for v in args.split(",")] if args.strip() else []
    except ValueError as exc:
        raise SpecError(f"bad numbers in curve spec {spec!r}") from exc
    kind = kind.lower()
    if kind == "circle":
        if len(values) != 1 or values[0] <= 0:
            raise SpecError("circle spec is circle:R with R > 0")
        return circle(values[0], grid)
    if kind == "ellipse":
        if len(values) != 2:
            raise SpecError("ellipse spec is ellipse:A,B")
        return ellipse(values[0], values[1], grid)
    if kind == "fourier":
        return fourier(values, grid)
    raise SpecError(f"unknown curve kind {kind!r}")
