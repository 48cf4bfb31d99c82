"""One-dimensional slices of the hypersurface M = union of the complex lines L_theta.

L_theta is the complexification of the tangent line at lambda(theta); in
coordinates (z, w) it is the graph

    w = conj(lambda) - e^{-2i theta} (z - lambda).

Fixing z and letting theta run gives the w-slice Gamma_z; fixing w gives the
z-slice C_w = conj(Gamma_{conj w}); intersecting with the quadric zw = c gives
K_c.  The three components of C^2 minus M are labelled by where w sits
relative to the loops of Gamma_z.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .curve import TWO_PI, PlaneClass, SupportCurve
from .errors import (
    BoundaryBand,
    BranchTrackingError,
    GeometryError,
    InadmissibleC,
    OnCurveError,
    TooCloseToContour,
)

OMEGA_PLUS = "OmegaPlus"
OMEGA_MINUS = "OmegaMinus"
OMEGA_ZERO = "OmegaZero"
ON_M = "OnM"

SWAP = {OMEGA_PLUS: OMEGA_MINUS, OMEGA_MINUS: OMEGA_PLUS, OMEGA_ZERO: OMEGA_ZERO, ON_M: ON_M}

DELTA_C = 0.2
POSITIVE_BAND = 1e-12
MAX_CHORD_FRACTION = 1e-2
MIN_SAMPLES = 256
MAX_SAMPLES = 1 << 16


def gamma_point(curve: SupportCurve, z, theta):
    """w-coordinate of the point of L_theta above z."""
    lam = curve.point(theta)
    return np.conj(lam) - np.exp(-2j * np.asarray(theta)) * (z - lam)


def gamma_derivative(curve: SupportCurve, z, theta):
    # the rho-terms cancel, leaving a factor (z - lambda)
    return 2j * np.exp(-2j * np.asarray(theta)) * (z - curve.point(theta))


def line_residual(curve: SupportCurve, z, w, theta):
    """|(z - lam)/lam' - (w - conj lam)/conj lam'|, the L_theta membership residual."""
    lam = curve.point(theta)
    t = curve.unit_tangent(theta)
    return np.abs((z - lam) / t - (w - np.conj(lam)) / np.conj(t))


@dataclass(frozen=True)
class Loop:
    """An oriented sampled loop in one complex coordinate.

    ``periodic`` loops are sampled over a full period without repeating the
    first node; arc loops include both endpoints, which coincide with
    ``closure``.  ``param`` maps theta to (position, derivative) and is used to
    refine the polygon locally.
    """

    theta: np.ndarray
    position: np.ndarray
    derivative: np.ndarray
    periodic: bool
    closure: complex | None = None
    branch: str = ""
    param: Callable | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.theta.size

    def chords(self) -> np.ndarray:
        p = self.position
        return np.abs(np.roll(p, -1) - p)

    def diameter(self) -> float:
        """Max pairwise sample distance (exact for the samples)."""
        p = self.position
        if p.size > 4096:
            p = p[:: int(np.ceil(p.size / 4096))]
        return float(np.max(np.abs(p[:, None] - p[None, :])))

    def extent(self) -> float:
        """Bounding-box diagonal; a cheap proxy for the diameter."""
        p = self.position
        return float(np.hypot(np.ptp(p.real), np.ptp(p.imag)))

    def length(self) -> float:
        return float(np.sum(self.chords()))

    def distance(self, p: complex) -> float:
        """Distance from p to the loop, refined near the closest sample."""
        d = np.abs(self.position - p)
        k = int(np.argmin(d))
        if self.param is None:
            return float(d[k])
        lo, hi = self._neighbour_interval(k)
        res = minimize_scalar(
            lambda t: abs(self.param(t)[0] - p),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-14},
        )
        return float(min(d[k], res.fun))

    def _neighbour_interval(self, k: int) -> tuple[float, float]:
        th = self.theta
        n = th.size
        if self.periodic:
            step = TWO_PI / n
            return th[k] - step, th[k] + step
        return th[max(k - 1, 0)], th[min(k + 1, n - 1)]

    def conjugate(self) -> "Loop":
        param = None
        if self.param is not None:
            base = self.param

            def param(t):
                pos, der = base(t)
                return np.conj(pos), np.conj(der)

        return replace(
            self,
            position=np.conj(self.position),
            derivative=np.conj(self.derivative),
            closure=None if self.closure is None else complex(np.conj(self.closure)),
            param=param,
        )

    def refined_near(self, p: complex, factor: int = 16) -> "Loop":
        """Subdivide the intervals adjacent to samples that are close to p."""
        if self.param is None:
            return self
        pos = self.position
        d = np.abs(pos - p)
        ch = self.chords()
        local = np.maximum(ch, np.roll(ch, 1))
        near = d < 2.0 * local
        if not near.any():
            return self
        n = self.size
        th = self.theta
        ends = np.roll(th, -1)
        if self.periodic:
            ends[-1] = th[0] + TWO_PI
            intervals = n
        else:
            intervals = n - 1
        flag = near | np.roll(near, -1)
        pieces = []
        for i in range(intervals):
            if flag[i]:
                pieces.append(np.linspace(th[i], ends[i], factor, endpoint=False))
            else:
                pieces.append(th[i : i + 1])
        if not self.periodic:
            pieces.append(th[-1:])
        new_theta = np.concatenate(pieces)
        new_pos, new_der = self.param(new_theta)
        return replace(self, theta=new_theta, position=new_pos, derivative=new_der)


def sample_loop(param, start: float, end: float, periodic: bool, *, closure=None, branch="",
                n: int = MIN_SAMPLES) -> Loop:
    """Sample theta -> param(theta) on [start, end], doubling until chords are short."""
    while True:
        theta = np.linspace(start, end, n, endpoint=not periodic)
        pos, der = param(theta)
        loop = Loop(theta, pos, der, periodic, closure, branch, param)
        if n >= MAX_SAMPLES or loop.chords().max() <= MAX_CHORD_FRACTION * loop.extent():
            return loop
        n *= 2


def winding_number(loop: Loop, p: complex, guard: float | None = None) -> int:
    """Number of turns of the loop around p, by accumulated argument.

    The polygon is refined locally until p is well separated from the chords
    near it, so the polygonal count equals that of the smooth loop.
    """
    p = complex(p)
    if guard is None:
        guard = 1e-12 * (1.0 + abs(p) + loop.extent())
    for _ in range(8):
        refined = loop.refined_near(p)
        if refined is loop:
            break
        loop = refined
    v = loop.position - p
    if np.min(np.abs(v)) < guard:
        raise TooCloseToContour(f"point {p} is within {guard:.3g} of the loop")
    turns = np.sum(np.angle(np.roll(v, -1) / v)) / TWO_PI
    k = int(np.rint(turns))
    if abs(turns - k) >= 0.25:
        raise TooCloseToContour(f"winding count {turns:.3f} is not near an integer")
    return k


@dataclass(frozen=True)
class GammaSlice:
    """Gamma_z (coordinate "w") or C_w (coordinate "z").

    Interior base point: one periodic loop.  Exterior base point: ``inner``
    (over the arc facing the base point) and ``outer``, both closing at the
    conjugate of the base point.
    """

    fixed: complex
    plane: PlaneClass
    loops: tuple[Loop, ...]
    coordinate: str = "w"

    @property
    def exterior(self) -> bool:
        return self.plane.is_exterior

    @property
    def inner(self) -> Loop | None:
        return self.loops[0] if self.exterior else None

    @property
    def outer(self) -> Loop:
        return self.loops[-1]


def _gamma_param(curve: SupportCurve, z: complex):
    def param(theta):
        return gamma_point(curve, z, theta), gamma_derivative(curve, z, theta)

    return param


def build_gamma(curve: SupportCurve, z: complex, plane: PlaneClass | None = None) -> GammaSlice:
    z = complex(z)
    plane = plane or curve.classify(z)
    if plane.label == "OnCurve":
        raise OnCurveError(f"z = {z} lies on the curve")
    param = _gamma_param(curve, z)
    if plane.label == "Interior":
        loop = sample_loop(param, 0.0, TWO_PI, True, branch="gamma")
        return GammaSlice(z, plane, (loop,))

    closure = complex(np.conj(z))
    inner = sample_loop(param, *plane.minus_arc, False, closure=closure, branch="gamma_minus")
    outer = sample_loop(param, *plane.plus_arc, False, closure=closure, branch="gamma_plus")
    probe = inner.position[inner.size // 2]
    if winding_number(outer, probe) == 0:
        raise GeometryError(f"inner loop of Gamma_z is not nested at z = {z}")
    return GammaSlice(z, plane, (inner, outer))


def z_slice(curve: SupportCurve, w: complex) -> GammaSlice:
    """{z : (z, w) in M}, the conjugate of Gamma_{conj w}."""
    w = complex(w)
    g = build_gamma(curve, np.conj(w))
    loops = tuple(
        replace(lp.conjugate(), branch=lp.branch.replace("gamma", "zslice")) for lp in g.loops
    )
    return GammaSlice(w, g.plane, loops, coordinate="z")


def full_gamma_loop(curve: SupportCurve, z: complex) -> Loop:
    return sample_loop(_gamma_param(curve, complex(z)), 0.0, TWO_PI, True, branch="gamma_full")


def slice_index(curve: SupportCurve, z: complex) -> int:
    """Winding number of the whole Gamma_z about w = 0."""
    if curve.classify(z).label == "OnCurve":
        raise OnCurveError(f"z = {z} lies on the curve")
    return winding_number(full_gamma_loop(curve, z), 0.0)


@dataclass(frozen=True)
class RegionLabel:
    label: str
    distance: float
    nearest_theta: float
    windings: dict = field(default_factory=dict)
    on_sigma: bool = False
    on_pi_e: bool = False
    fast_path: bool = False


def nearest_line(curve: SupportCurve, z: complex, w: complex, scan: int = 1024):
    """(theta, residual) minimising the L_theta membership residual."""
    theta = np.linspace(0.0, TWO_PI, scan, endpoint=False)
    r = np.abs(w - gamma_point(curve, z, theta))
    k = int(np.argmin(r))
    step = TWO_PI / scan
    res = minimize_scalar(
        lambda t: abs(w - gamma_point(curve, z, t)),
        bounds=(theta[k] - step, theta[k] + step),
        method="bounded",
        options={"xatol": 1e-14},
    )
    t = float(res.x) if res.fun < r[k] else float(theta[k])
    # Gauss-Newton polish: |w - gamma| has a kink at its zero, which Brent resolves slowly
    for _ in range(3):
        d = gamma_derivative(curve, z, t)
        if abs(d) == 0:
            break
        t += float(np.real(np.conj(d) * (w - gamma_point(curve, z, t)))) / abs(d) ** 2
    t_res = float(abs(w - gamma_point(curve, z, t)))
    if t_res <= min(res.fun, r[k]):
        return t % TWO_PI, t_res
    if res.fun < r[k]:
        return float(res.x) % TWO_PI, float(res.fun)
    return float(theta[k]), float(r[k])


def on_m_tolerance(z: complex, w: complex) -> float:
    return 1e-8 * (1.0 + abs(z) + abs(w))


def classify_point2(curve: SupportCurve, z: complex, w: complex, fast: bool = True) -> RegionLabel:
    """Region of (z, w); ``fast=False`` skips the |w| - |z| shortcut and always counts windings."""
    label, _ = _classify(curve, complex(z), complex(w), fast)
    return label


def _classify(curve: SupportCurve, z: complex, w: complex, fast: bool = True):
    """Return (RegionLabel, GammaSlice or None)."""
    gap = abs(w) - abs(z)
    if fast and abs(gap) > 2.0 * curve.m:
        label = OMEGA_PLUS if gap > 0 else OMEGA_MINUS
        return RegionLabel(label, np.inf, np.nan, fast_path=True), None

    theta, dist = nearest_line(curve, z, w)
    tol = on_m_tolerance(z, w)
    on_sigma = abs(w - np.conj(z)) <= tol
    plane = curve.classify(z)
    if dist <= tol:
        return (
            RegionLabel(ON_M, dist, theta, on_sigma=on_sigma,
                        on_pi_e=on_sigma and plane.is_exterior),
            None,
        )
    if plane.label == "OnCurve":
        raise BoundaryBand(f"z = {z} is on the curve and (z, w) is off M", theta)

    gamma = build_gamma(curve, z, plane)
    wind = {}
    if gamma.exterior:
        wind["inner"] = winding_number(gamma.inner, w)
        if wind["inner"] != 0:
            label = OMEGA_MINUS
        else:
            wind["outer"] = winding_number(gamma.outer, w)
            label = OMEGA_ZERO if wind["outer"] != 0 else OMEGA_PLUS
    else:
        wind["outer"] = winding_number(gamma.outer, w)
        label = OMEGA_ZERO if wind["outer"] != 0 else OMEGA_PLUS
    return RegionLabel(label, dist, theta, wind, on_sigma=on_sigma), gamma


def involution(z: complex, w: complex) -> tuple[complex, complex]:
    """(z, w) -> (conj w, conj z); preserves M and swaps Omega+ with Omega-."""
    return complex(np.conj(w)), complex(np.conj(z))


@dataclass(frozen=True)
class KSlice:
    """K_c = M intersected with {zw = c}, in the z-coordinate.

    ``loops`` are the two square-root branches; for c on the positive real
    band they coincide as sets with the circle |z| = sqrt(c).
    """

    c: complex
    loops: tuple[Loop, Loop]
    admissible: bool
    degenerate: bool
    orientation: tuple[int, int]

    @property
    def inner(self) -> Loop:
        return min(self.loops, key=lambda lp: np.mean(np.abs(lp.position)))

    @property
    def outer(self) -> Loop:
        return max(self.loops, key=lambda lp: np.mean(np.abs(lp.position)))

    def orientation_of(self, loop: Loop) -> int:
        return self.orientation[0] if loop is self.loops[0] else self.orientation[1]


def c_admissible(curve: SupportCurve, c: complex, delta_c: float = DELTA_C) -> bool:
    return abs(c) > curve.m ** 2 * (1.0 + delta_c)


def in_positive_band(c: complex) -> bool:
    return c.real > 0 and abs(c.imag) <= POSITIVE_BAND * abs(c)


def _tracked_sqrt(values: np.ndarray, start_sign: float) -> np.ndarray:
    """Continuous square root along a sampled path, starting on a given branch."""
    r = np.sqrt(values)
    flip = np.abs(r[1:] - r[:-1]) > np.abs(r[1:] + r[:-1])
    sign = start_sign * np.concatenate(([1.0], np.cumprod(np.where(flip, -1.0, 1.0))))
    return sign * r


def k_slice(curve: SupportCurve, c: complex, n: int = 512, delta_c: float = DELTA_C) -> KSlice:
    c = complex(c)
    if c == 0 or not c_admissible(curve, c, delta_c):
        raise InadmissibleC(f"|c| = {abs(c):.6g} must exceed m^2 (1 + {delta_c}) = "
                            f"{curve.m ** 2 * (1 + delta_c):.6g}")
    degenerate = in_positive_band(c)
    c_eff = complex(abs(c)) if degenerate else c

    loops = []
    for sign, branch in ((1.0, "kc_plus"), (-1.0, "kc_minus")):
        # track the root on a fine closed grid, then reuse the branch choice
        fine = np.linspace(0.0, TWO_PI, n + 1)
        s_fine = _tracked_sqrt(c_eff - curve.h(fine) ** 2, sign)
        if abs(s_fine[-1] - s_fine[0]) > 1e-8 * max(1.0, abs(s_fine[0])):
            raise BranchTrackingError(f"square-root branch does not close for c = {c}")
        ref = s_fine[:-1]

        def param(theta, ref=ref):
            theta = np.asarray(theta, dtype=float)
            h = curve.h(theta)
            hp = curve.h(theta, 1)
            s = np.sqrt(c_eff - h ** 2 + 0j)
            idx = np.rint((theta % TWO_PI) / TWO_PI * ref.size).astype(int) % ref.size
            s = np.where(np.abs(s - ref[idx]) <= np.abs(s + ref[idx]), s, -s)
            # z = lam' (-i b + s) with lam' = i e^{i theta} and b = h
            e = np.exp(1j * theta)
            pos = (h + 1j * s) * e
            ds = -h * hp / s
            der = (hp + 1j * ds + 1j * h - s) * e
            return pos, der

        theta = np.linspace(0.0, TWO_PI, n, endpoint=False)
        pos, der = param(theta)
        loops.append(Loop(theta, pos, der, True, None, branch, param))

    orientation = tuple(winding_number(lp, 0.0) for lp in loops)
    return KSlice(c, (loops[0], loops[1]), True, degenerate, orientation)
