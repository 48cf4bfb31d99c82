"""Holomorphic extension of the line data off M by Cauchy-type integrals.

Omega-  : Cauchy integral in w over the inner loop of Gamma_z.
Omega+  : the same in z over the inner loop of the z-slice C_w (z <-> w swap).
Omega0  : annulus Cauchy formula on the quadric zw = c, over the two loops of K_c,
          for |c| large enough that K_c can be traced.
The rest of Omega0 is reached through a bivariate polynomial fit of values
computed by the three direct operators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import (
    DegenerateAnnulus,
    IllConditionedFit,
    InsufficientSamples,
    InadmissibleC,
    LineContError,
    RegionError,
    TooCloseToContour,
    UnreachablePoint,
)
from .linedata import LineField, eval_on_M
from .quadrature import adaptive_edges, arc_integral, periodic_integral
from .slices import (
    DELTA_C,
    OMEGA_MINUS,
    OMEGA_PLUS,
    OMEGA_ZERO,
    ON_M,
    Loop,
    _classify,
    build_gamma,
    c_admissible,
    gamma_derivative,
    gamma_point,
    in_positive_band,
    involution,
    k_slice,
    winding_number,
    z_slice,
)

CAUCHY_MINUS = "CauchyMinus"
CAUCHY_PLUS = "CauchyPlus"
CAUCHY_ANNULUS = "CauchyAnnulus"
GLOBAL_FIT = "GlobalFit"
BOUNDARY = "OnM"

TWO_PI_I = 2j * np.pi


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 512
    panels: int = 8
    panel_order: int = 32
    guard: float = 1e-3
    refine_factor: int = 8
    delta_c: float = DELTA_C

    def __post_init__(self):
        if min(self.nodes, self.panels, self.panel_order, self.refine_factor) <= 0:
            raise ValueError("node counts must be positive")
        if self.guard <= 0:
            raise ValueError("guard must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class ExtensionResult:
    value: complex
    method: str
    label: str
    error: float


def _check_guard(loop: Loop, p: complex, config: QuadratureConfig) -> float:
    d = loop.distance(p)
    limit = config.guard * loop.extent()
    if d < limit:
        raise TooCloseToContour(f"target {p} is {d:.3g} from the contour (guard {limit:.3g})")
    return d


def _minus(field_: LineField, z, w, region, gamma, config) -> ExtensionResult:
    curve = field_.curve
    if gamma is None:
        gamma = build_gamma(curve, z)
    loop = gamma.inner
    wind = region.windings.get("inner") or winding_number(loop, w)
    _check_guard(loop, w, config)

    def integrand(t):
        zeta = gamma_point(curve, z, t)
        return field_(t, z) * gamma_derivative(curve, z, t) / (zeta - w)

    a, b = gamma.plane.minus_arc
    edges = adaptive_edges(a, b, config.panels, lambda t: gamma_point(curve, z, t), w)
    val, err = arc_integral(integrand, edges, config.panel_order)
    scale = abs(TWO_PI_I * wind)
    return ExtensionResult(val / (TWO_PI_I * wind), CAUCHY_MINUS, region.label, err / scale)


def _plus(field_: LineField, z, w, region, config) -> ExtensionResult:
    curve = field_.curve
    cw = z_slice(curve, w)
    if not cw.exterior:
        raise RegionError(f"conj(w) = {np.conj(w)} is not exterior; no inner z-slice loop")
    loop = cw.inner
    wind = winding_number(loop, z)
    if wind == 0:
        raise RegionError(f"z = {z} is not inside the inner z-slice loop")
    _check_guard(loop, z, config)
    wb = np.conj(w)

    def position(t):
        return np.conj(gamma_point(curve, wb, t))

    def integrand(t):
        zeta = position(t)
        return field_(t, zeta) * np.conj(gamma_derivative(curve, wb, t)) / (zeta - z)

    a, b = cw.plane.minus_arc
    edges = adaptive_edges(a, b, config.panels, position, z)
    val, err = arc_integral(integrand, edges, config.panel_order)
    return ExtensionResult(val / (TWO_PI_I * wind), CAUCHY_PLUS, region.label, err / (2 * np.pi))


def _loop_integral(field_: LineField, loop: Loop, z: complex, config: QuadratureConfig):
    """Trapezoid Cauchy integral over a periodic loop, refined once if z is near."""
    n = config.nodes
    spacing = loop.length() / n
    d = loop.distance(z)
    if d < 5.0 * spacing:
        n *= config.refine_factor
        if d < 2.0 * loop.length() / n:
            raise TooCloseToContour(f"target {z} is {d:.3g} from a K_c loop even after refinement")

    def integrand(t):
        zeta, dzeta = loop.param(t)
        return field_(t, zeta) * dzeta / (zeta - z)

    return periodic_integral(integrand, n)


def _annulus(field_: LineField, z, w, region, config) -> ExtensionResult:
    curve = field_.curve
    c = complex(z * w)
    if not c_admissible(curve, c, config.delta_c):
        raise InadmissibleC(f"c = zw = {c} is too small for K_c tracing")
    if in_positive_band(c):
        # the two K_c loops coincide, so there is no annulus to integrate over
        raise DegenerateAnnulus(f"c = {c} lies in the positive real band")
    ks = k_slice(curve, c, config.nodes, config.delta_c)
    outer, inner = ks.outer, ks.inner
    w_out, w_in = winding_number(outer, z), winding_number(inner, z)
    if w_out == 0 or w_in != 0:
        raise RegionError(f"z = {z} is not in the annulus between the K_c loops")
    _check_guard(outer, z, config)
    _check_guard(inner, z, config)
    i_out, e_out = _loop_integral(field_, outer, z, config)
    i_in, e_in = _loop_integral(field_, inner, z, config)
    o_out, o_in = ks.orientation_of(outer), ks.orientation_of(inner)
    val = (i_out / o_out - i_in / o_in) / TWO_PI_I
    return ExtensionResult(val, CAUCHY_ANNULUS, region.label, (e_out + e_in) / (2 * np.pi))


def _require(region, expected):
    if region.label != expected:
        raise RegionError(f"point is in {region.label}, expected {expected}")


def cauchy_minus(field_: LineField, z: complex, w: complex, config: QuadratureConfig = DEFAULT_CONFIG):
    z, w = complex(z), complex(w)
    region, gamma = _classify(field_.curve, z, w)
    _require(region, OMEGA_MINUS)
    return _minus(field_, z, w, region, gamma, config)


def cauchy_plus(field_: LineField, z: complex, w: complex, config: QuadratureConfig = DEFAULT_CONFIG):
    z, w = complex(z), complex(w)
    region, _ = _classify(field_.curve, z, w)
    _require(region, OMEGA_PLUS)
    return _plus(field_, z, w, region, config)


def cauchy_annulus(field_: LineField, z: complex, w: complex, config: QuadratureConfig = DEFAULT_CONFIG):
    z, w = complex(z), complex(w)
    region, _ = _classify(field_.curve, z, w)
    _require(region, OMEGA_ZERO)
    return _annulus(field_, z, w, region, config)


def extend(field_: LineField, z: complex, w: complex, config: QuadratureConfig = DEFAULT_CONFIG,
           fallback: "GlobalFit | None" = None) -> ExtensionResult:
    """Classify (z, w) and evaluate the extension with the matching operator."""
    z, w = complex(z), complex(w)
    region, gamma = _classify(field_.curve, z, w)
    if region.label == ON_M:
        value = complex(eval_on_M(field_, region.nearest_theta, z))
        return ExtensionResult(value, BOUNDARY, ON_M, 0.0)
    if region.label == OMEGA_MINUS:
        return _minus(field_, z, w, region, gamma, config)
    if region.label == OMEGA_PLUS:
        return _plus(field_, z, w, region, config)
    try:
        return _annulus(field_, z, w, region, config)
    except (InadmissibleC, DegenerateAnnulus) as exc:
        if fallback is None:
            raise UnreachablePoint(f"({z}, {w}) is in OmegaZero but {exc}") from exc
        return ExtensionResult(complex(fallback(z, w)), GLOBAL_FIT, region.label,
                               fallback.holdout_residual)


# --- sampling and the polynomial stand-in for the unreachable core ---------


def sample_region(curve, region: str, n: int, rng: np.random.Generator, margin: float = 0.05,
                  config: QuadratureConfig = DEFAULT_CONFIG, max_tries: int = 200_000):
    """Random points of a region where the matching direct operator applies.

    Each point keeps a distance of at least ``margin`` times the contour extent
    from the loops its operator integrates over.
    """
    m = curve.m
    out: list[tuple[complex, complex]] = []
    if region == OMEGA_PLUS:
        return [involution(z, w) for z, w in sample_region(curve, OMEGA_MINUS, n, rng, margin, config)]
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"could not sample {n} points of {region}")
        if region == OMEGA_MINUS:
            z = rng.uniform(1.3 * m, 4.0 * m) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            loop = build_gamma(curve, z).inner
            w = _uniform_in_box(loop, rng)
            try:
                if winding_number(loop, w) == 0 or loop.distance(w) < margin * loop.extent():
                    continue
            except TooCloseToContour:
                continue
            out.append((complex(z), complex(w)))
        elif region == OMEGA_ZERO:
            # draw c, then z between the two K_c loops along a random ray
            r = m * m * (1.0 + config.delta_c) * rng.uniform(1.05, 9.0)
            phi = rng.uniform(0.02, 2 * np.pi - 0.02)
            c = complex(r * np.exp(1j * phi))
            try:
                ks = k_slice(curve, c, config.nodes, config.delta_c)
                t = rng.uniform(0, 2 * np.pi)
                a = ks.inner.param(np.array([t]))[0][0]
                b = ks.outer.param(np.array([t]))[0][0]
                z = complex(a + rng.uniform(0.15, 0.85) * (b - a))
                if winding_number(ks.outer, z) == 0 or winding_number(ks.inner, z) != 0:
                    continue
                if min(ks.outer.distance(z), ks.inner.distance(z)) < margin * ks.outer.extent():
                    continue
                w = c / z
                label, _ = _classify(curve, z, w)
                if label.label != OMEGA_ZERO:
                    raise RegionError(f"annulus point ({z}, {w}) classified {label.label}")
            except TooCloseToContour:
                continue
            out.append((z, complex(w)))
        else:
            raise ValueError(f"cannot sample region {region!r}")
    return out


def _uniform_in_box(loop: Loop, rng) -> complex:
    p = loop.position
    return complex(rng.uniform(p.real.min(), p.real.max()), rng.uniform(p.imag.min(), p.imag.max()))


@dataclass(frozen=True)
class SamplePlan:
    n_samples: int = 200
    holdout: float = 0.25
    seed: int = 0
    margin: float = 0.05
    regions: tuple[str, ...] = (OMEGA_MINUS, OMEGA_PLUS, OMEGA_ZERO)


@dataclass(frozen=True)
class GlobalFit:
    """Least-squares polynomial sum c_jk z^j w^k, j + k <= degree."""

    degree: int
    coefficients: dict = field(repr=False)
    holdout_residual: float
    holdout_relative: float
    train_residual: float
    condition: float
    n_train: int
    n_holdout: int

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        out = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        for (j, k), c in self.coefficients.items():
            out = out + c * z ** j * w ** k
        return out


def monomials(degree: int) -> list[tuple[int, int]]:
    return [(j, k) for j, k in product(range(degree + 1), repeat=2) if j + k <= degree]


def global_fit(field_: LineField, degree: int, plan: SamplePlan = SamplePlan(),
               config: QuadratureConfig = DEFAULT_CONFIG) -> GlobalFit:
    """Fit the extension, evaluated where the direct operators work, by a polynomial."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    rng = np.random.default_rng(plan.seed)
    per = -(-plan.n_samples // len(plan.regions))
    pts = []
    for region in plan.regions:
        pts += sample_region(field_.curve, region, per, rng, plan.margin, config)
    pts = pts[: plan.n_samples]
    z = np.array([p[0] for p in pts])
    w = np.array([p[1] for p in pts])
    vals = np.array([extend(field_, a, b, config).value for a, b in pts])

    order = rng.permutation(len(pts))
    n_hold = int(round(plan.holdout * len(pts)))
    hold, train = order[:n_hold], order[n_hold:]

    basis = monomials(degree)
    if train.size < len(basis):
        raise InsufficientSamples(f"{train.size} training points for {len(basis)} monomials")
    scale = float(max(np.max(np.abs(z)), np.max(np.abs(w)), 1.0))
    design = np.stack([(z / scale) ** j * (w / scale) ** k for j, k in basis], axis=1)
    cond = float(np.linalg.cond(design[train]))
    if cond > 1e12:
        raise IllConditionedFit(f"design matrix condition number {cond:.3g}")
    coef, *_ = np.linalg.lstsq(design[train], vals[train], rcond=None)
    fitted = design @ coef
    resid = np.abs(fitted - vals)
    vmax = max(float(np.max(np.abs(vals))), 1e-300)
    hold_abs = float(resid[hold].max()) if n_hold else 0.0
    coefficients = {jk: complex(c / scale ** (jk[0] + jk[1])) for jk, c in zip(basis, coef)}
    return GlobalFit(
        degree,
        coefficients,
        holdout_residual=hold_abs,
        holdout_relative=hold_abs / vmax,
        train_residual=float(resid[train].max()),
        condition=cond,
        n_train=train.size,
        n_holdout=n_hold,
    )
