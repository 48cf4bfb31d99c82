"""Moment conditions: the test that per-line data comes from a single entire function.

For exterior z the moments m_n(z) = integral over the inner loop of Gamma_z of
zeta^n F(z, zeta) dzeta vanish for consistent data, and the moments over the
two loops of K_c cancel.  A nonzero moment means the Cauchy integral does not
reproduce the data.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .curve import SupportCurve
from .errors import LineContError, OnCurveError, RegionError
from .extend import DEFAULT_CONFIG, QuadratureConfig
from .linedata import LineField, consistency_check
from .quadrature import panel_rule
from .slices import gamma_derivative, gamma_point, k_slice

log = logging.getLogger(__name__)

TOL_M = 1e-7
N_MAX = 8


@dataclass(frozen=True)
class MomentEntry:
    z: complex
    n: int
    value: complex
    scale: float

    @property
    def normalized(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else 0.0


@dataclass
class MomentReport:
    n_max: int
    tol: float
    entries: list[MomentEntry] = field(default_factory=list)
    consistency: list[tuple[complex, float]] = field(default_factory=list)
    errors: list[tuple[complex, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def passed(self, entry: MomentEntry) -> bool:
        return entry.normalized <= self.tol

    @property
    def max_normalized(self) -> float:
        return max((e.normalized for e in self.entries), default=0.0)

    @property
    def offending(self) -> list[MomentEntry]:
        return [e for e in self.entries if not self.passed(e)]

    @property
    def aggregate_pass(self) -> bool:
        return (
            not self.errors
            and not self.offending
            and all(r <= self.tol for _, r in self.consistency)
        )

    def to_dict(self, curve: str = "", provenance: str = "") -> dict:
        return {
            "curve": curve,
            "field_provenance": provenance,
            "n_max": self.n_max,
            "tol_m": self.tol,
            "entries": [
                {
                    "z": [e.z.real, e.z.imag],
                    "n": e.n,
                    "moment_re": e.value.real,
                    "moment_im": e.value.imag,
                    "normalized": e.normalized,
                    "pass": self.passed(e),
                }
                for e in self.entries
            ],
            "consistency": [
                {"z": [z.real, z.imag], "residual": r, "pass": r <= self.tol}
                for z, r in self.consistency
            ],
            "errors": [{"z": [z.real, z.imag], "error": msg} for z, msg in self.errors],
            "warnings": list(self.warnings),
            "aggregate_pass": self.aggregate_pass,
        }

    def to_json(self, curve: str = "", provenance: str = "") -> str:
        return json.dumps(self.to_dict(curve, provenance), indent=2, sort_keys=False,
                          default=_json_float)


def _json_float(x):
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    raise TypeError(f"not JSON serialisable: {type(x)}")


def _arc_nodes(a: float, b: float, config: QuadratureConfig, shift: float = 0.0):
    """Panel edges on [a, b]; ``shift`` in [0, 1) rotates the interior panel boundaries."""
    width = (b - a) / config.panels
    inner = a + (np.arange(config.panels) + shift) * width
    edges = np.unique(np.concatenate(([a], inner[inner > a], [b])))
    return panel_rule(edges, config.panel_order)


def moments(field_: LineField, z: complex, n_max: int = N_MAX, tol: float = TOL_M,
            config: QuadratureConfig = DEFAULT_CONFIG, shift: float = 0.0) -> MomentReport:
    """m_n(z) for 0 <= n <= n_max over the inner loop of Gamma_z."""
    curve = field_.curve
    z = complex(z)
    plane = curve.classify(z)
    if plane.label == "OnCurve":
        raise OnCurveError(f"z = {z} lies on the curve")
    if not plane.is_exterior:
        raise RegionError(f"z = {z} is interior; Gamma_z has no inner loop")
    theta, weights = _arc_nodes(*plane.minus_arc, config, shift)
    zeta = gamma_point(curve, z, theta)
    dzeta = gamma_derivative(curve, z, theta)
    f = field_(theta, z)
    length = float(np.sum(weights * np.abs(dzeta)))
    report = MomentReport(n_max, tol)
    power = np.ones_like(zeta)
    for n in range(n_max + 1):
        g = power * f
        value = complex(np.sum(weights * g * dzeta))
        report.entries.append(MomentEntry(z, n, value, float(np.max(np.abs(g))) * length))
        power = power * zeta
    return report


def normal_approach(curve: SupportCurve, theta0: float, j_max: int = 10) -> np.ndarray:
    """z_j = lambda(theta0) + 2^-j e^{i theta0}, approaching the curve along its normal."""
    j = np.arange(j_max + 1)
    return curve.point(theta0) + 2.0 ** (-j) * np.exp(1j * theta0)


def boundary_shrink_check(field_: LineField, zs, n: int = 0,
                          config: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """|m_n(z_j)| along an approach sequence to the curve."""
    return np.array([abs(moments(field_, z, n, config=config).entries[n].value) for z in zs])


@dataclass(frozen=True)
class CancellationStep:
    c: complex
    value: complex
    scale: float

    @property
    def normalized(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else 0.0


def kc_moment(field_: LineField, c: complex, n: int = 0,
              config: QuadratureConfig = DEFAULT_CONFIG) -> CancellationStep:
    """Outer minus inner K_c loop integral of zeta^n F(zeta, c / zeta), both counterclockwise."""
    ks = k_slice(field_.curve, c, config.nodes, config.delta_c)
    theta = np.linspace(0.0, 2 * np.pi, config.nodes, endpoint=False)
    h = 2 * np.pi / config.nodes
    total = 0j
    big = 0.0
    length = 0.0
    for loop, sign in ((ks.outer, 1.0), (ks.inner, -1.0)):
        zeta, dzeta = loop.param(theta)
        g = zeta ** n * field_(theta, zeta)
        total += sign * np.sum(g * dzeta) * h / ks.orientation_of(loop)
        big = max(big, float(np.max(np.abs(g))))
        length += float(np.sum(np.abs(dzeta)) * h)
    return CancellationStep(complex(c), complex(total), big * length)


def kc_moment_cancellation(field_: LineField, c0: float, etas, n: int = 0,
                           config: QuadratureConfig = DEFAULT_CONFIG) -> list[CancellationStep]:
    """Annulus moments along c_j = c0 e^{i eta_j} as c_j approaches the positive real c0."""
    return [kc_moment(field_, c0 * np.exp(1j * eta), n, config) for eta in etas]


def default_z_set(curve: SupportCurve, radii=(1.5, 2.5, 4.0), angles: int = 8) -> list[complex]:
    phi = 2 * np.pi * np.arange(angles) / angles
    return [complex(r * curve.m * np.exp(1j * p)) for r in radii for p in phi]


def range_test(field_: LineField, zs=None, n_max: int = N_MAX, tol: float = TOL_M,
               config: QuadratureConfig = DEFAULT_CONFIG) -> MomentReport:
    """Moments and cross-line consistency at every z; per-point failures are collected."""
    if zs is None:
        zs = default_z_set(field_.curve)
    zs = [complex(z) for z in zs]
    report = MomentReport(n_max, tol)
    if not zs:
        msg = "empty z set: range test passes vacuously"
        log.warning(msg)
        report.warnings.append(msg)
        return report
    for z in zs:
        try:
            report.entries.extend(moments(field_, z, n_max, tol, config).entries)
            t1, t2 = field_.curve.classify(z).tangency
            ref = float(np.max(np.abs(field_(np.array([t1, t2]), np.array([z, z])))))
            resid = consistency_check(field_, z)
            report.consistency.append((z, resid / ref if ref > 0 else resid))
        except LineContError as exc:
            report.errors.append((z, f"{type(exc).__name__}: {exc}"))
    return report
