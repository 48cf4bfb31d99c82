"""Per-line entire data f_theta and the CR function F it defines on M.

A LineField is an oracle (theta, zeta) -> f_{lambda(theta)}(zeta), evaluable at
complex zeta off the real tangent line.  On M, F(z, w) = f_theta(z) whenever
(z, w) lies on L_theta.
"""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy.interpolate import CubicSpline

from .curve import TWO_PI, SupportCurve
from .errors import IllConditionedFit, InsufficientSamples, RegionError, SpecError
from .slices import gamma_point

GROUND_TRUTH = "ground-truth"
FITTED = "fitted"
CORRUPTED = "corrupted"

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class GroundTruth:
    """An entire function of (z, w): a polynomial sum c_jk z^j w^k, or exp(alpha z + beta w)."""

    kind: str
    terms: Mapping[tuple[int, int], complex] = field(default_factory=dict)
    alpha: complex = 0j
    beta: complex = 0j
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("poly", "exp"):
            raise SpecError(f"unknown ground truth kind {self.kind!r}")
        for (j, k), c in self.terms.items():
            if j < 0 or k < 0 or not np.isfinite(c):
                raise SpecError(f"bad polynomial term {(j, k)}: {c}")

    @property
    def degree(self) -> int:
        if self.kind != "poly" or not self.terms:
            return 0
        return max(j + k for j, k in self.terms)

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        if self.kind == "exp":
            return np.exp(self.alpha * z + self.beta * w)
        out = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        for (j, k), c in self.terms.items():
            out = out + c * z ** j * w ** k
        return out


def polynomial(terms: Mapping[tuple[int, int], complex], label: str = "") -> GroundTruth:
    return GroundTruth("poly", dict(terms), label=label)


def exponential(alpha: complex, beta: complex, label: str = "") -> GroundTruth:
    return GroundTruth("exp", alpha=complex(alpha), beta=complex(beta), label=label)


def parse_truth(spec: str) -> GroundTruth:
    """Parse "poly:j,k,re,im;j,k,re,im;..." or "exp:re_a,im_a,re_b,im_b"."""
    kind, _, body = spec.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "poly":
            terms: dict[tuple[int, int], complex] = {}
            for chunk in filter(None, (c.strip() for c in body.split(";"))):
                j, k, re, im = chunk.split(",")
                key = (int(j), int(k))
                terms[key] = terms.get(key, 0j) + complex(float(re), float(im))
            return polynomial(terms, label=spec.strip())
        if kind == "exp":
            ra, ia, rb, ib = (float(v) for v in body.split(","))
            return exponential(complex(ra, ia), complex(rb, ib), label=spec.strip())
    except ValueError as exc:
        raise SpecError(f"cannot parse ground truth {spec!r}") from exc
    raise SpecError(f"unknown ground truth kind {kind!r}")


@dataclass(frozen=True)
class LineField:
    """theta -> entire function f_theta, as a vectorised oracle (theta, zeta) -> value."""

    oracle: Callable = field(repr=False)
    provenance: str
    curve: SupportCurve = field(repr=False)
    truth: GroundTruth | None = None
    label: str = ""
    diagnostics: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, theta, zeta):
        return self.oracle(np.asarray(theta, dtype=float), np.asarray(zeta, dtype=complex))


def from_ground_truth(curve: SupportCurve, truth: GroundTruth) -> LineField:
    def oracle(theta, zeta):
        return truth(zeta, gamma_point(curve, zeta, theta))

    return LineField(oracle, GROUND_TRUTH, curve, truth, label=truth.label)


PROFILES = {"cos": np.cos, "sin": np.sin}


def corrupt(base: LineField, amplitude: float, profile: str = "cos") -> LineField:
    """Add a per-line constant eps * profile(theta); breaks consistency across lines."""
    g = PROFILES[profile]

    def oracle(theta, zeta):
        return base.oracle(theta, zeta) + amplitude * g(theta)

    return LineField(
        oracle,
        CORRUPTED,
        base.curve,
        base.truth,
        label=f"{base.label}+{amplitude:g}*{profile}",
        diagnostics={"amplitude": amplitude, "profile": profile},
    )


def eval_on_M(field_: LineField, theta, z):
    """F at the point (z, gamma_point(z, theta)) of L_theta."""
    return field_(theta, z)


def consistency_check(field_: LineField, z: complex) -> float:
    """|f_theta1(z) - f_theta2(z)| over the two tangent lines through exterior z."""
    plane = field_.curve.classify(z)
    if not plane.is_exterior:
        raise RegionError(f"z = {z} is not exterior ({plane.label})")
    t1, t2 = plane.tangency
    vals = field_(np.array([t1, t2]), np.array([z, z]))
    return float(abs(vals[0] - vals[1]))


def _trig_interpolant(theta: np.ndarray, values: np.ndarray):
    """Trigonometric interpolant of equispaced periodic samples (columns of values)."""
    n = theta.size
    coef = np.fft.fft(values, axis=0) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        # split the Nyquist term so the interpolant is real-symmetric
        coef = np.concatenate([coef, coef[n // 2 : n // 2 + 1]], axis=0)
        coef[n // 2] *= 0.5
        coef[-1] *= 0.5
        k = np.concatenate([k, [n // 2]])
    t0 = theta[0]

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * np.multiply.outer(t - t0, k))
        return phase @ coef

    return evaluate


def _periodic_spline(theta: np.ndarray, values: np.ndarray):
    tt = np.append(theta, theta[0] + TWO_PI)
    vv = np.concatenate([values, values[:1]], axis=0)
    re = CubicSpline(tt, vv.real, bc_type="periodic", axis=0)
    im = CubicSpline(tt, vv.imag, bc_type="periodic", axis=0)
    start = theta[0]

    def evaluate(t):
        t = start + (np.asarray(t, dtype=float) - start) % TWO_PI
        return re(t) + 1j * im(t)

    return evaluate


def fit_from_real_samples(curve: SupportCurve, samples: Mapping[float, tuple], degree: int) -> LineField:
    """Fit each line's real-parameter samples by a polynomial in t and extend in zeta.

    ``samples`` maps theta to (t values, complex f values) where f is sampled
    at lambda(theta) + t * lambda'(theta).  On each line f_theta(zeta) = p((zeta -
    lambda) / lambda'), so the fit extends to complex zeta.  Coefficients are
    interpolated between lines (trigonometrically when the lines are
    equispaced, else by periodic cubic splines).
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if not samples:
        raise InsufficientSamples("no lines given")
    thetas = np.array(sorted(float(t) % TWO_PI for t in samples))
    by_theta = {float(t) % TWO_PI: v for t, v in samples.items()}
    coefs = np.zeros((thetas.size, degree + 1), dtype=complex)
    residuals = {}
    for i, th in enumerate(thetas):
        t, f = (np.asarray(x) for x in by_theta[th])
        t = t.astype(float)
        f = f.astype(complex)
        if np.unique(t).size < degree + 1:
            raise InsufficientSamples(
                f"line theta = {th:.6g} has {np.unique(t).size} distinct samples, need {degree + 1}"
            )
        scale = max(np.max(np.abs(t)), 1e-300)
        vander = np.vander(t / scale, degree + 1, increasing=True)
        cond = np.linalg.cond(vander)
        if cond > MAX_CONDITION:
            raise IllConditionedFit(f"line theta = {th:.6g}: condition number {cond:.3g}")
        a, *_ = np.linalg.lstsq(vander, f, rcond=None)
        residuals[th] = float(np.max(np.abs(vander @ a - f)))
        coefs[i] = a / scale ** np.arange(degree + 1)

    if thetas.size == 1:
        def interp(t):
            return np.broadcast_to(coefs[0], np.shape(t) + coefs[0].shape)
    else:
        steps = np.diff(np.append(thetas, thetas[0] + TWO_PI))
        if np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            interp = _trig_interpolant(thetas, coefs)
        else:
            interp = _periodic_spline(thetas, coefs)

    def oracle(theta, zeta):
        theta, zeta = np.broadcast_arrays(theta, zeta)
        t = (zeta - curve.point(theta)) / curve.unit_tangent(theta)
        c = interp(theta)
        out = np.zeros(t.shape, dtype=complex)
        for k in range(degree, -1, -1):
            out = out * t + c[..., k]
        return out

    return LineField(
        oracle,
        FITTED,
        curve,
        None,
        label=f"fit(degree={degree}, lines={thetas.size})",
        diagnostics={"residuals": residuals, "degree": degree},
    )


def sample_lines(field_: LineField, thetas, ts) -> dict[float, tuple[np.ndarray, np.ndarray]]:
    """Values of a field on the real tangent lines, in the format fit_from_real_samples takes."""
    curve = field_.curve
    ts = np.asarray(ts, dtype=float)
    out = {}
    for th in np.asarray(thetas, dtype=float):
        zeta = curve.line_point(th, ts)
        out[float(th)] = (ts.copy(), field_(np.full(ts.shape, th), zeta))
    return out


def read_samples_csv(path) -> dict[float, tuple[np.ndarray, np.ndarray]]:
    """Read rows theta,t,re_f,im_f grouped by theta."""
    groups: dict[float, list] = defaultdict(list)
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"theta", "t", "re_f", "im_f"} - set(reader.fieldnames or ())
        if missing:
            raise SpecError(f"sample file {path} lacks columns {sorted(missing)}")
        for row in reader:
            groups[float(row["theta"])].append(
                (float(row["t"]), complex(float(row["re_f"]), float(row["im_f"])))
            )
    return {
        th: (np.array([r[0] for r in rows]), np.array([r[1] for r in rows]))
        for th, rows in groups.items()
    }
