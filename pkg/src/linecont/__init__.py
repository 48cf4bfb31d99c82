"""Holomorphic extension of line data from tangent lines of a convex curve.

Per-line entire functions f_theta, given on the complexified tangent lines of
a strictly convex curve, define a CR function on the Levi-flat hypersurface M
in C^2.  This package builds the slices of M, extends the data off M by
Cauchy-type integrals, and tests the moment conditions that decide whether
the data come from one entire function.
"""
from .curve import SupportCurve, circle, ellipse, fourier, parse_curve
from .errors import LineContError
from .extend import (
    DEFAULT_CONFIG,
    ExtensionResult,
    GlobalFit,
    QuadratureConfig,
    SamplePlan,
    cauchy_annulus,
    cauchy_minus,
    cauchy_plus,
    extend,
    global_fit,
    sample_region,
)
from .linedata import (
    GroundTruth,
    LineField,
    corrupt,
    exponential,
    fit_from_real_samples,
    from_ground_truth,
    parse_truth,
    polynomial,
)
from .rangetest import MomentReport, kc_moment_cancellation, moments, range_test
from .slices import (
    OMEGA_MINUS,
    OMEGA_PLUS,
    OMEGA_ZERO,
    ON_M,
    build_gamma,
    classify_point2,
    involution,
    k_slice,
    slice_index,
    z_slice,
)

__version__ = "0.1.0"
