"""Acceptance criteria 1-8, each with its tolerance and runtime budget.

Every test logs one line "criterion N: PASS|FAIL ..." (shown in the pytest
terminal summary).  Run this file directly to print the lines without pytest.
"""
import time

import numpy as np
import pytest

from linecont.curve import circle, ellipse
from linecont.errors import BoundaryBand, OnCurveError, TooCloseToContour
from linecont.extend import (
    SamplePlan,
    cauchy_annulus,
    cauchy_minus,
    cauchy_plus,
    global_fit,
    sample_region,
)
from linecont.linedata import corrupt, exponential, from_ground_truth, polynomial
from linecont.rangetest import TOL_M, boundary_shrink_check, kc_moment_cancellation, moments, normal_approach
from linecont.slices import (
    OMEGA_MINUS,
    OMEGA_PLUS,
    OMEGA_ZERO,
    ON_M,
    SWAP,
    classify_point2,
    gamma_point,
    involution,
    k_slice,
    slice_index,
    winding_number,
)

SEED = 20240601


def _curves():
    return circle(1.0), ellipse(2.0, 1.0)


# --- criteria ---------------------------------------------------------------


def criterion_1():
    rng = np.random.default_rng(SEED)
    worst_unit, worst_fd, worst_g = 0.0, 0.0, 0.0
    for curve in _curves():
        theta = rng.uniform(0, 2 * np.pi, 10_000)
        worst_unit = max(worst_unit, float(np.max(np.abs(np.abs(curve.unit_tangent(theta)) - 1.0))))
        d = 1e-6
        fd = (curve.point(theta + d) - curve.point(theta - d)) / (2 * d)
        exact = 1j * curve.radius_of_curvature(theta) * np.exp(1j * theta)
        worst_fd = max(worst_fd, float(np.max(np.abs(fd - exact) / np.abs(exact))))
        z = rng.uniform(-5, 5, 10_000) * curve.m + 1j * rng.uniform(-5, 5, 10_000) * curve.m
        via_tangent = ((z - curve.point(theta)) / curve.unit_tangent(theta)).imag
        err = np.abs(curve.g(z, theta) - via_tangent) / (1 + np.abs(z))
        worst_g = max(worst_g, float(np.max(err)))
    eps = np.finfo(float).eps
    # |e^{i theta}| is 1 to within one rounding of the complex modulus
    ok = worst_unit <= eps and worst_fd <= 1e-6 and worst_g <= 16 * eps
    return ok, f"||T|-1| {worst_unit:.1e}, d(lambda) fd rel {worst_fd:.1e}, g-identity {worst_g:.1e}"


def criterion_2():
    rng = np.random.default_rng(SEED)
    worst, indices = 0.0, []
    for curve in _curves():
        z = rng.uniform(-20, 20, 10_000) + 1j * rng.uniform(-20, 20, 10_000)
        theta = rng.uniform(0, 2 * np.pi, 10_000)
        tb = np.conj(curve.unit_tangent(theta))
        excess = np.abs(gamma_point(curve, z, theta) - tb ** 2 * z) - 2 * curve.m
        worst = max(worst, float(np.max(excess)))
        r = rng.uniform(2.5, 6.0, 100) * curve.m
        phi = rng.uniform(0, 2 * np.pi, 100)
        indices += [slice_index(curve, complex(a)) for a in r * np.exp(1j * phi)]
    ok = worst <= 1e-12 and all(i == -2 for i in indices) and len(indices) == 200
    return ok, f"max(|w - conj(T)^2 z| - 2m) = {worst:.2e}, index -2 on {indices.count(-2)}/200"


def criterion_3():
    curve = circle(1.0)
    ks = k_slice(curve, 25.0)
    mod = max(float(np.max(np.abs(np.abs(lp.position) - 5.0))) for lp in ks.loops)
    conj = max(float(np.max(np.abs(25.0 / lp.position - np.conj(lp.position)))) for lp in ks.loops)
    kg = k_slice(curve, 25j)
    a, b = (lp.position for lp in kg.loops)
    gap = float(np.min(np.abs(a[:, None] - b[None, :])))
    band = max(float(np.max(np.abs(np.abs(lp.position) - 5.0))) for lp in kg.loops)
    nested = winding_number(kg.outer, kg.inner.position[0]) != 0 and winding_number(kg.inner, 0.0) != 0
    ok = mod <= 1e-10 and conj <= 1e-10 and gap > 0 and band <= 2 * curve.m and nested
    return ok, (f"c=25: ||z|-5| {mod:.1e}, |w-conj z| {conj:.1e}; "
                f"c=25i: nested {nested}, gap {gap:.3f}, max ||z|-5| {band:.3f} <= 2m")


TRUTHS = {
    "1": (polynomial({(0, 0): 1.0}), 1e-10),
    "z": (polynomial({(1, 0): 1.0}), 1e-10),
    "w": (polynomial({(0, 1): 1.0}), 1e-10),
    "zw": (polynomial({(1, 1): 1.0}), 1e-10),
    "z^2+3w^2": (polynomial({(2, 0): 1.0, (0, 2): 3.0}), 1e-10),
    "exp(0.3z+0.2w)": (exponential(0.3, 0.2), 1e-6),
}


def criterion_4():
    curve = ellipse(2.0, 1.0)
    rng = np.random.default_rng(SEED)
    ops = {OMEGA_MINUS: cauchy_minus, OMEGA_PLUS: cauchy_plus, OMEGA_ZERO: cauchy_annulus}
    points = {region: sample_region(curve, region, 50, rng) for region in ops}
    worst = {}
    ok = True
    for name, (truth, tol) in TRUTHS.items():
        field_ = from_ground_truth(curve, truth)
        for region, op in ops.items():
            for z, w in points[region]:
                exact = truth(z, w)
                rel = abs(op(field_, z, w).value - exact) / abs(exact)
                worst[name] = max(worst.get(name, 0.0), rel)
        ok &= worst[name] <= tol
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return ok, f"max rel error over 3x50 points: {detail}"


def criterion_5():
    curve = ellipse(2.0, 1.0)
    rng = np.random.default_rng(SEED)
    r = rng.uniform(1.2, 4.0, 20) * curve.m
    zs = r * np.exp(1j * rng.uniform(0, 2 * np.pi, 20))
    consistent = 0.0
    for truth in (exponential(0.3, 0.2), polynomial({(1, 1): 1.0})):
        field_ = from_ground_truth(curve, truth)
        consistent = max(consistent, max(moments(field_, z, 8).max_normalized for z in zs))
    bad = corrupt(from_ground_truth(curve, exponential(0.3, 0.2)), 1e-3)
    detected = max(moments(bad, z, 8).max_normalized for z in zs)
    margin = detected / TOL_M
    approach = normal_approach(curve, 0.4, 10)
    shrink = boundary_shrink_check(bad, approach)
    ratio = shrink[-1] / shrink[0]
    floor = boundary_shrink_check(from_ground_truth(curve, polynomial({(1, 1): 1.0})), approach)
    ok = consistent <= 1e-8 and margin >= 10 and ratio <= 1e-2 and floor.max() <= 1e-12
    return ok, (f"consistent max {consistent:.1e}; corrupted max {detected:.1e} = {margin:.0f}x tol_m; "
                f"shrink final/initial {ratio:.1e} (consistent level {floor.max():.1e})")


def criterion_6():
    curve = circle(1.0)
    etas = (np.pi / 2) * 2.0 ** -np.arange(9)
    good = kc_moment_cancellation(from_ground_truth(curve, exponential(0.0, 0.2)), 25.0, etas)
    bad = kc_moment_cancellation(corrupt(from_ground_truth(curve, polynomial({(1, 1): 1.0})), 1e-3),
                                 25.0, etas)
    g = [s.normalized for s in good]
    b = [s.normalized for s in bad]
    ok = g[-1] <= 1e-3 and b[-1] >= 0.5 * b[0] and b[-1] >= 1e-6
    return ok, (f"consistent final {g[-1]:.1e} (max {max(g):.1e}); "
                f"corrupted {b[0]:.2e} -> {b[-1]:.2e}")


def _random_pair(rng, m):
    z = rng.uniform(0, 4 * m) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    w = rng.uniform(0, 4 * m) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return complex(z), complex(w)


def _swap_holds(curve, rng, n):
    """(agreements, labels seen) over n off-band random points."""
    agree, seen = 0, {}
    while sum(seen.values()) < n:
        z, w = _random_pair(rng, curve.m)
        try:
            lab = classify_point2(curve, z, w).label
            if lab == ON_M:
                continue
            swapped = classify_point2(curve, *involution(z, w)).label
        except (TooCloseToContour, BoundaryBand, OnCurveError):
            continue
        seen[lab] = seen.get(lab, 0) + 1
        agree += swapped == SWAP[lab]
    return agree, seen


def _fast_path_agrees(curve, rng, n):
    agree = 0
    for _ in range(n):
        z, w = _random_pair(rng, curve.m)
        sign = rng.choice([-1.0, 1.0])
        # push |w| - |z| beyond 2m in the chosen direction
        if sign > 0:
            w = w / abs(w) * (abs(z) + 2 * curve.m * rng.uniform(1.001, 2.0))
        else:
            z = z / abs(z) * (abs(w) + 2 * curve.m * rng.uniform(1.001, 2.0))
        fast = classify_point2(curve, z, w)
        slow = classify_point2(curve, z, w, fast=False)
        expected = OMEGA_PLUS if sign > 0 else OMEGA_MINUS
        agree += fast.fast_path and fast.label == slow.label == expected
    return agree


def criterion_7():
    circ, ell = _curves()
    rng = np.random.default_rng(SEED)
    a1, seen1 = _swap_holds(circ, rng, 1000)
    a2, seen2 = _swap_holds(ell, rng, 150)
    f1 = _fast_path_agrees(circ, rng, 100)
    f2 = _fast_path_agrees(ell, rng, 100)
    all_regions = all(seen1.get(r, 0) > 0 for r in (OMEGA_MINUS, OMEGA_PLUS, OMEGA_ZERO))
    ok = a1 == 1000 and a2 == 150 and f1 == 100 and f2 == 100 and all_regions
    counts = "/".join(str(seen1.get(r, 0)) for r in (OMEGA_MINUS, OMEGA_PLUS, OMEGA_ZERO))
    return ok, (f"swap {a1}/1000 circle (-/+/0 = {counts}), {a2}/150 ellipse; "
                f"fast path agrees {f1}/100, {f2}/100")


def criterion_8():
    curve = ellipse(2.0, 1.0)
    truth = polynomial({(2, 0): 1.0, (1, 1): 1.0})
    fit = global_fit(from_ground_truth(curve, truth), 2, SamplePlan(n_samples=200, seed=SEED))
    coef_err = max(abs(c - truth.terms.get(jk, 0.0)) for jk, c in fit.coefficients.items())
    ok = coef_err <= 1e-8 and fit.holdout_residual <= 1e-8
    return ok, (f"max coefficient error {coef_err:.1e}, held-out residual {fit.holdout_residual:.1e} "
                f"({fit.n_holdout} points), condition {fit.condition:.1f}")


CRITERIA = {
    1: (criterion_1, 1.0, "curve identities"),
    2: (criterion_2, 5.0, "2m estimate and index"),
    3: (criterion_3, 1.0, "K_c degeneration"),
    4: (criterion_4, 30.0, "extension oracle equivalence"),
    5: (criterion_5, 10.0, "moment conditions"),
    6: (criterion_6, 10.0, "K_c moment cancellation"),
    7: (criterion_7, 5.0, "symmetry and classification"),
    8: (criterion_8, 10.0, "global fit"),
}


def evaluate(n):
    fn, limit, name = CRITERIA[n]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    passed = bool(ok) and elapsed < limit
    line = (f"criterion {n}: {'PASS' if passed else 'FAIL'} {name}: {detail} "
            f"[{elapsed:.2f} s < {limit:g} s]")
    return passed, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, acceptance_log):
    passed, line = evaluate(n)
    acceptance_log(line)
    print(line)
    assert passed, line


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        print(evaluate(n)[1], flush=True)
