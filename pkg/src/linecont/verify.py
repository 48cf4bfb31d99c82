"""Quick end-to-end smoke checks behind ``linecont verify``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curve import circle, ellipse
from .extend import extend
from .linedata import corrupt, from_ground_truth, polynomial
from .rangetest import range_test
from .slices import SWAP, classify_point2, involution, k_slice, slice_index


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _tangent_unit():
    curve = ellipse(2.0, 1.0)
    theta = np.linspace(0, 2 * np.pi, 257)
    err = float(np.max(np.abs(np.abs(curve.unit_tangent(theta)) - 1.0)))
    return err <= 1e-15, f"max ||T| - 1| = {err:.3g}"


def _index():
    idx = [slice_index(circle(1.0), 3.0 * np.exp(1j * t)) for t in (0.1, 2.0, 4.0)]
    return all(i == -2 for i in idx), f"indices {idx}"


def _kc_circle():
    ks = k_slice(circle(1.0), 25.0)
    err = max(float(np.max(np.abs(np.abs(lp.position) - 5.0))) for lp in ks.loops)
    return err <= 1e-10, f"max ||z| - 5| = {err:.3g}"


def _extend_zw():
    field_ = from_ground_truth(circle(1.0), polynomial({(1, 1): 1.0}))
    pts = [(5.0, 0.0), (0.0, 5.0), (2.0 + 1j, 10.0 / (2.0 + 1j) * np.exp(0.7j))]
    err = max(abs(extend(field_, z, w).value - z * w) for z, w in pts)
    return err <= 1e-10, f"max |F - zw| = {err:.3g}"


def _swap():
    curve = circle(1.0)
    pts = [(5.0, 0.0), (0.0, 5.0), (0.0, 0.0)]
    ok = all(
        classify_point2(curve, *involution(z, w)).label == SWAP[classify_point2(curve, z, w).label]
        for z, w in pts
    )
    return ok, "sigma swaps OmegaPlus and OmegaMinus"


def _moments():
    base = from_ground_truth(circle(1.0), polynomial({(1, 1): 1.0}))
    zs = [3.0, 3j]
    good = range_test(base, zs, n_max=4)
    bad = range_test(corrupt(base, 1e-3), zs, n_max=4)
    ok = good.aggregate_pass and not bad.aggregate_pass
    return ok, f"consistent max {good.max_normalized:.3g}, corrupted max {bad.max_normalized:.3g}"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "unit-tangent": _tangent_unit,
    "slice-index": _index,
    "kc-degenerate": _kc_circle,
    "extend-zw": _extend_zw,
    "involution": _swap,
    "moments": _moments,
}


def run_checks() -> list[Check]:
    out = []
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, reported like the others
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(Check(name, bool(ok), detail))
    return out
