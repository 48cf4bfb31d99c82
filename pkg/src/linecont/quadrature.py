"""Quadrature rules for integrals over theta-parametrized loops."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .curve import TWO_PI

MAX_DEPTH = 16


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges: np.ndarray, order: int):
    """Nodes and weights of composite Gauss-Legendre on consecutive panels."""
    x, w = gauss_legendre(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * x).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def bisect_edges(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(edges.size + mids.size)
    out[0::2] = edges
    out[1::2] = mids
    return out


def adaptive_edges(a: float, b: float, panels: int, position, target=None, ratio: float = 0.5):
    """Uniform panels on [a, b], split near ``target`` until each panel is short
    compared with its distance to the target (length <= dist / ratio)."""
    edges = np.linspace(a, b, panels + 1)
    if target is None:
        return edges
    probe = np.linspace(0.0, 1.0, 9)
    for _ in range(MAX_DEPTH):
        lo, hi = edges[:-1], edges[1:]
        pts = position(lo[:, None] + (hi - lo)[:, None] * probe)
        length = np.sum(np.abs(np.diff(pts, axis=1)), axis=1)
        dist = np.min(np.abs(pts - target), axis=1)
        split = dist < ratio * length
        if not split.any():
            break
        mids = 0.5 * (lo[split] + hi[split])
        edges = np.sort(np.concatenate([edges, mids]))
    return edges


def arc_integral(integrand, edges: np.ndarray, order: int):
    """Composite Gauss-Legendre value and |I(N) - I(2N)| from halving every panel."""
    nodes, weights = panel_rule(edges, order)
    coarse = np.sum(weights * integrand(nodes))
    nodes, weights = panel_rule(bisect_edges(edges), order)
    fine = np.sum(weights * integrand(nodes))
    return complex(coarse), float(abs(coarse - fine))


def periodic_integral(integrand, n: int):
    """Trapezoid rule over one period with n nodes, and |I(n) - I(2n)|."""
    theta = np.linspace(0.0, TWO_PI, n, endpoint=False)
    coarse = np.sum(integrand(theta)) * TWO_PI / n
    theta = np.linspace(0.0, TWO_PI, 2 * n, endpoint=False)
    fine = np.sum(integrand(theta)) * TWO_PI / (2 * n)
    return complex(coarse), float(abs(coarse - fine))
