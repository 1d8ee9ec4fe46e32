"""Composite quadrature rules on piecewise-smooth integrands.

Every integrand in this package is smooth between a known, finite set of
cut points (support edges, density kinks, kernel jumps).  The helpers here
build node/weight arrays that never straddle a cut.
"""
from __future__ import annotations

import numpy as np

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def merge_cuts(lo: float, hi: float, *extra) -> np.ndarray:
    """Sorted unique cut points in ``[lo, hi]`` including both ends."""
    pts = [lo, hi]
    for e in extra:
        pts.extend(np.atleast_1d(np.asarray(e, dtype=float)).tolist())
    pts = np.asarray(pts, dtype=float)
    pts = pts[(pts >= lo) & (pts <= hi)]
    pts = np.unique(pts)
    # drop slivers produced by round-off
    keep = np.concatenate(([True], np.diff(pts) > 1e-14 * max(1.0, hi - lo)))
    pts = pts[keep]
    pts[-1] = hi
    return pts


def midpoint_rule(cuts: np.ndarray, nodes_per_unit: int, min_nodes: int = 4):
    """Composite midpoint rule, each interval between cuts subdivided evenly."""
    xs, ws = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        length = b - a
        if length <= 0:
            continue
        m = max(min_nodes, int(np.ceil(nodes_per_unit * length)))
        h = length / m
        xs.append(a + h * (np.arange(m) + 0.5))
        ws.append(np.full(m, h))
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)


def gauss_legendre_rule(cuts: np.ndarray, panels_per_unit: float = 40.0, order: int = 10,
                        graded: tuple = (), levels: int = 30, ratio: float = 0.2):
    """Composite Gauss-Legendre rule.

    Intervals touching a point listed in ``graded`` are split geometrically
    towards that point (up to ``levels`` panels shrinking by ``ratio``), which
    keeps log and square-root endpoint singularities accurate.
    """
    x0, w0 = _gl(order)
    graded = np.asarray(graded, dtype=float)
    panels = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        ga = graded.size and np.any(np.abs(graded - a) <= 1e-12)
        gb = graded.size and np.any(np.abs(graded - b) <= 1e-12)
        m = max(1, int(np.ceil(panels_per_unit * (b - a))))
        edges = np.linspace(a, b, m + 1)
        if ga or gb:
            h = (b - a) / m
            offsets = h * ratio ** np.arange(1, levels + 1)
            # deeper levels would put nodes on top of the graded point in floating point
            offsets = offsets[offsets > 1e5 * np.finfo(float).eps * max(1.0, abs(a), abs(b))]
            extra = []
            if ga:
                extra.append(a + offsets)
            if gb:
                extra.append(b - offsets)
            edges = np.unique(np.concatenate([edges, *extra]))
        panels.append(edges)
    if not panels:
        return np.empty(0), np.empty(0)
    xs, ws = [], []
    for edges in panels:
        lo, hi = edges[:-1], edges[1:]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        xs.append((mid[:, None] + half[:, None] * x0[None, :]).ravel())
        ws.append((half[:, None] * w0[None, :]).ravel())
    return np.concatenate(xs), np.concatenate(ws)
