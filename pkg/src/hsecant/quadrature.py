"""Composite Gauss-Legendre rules on explicit panels."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def panel_nodes(edges, order: int = 16):
    """Nodes and weights of a composite rule over consecutive ``edges``.

    Returns arrays of shape ``(len(edges) - 1, order)``.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return mid + half * x, half * w


def panel_integrals(f, edges, order: int = 16) -> np.ndarray:
    """Integral of vectorised ``f`` over each panel ``[edges[i], edges[i+1]]``."""
    nodes, weights = panel_nodes(edges, order)
    return (f(nodes) * weights).sum(axis=1)


def refine_edges(points, max_width: float) -> np.ndarray:
    """Sorted union of ``points`` and extra nodes so no gap exceeds ``max_width``."""
    pts = np.unique(np.asarray(points, dtype=float))
    gaps = np.diff(pts)
    counts = np.maximum(np.ceil(gaps / max_width).astype(np.int64), 1)
    if np.all(counts == 1):
        return pts
    starts = np.repeat(pts[:-1], counts)
    steps = np.repeat(gaps / counts, counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return np.append(starts + offsets * steps, pts[-1])
