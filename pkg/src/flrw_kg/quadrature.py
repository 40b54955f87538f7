"""Composite Gauss rules on [0, 1] graded toward the light-cone end s = 1.

Kernels vary on the scale e^b near the cone while the integration range is
e^t - e^b, so the relative layer width shrinks like e^{-(t-b)}.  Panels are
laid out geometrically toward s = 1 down to that width; refinement splits
every panel uniformly, which doubles the node count without ever asking for
high-order rules.
"""

from functools import lru_cache

import numpy as np
from scipy import special


@lru_cache(maxsize=64)
def _legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


@lru_cache(maxsize=64)
def _jacobi(n, a):
    # weight (1+x)^a on [-1, 1] -> u^a on [0, 1]
    x, w = special.roots_jacobi(n, 0.0, a)
    return (x + 1) / 2, w / 2 ** (a + 1)


def gauss_legendre(n, lo=0.0, hi=1.0):
    x, w = _legendre(n)
    return lo + (hi - lo) * x, (hi - lo) * w


def breakpoints(layer, ratio=4.0):
    """Panel edges on [0, 1], refined geometrically toward 1 down to ``layer``."""
    edges = [1.0]
    d = float(layer)
    while d < 0.5:
        edges.append(1.0 - d)
        d *= ratio
    edges.append(0.0)
    return np.array(edges[::-1])


def graded_rule(n, layer=1.0, level=0, power=0.0):
    """Nodes and weights with sum(w g(s)) ~ int_0^1 s^power g(s) ds.

    ``level`` splits each panel into 2**level equal pieces.  With
    ``power != 0`` the first piece uses Gauss-Jacobi so that the s^power
    endpoint behaviour is integrated exactly.
    """
    edges = breakpoints(layer)
    if level:
        fine = [np.linspace(lo, hi, 2 ** level + 1)[:-1] for lo, hi in zip(edges[:-1], edges[1:])]
        edges = np.append(np.concatenate(fine), 1.0)
    xs, ws = [], []
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        if i == 0 and power != 0.0:
            u, wu = _jacobi(n, float(power))
            xs.append(lo + (hi - lo) * u)
            ws.append(wu * (hi - lo) ** (power + 1))
        else:
            u, wu = _legendre(n)
            x = lo + (hi - lo) * u
            xs.append(x)
            ws.append(wu * (hi - lo) * (x ** power if power else 1.0))
    return np.concatenate(xs), np.concatenate(ws)


def uniform_panels(n, lo, hi, panels):
    """Composite Gauss-Legendre with ``panels`` equal pieces of [lo, hi]."""
    edges = np.linspace(lo, hi, panels + 1)
    x, w = _legendre(n)
    nodes = (edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * x[None, :]).ravel()
    weights = ((edges[1:] - edges[:-1])[:, None] * w[None, :]).ravel()
    return nodes, weights


def lagrange_matrix(nodes, targets):
    """Barycentric interpolation matrix from ``nodes`` to ``targets``."""
    nodes = np.asarray(nodes, float)
    targets = np.asarray(targets, float)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bw = 1.0 / np.prod(diff, axis=1)
    d = targets[:, None] - nodes[None, :]
    exact = np.isclose(d, 0.0, atol=1e-14)
    d[exact] = 1.0
    mat = bw[None, :] / d
    mat /= mat.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    if np.any(rows):
        mat[rows] = exact[rows].astype(float)
    return mat
