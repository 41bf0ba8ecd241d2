"""Quadrature rules used throughout the package.

Two rules cover everything here: tensor Gauss-Legendre on chart rectangles
and the uniform trapezoid rule for periodic integrands, which is spectrally
accurate for smooth periodic data.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=128)
def _gl_cached(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def gauss_legendre(order: int, a: float, b: float):
    """Nodes and weights for Gauss-Legendre of the given order on [a, b]."""
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    x, w = _gl_cached(int(order))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def tensor_grid(order_u: int, order_v: int, dom):
    """Tensor Gauss-Legendre grid on the rectangle dom = (u0, u1, v0, v1).

    Returns flattened node arrays U, V and the combined weight array W.
    """
    u0, u1, v0, v1 = dom
    xu, wu = gauss_legendre(order_u, u0, u1)
    xv, wv = gauss_legendre(order_v, v0, v1)
    U, V = np.meshgrid(xu, xv, indexing="ij")
    W = np.outer(wu, wv)
    return U.ravel(), V.ravel(), W.ravel()


def periodic_trapezoid(fn, period: float, nodes: int, rtol: float = 1e-10,
                       max_doublings: int = 6):
    """Integrate a smooth periodic vector-valued function over one period.

    Doubles the node count until two successive levels agree to ``rtol``
    relative; returns the finer value.  ``fn`` must accept an array of
    angles and return values whose leading axis matches it.
    """
    m = int(nodes)
    theta = np.arange(m) * (period / m)
    val = np.sum(fn(theta), axis=0) * (period / m)
    for _ in range(max_doublings):
        m *= 2
        theta = np.arange(m) * (period / m)
        new = np.sum(fn(theta), axis=0) * (period / m)
        scale = max(float(np.max(np.abs(new))), 1.0)
        if np.all(np.abs(new - val) <= rtol * scale):
            return new
        val = new
    return val
