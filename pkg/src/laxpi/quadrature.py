"""Quadrature on uniform grids.

``cumulative`` integrates sampled data node-to-node with local 6-point
Lagrange stencils (sixth order, exact for quintics).  ``lagrange_eval``
interpolates sampled data off-grid with local 8-point stencils.
"""
from functools import lru_cache

import numpy as np

STENCIL = 6
INTERP = 8


@lru_cache(maxsize=None)
def _interval_weights(width):
    """Weights ``w[o, k]`` for integrating over [o, o+1] using nodes 0..width-1."""
    x = np.arange(width, dtype=float)
    V = np.vander(x, width, increasing=True).T
    W = np.empty((width - 1, width))
    for o in range(width - 1):
        rhs = np.array([((o + 1) ** (p + 1) - o ** (p + 1)) / (p + 1) for p in range(width)])
        W[o] = np.linalg.solve(V, rhs)
    return W


@lru_cache(maxsize=64)
def _cumulative_plan(n):
    width = min(STENCIL, n + 1)
    W = _interval_weights(width)
    i = np.arange(n)
    j0 = np.clip(i - (width // 2 - 1), 0, n + 1 - width)
    idx = j0[:, None] + np.arange(width)[None, :]
    w = W[i - j0]
    idx.setflags(write=False)
    w.setflags(write=False)
    return idx, w


def cell_integrals(y, h):
    """Integrals of the interpolant over each of the n grid cells; ``y`` has
    shape ``(n+1, ...)``."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0] - 1
    if n < 1:
        return np.zeros((0,) + y.shape[1:])
    idx, w = _cumulative_plan(n)
    return h * np.einsum("ik,ik...->i...", w, y[idx])


def cumulative(y, h):
    """Node values of ``int_{t_0}^{t_j} y``; first entry is exactly zero."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    if y.shape[0] > 1:
        np.cumsum(cell_integrals(y, h), axis=0, out=out[1:])
    return out


def total(y, h):
    return cell_integrals(y, h).sum(axis=0)


def lagrange_eval(samples, a, h, t):
    """Evaluate the local degree-7 interpolant of ``samples`` at times ``t``."""
    samples = np.asarray(samples, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = samples.shape[0] - 1
    width = min(INTERP, n + 1)
    u = (t - a) / h
    r = np.round(u)
    u = np.where(np.abs(u - r) < 1e-9, r, u)  # snap to nodes so they reproduce exactly
    i = np.clip(np.floor(u).astype(int), 0, max(n - 1, 0))
    j0 = np.clip(i - (width // 2 - 1), 0, n + 1 - width)
    x = u - j0
    L = np.ones((t.size, width))
    for k in range(width):
        for m in range(width):
            if m != k:
                L[:, k] *= (x - m) / (k - m)
    idx = j0[:, None] + np.arange(width)[None, :]
    return np.einsum("tk,tk...->t...", L, samples[idx])


def simpson_cells(f, knots):
    """Simpson's rule on each cell between consecutive ``knots`` using the
    cell midpoint; ``f`` maps a 1-d time array to values ``(m, ...)``."""
    knots = np.asarray(knots, dtype=float)
    left, right = knots[:-1], knots[1:]
    mid = 0.5 * (left + right)
    fl, fm, fr = f(left), f(mid), f(right)
    w = ((right - left) / 6.0).reshape((-1,) + (1,) * (fl.ndim - 1))
    return w * (fl + 4.0 * fm + fr)
