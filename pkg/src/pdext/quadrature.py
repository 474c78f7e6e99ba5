"""Shared quadrature helpers.

Kernels of the form F(x - y) have a kink on the diagonal, so all
kernel integrals here split the integration range at the kink and use
composite Gauss-Legendre panels on the smooth pieces.
"""

from __future__ import annotations

import numpy as np

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gl_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1], cached."""
    if m not in _GL_CACHE:
        _GL_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _GL_CACHE[m]


def panel_nodes(a: float, b: float, n_panels: int, m: int = 4):
    """Nodes and weights of composite m-point Gauss-Legendre on [a, b]."""
    t, w = gl_rule(m)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate(f, a: float, b: float, n_panels: int = 64, m: int = 6,
              split_points=()) -> complex:
    """Composite GL integral of a callable, with optional interior splits."""
    pts = [a] + sorted(p for p in split_points if a < p < b) + [b]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi <= lo:
            continue
        k = max(2, int(np.ceil(n_panels * (hi - lo) / (b - a))))
        x, w = panel_nodes(lo, hi, k, m)
        total = total + np.sum(w * f(x))
    return total


def simpson_weights(n_points: int, h: float) -> np.ndarray:
    """Composite Simpson weights for a uniform grid (odd point count)."""
    if n_points < 3 or n_points % 2 == 0:
        raise ValueError("Simpson rule needs an odd number of points >= 3")
    w = np.ones(n_points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def simpson(values: np.ndarray, grid: np.ndarray):
    """Composite Simpson on a uniform grid; trapezoid fallback on the
    last cell when the point count is even."""
    n = len(grid)
    if n < 2:
        return 0.0
    h = grid[1] - grid[0]
    if n % 2 == 1:
        return np.sum(simpson_weights(n, h) * values, axis=-1)
    head = np.sum(simpson_weights(n - 1, h) * values[..., :-1], axis=-1)
    return head + 0.5 * h * (values[..., -2] + values[..., -1])


def cell_gl_layout(grid: np.ndarray, m: int = 4):
    """Per-cell GL nodes/weights for a uniform grid of cell boundaries.

    Returns (nodes, weights) with shape (n_cells, m); targets on the grid
    then see every cell entirely to their left or right, which keeps the
    |x - y| kink on cell boundaries.
    """
    t, w = gl_rule(m)
    lo = grid[:-1]
    hi = grid[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * t[None, :]
    weights = half[:, None] * w[None, :]
    return nodes, weights


def kernel_apply_on_grid(F, grid: np.ndarray, g, m: int = 4) -> np.ndarray:
    """Evaluate x_i -> integral of F(x_i - y) g(y) dy over the grid span.

    F and g are vectorized callables; every grid point is a cell boundary,
    so the kernel kink at y = x_i never falls inside a panel.  Cost is
    O(n_cells^2 * m) via broadcasting.
    """
    nodes, weights = cell_gl_layout(grid, m)
    gy = g(nodes.ravel()) * weights.ravel()
    diffs = grid[:, None] - nodes.ravel()[None, :]
    return (F(diffs) * gy[None, :]).sum(axis=1)


def exp_kernel_apply(grid: np.ndarray, g, m: int = 6):
    """(T f)(x_i) = int e^{-|x_i-y|} f(y) dy and its x-derivative, O(n m).

    Uses e^{-|x-y|} = e^{-x}e^{y} (y < x), e^{x}e^{-y} (y > x): cumulative
    per-cell GL sums give both the value and the derivative at every grid
    point in one pass.
    """
    nodes, weights = cell_gl_layout(grid, m)
    gv = g(nodes)
    # per-cell integrals of e^{y} g and e^{-y} g, shifted to the cell's
    # left/right edge to avoid overflow for wide grids
    lo = grid[:-1][:, None]
    hi = grid[1:][:, None]
    cell_left = np.sum(weights * np.exp(nodes - hi) * gv, axis=1)
    cell_right = np.sum(weights * np.exp(lo - nodes) * gv, axis=1)
    n = len(grid)
    left = np.zeros(n, dtype=np.result_type(gv.dtype, float))
    right = np.zeros_like(left)
    # left[i] = int_0^{x_i} e^{y-x_i} g dy ; right[i] = int_{x_i}^a e^{x_i-y} g dy
    decay = np.exp(grid[:-1] - grid[1:])
    for i in range(1, n):
        left[i] = left[i - 1] * decay[i - 1] + cell_left[i - 1]
    for i in range(n - 2, -1, -1):
        right[i] = right[i + 1] * decay[i] + cell_right[i]
    values = left + right
    derivs = -left + right
    return values, derivs
