"""Nystrom discretization of the Mercer operator T_F and its uses.

(T_F f)(x) = int_0^a f(y) F(x - y) dy on L^2(0, a).  The midpoint rule keeps
the discrete trace exactly equal to a (diagonal entries are F(0) = 1 and the
weights sum to a), which is what the trace identity check relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .kernels import EPS_PSD, DomainError, PdKernel
from .quadrature import exp_kernel_apply


@dataclass(frozen=True)
class NystromConfig:
    node_count: int = 400
    rule: str = "midpoint"
    symmetrize: bool = True

    def __post_init__(self):
        if self.node_count < 16:
            raise ValueError("node_count must be >= 16")
        if self.rule not in ("midpoint",):
            raise ValueError(f"unknown quadrature rule '{self.rule}'")


@dataclass(frozen=True)
class MercerDecomposition:
    """Quadrature nodes/weights plus the discrete spectrum of T_F.

    ``eigenfunctions[:, n]`` holds xi_n at the nodes, L^2-orthonormal under
    the quadrature weights.
    """

    kernel: PdKernel
    nodes: np.ndarray
    weights: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.eigenvalues)

    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))

    def eigenfunction_at(self, n: int, x) -> np.ndarray:
        """Nystrom extension xi_n(x) = (1/lam_n) sum_j w_j F(x - x_j) xi_n(x_j)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        K = self.kernel(x[:, None] - self.nodes[None, :])
        return (K * (self.weights * self.eigenfunctions[:, n])[None, :]).sum(axis=1) \
            / self.eigenvalues[n]

    def coefficients(self, values_at_nodes: np.ndarray, m: int) -> np.ndarray:
        """<xi_n, h>_2 for n < m by nodal quadrature."""
        if m > self.rank:
            raise ValueError(f"rank {m} exceeds available rank {self.rank}")
        return (self.eigenfunctions[:, :m].conj().T
                @ (self.weights * values_at_nodes))

    def to_csv_rows(self):
        return [(n + 1, lam) for n, lam in enumerate(self.eigenvalues)]

    def to_json(self, top: Optional[int] = None) -> str:
        import json
        m = self.rank if top is None else min(top, self.rank)
        return json.dumps({"eigenvalues": self.eigenvalues[:m].tolist(),
                           "trace": self.trace(),
                           "node_count": len(self.nodes)})

    def eigenfunction_table(self, indices, xs) -> list[tuple]:
        """Plot rows (x, xi_{n1}(x), xi_{n2}(x), ...) via Nystrom extension."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        cols = [self.eigenfunction_at(n, xs) for n in indices]
        return [tuple([x] + [float(np.real(c[i])) for c in cols])
                for i, x in enumerate(xs)]


def discretize(kernel: PdKernel, cfg: NystromConfig = NystromConfig()) -> MercerDecomposition:
    """Symmetrized midpoint Nystrom matrix sqrt(w) F(x_i - x_j) sqrt(w),
    diagonalized; eigenvectors are un-symmetrized to node samples."""
    n = cfg.node_count
    a = kernel.half_width
    h = a / n
    nodes = (np.arange(n) + 0.5) * h
    weights = np.full(n, h)
    K = kernel(nodes[:, None] - nodes[None, :]).real
    if cfg.symmetrize:
        A = h * K
        A = 0.5 * (A + A.T)
        lam, U = np.linalg.eigh(A)
        xi = U / np.sqrt(h)
    else:
        lam, U = np.linalg.eig(K * h)
        lam = lam.real
        xi = U.real
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    xi = xi[:, order]
    if lam[-1] < -EPS_PSD:
        raise DomainError(
            f"kernel '{kernel.family}' rejected: Nystrom matrix has eigenvalue "
            f"{lam[-1]:.3e} < -{EPS_PSD}")
    return MercerDecomposition(kernel, nodes, weights, lam, xi)


def kernel_reconstruct(dec: MercerDecomposition, N: int, x: float, y: float) -> complex:
    """Truncated Mercer expansion sum_{n<N} lam_n xi_n(x) conj(xi_n(y));
    off-node points use the Nystrom extension."""
    if N > dec.rank:
        raise ValueError("N exceeds rank")
    x = float(x)
    y = float(y)

    def samples(t):
        idx = np.where(np.isclose(dec.nodes, t, rtol=0, atol=1e-14))[0]
        if len(idx):
            return dec.eigenfunctions[idx[0], :N]
        K = dec.kernel(t - dec.nodes)
        return (K * dec.weights) @ dec.eigenfunctions[:, :N] / dec.eigenvalues[:N]

    fx = samples(x)
    fy = samples(y)
    return complex(np.sum(dec.eigenvalues[:N] * fx * np.conj(fy)))


def hf_inner_via_inverse(h_nodes: np.ndarray, k_nodes: np.ndarray,
                         dec: MercerDecomposition, m: int) -> complex:
    """<h, k>_{H_F} ~ sum_{n<m} lam_n^{-1} <h, xi_n>_2 <xi_n, k>_2 (spectrally
    truncated inverse; T_F^{-1} is never formed)."""
    ch = dec.coefficients(np.asarray(h_nodes), m)
    ck = dec.coefficients(np.asarray(k_nodes), m)
    return complex(np.sum(np.conj(ch) * ck / dec.eigenvalues[:m]))


def hf_norm_sq_via_inverse(h_nodes: np.ndarray, dec: MercerDecomposition, m: int) -> float:
    return hf_inner_via_inverse(h_nodes, h_nodes, dec, m).real


def volterra_apply(f: Callable[[np.ndarray], np.ndarray], n: int = 800,
                   grid: Optional[np.ndarray] = None):
    """T_F f for the exp kernel via its Volterra + rank-one structure:

        (T_F f)(x) = 2 int_0^x sinh(y - x) f(y) dy + e^x int_0^1 e^{-y} f(y) dy
                   = e^{-x} int_0^x e^y f dy + e^x int_x^1 e^{-y} f dy.

    Returns (grid, values) on [0, 1]; the integration cells always cover the
    full interval even when the evaluation grid does not touch 0 or 1.
    """
    if grid is None:
        grid = np.linspace(0.0, 1.0, n + 1)
        values, _ = exp_kernel_apply(grid, f)
        return grid, values
    grid = np.asarray(grid, dtype=float)
    full = np.union1d(np.array([0.0, 1.0]), grid)
    values, _ = exp_kernel_apply(full, f)
    idx = np.searchsorted(full, grid)
    return grid, values[idx]


def apply_operator(kernel: PdKernel, f: Callable, xs) -> np.ndarray:
    """Oracle-grade (T_F f)(x) by adaptive quadrature with the kink split
    at y = x; independent of both the Nystrom matrix and the Volterra path."""
    a = kernel.half_width
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.empty(len(xs), dtype=complex)
    for i, x in enumerate(xs):
        re = quad(lambda y: (kernel(x - y) * f(y)).real, 0.0, a,
                  points=[x] if 0 < x < a else None, limit=200)[0]
        im = quad(lambda y: (kernel(x - y) * f(y)).imag, 0.0, a,
                  points=[x] if 0 < x < a else None, limit=200)[0]
        out[i] = re + 1j * im
    return out if np.max(np.abs(out.imag)) > 1e-13 else out.real


def _fd_second_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """4th-order central second derivative on the interior (2 cells trimmed
    at each end)."""
    v = values
    return (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)


@dataclass(frozen=True)
class GreensInverseResult:
    grid: np.ndarray            # interior grid (two cells trimmed per side)
    values: np.ndarray          # recovered phi
    boundary_ok: bool
    boundary_residuals: tuple[float, float]


def greens_inverse_apply(grid, values: Optional[np.ndarray] = None,
                         dvalues: Optional[np.ndarray] = None,
                         kernel_family: str = "exp",
                         bc_tol: float = 1e-6) -> GreensInverseResult:
    """Invert T_F on its range: phi = (f - f'')/2 for the exp kernel,
    phi = -f''/2 for the triangle; second derivative by 4th-order
    differences on the interior grid.

    Accepts either (grid, values, dvalues) arrays or a Sampled element as
    the first argument.  The exp boundary conditions f(0) = f'(0),
    f(a) = -f'(a) are checked and flagged, not enforced.
    """
    if values is None:          # Sampled element passed directly
        el = grid
        grid, values, dvalues = el.grid, el.values, el.dvalues
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values)
    h = grid[1] - grid[0]
    fpp = _fd_second_derivative(values, h)
    inner = grid[2:-2]
    if kernel_family == "exp":
        phi = 0.5 * (values[2:-2] - fpp)
    elif kernel_family in ("triangle", "bsplinex:2"):
        phi = -0.5 * fpp
    else:
        raise DomainError(f"no Green's inverse rule for kernel '{kernel_family}'")
    if dvalues is not None:
        r0 = abs(values[0] - dvalues[0])
        r1 = abs(values[-1] + dvalues[-1])
        scale = max(1.0, float(np.max(np.abs(values))))
        ok = (r0 < bc_tol * scale and r1 < bc_tol * scale) \
            if kernel_family == "exp" else True
        return GreensInverseResult(inner, phi, ok, (float(r0), float(r1)))
    return GreensInverseResult(inner, phi, True, (np.nan, np.nan))
