"""Elements of the reproducing kernel Hilbert space H_F and their inner products.

Three element representations:

* ``KernelCombo``  -- finite combinations sum_j c_j F(. - x_j); inner products
                      are exact kernel evaluations.
* ``Smoothed``     -- a test function phi on (0, a); the element is the
                      integral transform F_phi = T_F phi.
* ``Sampled``      -- values and derivative values on a uniform grid of [0, a]
                      plus boundary data, optionally backed by callables for
                      high-order quadrature.

For the exp kernel the H_F inner product has the Sobolev boundary form

    <h, k> = (1/2)(<h, k>_2 + <h', k'>_2) + (1/2)(conj(h(0)) k(0) + conj(h(1)) k(1)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .kernels import DomainError, MeasureOnInterval, PdKernel
from .quadrature import (cell_gl_layout, exp_kernel_apply, kernel_apply_on_grid,
                         panel_nodes, simpson)


@dataclass(frozen=True)
class BoundaryData:
    h0: complex
    dh0: complex
    ha: complex
    dha: complex


@dataclass(frozen=True)
class KernelCombo:
    """sum_j c_j F(. - x_j) with centers x_j in [0, a]."""
    coeffs: tuple[tuple[complex, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           tuple((complex(c), float(x)) for c, x in self.coeffs))


@dataclass(frozen=True)
class Smoothed:
    """Test function phi on (0, a); represents the element F_phi = T_F phi."""
    grid: np.ndarray
    values: np.ndarray
    fn: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values))

    def callable(self):
        if self.fn is not None:
            return self.fn
        g, v = self.grid, self.values
        return lambda t: np.interp(t, g, v.real) + (
            1j * np.interp(t, g, v.imag) if np.iscomplexobj(v) else 0.0)


@dataclass(frozen=True)
class Sampled:
    """Function samples h(x_i) and h'(x_i) on a uniform grid of [0, a].
    ``dvalues`` may be None for elements whose derivative is unavailable;
    operations that need it (the Sobolev-form inner product) then raise.
    ``kinks`` lists interior points where the derivative jumps, so that
    quadrature panels can be split there."""
    grid: np.ndarray
    values: np.ndarray
    dvalues: Optional[np.ndarray]
    boundary: BoundaryData
    fn: Optional[Callable] = None
    dfn: Optional[Callable] = None
    kinks: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values))
        if self.dvalues is not None:
            object.__setattr__(self, "dvalues", np.asarray(self.dvalues))

    def interpolator(self):
        if self.fn is not None:
            return self.fn
        dv = self.dvalues
        if dv is None:
            dv = fd_derivative(self.values, self.grid[1] - self.grid[0])
        if np.iscomplexobj(self.values):
            re = CubicHermiteSpline(self.grid, self.values.real, dv.real)
            im = CubicHermiteSpline(self.grid, self.values.imag, dv.imag)
            return lambda t: re(t) + 1j * im(t)
        return CubicHermiteSpline(self.grid, self.values, dv)


RkhsElement = Union[KernelCombo, Smoothed, Sampled]


def fd_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """4th-order first derivative on a uniform grid, one-sided at the ends."""
    v = np.asarray(values)
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    for i in (0, 1):
        d[i] = (-25 * v[i] + 48 * v[i + 1] - 36 * v[i + 2]
                + 16 * v[i + 3] - 3 * v[i + 4]) / (12 * h)
        d[-1 - i] = (25 * v[-1 - i] - 48 * v[-2 - i] + 36 * v[-3 - i]
                     - 16 * v[-4 - i] + 3 * v[-5 - i]) / (12 * h)
    return d


def sampled_from_callable(fn: Callable, kernel_or_a, n: int = 2000,
                          dfn: Optional[Callable] = None,
                          kinks: tuple[float, ...] = ()) -> Sampled:
    """Sampled element from a callable; derivative by 4th-order differences
    when no analytic derivative is supplied."""
    a = kernel_or_a.half_width if isinstance(kernel_or_a, PdKernel) else float(kernel_or_a)
    grid = np.linspace(0.0, a, n + 1)
    values = fn(grid)
    dvalues = dfn(grid) if dfn is not None else fd_derivative(values, grid[1] - grid[0])
    bd = BoundaryData(values[0], dvalues[0], values[-1], dvalues[-1])
    return Sampled(grid, values, dvalues, bd, fn=fn, dfn=dfn, kinks=kinks)


def complex_exponential(lam: float, a: float = 1.0, n: int = 2000) -> Sampled:
    """e_lambda(x) = e^{i lambda x} as a Sampled element with exact callables."""
    fn = lambda x: np.exp(1j * lam * np.asarray(x, dtype=float))
    dfn = lambda x: 1j * lam * np.exp(1j * lam * np.asarray(x, dtype=float))
    return sampled_from_callable(fn, a, n=n, dfn=dfn)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

def inner_product_combo(a: KernelCombo, b: KernelCombo, kernel: PdKernel) -> complex:
    """<sum c_i F_{x_i}, sum d_j F_{y_j}> = sum conj(c_i) d_j F(x_i - y_j)."""
    total = 0.0 + 0.0j
    for ci, xi in a.coeffs:
        for dj, yj in b.coeffs:
            total += np.conj(ci) * dj * complex(kernel(xi - yj))
    return complex(total)


def combo_norm_sq(a: KernelCombo, kernel: PdKernel) -> float:
    return inner_product_combo(a, a, kernel).real


def _l2_pair(h: Sampled, k: Sampled, use_deriv: bool, n_panels: int = 256,
             m: int = 6) -> complex:
    """int conj(h) k (or conj(h') k') over the grid span; composite GL when
    both sides carry callables (panels split at declared kinks), Simpson on
    the shared grid otherwise."""
    hf = h.dfn if use_deriv else h.fn
    kf = k.dfn if use_deriv else k.fn
    if hf is not None and kf is not None:
        lo, hi = h.grid[0], h.grid[-1]
        splits = sorted(set(h.kinks) | set(k.kinks))
        edges = [lo] + [s for s in splits if lo < s < hi] + [hi]
        total = 0.0 + 0.0j
        for a, b in zip(edges[:-1], edges[1:]):
            npan = max(2, int(np.ceil(n_panels * (b - a) / (hi - lo))))
            x, w = panel_nodes(a, b, npan, m)
            total += np.sum(w * np.conj(hf(x)) * kf(x))
        return complex(total)
    if len(h.grid) != len(k.grid) or not np.allclose(h.grid, k.grid):
        raise ValueError("sampled elements live on different grids")
    hv = h.dvalues if use_deriv else h.values
    kv = k.dvalues if use_deriv else k.values
    return complex(simpson(np.conj(hv) * kv, h.grid))


def exp_inner_product(h: Sampled, k: Sampled) -> complex:
    """H_F inner product of the exp kernel in Sobolev boundary form (domain
    [0, 1]); requires derivative samples on both arguments."""
    if h.dvalues is None or k.dvalues is None:
        raise ValueError("exp_inner_product requires derivative samples")
    if abs(h.grid[-1] - 1.0) > 1e-12 or abs(k.grid[-1] - 1.0) > 1e-12:
        raise DomainError("exp_inner_product is defined on [0, 1]")
    val = 0.5 * (_l2_pair(h, k, False) + _l2_pair(h, k, True))
    hb, kb = h.boundary, k.boundary
    val += 0.5 * (np.conj(hb.h0) * kb.h0 + np.conj(hb.ha) * kb.ha)
    return complex(val)


def exp_norm_sq(h: Sampled) -> float:
    return exp_inner_product(h, h).real


# ---------------------------------------------------------------------------
# the smoothing transform F_phi = T_F phi
# ---------------------------------------------------------------------------

def smooth(phi, kernel: PdKernel, n: int = 2000, gl_order: int = 6) -> Sampled:
    """F_phi(x) = int_0^a phi(y) F(x - y) dy with derivative
    F_phi'(x) = int phi(y) F'(x - y) dy and boundary data from the same
    quadrature.  phi must vanish at the interval endpoints."""
    a = kernel.half_width
    grid = np.linspace(0.0, a, n + 1)
    if isinstance(phi, Smoothed):
        phi_fn = phi.callable()
    elif callable(phi):
        phi_fn = phi
    else:
        phi_fn = Smoothed(*phi).callable()
    ends = np.max(np.abs(np.asarray([phi_fn(np.array([0.0]))[0],
                                     phi_fn(np.array([a]))[0]])))
    probe = np.max(np.abs(phi_fn(np.linspace(0, a, 257))))
    if probe > 0 and ends > 1e-9 * probe:
        raise DomainError("test function must vanish at the endpoints")
    if kernel.family == "exp":
        values, dvalues = exp_kernel_apply(grid, phi_fn, m=gl_order)
    else:
        values = kernel_apply_on_grid(kernel, grid, phi_fn, m=gl_order)
        dvalues = kernel_apply_on_grid(kernel.deriv, grid, phi_fn, m=gl_order)
    bd = BoundaryData(values[0], dvalues[0], values[-1], dvalues[-1])
    return Sampled(grid, values, dvalues, bd)


def inner_product_smoothed(phi, psi, kernel: PdKernel, n: int = 2000,
                           gl_order: int = 6) -> complex:
    """<F_phi, F_psi> = double integral of conj(phi(x)) psi(y) F(x - y),
    evaluated as int conj(phi) (T_F psi) with the kink-split inner transform."""
    a = kernel.half_width
    grid = np.linspace(0.0, a, n + 1)
    phi_fn = phi if callable(phi) else Smoothed(*phi).callable()
    psi_fn = psi if callable(psi) else Smoothed(*psi).callable()
    if kernel.family == "exp":
        tpsi, _ = exp_kernel_apply(grid, psi_fn, m=gl_order)
    else:
        tpsi = kernel_apply_on_grid(kernel, grid, psi_fn, m=gl_order)
    return complex(simpson(np.conj(phi_fn(grid)) * tpsi, grid))


def smoothed_norm_sq(phi, kernel: PdKernel, **kw) -> float:
    return inner_product_smoothed(phi, phi, kernel, **kw).real


def reproducing_eval(xi: RkhsElement, x: float, kernel: PdKernel) -> complex:
    """<F(. - x), xi> = xi(x), evaluated per representation."""
    x = float(x)
    if isinstance(xi, KernelCombo):
        return complex(sum(c * complex(kernel(x - xj)) for c, xj in xi.coeffs))
    if isinstance(xi, Smoothed):
        fn = xi.callable()
        a = kernel.half_width
        nodes, weights = cell_gl_layout(np.linspace(0.0, a, 2001), m=6)
        w = weights.ravel()
        y = nodes.ravel()
        return complex(np.sum(w * fn(y) * kernel(x - y)))
    return complex(xi.interpolator()(x))


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MembershipReport:
    verdict: str                  # "in" | "out" | "indeterminate"
    bound: float                  # largest Rayleigh quotient seen
    estimates: tuple[float, ...]  # bound at increasing basis sizes


def membership_test(h: Callable, kernel: PdKernel, basis_size: int,
                    dec=None) -> MembershipReport:
    """Estimate the least A with |int phi h|^2 <= A ||F_phi||^2 by maximizing
    over test functions in the span of the top Mercer eigenfunctions.

    The maximum over the span of xi_1..xi_m is exactly
    sum_{n<=m} |<xi_n, h>_2|^2 / lam_n, so the estimates are the truncated
    T_F^{-1/2} norms; membership shows up as stabilization under basis
    growth, non-membership as sustained geometric growth.
    """
    from . import mercer as _mercer
    if dec is None:
        dec = _mercer.discretize(kernel, _mercer.NystromConfig(
            node_count=max(256, 2 * basis_size)))
    if basis_size > dec.rank:
        raise ValueError(f"basis_size {basis_size} exceeds Mercer rank {dec.rank}")
    hv = h(dec.nodes) if callable(h) else np.asarray(h)
    sizes = [max(2, basis_size // 4), max(3, basis_size // 2), basis_size]
    ests = []
    for m in sizes:
        c = dec.coefficients(hv, m)
        ests.append(float(np.sum(np.abs(c) ** 2 / dec.eigenvalues[:m])))
    a1, a2, a3 = ests
    if a3 <= a1 * 1.05:
        verdict = "in"
    elif a3 > 10.0 * a1 or (a2 >= 1.5 * a1 and a3 >= 1.5 * a2):
        verdict = "out"
    else:
        verdict = "indeterminate"
    return MembershipReport(verdict, a3, tuple(ests))


# ---------------------------------------------------------------------------
# measure representations of elements
# ---------------------------------------------------------------------------

def element_from_measure(mu: MeasureOnInterval, kernel: PdKernel,
                         n: int = 2000, gl_order: int = 6) -> Sampled:
    """F_mu(x) = int_0^a F(x - y) dmu(y); atoms exactly, density by
    kink-split panel quadrature."""
    a = kernel.half_width
    grid = np.linspace(0.0, a, n + 1)
    values = np.zeros(n + 1, dtype=complex)
    dvalues = np.zeros(n + 1, dtype=complex)
    dens_fn = getattr(mu, "density_fn", None)
    if len(mu.grid) > 1 and np.max(np.abs(mu.density)) > 0:
        if dens_fn is None:
            g, d = mu.grid, mu.density
            dens_fn = lambda t: np.interp(t, g, d.real) + 1j * np.interp(t, g, d.imag)
        if kernel.family == "exp":
            v, dv = exp_kernel_apply(grid, dens_fn, m=gl_order)
            values += v
            dvalues += dv
        else:
            values += kernel_apply_on_grid(kernel, grid, dens_fn, m=gl_order)
            dvalues += kernel_apply_on_grid(kernel.deriv, grid, dens_fn, m=gl_order)
    dleft, dright = kernel.deriv_at_zero
    for loc, w in mu.atoms:
        values += w * kernel(grid - loc)
        t = grid - loc
        dk = np.where(t > 0, kernel.deriv(np.where(t == 0, 1e-300, t)), 0.0) \
            + np.where(t < 0, kernel.deriv(np.where(t == 0, -1e-300, t)), 0.0)
        # at x == loc the kernel kinks; take the one-sided limit pointing
        # into the interval (average for interior atoms)
        at = np.isclose(t, 0.0, atol=1e-15)
        if np.any(at):
            if loc <= grid[0] + 1e-15:
                dk = np.where(at, dright, dk)
            elif loc >= grid[-1] - 1e-15:
                dk = np.where(at, dleft, dk)
            else:
                dk = np.where(at, 0.5 * (dleft + dright), dk)
        dvalues += w * dk
    if np.max(np.abs(values.imag)) < 1e-14 and np.max(np.abs(dvalues.imag)) < 1e-14:
        values = values.real
        dvalues = dvalues.real
    bd = BoundaryData(values[0], dvalues[0], values[-1], dvalues[-1])
    return Sampled(grid, values, dvalues, bd)


def e_lambda_measure(lam: float, n: int = 2001) -> MeasureOnInterval:
    """The measure mu_lambda with F_{mu_lambda} = e^{i lambda x} for the exp
    kernel on (0, 1):

        dmu = (1/2)(1+lam^2) e^{i lam y} dy
              + (1/2)[(1 - i lam) delta_0 + (1 + i lam) e^{+i lam} delta_1].

    (Direct integration of e^{-|x-y|} against the density leaves the rest
    (1/2)(1-i lam) e^{-x} + (1/2)(1+i lam) e^{i lam} e^{x-1}, which pins the
    endpoint weights; the positive sign in the delta_1 exponent is forced.)
    Total variation (1+lam^2)/2 + sqrt(1+lam^2).
    """
    grid = np.linspace(0.0, 1.0, n)
    half = 0.5 * (1.0 + lam * lam)
    dens = half * np.exp(1j * lam * grid)
    atoms = ((0.0, 0.5 * (1.0 - 1j * lam)),
             (1.0, 0.5 * (1.0 + 1j * lam) * np.exp(1j * lam)))
    return MeasureOnInterval.from_density(
        (0.0, 1.0), grid, dens, atoms,
        density_fn=lambda y: half * np.exp(1j * lam * np.asarray(y, dtype=float)))


def element_measure_expansion(h: Sampled, lambdas: Sequence[float], kernel: PdKernel,
                              n: int = 2001) -> MeasureOnInterval:
    """dmu_h = sum_n (<e_n, h>/||e_n||^2) dmu_n over the spectrum Lambda_theta
    (exp kernel); element_from_measure of the result approximates h with the
    Parseval tail as the error budget."""
    if kernel.family != "exp":
        raise DomainError("measure expansion is implemented for the exp kernel")
    lambdas = np.asarray(lambdas, dtype=float)
    coeffs = []
    for lam in lambdas:
        e = complex_exponential(lam, 1.0, n=len(h.grid) - 1)
        c = exp_inner_product(e, h) / (0.5 * (lam ** 2 + 3.0))
        coeffs.append(c)
    coeffs = np.asarray(coeffs)
    grid = np.linspace(0.0, 1.0, n)
    halves = 0.5 * (1.0 + lambdas ** 2)
    dens = (coeffs * halves)[None, :] * np.exp(1j * np.outer(grid, lambdas))
    density = dens.sum(axis=1)
    w0 = complex(np.sum(coeffs * 0.5 * (1.0 - 1j * lambdas)))
    w1 = complex(np.sum(coeffs * 0.5 * (1.0 + 1j * lambdas) * np.exp(1j * lambdas)))
    ch = coeffs * halves

    def fn(y):
        y = np.asarray(y, dtype=float)
        flat = (ch[None, :] * np.exp(1j * np.outer(y.ravel(), lambdas))).sum(axis=1)
        return flat.reshape(y.shape)

    return MeasureOnInterval.from_density((0.0, 1.0), grid, density,
                                          ((0.0, w0), (1.0, w1)), density_fn=fn)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def element_to_json(el: RkhsElement) -> str:
    if isinstance(el, KernelCombo):
        return json.dumps({"kind": "combo",
                           "coeffs": [[c.real, c.imag, x] for c, x in el.coeffs]})
    if isinstance(el, Smoothed):
        return json.dumps({"kind": "smoothed", "grid": el.grid.tolist(),
                           "values_re": np.real(el.values).tolist(),
                           "values_im": np.imag(el.values).tolist()})
    b = el.boundary
    return json.dumps({
        "kind": "sampled", "grid": el.grid.tolist(),
        "values_re": np.real(el.values).tolist(),
        "values_im": np.imag(el.values).tolist(),
        "dvalues_re": np.real(el.dvalues).tolist(),
        "dvalues_im": np.imag(el.dvalues).tolist(),
        "boundary": [[z.real, z.imag] for z in
                     (complex(b.h0), complex(b.dh0), complex(b.ha), complex(b.dha))],
    })


def element_from_json(text: str) -> RkhsElement:
    d = json.loads(text)
    if d["kind"] == "combo":
        return KernelCombo(tuple((complex(re, im), x) for re, im, x in d["coeffs"]))
    if d["kind"] == "smoothed":
        vals = np.asarray(d["values_re"]) + 1j * np.asarray(d["values_im"])
        return Smoothed(np.asarray(d["grid"]), vals)
    vals = np.asarray(d["values_re"]) + 1j * np.asarray(d["values_im"])
    dvals = np.asarray(d["dvalues_re"]) + 1j * np.asarray(d["dvalues_im"])
    if np.max(np.abs(vals.imag)) == 0 and np.max(np.abs(dvals.imag)) == 0:
        vals, dvals = vals.real, dvals.real
    bvals = [complex(re, im) for re, im in d["boundary"]]
    return Sampled(np.asarray(d["grid"]), vals, dvals, BoundaryData(*bvals))


def load_test_function_csv(path: str):
    """Load a test function phi from CSV rows (y, phi(y))."""
    import csv as _csv
    ys, vs = [], []
    with open(path, newline="") as fh:
        for row in _csv.reader(fh):
            if not row or row[0].strip().lower() in ("y", ""):
                continue
            ys.append(float(row[0]))
            vs.append(float(row[1]))
    return Smoothed(np.asarray(ys), np.asarray(vs))
