"""Elliptic-operator view of T_F^{-1} and the transcendental spectra.

The inverse Mercer operator extends a constant-coefficient second order
operator with kernel-determined boundary conditions:

* exp kernel:      T_F^{-1} extends (1/2)(I - d^2/dx^2) on (0, 1) with
                   h(0) = h'(0), h(1) = -h'(1); eigenvalues come from
                   tan k = 2k/(k^2 - 1) with k^2 = 2 lam_D - 1 > 1, and the
                   Mercer eigenvalue is 2/(1 + k^2).
* triangle kernel: T_F^{-1} extends -(1/2) d^2/dx^2 on (0, 1/2) with
                   h'(0) + h'(1/2) = 0 and h(0) + h(1/2) = (3/2) h'(0).
                   Setting the boundary determinant to zero gives

                       4 (1 + cos(k/2)) = 3 k sin(k/2)

                   which factors as cos(k/4) [4 cos(k/4) - 3 k sin(k/4)] = 0,
                   i.e. roots of tan(k/4) = 4/(3k) interleaved with the
                   cosine family k = 2 pi (2m - 1).  Mercer eigenvalue 2/k^2.
                   (T_F > 0 forces k^2 = +2/lam; the determinant carries both
                   factor families, and dropping either breaks the trace sum.)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .kernels import DomainError, PdKernel, bspline_autoconvolution
from .mercer import MercerDecomposition
from .quadrature import panel_nodes, simpson


@dataclass(frozen=True)
class TranscendentalSpec:
    """A transcendental eigenvalue problem: residual whose positive roots k
    map to Mercer eigenvalues via mercer_map."""

    tag: str
    residual: Callable[[np.ndarray], np.ndarray]
    mercer_map: Callable[[np.ndarray], np.ndarray]
    k_min: float
    interval_length: float    # the trace target a

    def normalized_residual(self, k):
        return self.residual(k) / (1.0 + np.asarray(k, dtype=float) ** 2)


def exp_bvp_spec() -> TranscendentalSpec:
    """tan k = 2k/(k^2-1), cleared of tan poles: (k^2-1) sin k - 2k cos k."""
    return TranscendentalSpec(
        tag="ExpBVP",
        residual=lambda k: (np.asarray(k) ** 2 - 1.0) * np.sin(k) - 2.0 * np.asarray(k) * np.cos(k),
        mercer_map=lambda k: 2.0 / (1.0 + np.asarray(k) ** 2),
        k_min=1.0,
        interval_length=1.0,
    )


def triangle_bvp_spec() -> TranscendentalSpec:
    """Full boundary determinant 4(1 + cos(k/2)) - 3k sin(k/2)."""
    return TranscendentalSpec(
        tag="TriangleBVP",
        residual=lambda k: 4.0 * (1.0 + np.cos(np.asarray(k) / 2.0))
        - 3.0 * np.asarray(k) * np.sin(np.asarray(k) / 2.0),
        mercer_map=lambda k: 2.0 / np.asarray(k) ** 2,
        k_min=1e-6,
        interval_length=0.5,
    )


def spec_for_kernel(kernel: PdKernel) -> TranscendentalSpec:
    if kernel.family == "exp":
        return exp_bvp_spec()
    if kernel.family in ("triangle", "bsplinex:2"):
        return triangle_bvp_spec()
    raise DomainError(f"no transcendental spectrum for kernel '{kernel.family}'")


def solve_transcendental(spec: TranscendentalSpec, count: int,
                         scan_step: float = 0.01,
                         max_k: float = 1e4) -> np.ndarray:
    """First ``count`` positive roots by vectorized sign-change scan plus
    Brent and a Newton polish; normalized residuals < 1e-12 and simplicity
    are enforced."""
    if count < 1:
        raise DomainError("count must be >= 1")
    roots: list[float] = []
    f = spec.residual
    lo = spec.k_min
    block = 20000
    while len(roots) < count:
        if lo > max_k:
            raise DomainError("root window exhausted")
        ks = lo + scan_step * np.arange(block + 1)
        vals = np.asarray(f(ks))
        sign_change = np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]
        for i in sign_change:
            r = brentq(f, ks[i], ks[i + 1], xtol=1e-15, rtol=8.9e-16)
            for _ in range(2):
                h = 1e-7 * max(1.0, abs(r))
                df = (float(f(r + h)) - float(f(r - h))) / (2 * h)
                if df != 0.0:
                    r -= float(f(r)) / df
            h = 1e-6 * max(1.0, abs(r))
            df = (float(f(r + h)) - float(f(r - h))) / (2 * h)
            if abs(df) < 1e-8:
                raise DomainError(f"root near k = {r} is not simple")
            if abs(float(spec.normalized_residual(r))) > 1e-12:
                raise DomainError(f"poorly converged root near k = {r}")
            roots.append(float(r))
            if len(roots) >= count:
                break
        lo = ks[-1]
    return np.asarray(roots[:count])


@dataclass(frozen=True)
class MercerMatchReport:
    matched: list            # (index, nystrom eigenvalue, mapped root value, rel error)
    unmatched: list          # (index, nystrom eigenvalue)
    max_rel_error: float

    @property
    def all_matched(self) -> bool:
        return not self.unmatched


def verify_against_mercer(spec: TranscendentalSpec, dec: MercerDecomposition,
                          N: int, rtol: float = 1e-3) -> MercerMatchReport:
    """Match the top N Nystrom eigenvalues with mapped transcendental roots;
    eigenvalues with no root within rtol are reported, not hidden."""
    roots = solve_transcendental(spec, max(2 * N + 8, 16))
    mapped = np.sort(spec.mercer_map(roots))[::-1]
    matched, unmatched = [], []
    worst = 0.0
    for i in range(N):
        lam = dec.eigenvalues[i]
        j = int(np.argmin(np.abs(mapped - lam)))
        rel = abs(mapped[j] - lam) / lam
        if rel < rtol:
            matched.append((i, float(lam), float(mapped[j]), float(rel)))
            worst = max(worst, rel)
        else:
            unmatched.append((i, float(lam)))
    return MercerMatchReport(matched, unmatched, worst)


# ---------------------------------------------------------------------------
# distributional identities
# ---------------------------------------------------------------------------

def mollifier(center: float, width: float):
    """C_c^infty bump exp(-1/(1-u^2)) on |u| < 1, u = (x-center)/width,
    with analytic first and second derivatives."""

    def parts(x):
        u = (np.asarray(x, dtype=float) - center) / width
        inside = np.abs(u) < 1.0
        u = np.where(inside, u, 0.0)
        denom = 1.0 - u * u
        f = np.where(inside, np.exp(-1.0 / np.where(inside, denom, 1.0)), 0.0)
        g1 = -2.0 * u / denom ** 2
        g2 = -2.0 * (1.0 + 3.0 * u ** 2) / denom ** 3
        return f, np.where(inside, f * g1 / width, 0.0), \
            np.where(inside, f * (g1 * g1 + g2) / width ** 2, 0.0)

    return (lambda x: parts(x)[0], lambda x: parts(x)[1], lambda x: parts(x)[2])


@dataclass(frozen=True)
class DeltaCheckRow:
    center: float
    width: float
    lhs: float                 # int F psi''
    rhs: float                 # distributional prediction
    error: float


def distributional_derivative_check(kernel: PdKernel, test_functions,
                                    n_panels: int = 600, gl_order: int = 8):
    """Verify int F psi'' dx = -2 psi(0) (triangle) or int F psi dx - 2 psi(0)
    (exp) for smooth psi compactly supported in (-a, a)."""
    a = kernel.half_width
    rows = []
    for psi, dpsi, d2psi, center, width in test_functions:
        x, w = panel_nodes(-a, a, n_panels, gl_order)
        # keep the kernel kink at 0 on a panel edge
        neg = x < 0
        lhs = float(np.sum(w[neg] * kernel(x[neg]) * d2psi(x[neg])) +
                    np.sum(w[~neg] * kernel(x[~neg]) * d2psi(x[~neg])))
        psi0 = float(psi(np.array([0.0]))[0])
        if kernel.family in ("triangle", "bsplinex:2"):
            rhs = -2.0 * psi0
        elif kernel.family == "exp":
            rhs = float(np.sum(w * kernel(x) * psi(x))) - 2.0 * psi0
        else:
            raise DomainError(f"no delta identity recorded for '{kernel.family}'")
        rows.append(DeltaCheckRow(center, width, lhs, rhs, abs(lhs - rhs)))
    return rows


def delta_report_json(rows: Sequence[DeltaCheckRow]) -> str:
    import json
    return json.dumps([{"center": r.center, "width": r.width, "lhs": r.lhs,
                        "rhs": r.rhs, "error": r.error} for r in rows])


def root_table_rows(spec: TranscendentalSpec, count: int):
    """CSV rows (i, k_i, mapped eigenvalue, normalized residual)."""
    roots = solve_transcendental(spec, count)
    return [(i + 1, float(k), float(spec.mercer_map(k)),
             abs(float(spec.normalized_residual(k))))
            for i, k in enumerate(roots)]


def standard_bumps(kernel: PdKernel, seed: int = 0, count: int = 10):
    """Random bumps supported in (-a, a), plus one centered at 0."""
    a = kernel.half_width
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        if i == 0:
            c, wdt = 0.0, 0.6 * a
        else:
            c = rng.uniform(-0.4 * a, 0.4 * a)
            wdt = rng.uniform(0.2 * a, 0.55 * a)
        f, df, d2f = mollifier(c, wdt)
        out.append((f, df, d2f, c, wdt))
    return out


# ---------------------------------------------------------------------------
# ellipticity and the B-spline operator bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipticDescriptor:
    """P(xi) >= 0 with T_F^{-1} extending P(-i d/dx); boundary conditions as
    linear functionals on (h(0), h'(0), h(a), h'(a))."""

    poly_coeffs: tuple[float, ...]          # P(xi) = sum c_j xi^j
    boundary_rows: tuple[tuple[float, float, float, float], ...]

    def poly(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        for j, c in enumerate(self.poly_coeffs):
            out += c * xi ** j
        return out

    def is_nonnegative(self, xi_max: float = 50.0, n: int = 2001) -> bool:
        xi = np.linspace(-xi_max, xi_max, n)
        return bool(np.min(self.poly(xi)) >= -1e-12)


def descriptor_for_kernel(kernel: PdKernel) -> EllipticDescriptor:
    if kernel.family == "exp":
        # (1/2)(1 + xi^2); h(0)-h'(0)=0, h(1)+h'(1)=0
        return EllipticDescriptor((0.5, 0.0, 0.5),
                                  ((1.0, -1.0, 0.0, 0.0), (0.0, 0.0, 1.0, 1.0)))
    if kernel.family in ("triangle", "bsplinex:2"):
        # (1/2) xi^2; h'(0)+h'(a)=0, h(0)+h(a)-(3/2)h'(0)=0
        return EllipticDescriptor((0.0, 0.0, 0.5),
                                  ((0.0, 1.0, 0.0, 1.0), (1.0, -1.5, 1.0, 0.0)))
    raise DomainError(f"no elliptic descriptor for kernel '{kernel.family}'")


@dataclass(frozen=True)
class EllipticityReport:
    verdict: str               # "elliptic" | "not elliptic at this resolution"
    constant: float
    per_rank: tuple[float, float]
    stabilized: bool = False   # < 10% relative change between the two ranks


def ellipticity_check(kernel: PdKernel, dec: MercerDecomposition,
                      samples, m: Optional[int] = None) -> EllipticityReport:
    """Estimate C = max <h, T_F^{-1} h>_2 / (||h||_2^2 + ||h'||_2^2) over the
    samples at truncation ranks m and 2m; > 2x growth between the ranks
    means "not elliptic at this resolution", and < 10% change marks the
    constant as stabilized."""
    if m is None:
        m = dec.rank // 4
    if 2 * m > dec.rank:
        raise ValueError("rank 2m exceeds the decomposition rank")
    ratios = {m: 0.0, 2 * m: 0.0}
    for h in samples:
        hv = h.interpolator()(dec.nodes)
        dv = h.dfn(dec.nodes) if h.dfn is not None else None
        if dv is None:
            spl = h.interpolator()
            eps = 1e-6
            dv = (spl(dec.nodes + eps) - spl(dec.nodes - eps)) / (2 * eps)
        denom = float(np.sum(dec.weights * (np.abs(hv) ** 2 + np.abs(dv) ** 2)))
        for rank in (m, 2 * m):
            c = dec.coefficients(hv, rank)
            num = float(np.sum(np.abs(c) ** 2 / dec.eigenvalues[:rank]))
            ratios[rank] = max(ratios[rank], num / denom)
    c_m, c_2m = ratios[m], ratios[2 * m]
    stabilized = abs(c_2m - c_m) < 0.1 * c_2m
    if c_2m > 2.0 * c_m:
        return EllipticityReport("not elliptic at this resolution", c_2m,
                                 (c_m, c_2m), stabilized)
    return EllipticityReport("elliptic", c_2m, (c_m, c_2m), stabilized)


@dataclass(frozen=True)
class OperatorBoundReport:
    k: int
    bound_sq: float            # (k/2)^2
    ratios: np.ndarray
    passed: bool


def bspline_operator_bound(k: int, trials: int = 50, seed: int = 0,
                           a: float = 0.5, tol: float = 1e-6) -> OperatorBoundReport:
    """Estimate ||D F_phi||^2 / ||F_phi||^2 for the sinc^k kernel through the
    spectral form int u^2 |phihat|^2 dmu_k / int |phihat|^2 dmu_k, where
    mu_k is the box autoconvolution B^{*k} and phihat is the Fourier
    transform in the normalized frequency u of mu_k's support [-k/2, k/2].
    Every ratio is bounded by (k/2)^2 since |u| <= k/2 on the support."""
    if k < 1:
        raise DomainError("k must be >= 1")
    rng = np.random.default_rng(seed)
    u = np.linspace(-0.5 * k, 0.5 * k, 4001)
    dens = bspline_autoconvolution(k, u)
    y, w = panel_nodes(0.0, a, 200, 6)
    phases = np.exp(-2j * np.pi * np.outer(u, y))   # trial-independent
    ratios = np.empty(trials)
    for t in range(trials):
        n_bump = rng.integers(1, 4)
        phi_y = np.zeros_like(y)
        for _ in range(n_bump):
            c = rng.uniform(0.2 * a, 0.8 * a)
            wd = rng.uniform(0.1 * a, 0.3 * a)
            amp = rng.uniform(0.5, 2.0)
            uu = (y - c) / wd
            inside = np.abs(uu) < 1
            phi_y += amp * np.where(inside,
                                    np.exp(-1.0 / np.where(inside, 1 - uu ** 2, 1.0)), 0.0)
        phihat = phases @ (w * phi_y)
        p2 = np.abs(phihat) ** 2
        num = simpson(u * u * p2 * dens, u)
        den = simpson(p2 * dens, u)
        ratios[t] = num / den
    bound = (0.5 * k) ** 2
    return OperatorBoundReport(k, bound, ratios,
                               bool(np.all(ratios <= bound + tol)))


@dataclass(frozen=True)
class SupportReport:
    k: int
    support: tuple[float, float]
    max_outside: float
    max_dev_from_closed_form: float
    passed: bool


def support_check(k: int, n: int = 20001) -> SupportReport:
    """Confirm B^{*k} vanishes outside [-k/2, k/2] and agrees with a direct
    numerical autoconvolution of the box indicator (compared away from the
    breakpoints -k/2 + j, where the k = 1 indicator jumps)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    half = 0.5 * k
    u = np.linspace(-half - 2.0, half + 2.0, n)
    vals = bspline_autoconvolution(k, u)
    outside = np.abs(u) > half + 1e-9
    max_out = float(np.max(np.abs(vals[outside]))) if np.any(outside) else 0.0
    # numeric oracle: repeated grid convolution of the indicator
    h = u[1] - u[0]
    box = ((u > -0.5) & (u < 0.5)).astype(float)
    conv = box.copy()
    for _ in range(k - 1):
        conv = np.convolve(conv, box, mode="same") * h
    breakpoints = -half + np.arange(k + 1)
    near_break = np.min(np.abs(u[:, None] - breakpoints[None, :]), axis=1) < 2 * h
    dev = float(np.max(np.abs(conv[~near_break] - vals[~near_break])))
    return SupportReport(k, (-half, half), max_out, dev,
                         max_out < 1e-12 and dev < 5e-3)
