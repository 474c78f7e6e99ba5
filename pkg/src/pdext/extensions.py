"""Selfadjoint-extension spectra and positive definite extensions to the line.

For F(x) = e^{-|x|} on (-1, 1) the derivative operator has defect vectors
e^{-x}, e^{x-1}; the selfadjoint extensions A_theta are indexed by
theta in [0, 2pi) and their spectra Lambda_theta solve

    e^{i lam} (1 + i lam) = e^{i theta} (1 - i lam),

equivalently the strictly monotone phase equation
lam + 2 arctan(lam) = theta + 2 pi n, one root per branch n.  The arctan
form of the same condition hides a branch choice, so roots are located in
the phase form and residuals are reported for the complex equation with the
2 pi n multiple removed exactly.

Type-1 extensions: F_theta(x) = sum 2/(lam^2+3) e^{i lam x} over Lambda_theta.
Type-2 family: G_r with exponential tails of rate r glued at |x| = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import polygamma

from .kernels import (EPS_PSD, DomainError, PdKernel, SpectralMeasure,
                      bochner_transform)
from .quadrature import panel_nodes
from .rkhs import (Sampled, complex_exponential, exp_inner_product,
                   sampled_from_callable)


# ---------------------------------------------------------------------------
# the spectra Lambda_theta
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaSpectrum:
    """Discrete spectrum of A_theta: branch indices n, eigenvalues lam_n and
    residuals of the complex boundary equation (phase-reduced, so residuals
    stay meaningful for distant branches)."""

    theta: float
    branches: np.ndarray        # integer branch indices
    lambdas: np.ndarray
    residuals: np.ndarray

    def __len__(self) -> int:
        return len(self.lambdas)

    def weights(self) -> np.ndarray:
        """ONB weights 2/(lam^2 + 3) = 1/||e_lam||^2."""
        return 2.0 / (self.lambdas ** 2 + 3.0)


def _phase_residual(theta: float, n: int, t: float, lam: float) -> float:
    """|e^{i lam}(1+i lam) - e^{i theta}(1-i lam)| with e^{i lam} evaluated as
    -e^{i(theta+t)} (exact reduction of the 2 pi n multiple)."""
    lhs = -np.exp(1j * (theta + t)) * (1.0 + 1j * lam)
    rhs = np.exp(1j * theta) * (1.0 - 1j * lam)
    return float(abs(lhs - rhs))


def solve_theta_spectrum(theta: float, N: int) -> ThetaSpectrum:
    """Solve lam + 2 arctan(lam) = theta + 2 pi n for n in [-N, N].

    Each branch window (theta + (2n-1) pi, theta + (2n+1) pi) holds exactly
    one root since the phase is strictly increasing.  theta outside [0, 2pi)
    is reduced modulo 2 pi.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    theta = float(theta) % (2.0 * math.pi)
    ns = np.arange(-N, N + 1)
    lams = np.empty(len(ns))
    resids = np.empty(len(ns))
    for i, n in enumerate(ns):
        base = theta + (2 * n - 1) * math.pi   # lam = base + t, t in (0, 2 pi)

        def gap(t):
            return (t - math.pi) + 2.0 * math.atan(base + t)

        lo, hi = 1e-14, 2.0 * math.pi - 1e-14
        glo, ghi = gap(lo), gap(hi)
        if not (glo < 0.0 < ghi):
            raise DomainError(f"bracket failure on branch n = {n}")
        t = brentq(gap, lo, hi, xtol=1e-15, rtol=8.9e-16)
        # Newton polish in the t variable (derivative ~ 1, so this is stable)
        for _ in range(2):
            lam = base + t
            g = (t - math.pi) + 2.0 * math.atan(lam)
            t -= g / (1.0 + 2.0 / (1.0 + lam * lam))
        lam = base + t
        lams[i] = lam
        resids[i] = _phase_residual(theta, n, t, lam)
    if np.any(np.diff(lams) <= 0):
        raise DomainError("branch eigenvalues failed to be strictly increasing")
    return ThetaSpectrum(theta, ns, lams, resids)


def boundary_condition_check(h: Sampled, theta: float) -> float:
    """|h(1) + h'(1) - e^{i theta}(h(0) - h'(0))|; ~0 on dom(A_theta)."""
    b = h.boundary
    return float(abs(b.ha + b.dha - np.exp(1j * theta) * (b.h0 - b.dh0)))


# ---------------------------------------------------------------------------
# type 1 extensions
# ---------------------------------------------------------------------------

def _tail_bound(theta: float, N: int) -> float:
    """Closed-form majorant of sum_{|n|>N} 2/(lam_n^2+3): every excluded
    eigenvalue obeys |lam_n| >= (2|n|-1) pi - theta (window membership), and
    sum_{n>N} ((2n-1) pi +- theta)^{-2} is a trigamma value."""
    th = float(theta) % (2.0 * math.pi)
    s = polygamma(1, N + 0.5 + th / (2 * math.pi)) \
        + polygamma(1, N + 0.5 - th / (2 * math.pi))
    return float(2.0 * s / (4.0 * math.pi ** 2))


@dataclass(frozen=True)
class TypeOneExtension:
    """F_theta(x) = sum_{|n|<=N} w_n e^{i lam_n x}, w_n = 2/(lam_n^2+3);
    restriction to (-1, 1) matches e^{-|x|} up to the tail bound."""

    theta: float
    spectrum: ThetaSpectrum
    tail_bound: float

    @property
    def truncation(self) -> int:
        return int(np.max(self.spectrum.branches))

    @property
    def lambdas(self) -> np.ndarray:
        return self.spectrum.lambdas

    @property
    def atom_weights(self) -> np.ndarray:
        return self.spectrum.weights()

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        phases = np.exp(1j * np.outer(x.ravel(), self.lambdas))
        return (phases @ self.atom_weights).reshape(x.shape)

    def restriction_error(self, xs) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        if np.any(np.abs(xs) >= 1.0):
            raise DomainError("restriction error is defined on (-1, 1)")
        return np.abs(self(xs) - np.exp(-np.abs(xs)))


def extend_type1(theta: float, N: int) -> TypeOneExtension:
    spec = solve_theta_spectrum(theta, N)
    return TypeOneExtension(spec.theta, spec, _tail_bound(spec.theta, N))


def extension_measure(ext: TypeOneExtension) -> SpectralMeasure:
    """Purely atomic spectral measure sum 2/(lam^2+3) delta_lam; its Bochner
    transform reproduces the truncated extension exactly."""
    atoms = tuple((float(l), float(w))
                  for l, w in zip(ext.lambdas, ext.atom_weights))
    return SpectralMeasure(np.array([]), np.array([]), atoms=atoms)


def sample_via_spectrum(phi: Callable, ext: TypeOneExtension, x: float,
                        n_panels: int = 256, gl_order: int = 6) -> complex:
    """(T_F phi)(x) = 2 sum_n phihat(lam_n)/(lam_n^2+3) e^{i lam_n x} with
    phihat(lam) = int_0^1 phi(y) e^{-i lam y} dy."""
    if not (0.0 < x < 1.0):
        raise DomainError("sampling formula holds on (0, 1)")
    y, w = panel_nodes(0.0, 1.0, n_panels, gl_order)
    phiv = phi(y) * w
    phihat = (phiv[None, :] * np.exp(-1j * np.outer(ext.lambdas, y))).sum(axis=1)
    return complex(np.sum(2.0 * phihat / (ext.lambdas ** 2 + 3.0)
                          * np.exp(1j * ext.lambdas * x)))


# ---------------------------------------------------------------------------
# unitary evolution in the e_lambda basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaExpansion:
    """Coefficients of an element over {e_lam : lam in Lambda_theta}:
    h = sum_n c_n e_{lam_n}."""

    spectrum: ThetaSpectrum
    coeffs: np.ndarray

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.exp(1j * np.outer(x, self.spectrum.lambdas)) @ self.coeffs

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2 / self.spectrum.weights()))

    def to_element(self, n: int = 2000) -> Sampled:
        lams = self.spectrum.lambdas
        cs = self.coeffs

        def make(coeffs):
            def fn(x):
                scalar = np.isscalar(x) or np.ndim(x) == 0
                xv = np.atleast_1d(np.asarray(x, dtype=float))
                out = np.exp(1j * np.outer(xv, lams)) @ coeffs
                return out[0] if scalar else out
            return fn

        return sampled_from_callable(make(cs), 1.0, n=n, dfn=make(1j * lams * cs))


def expand_in_theta_basis(h: Sampled, ext: TypeOneExtension) -> ThetaExpansion:
    """c_n = <e_n, h> / ||e_n||^2 by the Sobolev-form inner product."""
    lams = ext.lambdas
    coeffs = np.empty(len(lams), dtype=complex)
    for i, lam in enumerate(lams):
        e = complex_exponential(lam, 1.0, n=len(h.grid) - 1)
        coeffs[i] = exp_inner_product(e, h) * 2.0 / (lam * lam + 3.0)
    return ThetaExpansion(ext.spectrum, coeffs)


def unitary_evolve(h, t: float, ext: TypeOneExtension) -> ThetaExpansion:
    """U(t): multiply the n-th coefficient by e^{i lam_n t}.  Accepts either
    a Sampled element (expanded first) or a ThetaExpansion."""
    exp_h = h if isinstance(h, ThetaExpansion) else expand_in_theta_basis(h, ext)
    phases = np.exp(1j * ext.lambdas * t)
    return ThetaExpansion(exp_h.spectrum, exp_h.coeffs * phases)


# ---------------------------------------------------------------------------
# defect vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DefectPair:
    """Candidate defect vectors e^{-x} (for D* xi = +xi) and e^{x-a}
    (for D* xi = -xi) with their H_F norms from the dyadic Parseval sum.
    ``indices`` is (0,0) when the Parseval sums diverge."""

    xi_plus: Optional[Sampled]
    xi_minus: Optional[Sampled]
    norms: Optional[tuple[float, float]]
    indices: tuple[int, int]
    raw_norm_sq: dict


def defect_vectors(kernel: PdKernel, depth: int = 14) -> DefectPair:
    from . import dyadic as _dyadic
    a = kernel.half_width
    reports = {}
    for label, fn in (("e^-x", lambda x: np.exp(-x)), ("e^x", np.exp)):
        reports[label] = _dyadic.membership_by_coefficients(fn, kernel, depth)
    if any(r.verdict == "out" for r in reports.values()):
        return DefectPair(None, None, None, (0, 0),
                          {k: r.parseval_sum for k, r in reports.items()})
    xi_plus = sampled_from_callable(lambda x: np.exp(-x), a,
                                    dfn=lambda x: -np.exp(-x))
    xi_minus = sampled_from_callable(lambda x: np.exp(x - a), a,
                                     dfn=lambda x: np.exp(x - a))
    norm_plus = reports["e^-x"].parseval_sum
    norm_minus = reports["e^x"].parseval_sum * math.exp(-2.0 * a)
    return DefectPair(xi_plus, xi_minus,
                      (math.sqrt(norm_plus), math.sqrt(norm_minus)),
                      (1, 1),
                      {k: r.parseval_sum for k, r in reports.items()})


# ---------------------------------------------------------------------------
# type 2 extensions: the G_r family
# ---------------------------------------------------------------------------

_E = math.e


def _gr_hat(lam, r: float):
    """Fourier transform of G_r (validated against the closed form
    2 e^{-1}(1 - e^{-1} cos + ...) decomposition):

    G_r_hat(l) = [2e(l^2+r^2) + 2(r-1)(cos l (l^2 - r) + l (r+1) sin l)]
                 / [e (l^2+1)(l^2+r^2)].
    """
    lam = np.asarray(lam, dtype=float)
    num = 2.0 * _E * (lam ** 2 + r * r) + 2.0 * (r - 1.0) * (
        np.cos(lam) * (lam ** 2 - r) + lam * (r + 1.0) * np.sin(lam))
    return num / (_E * (lam ** 2 + 1.0) * (lam ** 2 + r * r))


# QAWF decomposition of ghat_r: rational coefficient functions attached to
# cos(l), sin(l) and 1, all integrable against Fourier weights
def _gr_terms(r: float):
    smooth = lambda l: 2.0 / (1.0 + l * l)
    terms = [("cos", lambda l: -1.0 / (1.0 + l * l)),
             ("sin", lambda l: l / (1.0 + l * l))]
    if r > 0:
        terms.append(("cos", lambda l: r / (r * r + l * l)))
        terms.append(("sin", lambda l: -l / (r * r + l * l)))
    else:
        # r = 0: r cos l/(r^2+l^2) -> pi delta_0 (an atom of mass e^{-1} after
        # the 1/(2 pi) normalization); the sin term loses its r^2 regularizer
        terms.append(("sin", lambda l: -1.0 / l))
    return smooth, terms


@dataclass(frozen=True)
class TypeTwoExtension:
    """G_r extension: e^{-|x|} inside (-1, 1), exponential tails e^{-1}
    e^{r(1 -|x|)} outside; spectral density ghat_r = G_r_hat / 2 pi (plus a
    point mass e^{-1} delta_0 when r = 0)."""

    r: float

    def __post_init__(self):
        if not (0.0 <= self.r <= 1.0):
            raise DomainError("r must lie in [0, 1]")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inner = np.exp(-np.abs(x))
        outer = math.exp(-1.0) * np.exp(self.r * (1.0 - np.abs(x)))
        return np.where(np.abs(x) < 1.0, inner, outer)

    def density(self, lam) -> np.ndarray:
        """ghat_r(l); for r = 0 this is only the continuous part."""
        lam = np.asarray(lam, dtype=float)
        if self.r > 0:
            return _gr_hat(lam, self.r) / (2.0 * np.pi)
        with np.errstate(divide="ignore", invalid="ignore"):
            sinc_part = np.where(np.abs(lam) < 1e-8, 1.0 - lam * lam / 6.0,
                                 np.sin(lam) / np.where(lam == 0, 1.0, lam))
        val = (2.0 / (1.0 + lam ** 2)
               + (2.0 / _E) * (-np.cos(lam) / (1.0 + lam ** 2)
                               + lam * np.sin(lam) / (1.0 + lam ** 2)
                               - sinc_part))
        return val / (2.0 * np.pi)

    @property
    def atoms(self) -> tuple[tuple[float, float], ...]:
        return ((0.0, math.exp(-1.0)),) if self.r == 0.0 else ()

    def mass(self) -> float:
        """int ghat_r dl (+ atom), by Fourier-weighted adaptive quadrature."""
        smooth, terms = _gr_terms(self.r)
        total = 2.0 * quad(smooth, 0.0, np.inf, limit=400)[0]
        for kind, f in terms:
            lo = 1e-12 if (self.r == 0.0 and kind == "sin") else 0.0
            total += (2.0 / _E) * 2.0 * quad(f, lo, np.inf, weight=kind,
                                             wvar=1.0, limit=400)[0]
        total /= 2.0 * np.pi
        return total + sum(w for _, w in self.atoms)

    def reconstruct(self, x: float) -> float:
        """int e^{i l x} ghat_r(l) dl (+ atom contribution), via product-to-sum
        splitting so every oscillatory piece is a QUADPACK Fourier integral."""
        ax = abs(float(x))
        smooth, terms = _gr_terms(self.r)
        if ax < 1e-9:          # QAWF needs a genuinely nonzero frequency
            return self.mass()
        total = 2.0 * quad(smooth, 0.0, np.inf, weight="cos", wvar=ax,
                           limit=400)[0]
        for kind, f in terms:
            lo = 1e-12 if (self.r == 0.0 and kind == "sin") else 0.0
            for wv in (1.0 + ax, 1.0 - ax):
                if kind == "cos":
                    # cos(l) cos(ax l) = (cos((1-ax) l) + cos((1+ax) l)) / 2
                    if abs(wv) < 1e-9:
                        total += (2.0 / _E) * quad(f, lo, np.inf, limit=400)[0]
                    else:
                        total += (2.0 / _E) * quad(f, lo, np.inf, weight="cos",
                                                   wvar=wv, limit=400)[0]
                else:
                    # sin(l) cos(ax l) = (sin((1+ax) l) + sin((1-ax) l)) / 2
                    if abs(wv) < 1e-9:
                        continue
                    total += (2.0 / _E) * quad(f, lo, np.inf, weight="sin",
                                               wvar=wv, limit=400)[0]
        total /= 2.0 * np.pi
        return total + sum(w for _, w in self.atoms)  # atoms sit at l = 0

    def density_min_on_grid(self, L: float = 200.0, n: int = 40001) -> float:
        lam = np.linspace(-L, L, n)
        return float(np.min(self.density(lam)))


def g_r_extension(r: float) -> TypeTwoExtension:
    return TypeTwoExtension(float(r))


# ---------------------------------------------------------------------------
# discrete-subset isometry criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsometryReport:
    passed: bool
    max_gap: float
    gaps: np.ndarray
    psd_ok: bool
    witness: Optional[np.ndarray] = None


def discrete_isometry_check(S: Sequence[float], F_vals: Callable,
                            mu: SpectralMeasure, trials: int = 100,
                            tol: float = 1e-6, seed: int = 0) -> IsometryReport:
    """Compare the Gram quadratic form sum conj(c_j) c_k F(s_j - s_k) with
    int |sum c_k e^{i s_k l}|^2 dmu over random coefficient vectors.

    F_vals is a callable on the difference set.  Fails immediately (with an
    eigenvector witness) when the Gram matrix is not PSD.
    """
    S = np.asarray(S, dtype=float)
    n = len(S)
    G = np.asarray([[F_vals(si - sj) for sj in S] for si in S], dtype=complex)
    if np.max(np.abs(G - G.conj().T)) > 1e-12:
        raise DomainError("F_vals is not Hermitian on S - S")
    evals, evecs = np.linalg.eigh(0.5 * (G + G.conj().T))
    if evals[0] < -EPS_PSD:
        return IsometryReport(False, math.inf, np.array([]), False,
                              witness=evecs[:, 0])
    mu_hat = np.asarray([[bochner_transform(mu, sk - sj) for sk in S] for sj in S])
    rng = np.random.default_rng(seed)
    gaps = np.empty(trials)
    for t in range(trials):
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        lhs = float(np.real(np.conj(c) @ G @ c))
        rhs = float(np.real(np.conj(c) @ mu_hat @ c))
        gaps[t] = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return IsometryReport(bool(np.all(gaps < tol)), float(np.max(gaps)),
                          gaps, True)
