"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
report.  Every tolerance is pinned here; nothing is deferred to runtime
calibration.
"""

import math
import time

import numpy as np
import pytest

from pdext import (MeasureOnInterval, bochner_transform, concentration,
                   deficiency_indices, exp_kernel, kernel_from_name,
                   second_moment, triangle_kernel)
from pdext.dyadic import expand, norm_table, onb_gram, build_onb, parseval_norm
from pdext.elliptic import exp_bvp_spec, solve_transcendental
from pdext.extensions import (discrete_isometry_check, extend_type1,
                              g_r_extension, solve_theta_spectrum)
from pdext.mercer import NystromConfig, discretize, hf_inner_via_inverse
from pdext.rkhs import (complex_exponential, e_lambda_measure,
                        element_from_measure, exp_inner_product)

E = math.e


def report(tag: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    print(f"[ACCEPTANCE] {tag}: {status}" + (f"  ({detail})" if detail else ""))


def test_c01_trace_identity(kexp, ktri):
    """Nystrom trace equals the interval length to 1e-9 at 400 nodes."""
    t0 = time.perf_counter()
    dec_e = discretize(kexp, NystromConfig(400))
    dec_t = discretize(ktri, NystromConfig(400))
    err_e = abs(dec_e.trace() - 1.0)
    err_t = abs(dec_t.trace() - 0.5)
    elapsed = time.perf_counter() - t0
    ok = err_e < 1e-9 and err_t < 1e-9 and elapsed < 5.0
    report("C01 trace identity", ok,
           f"exp err {err_e:.2e}, triangle err {err_t:.2e}, {elapsed:.2f}s")
    assert err_e < 1e-9
    assert err_t < 1e-9
    assert elapsed < 5.0


def test_c02_eigenvalue_root_agreement(kexp):
    """Top 5 Nystrom eigenvalues vs 2/(1+k^2) over tan k = 2k/(k^2-1),
    including the 800-node discretization in the timed budget."""
    t0 = time.perf_counter()
    dec = discretize(kexp, NystromConfig(800))
    spec = exp_bvp_spec()
    ks = solve_transcendental(spec, 5)
    mapped = spec.mercer_map(ks)
    rel = np.abs(dec.eigenvalues[:5] - mapped) / mapped
    elapsed = time.perf_counter() - t0
    ok = np.max(rel) < 1e-4 and elapsed < 30.0
    report("C02 eigenvalue/root agreement", ok,
           f"max rel err {np.max(rel):.2e}, {elapsed:.2f}s")
    assert np.max(rel) < 1e-4
    assert elapsed < 30.0


def test_c03_norm_formula(dec_exp_800):
    """<e_lam, e_lam> = (lam^2+3)/2 to 1e-10; the rank-200 Mercer-inverse
    route agrees within 1e-2 (relative: the targets span 1.5 to 14, and the
    rank truncation leaves a Parseval tail proportional to the norm)."""
    worst_exact = 0.0
    worst_inv = 0.0
    for lam in (0.0, 1.0, 2.0, 5.0):
        target = (lam * lam + 3.0) / 2.0
        e = complex_exponential(lam, 1.0)
        v = exp_inner_product(e, e).real
        worst_exact = max(worst_exact, abs(v - target))
        hv = np.exp(1j * lam * dec_exp_800.nodes)
        v2 = hf_inner_via_inverse(hv, hv, dec_exp_800, 200).real
        worst_inv = max(worst_inv, abs(v2 - target) / target)
    ok = worst_exact < 1e-10 and worst_inv < 1e-2
    report("C03 norm formula (lam^2+3)/2", ok,
           f"closed-quadrature err {worst_exact:.2e}, inverse route rel err "
           f"{worst_inv:.2e}")
    assert worst_exact < 1e-10
    assert worst_inv < 1e-2


def test_c04_theta_residuals_and_orthogonality():
    """Residuals < 1e-10 and pairwise H_F-orthogonality < 1e-9 for the first
    9 eigenvalues at theta in {0, 0.8, pi}."""
    worst_res = 0.0
    worst_ip = 0.0
    for theta in (0.0, 0.8, math.pi):
        spec = solve_theta_spectrum(theta, 4)     # branches -4..4: 9 roots
        worst_res = max(worst_res, float(np.max(spec.residuals)))
        es = [complex_exponential(lam, 1.0) for lam in spec.lambdas]
        for i in range(9):
            for j in range(i + 1, 9):
                worst_ip = max(worst_ip, abs(exp_inner_product(es[i], es[j])))
    ok = worst_res < 1e-10 and worst_ip < 1e-9
    report("C04 Lambda_theta residuals/orthogonality", ok,
           f"max residual {worst_res:.2e}, max |<e,e>| {worst_ip:.2e}")
    assert worst_res < 1e-10
    assert worst_ip < 1e-9


def test_c05_type1_restriction(rng):
    """Type-1 extension restricted to (-1, 1) within the tail bound at
    N = 100; tail < 0.01; PSD Grams on [-5, 5]."""
    ok_all = True
    details = []
    for theta in (0.0, 0.8):
        ext = extend_type1(theta, 100)
        xs = np.linspace(-0.99, 0.99, 397)
        sup = float(ext.restriction_error(xs).max())
        ok = sup <= ext.tail_bound and ext.tail_bound < 0.01
        pts = rng.uniform(-5, 5, 12)
        G = ext(pts[:, None] - pts[None, :])
        min_eig = float(np.linalg.eigvalsh(0.5 * (G + G.conj().T))[0])
        ok = ok and min_eig >= -1e-8
        ok_all = ok_all and ok
        details.append(f"theta={theta}: sup {sup:.3e} <= tail {ext.tail_bound:.3e}, "
                       f"min eig {min_eig:.1e}")
        assert sup <= ext.tail_bound
        assert ext.tail_bound < 0.01
        assert min_eig >= -1e-8
    report("C05 type-1 restriction", ok_all, "; ".join(details))


def test_c06_type2_family():
    """G_r: unit mass of ghat_r to 1e-4 and Bochner reconstruction of
    e^{-|x|} on [-0.9, 0.9] below 1e-3, for r in {0, 0.5, 0.8, 1}."""
    worst_mass = 0.0
    worst_rec = 0.0
    for r in (0.0, 0.5, 0.8, 1.0):
        g = g_r_extension(r)
        worst_mass = max(worst_mass, abs(g.mass() - 1.0))
        for x in np.linspace(-0.9, 0.9, 19):
            worst_rec = max(worst_rec, abs(g.reconstruct(float(x))
                                           - math.exp(-abs(x))))
    ok = worst_mass < 1e-4 and worst_rec < 1e-3
    report("C06 type-2 family", ok,
           f"mass err {worst_mass:.2e}, reconstruction err {worst_rec:.2e}")
    assert worst_mass < 1e-4
    assert worst_rec < 1e-3


def test_c07_dyadic_onb_tables(ktri, kexp):
    """Closed-form table norms to 1e-12 and ONB Gram = identity to 1e-10
    through depth 6."""
    tri_vals = [v for _, v in norm_table(ktri, 3)]
    tri_want = [1.0, 0.75, 0.25, 0.125, 0.125] + [0.0625] * 4
    tri_err = max(abs(a - b) for a, b in zip(tri_vals, tri_want))
    e1, eh = E ** -1.0, E ** -0.5
    exp_vals = [v for _, v in norm_table(kexp, 2)]
    exp_want = [1.0, 1 - e1 * e1, (1 - e1) / (1 + e1)] + [(1 - eh) / (1 + eh)] * 2
    exp_err = max(abs(a - b) for a, b in zip(exp_vals, exp_want))
    gram_dev = 0.0
    for ker in (ktri, kexp):
        els = build_onb(ker, 6)
        G = onb_gram(els, ker)
        gram_dev = max(gram_dev, float(np.max(np.abs(G - np.eye(len(els))))))
    ok = tri_err < 1e-12 and exp_err < 1e-12 and gram_dev < 1e-10
    report("C07 dyadic ONB tables", ok,
           f"table err {max(tri_err, exp_err):.1e}, gram dev {gram_dev:.1e}")
    assert tri_err < 1e-12
    assert exp_err < 1e-12
    assert gram_dev < 1e-10


def test_c08_defect_vector_norms(kexp, ktri):
    """Parseval sums at depth 14: exp defect vectors converge to 1 within
    1e-3; the triangle e^{-x} norm matches the printed 1.01755 within 1e-3.
    (The triangle e^x constant is covered by the companion xfail test.)"""
    t0 = time.perf_counter()
    exp_up = parseval_norm(expand(lambda x: np.exp(-np.asarray(x, dtype=float)),
                                  kexp, 14))
    exp_dn = parseval_norm(expand(lambda x: np.exp(np.asarray(x, dtype=float) - 1),
                                  kexp, 14))
    tri_dn = parseval_norm(expand(lambda x: np.exp(-np.asarray(x, dtype=float)),
                                  ktri, 14))
    tri_up = parseval_norm(expand(np.exp, ktri, 14))
    elapsed = time.perf_counter() - t0
    # independent closed forms via the measure representation of e^{+-x}
    exact_up = (7 * E + 8 * math.sqrt(E) + 1) / 12
    ok = (abs(exp_up - 1) < 1e-3 and abs(exp_dn - 1) < 1e-3
          and abs(tri_dn - 1.01755) < 1e-3 and elapsed < 60.0)
    report("C08 defect-vector norms", ok,
           f"exp {exp_up:.6f}/{exp_dn:.6f} -> 1, triangle e^-x {tri_dn:.6f} "
           f"vs 1.01755, e^x {tri_up:.6f} (exact {exact_up:.6f}; printed "
           f"2.76598 is off, see xfail companion), {elapsed:.1f}s")
    assert abs(exp_up - 1.0) < 1e-3
    assert abs(exp_dn - 1.0) < 1e-3
    assert abs(tri_dn - 1.01755) < 1e-3
    # the converged sums equal the independent closed forms to 1e-8
    assert tri_up == pytest.approx(exact_up, abs=1e-8)
    assert tri_dn == pytest.approx(exact_up / E, abs=1e-8)
    assert elapsed < 60.0


@pytest.mark.xfail(
    strict=True,
    reason="Criterion 8 pins the triangle ||e^x||^2 to the printed value "
    "2.76598 +- 1e-3.  Three independent routes (dyadic Parseval at depth "
    "14, rank-increasing Mercer-inverse norms, and the exact measure "
    "representation giving (7e + 8 sqrt(e) + 1)/12 = 2.7681452470...) all "
    "agree on 2.768145, which is 2.2e-3 away from the printed constant; "
    "the printed value appears to carry a transcription error, so this "
    "sub-criterion is unattainable for a correct implementation.")
def test_c08_triangle_e_x_printed_constant(ktri):
    tri_up = parseval_norm(expand(np.exp, ktri, 14))
    report("C08 (printed 2.76598 constant)", abs(tri_up - 2.76598) < 1e-3,
           f"converged value {tri_up:.6f}, documented spec defect")
    assert abs(tri_up - 2.76598) < 1e-3


def test_c09_moment_dichotomy(kexp, ktri, kbsx4):
    """Three-row dichotomy: (1,1), (1,1), (0,0)."""
    got = [deficiency_indices(k) for k in (kexp, ktri, kbsx4)]
    ok = got == [(1, 1), (1, 1), (0, 0)]
    report("C09 moment dichotomy", ok, f"indices {got}")
    assert got == [(1, 1), (1, 1), (0, 0)]


def test_c10_concentration():
    """q(delta_x) = 1 and dispersion 0 exactly; q(uniform) = 2/e to 1e-8."""
    q1, d1 = concentration(MeasureOnInterval.delta(0.3))
    qu, du = concentration(MeasureOnInterval.uniform_probability((0.0, 1.0)))
    ok = q1 == 1.0 and d1 == 0.0 and abs(qu - 2.0 / E) < 1e-8
    report("C10 concentration functional", ok,
           f"q(delta) {q1}, q(uniform) err {abs(qu - 2 / E):.2e}")
    assert q1 == 1.0 and d1 == 0.0
    assert abs(qu - 2.0 / E) < 1e-8
    assert abs(du - (1.0 - math.log(2.0))) < 1e-8


def test_c11_discrete_isometry(kexp):
    """S = {0, 1/3, 1/2} with the Cauchy measure: relative gap < 1e-6 over
    100 random coefficient vectors."""
    rep = discrete_isometry_check([0.0, 1.0 / 3.0, 0.5],
                                  lambda t: float(kexp(t)), kexp.measure,
                                  trials=100, tol=1e-6)
    report("C11 discrete isometry", rep.passed, f"max gap {rep.max_gap:.2e}")
    assert rep.passed
    assert rep.max_gap < 1e-6


def test_c12_measure_representation(kexp):
    """element_from_measure(mu_lam) reproduces e^{i lam x} to 1e-6 at 2000
    nodes for lam in {0, 1, 3}."""
    worst = 0.0
    for lam in (0.0, 1.0, 3.0):
        el = element_from_measure(e_lambda_measure(lam), kexp, n=2000)
        worst = max(worst, float(np.max(np.abs(
            el.values - np.exp(1j * lam * el.grid)))))
    ok = worst < 1e-6
    report("C12 measure representation", ok, f"sup err {worst:.2e}")
    assert worst < 1e-6
