"""Acceptance gate: one test per shipped guarantee, at its stated tolerance.

Each test prints a single `criterion NN: PASS/FAIL` line (visible with -s or
in captured output). Criterion 3 is expected to fail: the compact quartic
closed form for the symmetric two-factor family is the d = 1 specialization
(its derivative cannot carry the degree-2d base factor demanded by the
ansatz), and the assembled degree-2(d+1) profile is the correct one for
d >= 2. The test is kept red rather than weakened; see README.
"""

import random
from fractions import Fraction

import numpy as np
import pytest

from orthotoric.exact import Polynomial, elem_sym, gauss_legendre
from orthotoric.geometry import (
    MetricField,
    curvature,
    momentum_spectrum,
    orthotoric_field,
    sample_points,
    verify_einstein,
    verify_extremal,
    verify_hamiltonian,
)
from orthotoric.polytopes import (
    RationalDelzantPolytope,
    canonical_hessian,
    check_toric_boundary,
    dual_pairing_check,
    ke_surface_polytope,
    orthotoric_simplex,
)
from orthotoric.profiles import (
    WeightedProjectiveTag,
    bochner_flat_profile,
    check_orthocompact,
    fubini_study_profile,
    ke_surface_profiles,
    orthotoric_H,
    profile_labels,
)
from orthotoric.wbf import (
    LineBundleProblem,
    blowdown_problem,
    bochner_flat_check,
    build_solution,
    check_sign_conditions,
    cp2xcp3_problem,
    extremal_profile_l1,
    h_eval,
    h_exact,
    koiso_sakane_problem,
    solution_to_calabi,
    solve_blowdown,
    solve_wbf,
)

CP2 = RationalDelzantPolytope([[1, 0], [0, 1], [-1, -1]], [0, 0, 1])
SQUARE = RationalDelzantPolytope([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 1, 1])


def _verdict(n: int, ok: bool, detail: str = "") -> None:
    line = f"criterion {n:02d}: {'PASS' if ok else 'FAIL'}"
    if detail and not ok:
        line += f" [{detail}]"
    print(line)
    assert ok, detail or line


def test_criterion_01():
    """Single factor, d = 2: moment polynomial equals (4x^2/15)(s(x^2+5)-6x)."""
    bad = []
    for s in (Fraction(1, 2), Fraction(1), Fraction(3)):
        got = h_exact(LineBundleProblem(d=(2,), s=(s,)), 0)
        want = Polynomial([0, 0, Fraction(4, 3) * s, Fraction(-8, 5), Fraction(4, 15) * s])
        if got.coeffs != want.coeffs:
            bad.append(str(s))
    _verdict(1, not bad, f"coefficient mismatch at s in {bad}")


def test_criterion_02():
    """Single factor, d = 1: h = -(2x/3)(x^2+1-2sx); s = 2 root is 2 - sqrt(3)."""
    bad = []
    for s in (Fraction(1, 2), Fraction(2), Fraction(-1), Fraction(0)):
        got = h_exact(LineBundleProblem(d=(1,), s=(s,)), 0)
        want = Polynomial([0, Fraction(-2, 3), Fraction(4, 3) * s, Fraction(-2, 3)])
        if got.coeffs != want.coeffs:
            bad.append(str(s))
    sols = solve_wbf(LineBundleProblem(d=(1,), s=(Fraction(2),)))
    root_ok = len(sols) == 1 and abs(sols[0].x[0] - (2 - np.sqrt(3.0))) < 1e-12
    _verdict(2, not bad and root_ok, f"coeff mismatches {bad}, root_ok={root_ok}")


def test_criterion_03():
    """Symmetric two-factor family: roots +-k/(d+1), B = 0, and the quartic
    closed form -((d+1)^2/k^2)(1-z^2) + (1-z^4)/2 for the fibre profile.

    Expected to FAIL: the quartic matches only for d = 1. The ansatz demands
    F' = p_c q with p_c = (z^2 - (d+1)^2/k^2)^d of degree 2d, so F has degree
    2(d+1); a quartic cannot satisfy it for d >= 2. The assembled profile
    carries the factor exactly and verifies Ric = g numerically, so it is the
    trusted value; the quartic is the d = 1 specialization.
    """
    pairs = [(1, 1), (2, 1), (2, 2), (3, 2)]
    numeric_bad = []
    mismatched = []
    z = Polynomial.x()
    for d, k in pairs:
        want = Fraction(k, d + 1)
        sols = solve_wbf(koiso_sakane_problem(d, k))
        best = min(
            sols,
            key=lambda s: max(abs(s.x[0] - float(want)), abs(s.x[1] + float(want))),
        )
        err = max(abs(best.x[0] - float(want)), abs(best.x[1] + float(want)))
        if err > 1e-10 or abs(float(best.B)) > 1e-10:
            numeric_bad.append((d, k, err, float(best.B)))
        exact = build_solution(koiso_sakane_problem(d, k), [want, -want])
        eta2 = Fraction((d + 1) ** 2, k**2)
        quartic = Polynomial([-eta2 + Fraction(1, 2), 0, eta2, 0, Fraction(-1, 2)])
        if exact.F.coeffs != quartic.coeffs:
            mismatched.append((d, k))
            # adjudication evidence: the assembled profile's derivative
            # carries the required base factor p_c = (z^2 - eta^2)^d, the
            # quartic's derivative does not
            pc = (z * z - Polynomial.constant(eta2)) ** d
            _, rem_built = exact.F.derivative().divmod(pc)
            assert all(c == 0 for c in rem_built.coeffs)
            _, rem_quartic = quartic.derivative().divmod(pc)
            assert any(c != 0 for c in rem_quartic.coeffs)
    assert not numeric_bad, f"root/B failures: {numeric_bad}"
    _verdict(
        3,
        not mismatched,
        f"quartic closed form matches only d=1; mismatched (d,k)={mismatched}; "
        "the ansatz forces deg F = 2(d+1) via the base factor p_c of degree "
        "2d, which the quartic's derivative lacks; the assembled profile "
        "carries it exactly and passes the Einstein check (kept red, see "
        "README)",
    )


def test_criterion_04():
    """Sign table for one factor: h(0) = 0, h'(0) = 2(d-2)/3, sign h(1) =
    sign(s-1); existence guaranteed in exactly the three stated regimes."""
    bad = []
    for d in range(1, 6):
        for s in (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)):
            prob = LineBundleProblem(d=(d,), s=(s,))
            rep = check_sign_conditions(prob)
            hpoly = h_exact(prob, 0)
            conds = [
                rep["pass"],
                hpoly(Fraction(0)) == 0,
                hpoly.derivative()(Fraction(0)) == Fraction(2 * (d - 2), 3),
                rep["sign_h1_matches_s_minus_1"],
            ]
            want_guarantee = (d > 2 and s < 1) or (d == 2 and 0 < s < 1) or (d == 1 and s > 1)
            conds.append(rep["guaranteed_by_theorem"] == want_guarantee)
            if want_guarantee:
                conds.append(rep["root_exists"])
            if not all(conds):
                bad.append((d, str(s), conds))
    _verdict(4, not bad, f"failures: {bad}")


def test_criterion_05():
    """Mixed product instance (d = (2,3), s = (3,-2)): root in the open
    quadrant with moment and normalization residuals below 1e-10."""
    sols = solve_wbf(cp2xcp3_problem())
    ok = bool(sols)
    detail = "no roots found"
    if ok:
        sol = sols[0]
        hres = max(float(v) for v in sol.h_residuals)
        cares = max(float(v) for v in sol.ca_residuals)
        ok = 0 < sol.x[0] < 1 and -1 < sol.x[1] < 0 and hres < 1e-10 and cares < 1e-10
        detail = f"x={sol.x}, h={hres:.2e}, ca={cares:.2e}"
    _verdict(5, ok, detail)


def test_criterion_06():
    """Blow-down system: f(-1) < 0, f(0) = 0, f'(0) < 0 exactly; a root in
    (-1, 0); f(-1/2) != 0 so the Einstein position is excluded."""
    res = solve_blowdown(blowdown_problem())
    conds = {
        "consistent": res.consistent,
        "f(-1)<0": res.f_at_minus1 < 0,
        "f(0)=0": res.f_at_0 == 0,
        "f'(0)<0": res.fprime_at_0 < 0,
        "root in (-1,0)": len(res.roots) >= 1 and all(-1 < r < 0 for r in res.roots),
        "f(-1/2)!=0": res.f_at_minus_half != 0,
    }
    _verdict(6, all(conds.values()), f"{ {k: v for k, v in conds.items() if not v} }")


def test_criterion_07():
    """Orbifold surface profiles compactify exactly; the (2,1) metric is
    Einstein: max |Ric - lambda g| < 1e-3 |lambda| and lambda spread < 1e-3
    over 10 seeded interior points."""
    bad = []
    for p, q in ((2, 1), (3, 1), (3, 2)):
        prof, _ = ke_surface_profiles(p, q)
        ca, cb = profile_labels(prof)
        rep = check_orthocompact(prof, ca, cb)
        if not rep["pass"]:
            bad.append((p, q, rep["failures"]))
    prof, _ = ke_surface_profiles(2, 1)
    field = orthotoric_field(prof)
    pts = sample_points(field.data, 10, 7)
    lam, dev = verify_einstein(field, pts)
    lams = []
    for v in pts:
        rep = curvature(field, v)
        lams.append(float(np.sum(rep.ricci * rep.g) / np.sum(rep.g * rep.g)))
    spread = (max(lams) - min(lams)) / abs(float(np.mean(lams)))
    ok = not bad and dev < 1e-3 * abs(lam) and spread < 1e-3
    _verdict(7, ok, f"compactify failures {bad}, dev={dev:.2e}, lambda spread={spread:.2e}")


def test_criterion_08():
    """Orthotoric m = 2, beta = (0,1,2), c = 1: scalar curvature 6 within
    1e-3 at 10 points, hamiltonian residual < 1e-3, momentum spectrum equals
    the xi coordinates doubled within 1e-8."""
    prof = fubini_study_profile([0, 1, 2], 1)
    field = orthotoric_field(prof)
    pts = sample_points(field.data, 10, 3)
    worst_scal = max(abs(curvature(field, v).scalar - 6.0) for v in pts)
    worst_ham = max(verify_hamiltonian(field, v) for v in pts)
    worst_spec = 0.0
    for v in pts:
        spec = momentum_spectrum(field, v)
        want = np.sort(np.array([v[0], v[0], v[1], v[1]]))
        worst_spec = max(worst_spec, float(np.abs(spec - want).max()))
    ok = worst_scal < 1e-3 and worst_ham < 1e-3 and worst_spec < 1e-8
    _verdict(8, ok, f"scal dev {worst_scal:.2e}, ham {worst_ham:.2e}, spec {worst_spec:.2e}")


def test_criterion_09():
    """The inverse canonical Hessian of the unit-label simplex equals the
    Fubini-Study orthotoric H at 25 random interior points, m = 1, 2, 3,
    componentwise within 1e-10."""
    worst_all = {}
    for m in (1, 2, 3):
        betas = list(range(m + 1))
        P = orthotoric_simplex(betas, [1] * (m + 1), 1)
        field = canonical_hessian(P)
        prof = fubini_study_profile(betas, 1)
        rng = np.random.default_rng(100 + m)
        bounds = prof.box_bounds_float()
        worst = 0.0
        for _ in range(25):
            xi = np.array([a + (b - a) * rng.uniform(0.05, 0.95) for a, b in bounds])
            sigma = elem_sym([Fraction(float(v)) for v in xi])
            h_prof = orthotoric_H(prof, xi)
            h_canon = field.eval_float(np.array([float(s) for s in sigma]))
            worst = max(worst, float(np.abs(h_canon - h_prof).max()))
        worst_all[m] = worst
    ok = all(w <= 1e-10 for w in worst_all.values())
    _verdict(9, ok, f"componentwise deviations {worst_all}")


def test_criterion_10():
    """Canonical Hessians pass the toric boundary conditions with exact zero
    residuals on the simplex, the square, and the (2,1) quadrilateral; the
    11/10-scaled Hessian fails the derivative condition with reported factor
    1.1 within 1e-9."""
    bad = []
    for name, P in (("cp2", CP2), ("square", SQUARE), ("m21", ke_surface_polytope(2, 1))):
        rep = check_toric_boundary(canonical_hessian(P), P, samples=3, tol=1e-8)
        exact_zero = all(
            f["cond_a_residual"] == 0 and f["cond_b_residual"] == 0 and f["cond_c_positive"]
            for f in rep["faces"]
        )
        if not (rep["mode"] == "exact" and rep["pass"] and exact_zero):
            bad.append(name)
    scaled = check_toric_boundary(canonical_hessian(SQUARE).scaled(Fraction(11, 10)), SQUARE, samples=3, tol=1e-8)
    factor_ok = not scaled["pass"] and all(
        abs(f["cond_b_factor"] - 1.1) <= 1e-9 for f in scaled["faces"]
    )
    _verdict(10, not bad and factor_ok, f"exact failures {bad}, factor_ok={factor_ok}")


def test_criterion_11():
    """Generator pairing is the difference of Kronecker deltas, exactly, on
    50 random rational instances with m <= 4."""
    rng = random.Random(211)
    bad = 0
    for _ in range(50):
        m = rng.randint(1, 4)
        betas = set()
        while len(betas) < m + 1:
            betas.add(Fraction(rng.randint(-12, 12), rng.randint(1, 6)))
        c = Fraction(rng.choice([x for x in range(-5, 6) if x]), rng.randint(1, 4))
        ok, _table = dual_pairing_check(sorted(betas), c)
        if not ok:
            bad += 1
    _verdict(11, bad == 0, f"{bad}/50 instances failed")


def test_criterion_12():
    """Weighted projective profile for weights (3,2,1): labels n = (2,3,6),
    beta_j = -1/(c n_j) up to the common shift, exact endpoint conditions;
    curvature profile polynomial checks: weighted true, orbifold-surface
    family false."""
    tag = WeightedProjectiveTag([3, 2, 1])
    labels_ok = tag.labels == [2, 3, 6]
    prof, betas = bochner_flat_profile(tag, 1, 0)
    betas_ok = betas == [Fraction(-1, 2), Fraction(-1, 3), Fraction(-1, 6)]
    theta = prof.thetas[0]
    endpoint_ok = True
    for j, bj in enumerate(betas):
        if theta(bj) != 0:
            endpoint_ok = False
        prod = Fraction(1)
        for k, bk in enumerate(betas):
            if k != j:
                prod *= bj - bk
        if theta.derivative()(bj) != Fraction(-1, tag.labels[j]) * prod:
            endpoint_ok = False
    flat_ok = bochner_flat_check(prof)
    ke_prof, _ = ke_surface_profiles(2, 1)
    ke_not_flat = not bochner_flat_check(ke_prof)
    ok = labels_ok and betas_ok and endpoint_ok and flat_ok and ke_not_flat
    _verdict(
        12,
        ok,
        f"labels_ok={labels_ok} betas_ok={betas_ok} endpoint_ok={endpoint_ok} "
        f"flat_ok={flat_ok} ke_not_flat={ke_not_flat}",
    )


def test_criterion_13():
    """Exact antiderivative integration agrees with 32-node Gauss-Legendre
    quadrature to 1e-12 relative on 100 randomized moment integrands."""
    rng = np.random.default_rng(1300)
    nodes, weights = gauss_legendre(32)
    worst = 0.0
    for _ in range(100):
        n_fac = int(rng.integers(1, 4))
        dims = tuple(int(rng.integers(1, 5)) for _ in range(n_fac))
        s = tuple(Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5))) for _ in range(n_fac))
        x = []
        for _ in range(n_fac):
            v = Fraction(int(rng.integers(-9, 10)), 16)
            x.append(v if v != 0 else Fraction(1, 16))
        prob = LineBundleProblem(d=dims, s=s)
        exact = [float(v) for v in h_eval(prob, x)]
        coeffs = np.array([1.0])
        for xa, da in zip(x, dims):
            for _ in range(da):
                coeffs = np.convolve(coeffs, np.array([1.0, float(xa)]))
        for a in range(n_fac):
            xa, sa = float(x[a]), float(s[a])
            H = np.array([xa * xa * sa - xa, 1.0 - xa * xa, xa - xa * xa * sa])
            vals = np.polynomial.polynomial.polyval(nodes, np.convolve(coeffs, H))
            quad = float(np.dot(weights, vals))
            worst = max(worst, abs(quad - exact[a]) / max(1.0, abs(exact[a])))
    _verdict(13, worst <= 1e-12, f"worst relative disagreement {worst:.3e}")


def test_criterion_14():
    """Order-1 extremal system on a consistent single-factor instance
    reproduces the solved profile exactly; the metric passes the affine
    scalar-curvature fit with residual < 1e-3 on 10 points."""
    prob = LineBundleProblem(d=(2,), s=(Fraction(4, 7),))
    sol = build_solution(prob, [Fraction(1, 2)])
    res = extremal_profile_l1([(2, Fraction(16, 7))], [Fraction(-2)])
    exact_ok = res.F.coeffs == sol.F.coeffs
    data = solution_to_calabi(prob, sol)
    field = MetricField(data)
    pts = sample_points(data, 10, 14)
    ver = verify_extremal(field, pts)
    ok = exact_ok and ver["residual"] < 1e-3
    _verdict(14, ok, f"exact match {exact_ok}, extremal residual {ver['residual']:.2e}")
