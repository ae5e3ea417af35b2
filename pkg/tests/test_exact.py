"""Exact-layer unit and property tests: polynomials, quadrature, lattices."""

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthotoric.exact import (
    IntegerLattice,
    Polynomial,
    RationalMatrix,
    cauchy_root_bound,
    count_roots_halfopen,
    count_roots_open,
    elem_sym,
    gauss_legendre,
    gauss_legendre_integrate,
    hermite_normal_form,
    int_det,
    lagrange_interpolate,
    poly_integrate_interval,
    rational_str,
    real_roots,
    real_roots_mult,
    solve_linear_system,
    to_rational,
)

rationals = st.fractions(
    min_value=Fraction(-8), max_value=Fraction(8), max_denominator=12
)


def poly_of(coeffs):
    return Polynomial([Fraction(c) for c in coeffs])


class TestPolynomial:
    def test_arithmetic(self):
        p = poly_of([1, 2, 3])
        q = poly_of([0, -1])
        assert (p * q).coeffs == [Fraction(0), Fraction(-1), Fraction(-2), Fraction(-3)]
        assert (p + q).coeffs == [Fraction(1), Fraction(1), Fraction(3)]
        assert p(Fraction(2)) == 17

    def test_divmod_roundtrip(self):
        p = poly_of([2, 0, -3, 1, 4])
        d = poly_of([1, 1, 2])
        q, r = p.divmod(d)
        assert (q * d + r).coeffs == p.coeffs
        assert r.degree < d.degree

    def test_derivative_antiderivative(self):
        p = poly_of([5, -1, 7, 2])
        assert p.antiderivative().derivative().coeffs == p.coeffs

    def test_pow(self):
        p = poly_of([1, 1])
        assert (p ** 3).coeffs == [Fraction(1), Fraction(3), Fraction(3), Fraction(1)]

    @given(st.lists(rationals, min_size=1, max_size=5), st.lists(rationals, min_size=1, max_size=5))
    def test_mul_evaluates(self, a, b):
        p, q = Polynomial(a), Polynomial(b)
        x = Fraction(3, 7)
        assert (p * q)(x) == p(x) * q(x)


class TestIntegration:
    def test_interval_value(self):
        # int_0^2 (3t^2 - t) dt = 8 - 2 = 6
        assert poly_integrate_interval(poly_of([0, -1, 3]), 0, 2) == 6

    def test_orientation(self):
        p = poly_of([1, 1])
        assert poly_integrate_interval(p, 1, 0) == -poly_integrate_interval(p, 0, 1)

    def test_gauss_legendre_nodes(self):
        x, w = gauss_legendre(32)
        assert len(x) == len(w) == 32
        assert np.all(w > 0)
        assert abs(w.sum() - 2.0) < 1e-14
        assert np.abs(x + x[::-1]).max() < 1e-14  # symmetric nodes

    @settings(max_examples=60, deadline=None)
    @given(st.lists(rationals, min_size=1, max_size=10))
    def test_quadrature_matches_exact(self, coeffs):
        p = Polynomial(coeffs)
        exact = float(poly_integrate_interval(p, -1, 1))
        quad = gauss_legendre_integrate(p, -1, 1, 32)
        scale = max(1.0, abs(exact))
        assert abs(quad - exact) <= 1e-12 * scale

    def test_quadrature_degree_limit(self):
        # GL(n) integrates degree 2n-1 exactly; degree 63 with n = 32
        p = poly_of([0] * 63 + [1])
        assert abs(gauss_legendre_integrate(p, -1, 1, 32) - float(poly_integrate_interval(p, -1, 1))) < 1e-12


class TestElemSym:
    def test_values(self):
        e = elem_sym([Fraction(1), Fraction(2), Fraction(3)])
        assert e == [Fraction(6), Fraction(11), Fraction(6)]

    @given(st.lists(rationals, min_size=1, max_size=4))
    def test_vieta(self, roots):
        e = elem_sym(roots)
        prod = Polynomial([Fraction(1)])
        for r in roots:
            prod = prod * Polynomial([-r, Fraction(1)])
        # prod = t^n - e1 t^(n-1) + e2 t^(n-2) - ...
        n = len(roots)
        for k in range(1, n + 1):
            assert prod.coeffs[n - k] == (-1) ** k * e[k - 1]


class TestHNF:
    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(min_value=1, max_value=4).flatmap(
            lambda m: st.lists(
                st.lists(st.integers(min_value=-9, max_value=9), min_size=m, max_size=m),
                min_size=m,
                max_size=m + 2,
            ).map(lambda cols: [list(r) for r in zip(*cols)])
        )
    )
    def test_invariants(self, mat):
        h, u = hermite_normal_form(mat)
        n = len(mat[0])
        assert abs(int_det(u)) == 1
        # H = mat * U
        prod = [
            [sum(mat[i][k] * u[k][j] for k in range(n)) for j in range(n)]
            for i in range(len(mat))
        ]
        assert prod == h

    def test_column_echelon(self):
        h, u = hermite_normal_form([[2, 4, 4], [-6, 6, 12]])
        # pivots positive, staircase by columns
        lead = [next((i for i, x in enumerate(col) if x != 0), None) for col in zip(*h)]
        nz = [l for l in lead if l is not None]
        assert nz == sorted(nz)

    def test_square_determinant_preserved(self):
        m = [[4, 2], [1, 3]]
        h, u = hermite_normal_form(m)
        assert abs(int_det(h)) == abs(int_det(m)) == 10

    def test_lattice_index(self):
        lat = IntegerLattice([[2, 0], [0, 3]])
        assert abs(lat.det()) == 6
        assert lat.member([2, 3]) and not lat.member([1, 0])


class TestRoots:
    def test_known_roots(self):
        # (x^2 - 2)(x + 3)
        p = poly_of([-2, 0, 1]) * poly_of([3, 1])
        roots = real_roots(p)
        assert len(roots) == 3
        expected = sorted([-3.0, -np.sqrt(2), np.sqrt(2)])
        assert max(abs(a - b) for a, b in zip(sorted(roots), expected)) < 1e-12

    def test_interval_restriction(self):
        p = poly_of([-2, 0, 1]) * poly_of([3, 1])
        inside = real_roots(p, (Fraction(0), Fraction(2)))
        assert len(inside) == 1 and abs(inside[0] - np.sqrt(2)) < 1e-12

    def test_multiplicity(self):
        p = poly_of([1, 1]) ** 2 * poly_of([-1, 1])
        got = real_roots_mult(p)
        pairs = sorted((round(r, 9), m) for r, m in got)
        assert pairs == [(-1.0, 2), (1.0, 1)]

    def test_sturm_counts(self):
        p = poly_of([0, -1, 0, 1])  # t(t-1)(t+1)
        assert count_roots_open(p, Fraction(-2), Fraction(2)) == 3
        assert count_roots_open(p, Fraction(0), Fraction(2)) == 1
        assert count_roots_halfopen(p, Fraction(-1), Fraction(0)) == 1  # counts 0, not -1

    def test_root_bound(self):
        p = poly_of([-30, 1, 1])
        b = cauchy_root_bound(p)
        assert all(abs(r) <= float(b) for r in real_roots(p))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.fractions(min_value=Fraction(-3), max_value=Fraction(3), max_denominator=6), min_size=1, max_size=4))
    def test_reconstructed_roots_found(self, roots):
        p = Polynomial([Fraction(1)])
        for r in roots:
            p = p * Polynomial([-r, Fraction(1)])
        got = sorted(real_roots(p))
        want = sorted(set(float(r) for r in roots))
        assert len(got) == len(want)
        assert all(abs(a - b) < 1e-9 for a, b in zip(got, want))


class TestLinearAlgebra:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=10 ** 6))
    def test_solve_random_system(self, n, seed):
        rng = random.Random(seed)
        rows = [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
        m = RationalMatrix(rows)
        if m.det() == 0:
            return
        rhs = [Fraction(rng.randint(-9, 9)) for _ in range(n)]
        sol, consistent = solve_linear_system(m, rhs)
        assert consistent and sol is not None
        for i in range(n):
            assert sum(rows[i][j] * sol[j] for j in range(n)) == rhs[i]

    def test_inconsistent_detected(self):
        m = RationalMatrix([[1, 1], [2, 2]])
        sol, consistent = solve_linear_system(m, [Fraction(1), Fraction(3)])
        assert not consistent and sol is None

    def test_underdetermined_consistent(self):
        m = RationalMatrix([[1, 1], [2, 2]])
        sol, consistent = solve_linear_system(m, [Fraction(1), Fraction(2)])
        assert consistent

    def test_int_det(self):
        assert int_det([[2, 1], [7, 4]]) == 1


class TestMisc:
    def test_lagrange(self):
        p = poly_of([1, -2, 5])
        pts = [(Fraction(k), p(Fraction(k))) for k in range(3)]
        assert lagrange_interpolate(pts).coeffs == p.coeffs

    def test_to_rational_rejects_floats(self):
        with pytest.raises(TypeError):
            to_rational(0.5)

    def test_rational_str(self):
        assert rational_str(Fraction(3, 4)) == "3/4"
        assert rational_str(Fraction(-2)) == "-2"
        assert to_rational("3/4") == Fraction(3, 4)
