"""Exact arithmetic kernel: rational polynomials, matrices, lattices, roots.

Everything in this module that touches algebraic identities works over
``fractions.Fraction`` so that equalities and sign decisions are exact.
Floating point appears only at the edges (root refinement output, the
Gauss-Legendre cross-check oracle).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

Rational = Fraction


def to_rational(x) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction.

    Floats are rejected on purpose: silently rationalizing a float hides
    rounding that the exact layer is supposed to exclude.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rational_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Dense univariate polynomial, low degree first.

    Coefficients are Fractions (ints are promoted) or floats; the exact
    operations (gcd, Sturm, integration) require Fraction coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = []
        for c in coeffs:
            if isinstance(c, int):
                c = Fraction(c)
            cs.append(c)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    # -- constructors
    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Sequence) -> "Polynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    # -- structure
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial has degree -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def leading(self):
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs!r})"

    # -- arithmetic
    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self[k] + other[k] for k in range(n)])

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self[k] - other[k] for k in range(n)])

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction, float)):
            return Polynomial([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Polynomial([Fraction(1)])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def antiderivative(self) -> "Polynomial":
        out = [Fraction(0)]
        for k, c in enumerate(self.coeffs):
            if isinstance(c, Fraction):
                out.append(c / (k + 1))
            else:
                out.append(c / float(k + 1))
        return Polynomial(out)

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        lead = other.leading()
        if len(rem) - 1 < d:
            return Polynomial([]), Polynomial(rem)
        quo = [Fraction(0)] * (len(rem) - d)
        for k in range(len(rem) - 1, d - 1, -1):
            c = rem[k] / lead
            if c != 0:
                quo[k - d] = c
                for j in range(d + 1):
                    rem[k - d + j] -= c * other.coeffs[j]
        return Polynomial(quo), Polynomial(rem[:d])

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return self.divmod(other)[1]

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.leading()
        return Polynomial([c / lead for c in self.coeffs])

    def primitive_int(self) -> "Polynomial":
        """Positive rational rescaling to integer coefficients with content 1."""
        if self.is_zero():
            return self
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [c.numerator * (den // c.denominator) for c in self.coeffs]
        g = math.gcd(*(abs(v) for v in ints))
        return Polynomial([Fraction(v // g) for v in ints])

    def compose_affine(self, a, b) -> "Polynomial":
        """p(a*t + b) via Horner in the polynomial ring."""
        lin = Polynomial([b, a])
        acc = Polynomial([])
        for c in reversed(self.coeffs):
            acc = acc * lin + Polynomial([c])
        return acc

    def to_float_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic gcd over the rationals (Euclid with monic normalization)."""
    a, b = p, q
    while not b.is_zero():
        a, b = b, (a % b)
        if not b.is_zero():
            b = b.monic()
    return a.monic() if not a.is_zero() else a


def square_free_part(p: Polynomial) -> Polynomial:
    if p.degree <= 0:
        return p.monic() if not p.is_zero() else p
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


def square_free_decomposition(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: p = lc * prod q_i^i with q_i squarefree, coprime."""
    if p.degree <= 0:
        return []
    f = p.monic()
    d = f.derivative()
    a = poly_gcd(f, d)
    b = f // a
    c = d // a
    z = c - b.derivative()
    out = []
    i = 1
    while b.degree > 0:
        ai = poly_gcd(b, z)
        if ai.degree > 0:
            out.append((ai, i))
        b = b // ai
        c = z // ai
        z = c - b.derivative()
        i += 1
    return out


# ---------------------------------------------------------------------------
# symmetric functions, integration, quadrature
# ---------------------------------------------------------------------------


def elem_sym(values: Sequence) -> list:
    """Elementary symmetric functions sigma_1..sigma_m of the given values.

    Incremental accumulation: no cancellation-prone alternating sums.
    """
    e = [1]
    for v in values:
        e = [e[0]] + [e[k] + v * e[k - 1] for k in range(1, len(e))] + [v * e[-1]]
    return e[1:]


def elem_sym_all(values: Sequence) -> list:
    """sigma_0..sigma_m (sigma_0 = 1)."""
    return [1] + elem_sym(values)


def poly_integrate_interval(p: Polynomial, a, b):
    """Exact integral of p over [a, b] (Fraction endpoints -> Fraction)."""
    F = p.antiderivative()
    return F(b) - F(a)


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1]; floating-point oracle."""
    if not (1 <= n <= 64):
        raise ValueError(f"gauss_legendre order must be in [1, 64], got {n}")
    return leggauss(n)


def gauss_legendre_integrate(p: Polynomial, a, b, n: int = 32) -> float:
    """Quadrature of a polynomial on [a, b]; independent check of the exact route."""
    nodes, weights = gauss_legendre(n)
    a = float(a)
    b = float(b)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = np.array([p(mid + half * t) for t in nodes], dtype=float)
    return float(half * np.dot(weights, vals))


# ---------------------------------------------------------------------------
# exact matrices
# ---------------------------------------------------------------------------


class RationalMatrix:
    """Small dense matrix over Fraction with exact solve/inverse/det."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = [[to_rational(x) if not isinstance(x, Fraction) else x for x in row] for row in rows]
        if self.rows:
            w = len(self.rows[0])
            if any(len(r) != w for r in self.rows):
                raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "RationalMatrix":
        m = len(cols[0])
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(m)])

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> list[Fraction]:
        return [r[j] for r in self.rows]

    def transpose(self) -> "RationalMatrix":
        m, n = self.shape
        return RationalMatrix([[self.rows[i][j] for i in range(m)] for j in range(n)])

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def scale(self, c) -> "RationalMatrix":
        c = to_rational(c)
        return RationalMatrix([[c * x for x in row] for row in self.rows])

    def matmul(self, other: "RationalMatrix") -> "RationalMatrix":
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        return RationalMatrix(
            [[sum((self.rows[i][t] * other.rows[t][j] for t in range(k)), Fraction(0)) for j in range(n)] for i in range(m)]
        )

    def matvec(self, v: Sequence) -> list[Fraction]:
        return [sum((row[j] * to_rational(v[j]) for j in range(len(v))), Fraction(0)) for row in self.rows]

    def det(self) -> Fraction:
        m, n = self.shape
        if m != n:
            raise ValueError("determinant of non-square matrix")
        a = [row[:] for row in self.rows]
        det = Fraction(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            det *= a[c][c]
            inv = 1 / a[c][c]
            for i in range(c + 1, n):
                f = a[i][c] * inv
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return det

    def rank(self) -> int:
        m, n = self.shape
        a = [row[:] for row in self.rows]
        r = 0
        for c in range(n):
            piv = next((i for i in range(r, m) if a[i][c] != 0), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            inv = 1 / a[r][c]
            for i in range(m):
                if i != r and a[i][c]:
                    f = a[i][c] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == m:
                break
        return r

    def solve(self, rhs: Sequence) -> list[Fraction]:
        """Exact solution of self * x = rhs for square nonsingular self."""
        m, n = self.shape
        if m != n:
            raise ValueError("solve requires a square matrix")
        a = [row[:] + [to_rational(rhs[i])] for i, row in enumerate(self.rows)]
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c] != 0), None)
            if piv is None:
                raise ValueError("singular matrix")
            a[c], a[piv] = a[piv], a[c]
            inv = 1 / a[c][c]
            a[c] = [x * inv for x in a[c]]
            for i in range(n):
                if i != c and a[i][c]:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return [a[i][n] for i in range(n)]

    def inverse(self) -> "RationalMatrix":
        m, n = self.shape
        if m != n:
            raise ValueError("inverse of non-square matrix")
        a = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(self.rows)]
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c] != 0), None)
            if piv is None:
                raise ValueError("singular matrix")
            a[c], a[piv] = a[piv], a[c]
            inv = 1 / a[c][c]
            a[c] = [x * inv for x in a[c]]
            for i in range(n):
                if i != c and a[i][c]:
                    f = a[i][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return RationalMatrix([row[n:] for row in a])

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.rows], dtype=float)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows!r})"


def solve_linear_system(matrix: RationalMatrix, rhs: Sequence) -> tuple[list[Fraction] | None, bool]:
    """Exact least-structure solve for possibly non-square systems.

    Returns (solution, consistent). For overdetermined consistent systems the
    unique solution is returned; inconsistent systems give (None, False).
    """
    m, n = matrix.shape
    a = [row[:] + [to_rational(rhs[i])] for i, row in enumerate(matrix.rows)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if a[i][n] != 0:
            return None, False
    x = [Fraction(0)] * n
    for row_idx, c in enumerate(pivots):
        x[c] = a[row_idx][n]
    return x, True


# ---------------------------------------------------------------------------
# rational functions of one variable (for exact boundary limits)
# ---------------------------------------------------------------------------


class RationalFunction:
    """Quotient of Fraction polynomials, kept in lowest terms, monic denominator.

    Keeping the fraction reduced is what makes evaluation at removable
    singularities exact: common vanishing factors are cancelled algebraically.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial([1])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = Polynomial([])
            self.den = Polynomial([1])
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num // g
            den = den // g
        lead = den.leading()
        self.num = num * (1 / lead)
        self.den = den * (1 / lead)

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls(Polynomial([to_rational(c)]))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    @staticmethod
    def _coerce(other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        return RationalFunction.constant(other)

    def regular_at(self, t) -> bool:
        return self.den(to_rational(t)) != 0

    def __call__(self, t):
        t = to_rational(t)
        d = self.den(t)
        if d == 0:
            raise ZeroDivisionError("pole of rational function (after reduction)")
        return self.num(t) / d

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __repr__(self) -> str:
        return f"RationalFunction({self.num!r}, {self.den!r})"


def rf_matrix_inverse(mat: list[list[RationalFunction]]) -> list[list[RationalFunction]]:
    """Gauss-Jordan inverse over the rational function field."""
    n = len(mat)
    a = [[mat[i][j] for j in range(n)] + [RationalFunction.constant(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if not a[i][c].is_zero()), None)
        if piv is None:
            raise ValueError("singular matrix over rational function field")
        a[c], a[piv] = a[piv], a[c]
        inv = RationalFunction.constant(1) / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]


# ---------------------------------------------------------------------------
# integer lattices and Hermite normal form
# ---------------------------------------------------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _row_hnf(mat: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style HNF: V*mat = H with V unimodular, H in row echelon form."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    a = [row[:] for row in mat]
    v = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        v[r], v[piv] = v[piv], v[r]
        for i in range(r + 1, m):
            if a[i][c] == 0:
                continue
            g, s, t = _xgcd(a[r][c], a[i][c])
            p, q = a[r][c] // g, a[i][c] // g
            row_r = [s * x + t * y for x, y in zip(a[r], a[i])]
            row_i = [-q * x + p * y for x, y in zip(a[r], a[i])]
            a[r], a[i] = row_r, row_i
            vr = [s * x + t * y for x, y in zip(v[r], v[i])]
            vi = [-q * x + p * y for x, y in zip(v[r], v[i])]
            v[r], v[i] = vr, vi
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            v[r] = [-x for x in v[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                v[i] = [x - q * y for x, y in zip(v[i], v[r])]
        r += 1
        if r == m:
            break
    return a, v


def hermite_normal_form(mat: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Column-style Hermite normal form.

    Returns (H, U) with H = mat * U, U unimodular (|det U| = 1), H in column
    echelon form with positive pivots and off-pivot entries reduced.
    """
    rows = [[int(x) for x in row] for row in mat]
    if not rows:
        raise ValueError("empty matrix")
    for row in rows:
        for x in row:
            if not isinstance(x, int):
                raise TypeError("hermite_normal_form requires integer entries")
    mt = [list(col) for col in zip(*rows)]
    h_t, v = _row_hnf(mt)
    h = [list(col) for col in zip(*h_t)]
    u = [list(col) for col in zip(*v)]
    return h, u


def int_det(mat: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (via RationalMatrix)."""
    d = RationalMatrix(mat).det()
    assert d.denominator == 1
    return d.numerator


class IntegerLattice:
    """Full-rank sublattice of Z^m given by a square integer basis (columns)."""

    __slots__ = ("basis",)

    def __init__(self, basis_columns: Sequence[Sequence[int]]):
        cols = [[int(x) for x in col] for col in basis_columns]
        m = len(cols[0])
        if len(cols) != m or any(len(c) != m for c in cols):
            raise ValueError("lattice basis must be square")
        self.basis = cols
        if int_det(self._matrix().rows) == 0:
            raise ValueError("lattice basis is singular")

    @classmethod
    def standard(cls, m: int) -> "IntegerLattice":
        return cls([[int(i == j) for i in range(m)] for j in range(m)])

    @classmethod
    def from_generators(cls, gens: Sequence[Sequence[int]]) -> "IntegerLattice":
        """Lattice generated by integer vectors (must span Q^m)."""
        m = len(gens[0])
        mat = [[gens[j][i] for j in range(len(gens))] for i in range(m)]
        h, _ = hermite_normal_form(mat)
        cols = [[h[i][j] for i in range(m)] for j in range(len(gens))]
        cols = [c for c in cols if any(x != 0 for x in c)]
        if len(cols) != m:
            raise ValueError("generators do not span")
        return cls(cols)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _matrix(self) -> RationalMatrix:
        return RationalMatrix.from_columns(self.basis)

    def coords(self, v: Sequence) -> list[Fraction]:
        return self._matrix().solve([to_rational(x) for x in v])

    def member(self, v: Sequence) -> bool:
        try:
            c = self.coords(v)
        except ValueError:
            return False
        return all(x.denominator == 1 for x in c)

    def det(self) -> int:
        return abs(int_det(self._matrix().rows))


# ---------------------------------------------------------------------------
# real root isolation (Sturm) and refinement
# ---------------------------------------------------------------------------


def sturm_chain(p: Polynomial) -> list[Polynomial]:
    """Sturm chain of a squarefree polynomial, integer-primitive normalized."""
    chain = [p.primitive_int(), p.derivative().primitive_int()]
    while chain[-1].degree > 0:
        rem = chain[-2] % chain[-1]
        if rem.is_zero():
            break
        chain.append((-rem).primitive_int())
    return [q for q in chain if not q.is_zero()]


def _variations(chain: list[Polynomial], x: Fraction) -> int:
    signs = []
    for q in chain:
        v = q(x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_halfopen(p: Polynomial, a, b) -> int:
    """Number of distinct real roots of p in (a, b], exactly."""
    if not p.is_exact():
        raise TypeError("exact root counting requires Fraction coefficients")
    if p.is_zero():
        raise ValueError("zero polynomial")
    a, b = to_rational(a), to_rational(b)
    if a >= b:
        return 0
    ps = square_free_part(p)
    if ps.degree == 0:
        return 0
    chain = sturm_chain(ps)
    return _variations(chain, a) - _variations(chain, b)


def count_roots_open(p: Polynomial, a, b) -> int:
    """Number of distinct real roots of p in the open interval (a, b)."""
    a, b = to_rational(a), to_rational(b)
    n = count_roots_halfopen(p, a, b)
    if square_free_part(p)(b) == 0:
        n -= 1
    return n


def cauchy_root_bound(p: Polynomial) -> Fraction:
    lead = abs(p.leading())
    m = max((abs(c) for c in p.coeffs[:-1]), default=Fraction(0))
    return 1 + m / lead


def _isolate(chain, ps, lo, hi, cnt, out):
    """Recursively split (lo, hi] until each piece holds one root."""
    if cnt == 0:
        return
    if cnt == 1:
        out.append((lo, hi))
        return
    mid = (lo + hi) / 2
    left = _variations(chain, lo) - _variations(chain, mid)
    _isolate(chain, ps, lo, mid, left, out)
    _isolate(chain, ps, mid, hi, cnt - left, out)


def _refine(ps: Polynomial, lo: Fraction, hi: Fraction, tol: Fraction) -> Fraction:
    """Bisection on (lo, hi] holding exactly one simple root."""
    if ps(hi) == 0:
        return hi
    # ps(lo) != 0 is guaranteed by the caller; signs must differ
    slo = 1 if ps(lo) > 0 else -1
    while hi - lo > tol:
        mid = (lo + hi) / 2
        v = ps(mid)
        if v == 0:
            return mid
        if (1 if v > 0 else -1) == slo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def real_roots_mult(
    p: Polynomial, interval: tuple | None = None, tol: float = 1e-12
) -> list[tuple[float, int]]:
    """Distinct real roots of p in a closed interval with multiplicities.

    Roots are isolated exactly with Sturm sequences, then refined by bisection
    to within tol. Rational roots hit by the bisection grid come out exact.
    """
    if not p.is_exact():
        raise TypeError("real_roots requires Fraction coefficients")
    if p.is_zero():
        raise ValueError("zero polynomial has all points as roots")
    if p.degree == 0:
        return []
    if interval is None:
        bound = cauchy_root_bound(p)
        a, b = -bound, bound
    else:
        a, b = to_rational(interval[0]), to_rational(interval[1])
        if a > b:
            raise ValueError("empty interval")
    tol_r = Fraction(tol)
    found: list[tuple[Fraction, int]] = []
    for factor, mult in square_free_decomposition(p):
        if factor.degree == 0:
            continue
        roots_here: list[Fraction] = []
        if factor(a) == 0:
            roots_here.append(a)
        if b > a:
            chain = sturm_chain(factor)
            lo = a
            # nudge off a root at the left endpoint so signs are usable
            if factor(lo) == 0:
                step = (b - a) / 2
                while True:
                    cand = lo + step
                    if factor(cand) != 0 and _variations(chain, lo) - _variations(chain, cand) == 0:
                        lo = cand
                        break
                    step /= 2
            cnt = _variations(chain, lo) - _variations(chain, b)
            boxes: list[tuple[Fraction, Fraction]] = []
            _isolate(chain, factor, lo, b, cnt, boxes)
            for blo, bhi in boxes:
                # bisection needs a non-root left endpoint
                if factor(blo) == 0:
                    step = (bhi - blo) / 2
                    while True:
                        cand = blo + step
                        if factor(cand) != 0 and _variations(chain, blo) - _variations(chain, cand) == 0:
                            blo = cand
                            break
                        step /= 2
                roots_here.append(_refine(factor, blo, bhi, tol_r))
        for r in roots_here:
            found.append((r, mult))
    found.sort(key=lambda t: t[0])
    return [(float(r), m) for r, m in found]


def real_roots(p: Polynomial, interval: tuple | None = None, tol: float = 1e-12) -> list[float]:
    """Distinct real roots (each reported once), sorted ascending."""
    return [r for r, _ in real_roots_mult(p, interval, tol)]


def lagrange_interpolate(points: Sequence[tuple]) -> Polynomial:
    """Exact polynomial through the given (x, y) pairs with rational x, y."""
    xs = [to_rational(x) for x, _ in points]
    ys = [to_rational(y) for _, y in points]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate interpolation nodes")
    total = Polynomial([])
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        basis = Polynomial([1])
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = basis * Polynomial([-xj, 1])
            denom *= xi - xj
        total = total + basis * (yi / denom)
    return total
