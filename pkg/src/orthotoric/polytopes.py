"""Rational Delzant polytopes and momentum-space boundary conditions.

A compact convex simple polytope is described by inward affine functions
L_j(x) = <u_j, x> + lambda_j >= 0 together with a lattice containing the
normals u_j. Validity (compactness, simplicity, lattice conditions, labels)
is decided in exact rational arithmetic. The module also evaluates the
canonical toric Hessian and checks the first-order boundary behaviour that
characterizes globally defined torus-invariant Kahler metrics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .exact import (
    IntegerLattice,
    Polynomial,
    RationalFunction,
    RationalMatrix,
    elem_sym_all,
    hermite_normal_form,
    rational_str,
    rf_matrix_inverse,
    to_rational,
)

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _vdc(n: int, base: int) -> Fraction:
    """van der Corput radical inverse: deterministic rational in (0, 1)."""
    v, denom = 0, 1
    while n:
        n, r = divmod(n, base)
        denom *= base
        v = v * base + r
    return Fraction(v, denom)


class RationalLattice:
    """Lattice in R^m with rational basis, stored as (1/den) * integer lattice."""

    __slots__ = ("den", "integral")

    def __init__(self, den: int, integral: IntegerLattice):
        self.den = int(den)
        self.integral = integral
        if self.den <= 0:
            raise ValueError("denominator must be positive")

    @classmethod
    def standard(cls, m: int) -> "RationalLattice":
        return cls(1, IntegerLattice.standard(m))

    @classmethod
    def from_integer_basis(cls, basis_columns) -> "RationalLattice":
        return cls(1, IntegerLattice(basis_columns))

    @classmethod
    def from_generators(cls, vectors) -> "RationalLattice":
        """Lattice generated by rational vectors (must span)."""
        vecs = [[to_rational(x) for x in v] for v in vectors]
        den = 1
        for v in vecs:
            for x in v:
                den = den * x.denominator // _gcd(den, x.denominator)
        ints = [[int(x * den) for x in v] for v in vecs]
        return cls(den, IntegerLattice.from_generators(ints))

    @property
    def dim(self) -> int:
        return self.integral.dim

    def coords(self, v) -> list[Fraction] | None:
        """Coordinates of v in the lattice basis; None if v is not rationalizable."""
        scaled = [to_rational(x) * self.den for x in v]
        return self.integral.coords(scaled)

    def member(self, v) -> bool:
        return all(c.denominator == 1 for c in self.coords(v))

    def int_coords(self, v) -> list[int]:
        cs = self.coords(v)
        if any(c.denominator != 1 for c in cs):
            raise ValueError("vector is not a lattice member")
        return [c.numerator for c in cs]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


class RationalDelzantPolytope:
    """Compact simple polytope data: inward normals, offsets, lattice."""

    def __init__(self, normals, offsets, lattice: RationalLattice | None = None):
        self.normals = [tuple(to_rational(x) for x in u) for u in normals]
        self.offsets = [to_rational(x) for x in offsets]
        if not self.normals:
            raise ValueError("need at least one facet")
        self.m = len(self.normals[0])
        if any(len(u) != self.m for u in self.normals):
            raise ValueError("normals of mixed dimension")
        if len(self.offsets) != len(self.normals):
            raise ValueError("offsets/normals length mismatch")
        if any(all(x == 0 for x in u) for u in self.normals):
            raise ValueError("zero normal vector")
        if lattice is None:
            lattice = RationalLattice.from_generators(self.normals)
        if lattice.dim != self.m:
            raise ValueError("lattice dimension mismatch")
        self.lattice = lattice
        self._vertices: list[tuple[Fraction, ...]] | None = None

    @property
    def n(self) -> int:
        return len(self.normals)

    def affine(self, j: int, x) -> Fraction:
        return sum((self.normals[j][k] * to_rational(x[k]) for k in range(self.m)), Fraction(0)) + self.offsets[j]

    def affine_float(self, j: int, x: np.ndarray) -> float:
        u = np.array([float(c) for c in self.normals[j]])
        return float(np.dot(u, x) + float(self.offsets[j]))

    def contains(self, x) -> bool:
        return all(self.affine(j, x) >= 0 for j in range(self.n))

    def vertices(self) -> list[tuple[Fraction, ...]]:
        if self._vertices is not None:
            return self._vertices
        verts: list[tuple[Fraction, ...]] = []
        seen = set()
        for subset in itertools.combinations(range(self.n), self.m):
            mat = RationalMatrix([list(self.normals[j]) for j in subset])
            if mat.det() == 0:
                continue
            x = mat.solve([-self.offsets[j] for j in subset])
            xt = tuple(x)
            if xt in seen:
                continue
            if all(self.affine(j, x) >= 0 for j in range(self.n)):
                seen.add(xt)
                verts.append(xt)
        verts.sort()
        self._vertices = verts
        return verts

    def active_set(self, x) -> list[int]:
        return [j for j in range(self.n) if self.affine(j, x) == 0]

    def facet_vertices(self, j: int) -> list[tuple[Fraction, ...]]:
        return [v for v in self.vertices() if self.affine(j, v) == 0]

    def centroid(self) -> list[Fraction]:
        verts = self.vertices()
        if not verts:
            raise ValueError("no vertices")
        k = len(verts)
        return [sum((v[i] for v in verts), Fraction(0)) / k for i in range(self.m)]

    def diameter_float(self) -> float:
        verts = [np.array([float(c) for c in v]) for v in self.vertices()]
        best = 0.0
        for a, b in itertools.combinations(verts, 2):
            best = max(best, float(np.linalg.norm(a - b)))
        return best if best > 0 else 1.0

    def normals_float(self) -> np.ndarray:
        return np.array([[float(c) for c in u] for u in self.normals])


@dataclass
class PolytopeReport:
    m: int
    n: int
    is_polytope: bool
    is_rational_delzant: bool
    is_integral_delzant: bool
    vertices: list[tuple[Fraction, ...]] = dc_field(default_factory=list)
    labels: list[int] | None = None
    vertex_lattice_dets: list[int] = dc_field(default_factory=list)
    failures: list[str] = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dim": self.m,
            "num_facets": self.n,
            "is_polytope": self.is_polytope,
            "is_rational_delzant": self.is_rational_delzant,
            "is_integral_delzant": self.is_integral_delzant,
            "vertices": [[rational_str(c) for c in v] for v in self.vertices],
            "labels": self.labels,
            "vertex_lattice_dets": self.vertex_lattice_dets,
            "failures": self.failures,
        }


def _has_recession_ray(P: RationalDelzantPolytope) -> bool:
    """Exact recession-cone test: any nonzero d with <u_j, d> >= 0 for all j?"""
    norm_mat = RationalMatrix([list(u) for u in P.normals])
    if norm_mat.rank() < P.m:
        return True  # lineality direction exists
    if P.m == 1:
        for d in (Fraction(1), Fraction(-1)):
            if all(u[0] * d >= 0 for u in P.normals):
                return True
        return False
    for subset in itertools.combinations(range(P.n), P.m - 1):
        mat = RationalMatrix([list(P.normals[j]) for j in subset])
        if mat.rank() != P.m - 1:
            continue
        d = _kernel_vector(mat)
        for cand in (d, [-x for x in d]):
            if all(
                sum((P.normals[j][k] * cand[k] for k in range(P.m)), Fraction(0)) >= 0
                for j in range(P.n)
            ):
                return True
    return False


def _kernel_vector(mat: RationalMatrix) -> list[Fraction]:
    """One nonzero kernel vector of a rank-(m-1) matrix with m columns."""
    rows, m = mat.shape
    a = [row[:] for row in mat.rows]
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = next(c for c in range(m) if c not in pivots)
    d = [Fraction(0)] * m
    d[free] = Fraction(1)
    for row_idx, c in enumerate(pivots):
        d[c] = -a[row_idx][free]
    return d


def verify_delzant(P: RationalDelzantPolytope) -> PolytopeReport:
    """Exact validity report: polytope / rational Delzant / integral Delzant."""
    if P.n > 12:
        raise ValueError("facet count above the supported bound (12)")
    failures: list[str] = []
    verts = P.vertices()
    is_poly = True
    if not verts:
        is_poly = False
        failures.append("no vertices: empty or unbounded region")
    elif _has_recession_ray(P):
        is_poly = False
        failures.append("recession ray exists: region is unbounded")
    else:
        c = P.centroid()
        if any(P.affine(j, c) <= 0 for j in range(P.n)):
            is_poly = False
            failures.append("vertex centroid not interior: empty interior")
    report = PolytopeReport(
        m=P.m, n=P.n, is_polytope=is_poly,
        is_rational_delzant=False, is_integral_delzant=False,
        vertices=verts, failures=failures,
    )
    if not is_poly:
        return report

    # lattice membership and labels
    labels: list[int] = []
    coords_cache: list[list[int]] = []
    for j, u in enumerate(P.normals):
        cs = P.lattice.coords(u)
        if any(x.denominator != 1 for x in cs):
            failures.append(f"normal {j} is not a lattice member")
            report.failures = failures
            return report
        ints = [x.numerator for x in cs]
        coords_cache.append(ints)
        g = 0
        for v in ints:
            g = _gcd(g, v)
        labels.append(g)
    report.labels = labels

    # simplicity: exactly m active, linearly independent normals per vertex
    simple = True
    for v in verts:
        act = P.active_set(v)
        if len(act) != P.m:
            simple = False
            failures.append(f"vertex {tuple(map(str, v))} has {len(act)} active facets")
            continue
        mat = RationalMatrix([list(P.normals[j]) for j in act])
        if mat.det() == 0:
            simple = False
            failures.append(f"vertex {tuple(map(str, v))} has dependent active normals")
    report.is_rational_delzant = simple
    if not simple:
        report.failures = failures
        return report

    # integrality: active normals form a lattice basis at every vertex
    integral = True
    for v in verts:
        act = P.active_set(v)
        cols = [coords_cache[j] for j in act]
        mat = [[cols[j][i] for j in range(P.m)] for i in range(P.m)]
        h, _ = hermite_normal_form(mat)
        det = 1
        for i in range(P.m):
            det *= h[i][i]
        report.vertex_lattice_dets.append(abs(det))
        if abs(det) != 1:
            integral = False
    report.is_integral_delzant = integral
    report.failures = failures
    return report


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def orthotoric_simplex(betas, weights, c) -> RationalDelzantPolytope:
    """Simplex image of the orthotoric box in sigma coordinates.

    betas: m+1 strictly increasing rationals; weights: positive integers n_j;
    c: positive rational homothety constant. Facet j is the image of
    {xi : some xi_k = beta_j}; the inward normal is u_j = (2 n_j / c) v_j with
    v_j the alternating Vandermonde-ratio vector, and the affine function is
    L_j(sigma) = (2 n_j / c) prod_k (beta_j - xi_k) / prod_{k != j} (beta_j - beta_k).
    """
    betas = [to_rational(b) for b in betas]
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("betas must be strictly increasing")
    m = len(betas) - 1
    if m < 1:
        raise ValueError("need at least two betas")
    weights = [int(w) for w in weights]
    if len(weights) != m + 1 or any(w <= 0 for w in weights):
        raise ValueError("need m+1 positive integer weights")
    c = to_rational(c)
    if c <= 0:
        raise ValueError("c must be positive")
    normals = []
    offsets = []
    for j, bj in enumerate(betas):
        denom = Fraction(1)
        for k, bk in enumerate(betas):
            if k != j:
                denom *= bj - bk
        v = [(-1) ** r * bj ** (m - r) / denom for r in range(1, m + 1)]
        kappa = bj ** m / denom
        scale = Fraction(2 * weights[j], 1) / c
        normals.append([scale * x for x in v])
        offsets.append(scale * kappa)
    return RationalDelzantPolytope(normals, offsets)


def dual_pairing_check(betas, c) -> tuple[bool, list[list[Fraction]]]:
    """Exact Kronecker pairing between facet generators and the dual covectors.

    X_j = (2/c) * v_j are the facet circle generators; theta_{p,q} has
    components (c/2)(sigma_r(beta-hat-q) - sigma_r(beta-hat-p)). The pairing
    theta_{p,q}(X_j) must equal delta_{jq} - delta_{jp}.
    """
    betas = [to_rational(b) for b in betas]
    c = to_rational(c)
    m = len(betas) - 1
    vs = []
    for j, bj in enumerate(betas):
        denom = Fraction(1)
        for k, bk in enumerate(betas):
            if k != j:
                denom *= bj - bk
        vs.append([(-1) ** r * bj ** (m - r) / denom for r in range(1, m + 1)])
    sig = []  # sig[p][r] = sigma_r of betas omitting beta_p, r = 0..m
    for p in range(m + 1):
        rest = [betas[k] for k in range(m + 1) if k != p]
        sig.append(elem_sym_all(rest))
    ok = True
    table: list[list[Fraction]] = []
    for p in range(m + 1):
        for q in range(m + 1):
            if p == q:
                continue
            row = []
            for j in range(m + 1):
                pairing = sum(
                    (c / 2 * (sig[q][r] - sig[p][r]) * Fraction(2) / c * vs[j][r - 1] for r in range(1, m + 1)),
                    Fraction(0),
                )
                row.append(pairing)
                expected = Fraction((1 if j == q else 0) - (1 if j == p else 0))
                if pairing != expected:
                    ok = False
            table.append(row)
    return ok, table


def ke_surface_polytope(p: int, q: int) -> RationalDelzantPolytope:
    """Labelled quadrilateral for the orbifold del Pezzo family M(p, q).

    Lattice is Z^2. The four facets carry primitive normals (p,1), (-q,-1),
    (q,-1), (-p,1) scaled by the labels 2q+p, 2p+q, 2p+q, 2q+p; equivalently
    the signed orthotoric boundary data c_1^a = -(2q+p), c_1^b = 2p+q,
    c_2^a = 2p+q, c_2^b = -(2q+p) via u = c (endpoint, -1).
    """
    p, q = int(p), int(q)
    if not (p > q >= 1):
        raise ValueError("need integers p > q >= 1")
    if _gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    endpoints = [(-p, -(2 * q + p)), (-q, 2 * p + q), (q, 2 * p + q), (p, -(2 * q + p))]
    normals = []
    offsets = []
    for t, cc in endpoints:
        normals.append([Fraction(cc * t), Fraction(-cc)])
        offsets.append(Fraction(-cc * t * t))
    return RationalDelzantPolytope(normals, offsets, RationalLattice.standard(2))


def ke_surface_signed_labels(p: int, q: int) -> tuple[list[Fraction], list[Fraction]]:
    """Signed compactification constants (c_alpha list, c_beta list) for M(p, q)."""
    return (
        [Fraction(-(2 * q + p)), Fraction(2 * p + q)],
        [Fraction(2 * p + q), Fraction(-(2 * q + p))],
    )


# ---------------------------------------------------------------------------
# canonical Hessian and boundary conditions
# ---------------------------------------------------------------------------


class HessianField:
    """Field of symmetric bilinear forms H(mu) on a polytope.

    Two access routes. Float evaluation maps mu to an m x m array. The exact
    route, when available, restricts the field to rational curves through a
    rational point y0: it returns m pairs (H(t), v(t)) where H is a matrix of
    reduced rational functions along the curve, v is the curve velocity in
    momentum coordinates, and the velocities at t = 0 are linearly
    independent. Fields defined through auxiliary coordinates (such as
    orthotoric roots) can use non-affine curves; the exact route is what
    allows boundary residuals to be reported as identically zero.
    """

    def __init__(self, m: int, eval_float=None, curve_provider=None, description: str = ""):
        self.m = m
        self._eval_float = eval_float
        self._curve_provider = curve_provider
        self.description = description

    @property
    def has_exact(self) -> bool:
        return self._curve_provider is not None

    def eval_float(self, mu: np.ndarray) -> np.ndarray:
        if self._eval_float is None:
            raise ValueError("field has no float evaluator")
        return self._eval_float(np.asarray(mu, dtype=float))

    def exact_curves(self, y0, avoid_normal=None):
        """Exact restrictions along m curves through the rational point y0.

        avoid_normal, when given, is the facet normal at y0; providers that
        restrict to straight lines use it to keep the lines transverse.
        """
        if self._curve_provider is None:
            raise ValueError("field has no exact curve restriction")
        y0r = [to_rational(x) for x in y0]
        u = None if avoid_normal is None else tuple(to_rational(x) for x in avoid_normal)
        return self._curve_provider(y0r, u)

    def scaled(self, factor) -> "HessianField":
        """Same field multiplied by a constant (rational factors stay exact)."""
        fr = to_rational(factor) if not isinstance(factor, float) else None
        ffl = float(factor)
        ev = None
        if self._eval_float is not None:
            base_eval = self._eval_float
            ev = lambda mu: ffl * base_eval(mu)
        cp = None
        if self._curve_provider is not None and fr is not None:
            base_curves = self._curve_provider
            cst = RationalFunction.constant(fr)

            def cp(y0, u):
                return [
                    ([[cst * entry for entry in row] for row in hmat], vel)
                    for hmat, vel in base_curves(y0, u)
                ]

        return HessianField(self.m, ev, cp, description=f"{self.description} * {factor}")


def canonical_hessian(P: RationalDelzantPolytope) -> HessianField:
    """Inverse Hessian H0 = G0^{-1} of the canonical potential of P.

    G0(mu) = (1/2) sum_j u_j u_j^T / L_j(mu). The float route inverts G0 at
    interior points; the exact route restricts to a rational line and inverts
    over the rational function field, which extends H0 across facet interiors.
    """
    m = P.m
    u_float = P.normals_float()
    offs = np.array([float(x) for x in P.offsets])

    def eval_float(mu: np.ndarray) -> np.ndarray:
        # meaningful at interior points; facet limits come from the exact route
        vals = u_float @ mu + offs
        G = np.zeros((m, m))
        with np.errstate(divide="ignore", invalid="ignore"):
            for j in range(P.n):
                G += 0.5 * np.outer(u_float[j], u_float[j]) / vals[j]
            return np.linalg.inv(G)

    def line_restriction(y0, d):
        # G entries along mu(t) = y0 + t d as rational functions of t
        entries = [[RationalFunction(Polynomial([])) for _ in range(m)] for _ in range(m)]
        for j in range(P.n):
            u = P.normals[j]
            l0 = P.affine(j, y0)
            slope = sum((u[k] * d[k] for k in range(m)), Fraction(0))
            lin = Polynomial([l0, slope])
            if lin.is_zero():
                raise ZeroDivisionError("line lies inside the zero set of a facet function")
            inv = RationalFunction(Polynomial([1]), lin)
            for r in range(m):
                if u[r] == 0:
                    continue
                for s in range(r, m):
                    if u[s] == 0:
                        continue
                    term = inv * (u[r] * u[s] / 2)
                    entries[r][s] = entries[r][s] + term
                    if s != r:
                        entries[s][r] = entries[s][r] + term
        return rf_matrix_inverse(entries)

    def curve_provider(y0, avoid_normal):
        if avoid_normal is not None:
            dirs = _line_directions_exact(avoid_normal)
        else:
            dirs = [[Fraction(1 if i == k else 0) for i in range(m)] for k in range(m)]
        curves = []
        for d in dirs:
            vel = [RationalFunction.constant(x) for x in d]
            curves.append((line_restriction(y0, d), vel))
        return curves

    return HessianField(m, eval_float, curve_provider, description="canonical")


def _facet_samples(P: RationalDelzantPolytope, j: int, samples: int) -> list[list[Fraction]]:
    """Deterministic rational points in the relative interior of facet j.

    Convex combinations of the facet vertices with Halton-sequence weights,
    each weight at least 1/100 so the points keep away from sub-faces.
    """
    verts = P.facet_vertices(j)
    k = len(verts)
    if k == 0:
        raise ValueError(f"facet {j} carries no vertices")
    if k == 1:
        return [list(verts[0])] * min(samples, 1)
    delta = Fraction(1, 100)
    pts = []
    for s in range(samples):
        hs = [_vdc(s + 1, _PRIMES[i]) for i in range(k)]
        tot = sum(hs)
        ws = [delta + (1 - k * delta) * h / tot for h in hs]
        pt = [sum((ws[i] * verts[i][r] for i in range(k)), Fraction(0)) for r in range(P.m)]
        pts.append(pt)
    return pts


def _line_directions_exact(u: tuple[Fraction, ...]) -> list[list[Fraction]]:
    """Coordinate directions adjusted so none is tangent to the facet."""
    m = len(u)
    i0 = max(range(m), key=lambda i: abs(u[i]))
    dirs = []
    for k in range(m):
        d = [Fraction(0)] * m
        d[k] = Fraction(1)
        if u[k] == 0:
            d[i0] += Fraction(1)
        dirs.append(d)
    return dirs


def _complement_indices(u: tuple[Fraction, ...] | np.ndarray) -> list[int]:
    m = len(u)
    i0 = max(range(m), key=lambda i: abs(u[i]))
    return [k for k in range(m) if k != i0]


def check_toric_boundary(
    field: HessianField,
    P: RationalDelzantPolytope,
    samples: int = 3,
    tol: float = 1e-8,
) -> dict:
    """Verify facet boundary conditions of a candidate inverse-Hessian field.

    At interior points y of each facet F_j with inward normal u_j:
      (a) H_y(u_j, .) = 0,
      (b) the gradient of mu -> H_mu(u_j, u_j) at y equals 2 u_j,
      (c) H_y is positive definite transverse to u_j.
    Exact mode (rational line restrictions) reports exact residuals; float
    mode uses one-sided finite differences with step 1e-6 * diameter.
    """
    exact = field.has_exact
    faces = []
    all_pass = True
    diam = P.diameter_float()
    h = 1e-6 * diam
    for j in range(P.n):
        u = P.normals[j]
        uf = np.array([float(x) for x in u])
        u_scale = max(1.0, float(np.max(np.abs(2 * uf))))
        pts = _facet_samples(P, j, samples)
        worst_a = 0.0
        worst_b = 0.0
        factors = []
        cond_c_ok = True
        for y0 in pts:
            if exact:
                curves = field.exact_curves(y0, u)
                hmat0 = curves[0][0]
                H0 = [[hmat0[r][s](0) for s in range(field.m)] for r in range(field.m)]
                # (a)
                res_a = [sum((H0[r][s] * u[s] for s in range(field.m)), Fraction(0)) for r in range(field.m)]
                worst_a = max(worst_a, max(abs(float(x)) for x in res_a))
                # (b): each curve gives <grad f, v(0)> for f(mu) = H_mu(u, u)
                derivs = []
                vel0 = []
                for hmat, vel in curves:
                    f_t = RationalFunction(Polynomial([]))
                    for r in range(field.m):
                        for s in range(field.m):
                            if u[r] != 0 and u[s] != 0:
                                f_t = f_t + hmat[r][s] * (u[r] * u[s])
                    derivs.append(f_t.derivative()(0))
                    vel0.append([v(0) for v in vel])
                grad = RationalMatrix(vel0).solve(derivs)
                res_b = [g - 2 * ux for g, ux in zip(grad, u)]
                worst_b = max(worst_b, max(abs(float(x)) for x in res_b))
                num = sum((g * ux for g, ux in zip(grad, u)), Fraction(0))
                den = 2 * sum((ux * ux for ux in u), Fraction(0))
                factors.append(num / den)
                # (c)
                comp = _complement_indices(u)
                sub = RationalMatrix([[H0[a][b] for b in comp] for a in comp])
                for k in range(1, len(comp) + 1):
                    minor = RationalMatrix([[sub.rows[a][b] for b in range(k)] for a in range(k)]).det()
                    if minor <= 0:
                        cond_c_ok = False
            else:
                y0f = np.array([float(x) for x in y0])
                H0 = field.eval_float(y0f)
                res_a = H0 @ uf
                worst_a = max(worst_a, float(np.max(np.abs(res_a))))
                # one-sided gradient of f(mu) = H_mu(u, u)
                nrm = uf / float(np.dot(uf, uf))
                dirs_f = []
                for k in range(P.m):
                    d = np.zeros(P.m)
                    d[k] = 1.0
                    s = float(np.dot(uf, d))
                    if s < 0:
                        d = -d
                    elif s == 0.0:
                        d = d + nrm
                    dirs_f.append(d)

                def f_at(mu):
                    return float(uf @ field.eval_float(mu) @ uf)

                derivs = []
                for d in dirs_f:
                    f0 = f_at(y0f)
                    f1 = f_at(y0f + h * d)
                    f2 = f_at(y0f + 2 * h * d)
                    derivs.append((-3 * f0 + 4 * f1 - f2) / (2 * h))
                grad = np.linalg.solve(np.array(dirs_f), np.array(derivs))
                res_b = grad - 2 * uf
                worst_b = max(worst_b, float(np.max(np.abs(res_b))))
                factors.append(float(np.dot(grad, uf) / (2 * np.dot(uf, uf))))
                comp = _complement_indices(uf)
                if comp:
                    sub = H0[np.ix_(comp, comp)]
                    if float(np.min(np.linalg.eigvalsh(sub))) <= -tol:
                        cond_c_ok = False
        pass_a = worst_a <= (0 if exact else tol * u_scale)
        pass_b = worst_b <= (0 if exact else tol * u_scale)
        face_pass = pass_a and pass_b and cond_c_ok
        all_pass = all_pass and face_pass
        faces.append(
            {
                "facet": j,
                "points": len(pts),
                "cond_a_residual": worst_a,
                "cond_b_residual": worst_b,
                "cond_b_factor": float(sum(factors) / len(factors)) if factors else None,
                "cond_b_factor_exact": (
                    rational_str(factors[0]) if exact and factors and all(f == factors[0] for f in factors) else None
                ),
                "cond_c_positive": cond_c_ok,
                "pass": face_pass,
            }
        )
    return {
        "mode": "exact" if exact else "float",
        "tol": tol,
        "pass": all_pass,
        "faces": faces,
    }
