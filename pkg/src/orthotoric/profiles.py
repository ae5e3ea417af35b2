"""Compactification profiles of orthotoric Kahler metrics.

An orthotoric metric on a 2m-orbifold is determined by functions Theta_j on
intervals [alpha_j, beta_j]. Compactness over a labelled polytope pins the
endpoint behaviour: Theta_j vanishes at both endpoints, its slopes there are
tied to the facet labels, and (-1)^(m-j) Theta_j > 0 inside. All of these are
polynomial conditions checked exactly. The module also provides the closed
form profile families (constant holomorphic sectional curvature, Bochner-flat
on weighted projective spaces, Einstein orbifold surfaces), together with the
momentum-coordinate H matrix and the conversion between elementary symmetric
coordinates and root coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import (
    Polynomial,
    RationalFunction,
    RationalMatrix,
    count_roots_open,
    rational_str,
    real_roots_mult,
    to_rational,
)
from .polytopes import HessianField


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


@dataclass(frozen=True)
class WeightedProjectiveTag:
    """Coprime strictly decreasing positive integer weights a_0 > ... > a_m."""

    weights: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(a) for a in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) < 2:
            raise ValueError("need at least two weights")
        if any(a <= 0 for a in w):
            raise ValueError("weights must be positive")
        if any(a <= b for a, b in zip(w, w[1:])):
            raise ValueError("weights must be strictly decreasing")
        g = 0
        for a in w:
            g = _gcd(g, a)
        if g != 1:
            raise ValueError("weights must be coprime")

    @property
    def m(self) -> int:
        return len(self.weights) - 1

    @property
    def labels(self) -> list[int]:
        """n_j = product of the other weights."""
        total = math.prod(self.weights)
        return [total // a for a in self.weights]


class ThetaProfile:
    """Per-coordinate profile data (Theta_j, [alpha_j, beta_j]), j = 1..m."""

    def __init__(self, intervals, thetas, single_theta: bool = False):
        self.intervals = [(to_rational(a), to_rational(b)) for a, b in intervals]
        self.thetas = list(thetas)
        self.single_theta = bool(single_theta)
        m = len(self.intervals)
        if m == 0 or len(self.thetas) != m:
            raise ValueError("need one Theta per interval")
        for th in self.thetas:
            if not isinstance(th, Polynomial) or not th.is_exact:
                raise TypeError("profiles require exact polynomial Theta_j")
        for j, (a, b) in enumerate(self.intervals):
            if not a < b:
                raise ValueError(f"interval {j + 1} is empty")
            if j > 0 and self.intervals[j - 1][1] > a:
                raise ValueError("intervals must be consecutive: beta_j <= alpha_j+1")
        if self.single_theta and any(th.coeffs != self.thetas[0].coeffs for th in self.thetas):
            raise ValueError("single_theta set but the Theta_j differ")

    @property
    def m(self) -> int:
        return len(self.intervals)

    def box_bounds_float(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in self.intervals]

    def to_dict(self) -> dict:
        return {
            "intervals": [[rational_str(a), rational_str(b)] for a, b in self.intervals],
            "thetas": [[rational_str(c) for c in th.coeffs] for th in self.thetas],
            "single_theta": self.single_theta,
        }


def profile_labels(profile: ThetaProfile) -> tuple[list[Fraction], list[Fraction]]:
    """Signed compactification constants 2/Theta_j' at each endpoint."""
    c_alpha, c_beta = [], []
    for (a, b), th in zip(profile.intervals, profile.thetas):
        d = th.derivative()
        da, db = d(a), d(b)
        if da == 0 or db == 0:
            raise ValueError("Theta' vanishes at an endpoint: no finite label")
        c_alpha.append(Fraction(2) / da)
        c_beta.append(Fraction(2) / db)
    return c_alpha, c_beta


def check_orthocompact(profile: ThetaProfile, c_alpha, c_beta) -> dict:
    """Exact endpoint and positivity conditions for compactification.

    Checks, for each j: Theta_j(alpha_j) = 0 = Theta_j(beta_j); the slope
    products Theta_j'(alpha_j) c_j^alpha and Theta_j'(beta_j) c_j^beta equal 2
    in absolute value (the pass verdict is sign-insensitive, signed products
    are reported); (-1)^(m-j) Theta_j > 0 on the open interval; and matching
    labels c_j^beta = c_{j+1}^alpha across shared endpoints.
    """
    m = profile.m
    ca = [to_rational(x) for x in c_alpha]
    cb = [to_rational(x) for x in c_beta]
    if len(ca) != m or len(cb) != m:
        raise ValueError("label arrays must have length m")
    intervals = []
    failures: list[str] = []
    all_ok = True
    signed_ok = True
    for j in range(m):
        a, b = profile.intervals[j]
        th = profile.thetas[j]
        dth = th.derivative()
        za, zb = th(a), th(b)
        ta, tb = dth(a), dth(b)
        prod_a, prod_b = ta * ca[j], tb * cb[j]
        zeros_ok = za == 0 and zb == 0
        slopes_ok = abs(ta) * abs(ca[j]) == 2 and abs(tb) * abs(cb[j]) == 2
        interval_signed = prod_a == 2 and prod_b == 2
        # positivity of (-1)^(m-j) Theta_j on (alpha_j, beta_j), exact
        sign = (-1) ** (m - (j + 1))
        mid = (a + b) / 2
        pos_ok = count_roots_open(th, a, b) == 0 and sign * th(mid) > 0
        ok = zeros_ok and slopes_ok and pos_ok
        all_ok = all_ok and ok
        signed_ok = signed_ok and interval_signed
        if not zeros_ok:
            failures.append(f"interval {j + 1}: Theta nonzero at an endpoint")
        if not slopes_ok:
            failures.append(f"interval {j + 1}: |Theta'| * |label| != 2")
        if not pos_ok:
            failures.append(f"interval {j + 1}: sign condition fails inside")
        intervals.append(
            {
                "j": j + 1,
                "alpha": rational_str(a),
                "beta": rational_str(b),
                "theta_at_alpha": rational_str(za),
                "theta_at_beta": rational_str(zb),
                "theta_prime_alpha": rational_str(ta),
                "theta_prime_beta": rational_str(tb),
                "label_alpha": rational_str(ca[j]),
                "label_beta": rational_str(cb[j]),
                "signed_product_alpha": rational_str(prod_a),
                "signed_product_beta": rational_str(prod_b),
                "zeros_ok": zeros_ok,
                "slopes_ok": slopes_ok,
                "signed_ok": interval_signed,
                "positivity_ok": pos_ok,
            }
        )
    shared_ok = True
    for j in range(m - 1):
        if profile.intervals[j][1] == profile.intervals[j + 1][0] and cb[j] != ca[j + 1]:
            shared_ok = False
            failures.append(f"shared endpoint {j + 1}|{j + 2}: labels disagree")
    all_ok = all_ok and shared_ok
    return {
        "pass": all_ok,
        "signed_consistent": signed_ok and all_ok,
        "shared_endpoints_ok": shared_ok,
        "intervals": intervals,
        "failures": failures,
    }


# ---------------------------------------------------------------------------
# profile families
# ---------------------------------------------------------------------------


def fubini_study_profile(betas, c) -> ThetaProfile:
    """Constant holomorphic sectional curvature profile Theta0 = -c prod(t - beta_j)."""
    betas = [to_rational(b) for b in betas]
    if len(betas) < 2 or any(x >= y for x, y in zip(betas, betas[1:])):
        raise ValueError("betas must be strictly increasing, at least two")
    c = to_rational(c)
    if c <= 0:
        raise ValueError("c must be positive")
    theta = Polynomial.from_roots(betas) * (-c)
    m = len(betas) - 1
    intervals = [(betas[j], betas[j + 1]) for j in range(m)]
    return ThetaProfile(intervals, [theta] * m, single_theta=True)


def bochner_flat_profile(tag: WeightedProjectiveTag, c, beta) -> tuple[ThetaProfile, list[Fraction]]:
    """Profile Theta = c (t - beta) prod_j (t - beta_j) on the weighted projective
    space with the tag's weights; beta_j = beta - a_j / prod(a).

    The endpoint slope identity Theta'(beta_j) = -(c/n_j) prod_{k!=j}(beta_j - beta_k)
    is re-verified exactly before returning.
    """
    c = to_rational(c)
    beta = to_rational(beta)
    if c <= 0:
        raise ValueError("c must be positive")
    a = tag.weights
    total = math.prod(a)
    betas = [beta - Fraction(aj, total) for aj in a]  # increasing since a decreases
    theta = Polynomial.from_roots(betas + [beta]) * c
    dth = theta.derivative()
    for j, bj in enumerate(betas):
        if theta(bj) != 0:
            raise ArithmeticError("profile does not vanish at a root")
        prod = Fraction(1)
        for k, bk in enumerate(betas):
            if k != j:
                prod *= bj - bk
        if dth(bj) != -(c / tag.labels[j]) * prod:
            raise ArithmeticError("endpoint slope fails the label identity")
    m = tag.m
    intervals = [(betas[j], betas[j + 1]) for j in range(m)]
    return ThetaProfile(intervals, [theta] * m, single_theta=True), betas


def ke_surface_profiles(p: int, q: int) -> tuple[ThetaProfile, Fraction]:
    """Einstein orbifold surface profiles on the quadrilateral family M(p, q).

    Theta_1 = -(t+p)(t+q)(t-p-q)/C on [-p,-q], Theta_2 = -(t-p)(t-q)(t+p+q)/C
    on [q,p], C = (p-q)(2q+p)(2p+q)/2. The cubics P_j = -C Theta_j are monic
    with constant nonzero difference, which is re-verified exactly.
    """
    p, q = int(p), int(q)
    if not (p > q >= 1):
        raise ValueError("need integers p > q >= 1")
    if _gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    C = Fraction((p - q) * (2 * q + p) * (2 * p + q), 2)
    p1 = Polynomial.from_roots([-p, -q, p + q])
    p2 = Polynomial.from_roots([p, q, -(p + q)])
    diff = p1 - p2
    if diff.degree > 0 or diff(0) != -2 * p * q * (p + q) or diff(0) == 0:
        raise ArithmeticError("cubic difference is not the expected nonzero constant")
    theta1 = p1 * (Fraction(-1) / C)
    theta2 = p2 * (Fraction(-1) / C)
    profile = ThetaProfile([(-p, -q), (q, p)], [theta1, theta2])
    return profile, C


# ---------------------------------------------------------------------------
# H matrix and coordinate conversion
# ---------------------------------------------------------------------------


def _float_elem_all(values: list[float]) -> list[float]:
    """sigma_0..sigma_k of a float list, by incremental products."""
    e = [1.0]
    for x in values:
        e = [1.0] + [e[r] + x * e[r - 1] for r in range(1, len(e))] + [x * e[-1]]
    return e


def _elem_all_generic(values, one):
    """sigma_0..sigma_k over any commutative ring (used with Polynomial entries)."""
    e = [one]
    for x in values:
        new = [one]
        for r in range(1, len(e)):
            new.append(e[r] + x * e[r - 1])
        new.append(x * e[-1])
        e = new
    return e


def orthotoric_H(profile: ThetaProfile, xi) -> np.ndarray:
    """H_{rs} = sum_j Theta_j(xi_j) sigma_{r-1}(xi-hat-j) sigma_{s-1}(xi-hat-j) / Delta_j.

    xi must lie strictly inside the open box, at distance > 1e-9 from its
    boundary; Delta_j is the product of root differences.
    """
    xi = np.asarray(xi, dtype=float)
    m = profile.m
    if xi.shape != (m,):
        raise ValueError("xi has wrong length")
    for j, (a, b) in enumerate(profile.box_bounds_float()):
        if not (a + 1e-9 < xi[j] < b - 1e-9):
            raise ValueError(f"xi_{j + 1} outside the open box (margin 1e-9)")
    return _orthotoric_H_raw([th.to_float_array() for th in profile.thetas], xi)


def _orthotoric_H_raw(theta_coeff_arrays: list[np.ndarray], xi: np.ndarray) -> np.ndarray:
    """Unguarded H evaluation from float coefficient arrays (low degree first)."""
    m = len(xi)
    H = np.zeros((m, m))
    for j in range(m):
        others = [xi[k] for k in range(m) if k != j]
        sig = _float_elem_all(others)  # sigma_0..sigma_{m-1}
        delta = 1.0
        for k in range(m):
            if k != j:
                delta *= xi[j] - xi[k]
        cs = theta_coeff_arrays[j]
        tval = 0.0
        for coef in cs[::-1]:
            tval = tval * xi[j] + coef
        w = tval / delta
        v = np.array([sig[r] for r in range(m)])
        H += w * np.outer(v, v)
    return H


def sigma_to_roots(sigma, profile: ThetaProfile, tol: float = 1e-9) -> np.ndarray:
    """Invert the elementary symmetric map: roots of t^m - sigma_1 t^{m-1} + ...

    Coefficients are taken exactly (binary image of the input), roots found by
    exact isolation, so coincident roots at shared interval endpoints are
    handled. Roots must fall in the closed intervals within tol.
    """
    m = profile.m
    sig = [to_rational(x) if not isinstance(x, float) else Fraction(x) for x in sigma]
    if len(sig) != m:
        raise ValueError("sigma has wrong length")
    coeffs = [Fraction(0)] * (m + 1)
    coeffs[m] = Fraction(1)
    for r in range(1, m + 1):
        coeffs[m - r] = (-1) ** r * sig[r - 1]
    p = Polynomial(coeffs)
    roots = real_roots_mult(p, tol=min(tol, 1e-12))
    total = sum(mult for _, mult in roots)
    if total != m:
        raise ValueError("characteristic polynomial has nonreal roots: sigma outside the image")
    flat = sorted(r for r, mult in roots for _ in range(mult))
    bounds = profile.box_bounds_float()
    for j, r in enumerate(flat):
        a, b = bounds[j]
        if not (a - tol <= r <= b + tol):
            raise ValueError(f"root {j + 1} escapes its interval")
    return np.array(flat)


def _fraction_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _exact_roots_from_sigma(sig: list[Fraction], profile: ThetaProfile) -> list[Fraction]:
    """Exact sorted roots when they are rational; peels off endpoint roots first."""
    m = len(sig)
    coeffs = [Fraction(0)] * (m + 1)
    coeffs[m] = Fraction(1)
    for r in range(1, m + 1):
        coeffs[m - r] = (-1) ** r * sig[r - 1]
    p = Polynomial(coeffs)
    endpoints = sorted({e for ab in profile.intervals for e in ab})
    roots: list[Fraction] = []
    while p.degree > 2:
        hit = next((e for e in endpoints if p(e) == 0), None)
        if hit is None:
            raise ValueError("root coordinates are not rational at this point")
        roots.append(hit)
        p = p // Polynomial([-hit, Fraction(1)])
    if p.degree == 2:
        c0, c1, c2 = p[0], p[1], p[2]
        disc = c1 * c1 - 4 * c2 * c0
        s = _fraction_sqrt(disc)
        if s is None:
            raise ValueError("root coordinates are not rational at this point")
        roots.extend([(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)])
    elif p.degree == 1:
        roots.append(-p[0] / p[1])
    return sorted(roots)


def orthotoric_hessian_field(profile: ThetaProfile) -> HessianField:
    """The H matrix as a field over the momentum polytope (sigma coordinates).

    Float route: converts sigma to roots and applies the closed form; valid up
    to the boundary when the root coordinates stay distinct. Exact route:
    restricts along root-space coordinate lines through points whose root
    coordinates are rational (true on facets of the surface examples), giving
    matrices of rational functions plus the sigma-velocity of each curve.
    """
    m = profile.m
    coeff_arrays = [th.to_float_array() for th in profile.thetas]
    bounds = profile.box_bounds_float()

    def eval_float(mu: np.ndarray) -> np.ndarray:
        coeffs = np.zeros(m + 1)
        coeffs[0] = 1.0
        for r in range(1, m + 1):
            coeffs[r] = (-1) ** r * mu[r - 1]
        roots = np.roots(coeffs)
        if np.max(np.abs(roots.imag)) > 1e-7:
            raise ValueError("sigma outside the image of the box")
        xi = np.sort(roots.real)
        for j, (a, b) in enumerate(bounds):
            xi[j] = min(max(xi[j], a), b)
        return _orthotoric_H_raw(coeff_arrays, xi)

    def curve_provider(y0, avoid_normal):
        xi0 = _exact_roots_from_sigma(list(y0), profile)
        curves = []
        for moving in range(m):
            # root-space line: xi_moving varies, others fixed
            xi_t = [Polynomial.constant(x) for x in xi0]
            xi_t[moving] = Polynomial([xi0[moving], Fraction(1)])
            entries = [[RationalFunction(Polynomial([])) for _ in range(m)] for _ in range(m)]
            for j in range(m):
                others = [xi_t[k] for k in range(m) if k != j]
                sig = _elem_all_generic(others, Polynomial.constant(Fraction(1)))
                delta = Polynomial.constant(Fraction(1))
                for k in range(m):
                    if k != j:
                        delta = delta * (xi_t[j] - xi_t[k])
                if delta.is_zero():
                    raise ValueError("coincident roots along the exact curve")
                if j == moving:
                    theta_j = profile.thetas[j].compose_affine(Fraction(1), xi0[j])
                else:
                    theta_j = Polynomial.constant(profile.thetas[j](xi0[j]))
                for r in range(m):
                    for s in range(r, m):
                        term = RationalFunction(theta_j * sig[r] * sig[s], delta)
                        entries[r][s] = entries[r][s] + term
                        if s != r:
                            entries[s][r] = entries[s][r] + term
            sigma_t = _elem_all_generic(xi_t, Polynomial.constant(Fraction(1)))
            velocity = [RationalFunction(sigma_t[r].derivative()) for r in range(1, m + 1)]
            curves.append((entries, velocity))
        return curves

    return HessianField(m, eval_float, curve_provider, description="orthotoric")
