"""Pointwise metric evaluation and finite-difference curvature checks.

Evaluates the order-l fibration ansatz (product base of constant holomorphic
sectional curvature factors, orthotoric fibre data), its Kahler form, complex
structure and candidate hamiltonian 2-form, all as real matrices in an
explicit chart. Curvature quantities come from centered finite differences
with Richardson extrapolation; the defining identities (hamiltonian equation,
Einstein, extremal, momentum spectrum) are verified numerically.

Chart conventions. Each projective-space base factor of holomorphic sectional
curvature kappa uses one inhomogeneous chart with potential
psi(w) = (2/kappa) log(1 + (kappa/2)|w|^2) (kappa = 0 degenerates to |w|^2,
the flat model) and Kahler form omega_a = d alpha_a for the rotation
invariant primitive alpha_a = -(1/2) d psi o J. With these choices the factor
metric is positive definite with holomorphic sectional curvature exactly
kappa. Coordinates are ordered (xi_1..xi_l, t_1..t_l, then per factor
x_1..x_d, y_1..y_d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .exact import Polynomial, to_rational
from .profiles import ThetaProfile

TWO_FORM_SKEW_TOL = 1e-10


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaseFactor:
    """Base factor: complex dimension and holomorphic sectional curvature.

    kappa = 0 is flat complex space; the sign of a curved factor is carried
    by kappa.
    """

    dim: int
    kappa: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("factor dimension must be positive")


@dataclass(frozen=True)
class CalabiData:
    """Order-l ansatz data: constant roots, base factors, fibre profile."""

    ell: int
    etas: tuple[Fraction, ...]
    factors: tuple[BaseFactor, ...]
    F: tuple[Polynomial, ...]
    box: tuple[tuple[Fraction, Fraction], ...]
    gauge: str = "radial"

    def __post_init__(self):
        object.__setattr__(self, "etas", tuple(to_rational(e) for e in self.etas))
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "F", tuple(self.F))
        object.__setattr__(
            self, "box", tuple((to_rational(a), to_rational(b)) for a, b in self.box)
        )
        if self.ell < 1:
            raise ValueError("order must be >= 1")
        if len(self.etas) != len(self.factors):
            raise ValueError("one constant root per base factor")
        if len(set(self.etas)) != len(self.etas):
            raise ValueError("constant roots must be distinct")
        if len(self.F) not in (1, self.ell):
            raise ValueError("need one F or one per fibre coordinate")
        if len(self.box) != self.ell:
            raise ValueError("need one momentum interval per fibre coordinate")
        for a, b in self.box:
            if not a < b:
                raise ValueError("empty momentum interval")
        # constant roots may not cross the momentum intervals: the sign of
        # p_nc(eta_a) must be the same over the whole box
        for e in self.etas:
            for a, b in self.box:
                if a < e < b:
                    raise ValueError("constant root inside a momentum interval")
        if self.gauge not in ("radial", "radial+dx"):
            raise ValueError("unknown gauge")

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @property
    def m(self) -> int:
        return self.ell + sum(f.dim for f in self.factors)

    def F_j(self, j: int) -> Polynomial:
        return self.F[0] if len(self.F) == 1 else self.F[j]

    def p_c(self) -> Polynomial:
        out = Polynomial([Fraction(1)])
        for e, f in zip(self.etas, self.factors):
            factor = Polynomial([-e, Fraction(1)])
            for _ in range(f.dim):
                out = out * factor
        return out


@dataclass
class ChartPoint:
    """Coordinates: fibre momenta xi, fibre angles t, complex base charts."""

    xi: np.ndarray
    t: np.ndarray
    w: list[np.ndarray] = dc_field(default_factory=list)

    def __post_init__(self):
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        self.t = np.atleast_1d(np.asarray(self.t, dtype=float))
        self.w = [np.atleast_1d(np.asarray(wa, dtype=complex)) for wa in self.w]


def pack_point(pt: ChartPoint) -> np.ndarray:
    parts = [pt.xi, pt.t]
    for wa in pt.w:
        parts.extend([wa.real, wa.imag])
    return np.concatenate(parts)


def unpack_point(vec: np.ndarray, ell: int, dims: list[int]) -> ChartPoint:
    xi = vec[:ell]
    t = vec[ell : 2 * ell]
    w = []
    off = 2 * ell
    for d in dims:
        w.append(vec[off : off + d] + 1j * vec[off + d : off + 2 * d])
        off += 2 * d
    return ChartPoint(xi, t, w)


# ---------------------------------------------------------------------------
# base factor blocks
# ---------------------------------------------------------------------------


def _factor_blocks(factor: BaseFactor, w: np.ndarray, gauge: str):
    """(G, Omega, alpha) of one base factor in real coordinates (x..., y...).

    Built from the Hermitian matrix M = 2 (f' I + f'' wbar w^T) of the chart
    potential; alpha is the configured primitive with d alpha = Omega.
    """
    d = factor.dim
    kappa = factor.kappa
    rho = float(np.sum(np.abs(w) ** 2))
    denom = 1.0 + 0.5 * kappa * rho
    if denom <= 1e-12:
        raise ValueError("base point outside the chart of the curved factor")
    fp = 1.0 / denom
    fpp = -0.5 * kappa / denom**2
    M = 2.0 * (fp * np.eye(d) + fpp * np.outer(w.conj(), w))
    A, B = M.real, M.imag
    G = np.block([[A, B], [-B, A]])
    Om = np.block([[-B, A], [-A, -B]])
    x, y = w.real, w.imag
    alpha = fp * np.concatenate([-y, x])  # f' (x dy - y dx)
    if gauge == "radial+dx":
        e = np.zeros(2 * d)
        e[0] = 1.0
        alpha = alpha + e
    return G, Om, alpha


# ---------------------------------------------------------------------------
# metric evaluation
# ---------------------------------------------------------------------------


def _exact_sigma_tables(xi: np.ndarray):
    """(sigma_1..sigma_l, and sigma_0..sigma_{l-1} of each hat list), exactly."""
    ell = len(xi)
    vals = [Fraction(float(x)) for x in xi]

    def elem_all(vs):
        e = [Fraction(1)]
        for v in vs:
            e = [Fraction(1)] + [e[r] + v * e[r - 1] for r in range(1, len(e))] + [v * e[-1]]
        return e

    sig = [float(s) for s in elem_all(vals)[1:]]
    hats = []
    for j in range(ell):
        others = [vals[k] for k in range(ell) if k != j]
        hats.append([float(s) for s in elem_all(others)])
    return sig, hats


class EvalResult:
    """All pointwise tensors of one evaluation, as 2m x 2m real matrices."""

    __slots__ = ("g", "omega", "J", "phi", "thetas", "vec", "trphi")

    def __init__(self, g, omega, J, phi, thetas, vec, trphi):
        self.g = g
        self.omega = omega
        self.J = J
        self.phi = phi
        self.thetas = thetas
        self.vec = vec
        self.trphi = trphi


def _wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of the 2-form a ^ b from covectors."""
    return np.outer(a, b) - np.outer(b, a)


def eval_full(data: CalabiData, pt: ChartPoint, f_margin: float = 1e-12) -> EvalResult:
    ell = data.ell
    dims = [f.dim for f in data.factors]
    n = 2 * ell + 2 * sum(dims)
    xi = pt.xi
    if len(xi) != ell or len(pt.t) != ell or len(pt.w) != len(dims):
        raise ValueError("point does not match the data")
    for j in range(ell):
        for k in range(j + 1, ell):
            if abs(xi[j] - xi[k]) < 1e-12:
                raise ValueError("fibre momenta collide")

    sig, hats = _exact_sigma_tables(xi)
    etas = [float(e) for e in data.etas]
    pnc_eta = [float(np.prod([e - x for x in xi])) for e in etas]
    weights = [abs(v) for v in pnc_eta]
    signs = [1.0 if v > 0 else -1.0 for v in pnc_eta]

    pc = data.p_c().to_float_array()

    def pc_at(x: float) -> float:
        v = 0.0
        for c in pc[::-1]:
            v = v * x + c
        return v

    g = np.zeros((n, n))
    omega = np.zeros((n, n))
    phi = np.zeros((n, n))

    # base blocks and connection primitives
    thetas = [np.zeros(n) for _ in range(ell)]
    for r in range(ell):
        thetas[r][ell + r] = 1.0
    off = 2 * ell
    for a, factor in enumerate(data.factors):
        Ga, Oma, alpha = _factor_blocks(factor, pt.w[a], data.gauge)
        sl = slice(off, off + 2 * factor.dim)
        g[sl, sl] += weights[a] * Ga
        omega[sl, sl] += weights[a] * Oma
        phi[sl, sl] += etas[a] * weights[a] * Oma
        for r in range(ell):
            c_ar = (-1) ** (r + 1) * etas[a] ** (ell - (r + 1))
            thetas[r][sl] += c_ar * signs[a] * alpha
        off += 2 * factor.dim

    # fibre blocks
    dsig = []  # d sigma_r as covectors
    for r in range(ell):
        v = np.zeros(n)
        for j in range(ell):
            v[j] = hats[j][r]  # d sigma_r / d xi_j = sigma_{r-1}(hat xi_j)
        dsig.append(v)
    for j in range(ell):
        delta_j = float(np.prod([xi[j] - xi[k] for k in range(ell) if k != j]))
        pprime = pc_at(xi[j]) * delta_j
        Fj = data.F_j(j).to_float_array()
        fval = 0.0
        for c in Fj[::-1]:
            fval = fval * xi[j] + c
        if abs(fval) < f_margin:
            raise ValueError("profile vanishes at a sampled momentum")
        dxi = np.zeros(n)
        dxi[j] = 1.0
        g += (pprime / fval) * np.outer(dxi, dxi)
        u = np.zeros(n)
        for r in range(ell):
            u += hats[j][r] * thetas[r]
        g += (fval / pprime) * np.outer(u, u)
    for r in range(ell):
        omega += _wedge(dsig[r], thetas[r])
        lead = sig[r] * dsig[0] - (dsig[r + 1] if r + 1 < ell else np.zeros(n))
        phi += _wedge(lead, thetas[r])

    eig = np.linalg.eigvalsh(g)
    if eig[0] <= 0:
        raise ValueError("assembled metric is not positive definite at this point")
    J = np.linalg.solve(omega, g)
    trphi = 0.5 * float(np.trace(np.linalg.solve(omega, phi)))
    return EvalResult(g, omega, J, phi, thetas, pack_point(pt), trphi)


def eval_metric(data: CalabiData, pt: ChartPoint):
    """(g, omega, J, phi) of the order-l ansatz at a chart point."""
    res = eval_full(data, pt)
    return res.g, res.omega, res.J, res.phi


def orthotoric_data(profile: ThetaProfile) -> CalabiData:
    """Order-m data with no base factors: F_j = Theta_j."""
    return CalabiData(
        ell=profile.m,
        etas=(),
        factors=(),
        F=tuple(profile.thetas),
        box=tuple(profile.intervals),
    )


def eval_orthotoric_metric(profile: ThetaProfile, pt: ChartPoint):
    """(g, omega, J, phi) of the orthotoric metric (l = m, no base)."""
    res = eval_full(orthotoric_data(profile), pt)
    return res.g, res.omega, res.J, res.phi


def line_bundle_data(
    etas, dims, kappas, F: Polynomial, gauge: str = "radial"
) -> CalabiData:
    """Order-1 projective line bundle data, momentum normalized to [-1, 1].

    Signs follow the fibration convention p_nc(eta_a) = eta_a - z; a factor
    written as (z - eta_a) g_a with g_a negative definite is handled by the
    positive chart metric and the sign bookkeeping of the connection.
    """
    etas = tuple(to_rational(e) for e in etas)
    for e in etas:
        if not abs(e) > 1:
            raise ValueError("constant roots must satisfy |eta| > 1")
    factors = tuple(BaseFactor(int(d), float(k)) for d, k in zip(dims, kappas))
    if len(factors) != len(etas):
        raise ValueError("one factor per constant root")
    return CalabiData(
        ell=1,
        etas=etas,
        factors=factors,
        F=(F,),
        box=((Fraction(-1), Fraction(1)),),
        gauge=gauge,
    )


def eval_line_bundle_metric(data: CalabiData, pt: ChartPoint):
    """(g, omega, J, phi) for order-1 line bundle data built by line_bundle_data."""
    if data.ell != 1:
        raise ValueError("line bundle data must have order 1")
    res = eval_full(data, pt)
    return res.g, res.omega, res.J, res.phi


class MetricField:
    """Callable bundle of the pointwise tensors over packed coordinates."""

    def __init__(self, data: CalabiData, name: str = ""):
        self.data = data
        self.ell = data.ell
        self.dims = [f.dim for f in data.factors]
        self.n = 2 * data.ell + 2 * sum(self.dims)
        self.name = name or "calabi"

    def point(self, vec: np.ndarray) -> ChartPoint:
        return unpack_point(np.asarray(vec, dtype=float), self.ell, self.dims)

    def full(self, vec: np.ndarray) -> EvalResult:
        return eval_full(self.data, self.point(vec))

    def metric(self, vec: np.ndarray) -> np.ndarray:
        return self.full(vec).g

    def phi(self, vec: np.ndarray) -> np.ndarray:
        return self.full(vec).phi

    def trphi(self, vec: np.ndarray) -> float:
        return self.full(vec).trphi


def orthotoric_field(profile: ThetaProfile) -> MetricField:
    return MetricField(orthotoric_data(profile), name="orthotoric")


# ---------------------------------------------------------------------------
# finite-difference curvature
# ---------------------------------------------------------------------------


@dataclass
class CurvatureReport:
    vec: np.ndarray
    g: np.ndarray
    omega: np.ndarray
    J: np.ndarray
    phi: np.ndarray
    ricci: np.ndarray
    scalar: float
    trphi: float
    fd_step: float

    def to_dict(self) -> dict:
        return {
            "point": [float(x) for x in self.vec],
            "scalar": self.scalar,
            "trphi": self.trphi,
            "fd_step": self.fd_step,
        }


def _christoffel(metric_fn, vec: np.ndarray, h: float) -> np.ndarray:
    n = len(vec)
    g0 = metric_fn(vec)
    ginv = np.linalg.inv(g0)
    dg = np.zeros((n, n, n))  # dg[i, j, k] = d_i g_jk
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        dg[i] = (metric_fn(vec + e) - metric_fn(vec - e)) / (2 * h)
    gamma = np.zeros((n, n, n))  # gamma[k, i, j]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                s = 0.0
                for l in range(n):
                    s += ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                gamma[k, i, j] = 0.5 * s
    return gamma


def _ricci_once(metric_fn, vec: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    n = len(vec)
    gamma0 = _christoffel(metric_fn, vec, h)
    dgamma = np.zeros((n, n, n, n))  # dgamma[i, k, a, b] = d_i gamma^k_ab
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        dgamma[i] = (_christoffel(metric_fn, vec + e, h) - _christoffel(metric_fn, vec - e, h)) / (2 * h)
    ricci = np.zeros((n, n))
    # Ric_jk = R^i_{ijk} = d_i G^i_jk - d_j G^i_ik + G^i_il G^l_jk - G^i_jl G^l_ik
    for j in range(n):
        for k in range(n):
            s = 0.0
            for i in range(n):
                s += dgamma[i, i, j, k] - dgamma[j, i, i, k]
                for l in range(n):
                    s += gamma0[i, i, l] * gamma0[l, j, k] - gamma0[i, j, l] * gamma0[l, i, k]
            ricci[j, k] = s
    return ricci, gamma0


def curvature(field: MetricField, vec: np.ndarray, fd_step: float | None = None) -> CurvatureReport:
    """Ricci and scalar curvature by centered differences with Richardson.

    Base step defaults to 1e-4 * max(1, |coordinates|); results combine steps
    h and h/2 as (4 R_{h/2} - R_h) / 3.
    """
    vec = np.asarray(vec, dtype=float)
    if fd_step is None:
        fd_step = 1e-4 * max(1.0, float(np.max(np.abs(vec))))
    res = field.full(vec)
    r_h, _ = _ricci_once(field.metric, vec, fd_step)
    r_h2, _ = _ricci_once(field.metric, vec, fd_step / 2)
    ricci = (4 * r_h2 - r_h) / 3
    scal = float(np.sum(np.linalg.inv(res.g) * ricci))
    return CurvatureReport(
        vec=vec, g=res.g, omega=res.omega, J=res.J, phi=res.phi,
        ricci=ricci, scalar=scal, trphi=res.trphi, fd_step=fd_step,
    )


def fd_gradient(fn, vec: np.ndarray, h: float) -> np.ndarray:
    n = len(vec)
    out = np.zeros(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        out[i] = (fn(vec + e) - fn(vec - e)) / (2 * h)
    return out


def fd_matrix_derivatives(fn, vec: np.ndarray, h: float) -> np.ndarray:
    n = len(vec)
    out = None
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        d = (fn(vec + e) - fn(vec - e)) / (2 * h)
        if out is None:
            out = np.zeros((n,) + d.shape)
        out[i] = d
    return out


def verify_hamiltonian(
    field: MetricField,
    vec: np.ndarray,
    fd_step: float | None = None,
    phi_fn=None,
    trphi_fn=None,
) -> float:
    """Max residual of the defining first-order identity of phi.

    nabla_X phi = (1/2)(d trphi ^ (JX)-flat - d^c trphi ^ X-flat), with
    d^c f = -df o J. phi_fn/trphi_fn may be overridden for negative controls.
    """
    vec = np.asarray(vec, dtype=float)
    if fd_step is None:
        fd_step = 1e-4 * max(1.0, float(np.max(np.abs(vec))))
    h = fd_step
    res = field.full(vec)
    if phi_fn is None:
        phi_fn = field.phi
    if trphi_fn is None:
        trphi_fn = field.trphi
    n = field.n
    gamma_h = _christoffel(field.metric, vec, h)
    gamma_h2 = _christoffel(field.metric, vec, h / 2)
    gamma = (4 * gamma_h2 - gamma_h) / 3
    dphi_h = fd_matrix_derivatives(phi_fn, vec, h)
    dphi_h2 = fd_matrix_derivatives(phi_fn, vec, h / 2)
    dphi = (4 * dphi_h2 - dphi_h) / 3
    phi0 = phi_fn(vec)
    df_h = fd_gradient(trphi_fn, vec, h)
    df_h2 = fd_gradient(trphi_fn, vec, h / 2)
    df = (4 * df_h2 - df_h) / 3
    dcf = -res.J.T @ df  # d^c f (Y) = -df(JY)
    GJ = res.g @ res.J
    worst = 0.0
    for i in range(n):
        # nabla_i phi_jk = d_i phi_jk - G^l_ij phi_lk - G^l_ik phi_jl
        nabla = dphi[i] - np.einsum("lj,lk->jk", gamma[:, i, :], phi0) - np.einsum(
            "lk,jl->jk", gamma[:, i, :], phi0
        )
        rhs = 0.5 * (
            np.outer(df, GJ[:, i]) - np.outer(GJ[:, i], df)
            - np.outer(dcf, res.g[:, i]) + np.outer(res.g[:, i], dcf)
        )
        worst = max(worst, float(np.max(np.abs(nabla - rhs))))
    return worst


def verify_einstein(field: MetricField, vecs, fd_step: float | None = None) -> tuple[float, float]:
    """(lambda, max deviation) for Ric = lambda g over a point set."""
    vecs = [np.asarray(v, dtype=float) for v in vecs]
    if len(vecs) < 2:
        raise ValueError("need at least two points")
    reports = [curvature(field, v, fd_step) for v in vecs]
    r0 = reports[0]
    lam = float(np.sum(r0.ricci * r0.g) / np.sum(r0.g * r0.g))
    dev = 0.0
    for rep in reports:
        dev = max(dev, float(np.max(np.abs(rep.ricci - lam * rep.g))))
    return lam, dev


def verify_extremal(field: MetricField, vecs, fd_step: float | None = None) -> dict:
    """Fit Scal = a trphi + b from the first two points; report max residual."""
    vecs = [np.asarray(v, dtype=float) for v in vecs]
    if len(vecs) < 3:
        raise ValueError("need at least three points")
    reports = [curvature(field, v, fd_step) for v in vecs]
    t0, t1 = reports[0].trphi, reports[1].trphi
    s0, s1 = reports[0].scalar, reports[1].scalar
    degenerate = abs(t0 - t1) < 1e-9
    if degenerate:
        a, b = 0.0, 0.5 * (s0 + s1)
    else:
        a = (s0 - s1) / (t0 - t1)
        b = s0 - a * t0
    residual = max(abs(rep.scalar - a * rep.trphi - b) for rep in reports)
    return {"a": a, "b": b, "residual": residual, "degenerate_fit": degenerate,
            "scal": [rep.scalar for rep in reports], "trphi": [rep.trphi for rep in reports]}


def momentum_spectrum(field: MetricField, vec: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues of omega^{-1} phi (each momentum appears twice)."""
    res = field.full(np.asarray(vec, dtype=float))
    vals = np.linalg.eigvals(np.linalg.solve(res.omega, res.phi))
    if np.max(np.abs(vals.imag)) > 1e-8:
        raise ValueError("momentum endomorphism has nonreal eigenvalues")
    return np.sort(vals.real)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def sample_points(
    data: CalabiData,
    count: int,
    seed: int,
    margin: float = 0.05,
    base_radius: float = 0.7,
) -> list[np.ndarray]:
    """Seeded chart points: momenta inside the box with relative margin and
    pairwise gaps, angles in [0, 2pi), base coordinates in a complex ball."""
    rng = np.random.default_rng(seed)
    ell = data.ell
    dims = [f.dim for f in data.factors]
    box = [(float(a), float(b)) for a, b in data.box]
    out = []
    gap = margin * min(b - a for a, b in box)
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise RuntimeError("sampler failed to respect margins")
        xi = np.array([a + (b - a) * (margin + (1 - 2 * margin) * rng.random()) for a, b in box])
        if any(abs(xi[i] - xi[j]) < gap for i in range(ell) for j in range(i + 1, ell)):
            continue
        t = 2 * np.pi * rng.random(ell)
        w = []
        for d in dims:
            radius = base_radius * rng.random(d) ** (1.0 / (2 * d))
            angle = 2 * np.pi * rng.random(d)
            w.append(radius * np.exp(1j * angle))
        out.append(pack_point(ChartPoint(xi, t, w)))
    return out
