"""Profile layer: compactification conditions and the named profile families."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthotoric.exact import Polynomial, elem_sym
from orthotoric.polytopes import canonical_hessian, ke_surface_signed_labels, orthotoric_simplex
from orthotoric.profiles import (
    ThetaProfile,
    WeightedProjectiveTag,
    bochner_flat_profile,
    check_orthocompact,
    fubini_study_profile,
    ke_surface_profiles,
    orthotoric_H,
    orthotoric_hessian_field,
    profile_labels,
    sigma_to_roots,
)


class TestThetaProfile:
    def test_interval_ordering_enforced(self):
        with pytest.raises(ValueError):
            ThetaProfile([(Fraction(1), Fraction(0))], [Polynomial([0, 1])])

    def test_to_dict(self):
        prof = fubini_study_profile([0, 1], 1)
        d = prof.to_dict()
        assert set(d) == {"intervals", "thetas", "single_theta"}
        assert prof.m == 1


class TestFubiniStudy:
    def test_profile_shape(self):
        prof = fubini_study_profile([0, 1, 2], 1)
        assert prof.m == 2
        assert prof.single_theta
        # Theta0 = -c (t - 0)(t - 1)(t - 2)
        want = Polynomial([Fraction(0), Fraction(-2), Fraction(3), Fraction(-1)])
        assert prof.thetas[0].coeffs == want.coeffs

    def test_compactifies(self):
        prof = fubini_study_profile([0, 1, 2], Fraction(3, 2))
        ca, cb = profile_labels(prof)
        rep = check_orthocompact(prof, ca, cb)
        assert rep["pass"] and rep["signed_consistent"]
        assert not rep["failures"]

    def test_spoiled_theta_fails(self):
        prof = fubini_study_profile([0, 1, 2], 1)
        ca, cb = profile_labels(prof)
        bad = ThetaProfile(
            prof.intervals,
            [th + Polynomial([Fraction(1, 7)]) for th in prof.thetas],
            single_theta=True,
        )
        rep = check_orthocompact(bad, ca, cb)
        assert not rep["pass"]
        assert rep["failures"]

    def test_wrong_labels_fail_slopes(self):
        prof = fubini_study_profile([0, 1], 1)
        ca, cb = profile_labels(prof)
        rep = check_orthocompact(prof, [2 * c for c in ca], cb)
        assert not rep["pass"]
        assert any("label" in f or "Theta'" in f or "|Theta'|" in f for f in rep["failures"])


class TestBochnerFlat:
    def test_weights_321(self):
        tag = WeightedProjectiveTag([3, 2, 1])
        assert tag.labels == [2, 3, 6]  # n_j = prod of the other weights
        prof, betas = bochner_flat_profile(tag, 1, 0)
        assert betas == [Fraction(-1, 2), Fraction(-1, 3), Fraction(-1, 6)]
        # endpoint conditions: Theta(beta_j) = 0 and
        # Theta'(beta_j) = -(c/n_j) prod_{k != j} (beta_j - beta_k)
        th = prof.thetas[0]
        dth = th.derivative()
        for j, bj in enumerate(betas):
            assert th(bj) == 0
            prod = Fraction(1)
            for k, bk in enumerate(betas):
                if k != j:
                    prod *= bj - bk
            assert dth(bj) == -Fraction(1, tag.labels[j]) * prod

    def test_compactifies_with_orbifold_labels(self):
        tag = WeightedProjectiveTag([3, 2, 1])
        prof, _ = bochner_flat_profile(tag, 1, 0)
        ca, cb = profile_labels(prof)
        assert check_orthocompact(prof, ca, cb)["pass"]

    def test_beta_shift(self):
        tag = WeightedProjectiveTag([2, 1])
        prof0, betas0 = bochner_flat_profile(tag, 1, 0)
        prof1, betas1 = bochner_flat_profile(tag, 1, Fraction(1, 3))
        assert [b - Fraction(1, 3) for b in betas1] == betas0

    def test_weights_validated(self):
        with pytest.raises(ValueError):
            WeightedProjectiveTag([0, 1])


class TestKeSurface:
    @pytest.mark.parametrize("p,q", [(2, 1), (3, 1), (3, 2)])
    def test_compactifies(self, p, q):
        prof, C = ke_surface_profiles(p, q)
        ca, cb = profile_labels(prof)
        rep = check_orthocompact(prof, ca, cb)
        assert rep["pass"], rep["failures"]

    def test_constant_21(self):
        prof, C = ke_surface_profiles(2, 1)
        assert C == 10  # (p-q)(2q+p)(2p+q)/2

    def test_signed_labels_match_polytope(self):
        prof, _ = ke_surface_profiles(2, 1)
        ca, cb = profile_labels(prof)
        pa, pb = ke_surface_signed_labels(2, 1)
        scale = ca[0] / pa[0]
        assert [c / scale for c in ca] == pa
        assert [c / scale for c in cb] == pb

    def test_interval_structure(self):
        # momentum intervals (-p, -q) and (q, p): disjoint and ordered
        prof, _ = ke_surface_profiles(3, 2)
        assert prof.intervals == [
            (Fraction(-3), Fraction(-2)),
            (Fraction(2), Fraction(3)),
        ]


class TestOrthotoricH:
    def test_fs_matches_canonical(self):
        betas, c = [Fraction(0), Fraction(1), Fraction(2)], Fraction(1)
        prof = fubini_study_profile(betas, c)
        field = canonical_hessian(orthotoric_simplex(betas, [1, 1, 1], c))
        rng = np.random.default_rng(4)
        bounds = prof.box_bounds_float()
        for _ in range(5):
            xi = np.array([a + (b - a) * rng.uniform(0.1, 0.9) for a, b in bounds])
            sigma = elem_sym([Fraction(float(v)) for v in xi])
            H_prof = orthotoric_H(prof, xi)
            H_can = field.eval_float(np.array([float(s) for s in sigma]))
            assert np.abs(H_prof - H_can).max() < 1e-10

    def test_diagonal_in_root_coordinates(self):
        prof = fubini_study_profile([0, 1], 1)
        H = orthotoric_H(prof, np.array([0.4]))
        assert H.shape == (1, 1)

    def test_outside_box_rejected(self):
        prof = fubini_study_profile([0, 1, 2], 1)
        with pytest.raises(ValueError):
            orthotoric_H(prof, np.array([0.5, 5.0]))

    def test_hessian_field_wraps(self):
        prof = fubini_study_profile([0, 1, 2], 1)
        field = orthotoric_hessian_field(prof)
        assert field.m == 2


class TestSigmaToRoots:
    @settings(max_examples=40, deadline=None)
    @given(st.tuples(st.floats(0.02, 0.98), st.floats(1.02, 1.98)))
    def test_roundtrip(self, xi):
        prof = fubini_study_profile([0, 1, 2], 1)
        xi = np.array(xi)
        sigma = np.array([xi.sum(), xi.prod()])
        back = sigma_to_roots(sigma, prof)
        assert np.abs(np.sort(back) - np.sort(xi)).max() < 1e-8

    def test_mismatched_sigma_rejected(self):
        prof = fubini_study_profile([0, 1, 2], 1)
        with pytest.raises(ValueError):
            sigma_to_roots(np.array([100.0, 100.0]), prof)
