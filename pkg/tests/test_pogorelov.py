import math

import numpy as np
import pytest

from prl import lorentz as lz
from prl import pogorelov as pg
from prl.errors import DomainViolation, OutOfDomain
from prl.verify import random_domain_pairs, random_ds_domain_pairs

SQ2 = math.sqrt(2.0)


class TestPhi:
    def test_diagonal_example(self):
        x = np.array([1, SQ2, 0, 0])
        xi, eta = pg.phi(x, x)
        np.testing.assert_allclose(xi, [SQ2, 0, 0])
        np.testing.assert_allclose(eta, [SQ2, 0, 0])

    def test_substitution_examples(self):
        xi, eta = pg.phi([1, SQ2, 0, 0], [1, 0, SQ2, 0])
        np.testing.assert_allclose(xi, [SQ2, 0, 0])
        np.testing.assert_allclose(eta, [0, SQ2, 0])
        xi, eta = pg.phi([2, -math.sqrt(5), 0, 0], [1, SQ2, 0, 0])
        np.testing.assert_allclose(xi, [-2 * math.sqrt(5) / 3, 0, 0])
        np.testing.assert_allclose(eta, [2 * SQ2 / 3, 0, 0])

    def test_length_identity(self):
        # |xi - xi'|^2 - |eta - eta'|^2 = -8 (<x,x'> - <y,y'>) / ((x0 + y0)(x0' + y0'))
        rng = np.random.default_rng(11)
        for _ in range(100):
            x, y, xp, yp = lz.random_de_sitter(rng, 4)
            xi, eta = pg.phi(x, y)
            xip, etap = pg.phi(xp, yp)
            lhs = np.sum((xi - xip) ** 2) - np.sum((eta - etap) ** 2)
            rhs = -8 * (lz.minkowski_inner(x, xp) - lz.minkowski_inner(y, yp)) / ((x[0] + y[0]) * (xp[0] + yp[0]))
            assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(lhs)))


class TestDomain:
    def test_examples(self):
        assert pg.in_phi_image([SQ2, 0, 0], [0, SQ2, 0])
        assert not pg.in_phi_image([3, 0, 0], [1.1, 0, 0])
        assert not pg.in_phi_image([0.5, 0, 0], [2, 0, 0])

    def test_g_positive_on_image(self):
        rng = np.random.default_rng(5)
        for xi, eta in random_domain_pairs(rng, 300):
            assert pg.g_function(np.linalg.norm(xi), np.linalg.norm(eta)) > 0


class TestInverse:
    def test_example(self):
        x, y = pg.phi_inverse([SQ2, 0, 0], [0, SQ2, 0])
        np.testing.assert_allclose(x, [1, SQ2, 0, 0], atol=1e-15)
        np.testing.assert_allclose(y, [1, 0, SQ2, 0], atol=1e-15)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            pg.phi_inverse([3, 0, 0], [1.1, 0, 0])

    def test_diagonal(self):
        rng = np.random.default_rng(7)
        for x in lz.random_de_sitter(rng, 100):
            p = lz.klein_project(x)
            a, b = pg.phi_inverse(p, p)
            np.testing.assert_allclose(a, x, atol=1e-12)
            np.testing.assert_allclose(b, x, atol=1e-12)

    def test_printed_prenormalization_is_timelike(self):
        # the uncorrected first coordinate with spatial part xi lands inside the light cone
        xi = eta = np.array([SQ2, 0, 0])
        v = np.concatenate(([4 - eta @ eta + xi @ xi], xi))
        assert lz.minkowski_norm2(v) == pytest.approx(-14)

    def test_round_trips(self):
        rng = np.random.default_rng(0)
        for x, y in random_ds_domain_pairs(rng, 200):
            a, b = pg.phi_inverse(*pg.phi(x, y))
            assert np.max(np.abs(a - x)) <= 1e-12 and np.max(np.abs(b - y)) <= 1e-12
        for xi, eta in random_domain_pairs(rng, 200):
            x, y = pg.phi_inverse(xi, eta)
            assert lz.is_de_sitter(x) and lz.is_de_sitter(y)
            a, b = pg.phi(x, y)
            assert np.max(np.abs(a - xi)) <= 1e-12 and np.max(np.abs(b - eta)) <= 1e-12


class TestTransport:
    def test_identity_isometry(self):
        rep = pg.verify_isometry_transport(np.eye(4), seed=0)
        assert rep.passed and rep.max_residual <= 1e-12
        np.testing.assert_allclose(rep.details["beta_linear"], np.eye(3), atol=1e-12)

    def test_rotation_gives_same_rotation(self):
        alpha = lz.rotation([0, 0, 1], 0.3)
        rep = pg.verify_isometry_transport(alpha, seed=1)
        assert rep.passed
        np.testing.assert_allclose(rep.details["beta_linear"], alpha[1:, 1:], atol=1e-8)

    def test_boost(self):
        rep = pg.verify_isometry_transport(lz.boost([1, 0, 0], 0.2), seed=2)
        assert rep.passed and rep.max_residual <= pg.ISOMETRY_FIT_TOL
        assert rep.n_samples >= 4

    @staticmethod
    def _image_lengths(seg1, seg2):
        (x, y), (xp, yp) = seg1, seg2
        xi, eta = pg.phi(x, xp)
        xi2, eta2 = pg.phi(y, yp)
        return np.linalg.norm(xi - xi2), np.linalg.norm(eta - eta2)

    def test_timelike_rotation_example(self):
        x, y = lz.hyperboloid_lift([2, 0, 0]), lz.hyperboloid_lift([-2, 0, 0])
        rot = lz.rotation([0, 0, 1], math.pi / 2)
        assert lz.ds_separation(rot @ x, rot @ y).value == pytest.approx(math.log(3), abs=1e-12)
        l1, l2 = self._image_lengths((x, y), (rot @ x, rot @ y))
        assert abs(l1 - l2) <= 1e-10

    def test_timelike_identical_pair(self):
        x, y = lz.hyperboloid_lift([2, 0, 0]), lz.hyperboloid_lift([-2, 0, 0])
        l1, l2 = self._image_lengths((x, y), (x, y))
        assert l1 == l2

    def test_timelike_explicit_base(self):
        seg = (lz.hyperboloid_lift([2, 0, 0]), lz.hyperboloid_lift([-2, 0, 0]))
        rep = pg.verify_timelike_length_transport(segments=[seg], seed=5, n_pairs=50)
        assert rep.passed

    def test_timelike_rejects_spacelike_base(self):
        seg = (lz.hyperboloid_lift([2, 0, 0]), lz.hyperboloid_lift([0, 2, 0]))
        with pytest.raises(ValueError):
            pg.verify_timelike_length_transport(segments=[seg])

    def test_timelike_random(self):
        rep = pg.verify_timelike_length_transport(seed=3, n_pairs=200)
        assert rep.passed and rep.n_samples == 200

    def test_spacelike_speed(self):
        rep = pg.verify_spacelike_speed_transport(seed=4, samples=100)
        assert rep.passed and rep.n_samples == 100
        rel = pg.verify_spacelike_speed_transport(seed=4, samples=20, related=True)
        assert rel.passed

    def test_diagonal_geodesic_is_affine(self):
        rng = np.random.default_rng(9)
        g = pg.random_spacelike_geodesic(rng, 0.3)
        col, speed = pg.speed_transport_residuals(g, g)
        assert col <= 1e-10 and speed == 0

    def test_constant_curves_coincide(self):
        x, y = lz.hyperboloid_lift([2, 0.5, 0]), lz.hyperboloid_lift([1.5, 1, 0.3])
        col, speed = pg.speed_transport_residuals(lambda s: x, lambda s: y)
        assert col == 0 and speed == 0

    def test_domain_violation(self):
        far = lz.hyperboloid_lift([40, 0, 0])
        near = lz.hyperboloid_lift([1.02, 0, 0])
        with pytest.raises(DomainViolation):
            pg.speed_transport_residuals(lambda s: far, lambda s: near)

    def test_related_geodesics_straight_but_not_affine(self):
        rng = np.random.default_rng(2)
        g1 = pg.random_spacelike_geodesic(rng, 0.6)
        m = lz.boost([0, 1, 0], 0.25)
        col, speed = pg.speed_transport_residuals(g1, lambda s: m @ g1(s))
        assert col <= 1e-10 and speed <= 1e-10
        xi = np.array([pg.phi(g1(s), m @ g1(s))[0] for s in pg.SPEED_SAMPLE_TIMES])
        gaps = np.linalg.norm(np.diff(xi, axis=0), axis=1)
        # both components share the same gaps, but the gaps are not constant
        assert np.ptp(gaps) > 1e-3
