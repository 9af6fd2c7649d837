import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prl import flexahedron as fx
from prl.errors import DegenerateFace


@pytest.fixture(scope="module")
def q():
    return fx.build_schonhardt(1.55, 0.5)


class TestAdmissibility:
    def test_default_parameters(self):
        adm = fx.admissibility_check(1.55, 0.5)
        assert adm.passed
        m = adm.margins
        assert 1 + m["ineq1"] == pytest.approx(1.0508, abs=1e-4)
        assert 1 - m["ineq2"] == pytest.approx(0.4502, abs=1e-4)
        assert 1 - m["ineq3"] == pytest.approx(0.8008, abs=1e-4)

    def test_boundary(self):
        adm = fx.admissibility_check(math.sqrt(3), 1.0)
        assert not adm.ineq3
        assert not adm.passed

    @pytest.mark.parametrize("a, ok", [(1.4, False), (1.55, True), (1.7, True)])
    def test_a_grid(self, a, ok):
        adm = fx.admissibility_check(a, 0.5)
        assert adm.passed is ok
        if not ok:
            assert not adm.ineq1
            assert 1 + adm.margins["ineq1"] == pytest.approx(0.903, abs=1e-3)

    def test_edge_check_against_closed_form(self, q):
        # minimum of |P + s (Q - P)|^2 over s in [0, 1], per edge
        for i, j in fx.EDGES:
            p, d = q.vertices[i], q.vertices[j] - q.vertices[i]
            s = np.clip(-(p @ d) / (d @ d), 0, 1)
            assert np.sum((p + s * d) ** 2) < 1

    def test_inequalities_are_sufficient(self):
        for a in np.linspace(1.0, 2.0, 41):
            for h in np.linspace(0.05, 1.2, 47):
                adm = fx.admissibility_check(a, h)
                if adm.inequalities:
                    assert adm.ball_conditions, (a, h)

    def test_inequalities_are_not_necessary(self):
        # slant edges pass closer to the axis than a/sqrt(3) suggests
        adm = fx.admissibility_check(1.75, 0.3)
        assert adm.ball_conditions
        assert not adm.ineq3


class TestConstruction:
    def test_edge_lengths_equal_a(self, q):
        lengths = fx.edge_lengths(q)
        for name in ("AB", "BC", "CA", "A0B0", "B0C0", "C0A0"):
            assert lengths[name] == pytest.approx(1.55, abs=1e-14)

    def test_flex_at_zero(self, q):
        np.testing.assert_array_equal(fx.flexed(q, 0.0).vertices, q.vertices)

    def test_directions_are_face_normals(self, q):
        eta = fx.flex_directions(q)
        np.testing.assert_allclose(np.linalg.norm(eta, axis=1), 1, atol=1e-12)
        v = q.vertices
        for k, top in enumerate((3, 4, 5)):
            face = fx.FLEX_FACES[top]
            for other in face:
                if other != top:
                    assert abs(eta[k] @ (v[top] - v[other])) <= 1e-12
            centroid_face = v[list(face)].mean(axis=0)
            assert eta[k] @ (v.mean(axis=0) - centroid_face) < 0

    def test_degenerate_face(self):
        flat = fx.LabeledPolyhedron(np.zeros((6, 3)))
        with pytest.raises(DegenerateFace):
            fx.flex_directions(flat)

    def test_three_fold_symmetry(self, q):
        qt = fx.flexed(q, 0.01)
        rot = fx.rotation_about_axis(2 * np.pi / 3)
        np.testing.assert_allclose(qt.vertices @ rot.T, qt.vertices[[1, 2, 0, 4, 5, 3]], atol=1e-12)


class TestFlex:
    def test_residual(self, q):
        assert fx.first_order_flex_residual(q) <= 1e-10

    def test_bottom_and_slant_contributions(self, q):
        v, vel = q.vertices, fx.flex_velocities(q)
        for i, j in fx.EDGES:
            term = abs((v[i] - v[j]) @ (vel[i] - vel[j]))
            if i < 3 and j < 3:
                assert term == 0
            else:
                assert term <= 1e-12

    def test_nullspace(self, q):
        m = fx.rigidity_matrix(q)
        assert m.shape == (12, 9)
        dim, mismatch = fx.nullspace_agreement(q)
        assert dim >= 1
        assert mismatch <= 1e-8

    def test_flex_is_not_trivial(self, q):
        # an infinitesimal rigid motion would also move the pinned bottom
        assert np.linalg.matrix_rank(fx.rigidity_matrix(q), tol=1e-10) == 8


class TestEvenness:
    def test_edges_equal_diagonals_differ(self, q):
        qp, qm = fx.flexed(q, 0.01), fx.flexed(q, -0.01)
        lp, lm = fx.edge_lengths(qp), fx.edge_lengths(qm)
        assert max(abs(lp[k] - lm[k]) for k in lp) <= 1e-12
        dp, dm = fx.diagonal_lengths(qp), fx.diagonal_lengths(qm)
        assert min(abs(dp[k] - dm[k]) for k in dp) >= 1e-4

    def test_diagonal_linear_in_t(self):
        from prl.verify import diagonal_discrepancy

        r = diagonal_discrepancy(t=0.01) / diagonal_discrepancy(t=0.005)
        assert r == pytest.approx(2, rel=0.01)
        assert diagonal_discrepancy(t=0.0) == 0

    def test_congruence(self, q):
        assert fx.congruence_test(q, q)
        rot = fx.rotation_about_axis(0.7)
        moved = q.with_vertices(q.vertices @ rot.T + np.array([1.0, -2.0, 0.5]))
        assert fx.congruence_test(q, moved)

    def test_flexed_pair_not_congruent(self, q):
        t = 0.01
        qp, qm = fx.flexed(q, t), fx.flexed(q, -t)
        res = fx.congruence_test(qp, qm)
        assert not res
        assert res.witness in {("A", "A0"), ("B", "B0"), ("C", "C0")}
        eta = fx.flex_directions(q)[0]
        d2 = lambda p: np.sum((p["A"] - p["A0"]) ** 2)  # noqa: E731
        expected = abs(4 * t * ((q["A"] - q["A0"]) @ eta))
        assert abs(d2(qp) - d2(qm)) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.45, 1.7), st.floats(0.3, 0.6), st.floats(-0.05, 0.05))
def test_evenness_property(a, h, t):
    q = fx.build_schonhardt(a, h)
    lp, lm = fx.edge_lengths(fx.flexed(q, t)), fx.edge_lengths(fx.flexed(q, -t))
    assert max(abs(lp[k] - lm[k]) for k in lp) <= 1e-12
