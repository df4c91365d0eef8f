import numpy as np
import pytest

from gclab.chart import annulus_plan
from gclab import fields
from gclab.deformations import (DeformationFrame, canonical_vector_section,
                                canonical_vectors, check_deformation_decompositions,
                                conformal_change_pair, deformation_endo,
                                elementary_deformation, sperp_projector)
from gclab.flat import flat_kahler, rotation_field, radius_squared
from gclab.gtangent import GVector, jpairing, pairing_matrix, vector_section
from gclab.linalg import membership_residual
from gclab.structures import from_symplectic
from gclab.toric import ToricGKData, build_toric_gk, builtin_potentials, \
    corollary_data, default_c_matrix


@pytest.fixture(scope="module")
def kahler_setup():
    fk = flat_kahler(2)
    x0 = rotation_field(fk["chart"], 2)
    plan = annulus_plan(fk["chart"], 2, 0.6, 1.2, 6, seed=21)
    return fk, x0, plan


class TestConformalChange:
    def test_h_one_is_identity(self, kahler_setup):
        fk, x0, plan = kahler_setup
        newpair = conformal_change_pair(fk["pair"], 1.0)
        p = plan.points[0]
        for a, b in ((fk["pair"].j1, newpair.j1), (fk["pair"].j2, newpair.j2)):
            assert np.max(np.abs(a.mat(p, 0).value - b.mat(p, 0).value)) < 1e-14

    def test_classical_metric_rescaling(self, kahler_setup):
        fk, x0, plan = kahler_setup
        h = fields.exp(0.3 * fields.coord(0))
        newpair = conformal_change_pair(fk["pair"], h)
        p = plan.points[0]
        bih = newpair.bihermitian(p, 0)
        hv = complex(h.jet(p, 0).value).real
        assert np.allclose(bih["g"].value, np.eye(4) / hv ** 2, atol=1e-12)
        assert np.allclose(bih["Jp"].value, fk["pair"].bihermitian(p, 0)["Jp"].value,
                           atol=1e-12)

    def test_symplectic_structure_rescaling(self, kahler_setup):
        fk, x0, plan = kahler_setup
        h = fields.exp(0.2 * fields.coord(1))
        newpair = conformal_change_pair(fk["pair"], h)
        p = plan.points[1]
        hv = complex(h.jet(p, 0).value).real
        M = newpair.j2.mat(p, 0).value
        W = np.zeros((4, 4))   # map matrix of omega: X -> i_X omega
        for i in range(2):
            W[2 * i, 2 * i + 1], W[2 * i + 1, 2 * i] = -1.0, 1.0
        Wp = W / hv ** 2       # map matrix of omega / h^2
        expect = np.zeros((8, 8))
        expect[:4, 4:] = -np.linalg.inv(Wp)
        expect[4:, :4] = Wp
        assert np.allclose(M, expect, atol=1e-12)


class TestDeformationFrame:
    def test_frame_validates(self, kahler_setup):
        fk, x0, plan = kahler_setup
        frame = DeformationFrame(fk["pair"], x0, fields.const(2.0))
        rep = frame.validate(plan)
        assert rep.passed, rep.to_text()

    def test_tau_is_pairing_isometry_commuting_with_j1(self, kahler_setup):
        fk, x0, plan = kahler_setup
        f = 1.0 + 0.1 * radius_squared(0)
        tau = deformation_endo(DeformationFrame(fk["pair"], x0, f))
        p = plan.points[2]
        T = tau.mat(p, 0).value
        Q = pairing_matrix(4)
        assert np.max(np.abs(T.T @ Q @ T - Q)) < 1e-12
        J1 = fk["pair"].j1.mat(p, 0).value
        assert np.max(np.abs(T @ J1 - J1 @ T)) < 1e-11


class TestElementaryDeformation:
    def test_f_one_identity(self, kahler_setup):
        fk, x0, plan = kahler_setup
        newpair = elementary_deformation(fk["pair"], x0, 1.0)
        p = plan.points[0]
        assert np.max(np.abs(newpair.j2.mat(p, 0).value
                             - fk["pair"].j2.mat(p, 0).value)) < 1e-12

    def test_j2prime_table_agreement(self, kahler_setup):
        fk, x0, plan = kahler_setup
        f = 1.0 + 0.1 * radius_squared(0)
        elementary_deformation(fk["pair"], x0, f, check_points=plan.points[:3])

    def test_classical_metric_block_rescaling(self, kahler_setup):
        fk, x0, plan = kahler_setup
        fval = 2.0
        newpair = elementary_deformation(fk["pair"], x0, fval,
                                         check_points=plan.points[:1])
        p = plan.points[0]
        bih_new = newpair.bihermitian(p, 0)
        g_new = bih_new["g"].value.real
        x0v = x0.at(p).tangent.real
        J = fk["pair"].bihermitian(p, 0)["Jp"].value.real
        jx0 = J @ x0v
        # rescaled by 1/f^2 on span{X0, JX0}
        assert x0v @ g_new @ x0v == pytest.approx((x0v @ x0v) / fval ** 2, rel=1e-10)
        assert jx0 @ g_new @ jx0 == pytest.approx((jx0 @ jx0) / fval ** 2, rel=1e-10)
        # unchanged on the g-orthogonal complement
        rng = np.random.default_rng(3)
        v = rng.standard_normal(4)
        span = np.stack([x0v, jx0], axis=1)
        v = v - span @ np.linalg.lstsq(span, v, rcond=None)[0]
        assert v @ g_new @ v == pytest.approx(v @ v, rel=1e-10)
        # J unchanged, b stays zero
        assert np.allclose(bih_new["Jp"].value, J, atol=1e-11)
        assert np.allclose(bih_new["b"].value, 0.0, atol=1e-11)

    def test_gprime_on_j2x0(self, kahler_setup):
        fk, x0, plan = kahler_setup
        f = 1.0 + 0.1 * radius_squared(1)
        newpair = elementary_deformation(fk["pair"], x0, f)
        for p in plan.points[:3]:
            fv = complex(fields.as_field(f).jet(p, 0).value).real
            x0j = x0.jets(p, 0)
            j2x0 = fk["pair"].j2.endo(x0).jets(p, 0)
            G_x0 = complex(fk["pair"].metric(x0j, x0j, p).value).real
            Gp_j2 = complex(newpair.metric(j2x0, j2x0, p).value).real
            assert Gp_j2 == pytest.approx(fv ** 2 * G_x0, rel=1e-10)


class TestCanonicalVectors:
    def test_f_one_collapse(self, kahler_setup):
        fk, x0, plan = kahler_setup
        p = plan.points[0]
        out = canonical_vectors(fk["pair"], x0, 1.0, p)
        assert np.allclose(out["v_f"].stacked, out["v_1"].stacked, atol=1e-13)
        assert np.allclose(out["v_if"].stacked, out["v_i"].stacked, atol=1e-13)

    def test_vf_in_l1(self, kahler_setup):
        fk, x0, plan = kahler_setup
        f = 1.0 + 0.2 * radius_squared(0)
        for p in plan.points[:4]:
            vf = canonical_vector_section(fk["pair"], x0, f, "v_f").at(p).stacked
            L1 = fk["pair"].j1.l_span(p)
            assert membership_residual(vf, L1) < 1e-10 * max(1.0, np.linalg.norm(vf))

    def test_vf_in_deformed_l2(self, kahler_setup):
        fk, x0, plan = kahler_setup
        f = 1.0 + 0.2 * radius_squared(0)
        newpair = elementary_deformation(fk["pair"], x0, f)
        for p in plan.points[:3]:
            vf = canonical_vector_section(fk["pair"], x0, f, "v_f").at(p).stacked
            L2p = newpair.j2.l_span(p)
            assert membership_residual(vf, L2p) < 1e-9 * max(1.0, np.linalg.norm(vf))


class TestDecompositions:
    def test_flat_kahler_f2(self, kahler_setup):
        fk, x0, plan = kahler_setup
        rep = check_deformation_decompositions(fk["pair"], x0, 2.0, plan)
        assert rep.passed, rep.to_text()

    def test_f_one_unchanged(self, kahler_setup):
        fk, x0, plan = kahler_setup
        newpair = elementary_deformation(fk["pair"], x0, 1.0)
        p = plan.points[0]
        L2 = fk["pair"].j2.l_span(p)
        L2p = newpair.j2.l_span(p)
        assert L2.shape == L2p.shape
        for k in range(L2.shape[1]):
            assert membership_residual(L2p[:, k], L2) < 1e-10

    def test_toric_cp2_with_corollary_f(self):
        pot = builtin_potentials("cp2_fubini_study")
        data = ToricGKData(pot, default_c_matrix("cp2", 2, 0.1), name="cp2")
        pair = build_toric_gk(data)
        plan = data.sample_plan(count_mu=2, n_fibers=1, seed=22)
        out = corollary_data("cor2", {"k0": -1.0, "k1": 2.0, "lambda0": 1.0},
                             data, plan=plan)
        rep = check_deformation_decompositions(pair, data.x0(), out["f"], plan)
        assert rep.passed, rep.to_text()
