import numpy as np
import pytest

from gclab.chart import toric_chart
from gclab import fields
from gclab.errors import (ConstraintViolation, KahlerDegenerate, NotConvex,
                          ParameterOutOfRange, UnknownPotential)
from gclab.flat import constant_refs
from gclab.structures import check_generalized_kahler, one_zero_bundle
from gclab.report import Tolerances
from gclab.toric import (ToricGKData, build_toric_gk, builtin_potentials,
                         check_dim4_conditions, corollary_data, default_c_matrix,
                         dim4_curvature, dim4_epsilon1, ratio_derivative,
                         toric_frames, toric_j3_quantities)


def cp2_data(c12=0.1):
    pot = builtin_potentials("cp2_fubini_study")
    return ToricGKData(pot, default_c_matrix("cp2_fubini_study", 2, c12), name="cp2")


def hirzebruch_data(c12=0.1, k=1):
    pot = builtin_potentials("hirzebruch", k=k, a=1.0, b=2.0)
    return ToricGKData(pot, default_c_matrix("hirzebruch", 2, c12), name="hz")


class TestPotentials:
    def test_cp2_domain(self):
        pot = builtin_potentials("cp2_fubini_study")
        ch = toric_chart(2)
        assert pot.domain(ch.point([0, 0, 0.0, 0.0]))
        assert not pot.domain(ch.point([0, 0, 0.3, 0.2]))
        assert not pot.domain(ch.point([0, 0, -0.4, 0.0]))

    def test_cn_flat_hessian_matches_tau(self):
        pot = builtin_potentials("cn_flat", n=2)
        ch = toric_chart(2)
        p = ch.point([0.1, 0.2, 0.7, 1.3])
        for i in range(2):
            for j in range(2):
                direct = pot.hess[i][j].jet(p, 0).value
                via_tau = pot.tau.deriv(2 + i).deriv(2 + j).jet(p, 0).value
                assert direct == pytest.approx(via_tau, abs=1e-12)

    def test_cp2_hessian_matches_tau(self):
        pot = builtin_potentials("cp2_fubini_study")
        ch = toric_chart(2)
        p = ch.point([0.3, -0.1, 0.05, -0.1])
        for i in range(2):
            for j in range(2):
                direct = pot.hess[i][j].jet(p, 0).value
                via_tau = pot.tau.deriv(2 + i).deriv(2 + j).jet(p, 0).value
                assert direct == pytest.approx(via_tau, rel=1e-12)

    def test_hirzebruch_quadratic_profile_accepted(self):
        pot = builtin_potentials("hirzebruch", k=1, a=1.0, b=2.0)
        assert pot.profile.a == 1.0

    def test_bad_profile_rejected(self):
        mu1 = fields.coord_named("mu1")
        bad = (mu1 - 1.0) * (2.0 - mu1)  # Theta'(a) = 1, not 2
        with pytest.raises(ParameterOutOfRange):
            builtin_potentials("hirzebruch", k=1, a=1.0, b=2.0, theta=bad)

    def test_unknown_name(self):
        with pytest.raises(UnknownPotential):
            builtin_potentials("nope")

    def test_convexity_guard(self):
        pot = builtin_potentials("cn_flat", n=2)
        ch = toric_chart(2)
        with pytest.raises(Exception):
            pot.convexity_check(ch.point([0, 0, -0.5, 1.0]))


class TestBuildToricGK:
    def test_c_zero_is_kahler(self):
        pot = builtin_potentials("cn_flat", n=2)
        data = ToricGKData(pot, np.zeros((2, 2)))
        pair = build_toric_gk(data)
        p = data.chart.point([0.1, 0.5, 0.8, 1.2])
        bih = pair.bihermitian(p, 0)
        assert np.max(np.abs(bih["b"].value)) < 1e-12
        assert np.max(np.abs(bih["Jp"].value - bih["Jm"].value)) < 1e-12

    def test_j2_is_symplectic_structure(self):
        data = cp2_data()
        pair = build_toric_gk(data)
        from gclab.structures import from_symplectic
        SW = from_symplectic(data.chart, data.omega())
        p = data.chart.point([0.4, 1.1, 0.05, -0.04])
        assert np.max(np.abs(pair.j2.mat(p, 0).value - SW.mat(p, 0).value)) < 1e-12

    def test_jplus_squares_minus_id(self):
        data = cp2_data()
        p = data.chart.point([0.0, 0.0, 0.02, 0.03])
        from gclab.toric import jplus_jet
        J = jplus_jet(data, p, 0).value
        assert np.max(np.abs(J @ J + np.eye(4))) < 1e-12

    def test_pair_invariants(self):
        data = cp2_data()
        pair = build_toric_gk(data, probe=data.chart.point([0, 0, 0.02, 0.03]))
        plan = data.sample_plan(count_mu=3, n_fibers=1, seed=3)
        rep = pair.validate(plan)
        assert rep.passed, rep.to_text()

    def test_cp2_generalized_kahler(self):
        data = cp2_data()
        pair = build_toric_gk(data)
        plan = data.sample_plan(count_mu=2, n_fibers=1, seed=4)
        rep = check_generalized_kahler(pair, plan, constant_refs(data.chart))
        assert rep.passed, rep.to_text()

    def test_perturbed_psi_fails_gk(self):
        # mu-dependent skew part violates the constancy required for integrability
        pot = builtin_potentials("cn_flat", n=2)
        data = ToricGKData(pot, np.zeros((2, 2)), name="broken")
        mu1 = fields.coord_named("mu1")
        base = data.pot.hess
        data.pot.hess = [[base[0][0], 0.3 * mu1], [-0.3 * mu1, base[1][1]]]
        pair = build_toric_gk(data)
        plan = data.sample_plan(count_mu=2, n_fibers=1, seed=5)
        from gclab.errors import VerdictDisagreement
        try:
            rep = check_generalized_kahler(pair, plan, constant_refs(data.chart))
            assert not rep.passed
        except VerdictDisagreement:
            pytest.fail("both criteria should fail together")


class TestToricFrames:
    def test_vplus_is_jplus_eigenvector(self):
        data = cp2_data()
        p = data.chart.point([0.2, 0.4, 0.03, -0.02])
        from gclab.toric import jplus_jet
        J = jplus_jet(data, p, 0).value
        fr = toric_frames(data, p)
        for v in fr["vplus"]:
            vec = v.value
            assert np.max(np.abs(J @ vec - 1j * vec)) < 1e-10

    def test_c_zero_vplus_equals_vminus(self):
        pot = builtin_potentials("cn_flat", n=2)
        data = ToricGKData(pot, np.zeros((2, 2)))
        p = data.chart.point([0.0, 0.0, 0.9, 1.4])
        fr = toric_frames(data, p)
        for vp, vm in zip(fr["vplus"], fr["vminus"]):
            assert np.max(np.abs(vp.value - vm.value)) < 1e-14

    def test_dim4_dt1_expansion(self):
        data = cp2_data()
        p = data.chart.point([0.1, 0.3, 0.04, -0.06])
        fr = toric_frames(data, p)
        C12 = data.C[0, 1]
        lhs = (fr["vplus"][1].value - fr["vminus"][1].value) * (0.5j / C12)
        dt1 = np.zeros(4); dt1[0] = 1.0
        assert np.max(np.abs(lhs - dt1)) < 1e-12


class TestJ3Quantities:
    def test_two_path_agreement_cp2(self):
        data = cp2_data()
        pair = build_toric_gk(data)
        for pt in ([0.0, 0.0, 0.02, 0.03], [0.4, 1.0, -0.05, 0.08]):
            p = data.chart.point(pt)
            out = toric_j3_quantities(data, p, pair=pair)
            assert max(out["residuals"]) < 1e-8

    def test_dim4_closed_forms(self):
        data = cp2_data()
        p = data.chart.point([0.0, 0.0, 0.02, 0.03])
        out = toric_j3_quantities(data, p)
        Pv = data.psi_jet(p, 0).value.real
        det = np.linalg.det(Pv)
        C12 = data.C[0, 1]
        psis12 = 0.5 * (Pv[0, 1] + Pv[1, 0])
        coef = -C12 / (det - C12 ** 2)
        assert out["prT"][0] == pytest.approx(coef * psis12, rel=1e-10)
        assert out["prT"][1] == pytest.approx(coef * Pv[1, 1], rel=1e-10)
        assert out["G00"].real == pytest.approx(Pv[1, 1] / (2 * (det - C12 ** 2)),
                                                rel=1e-10)
        # pr_T* closed form: (Psi22 dt1 - Psi12^s dt2)/(det - C12^2)
        assert out["prTstar"][0] == pytest.approx(Pv[1, 1] / (det - C12 ** 2), rel=1e-10)
        assert out["prTstar"][1] == pytest.approx(-psis12 / (det - C12 ** 2), rel=1e-10)

    def test_c12_zero_gives_kahler(self):
        pot = builtin_potentials("cn_flat", n=2)
        data = ToricGKData(pot, np.zeros((2, 2)))
        p = data.chart.point([0.0, 0.0, 0.8, 0.6])
        out = toric_j3_quantities(data, p)
        assert np.max(np.abs(out["prT"])) < 1e-13

    def test_c12_sweep_iff(self):
        for c12 in (0.05, 0.2, 0.4):
            data = cp2_data(c12)
            p = data.chart.point([0.0, 0.0, 0.02, 0.03])
            out = toric_j3_quantities(data, p)
            assert np.max(np.abs(out["prT"])) > 1e-4


class TestDim4Epsilon1:
    def test_matches_projector_path(self):
        data = cp2_data()
        pair = build_toric_gk(data)
        rng = np.random.default_rng(6)
        for _ in range(5):
            mu = rng.uniform(-0.05, 0.08, 2)
            t = rng.uniform(0, 6.28, 2)
            p = data.chart.point([t[0], t[1], mu[0], mu[1]])
            dim4_epsilon1(data, p, pair=pair)  # raises PathDisagreement on mismatch

    def test_interior_products(self):
        data = cp2_data()
        p = data.chart.point([0.3, 0.9, 0.03, -0.02])
        eps1 = dim4_epsilon1(data, p)
        J = eps1.at(p, 1)
        fr = toric_frames(data, p)
        Pv = data.psi_jet(p, 0).value
        # i_{v_j^+} eps1 = Psi_kj dmu^k - i dt^j
        for j in range(2):
            got = J.interior(fr["vplus"][j])
            expect = np.zeros(4, complex)
            expect[0] = -1j if j == 0 else 0.0
            expect[1] = -1j if j == 1 else 0.0
            expect[2] = Pv[0, j]
            expect[3] = Pv[1, j]
            for i in range(4):
                assert complex(got.get((i,)).value) == pytest.approx(
                    complex(expect[i]), abs=1e-11)
        # i_X0 eps1 = -(1/C12)(i (Psi_k2)^s dmu^k + dt^2)
        x0j = data.x0().jets(p, 1)
        got = J.interior(x0j)
        C12 = data.C[0, 1]
        s12 = 0.5 * (Pv[0, 1] + Pv[1, 0])
        expect = np.array([0, -1.0 / C12, -1j * s12 / C12, -1j * Pv[1, 1] / C12])
        for i in range(4):
            assert complex(got.get((i,)).value) == pytest.approx(
                complex(expect[i]), abs=1e-11)

    def test_c12_zero_rejected(self):
        pot = builtin_potentials("cn_flat", n=2)
        data = ToricGKData(pot, np.zeros((2, 2)))
        with pytest.raises(KahlerDegenerate):
            dim4_epsilon1(data, data.chart.point([0, 0, 1.0, 1.0]))


class TestRatioDerivative:
    def test_cp2_closed_form(self):
        data = cp2_data()
        for mu1 in (0.0, 0.05, -0.08):
            p = data.chart.point([0.0, 0.0, mu1, 0.01])
            assert ratio_derivative(data, p) == pytest.approx(
                1.0 / (2.0 / 3.0 - mu1), rel=1e-9)
        p0 = data.chart.point([0.0, 0.0, 0.0, 0.01])
        assert ratio_derivative(data, p0) == pytest.approx(1.5, rel=1e-12)

    def test_hirzebruch_closed_form(self):
        data = hirzebruch_data(k=1)
        for mu1 in (1.2, 1.5, 1.9):
            p = data.chart.point([0.0, 0.0, mu1, 0.4])
            assert ratio_derivative(data, p) == pytest.approx(-1.0 / mu1, rel=1e-9)
        # value at mu1 = 2 from the closed form -1/mu1 (outside (a,b) but smooth)
        data2 = hirzebruch_data(k=1)
        p = data2.chart.point([0.0, 0.0, 1.99999, 0.4])
        assert ratio_derivative(data2, p) == pytest.approx(-0.5, rel=1e-3)

    def test_exponential_identically_zero(self):
        pot = builtin_potentials("exponential", c=0.3, k=2.0)
        data = ToricGKData(pot, default_c_matrix("exponential", 2, 0.1))
        rng = np.random.default_rng(7)
        for _ in range(10):
            p = data.chart.point([0, 0, *rng.uniform(-0.5, 0.5, 2)])
            assert abs(ratio_derivative(data, p)) < 1e-12


class TestCorollaryData:
    def test_cor2_cp2_closed_forms(self):
        data = cp2_data()
        k0, k1 = -1.0, 2.0
        plan = data.sample_plan(count_mu=3, n_fibers=1, seed=8)
        out = corollary_data("cor2", {"k0": k0, "k1": k1, "lambda0": 1.0},
                             data, plan=plan)
        for p in plan:
            mu1 = p.coords[2]
            h2 = -k0 / (mu1 - k0 * k1)
            f2 = (2.0 / 3.0 - k0 * k1) / (2 * mu1 - (2.0 / 3.0 + k0 * k1))
            assert complex(out["h"].jet(p, 0).value) ** 2 == pytest.approx(h2, rel=1e-10)
            assert complex(out["f2"].jet(p, 0).value) == pytest.approx(f2, rel=1e-10)
            assert complex(out["a"].jet(p, 0).value) == pytest.approx(
                k0 * k1 - mu1, rel=1e-12)

    def test_cor2_cp2_point_value(self):
        data = cp2_data()
        out = corollary_data("cor2", {"k0": -1.0, "k1": 2.0, "lambda0": 1.0}, data)
        p = data.chart.point([0.0, 0.0, 0.0, 0.02])
        assert complex(out["f2"].jet(p, 0).value) == pytest.approx(2.0, rel=1e-12)

    def test_cor2_hirzebruch_closed_forms(self):
        data = hirzebruch_data(k=1)
        k0, k1 = 1.0, 5.0   # k0 k1 = 5 > 2b = 4
        plan = data.sample_plan(count_mu=3, n_fibers=1, seed=9)
        out = corollary_data("cor2", {"k0": k0, "k1": k1, "lambda0": 1.0},
                             data, plan=plan)
        for p in plan:
            mu1 = p.coords[2]
            f2 = -k0 * k1 / (2 * mu1 - k0 * k1)
            h2 = -k0 / (mu1 - k0 * k1)
            assert complex(out["f2"].jet(p, 0).value) == pytest.approx(f2, rel=1e-10)
            assert complex(out["h"].jet(p, 0).value) ** 2 == pytest.approx(h2, rel=1e-10)

    def test_cor1_exponential(self):
        pot = builtin_potentials("exponential", c=0.0, k=1.0)
        data = ToricGKData(pot, default_c_matrix("exponential", 2, 0.1))
        h = fields.exp(fields.coord_named("mu1") + 1.0)  # keeps lam0 h^3/(k0 h') < -1
        plan = data.sample_plan(count_mu=3, n_fibers=1, seed=10)
        out = corollary_data("cor1", {"k0": 1.0, "lambda0": -1.0, "h": h},
                             data, plan=plan)
        p = data.chart.point([0, 0, 0.2, -0.1])
        # f^2 = -lam0 h^3 / (2 k0 h') = h^2 / 2
        assert complex(out["f2"].jet(p, 0).value) == pytest.approx(
            np.exp(2 * 1.2) / 2.0, rel=1e-10)

    def test_cor1_rejects_nonzero_ratio_derivative(self):
        data = cp2_data()
        h = fields.exp(fields.coord_named("mu1"))
        plan = data.sample_plan(count_mu=2, n_fibers=1, seed=11)
        with pytest.raises(ConstraintViolation):
            corollary_data("cor1", {"k0": 1.0, "lambda0": -1.0, "h": h},
                           data, plan=plan)

    def test_cor2_positivity_guard(self):
        data = cp2_data()
        plan = data.sample_plan(count_mu=2, n_fibers=1, seed=12)
        # k0 k1 = 0.5 makes f^2 < 0 on the CP2 interior
        with pytest.raises(ConstraintViolation):
            corollary_data("cor2", {"k0": 1.0, "k1": 0.5, "lambda0": 1.0},
                           data, plan=plan)


class TestDim4Conditions:
    def test_cp2_relations_pass(self):
        data = cp2_data()
        plan = data.sample_plan(count_mu=3, n_fibers=1, seed=13)
        out = corollary_data("cor2", {"k0": -1.0, "k1": 2.0, "lambda0": 1.0},
                             data, plan=plan)
        rep = check_dim4_conditions(data, out["lam"], out["f"], out["h"],
                                    out["a"], plan)
        assert rep.passed, rep.to_text()

    def test_hz_relations_pass(self):
        data = hirzebruch_data(k=1)
        plan = data.sample_plan(count_mu=3, n_fibers=1, seed=14)
        out = corollary_data("cor2", {"k0": 1.0, "k1": 5.0, "lambda0": 1.0},
                             data, plan=plan)
        rep = check_dim4_conditions(data, out["lam"], out["f"], out["h"],
                                    out["a"], plan)
        assert rep.passed, rep.to_text()

    def test_perturbed_lambda_fails(self):
        data = cp2_data()
        plan = data.sample_plan(count_mu=3, n_fibers=1, seed=15)
        out = corollary_data("cor2", {"k0": -1.0, "k1": 2.0, "lambda0": 1.0},
                             data, plan=plan)
        bad_lam = out["lam"] + 0.5 * fields.coord_named("mu1")
        rep = check_dim4_conditions(data, bad_lam, out["f"], out["h"],
                                    out["a"], plan)
        assert not rep.passed
        failing = {r.check_id for r in rep.failing()}
        assert failing & {"dim4.k12a", "dim4.k12b"}

    def test_curvature_closed_for_cor2(self):
        data = cp2_data()
        plan = data.sample_plan(count_mu=2, n_fibers=1, seed=16)
        out = corollary_data("cor2", {"k0": -1.0, "k1": 2.0, "lambda0": 1.0},
                             data, plan=plan)
        for p in plan:
            dF = out["F"].at(p, 1).ext_d()
            assert dF.max_abs_value() < 1e-10
