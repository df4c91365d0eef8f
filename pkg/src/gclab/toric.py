"""Diagonal toric generalized Kahler structures from (tau, C).

Charts are (t1..tn, mu1..mun) with omega = sum dmu^i ^ dt^i, the torus acting
by translation in t, and K_i = -d/dt^i Hamiltonian for mu^i.  The structure is
determined by Psi = Hess(tau) + C with tau strictly convex and C constant
skew; C = 0 recovers the toric Kahler case.

Builtin potentials expose closed-form Hessian entries, which is all any
consumer needs (the Hirzebruch family is only defined through its Hessian).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chart import Chart, Point, SamplePlan, toric_chart, toric_interior_plan
from .errors import (ConstraintViolation, KahlerDegenerate, NotConvex,
                     ParameterOutOfRange, PathDisagreement, SingularPsi,
                     UnknownPotential)
from .fields import JetField, ScalarField, as_field, const, coord_named, sqrt
from . import fields
from .forms import FormField, JForm
from .gtangent import EndoField, GVector, Section, coordinate_vector, jpairing
from .jets import Jet, jet_table, jmat_inverse, jmatvec, jstack, jdet
from .report import CheckRecord, Report, ResidualTracker, Tolerances
from .structures import GenHermitianPair, from_symplectic, pair_from_bihermitian


@dataclass
class SymplecticPotential:
    """Strictly convex potential in moment coordinates, given by its Hessian.

    hess[i][j] are ScalarFields of (mu^1..mu^n) on the chart (t, mu); tau
    itself is optional (the Hirzebruch family only defines the Hessian).
    """

    n: int
    hess: list
    domain: object            # Point -> bool
    tau: ScalarField | None = None
    name: str = "potential"
    mu_box: list | None = None  # [(lo, hi)] per moment coordinate, for plans

    def hess_jet(self, point: Point, order: int) -> Jet:
        rows = [jstack([self.hess[i][j].jet(point, order) for j in range(self.n)],
                       point=point) for i in range(self.n)]
        return jstack(rows, point=point)

    def convexity_check(self, point: Point):
        H = self.hess_jet(point, 0).value.real
        eig = np.linalg.eigvalsh(0.5 * (H + H.T))
        if eig[0] <= 0:
            raise NotConvex(
                f"Hessian eigenvalue {eig[0]:.3e} <= 0 at {point} ({self.name})")
        return float(eig[0])


@dataclass
class ToricGKData:
    """(potential, C) with the derived matrix field Psi = Hess tau + C."""

    pot: SymplecticPotential
    C: np.ndarray
    name: str = "toric"

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        if C.shape != (self.pot.n, self.pot.n) or np.max(np.abs(C + C.T)) > 0:
            raise ConstraintViolation("C must be a constant skew n x n matrix")
        self.C = C
        self.chart = toric_chart(self.pot.n)
        self.n = self.pot.n

    def psi_jet(self, point: Point, order: int) -> Jet:
        H = self.pot.hess_jet(point, order)
        out = H.coeffs.copy()
        out[..., 0] = out[..., 0] + self.C
        return Jet(H.tab, out, point)

    def psi_inv_jet(self, point: Point, order: int) -> Jet:
        P = self.psi_jet(point, order)
        if abs(complex(jdet(P).value)) < 1e-12:
            raise SingularPsi(f"det Psi ~ 0 at {point}")
        return jmat_inverse(P)

    def x0(self) -> Section:
        return coordinate_vector(self.chart, 0).scale(-1.0)

    def omega(self) -> FormField:
        n = self.n
        return FormField(self.chart, 2,
                         {(n + i, i): 1.0 for i in range(n)}, name="omega")

    def hamiltonian(self) -> ScalarField:
        return coord_named("mu1")

    def sample_plan(self, count_mu=5, n_fibers=3, seed=0, shrink=0.10) -> SamplePlan:
        if self.pot.mu_box is None:
            raise ConstraintViolation(f"potential {self.pot.name} has no mu box")
        return toric_interior_plan(self.chart, self.n, self.pot.mu_box, count_mu,
                                   n_fibers=n_fibers, seed=seed, shrink=shrink,
                                   domain=self.pot.domain)


# --- structure assembly -----------------------------------------------------------

def jplus_jet(data: ToricGKData, point: Point, order: int) -> Jet:
    """J+ on TM: d/dmu^k -> Psi_{ik} d/dt^i, d/dt^k -> -(Psi^-1)_{ik} d/dmu^i."""
    n = data.n
    Psi = data.psi_jet(point, order)
    Pinv = data.psi_inv_jet(point, order)
    tab = Psi.tab
    zero = Jet.constant(tab, 0.0, point)
    rows = []
    for i in range(2 * n):
        row = []
        for j in range(2 * n):
            if i < n and j >= n:
                row.append(Psi[i, j - n])
            elif i >= n and j < n:
                row.append(-Pinv[i - n, j])
            else:
                row.append(zero)
        rows.append(jstack(row, point=point))
    return jstack(rows, point=point)


def jminus_jet(data: ToricGKData, point: Point, order: int) -> Jet:
    n = data.n
    Psi = data.psi_jet(point, order)
    Pinv = data.psi_inv_jet(point, order)
    tab = Psi.tab
    zero = Jet.constant(tab, 0.0, point)
    rows = []
    for i in range(2 * n):
        row = []
        for j in range(2 * n):
            if i < n and j >= n:
                row.append(Psi[j - n, i])
            elif i >= n and j < n:
                row.append(-Pinv[j, i - n])
            else:
                row.append(zero)
        rows.append(jstack(row, point=point))
    return jstack(rows, point=point)


def metric_jet(data: ToricGKData, point: Point, order: int) -> Jet:
    """g = -1/2 omega(J+ + J-): block diag((Psi^-1)^s on t, Psi^s on mu)."""
    n = data.n
    Psi = data.psi_jet(point, order)
    Pinv = data.psi_inv_jet(point, order)
    tab = Psi.tab
    zero = Jet.constant(tab, 0.0, point)
    rows = []
    for i in range(2 * n):
        row = []
        for j in range(2 * n):
            if i < n and j < n:
                row.append((Pinv[i, j] + Pinv[j, i]) * 0.5)
            elif i >= n and j >= n:
                row.append((Psi[i - n, j - n] + Psi[j - n, i - n]) * 0.5)
            else:
                row.append(zero)
        rows.append(jstack(row, point=point))
    return jstack(rows, point=point)


def bfield_jet(data: ToricGKData, point: Point, order: int) -> Jet:
    """b = -1/2 omega(J+ - J-): blocks (Psi^-1)^a on t and C on mu (as maps)."""
    n = data.n
    Psi = data.psi_jet(point, order)
    Pinv = data.psi_inv_jet(point, order)
    tab = Psi.tab
    zero = Jet.constant(tab, 0.0, point)
    rows = []
    for i in range(2 * n):
        row = []
        for j in range(2 * n):
            if i < n and j < n:
                row.append((Pinv[i, j] - Pinv[j, i]) * 0.5)
            elif i >= n and j >= n:
                row.append((Psi[i - n, j - n] - Psi[j - n, i - n]) * 0.5)
            else:
                row.append(zero)
        rows.append(jstack(row, point=point))
    return jstack(rows, point=point)


def build_toric_gk(data: ToricGKData, probe: Point | None = None) -> GenHermitianPair:
    """Pair (J1, J2) with J2 = J_omega; J1 assembled from (J+, J-, g, b)."""
    if probe is not None:
        data.pot.convexity_check(probe)
        data.psi_inv_jet(probe, 0)
    pair = pair_from_bihermitian(
        data.chart,
        lambda p, o: jplus_jet(data, p, o),
        lambda p, o: jminus_jet(data, p, o),
        lambda p, o: metric_jet(data, p, o),
        lambda p, o: bfield_jet(data, p, o),
        name=data.name)
    return pair


# --- closed-form toric quantities ---------------------------------------------------

def toric_frames(data: ToricGKData, point: Point, order: int = 1) -> dict:
    """(1,0)-frames v_j^+- of J+- and, in 4D, the t/mu expansion coefficients."""
    n = data.n
    Psi = data.psi_jet(point, order)
    tab = Psi.tab
    zero = Jet.constant(tab, 0.0, point)
    one = Jet.constant(tab, 1.0, point)
    vplus, vminus = [], []
    for j in range(n):
        comps_p = []
        comps_m = []
        for i in range(n):  # t components
            comps_p.append(-1j * Psi[i, j])
            comps_m.append(-1j * Psi[j, i])
        for i in range(n):  # mu components
            comps_p.append(one if i == j else zero)
            comps_m.append(one if i == j else zero)
        vplus.append(jstack(comps_p, point=point))
        vminus.append(jstack(comps_m, point=point))
    out = {"vplus": vplus, "vminus": vminus}
    if n == 2 and abs(data.C[0, 1]) > 0:
        C12 = data.C[0, 1]
        out["dt1_coeffs"] = {"vplus2": 0.5j / C12, "vminus2": -0.5j / C12}
    return out


def toric_j3_quantities(data: ToricGKData, point: Point,
                        pair: GenHermitianPair | None = None,
                        check_tol: float = 1e-8) -> dict:
    """pr_T(J3 X0), pr_T*(J3 X0), G(X0,X0) by the Psi^-1 closed forms.

    Cross-checked against the generic endomorphism path when a pair is given;
    raises PathDisagreement if they differ beyond check_tol.
    """
    n = data.n
    Pinv = data.psi_inv_jet(point, 0).value
    S = 0.5 * (Pinv + Pinv.T)
    A = 0.5 * (Pinv - Pinv.T)
    Sinv = np.linalg.inv(S)
    M1 = A @ Sinv
    prT = np.zeros(2 * n, dtype=complex)
    prT[:n] = M1[0, :n]                      # coefficients of d/dt^r
    M2 = S - A @ Sinv @ A
    prTs = np.zeros(2 * n, dtype=complex)
    prTs[:n] = M2[:n, 0]                     # dt^r components
    G00 = 0.5 * (Pinv - A @ Sinv @ A)[0, 0]
    out = {"prT": prT, "prTstar": prTs, "G00": complex(G00)}
    if pair is not None:
        x0 = data.x0()
        j3v = pair.j3.endo(x0).at(point)
        r1 = float(np.max(np.abs(j3v.tangent - prT[:2 * n])))
        r2 = float(np.max(np.abs(j3v.cotangent - prTs[:2 * n])))
        x0j = x0.jets(point, 0)
        G_gen = complex(pair.metric(x0j, x0j, point, 0).value)
        r3 = abs(G_gen - G00)
        if max(r1, r2, r3) > check_tol:
            raise PathDisagreement(
                f"closed-form vs generic J3X0 mismatch: {r1:.2e}, {r2:.2e}, {r3:.2e}")
        out["residuals"] = (r1, r2, r3)
    return out


def dim4_epsilon1(data: ToricGKData, point: Point,
                  pair: GenHermitianPair | None = None,
                  check_tol: float = 1e-8) -> FormField:
    """Closed-form eps1 of the 4D structure (C12 != 0 required)."""
    if data.n != 2:
        raise ParameterOutOfRange("dim4 closed form needs n = 2")
    C12 = data.C[0, 1]
    if C12 == 0.0:
        raise KahlerDegenerate("C12 = 0: E1 is a proper subbundle, formula invalid")
    T1, T2, M1, M2 = 0, 1, 2, 3
    hess = data.pot.hess
    Psi = lambda i, j: as_field(hess[i][j]) + data.C[i, j]
    det_psi = Psi(0, 0) * Psi(1, 1) - Psi(0, 1) * Psi(1, 0)
    comps = {
        (T1, T2): const(1.0 / C12),
        (M1, M2): -1.0 / C12 * det_psi,
        (T1, M1): 1j * (1.0 + Psi(1, 0) / C12),
        (T1, M2): 1j * Psi(1, 1) / C12,
        (T2, M1): -1j * Psi(0, 0) / C12,
        (T2, M2): 1j * (1.0 - Psi(0, 1) / C12),
    }
    eps1 = FormField(data.chart, 2, comps, name="eps1_closed")
    if pair is not None:
        from .structures import one_zero_bundle
        ozb = one_zero_bundle(pair.j1, point)
        if ozb.type_ != 0:
            raise PathDisagreement("projector path says type != 0")
        J = eps1.at(point, 0)
        worst = 0.0
        for a in range(4):
            for b in range(a + 1, 4):
                ea, eb = np.eye(4)[a], np.eye(4)[b]
                lhs = complex(J.get((a, b)).value)
                rhs = ozb.eps_of(ea, eb)
                worst = max(worst, abs(lhs - rhs))
        if worst > check_tol:
            raise PathDisagreement(
                f"closed-form eps1 vs projector extraction differ by {worst:.2e}")
    return eps1


def dim4_curvature(data: ToricGKData, lam: ScalarField, h: ScalarField,
                   a: ScalarField) -> FormField:
    """F = (2ah'/h) dmu1^dt1 + ((Psi12^s/Psi22)(lam - 2ah'/h) dmu1 + lam dmu2)^dt2.

    h and a must be functions of mu1 alone with a = k0 h^-2; lam independent
    of t1.  dF = 0 then reduces to the second compatibility relation.
    """
    T1, T2, M1, M2 = 0, 1, 2, 3
    lam = as_field(lam)
    h = as_field(h)
    a = as_field(a)
    hp = h.deriv(M1)
    w = 2.0 * a * hp / h
    hess = data.pot.hess
    ratio = as_field(hess[0][1]) / as_field(hess[1][1])
    comps = {
        (M1, T1): w,
        (M1, T2): ratio * (lam - w),
        (M2, T2): lam,
    }
    return FormField(data.chart, 2, comps, name="F_dim4")


def ratio_derivative(data: ToricGKData, point: Point) -> float:
    """d/dmu2 of (Psi12^s / Psi22); needs third derivatives of tau."""
    M2 = data.n + 1
    hess = data.pot.hess
    ratio = as_field(hess[0][1]) / as_field(hess[1][1])
    return float(ratio.deriv(M2).jet(point, 0).value.real)


def ratio_derivative_field(data: ToricGKData) -> ScalarField:
    M2 = data.n + 1
    hess = data.pot.hess
    return (as_field(hess[0][1]) / as_field(hess[1][1])).deriv(M2)


def check_dim4_conditions(data: ToricGKData, lam, f, h, a,
                          plan: SamplePlan, tol: Tolerances | None = None) -> Report:
    """Residuals of the two 4D compatibility relations.

    First:  d/dmu2 (Psi12^s/Psi22) = -(lam + 2ah'f^2/h) / ((f^2-1) a)
    Second: (Psi12^s/Psi22) dlam/dmu2 - dlam/dmu1
            = (lam + 2ah'f^2/h)(lam - 2ah'/h) / ((f^2-1) a).
    """
    tol = tol or Tolerances()
    lam, f, h, a = (as_field(x) for x in (lam, f, h, a))
    T1, M1, M2 = 0, data.n, data.n + 1
    rep = Report(title=f"4D relations [{data.name}]")
    hess = data.pot.hess
    ratio = as_field(hess[0][1]) / as_field(hess[1][1])
    D = ratio.deriv(M2)
    hp = h.deriv(M1)
    w = 2.0 * a * hp / h
    f2 = f * f
    t1, t2, t_t1 = ResidualTracker(), ResidualTracker(), ResidualTracker()
    for p in plan:
        denom = (f2 - 1.0) * a
        lhs1 = complex(D.jet(p, 0).value)
        rhs1 = complex((-(lam + w * f2) / denom).jet(p, 0).value)
        t1.update(abs(lhs1 - rhs1), p, scale=max(1.0, abs(rhs1)))
        lhs2 = complex((ratio * lam.deriv(M2) - lam.deriv(M1)).jet(p, 0).value)
        rhs2 = complex(((lam + w * f2) * (lam - w) / denom).jet(p, 0).value)
        t2.update(abs(lhs2 - rhs2), p, scale=max(1.0, abs(rhs2)))
        t_t1.update(abs(complex(lam.deriv(T1).jet(p, 0).value)), p)
    rep.add(t1.rec("dim4.k12a", "Eq (k12) first", tol))
    rep.add(t2.rec("dim4.k12b", "Eq (k12) second", tol))
    rep.add(t_t1.rec("dim4.lam_inv", "lam independent of t1", tol))
    return rep


# --- corollary data builders -----------------------------------------------------

def corollary_data(mode: str, params: dict, data: ToricGKData,
                   plan: SamplePlan | None = None):
    """Ready-made (f, h, a, F) for the two constant-lambda branches.

    mode "cor1": needs d/dmu2(Psi12^s/Psi22) = 0; f^2 = -lam0 h^3/(2 k0 h'),
    a = k0 h^-2, with h supplied in params["h"].
    mode "cor2": needs the ratio derivative to depend on mu1 only;
    a = k0 k1 - lam0 mu1, h^2 = -k0/(lam0 mu1 - k0 k1), f^2 from the ratio.
    Raises ConstraintViolation naming the failed inequality and sample.
    """
    k0 = float(params["k0"])
    lam0 = float(params.get("lambda0", 1.0))
    if k0 == 0.0 or lam0 == 0.0:
        raise ConstraintViolation("k0 and lambda0 must be nonzero")
    M1f = coord_named("mu1")
    D = ratio_derivative_field(data)
    if mode == "cor1":
        h = as_field(params["h"])
        hp = h.deriv(data.n)
        a = k0 / (h * h)
        f2 = -lam0 * h * h * h / (2.0 * k0 * hp)
        lam = const(lam0)
        if plan is not None:
            for p in plan:
                dv = complex(D.jet(p, 0).value)
                if abs(dv) > 1e-8:
                    raise ConstraintViolation(
                        f"cor1 needs d/dmu2(Psi12s/Psi22) = 0; got {dv:.2e} at {p}")
                ratio_val = complex((lam0 * h ** 3 / (k0 * hp)).jet(p, 0).value).real
                if ratio_val >= 0 or abs(ratio_val + 1.0) < 1e-9:
                    raise ConstraintViolation(
                        f"cor1 needs lam0 h^3/(k0 h') negative and != -1; got "
                        f"{ratio_val:.4g} at {p}")
    elif mode == "cor2":
        k1 = float(params["k1"])
        a = const(k0 * k1) - lam0 * M1f
        h2 = const(-k0) / (lam0 * M1f - k0 * k1)
        h = sqrt(h2)
        shifted = M1f - (k0 * k1 / lam0)
        f2 = (shifted * D + 1.0) / (shifted * D - 1.0)
        lam = const(lam0)
        if plan is not None:
            mu1_groups = {}
            for p in plan:
                dv = complex(D.jet(p, 0).value).real
                mu1_groups.setdefault(round(float(p.coords[data.n]), 9), []).append(dv)
                for name, fld in (("a nonzero", a), ("h^2 positive", h2),
                                  ("f^2 positive", f2)):
                    v = complex(fld.jet(p, 0).value).real
                    if name == "a nonzero":
                        if abs(v) < 1e-9:
                            raise ConstraintViolation(f"{name} fails at {p}: {v:.3g}")
                    elif v <= 0:
                        raise ConstraintViolation(f"{name} fails at {p}: {v:.3g}")
            for mu1v, vals in mu1_groups.items():
                if max(vals) - min(vals) > 1e-8 * max(1.0, abs(vals[0])):
                    raise ConstraintViolation(
                        "cor2 needs the ratio derivative to depend only on mu1; "
                        f"it varies by {max(vals) - min(vals):.2e} on mu1={mu1v}")
    else:
        raise ConstraintViolation(f"unknown corollary mode {mode!r}")
    f = sqrt(f2)
    F = dim4_curvature(data, lam, h, a)
    return {"f": f, "h": h, "a": a, "F": F, "lam": lam, "f2": f2}


# --- builtin potentials --------------------------------------------------------------

def builtin_potentials(name: str, **params) -> SymplecticPotential:
    """Builtin symplectic potentials (closed-form Hessians plus domains)."""
    if name == "cn_flat":
        n = int(params.get("n", 2))
        if n < 1:
            raise ParameterOutOfRange("cn_flat needs n >= 1")
        mu = [coord_named(f"mu{i + 1}") for i in range(n)]
        tau = None
        for m in mu:
            term = m * fields.log(m)
            tau = term if tau is None else tau + term
        hess = [[const(0.0) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            hess[i][i] = 1.0 / mu[i]
        return SymplecticPotential(
            n, hess, lambda p: bool(np.all(p.coords[n:] > 0)), tau=tau,
            name="cn_flat", mu_box=[(0.2, 1.8)] * n)

    if name == "cp2_fubini_study":
        n = 2
        third = 1.0 / 3.0
        mu1, mu2 = coord_named("mu1"), coord_named("mu2")
        u0 = third - mu1 - mu2
        tau = ((mu1 + third) * fields.log(mu1 + third)
               + (mu2 + third) * fields.log(mu2 + third)
               + u0 * fields.log(u0))
        inv0 = 1.0 / u0
        hess = [[1.0 / (mu1 + third) + inv0, inv0],
                [inv0, 1.0 / (mu2 + third) + inv0]]

        def dom(p):
            m1, m2 = p.coords[2], p.coords[3]
            return m1 + third > 0 and m2 + third > 0 and m1 + m2 < third

        return SymplecticPotential(n, hess, dom, tau=tau, name="cp2_fubini_study",
                                   mu_box=[(-third, third)] * 2)

    if name == "hirzebruch":
        n = 2
        k = int(params.get("k", 1))
        if k < 1:
            raise ParameterOutOfRange("hirzebruch needs integer k >= 1")
        a_m = float(params.get("a", 1.0))
        b_m = float(params.get("b", 2.0))
        if not (b_m > a_m > 0):
            raise ParameterOutOfRange("hirzebruch needs b > a > 0")
        theta = params.get("theta")
        mu1, mu2 = coord_named("mu1"), coord_named("mu2")
        if theta is None:
            theta = 2.0 * (mu1 - a_m) * (b_m - mu1) / (b_m - a_m)
        theta = as_field(theta)
        profile = MomentumProfile(a_m, b_m, theta, k)
        profile.check_boundary()
        denom = k * mu1 - mu2
        hess = [[1.0 / theta + k * mu2 / (2.0 * mu1 * denom),
                 -0.5 * k / denom],
                [-0.5 * k / denom,
                 0.5 * k * mu1 / (mu2 * denom)]]

        def dom(p):
            m1, m2 = p.coords[2], p.coords[3]
            return m2 > 0 and k * m1 - m2 > 0 and a_m < m1 < b_m

        pot = SymplecticPotential(n, hess, dom, tau=None, name="hirzebruch",
                                  mu_box=[(a_m, b_m), (0.0, k * a_m)])
        pot.profile = profile
        return pot

    if name == "exponential":
        n = 2
        c = float(params.get("c", 0.0))
        kpar = float(params.get("k", 1.0))
        if kpar <= 0:
            raise ParameterOutOfRange("exponential needs k > 0")
        mu1, mu2 = coord_named("mu1"), coord_named("mu2")
        e1 = fields.exp(mu1)
        e2 = fields.exp(mu2 + c)
        tau = e1 * (e2 + kpar)
        hess = [[e1 * (e2 + kpar), e1 * e2], [e1 * e2, e1 * e2]]
        return SymplecticPotential(n, hess, lambda p: True, tau=tau,
                                   name="exponential", mu_box=[(-0.5, 0.5)] * 2)

    if name == "sixdim_simplex":
        n = 3
        c = float(params.get("c", 1.0))
        if c <= 0:
            raise ParameterOutOfRange("sixdim_simplex needs c > 0")
        mu = [coord_named(f"mu{i + 1}") for i in range(3)]
        u0 = c - mu[1] - mu[2]
        tau = (sum(((m + c) * fields.log(m + c) for m in mu), const(0.0))
               + u0 * fields.log(u0))
        inv0 = 1.0 / u0
        hess = [[1.0 / (mu[0] + c), const(0.0), const(0.0)],
                [const(0.0), 1.0 / (mu[1] + c) + inv0, inv0],
                [const(0.0), inv0, 1.0 / (mu[2] + c) + inv0]]

        def dom(p):
            m = p.coords[3:]
            return (np.all(m + c > 0) and m[1] + m[2] < c)

        return SymplecticPotential(n, hess, dom, tau=tau, name="sixdim_simplex",
                                   mu_box=[(-0.6 * c, 0.9 * c),
                                           (-0.6 * c, 0.9 * c),
                                           (-0.6 * c, 0.9 * c)])

    raise UnknownPotential(f"unknown builtin potential {name!r}")


def default_c_matrix(name: str, n: int, c12: float = 0.1) -> np.ndarray:
    C = np.zeros((n, n))
    if name == "sixdim_simplex":
        C[1, 2], C[2, 1] = c12, -c12
    elif n >= 2:
        C[0, 1], C[1, 0] = c12, -c12
    return C


@dataclass
class MomentumProfile:
    """Single-variable profile of an admissible Hirzebruch metric."""

    a: float
    b: float
    theta: ScalarField
    k: int = 1

    def check_boundary(self, tol: float = 1e-9):
        ch = toric_chart(2)

        def val(x, order=0, want_deriv=False):
            p = ch.point([0.0, 0.0, x, 0.5 * self.k * x])
            j = self.theta.jet(p, 1)
            return float(j.deriv(2).value.real) if want_deriv else float(j.value.real)

        checks = [(val(self.a), 0.0, "Theta(a) = 0"),
                  (val(self.b), 0.0, "Theta(b) = 0"),
                  (val(self.a, want_deriv=True), 2.0, "Theta'(a) = 2"),
                  (val(self.b, want_deriv=True), -2.0, "Theta'(b) = -2")]
        for got, want, label in checks:
            if abs(got - want) > tol:
                raise ParameterOutOfRange(
                    f"momentum profile violates {label}: got {got:.6g}")
        mid = val(0.5 * (self.a + self.b))
        if mid <= 0:
            raise ParameterOutOfRange("momentum profile not positive inside (a,b)")
