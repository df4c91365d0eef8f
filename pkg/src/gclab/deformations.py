"""Conformal change and elementary deformation of generalized Hermitian pairs.

The elementary deformation rescales the canonical 4-frame span
S = span{X0, J1 X0, J2 X0, J3 X0} by f (tangent-like directions) and 1/f (the
other two), acting as the identity on the pairing-orthogonal complement.  The
deformed second structure is computed by conjugation and cross-checked against
the explicit rescaling table on S.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import Point, SamplePlan
from .errors import DegenerateFrame, PathDisagreement
from .fields import ScalarField, as_field
from .gtangent import (EndoField, GVector, Section, conformal_endo, jpairing,
                       pairing_matrix)
from .jets import Jet, jet_table, jmat_inverse, jmatmul, jmatvec, jstack
from .linalg import (membership_residual, subspace_dim, subspace_intersection)
from .report import CheckRecord, Report, ResidualTracker, Tolerances
from .structures import GenComplexStructure, GenHermitianPair, one_zero_bundle


@dataclass
class DeformationFrame:
    """The pair, the Killing candidate X0 and the scaling function f."""

    pair: GenHermitianPair
    x0: Section
    f: ScalarField

    def __post_init__(self):
        self.f = as_field(self.f)

    def s_basis(self, point: Point, order: int) -> Jet:
        """(2d, 4) jet matrix of [X0, J1 X0, J2 X0, J3 X0] columns."""
        x0j = self.x0.jets(point, order)
        cols = [x0j,
                jmatvec(self.pair.j1.mat(point, order), x0j),
                jmatvec(self.pair.j2.mat(point, order), x0j),
                jmatvec(self.pair.j3.mat(point, order), x0j)]
        rows = []
        n = x0j.shape[0]
        for i in range(n):
            rows.append(jstack([c[i] for c in cols], point=point))
        return jstack(rows, point=point)

    def gram(self, point: Point, order: int) -> Jet:
        """4x4 pairing Gram matrix of the S basis (must be invertible)."""
        B = self.s_basis(point, order)
        d = B.shape[0] // 2
        cols = [B[:, k] for k in range(4)]
        rows = []
        for i in range(4):
            rows.append(jstack([jpairing(cols[i], cols[j]) for j in range(4)],
                               point=point))
        return jstack(rows, point=point)

    def validate(self, plan: SamplePlan, tol: Tolerances | None = None) -> Report:
        tol = tol or Tolerances()
        rep = Report(title="deformation frame")
        t_rank = ResidualTracker()
        t_perp = ResidualTracker()
        for p in plan:
            B = self.s_basis(p, 0).value
            s = np.linalg.svd(B, compute_uv=False)
            if s[-1] < 1e-8:
                raise DegenerateFrame(f"S has rank < 4 at {p} (sv {s[-1]:.2e})")
            G = self.gram(p, 0).value
            cond = np.linalg.svd(G, compute_uv=False)
            t_rank.update(0.0 if cond[-1] > 1e-10 else 1.0, p)
            # <,>-orthogonal and G-orthogonal complements coincide
            Q = pairing_matrix(B.shape[0] // 2)
            Gend = self.pair.gend_mat(p, 0).value
            QG = Q @ Gend
            perp_pair = _nullspace(B.T @ Q)
            worst = 0.0
            for k in range(perp_pair.shape[1]):
                worst = max(worst, float(np.max(np.abs(B.T @ QG @ perp_pair[:, k]))))
            t_perp.update(worst, p)
        rep.add(t_rank.rec("frame.rank", "S rank 4, pairing nondegenerate", tol))
        rep.add(t_perp.rec("frame.perp", "G-perp of S = <,>-perp of S", tol))
        return rep


def _nullspace(M, rtol=1e-10):
    U, s, Vh = np.linalg.svd(M)
    rank = int(np.sum(s > rtol * s[0])) if s.size else 0
    return Vh.conj().T[:, rank:]


def deformation_endo(frame: DeformationFrame) -> EndoField:
    """tau = Id on S-perp, diag(f, f, 1/f, 1/f) on the S basis."""
    return _deformation_endo(frame, invert=False)


def _deformation_endo(frame: DeformationFrame, invert: bool) -> EndoField:
    def fn(point, order):
        B = frame.s_basis(point, order)
        n = B.shape[0]
        G = frame.gram(point, order)
        Ginv = jmat_inverse(G)
        fj = frame.f.jet(point, order)
        finv = fj.reciprocal()
        diag = [finv, finv, fj, fj] if invert else [fj, fj, finv, finv]
        # tau = Id + B (D - I) G^{-1} B^T Q
        Q = pairing_matrix(n // 2)
        tab = B.tab
        BtQ_rows = []
        Bc = B.coeffs
        QB = np.einsum("ij,jkt->ikt", Q.astype(complex), Bc)  # (2d,4,T)
        QBj = Jet(tab, np.swapaxes(QB, 0, 1), point)          # (4,2d)
        D_minus = []
        one = Jet.constant(tab, 1.0, point)
        for k in range(4):
            D_minus.append(diag[k] - one)
        # columns B_k scaled by (diag_k - 1):
        scaled_cols = []
        for k in range(4):
            scaled_cols.append(B[:, k] * D_minus[k])
        SC = jstack([jstack([scaled_cols[k][i] for k in range(4)], point=point)
                     for i in range(n)], point=point)            # (2d,4)
        M = jmatmul(SC, jmatmul(Ginv, QBj))                      # (2d,2d)
        ident = np.zeros_like(M.coeffs)
        ident[np.arange(n), np.arange(n), 0] = 1.0
        return Jet(M.tab, M.coeffs + ident, point)

    return EndoField(fn, name="tau_f_S")


def conformal_change_pair(pair: GenHermitianPair, h: ScalarField,
                          name=None) -> GenHermitianPair:
    """tau_h-conjugated pair; classical data transforms as (g/h^2, J)."""
    h = as_field(h)

    def conj(S: GenComplexStructure, nm):
        def fn(point, order):
            tau = conformal_endo(point.chart, h).mat(point, order)
            tinv = _conformal_inverse(point.chart, h, point, order)
            return jmatmul(tau, jmatmul(S.mat(point, order), tinv))
        return GenComplexStructure(EndoField(fn, name=nm), name=nm)

    J1h = conj(pair.j1, f"{pair.j1.name}^h")
    J2h = conj(pair.j2, f"{pair.j2.name}^h")
    return GenHermitianPair(J1h, J2h, name=name or f"tau_h({pair.name})")


def _conformal_inverse(chart, h, point, order):
    hj = as_field(h).jet(point, order)
    d = chart.dim
    tab = hj.tab
    zero = Jet.constant(tab, 0.0, point)
    hinv = hj.reciprocal()
    rows = []
    for i in range(2 * d):
        row = [zero] * (2 * d)
        row[i] = hinv if i < d else hj
        rows.append(jstack(row, point=point))
    return jstack(rows, point=point)


def elementary_deformation(pair: GenHermitianPair, x0: Section, f,
                           check_points=(), check_tol: float = 1e-10,
                           name=None) -> GenHermitianPair:
    """Elementary deformation (G', J1) of the pair by X0 and f.

    J1 is unchanged; J2' = tau o J2 o tau^{-1}.  At each check point the
    conjugated J2' is compared against the explicit S-table
        X0 -> (1/f^2) J2 X0,  J1 X0 -> (1/f^2) J3 X0,
        J2 X0 -> -f^2 X0,     J3 X0 -> -f^2 J1 X0,
    raising PathDisagreement on mismatch.
    """
    frame = DeformationFrame(pair, x0, f)
    tau = _deformation_endo(frame, invert=False)
    tau_inv = _deformation_endo(frame, invert=True)

    def fn(point, order):
        return jmatmul(tau.mat(point, order),
                       jmatmul(pair.j2.mat(point, order), tau_inv.mat(point, order)))

    J2p = GenComplexStructure(EndoField(fn, name="J2'"), name="J2'")
    newpair = GenHermitianPair(pair.j1, J2p, name=name or f"elem({pair.name})")
    for p in check_points:
        r = _j2prime_table_residual(pair, newpair, frame, p)
        if r > check_tol:
            raise PathDisagreement(
                f"J2' conjugation vs rescaling table: residual {r:.2e} at {p}")
    return newpair


def _j2prime_table_residual(pair: GenHermitianPair, newpair: GenHermitianPair,
                            frame: DeformationFrame, point: Point) -> float:
    B = frame.s_basis(point, 0).value
    f2 = complex(frame.f.jet(point, 0).value) ** 2
    J2p = newpair.j2.mat(point, 0).value
    cols = [B[:, k] for k in range(4)]
    expect = [cols[2] / f2, cols[3] / f2, -f2 * cols[0], -f2 * cols[1]]
    worst = 0.0
    for k in range(4):
        got = J2p @ cols[k]
        worst = max(worst, float(np.max(np.abs(got - expect[k]))))
    return worst


# --- canonical vectors ------------------------------------------------------------

def canonical_vector_section(pair: GenHermitianPair, x0: Section, f,
                             which: str) -> Section:
    """v_f, v_if (and their f = 1 versions v_1, v_i) as sections.

    v_f  = X0 - i J1 X0 - (1/f^2)(J3 X0 + i J2 X0)
    v_if = X0 - i J1 X0 + (1/f^2)(J3 X0 + i J2 X0)
    """
    f = as_field(f)
    sign = {"v_f": -1.0, "v_if": +1.0, "v_1": -1.0, "v_i": +1.0}[which]
    unit = which in ("v_1", "v_i")

    def fn(point, order):
        x0j = x0.jets(point, order)
        j1x = jmatvec(pair.j1.mat(point, order), x0j)
        j2x = jmatvec(pair.j2.mat(point, order), x0j)
        j3x = jmatvec(pair.j3.mat(point, order), x0j)
        if unit:
            coef = Jet.constant(x0j.tab, 1.0, point)
        else:
            coef = (f.jet(point, order) * f.jet(point, order)).reciprocal()
        return x0j - j1x * 1j + (j3x + j2x * 1j) * coef * sign

    return Section(fn, name=which)


def canonical_vectors(pair: GenHermitianPair, x0: Section, f,
                      point: Point) -> dict:
    out = {}
    for which in ("v_f", "v_if", "v_1", "v_i"):
        out[which] = canonical_vector_section(pair, x0, f, which).at(point)
    return out


# --- decomposition checks ----------------------------------------------------------

def sperp_projector(frame: DeformationFrame) -> EndoField:
    """Pairing-orthogonal projector onto S-perp (commutes with J1, J2)."""
    def fn(point, order):
        B = frame.s_basis(point, order)
        n = B.shape[0]
        G = frame.gram(point, order)
        Ginv = jmat_inverse(G)
        Q = pairing_matrix(n // 2)
        QB = np.einsum("ij,jkt->ikt", Q.astype(complex), B.coeffs)
        QBj = Jet(B.tab, np.swapaxes(QB, 0, 1), point)   # (4, 2d)
        PS = jmatmul(B, jmatmul(Ginv, QBj))
        ident = np.zeros_like(PS.coeffs)
        ident[np.arange(n), np.arange(n), 0] = 1.0
        return Jet(PS.tab, ident - PS.coeffs, point)

    return EndoField(fn, name="P_Sperp")


def check_deformation_decompositions(pair: GenHermitianPair, x0: Section, f,
                                     plan: SamplePlan,
                                     tol: Tolerances | None = None) -> Report:
    """Rank and directness bookkeeping for the deformed intersections.

    Checks, per sample: L1 & L2' = span{v_f} + (L1 & L2 & S-perp) with the
    right dimension, membership of v_f and v_if, the pr_T decompositions being
    direct, rank preservation under the deformation, and the f = 1 case.
    """
    tol = tol or Tolerances()
    frame = DeformationFrame(pair, x0, f)
    newpair = elementary_deformation(pair, x0, f)
    rep = Report(title="elementary deformation decompositions")
    t_dim = ResidualTracker()
    t_vf = ResidualTracker()
    t_vif = ResidualTracker()
    t_direct = ResidualTracker()
    t_rank = ResidualTracker()
    t_eps = ResidualTracker()
    for p in plan:
        d = p.chart.dim
        L1 = pair.j1.l_span(p)
        L2 = pair.j2.l_span(p)
        L2p = newpair.j2.l_span(p)
        PS = sperp_projector(frame).mat(p, 0).value
        Sperp = _colspan(PS)
        i12 = subspace_intersection(L1, L2)
        i12p = subspace_intersection(L1, L2p)
        i12_perp = subspace_intersection(i12, Sperp)
        vf = canonical_vector_section(pair, x0, f, "v_f").at(p).stacked
        vif = canonical_vector_section(pair, x0, f, "v_if").at(p).stacked
        # dимension bookkeeping
        t_dim.update(abs(i12p.shape[1] - (1 + i12_perp.shape[1])), p)
        t_vf.update(membership_residual(vf, L1) / max(1.0, np.linalg.norm(vf)), p)
        t_vf.update(membership_residual(vf, L2p) / max(1.0, np.linalg.norm(vf)), p)
        i12b = subspace_intersection(L1, np.conj(L2))
        i12bp = subspace_intersection(L1, np.conj(L2p))
        t_vif.update(membership_residual(vif, i12bp) / max(1.0, np.linalg.norm(vif)), p)
        # span{v_f} + (L1 & L2 & S-perp) = L1 & L2' and directness
        stacked = np.hstack([vf.reshape(-1, 1), i12_perp])
        t_direct.update(abs(subspace_dim(stacked) - (1 + i12_perp.shape[1])), p)
        for k in range(stacked.shape[1]):
            t_dim.update(membership_residual(stacked[:, k], i12p)
                         / max(1.0, np.linalg.norm(stacked[:, k])), p)
        # pr_T decomposition direct
        prT = np.vstack([stacked[:d, :]])
        t_direct.update(abs(subspace_dim(prT) - stacked.shape[1]), p)
        # rank preservation
        t_rank.update(abs(i12p.shape[1] - i12.shape[1]), p)
        t_rank.update(abs(i12bp.shape[1] - i12b.shape[1]), p)
        t_rank.update(abs(subspace_dim(i12p[:d, :]) - subspace_dim(i12[:d, :])), p)
        # eps2' gluing: eps2'(pr_T v_f, X) = 2 <v_f, X> for X in E2'
        ozb = one_zero_bundle(newpair.j2, p)
        from .gtangent import pairing as gpair
        for k in range(ozb.E.shape[1]):
            X = ozb.E[:, k]
            lhs = ozb.eps_of(vf[:d], X)
            xg = GVector(X, np.zeros_like(X))
            rhs = 2.0 * gpair(GVector(vf[:d], vf[d:]), xg)
            t_eps.update(abs(lhs - rhs), p, scale=max(1.0, abs(rhs)))
    rep.add(t_dim.rec("elem.dims", "dim(L1&L2') = 1 + dim(L1&L2&Sperp)", tol))
    rep.add(t_vf.rec("elem.vf", "v_f in L1 & L2'", tol))
    rep.add(t_vif.rec("elem.vif", "v_if in L1 & conj(L2')", tol))
    rep.add(t_direct.rec("elem.direct", "decompositions direct", tol))
    rep.add(t_rank.rec("elem.rank", "deformation preserves ranks", tol))
    rep.add(t_eps.rec("elem.eps2p", "eps2'(prT v_f, .) = 2<v_f, .>", tol))
    return rep


def _colspan(P, rtol=1e-9):
    from .linalg import orth_basis
    return orth_basis(P)
