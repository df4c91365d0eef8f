"""Generalized (almost) complex and Hermitian structures.

A structure is an endomorphism field of TM + T*M; everything derived from it
(eigenbundles, bi-Hermitian data, frames) is computed from its jet matrices,
so derivatives stay exact through conjugations and deformations.

Frames for eigenbundles are built by pushing reference sections through the
smooth eigenprojector field and selecting a well-conditioned subset per
sample; each selected candidate is a genuine smooth section, so brackets of
frame members are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import Point, SamplePlan
from .courant import jcourant, jfa_bracket, jlie_bracket, jsection_lie
from .errors import (DegenerateForm, IndefiniteMetric, NonCommuting,
                     NotAlmostComplex, RankDeficiency, TypeJump,
                     VerdictDisagreement)
from .forms import FormField, JForm
from .gtangent import (EndoField, GVector, Section, endo_constant,
                       identity_endo, jpairing, pairing_matrix)
from .jets import Jet, jet_table, jmat_inverse, jmatmul, jmatvec, jstack
from .linalg import (membership_residual, orth_basis, rank_by_svd,
                     select_pivot_columns, subspace_dim, subspace_intersection)
from .report import CheckRecord, Report, ResidualTracker, Tolerances


class GenComplexStructure:
    """Field of endomorphisms J of TM + T*M with J^2 = -Id, pairing-skew."""

    def __init__(self, endo: EndoField, name="J"):
        self.endo = endo
        self.name = name
        self._proj = None
        self._proj_bar = None

    def mat(self, point: Point, order: int) -> Jet:
        return self.endo.mat(point, order)

    # --- invariants ---------------------------------------------------------
    def invariant_residuals(self, point: Point):
        M = self.mat(point, 0).value
        d2 = M.shape[0]
        r_sq = float(np.max(np.abs(M @ M + np.eye(d2))))
        Q = pairing_matrix(d2 // 2)
        r_skew = float(np.max(np.abs(M.T @ Q + Q @ M)))
        return r_sq, r_skew

    def validate(self, plan: SamplePlan, tol: Tolerances | None = None) -> Report:
        tol = tol or Tolerances(1e-10, 0.0)
        rep = Report(title=f"structure invariants [{self.name}]")
        t_sq, t_sk = ResidualTracker(), ResidualTracker()
        for p in plan:
            r1, r2 = self.invariant_residuals(p)
            t_sq.update(r1, p)
            t_sk.update(r2, p)
        rep.add(t_sq.rec(f"{self.name}.square", "J^2 = -Id", tol))
        rep.add(t_sk.rec(f"{self.name}.skew", "<Ju,v> + <u,Jv> = 0", tol))
        return rep

    # --- eigenprojectors -----------------------------------------------------
    def projector(self, conjugate=False) -> EndoField:
        """Smooth projector field onto the (1,0)- (or (0,1)-) bundle."""
        if conjugate:
            if self._proj_bar is None:
                self._proj_bar = (_half_id(self.endo) + self.endo.scale(0.5j))
            return self._proj_bar
        if self._proj is None:
            self._proj = (_half_id(self.endo) - self.endo.scale(0.5j))
        return self._proj

    def l_span(self, point: Point) -> np.ndarray:
        """Columns spanning the (1,0)-bundle at a point."""
        d2 = self.mat(point, 0).value.shape[0]
        P = 0.5 * (np.eye(d2) - 1j * self.mat(point, 0).value)
        cols = orth_basis(P)
        if cols.shape[1] != d2 // 2:
            raise RankDeficiency(
                f"(1,0)-projector rank {cols.shape[1]} != {d2 // 2} at {point}")
        return cols


def _half_id(endo: EndoField) -> EndoField:
    def fn(p, o):
        m = endo.mat(p, o)
        n = m.shape[0]
        out = np.zeros_like(m.coeffs)
        out[np.arange(n), np.arange(n), 0] = 0.5
        return Jet(m.tab, out, m.point)
    return EndoField(fn, name="Id/2")


@dataclass
class OneZeroBundle:
    """Pointwise (1,0)-bundle data: L = L(E, eps) plus the structure type."""

    point: Point
    L: np.ndarray          # (2d, d) orthonormal columns spanning L
    E: np.ndarray          # (d, r) orthonormal columns spanning pr_T(L)
    eps: np.ndarray        # (r, r) complex, eps on the E basis
    type_: int
    isotropy_residual: float
    split_residual: float

    def membership(self, vec) -> float:
        """Residual of a stacked vector (or GVector) against L."""
        v = vec.stacked if isinstance(vec, GVector) else np.asarray(vec)
        return membership_residual(v, self.L)

    def eps_of(self, x, y) -> complex:
        """Evaluate eps on tangent vectors through the E basis."""
        cx, rx = np.linalg.lstsq(self.E, x, rcond=None)[:2]
        cy, ry = np.linalg.lstsq(self.E, y, rcond=None)[:2]
        return complex(cx @ self.eps @ cy)


def one_zero_bundle(S: GenComplexStructure, point: Point) -> OneZeroBundle:
    L = S.l_span(point)
    d = L.shape[0] // 2
    E = orth_basis(L[:d, :])
    r = E.shape[1]
    # representative xi for each E basis vector: solve pr_T(L c) = e
    eps = np.zeros((r, r), dtype=complex)
    xis = []
    for a in range(r):
        c, *_ = np.linalg.lstsq(L[:d, :], E[:, a], rcond=None)
        xis.append(L[d:, :] @ c)
    for a in range(r):
        for b in range(r):
            eps[a, b] = xis[a] @ E[:, b]
    Q = pairing_matrix(d)
    iso = float(np.max(np.abs(L.T @ Q @ L)))
    split = 2 * d - subspace_dim(np.hstack([L, np.conj(L)]))
    return OneZeroBundle(point, L, E, eps, d - r, iso, float(split))


def from_complex(chart, J, probe: Point | None = None,
                 name="J_complex") -> GenComplexStructure:
    """Block structure (J, 0; 0, -J^T) from an almost complex J on TM.

    J may be a constant matrix or a matrix of ScalarFields.
    """
    d = chart.dim
    if isinstance(J, np.ndarray):
        M = np.zeros((2 * d, 2 * d), dtype=complex)
        M[:d, :d] = J
        M[d:, d:] = -J.T
        endo = endo_constant(chart, M, name=name)
        if probe is not None and np.max(np.abs(J @ J + np.eye(d))) > 1e-10:
            raise NotAlmostComplex("J^2 != -Id on TM")
        return GenComplexStructure(endo, name=name)

    from .gtangent import endo_from_blocks
    Jt = [[-J[j][i] for j in range(d)] for i in range(d)]  # -J^T entries
    endo = endo_from_blocks(chart, tt=J, tstar_tstar=Jt, name=name)
    S = GenComplexStructure(endo, name=name)
    if probe is not None:
        r, _ = S.invariant_residuals(probe)
        if r > 1e-10:
            raise NotAlmostComplex(f"J^2 != -Id on TM (residual {r:.2e})")
    return S


def from_symplectic(chart, omega: FormField, probe: Point | None = None,
                    name="J_omega") -> GenComplexStructure:
    """Block structure (0, -W^{-1}; W, 0), W the map X -> i_X omega."""
    d = chart.dim

    def fn(point, order):
        Wm = omega.component_matrix(point, order)  # comp[j,k] = omega(e_j,e_k)
        W = _transpose(Wm)                         # map matrix: (WX)_k = omega_{jk} X^j
        try:
            Winv = jmat_inverse(W)
        except Exception as exc:
            raise DegenerateForm(f"symplectic form singular at {point}") from exc
        tab = W.tab
        zero = Jet.constant(tab, 0.0, point)
        rows = []
        for i in range(2 * d):
            row = []
            for j in range(2 * d):
                if i < d and j >= d:
                    row.append(-Winv[i, j - d])
                elif i >= d and j < d:
                    row.append(W[i - d, j])
                else:
                    row.append(zero)
            rows.append(jstack(row, point=point))
        return jstack(rows, point=point)

    S = GenComplexStructure(EndoField(fn, name=name), name=name)
    if probe is not None:
        S.l_span(probe)
    return S


def _transpose(M: Jet) -> Jet:
    return Jet(M.tab, np.swapaxes(M.coeffs, 0, 1), M.point)


def b_transform_structure(S: GenComplexStructure, B, chart=None,
                          name=None) -> GenComplexStructure:
    """exp(B) . J = exp(B) o J o exp(-B); B a FormField or component matrix."""
    from .gtangent import b_field_endo
    if isinstance(B, EndoField):
        eB = B
    else:
        eB = b_field_endo(getattr(B, "chart", chart), B)
    endo = eB.compose(S.endo).compose(_b_inverse(eB))
    return GenComplexStructure(endo, name=name or f"expB.{S.name}")


def _b_inverse(eB: EndoField) -> EndoField:
    def fn(p, o):
        M = eB.mat(p, o)
        n = M.shape[0]
        out = M.coeffs.copy()
        ident = np.zeros_like(out)
        ident[np.arange(n), np.arange(n), 0] = 1.0
        return Jet(M.tab, 2 * ident - out, M.point)  # exp(-B) = 2 Id - exp(B)
    return EndoField(fn, name="exp(-B)")


# --- frames -------------------------------------------------------------------

@dataclass
class FrameVec:
    """A frame member at a point: full section jet plus tangent/cotangent views."""

    jet: Jet          # (2d,) stacked jet
    source: object = None

    @property
    def tan(self) -> Jet:
        d = self.jet.shape[0] // 2
        return self.jet[:d]

    @property
    def cot(self) -> Jet:
        d = self.jet.shape[0] // 2
        return self.jet[d:]

    def conj(self):
        return FrameVec(self.jet.conj(), self.source)


def transported_frame(proj: EndoField, refs, point: Point, rank: int,
                      order: int = 1, min_pivot: float = 1e-6):
    """Push reference sections through a projector; pick `rank` good columns.

    Returns a list of FrameVec (orthonormalized at jet level) or raises
    RankDeficiency when not enough independent columns survive.
    """
    cands = []
    for ref in refs:
        j = jmatvec(proj.mat(point, order), ref.jets(point, order))
        cands.append(j)
    vals = np.stack([c.value for c in cands], axis=1)
    chosen = select_pivot_columns(vals, rank, min_pivot=min_pivot)
    if len(chosen) < rank:
        raise RankDeficiency(
            f"projector transport yielded rank {len(chosen)} < {rank} at {point}")
    from .linalg import jet_gram_schmidt
    cols = jet_gram_schmidt([cands[i] for i in chosen])
    return [FrameVec(c, source=chosen[k]) for k, c in enumerate(cols)]


def tangent_subframe(frame, rank: int, min_pivot: float = 1e-9):
    """Sub-frame whose tangent parts are independent (for E = pr_T(L) work)."""
    vals = np.stack([f.tan.value for f in frame], axis=1)
    chosen = select_pivot_columns(vals, rank, min_pivot=min_pivot)
    if len(chosen) < rank:
        raise RankDeficiency(f"tangent projection rank {len(chosen)} < {rank}")
    return [frame[i] for i in chosen]


# --- Nijenhuis tensor and integrability ----------------------------------------

def nijenhuis(S: GenComplexStructure, u: Section, v: Section,
              point: Point) -> GVector:
    """[Ju, Jv] - [u, v] - J([Ju, v] + [u, Jv]) via Courant brackets."""
    Ju, Jv = S.endo(u), S.endo(v)
    b1 = jcourant(Ju.jets(point, 1), Jv.jets(point, 1)).value
    b2 = jcourant(u.jets(point, 1), v.jets(point, 1)).value
    b3 = jcourant(Ju.jets(point, 1), v.jets(point, 1)).value
    b4 = jcourant(u.jets(point, 1), Jv.jets(point, 1)).value
    M = S.mat(point, 0).value
    return GVector.from_stacked(b1 - b2 - M @ (b3 + b4))


def check_integrable(S: GenComplexStructure, plan: SamplePlan, refs,
                     tol: Tolerances | None = None) -> Report:
    """Nijenhuis-tensor verdict cross-checked against the (E, eps) criterion."""
    tol = tol or Tolerances()
    rep = Report(title=f"integrability [{S.name}]")
    t_nij = ResidualTracker()
    t_inv = ResidualTracker()
    t_deps = ResidualTracker()
    types = set()
    d = None
    for p in plan:
        d = p.chart.dim
        jets = [r.jets(p, 1) for r in refs]
        M1 = S.mat(p, 1)
        M0 = S.mat(p, 0).value
        Jjets = [jmatvec(M1, u) for u in jets]
        for i in range(len(refs)):
            for j in range(i + 1, len(refs)):
                b1 = jcourant(Jjets[i], Jjets[j]).value
                b2 = jcourant(jets[i], jets[j]).value
                b3 = jcourant(Jjets[i], jets[j]).value
                b4 = jcourant(jets[i], Jjets[j]).value
                N = b1 - b2 - M0 @ (b3 + b4)
                t_nij.update(np.max(np.abs(N)), p, scale=np.max(np.abs(b1) + np.abs(b2)))
        # (E, eps) criterion
        ozb = one_zero_bundle(S, p)
        types.add(ozb.type_)
        lframe = transported_frame(S.projector(), refs, p, rank=d)
        r = d - ozb.type_
        eframe = tangent_subframe(lframe, r)
        Espan = np.stack([f.tan.value for f in eframe], axis=1)
        for i in range(r):
            for j in range(i + 1, r):
                lie = jlie_bracket(eframe[i].tan, eframe[j].tan).value
                t_inv.update(membership_residual(lie, Espan), p,
                             scale=max(1.0, np.linalg.norm(lie)))
        resid = _subbundle_d_eps(eframe, None, p)
        t_deps.update(resid, p)
    if len(types) > 1:
        raise TypeJump(f"structure type varies across samples: {sorted(types)}")
    rep.add(t_nij.rec(f"{S.name}.nijenhuis", "N_J = 0", tol))
    rep.add(t_inv.rec(f"{S.name}.E_involutive", "E involutive", tol))
    rep.add(t_deps.rec(f"{S.name}.eps_closed", "d eps = 0", tol))
    nij_ok = rep.records[0].passed
    ee_ok = rep.records[1].passed and rep.records[2].passed
    if nij_ok != ee_ok:
        raise VerdictDisagreement(
            f"Nijenhuis verdict {nij_ok} vs (E,eps) verdict {ee_ok}:\n" + rep.to_text())
    rep.stats["type"] = types.pop() if types else None
    return rep


def _subbundle_d_eps(eframe, tw, point, h_field=None, a_rhs_scale=None):
    """Max |d^(F,a) eps| over frame triples; tw=None means untwisted d.

    eps is evaluated through the cotangent representatives of the frame.
    Used by the (E,eps)-criterion and by the twist engine.
    """
    from .linalg import jet_solve_in_span
    r = len(eframe)
    if r < 3:
        return 0.0
    tans = [f.tan for f in eframe]
    span_vals = np.stack([t.value for t in tans], axis=1)
    worst = 0.0
    from .courant import jcontract

    def eps(i, W):
        return jcontract(eframe[i].cot, W)

    for i in range(r):
        for j in range(i + 1, r):
            for k in range(j + 1, r):
                trip = (i, j, k)
                total = None
                for (a, b, c) in ((i, j, k), (k, i, j), (j, k, i)):
                    # X_a ( eps(X_b, X_c) )
                    s = eps(b, tans[c])
                    term = None
                    for m in range(tans[a].shape[0]):
                        t1 = tans[a][m] * s.deriv(m)
                        term = t1 if term is None else term + t1
                    total = term if total is None else total + term
                for (a, b, c) in ((k, i, j), (i, j, k), (j, k, i)):
                    if tw is None:
                        W = jlie_bracket(tans[b], tans[c])
                    else:
                        W = jfa_bracket(tans[b], tans[c], tw, point)
                    coeffs, resid = jet_solve_in_span(tans, W)
                    contrib = None
                    for m, cf in enumerate(coeffs):
                        t1 = eps(a, tans[m]) * cf
                        contrib = t1 if contrib is None else contrib + t1
                    total = total + contrib
                worst = max(worst, abs(complex(total.value)))
    return worst


# --- generalized almost Hermitian pairs ---------------------------------------

class GenHermitianPair:
    """Commuting pair (J1, J2) with positive metric G; carries derived data."""

    def __init__(self, J1: GenComplexStructure, J2: GenComplexStructure,
                 name="pair"):
        self.j1 = J1
        self.j2 = J2
        self.name = name
        self.gend = (-J1.endo.compose(J2.endo))
        self.j3 = GenComplexStructure(J1.endo.compose(J2.endo), name="J3")
        self._bih_cache = {}

    def gend_mat(self, point, order):
        return self.gend.mat(point, order)

    def metric(self, u: Jet, v: Jet, point, order=0) -> Jet:
        return jpairing(jmatvec(self.gend_mat(point, order), u), v)

    def g_x0x0_jet(self, x0: Section, point, order) -> Jet:
        uj = x0.jets(point, order)
        return self.metric(uj, uj, point, order)

    # --- bi-Hermitian dictionary ------------------------------------------------
    def bihermitian(self, point: Point, order: int = 1) -> dict:
        """Extract (J+, J-, g, b) as jet matrices by restriction to C+-."""
        key = (point._key, order)
        hit = self._bih_cache.get(key)
        if hit is not None:
            return hit
        d = point.chart.dim
        G = self.gend_mat(point, order)
        A = _block(G, 0, 0, d)
        ginv = _block(G, 0, 1, d)
        g = jmat_inverse(ginv)
        b = -jmatmul(g, A)
        J1m = self.j1.mat(point, order)
        J1tt = _block(J1m, 0, 0, d)
        J1ts = _block(J1m, 0, 1, d)
        Jp = J1tt + jmatmul(J1ts, b + g)
        Jm = J1tt + jmatmul(J1ts, b - g)
        out = {"Jp": Jp, "Jm": Jm, "g": g, "b": b}
        self._bih_cache[key] = out
        return out

    def validate(self, plan: SamplePlan, tol: Tolerances | None = None,
                 rng_seed: int = 0) -> Report:
        tol = tol or Tolerances(1e-10, 1e-10)
        rep = Report(title=f"hermitian pair invariants [{self.name}]")
        rep.extend(self.j1.validate(plan, tol))
        rep.extend(self.j2.validate(plan, tol))
        t_comm, t_pos, t_graph = (ResidualTracker() for _ in range(3))
        rng = np.random.default_rng(rng_seed)
        for p in plan:
            M1 = self.j1.mat(p, 0).value
            M2 = self.j2.mat(p, 0).value
            t_comm.update(np.max(np.abs(M1 @ M2 - M2 @ M1)), p,
                          scale=np.max(np.abs(M1 @ M2)))
            G = self.gend_mat(p, 0).value
            d = p.chart.dim
            Q = pairing_matrix(d)
            worst_pos = 0.0
            for _ in range(32):
                u = rng.standard_normal(2 * d)
                val = u @ (Q @ G) @ u
                nrm = u @ u
                if val <= 1e-12 * nrm:
                    worst_pos = max(worst_pos, 1.0 - val / nrm)
            t_pos.update(worst_pos, p)
            # C+- are the graphs of b +- g
            bih = self.bihermitian(p, 0)
            gv, bv = bih["g"].value, bih["b"].value
            for sign in (+1, -1):
                s = bv + sign * gv
                X = rng.standard_normal(d)
                vec = np.concatenate([X, s @ X])
                img = G @ vec
                t_graph.update(np.max(np.abs(img - sign * vec)), p,
                               scale=np.max(np.abs(vec)))
        rep.add(t_comm.rec(f"{self.name}.commute", "J1 J2 = J2 J1", tol))
        rep.add(CheckRecord(f"{self.name}.positive", "G > 0", t_pos.value,
                            t_pos.point, t_pos.value == 0.0))
        rep.add(t_graph.rec(f"{self.name}.graphs", "C+- = graphs of b +- g", tol))
        if not rep.record(f"{self.name}.commute").passed:
            raise NonCommuting(rep.to_text())
        if not rep.record(f"{self.name}.positive").passed:
            raise IndefiniteMetric(rep.to_text())
        return rep


def _block(M: Jet, bi: int, bj: int, d: int) -> Jet:
    return M[bi * d:(bi + 1) * d, bj * d:(bj + 1) * d]


def build_hermitian_pair(J1: GenComplexStructure, J2: GenComplexStructure,
                         probe: Point | None = None, name="pair") -> GenHermitianPair:
    pair = GenHermitianPair(J1, J2, name=name)
    if probe is not None:
        M1 = J1.mat(probe, 0).value
        M2 = J2.mat(probe, 0).value
        if np.max(np.abs(M1 @ M2 - M2 @ M1)) > 1e-8 * max(1.0, np.max(np.abs(M1 @ M2))):
            raise NonCommuting(f"structures do not commute at {probe}")
    return pair


def pair_from_bihermitian(chart, jp_fn, jm_fn, g_fn, b_fn,
                          name="pair") -> GenHermitianPair:
    """Assemble (J1, J2) from bi-Hermitian jet evaluators.

    Each *_fn(point, order) returns a (d, d) jet matrix; J+- act on TM, g and
    b are maps TM -> T*M.  The standard reconstruction is
        J_{1,2} = 1/2 exp(b) [[Jp +- Jm, -(wp^-1 -+ wm^-1)],
                              [wp -+ wm, -(Jp^T +- Jm^T)]] exp(-b),
    with w+- = g o J+-.
    """
    d = chart.dim

    def build(which):
        s = 1.0 if which == 1 else -1.0

        def fn(point, order):
            Jp = jp_fn(point, order)
            Jm = jm_fn(point, order)
            g = g_fn(point, order)
            b = b_fn(point, order)
            ginv = jmat_inverse(g)
            wp_inv = -jmatmul(Jp, ginv)
            wm_inv = -jmatmul(Jm, ginv)
            wp = jmatmul(g, Jp)
            wm = jmatmul(g, Jm)
            tt = Jp + Jm * s
            ts = -(wp_inv - wm_inv * s)
            st = wp - wm * s
            ss = -(_transpose(Jp) + _transpose(Jm) * s)
            M = _assemble_blocks(tt, ts, st, ss, point)
            eb = _assemble_blocks(_jid(tt.tab, d, point), _jzero(tt.tab, d, point),
                                  b, _jid(tt.tab, d, point), point)
            ebm = _assemble_blocks(_jid(tt.tab, d, point), _jzero(tt.tab, d, point),
                                   -b, _jid(tt.tab, d, point), point)
            return jmatmul(jmatmul(eb, M), ebm) * 0.5

        return fn

    J1 = GenComplexStructure(EndoField(build(1), name="J1"), name="J1")
    J2 = GenComplexStructure(EndoField(build(2), name="J2"), name="J2")
    return GenHermitianPair(J1, J2, name=name)


def _assemble_blocks(tt, ts, st, ss, point):
    d = tt.shape[0]
    rows = []
    for i in range(d):
        rows.append(jstack([tt[i, j] for j in range(d)] +
                           [ts[i, j] for j in range(d)], point=point))
    for i in range(d):
        rows.append(jstack([st[i, j] for j in range(d)] +
                           [ss[i, j] for j in range(d)], point=point))
    return jstack(rows, point=point)


def _jid(tab, d, point):
    c = np.zeros((d, d, tab.size), dtype=complex)
    c[np.arange(d), np.arange(d), 0] = 1.0
    return Jet(tab, c, point)


def _jzero(tab, d, point):
    return Jet(tab, np.zeros((d, d, tab.size), dtype=complex), point)


# --- generalized Kahler verdict ---------------------------------------------------

def check_generalized_kahler(pair: GenHermitianPair, plan: SamplePlan, refs,
                             tol: Tolerances | None = None) -> Report:
    """Gualtieri criterion (three Courant-closure checks) cross-checked with
    the bi-Hermitian one (J+- integrable plus the db identity)."""
    tol = tol or Tolerances()
    rep = Report(title=f"generalized Kahler [{pair.name}]")
    P1 = pair.j1.projector()
    P2 = pair.j2.projector()
    P2b = pair.j2.projector(conjugate=True)
    P12 = P1.compose(P2)
    P12b = P1.compose(P2b)
    t_l1, t_l12, t_l12b = (ResidualTracker() for _ in range(3))
    t_nijp, t_nijm, t_db = (ResidualTracker() for _ in range(3))
    for p in plan:
        d = p.chart.dim
        # ranks at this point
        L1 = pair.j1.l_span(p)
        M12 = 0.25 * ((np.eye(2 * d) - 1j * pair.j1.mat(p, 0).value)
                      @ (np.eye(2 * d) - 1j * pair.j2.mat(p, 0).value))
        M12b = 0.25 * ((np.eye(2 * d) - 1j * pair.j1.mat(p, 0).value)
                       @ (np.eye(2 * d) + 1j * pair.j2.mat(p, 0).value))
        r12 = subspace_dim(M12)
        r12b = subspace_dim(M12b)
        _closure_residual(P1, refs, p, d, t_l1)
        _closure_residual(P12, refs, p, r12, t_l12)
        _closure_residual(P12b, refs, p, r12b, t_l12b)
        # bi-Hermitian path
        bih = pair.bihermitian(p, 2)
        Jp, Jm, g, b = bih["Jp"], bih["Jm"], bih["g"], bih["b"]
        for M, tracker in ((Jp, t_nijp), (Jm, t_nijm)):
            tracker.update(_acs_nijenhuis_residual(M, d), p)
        t_db.update(_db_identity_residual(Jp, Jm, g, b, d), p)
    rep.add(t_l1.rec("gk.L1", "L1 Courant-closed", tol))
    rep.add(t_l12.rec("gk.L1capL2", "L1 & L2 Courant-closed", tol))
    rep.add(t_l12b.rec("gk.L1capL2bar", "L1 & conj(L2) Courant-closed", tol))
    rep.add(t_nijp.rec("gk.Jplus", "J+ integrable", tol))
    rep.add(t_nijm.rec("gk.Jminus", "J- integrable", tol))
    rep.add(t_db.rec("gk.db", "db = d om+(J+.,J+.,J+.) = -d om-(J-.,J-.,J-.)", tol))
    gual = all(rep.record(c).passed for c in ("gk.L1", "gk.L1capL2", "gk.L1capL2bar"))
    bih_ok = all(rep.record(c).passed for c in ("gk.Jplus", "gk.Jminus", "gk.db"))
    if gual != bih_ok:
        raise VerdictDisagreement(
            f"Gualtieri verdict {gual} vs bi-Hermitian verdict {bih_ok}:\n"
            + rep.to_text())
    return rep


def _closure_residual(proj: EndoField, refs, p, rank, tracker):
    frame = transported_frame(proj, refs, p, rank=rank)
    span = np.stack([f.jet.value for f in frame], axis=1)
    for i in range(rank):
        for j in range(i + 1, rank):
            br = jcourant(frame[i].jet, frame[j].jet).value
            tracker.update(membership_residual(br, span), p,
                           scale=max(1.0, float(np.linalg.norm(br))))


def _acs_nijenhuis_residual(Jmat: Jet, d: int) -> float:
    """max |N_J| for an almost complex structure given as a (d,d) jet matrix."""
    worst = 0.0
    cols = [Jmat[:, k] for k in range(d)]

    def bracket(X, Y):
        return jlie_bracket(X, Y)

    basis = []
    tab = Jmat.tab
    for k in range(d):
        c = np.zeros((d, tab.size), dtype=complex)
        c[k, 0] = 1.0
        basis.append(Jet(tab, c, Jmat.point))
    J0 = Jmat.value
    for a in range(d):
        for bidx in range(a + 1, d):
            X, Y = basis[a], basis[bidx]
            JX, JY = cols[a], cols[bidx]
            N = (bracket(JX, JY).value - bracket(X, Y).value
                 - J0 @ (bracket(JX, Y).value + bracket(X, JY).value))
            worst = max(worst, float(np.max(np.abs(N))))
    return worst


def _db_identity_residual(Jp, Jm, g, b, d) -> float:
    """|db(X,Y,Z) - d om+(J+X,J+Y,J+Z)| and the J- version, coordinate triples."""
    wp = jmatmul(g, Jp)   # map X -> om+(X, .)
    wm = jmatmul(g, Jm)
    db = _dform_from_map(b, d)
    dwp = _dform_from_map(wp, d)
    dwm = _dform_from_map(wm, d)
    Jp0, Jm0 = Jp.value, Jm.value
    worst = 0.0
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(j + 1, d):
                lhs = db[(i, j, k)]
                ei, ej, ek = (np.eye(d)[m] for m in (i, j, k))
                rp = _eval3(dwp, Jp0 @ ei, Jp0 @ ej, Jp0 @ ek, d)
                rm = _eval3(dwm, Jm0 @ ei, Jm0 @ ej, Jm0 @ ek, d)
                worst = max(worst, abs(lhs - rp), abs(lhs + rm))
    return worst


def _dform_from_map(M: Jet, d: int) -> dict:
    """d of the 2-form whose map matrix is M (components B[j,k] = M[k,j])."""
    out = {}
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(j + 1, d):
                val = 0.0 + 0.0j
                for (a, b_, c), sgn in (((i, j, k), 1), ((j, i, k), -1), ((k, i, j), 1)):
                    comp = M[c, b_]  # B(e_b, e_c) = M[c, b]
                    val += sgn * complex(comp.deriv(a).value)
                out[(i, j, k)] = val
    return out


def _eval3(dform: dict, X, Y, Z, d) -> complex:
    from itertools import permutations as perms
    total = 0.0 + 0.0j
    for (i, j, k), comp in dform.items():
        det = 0.0 + 0.0j
        for perm, sgn in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                          ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1)):
            vecs = (X, Y, Z)
            det += sgn * vecs[perm[0]][i] * vecs[perm[1]][j] * vecs[perm[2]][k]
        total += comp * det
    return total


# --- subspace tools (public face) ---------------------------------------------

def subspace_tools(spanA: np.ndarray, spanB: np.ndarray):
    """Intersection span and a membership-residual callable."""
    inter = subspace_intersection(spanA, spanB)

    def member(v):
        return membership_residual(np.asarray(v, complex), inter)

    return inter, member
