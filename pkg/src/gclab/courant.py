"""Courant calculus: Lie/Courant brackets, exterior derivative, twisted variants.

All operators act on jet data and return jet data one order lower, so they
nest as long as the primitive fields supply enough orders (3 by default).
The circle-twist data (X0, F, a) enters through TwistData; its twisted
operators follow the base-manifold formulas

    d'alpha      = d alpha - (1/a) F ^ i_X0 alpha
    L'_X alpha   = L_X alpha - (1/a) (i_X F) ^ i_X0 alpha
    [u, v]'      = [u, v] + (F(X,Y)/a) X0 - (eta(X0)/a) i_X F + (xi(X0)/a) i_Y F
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chart import Point, SamplePlan
from .errors import NonInvariantSection
from .fields import ScalarField, as_field
from .forms import FormField, JForm
from .gtangent import GVector, Section, jpairing
from .jets import Jet, jet_table, jstack, jzeros
from .report import CheckRecord, Report, Tolerances


# --- jet-level primitives ----------------------------------------------------

def jlie_bracket(X: Jet, Y: Jet) -> Jet:
    """[X,Y]^i = X^j d_j Y^i - Y^j d_j X^i on tangent jet-vectors."""
    d = X.tab.dim
    comps = []
    for i in range(X.shape[0]):
        acc = None
        for j in range(d):
            term = X[j] * Y[i].deriv(j) - Y[j] * X[i].deriv(j)
            acc = term if acc is None else acc + term
        comps.append(acc)
    return jstack(comps, point=X.point)


def jgrad(s: Jet, d: int) -> Jet:
    """Differential of a scalar jet as a covector jet-vector of length d."""
    return jstack([s.deriv(i) for i in range(d)], point=s.point)


def jlie_oneform(X: Jet, eta: Jet) -> Jet:
    """(L_X eta)_i = X^j d_j eta_i + eta_j d_i X^j for a covector jet-vector."""
    d = eta.shape[0]
    comps = []
    for i in range(d):
        acc = None
        for j in range(d):
            term = X[j] * eta[i].deriv(j) + eta[j] * X[j].deriv(i)
            acc = term if acc is None else acc + term
        comps.append(acc)
    return jstack(comps, point=eta.point)


def jcontract(eta: Jet, X: Jet) -> Jet:
    """eta(X) for covector/vector jet-vectors of equal length."""
    acc = None
    for i in range(eta.shape[0]):
        term = eta[i] * X[i]
        acc = term if acc is None else acc + term
    return acc


def jcourant(u: Jet, v: Jet) -> Jet:
    """Courant bracket of stacked jet-vectors; one order lower."""
    d = u.shape[0] // 2
    X, xi = u[:d], u[d:]
    Y, eta = v[:d], v[d:]
    lie = jlie_bracket(X, Y)
    lx_eta = jlie_oneform(X, eta)
    ly_xi = jlie_oneform(Y, xi)
    s = jcontract(eta, X) - jcontract(xi, Y)
    ds = jgrad(s.truncate(min(s.order, lx_eta.order + 1)), d)
    cot = lx_eta - ly_xi - ds * 0.5
    return jstack([lie[i] for i in range(d)] + [cot[i] for i in range(d)],
                  point=u.point)


def jsection_lie(X0: Jet, u: Jet) -> Jet:
    """Generalized Lie derivative L_X0 (Y + eta) = ([X0,Y], L_X0 eta)."""
    d = u.shape[0] // 2
    Y, eta = u[:d], u[d:]
    X = X0[:d] if X0.shape[0] == 2 * d else X0
    lie = jlie_bracket(X, Y)
    leta = jlie_oneform(X, eta)
    return jstack([lie[i] for i in range(d)] + [leta[i] for i in range(d)],
                  point=u.point)


# --- public operators on fields ----------------------------------------------

def lie_bracket(X: Section, Y: Section, point: Point, order: int = 0) -> GVector:
    j = jlie_bracket(X.jets(point, order + 1)[:point.chart.dim],
                     Y.jets(point, order + 1)[:point.chart.dim])
    vals = j.truncate(order).value if order else j.value
    return GVector(vals, np.zeros_like(vals))


def exterior_derivative(alpha: FormField, point: Point, order: int = 0) -> JForm:
    return alpha.at(point, order + 1).ext_d()


def lie_derivative_form(X: Section, alpha: FormField, point: Point,
                        order: int = 0) -> JForm:
    """Cartan formula L_X alpha = i_X d(alpha) + d(i_X alpha)."""
    Xj = X.jets(point, order + 1)
    a = alpha.at(point, order + 1)
    return a.ext_d().interior(Xj) + a.interior(Xj).ext_d()


def courant_bracket(u: Section, v: Section, point: Point) -> GVector:
    return GVector.from_stacked(
        jcourant(u.jets(point, 1), v.jets(point, 1)).value)


def courant_bracket_section(u: Section, v: Section) -> Section:
    return Section(lambda p, o: jcourant(u.jets(p, o + 1), v.jets(p, o + 1)),
                   name=f"[{u.name},{v.name}]")


# --- twist data -----------------------------------------------------------------

@dataclass
class TwistData:
    """Circle twist data (X0, F, a) evaluated on the base chart."""

    x0: Section
    F: FormField
    a: ScalarField
    name: str = "twist"

    def __post_init__(self):
        self.a = as_field(self.a)

    def x0_tangent(self, point, order) -> Jet:
        d = point.chart.dim
        return self.x0.jets(point, order)[:d]

    def validate(self, plan: SamplePlan, tol: Tolerances | None = None) -> Report:
        """Check dF = 0, da = -i_X0 F, a away from 0, and L_X0 F = 0."""
        tol = tol or Tolerances()
        rep = Report(title=f"twist data [{self.name}]")
        d_worst = a_worst = inv_worst = nz_worst = 0.0
        d_pt = a_pt = inv_pt = nz_pt = None
        for p in plan:
            dF = self.F.at(p, 1).ext_d()
            r = dF.max_abs_value()
            if r > d_worst:
                d_worst, d_pt = r, p
            aj = self.a.jet(p, 1)
            X0 = self.x0_tangent(p, 1)
            iF = self.F.at(p, 1).interior(X0)
            da = jgrad(aj, p.chart.dim)
            resid = 0.0
            for i in range(p.chart.dim):
                resid = max(resid, abs(complex((da[i] + iF.get((i,))).value)))
            if resid > a_worst:
                a_worst, a_pt = resid, p
            av = abs(complex(aj.value))
            small = max(0.0, 1e-9 - av)
            if small > nz_worst:
                nz_worst, nz_pt = small, p
            lf = lie_derivative_form(self.x0, self.F, p)
            r = lf.max_abs_value()
            if r > inv_worst:
                inv_worst, inv_pt = r, p
        rep.add(CheckRecord("twist.dF", "dF = 0", d_worst, d_pt,
                            tol.ok(d_worst)))
        rep.add(CheckRecord("twist.da", "da = -i_X0 F", a_worst, a_pt,
                            tol.ok(a_worst)))
        rep.add(CheckRecord("twist.a_nonzero", "a != 0", nz_worst, nz_pt,
                            nz_worst == 0.0))
        rep.add(CheckRecord("twist.invariance", "L_X0 F = 0", inv_worst, inv_pt,
                            tol.ok(inv_worst)))
        return rep


def check_invariance(tw: TwistData, sec: Section, point: Point,
                     tol: float = 1e-7, label: str = "section") -> float:
    """Residual of L_X0 sec at a point; raises in strict usage when large."""
    lj = jsection_lie(tw.x0.jets(point, 1), sec.jets(point, 1))
    return float(np.max(np.abs(lj.value)))


def require_invariant(tw: TwistData, secs, point: Point, strict: bool,
                      tol: float = 1e-7):
    if not strict:
        return
    for s in secs:
        r = check_invariance(tw, s, point)
        if r > tol:
            raise NonInvariantSection(
                f"section {s.name or '?'} has L_X0 residual {r:.2e} at {point}")


def twisted_courant_bracket(u: Section, v: Section, tw: TwistData, point: Point,
                            strict: bool = False) -> GVector:
    require_invariant(tw, [u, v], point, strict)
    return GVector.from_stacked(jtwisted_courant(
        u.jets(point, 1), v.jets(point, 1), tw, point).value)


def jtwisted_courant(uj: Jet, vj: Jet, tw: TwistData, point: Point) -> Jet:
    order = min(uj.order, vj.order)
    d = point.chart.dim
    base = jcourant(uj, vj)
    F = tw.F.at(point, order)
    aj = tw.a.jet(point, order)
    X0 = tw.x0.jets(point, order)
    X, xi = uj[:d].truncate(order - 1), uj[d:].truncate(order - 1)
    Y, eta = vj[:d].truncate(order - 1), vj[d:].truncate(order - 1)
    FXY = F.eval(X, Y)
    ainv = aj.reciprocal()
    corr_t = X0[:d] * (FXY * ainv)
    iXF = F.interior(X)
    iYF = F.interior(Y)
    eta_x0 = jcontract(eta, X0[:d])
    xi_x0 = jcontract(xi, X0[:d])
    cot = []
    for i in range(d):
        cot.append((iYF.get((i,)) * xi_x0 - iXF.get((i,)) * eta_x0) * ainv)
    corr = jstack([corr_t[i] for i in range(d)] + cot, point=point)
    return base + corr


def fa_bracket(X: Section, Y: Section, tw: TwistData, point: Point,
               strict: bool = False) -> GVector:
    """[X,Y] + (F(X,Y)/a) X0 for tangent sections."""
    require_invariant(tw, [X, Y], point, strict)
    vals = jfa_bracket(X.jets(point, 1), Y.jets(point, 1), tw, point).value
    return GVector(vals, np.zeros_like(vals))


def jfa_bracket(Xj: Jet, Yj: Jet, tw: TwistData, point: Point) -> Jet:
    order = min(Xj.order, Yj.order)
    d = point.chart.dim
    X = Xj[:d] if Xj.shape[0] == 2 * d else Xj
    Y = Yj[:d] if Yj.shape[0] == 2 * d else Yj
    lie = jlie_bracket(X, Y)
    F = tw.F.at(point, order)
    aj = tw.a.jet(point, order)
    X0 = tw.x0_tangent(point, order)
    coef = F.eval(X, Y) * aj.reciprocal()
    return lie + jstack([X0[i] for i in range(d)], point=point) * coef


def twisted_exterior_derivative(alpha: FormField, tw: TwistData, point: Point,
                                order: int = 0, strict: bool = False) -> JForm:
    """d'alpha = d alpha - (1/a) F ^ i_X0 alpha on full forms."""
    if strict:
        _require_invariant_form(tw, alpha, point)
    a_low = alpha.at(point, order + 1)
    da = a_low.ext_d()
    F = tw.F.at(point, order)
    X0 = tw.x0_tangent(point, order)
    aj = tw.a.jet(point, order)
    corr = F.wedge(a_low.interior(X0)).scale(aj.reciprocal())
    return da - corr


def twisted_lie_derivative(X: Section, alpha: FormField, tw: TwistData,
                           point: Point, order: int = 0,
                           strict: bool = False) -> JForm:
    """L'_X alpha = L_X alpha - (1/a)(i_X F) ^ i_X0 alpha."""
    if strict:
        require_invariant(tw, [X], point, strict)
        _require_invariant_form(tw, alpha, point)
    base = lie_derivative_form(X, alpha, point, order)
    F = tw.F.at(point, order)
    Xj = X.jets(point, order)
    X0 = tw.x0_tangent(point, order)
    aj = tw.a.jet(point, order)
    corr = F.interior(Xj).wedge(alpha.at(point, order).interior(X0)).scale(
        aj.reciprocal())
    return base - corr


def _require_invariant_form(tw: TwistData, alpha: FormField, point: Point,
                            tol: float = 1e-7):
    r = lie_derivative_form(tw.x0, alpha, point).max_abs_value()
    if r > tol:
        raise NonInvariantSection(
            f"form {alpha.name or '?'} has L_X0 residual {r:.2e} at {point}")
