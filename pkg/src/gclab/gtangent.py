"""Pointwise and fieldwise algebra of TM + T*M.

Sections and endomorphism fields are evaluator objects producing jets, so
every derived structure (conjugations, deformations, projector frames) keeps
exact derivatives.  Components are stacked (tangent; cotangent), each of chart
dimension d.
"""

from __future__ import annotations

import numpy as np

from .chart import Point
from .errors import DimensionMismatch, ZeroConformalFactor
from .fields import ScalarField, as_field
from .jets import Jet, jet_table, jmatmul, jmatvec, jstack, jzeros


# --- value-level carrier -----------------------------------------------------

class GVector:
    """Element of the complexified generalized tangent space at a point."""

    __slots__ = ("tangent", "cotangent")

    def __init__(self, tangent, cotangent):
        self.tangent = np.asarray(tangent, dtype=complex)
        self.cotangent = np.asarray(cotangent, dtype=complex)
        if self.tangent.shape != self.cotangent.shape:
            raise DimensionMismatch("tangent/cotangent dimension mismatch")

    @property
    def stacked(self):
        return np.concatenate([self.tangent, self.cotangent])

    @staticmethod
    def from_stacked(vec):
        vec = np.asarray(vec, dtype=complex)
        d = vec.shape[0] // 2
        return GVector(vec[:d], vec[d:])

    def is_real(self, tol=1e-12):
        return float(np.max(np.abs(self.stacked.imag))) <= tol

    def __add__(self, other):
        return GVector(self.tangent + other.tangent, self.cotangent + other.cotangent)

    def __sub__(self, other):
        return GVector(self.tangent - other.tangent, self.cotangent - other.cotangent)

    def __mul__(self, c):
        return GVector(self.tangent * c, self.cotangent * c)

    __rmul__ = __mul__

    def conj(self):
        return GVector(np.conj(self.tangent), np.conj(self.cotangent))

    def __repr__(self):
        return f"GVector(X={self.tangent}, xi={self.cotangent})"


def pairing(u, v):
    """Canonical neutral pairing <X+xi, Y+eta> = (eta(X) + xi(Y))/2."""
    if isinstance(u, GVector):
        return 0.5 * (np.dot(v.cotangent, u.tangent) + np.dot(u.cotangent, v.tangent))
    d = u.shape[0] // 2
    s = None
    for i in range(d):
        term = v[d + i] * u[i] + u[d + i] * v[i]
        s = term if s is None else s + term
    return 0.5 * s


def skew_pairing(u, v):
    """Antisymmetric form (X+xi, Y+eta) = (xi(Y) - eta(X))/2."""
    if isinstance(u, GVector):
        return 0.5 * (np.dot(u.cotangent, v.tangent) - np.dot(v.cotangent, u.tangent))
    d = u.shape[0] // 2
    s = None
    for i in range(d):
        term = u[d + i] * v[i] - v[d + i] * u[i]
        s = term if s is None else s + term
    return 0.5 * s


def pairing_matrix(d: int) -> np.ndarray:
    Q = np.zeros((2 * d, 2 * d))
    Q[:d, d:] = 0.5 * np.eye(d)
    Q[d:, :d] = 0.5 * np.eye(d)
    return Q


def b_field_transform(B, u: GVector) -> GVector:
    """exp(B): X + xi -> X + xi + i_X B, with B the 2-form's component matrix
    B[j,k] = B(e_j, e_k)."""
    B = np.asarray(B)
    iXB = B.T @ u.tangent  # (i_X B)_k = B_{jk} X^j
    return GVector(u.tangent, u.cotangent + iXB)


def conformal_map(h_value, u: GVector) -> GVector:
    """tau_h: (X, xi) -> (hX, xi/h)."""
    if abs(h_value) < 1e-12:
        raise ZeroConformalFactor("conformal factor inside guard band")
    return GVector(h_value * u.tangent, u.cotangent / h_value)


# --- section fields -----------------------------------------------------------

class Section:
    """Section of (TM + T*M)^C with jet-capable components."""

    def __init__(self, fn, name=""):
        self._fn = fn
        self.name = name
        self._cache = {}

    def jets(self, point: Point, order: int) -> Jet:
        key = (point._key, order)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._fn(point, order)
            self._cache[key] = hit
        return hit

    def at(self, point: Point) -> GVector:
        return GVector.from_stacked(self.jets(point, 0).value)

    # algebra (lazy)
    def __add__(self, other):
        return Section(lambda p, o: self.jets(p, o) + other.jets(p, o))

    def __sub__(self, other):
        return Section(lambda p, o: self.jets(p, o) - other.jets(p, o))

    def __neg__(self):
        return Section(lambda p, o: -self.jets(p, o))

    def scale(self, c):
        """Scale by a constant or by a ScalarField coefficient."""
        if isinstance(c, ScalarField):
            return Section(lambda p, o: self.jets(p, o) * c.jet(p, o))
        return Section(lambda p, o: self.jets(p, o) * c)

    def conj(self):
        return Section(lambda p, o: self.jets(p, o).conj(), name=f"conj({self.name})")

    def tangent_part(self):
        def fn(p, o):
            j = self.jets(p, o)
            d = j.shape[0] // 2
            out = j.coeffs.copy()
            out[d:] = 0.0
            return Jet(j.tab, out, j.point)
        return Section(fn, name=f"prT({self.name})")

    def cotangent_part(self):
        def fn(p, o):
            j = self.jets(p, o)
            d = j.shape[0] // 2
            out = j.coeffs.copy()
            out[:d] = 0.0
            return Jet(j.tab, out, j.point)
        return Section(fn, name=f"prT*({self.name})")


def section_from_components(tangent_fields, cotangent_fields, name="") -> Section:
    """Section with ScalarField components (numbers allowed)."""
    tf = [as_field(f) for f in tangent_fields]
    cf = [as_field(f) for f in cotangent_fields]

    def fn(point, order):
        js = [f.jet(point, order) for f in tf + cf]
        return jstack(js, point=point)

    return Section(fn, name=name)


def constant_section(chart, stacked, name="") -> Section:
    vec = np.asarray(stacked, dtype=complex)

    def fn(point, order):
        tab = jet_table(chart.dim, order)
        c = np.zeros((2 * chart.dim, tab.size), dtype=complex)
        c[:, 0] = vec
        return Jet(tab, c, point)

    return Section(fn, name=name)


def coordinate_vector(chart, i, name=None) -> Section:
    vec = np.zeros(2 * chart.dim)
    vec[i] = 1.0
    return constant_section(chart, vec, name or f"d/d{chart.names[i]}")


def coordinate_covector(chart, i, name=None) -> Section:
    vec = np.zeros(2 * chart.dim)
    vec[chart.dim + i] = 1.0
    return constant_section(chart, vec, name or f"d{chart.names[i]}")


def vector_section(tangent_fields, name="") -> Section:
    return section_from_components(tangent_fields, [0.0] * len(tangent_fields), name)


def covector_section(cotangent_fields, name="") -> Section:
    return section_from_components([0.0] * len(cotangent_fields), cotangent_fields, name)


# --- endomorphism fields ---------------------------------------------------------

class EndoField:
    """Field of endomorphisms of TM + T*M, evaluated as (2d x 2d) jet matrices."""

    def __init__(self, fn, name=""):
        self._fn = fn
        self.name = name
        self._cache = {}

    def mat(self, point: Point, order: int) -> Jet:
        key = (point._key, order)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._fn(point, order)
            self._cache[key] = hit
        return hit

    def __call__(self, sec: Section) -> Section:
        return Section(lambda p, o: jmatvec(self.mat(p, o), sec.jets(p, o)),
                       name=f"{self.name}({sec.name})")

    def compose(self, other: "EndoField") -> "EndoField":
        return EndoField(lambda p, o: jmatmul(self.mat(p, o), other.mat(p, o)),
                         name=f"{self.name}*{other.name}")

    def __add__(self, other):
        return EndoField(lambda p, o: self.mat(p, o) + other.mat(p, o))

    def __sub__(self, other):
        return EndoField(lambda p, o: self.mat(p, o) - other.mat(p, o))

    def __neg__(self):
        return EndoField(lambda p, o: -self.mat(p, o))

    def scale(self, c):
        if isinstance(c, ScalarField):
            return EndoField(lambda p, o: self.mat(p, o) * c.jet(p, o))
        return EndoField(lambda p, o: self.mat(p, o) * c)


def endo_from_blocks(chart, tt=None, tstar_t=None, t_tstar=None, tstar_tstar=None,
                     name="") -> EndoField:
    """Assemble an EndoField from block matrices of ScalarFields/constants.

    Blocks act as u = (X; xi) -> (tt X + t_tstar xi ; tstar_t X + tstar_tstar xi).
    """
    d = chart.dim

    def block_to_fields(M):
        if M is None:
            return None
        out = [[as_field(M[i][j]) if not isinstance(M, np.ndarray) else as_field(M[i, j])
                for j in range(d)] for i in range(d)]
        return out

    btt = block_to_fields(tt)
    bts = block_to_fields(t_tstar)
    bst = block_to_fields(tstar_t)
    bss = block_to_fields(tstar_tstar)

    def fn(point, order):
        tab = jet_table(chart.dim, order)
        rows = []
        for i in range(2 * d):
            row = []
            for j in range(2 * d):
                blk = (btt if i < d and j < d else
                       bts if i < d else
                       bst if j < d else bss)
                ii, jj = i % d, j % d
                if blk is None:
                    row.append(Jet.constant(tab, 0.0, point))
                else:
                    row.append(blk[ii][jj].jet(point, order))
            rows.append(jstack(row, point=point))
        return jstack(rows, point=point)

    return EndoField(fn, name=name)


def endo_constant(chart, M, name="") -> EndoField:
    M = np.asarray(M, dtype=complex)

    def fn(point, order):
        tab = jet_table(chart.dim, order)
        c = np.zeros(M.shape + (tab.size,), dtype=complex)
        c[..., 0] = M
        return Jet(tab, c, point)

    return EndoField(fn, name=name)


def identity_endo(chart) -> EndoField:
    return endo_constant(chart, np.eye(2 * chart.dim), name="Id")


def conformal_endo(chart, h: ScalarField) -> EndoField:
    """tau_h as an endomorphism field: diag(h Id, Id/h)."""
    h = as_field(h)
    d = chart.dim

    def fn(point, order):
        hj = h.jet(point, order)
        if abs(hj.value) < 1e-12:
            raise ZeroConformalFactor("conformal factor vanishes at sample")
        tab = hj.tab
        rows = []
        zero = Jet.constant(tab, 0.0, point)
        hinv = hj.reciprocal()
        for i in range(2 * d):
            row = [zero] * (2 * d)
            row[i] = hj if i < d else hinv
            rows.append(jstack(row, point=point))
        return jstack(rows, point=point)

    return EndoField(fn, name="tau_h")


def b_field_endo(chart, B: "FormFieldLike") -> EndoField:
    """exp(B) with B a degree-2 FormField (or constant component matrix)."""
    d = chart.dim
    if isinstance(B, np.ndarray):
        M = np.eye(2 * d, dtype=complex)
        M[d:, :d] = B.T
        return endo_constant(chart, M, name="exp(B)")

    def fn(point, order):
        tab = jet_table(chart.dim, order)
        Bm = B.component_matrix(point, order)  # (d,d) jet, antisymmetric
        rows = []
        zero = Jet.constant(tab, 0.0, point)
        one = Jet.constant(tab, 1.0, point)
        for i in range(2 * d):
            row = []
            for j in range(2 * d):
                if i == j:
                    row.append(one)
                elif i >= d and j < d:
                    row.append(Bm[j % d, i % d])  # (i_X B)_k = B_{jk} X^j
                else:
                    row.append(zero)
            rows.append(jstack(row, point=point))
        return jstack(rows, point=point)

    return EndoField(fn, name="exp(B)")


def apply_endo(A: EndoField, u: Section, point: Point) -> GVector:
    """Block matrix-vector product at a point."""
    return A(u).at(point)


# --- jet-level pairings -----------------------------------------------------------

def jpairing(u: Jet, v: Jet) -> Jet:
    """<u, v> for stacked jet-vectors; complex bilinear."""
    d = u.shape[0] // 2
    s = None
    for i in range(d):
        term = v[d + i] * u[i] + u[d + i] * v[i]
        s = term if s is None else s + term
    return s * 0.5


def jskew_pairing(u: Jet, v: Jet) -> Jet:
    d = u.shape[0] // 2
    s = None
    for i in range(d):
        term = u[d + i] * v[i] - v[d + i] * u[i]
        s = term if s is None else s + term
    return s * 0.5
