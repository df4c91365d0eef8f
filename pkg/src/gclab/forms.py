"""Differential forms on chart domains, with jet-valued components.

A k-form is stored on sorted index tuples i1 < .. < ik; evaluation on vectors
uses the determinant convention, so (a ^ b)(v1..vk+l) sums over shuffles with
no factorial prefactors.
"""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np

from .chart import Point
from .errors import DimensionMismatch
from .fields import ScalarField, as_field
from .jets import Jet, jet_table, jstack


def _perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def sort_index(idx):
    """Canonical (sorted tuple, sign); sign 0 for repeated indices."""
    if len(set(idx)) != len(idx):
        return None, 0
    order = tuple(sorted(idx))
    return order, _perm_sign(idx)


class JForm:
    """A k-form at a point: sorted index tuple -> scalar Jet."""

    def __init__(self, chart, degree, comps, point, tab):
        self.chart = chart
        self.degree = degree
        self.comps = comps  # dict tuple -> Jet
        self.point = point
        self.tab = tab

    @staticmethod
    def zero(chart, degree, point, order):
        return JForm(chart, degree, {}, point, jet_table(chart.dim, order))

    def get(self, idx) -> Jet:
        canon, sign = sort_index(tuple(idx))
        if sign == 0 or canon not in self.comps:
            return Jet.constant(self.tab, 0.0, self.point)
        c = self.comps[canon]
        return c if sign == 1 else -c

    def map(self, f):
        return JForm(self.chart, self.degree,
                     {k: f(v) for k, v in self.comps.items()}, self.point, self.tab)

    def __add__(self, other):
        if other.degree != self.degree:
            raise DimensionMismatch("adding forms of different degree")
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        tab = self.tab if self.tab.order <= other.tab.order else other.tab
        return JForm(self.chart, self.degree, out, self.point, tab)

    def __sub__(self, other):
        return self + other.map(lambda j: -j)

    def scale(self, c):
        return self.map(lambda j: j * c)

    def conj(self):
        return self.map(lambda j: j.conj())

    # --- calculus ------------------------------------------------------------
    def ext_d(self) -> "JForm":
        """Exterior derivative; drops one jet order."""
        out = {}
        for K in combinations(range(self.chart.dim), self.degree + 1):
            acc = None
            for m, i in enumerate(K):
                rest = K[:m] + K[m + 1:]
                if rest not in self.comps:
                    continue
                term = self.comps[rest].deriv(i)
                if m % 2 == 1:
                    term = -term
                acc = term if acc is None else acc + term
            if acc is not None:
                out[K] = acc
        low = jet_table(self.chart.dim, self.tab.order - 1)
        return JForm(self.chart, self.degree + 1, out, self.point, low)

    def interior(self, X: Jet) -> "JForm":
        """i_X with X a tangent jet-vector of length dim (or stacked 2*dim)."""
        d = self.chart.dim
        Xv = [X[i] for i in range(d)]
        out = {}
        for K in combinations(range(d), self.degree - 1):
            acc = None
            for j in range(d):
                full = (j,) + K
                canon, sign = sort_index(full)
                if sign == 0 or canon not in self.comps:
                    continue
                term = self.comps[canon] * Xv[j]
                if sign == -1:
                    term = -term
                acc = term if acc is None else acc + term
            if acc is not None:
                out[K] = acc
        tab = out[next(iter(out))].tab if out else self.tab
        return JForm(self.chart, self.degree - 1, out, self.point, tab)

    def wedge(self, other: "JForm") -> "JForm":
        out = {}
        for A, ja in self.comps.items():
            for B, jb in other.comps.items():
                canon, sign = sort_index(A + B)
                if sign == 0:
                    continue
                term = ja * jb
                if sign == -1:
                    term = -term
                out[canon] = out[canon] + term if canon in out else term
        tab = self.tab if self.tab.order <= other.tab.order else other.tab
        return JForm(self.chart, self.degree + other.degree, out, self.point, tab)

    def eval(self, *vectors) -> Jet:
        """Evaluate on tangent jet-vectors (length >= dim; extra entries ignored)."""
        k = self.degree
        if len(vectors) != k:
            raise DimensionMismatch(f"degree-{k} form applied to {len(vectors)} vectors")
        if k == 0:
            return self.comps.get((), Jet.constant(self.tab, 0.0, self.point))
        acc = None
        for K, comp in self.comps.items():
            det = None
            for perm in permutations(range(k)):
                term = None
                for a, pa in enumerate(perm):
                    f = vectors[a][K[pa]]
                    term = f if term is None else term * f
                sgn = _perm_sign(perm)
                term = term if sgn == 1 else -term
                det = term if det is None else det + term
            contrib = comp * det
            acc = contrib if acc is None else acc + contrib
        return acc if acc is not None else Jet.constant(self.tab, 0.0, self.point)

    def max_abs_value(self) -> float:
        if not self.comps:
            return 0.0
        return max(float(np.max(np.abs(j.value))) for j in self.comps.values())

    def component_matrix(self, antisym_full=True) -> Jet:
        """Degree-2 form as full antisymmetric (d,d) jet matrix M[j,k]=B(e_j,e_k)."""
        d = self.chart.dim
        zero = Jet.constant(self.tab, 0.0, self.point)
        rows = []
        for j in range(d):
            row = []
            for k in range(d):
                row.append(self.get((j, k)) if j != k else zero)
            rows.append(jstack(row, point=self.point))
        return jstack(rows, point=self.point)


class FormField:
    """Field of k-forms with ScalarField components."""

    def __init__(self, chart, degree, components, name=""):
        """components: dict {index tuple: ScalarField/number}; canonicalized."""
        self.chart = chart
        self.degree = degree
        self.name = name
        self._comp_fields = {}
        for idx, f in components.items():
            canon, sign = sort_index(tuple(idx))
            if sign == 0:
                continue
            fld = as_field(f) if sign == 1 else -as_field(f)
            if canon in self._comp_fields:
                self._comp_fields[canon] = self._comp_fields[canon] + fld
            else:
                self._comp_fields[canon] = fld
        self._cache = {}

    def at(self, point: Point, order: int) -> JForm:
        key = (point._key, order)
        hit = self._cache.get(key)
        if hit is None:
            tab = jet_table(self.chart.dim, order)
            comps = {idx: f.jet(point, order) for idx, f in self._comp_fields.items()}
            hit = JForm(self.chart, self.degree, comps, point, tab)
            self._cache[key] = hit
        return hit

    def component_matrix(self, point, order):
        return self.at(point, order).component_matrix()

    @staticmethod
    def zero(chart, degree):
        return FormField(chart, degree, {})

    @staticmethod
    def constant(chart, degree, components, name=""):
        return FormField(chart, degree, components, name=name)


def form_from_matrix(chart, M, name="") -> FormField:
    """Degree-2 FormField from an antisymmetric component matrix (numbers)."""
    comps = {}
    d = chart.dim
    for j in range(d):
        for k in range(j + 1, d):
            if M[j][k] != 0:
                comps[(j, k)] = M[j][k]
    return FormField(chart, 2, comps, name=name)
