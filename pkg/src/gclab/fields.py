"""Scalar fields as closed expression trees over chart coordinates.

Fields are immutable and pure: evaluating one at the same point twice yields
bit-identical jets (results are memoized per point/order).  The expression
grammar is closed under {+, -, *, /, pow, log, exp, sqrt} plus coordinate
projections and constants, which keeps every jet exact to machine precision.
"""

from __future__ import annotations

import numpy as np

from .chart import Point
from .errors import DomainViolation, OrderOverflow
from .jets import Jet, jet_table


class ScalarField:
    """Base class; subclasses implement _eval(point, order) -> Jet."""

    def __init__(self):
        self._cache = {}

    # -- evaluation ---------------------------------------------------------
    def jet(self, point: Point, order: int) -> Jet:
        if order > point.chart.max_order:
            raise OrderOverflow(
                f"jet order {order} exceeds chart maximum {point.chart.max_order}")
        key = (point._key, order)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._eval(point, order)
            self._cache[key] = hit
        return hit

    def value(self, point: Point) -> complex:
        return complex(self.jet(point, 0).value)

    def _eval(self, point, order):
        raise NotImplementedError

    # -- algebra -------------------------------------------------------------
    def __add__(self, other):
        return _Add(self, as_field(other))

    def __radd__(self, other):
        return _Add(as_field(other), self)

    def __sub__(self, other):
        return _Sub(self, as_field(other))

    def __rsub__(self, other):
        return _Sub(as_field(other), self)

    def __mul__(self, other):
        return _Mul(self, as_field(other))

    def __rmul__(self, other):
        return _Mul(as_field(other), self)

    def __truediv__(self, other):
        return _Div(self, as_field(other))

    def __rtruediv__(self, other):
        return _Div(as_field(other), self)

    def __neg__(self):
        return _Neg(self)

    def __pow__(self, e):
        return _Pow(self, e)

    def deriv(self, i: int) -> "ScalarField":
        return _Deriv(self, i)


class _Const(ScalarField):
    def __init__(self, value):
        super().__init__()
        self.v = complex(value)

    def _eval(self, point, order):
        return Jet.constant(jet_table(point.chart.dim, order), self.v, point)


class _Coord(ScalarField):
    def __init__(self, i, name=None):
        super().__init__()
        self.i = i
        self.name = name

    def _eval(self, point, order):
        i = self.i if self.name is None else point.chart.coord_index(self.name)
        if i >= point.chart.dim:
            raise DomainViolation(f"coordinate {i} on chart of dim {point.chart.dim}")
        return Jet.coordinate(jet_table(point.chart.dim, order), point, i)


class _Add(ScalarField):
    def __init__(self, a, b):
        super().__init__()
        self.a, self.b = a, b

    def _eval(self, p, o):
        return self.a.jet(p, o) + self.b.jet(p, o)


class _Sub(ScalarField):
    def __init__(self, a, b):
        super().__init__()
        self.a, self.b = a, b

    def _eval(self, p, o):
        return self.a.jet(p, o) - self.b.jet(p, o)


class _Mul(ScalarField):
    def __init__(self, a, b):
        super().__init__()
        self.a, self.b = a, b

    def _eval(self, p, o):
        return self.a.jet(p, o) * self.b.jet(p, o)


class _Div(ScalarField):
    def __init__(self, a, b):
        super().__init__()
        self.a, self.b = a, b

    def _eval(self, p, o):
        return self.a.jet(p, o) / self.b.jet(p, o)


class _Neg(ScalarField):
    def __init__(self, a):
        super().__init__()
        self.a = a

    def _eval(self, p, o):
        return -self.a.jet(p, o)


class _Pow(ScalarField):
    def __init__(self, a, e):
        super().__init__()
        self.a, self.e = a, e

    def _eval(self, p, o):
        return self.a.jet(p, o) ** self.e


class _Log(ScalarField):
    def __init__(self, a):
        super().__init__()
        self.a = a

    def _eval(self, p, o):
        return self.a.jet(p, o).log()


class _Exp(ScalarField):
    def __init__(self, a):
        super().__init__()
        self.a = a

    def _eval(self, p, o):
        return self.a.jet(p, o).exp()


class _Sqrt(ScalarField):
    def __init__(self, a):
        super().__init__()
        self.a = a

    def _eval(self, p, o):
        return self.a.jet(p, o).sqrt()


class _Deriv(ScalarField):
    """Derivative field; its order-q jet consumes the base field at q+1."""

    def __init__(self, a, i):
        super().__init__()
        self.a, self.i = a, i

    def _eval(self, p, o):
        return self.a.jet(p, o + 1).deriv(self.i)


class JetField(ScalarField):
    """Scalar field defined by an arbitrary jet evaluator.

    Internal plumbing for derived quantities (pairings of structure data,
    frame coefficients).  Scenario expressions never construct these.
    """

    def __init__(self, fn):
        super().__init__()
        self.fn = fn

    def _eval(self, p, o):
        return self.fn(p, o)


def as_field(x) -> ScalarField:
    if isinstance(x, ScalarField):
        return x
    return _Const(x)


def const(x) -> ScalarField:
    return _Const(x)


def coord(i: int) -> ScalarField:
    return _Coord(i)


def coord_named(name: str) -> ScalarField:
    return _Coord(None, name)


def log(f) -> ScalarField:
    return _Log(as_field(f))


def exp(f) -> ScalarField:
    return _Exp(as_field(f))


def sqrt(f) -> ScalarField:
    return _Sqrt(as_field(f))


ZERO = const(0.0)
ONE = const(1.0)


def eval_jet(field: ScalarField, point: Point, order: int) -> Jet:
    """Evaluate all partials of `field` at `point` up to `order`."""
    return field.jet(point, order)
