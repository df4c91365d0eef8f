"""Truncated multivariate Taylor jets.

A jet holds every partial derivative of a scalar quantity at a chart point up
to a fixed order (default 3).  Coefficients are stored Taylor-normalized
(coeff_alpha = d^alpha f / alpha!) on a dense, graded-lexicographic multi-index
basis, so that truncated multiplication is a plain convolution driven by a
precomputed scatter table.  Arithmetic broadcasts over arbitrary leading axes,
which is what lets vectors, endomorphism matrices and form components share
one implementation.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import (DimensionMismatch, DivisionNearZero, NegativeArgument,
                     OrderOverflow)

EPS_DIV = 1e-12


@lru_cache(maxsize=None)
def jet_table(dim: int, order: int) -> "JetTable":
    return JetTable(dim, order)


class JetTable:
    """Multi-index bookkeeping shared by all jets of one (dim, order)."""

    def __init__(self, dim: int, order: int):
        if order < 0:
            raise OrderOverflow("negative jet order")
        self.dim = dim
        self.order = order
        idxs = []
        for total in range(order + 1):
            idxs.extend(_monomials(dim, total))
        self.multi_indices = idxs
        self.size = len(idxs)
        self.position = {m: i for i, m in enumerate(idxs)}
        self.factorial = np.array(
            [math.prod(math.factorial(a) for a in m) for m in idxs], dtype=float)

        # scatter matrix for truncated products: prod[..., pair] @ scatter
        ti, tj, tk = [], [], []
        for i, a in enumerate(idxs):
            da = sum(a)
            for j, b in enumerate(idxs):
                if da + sum(b) > order:
                    continue
                c = tuple(x + y for x, y in zip(a, b))
                ti.append(i)
                tj.append(j)
                tk.append(self.position[c])
        self.mul_i = np.array(ti, dtype=np.intp)
        self.mul_j = np.array(tj, dtype=np.intp)
        scatter = np.zeros((len(tk), self.size))
        scatter[np.arange(len(tk)), tk] = 1.0
        self.mul_scatter = scatter

        # per-coordinate derivative gather: (src index, multiplicity)
        self.deriv_src = []
        self.deriv_fac = []
        if order >= 1:
            low = jet_table(dim, order - 1) if order - 1 >= 0 else None
            for i in range(dim):
                src = np.empty(low.size, dtype=np.intp)
                fac = np.empty(low.size)
                for r, m in enumerate(low.multi_indices):
                    up = list(m)
                    up[i] += 1
                    src[r] = self.position[tuple(up)]
                    fac[r] = up[i]
                self.deriv_src.append(src)
                self.deriv_fac.append(fac)


def _monomials(dim, total):
    if dim == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _monomials(dim - 1, total - head):
            yield (head,) + rest


class Jet:
    """Dense truncated Taylor expansion; immutable by convention.

    coeffs has shape (..., table.size); leading axes make this a jet-valued
    array (vector/matrix), and all arithmetic broadcasts over them.
    """

    __slots__ = ("tab", "coeffs", "point")

    def __init__(self, tab: JetTable, coeffs: np.ndarray, point=None):
        self.tab = tab
        self.coeffs = coeffs
        self.point = point

    # --- constructors -----------------------------------------------------
    @staticmethod
    def constant(tab: JetTable, value, point=None, shape=()):
        c = np.zeros(shape + (tab.size,), dtype=complex)
        c[..., 0] = value
        return Jet(tab, c, point)

    @staticmethod
    def coordinate(tab: JetTable, point, i: int):
        c = np.zeros(tab.size, dtype=complex)
        c[0] = point.coords[i]
        if tab.order >= 1:
            e = tuple(1 if k == i else 0 for k in range(tab.dim))
            c[tab.position[e]] = 1.0
        return Jet(tab, c, point)

    # --- basic views --------------------------------------------------------
    @property
    def order(self):
        return self.tab.order

    @property
    def shape(self):
        return self.coeffs.shape[:-1]

    @property
    def value(self):
        return self.coeffs[..., 0]

    def partial(self, alpha) -> np.ndarray:
        """Raw partial derivative d^alpha at the base point."""
        alpha = tuple(alpha)
        pos = self.tab.position[alpha]
        return self.coeffs[..., pos] * self.tab.factorial[pos]

    def partials(self) -> np.ndarray:
        """All raw partial derivatives, multi-index order of the table."""
        return self.coeffs * self.tab.factorial

    def gradient(self) -> np.ndarray:
        """First-order partials as a plain array of length dim."""
        g = np.empty(self.shape + (self.tab.dim,), dtype=complex)
        for i in range(self.tab.dim):
            e = tuple(1 if k == i else 0 for k in range(self.tab.dim))
            g[..., i] = self.coeffs[..., self.tab.position[e]]
        return g

    def __getitem__(self, key):
        return Jet(self.tab, self.coeffs[key], self.point)

    def __len__(self):
        return self.shape[0]

    # --- structure ---------------------------------------------------------
    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderOverflow(f"cannot raise jet order {self.order} -> {order}")
        if order == self.order:
            return self
        low = jet_table(self.tab.dim, order)
        return Jet(low, self.coeffs[..., :low.size], self.point)

    def deriv(self, i: int) -> "Jet":
        """Partial derivative jet; one order lower."""
        if self.order < 1:
            raise OrderOverflow("derivative of an order-0 jet")
        low = jet_table(self.tab.dim, self.order - 1)
        c = self.coeffs[..., self.tab.deriv_src[i]] * self.tab.deriv_fac[i]
        return Jet(low, c, self.point)

    def conj(self):
        return Jet(self.tab, np.conj(self.coeffs), self.point)

    def real_part(self):
        return Jet(self.tab, self.coeffs.real.astype(complex), self.point)

    def imag_part(self):
        return Jet(self.tab, self.coeffs.imag.astype(complex), self.point)

    # --- arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if self.tab.dim != other.tab.dim:
                raise DimensionMismatch("jets of different chart dimension")
            if (self.point is not None and other.point is not None
                    and self.point != other.point):
                raise DimensionMismatch("jets at different base points")
            point = self.point if self.point is not None else other.point
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order), point
        other = Jet.constant(self.tab, other, self.point)
        return self, other, self.point

    def __add__(self, other):
        a, b, pt = self._coerce(other)
        return Jet(a.tab, a.coeffs + b.coeffs, pt)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.tab, -self.coeffs, self.point)

    def __sub__(self, other):
        a, b, pt = self._coerce(other)
        return Jet(a.tab, a.coeffs - b.coeffs, pt)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.tab, self.coeffs * other, self.point)
        a, b, pt = self._coerce(other)
        tab = a.tab
        prod = a.coeffs[..., tab.mul_i] * b.coeffs[..., tab.mul_j]
        return Jet(tab, prod @ tab.mul_scatter, pt)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.tab, self.coeffs / other, self.point)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    # --- analytic compositions ---------------------------------------------
    def _nilpotent(self):
        w = self.coeffs.copy()
        w[..., 0] = 0.0
        return Jet(self.tab, w, self.point)

    def _compose(self, series):
        """Evaluate sum_k series[k] * (self - value)^k, truncated (Horner)."""
        w = self._nilpotent()
        res = Jet.constant(self.tab, series[-1], self.point, shape=self.shape)
        for k in range(len(series) - 2, -1, -1):
            res = res * w
            res = Jet(res.tab, res.coeffs + _value_pad(res, series[k]), res.point)
        return res

    def reciprocal(self, eps: float = EPS_DIV):
        v = self.value
        if np.min(np.abs(v)) < eps:
            raise DivisionNearZero(
                f"jet division with |value| = {np.min(np.abs(v)):.3e} < {eps:.1e}")
        series = [(-1.0) ** k / v ** (k + 1) for k in range(self.order + 1)]
        return self._compose(series)

    def _positive_value(self, what):
        v = self.value
        if np.any(v.real <= 0) or np.any(np.abs(v.imag) > 1e-9 * np.maximum(1.0, np.abs(v.real))):
            raise NegativeArgument(f"{what} of a jet with non-positive value")
        return v.real

    def log(self):
        v = self._positive_value("log")
        series = [np.log(v).astype(complex)]
        for k in range(1, self.order + 1):
            series.append(((-1.0) ** (k - 1) / k / v ** k).astype(complex))
        return self._compose(series)

    def exp(self):
        ev = np.exp(self.value)
        series = [ev / math.factorial(k) for k in range(self.order + 1)]
        return self._compose(series)

    def sqrt(self):
        return self.powr(0.5)

    def powr(self, r: float):
        """Real power; requires a positive value."""
        v = self._positive_value(f"power {r}")
        series = []
        c = 1.0
        for k in range(self.order + 1):
            series.append((c * v ** (r - k)).astype(complex))
            c *= (r - k) / (k + 1)
        return self._compose(series)

    def powi(self, n: int):
        """Integer power by repeated squaring; valid for any value."""
        if n < 0:
            return self.reciprocal().powi(-n)
        res = Jet.constant(self.tab, 1.0, self.point, shape=self.shape)
        base = self
        while n:
            if n & 1:
                res = res * base
            base = base * base
            n >>= 1
        return res

    def __pow__(self, e):
        if isinstance(e, int) or (isinstance(e, float) and float(e).is_integer()):
            return self.powi(int(e))
        return self.powr(float(e))

    # --- misc ---------------------------------------------------------------
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape}, value={self.value})"


def _value_pad(jet, value):
    pad = np.zeros_like(jet.coeffs)
    pad[..., 0] = value
    return pad


# --- jet-array helpers --------------------------------------------------------

def jstack(jets, point=None):
    """Stack scalar-or-array jets along a new leading axis."""
    tab = jets[0].tab
    order = min(j.order for j in jets)
    arr = np.stack([j.truncate(order).coeffs for j in jets])
    pt = point
    for j in jets:
        if j.point is not None:
            pt = j.point
            break
    return Jet(jet_table(tab.dim, order), arr, pt)


def jzeros(tab, shape, point=None):
    return Jet(tab, np.zeros(shape + (tab.size,), dtype=complex), point)


def jmatvec(A: Jet, v: Jet) -> Jet:
    """(m,n)-jet-matrix times (n,)-jet-vector."""
    a, b, pt = A._coerce(v)
    tab = a.tab
    pairs = a.coeffs[:, :, tab.mul_i] * b.coeffs[None, :, tab.mul_j]
    return Jet(tab, pairs.sum(axis=1) @ tab.mul_scatter, pt)


def jmatmul(A: Jet, B: Jet) -> Jet:
    """(m,k)-jet-matrix times (k,n)-jet-matrix."""
    a, b, pt = A._coerce(B)
    tab = a.tab
    pairs = np.einsum("mkp,knp->mnp", a.coeffs[:, :, tab.mul_i],
                      b.coeffs[:, :, tab.mul_j])
    return Jet(tab, pairs @ tab.mul_scatter, pt)


def jdot(u: Jet, v: Jet) -> Jet:
    """Plain bilinear contraction of two jet-vectors (no conjugation)."""
    a, b, pt = u._coerce(v)
    tab = a.tab
    pairs = a.coeffs[:, tab.mul_i] * b.coeffs[:, tab.mul_j]
    return Jet(tab, pairs.sum(axis=0) @ tab.mul_scatter, pt)


def jmat_inverse(A: Jet, eps: float = EPS_DIV) -> Jet:
    """Inverse of a square jet-matrix by Gauss-Jordan with value pivoting."""
    n = A.shape[0]
    tab = A.tab
    M = [[A[i, j] for j in range(n)] for i in range(n)]
    E = [[Jet.constant(tab, 1.0 if i == j else 0.0, A.point) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col].value))
        if abs(M[piv][col].value) < eps:
            raise DivisionNearZero("singular jet matrix")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            E[col], E[piv] = E[piv], E[col]
        inv = M[col][col].reciprocal(eps)
        M[col] = [inv * x for x in M[col]]
        E[col] = [inv * x for x in E[col]]
        for r in range(n):
            if r == col:
                continue
            factor = M[r][col]
            if factor.max_abs() == 0.0:
                continue
            M[r] = [M[r][j] - factor * M[col][j] for j in range(n)]
            E[r] = [E[r][j] - factor * E[col][j] for j in range(n)]
    rows = [jstack(row) for row in E]
    return jstack(rows, point=A.point)


def jdet(A: Jet) -> Jet:
    """Determinant of a small square jet-matrix (cofactor expansion)."""
    n = A.shape[0]
    if n == 1:
        return A[0, 0]
    if n == 2:
        return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    acc = None
    for j in range(n):
        minor_rows = []
        for r in range(1, n):
            cols = [A[r, c] for c in range(n) if c != j]
            minor_rows.append(jstack(cols))
        term = A[0, j] * jdet(jstack(minor_rows, point=A.point))
        if j % 2 == 1:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def fd_partial(field_jet, point, alpha, step: float = 1e-5):
    """Finite-difference oracle for d^alpha, chained over derivative orders.

    Order-k partials are central differences of order-(k-1) partials, so the
    step-1e-5 stencil stays within ~1e-10 relative error instead of the ~1e-5
    roundoff floor a second-order stencil on raw values would have.
    `field_jet(point, order) -> Jet`.
    """
    total = sum(alpha)
    if total == 0:
        return field_jet(point, 0).value
    i = next(k for k, a in enumerate(alpha) if a > 0)
    beta = tuple(a - (1 if k == i else 0) for k, a in enumerate(alpha))

    def lower(pt):
        return field_jet(pt, total - 1).partial(beta)

    cp = point.coords.copy(); cp[i] += step
    cm = point.coords.copy(); cm[i] -= step
    chart = point.chart
    return (lower(Point(chart, cp)) - lower(Point(chart, cm))) / (2 * step)


def finite_difference(func, point, alpha, step: float = 1e-5):
    """Central finite-difference oracle for d^alpha func at a point (|alpha|<=2)."""
    total = sum(alpha)
    coords = point.coords
    chart = point.chart

    def f(c):
        return func(Point(chart, c)) if not isinstance(c, Point) else func(c)

    if total == 0:
        return f(coords)
    if total == 1:
        i = alpha.index(1)
        cp = coords.copy(); cp[i] += step
        cm = coords.copy(); cm[i] -= step
        return (f(cp) - f(cm)) / (2 * step)
    if total == 2:
        nz = [i for i, a in enumerate(alpha) for _ in range(a)]
        i, j = nz
        if i == j:
            cp = coords.copy(); cp[i] += step
            cm = coords.copy(); cm[i] -= step
            return (f(cp) - 2 * f(coords) + f(cm)) / step ** 2
        cpp = coords.copy(); cpp[i] += step; cpp[j] += step
        cpm = coords.copy(); cpm[i] += step; cpm[j] -= step
        cmp_ = coords.copy(); cmp_[i] -= step; cmp_[j] += step
        cmm = coords.copy(); cmm[i] -= step; cmm[j] -= step
        return (f(cpp) - f(cpm) - f(cmp_) + f(cmm)) / (4 * step ** 2)
    raise ValueError("finite differences implemented for |alpha| <= 2")


from .chart import Point  # noqa: E402  (cycle-free: chart does not import jets)
