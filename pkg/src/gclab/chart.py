"""Chart domains, points and sample plans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainViolation


class Chart:
    """A coordinate chart: named real coordinates plus a jet-order budget.

    Toric charts order coordinates (t1..tn, mu1..mun).  The chart owns no
    domain; domains are predicates attached by scenarios and potentials.
    """

    def __init__(self, names, max_order: int = 3):
        self.names = tuple(names)
        self.dim = len(self.names)
        self.max_order = int(max_order)
        self._index = {n: i for i, n in enumerate(self.names)}

    def coord_index(self, name: str) -> int:
        return self._index[name]

    def point(self, coords) -> "Point":
        return Point(self, np.asarray(coords, dtype=float))

    def __repr__(self):
        return f"Chart({','.join(self.names)}; max_order={self.max_order})"


def toric_chart(n: int, max_order: int = 3) -> Chart:
    names = [f"t{i + 1}" for i in range(n)] + [f"mu{i + 1}" for i in range(n)]
    return Chart(names, max_order=max_order)


def flat_chart(n: int, max_order: int = 3) -> Chart:
    """Chart of C^n with real coordinates (x1, y1, .., xn, yn)."""
    names = []
    for i in range(n):
        names += [f"x{i + 1}", f"y{i + 1}"]
    return Chart(names, max_order=max_order)


class Point:
    """A chart point.  Hashable on its coordinate bytes, used as cache key."""

    __slots__ = ("chart", "coords", "_key")

    def __init__(self, chart: Chart, coords: np.ndarray):
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (chart.dim,):
            raise DimensionMismatch(
                f"point of dimension {coords.shape} on chart of dim {chart.dim}")
        if not np.all(np.isfinite(coords)):
            raise DomainViolation("non-finite point coordinates")
        self.chart = chart
        self.coords = coords
        self._key = (id(chart), coords.tobytes())

    def __getitem__(self, i):
        return self.coords[i]

    def __hash__(self):
        return hash(self._key)

    def __eq__(self, other):
        return isinstance(other, Point) and self._key == other._key

    def __repr__(self):
        vals = ", ".join(f"{n}={v:.4g}" for n, v in zip(self.chart.names, self.coords))
        return f"Point({vals})"

    def tolist(self):
        return [float(v) for v in self.coords]


@dataclass
class SamplePlan:
    """A finite list of evaluation points plus the seed that produced it."""

    points: list
    seed: int = 0
    meta: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def box_plan(chart: Chart, lows, highs, count: int, seed: int = 0) -> SamplePlan:
    """Uniform random points in an axis-aligned box."""
    rng = np.random.default_rng(seed)
    lows = np.asarray(lows, float)
    highs = np.asarray(highs, float)
    pts = [Point(chart, lows + rng.random(chart.dim) * (highs - lows))
           for _ in range(count)]
    return SamplePlan(pts, seed=seed, meta={"kind": "box", "count": count})


def grid_plan(chart: Chart, axes_values) -> SamplePlan:
    """Cartesian product plan; axes_values[i] lists the values of coordinate i."""
    pts = []
    idx = [0] * chart.dim

    def rec(k, acc):
        if k == chart.dim:
            pts.append(Point(chart, np.array(acc)))
            return
        for v in axes_values[k]:
            rec(k + 1, acc + [float(v)])

    rec(0, [])
    return SamplePlan(pts, meta={"kind": "grid"})


def annulus_plan(chart: Chart, n_factors: int, r_lo: float, r_hi: float,
                 count: int, seed: int = 0) -> SamplePlan:
    """Random points of C^n with each factor radius in [r_lo, r_hi].

    Keeps every z_i away from 0 so radial/angular frame fields stay regular.
    """
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        coords = []
        for _ in range(n_factors):
            r = r_lo + rng.random() * (r_hi - r_lo)
            th = rng.random() * 2.0 * math.pi
            coords += [r * math.cos(th), r * math.sin(th)]
        pts.append(Point(chart, np.array(coords)))
    return SamplePlan(pts, seed=seed, meta={"kind": "annulus", "count": count})


def toric_interior_plan(chart: Chart, n: int, mu_box, count_mu: int,
                        n_fibers: int = 3, seed: int = 0, shrink: float = 0.10,
                        domain=None) -> SamplePlan:
    """Grid over the moment box (shrunk from its faces) times random t-fibers.

    mu_box is a list of (lo, hi) per moment coordinate; `domain`, when given,
    filters grid nodes through the potential's domain predicate.
    """
    rng = np.random.default_rng(seed)
    axes = []
    for lo, hi in mu_box:
        margin = shrink * (hi - lo)
        axes.append(np.linspace(lo + margin, hi - margin, count_mu))
    mu_nodes = []

    def rec(k, acc):
        if k == n:
            mu_nodes.append(list(acc))
            return
        for v in axes[k]:
            rec(k + 1, acc + [v])

    rec(0, [])
    pts = []
    for mu in mu_nodes:
        full_probe = np.array([0.0] * n + mu)
        if domain is not None and not domain(Point(chart, full_probe)):
            continue
        for _ in range(n_fibers):
            ts = rng.random(n) * 2.0 * math.pi
            pts.append(Point(chart, np.concatenate([ts, np.array(mu)])))
    return SamplePlan(pts, seed=seed, meta={"kind": "toric", "fibers": n_fibers})
