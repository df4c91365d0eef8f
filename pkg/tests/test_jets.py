import math

import numpy as np
import pytest

from gclab.chart import Chart, toric_chart
from gclab.errors import DivisionNearZero, NegativeArgument, OrderOverflow
from gclab import fields
from gclab.jets import Jet, fd_partial, jdet, jmat_inverse, jmatmul, jstack, jet_table


MU1 = 1  # index of mu1 on the n=1 toric chart (t1, mu1)


def mu_field():
    return fields.coord(MU1)


def test_mu_log_mu_at_one():
    ch = toric_chart(1)
    f = mu_field() * fields.log(mu_field())
    j = f.jet(ch.point([0.0, 1.0]), 2)
    assert j.value == pytest.approx(0.0, abs=1e-15)
    assert j.partial((0, 1)) == pytest.approx(1.0, abs=1e-14)
    assert j.partial((0, 2)) == pytest.approx(1.0, abs=1e-14)


def test_mu_log_mu_at_two():
    ch = toric_chart(1)
    f = mu_field() * fields.log(mu_field())
    j = f.jet(ch.point([0.0, 2.0]), 2)
    assert j.value == pytest.approx(2 * math.log(2), rel=1e-14)
    assert j.partial((0, 1)) == pytest.approx(math.log(2) + 1, rel=1e-14)
    assert j.partial((0, 2)) == pytest.approx(0.5, rel=1e-14)


def test_constant_field_all_partials_vanish():
    ch = toric_chart(2)
    j = fields.const(5.0).jet(ch.point([0.1, 0.2, 0.3, 0.4]), 3)
    assert j.value == 5.0
    assert np.allclose(j.coeffs[1:], 0.0)


def test_mul_square():
    ch = toric_chart(1)
    j = fields.coord(MU1).jet(ch.point([0.0, 3.0]), 2)
    sq = j * j
    assert sq.value == pytest.approx(9.0)
    assert sq.partial((0, 1)) == pytest.approx(6.0)
    assert sq.partial((0, 2)) == pytest.approx(2.0)


def test_reciprocal_series():
    ch = toric_chart(1)
    j = fields.coord(MU1).jet(ch.point([0.0, 2.0]), 2)
    r = 1.0 / j
    assert r.value == pytest.approx(0.5)
    assert r.partial((0, 1)) == pytest.approx(-0.25)
    assert r.partial((0, 2)) == pytest.approx(0.25)


def test_log_series_at_one():
    ch = toric_chart(1)
    j = fields.coord(MU1).jet(ch.point([0.0, 1.0]), 2)
    lj = j.log()
    assert lj.value == pytest.approx(0.0, abs=1e-15)
    assert lj.partial((0, 1)) == pytest.approx(1.0)
    assert lj.partial((0, 2)) == pytest.approx(-1.0)


def test_division_near_zero_guard():
    ch = toric_chart(1)
    j = fields.coord(MU1).jet(ch.point([0.0, 1e-15]), 2)
    with pytest.raises(DivisionNearZero):
        (1.0 / j)


def test_log_negative_guard():
    ch = toric_chart(1)
    j = fields.coord(MU1).jet(ch.point([0.0, -2.0]), 2)
    with pytest.raises(NegativeArgument):
        j.log()


def test_order_overflow():
    ch = toric_chart(1, max_order=3)
    with pytest.raises(OrderOverflow):
        mu_field().jet(ch.point([0.0, 1.0]), 4)
    f = mu_field().deriv(MU1).deriv(MU1).deriv(MU1)
    with pytest.raises(OrderOverflow):
        f.jet(ch.point([0.0, 1.0]), 1)


@pytest.mark.parametrize("seed", range(4))
def test_leibniz_product_rule(seed):
    # product rule coefficient-wise, exact to 1e-14 relative
    rng = np.random.default_rng(seed)
    tab = jet_table(3, 3)
    pa = rng.standard_normal(tab.size) + 1j * rng.standard_normal(tab.size)
    pb = rng.standard_normal(tab.size) + 1j * rng.standard_normal(tab.size)
    a, b = Jet(tab, pa), Jet(tab, pb)
    prod = a * b
    for i in range(3):
        lhs = prod.deriv(i)
        rhs = a.deriv(i) * b.truncate(2) + a.truncate(2) * b.deriv(i)
        scale = max(1.0, lhs.max_abs())
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-14 * scale


def test_evaluation_purity():
    ch = toric_chart(2)
    f = fields.exp(fields.coord(2)) * fields.log(fields.coord(3))
    p = ch.point([0.3, -0.1, 0.7, 2.0])
    j1 = f.jet(p, 3)
    j2 = f.jet(ch.point([0.3, -0.1, 0.7, 2.0]), 3)
    assert np.array_equal(j1.coeffs, j2.coeffs)


def composed_test_fields(chart):
    c = fields.coord
    fs = [
        c(0) * c(1) + fields.const(2.0),
        fields.exp(c(0) * 0.3) * c(1),
        fields.log(c(2) + 3.0) / (c(3) + 2.5),
        fields.sqrt(c(2) * c(2) + c(3) * c(3) + 1.0),
        (c(0) + c(1) * c(2)) ** 3,
        (c(2) + 2.0) ** -1.5,
    ]
    return fs


@pytest.mark.parametrize("fi", range(6))
def test_jets_match_finite_differences(fi):
    ch = Chart(["a", "b", "c", "d"])
    f = composed_test_fields(ch)[fi]
    rng = np.random.default_rng(11 + fi)
    for _ in range(4):
        p = ch.point(rng.uniform(0.2, 0.9, size=4))
        j = f.jet(p, 2)
        for alpha in jet_table(4, 2).multi_indices:
            fd = fd_partial(f.jet, p, alpha)
            ex = j.partial(alpha)
            assert abs(ex - fd) <= 1e-6 * max(1.0, abs(fd))


def test_jmat_inverse_and_det():
    rng = np.random.default_rng(3)
    tab = jet_table(2, 2)
    rows = []
    for i in range(3):
        row = [Jet(tab, rng.standard_normal(tab.size) + (3.0 if i == j else 0.0) * np.eye(tab.size)[0])
               for j in range(3)]
        rows.append(jstack(row))
    A = jstack(rows)
    Ainv = jmat_inverse(A)
    I = jmatmul(A, Ainv)
    expect = np.zeros_like(I.coeffs)
    expect[np.arange(3), np.arange(3), 0] = 1.0
    assert np.max(np.abs(I.coeffs - expect)) < 1e-12
    d = jdet(A)
    dinv = jdet(Ainv)
    assert np.max(np.abs((d * dinv).coeffs - Jet.constant(tab, 1.0).coeffs)) < 1e-12
