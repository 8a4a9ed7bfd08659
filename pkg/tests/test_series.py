import pytest

from qclaw.quiver import a2, kronecker
from qclaw.scalars import ONE, Scalar, V
from qclaw.series import (AffineSeries, NonCommutingSupport, adams_series, form_of, pleth_exp,
                          pleth_log, qdilog)

A = form_of(a2())


def mono(d, c=ONE, cap=8):
    return AffineSeries.monomial(A, d, cap, c)


def test_affine_twist():
    # Y^(1,0) Y^(0,1) = q Y^(0,1) Y^(1,0)
    left = mono((1, 0)) * mono((0, 1))
    right = mono((0, 1)) * mono((1, 0))
    assert left.coefficient((1, 1)) == V
    assert right.coefficient((1, 1)) == Scalar({-1: 1})


def test_dilogarithm_coefficients():
    E = qdilog(A, (1, 0), cap=3, window=12)
    assert E.coefficient((1, 0)).agrees(Scalar({1: 1, 3: 1, 5: 1, 7: 1, 9: 1, 11: 1}))
    assert E.coefficient((1, 0)).prec == 13
    # v^4 / ((1 - v^2)(1 - v^4))
    assert E.coefficient((2, 0)).agrees(Scalar({4: 1, 6: 1, 8: 2, 10: 2, 12: 3, 14: 3}))


def test_dilogarithm_routes_agree():
    for d in [(1, 0), (0, 1), (1, 1)]:
        a = qdilog(A, d, cap=6, window=16)
        b = qdilog(A, d, cap=6, window=16, method="pleth")
        assert a.agrees(b)


def test_dilogarithm_inverse():
    E = qdilog(A, (1, 1), cap=6)
    assert (E * qdilog(A, (1, 1), -1, cap=6)).agrees(AffineSeries.one(A, 6))


def test_pleth_exp_signed_convention():
    # EXP(v Y) = 1 + v Y, EXP(Y) = 1/(1 - Y)
    assert pleth_exp(mono((1, 0), V)).items() == [((0, 0), ONE), ((1, 0), V)]
    geo = pleth_exp(mono((0, 1), ONE, cap=5))
    assert all(geo.coefficient((0, k)) == ONE for k in range(6))


def test_pleth_routes_and_log_round_trip():
    f = mono((1, 0), Scalar({-1: 2, 2: -1}), cap=6) + mono((2, 0), Scalar({1: 3}), cap=6)
    a, b = pleth_exp(f), pleth_exp(f, method="adams")
    assert a.agrees(b)
    assert pleth_log(a).agrees(f)


def test_pleth_needs_commuting_support():
    with pytest.raises(NonCommutingSupport):
        pleth_exp(mono((1, 0)) + mono((0, 1)))


def test_adams_series_scales_degrees():
    f = adams_series(mono((1, 0), V, cap=4), 2)
    assert f.items() == [((2, 0), Scalar({2: -1}))]


def test_series_inverse_is_two_sided():
    Ak = form_of(kronecker(2))
    s = AffineSeries(Ak, {(0, 0): ONE, (1, 0): V, (0, 1): Scalar({0: 2}), (1, 1): Scalar({-3: 1})}, 5)
    one = AffineSeries.one(Ak, 5)
    assert (s * s.inverse()).agrees(one) and (s.inverse() * s).agrees(one)
