import pytest

from qclaw.embedding import IncompatiblePair, check_compatibility, conjugate, iota
from qclaw.quiver import a2, b_matrix
from qclaw.scalars import ONE
from qclaw.seed import quantize
from qclaw.series import AffineSeries, form_of, qdilog
from qclaw.torus import TorusElement


def test_compatibility_check():
    check_compatibility(b_matrix(a2()), [[0, 1], [-1, 0]])
    with pytest.raises(IncompatiblePair):
        check_compatibility(b_matrix(a2()), [[0, -1], [1, 0]])


def test_iota_is_multiplicative():
    q, L = quantize(a2())
    B = b_matrix(q)
    A = form_of(a2())
    f = AffineSeries(A, {(0, 0): ONE, (1, 0): ONE, (1, 1): ONE}, 4)
    g = AffineSeries(A, {(0, 1): ONE, (2, 0): ONE}, 4)
    lhs = iota(B, L, f * g).to_element()
    rhs = (iota(B, L, f) * iota(B, L, g)).to_element()
    assert lhs == rhs


def test_iota_of_a_monomial():
    q, L = quantize(a2())
    img = iota(b_matrix(q), L, AffineSeries.monomial(form_of(a2()), (1, 0), 3)).to_element()
    # -B e_1 with B e_1 = (0, -1, 1, 0) (first column of the exchange matrix)
    assert img == TorusElement.monomial(L, (0, 1, -1, 0))


def test_conjugation_by_a_dilogarithm_is_finite():
    q, L = quantize(a2())
    B = b_matrix(q)
    E = iota(B, L, qdilog(form_of(a2()), (1, 0), cap=6))
    res = conjugate(E, (1, 0, 0, 0), 6)
    # Lambda(e_1, iota(Y^(1,0))) = 1, so E u E^-1 = u (1 + v^-1 y) = X^h + X^(h + w)
    el = res.to_element()
    assert el.coefficient((1, 0, 0, 0)).agrees(ONE)
    assert el.coefficient((1, 1, -1, 0)).agrees(ONE)
    assert all(c.is_zero() for e, c in el.items() if e not in {(1, 0, 0, 0), (1, 1, -1, 0)})
