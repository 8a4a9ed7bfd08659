from qclaw.lefschetz import is_unimodal_symmetric, lefschetz_decompose, parity
from qclaw.scalars import Scalar, quantum_integer


def test_sum_of_quantum_integers():
    x = quantum_integer(1) + quantum_integer(3) * 2
    res = lefschetz_decompose(x)
    assert res.ok and res.multiplicities == {3: 2, 1: 1}
    assert res.reconstruct() == x


def test_non_lefschetz_inputs():
    assert not lefschetz_decompose(Scalar({-2: 1, 2: 1})).ok
    assert not lefschetz_decompose(Scalar({0: -1})).ok
    assert not lefschetz_decompose(Scalar({1: 1})).ok


def test_parity():
    assert parity(Scalar({-1: 1, 3: 2})) == "odd"
    assert parity(Scalar({0: 1, 2: 1})) == "even"
    assert parity(Scalar({0: 1, 1: 1})) is None
    assert parity(Scalar()) == "zero"


def test_unimodality():
    assert is_unimodal_symmetric(Scalar({-2: 1, 0: 2, 2: 1}))
    assert not is_unimodal_symmetric(Scalar({-2: 2, 0: 1, 2: 2}))
    assert not is_unimodal_symmetric(Scalar({-2: 1, 2: 1}))
