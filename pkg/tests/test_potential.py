import itertools
from fractions import Fraction

import pytest

from qclaw.potential import (canonical, cyclic_derivative, enumerate_cycles, has_two_cycles,
                             make_qp, nondegenerate_along, premutate, qp_from_quiver, qp_mutate,
                             random_potential, reduce_qp, three_cycle_qp)
from qclaw.quiver import IceQuiver, a2, kronecker, mutate_quiver, mutate_sequence, three_cycle

A, B, C = 0, 1, 2  # a: 1->2, b: 2->3, c: 3->1


def test_canonical_rotation():
    assert canonical((2, 0, 1)) == (0, 1, 2)
    assert canonical((1, 0, 1, 0)) == (0, 1, 0, 1)


def test_words_must_be_cycles():
    with pytest.raises(ValueError):
        make_qp(3, 3, [(1, 2), (2, 3), (3, 1)], {(A, B, C): 1})


def test_cyclic_derivative_of_three_cycle():
    qp = three_cycle_qp()
    assert cyclic_derivative(qp, A) == {(C, B): 1}
    assert cyclic_derivative(qp, B) == {(A, C): 1}
    with pytest.raises(ValueError):
        cyclic_derivative(qp, 7)


def test_cyclic_derivative_counts_occurrences():
    qp = make_qp(2, 2, [(1, 2), (2, 1)], {(0, 1, 0, 1): 1})
    assert cyclic_derivative(qp, 0) == {(1, 0, 1): 2}


def test_cyclic_derivative_is_linear():
    arrows = [(1, 2), (2, 3), (3, 1)]
    w1 = make_qp(3, 3, arrows, {(C, B, A): 2})
    w2 = make_qp(3, 3, arrows, {(C, B, A, C, B, A): Fraction(1, 3)})
    both = make_qp(3, 3, arrows, {(C, B, A): 2, (C, B, A, C, B, A): Fraction(1, 3)})
    d1, d2 = cyclic_derivative(w1, A), cyclic_derivative(w2, A)
    total = {k: d1.get(k, 0) + d2.get(k, 0) for k in set(d1) | set(d2)}
    assert cyclic_derivative(both, A) == total


def test_premutation_of_three_cycle():
    pm = premutate(three_cycle_qp(), 1)
    assert sorted(zip(pm.names, pm.arrows)) == sorted(
        [("b", (2, 3)), ("c*", (1, 3)), ("a*", (2, 1)), ("[ac]", (3, 2))])
    assert pm.describe() == "b([ac]) + (c*)(a*)([ac])"
    assert pm.quiver().num_arrows() == 3 + 1


def test_premutation_with_zero_potential_on_acyclic_quiver():
    qp = qp_from_quiver(IceQuiver.build(3, 3, [(1, 2), (2, 3)]))
    pm = premutate(qp, 2)
    assert len(pm.terms) == 1 and len(pm.terms[0][0]) == 3
    assert premutate(qp_from_quiver(a2()), 1).terms == ()


def test_reduction_of_premutated_three_cycle():
    red = reduce_qp(premutate(three_cycle_qp(), 1))
    assert red.quiver() == IceQuiver.build(3, 3, [(2, 1), (1, 3)])
    assert red.terms == () and not red.truncated


def test_reduction_is_idempotent():
    red = reduce_qp(premutate(three_cycle_qp(), 1))
    assert reduce_qp(red) == red


def test_qp_mutation_worked_example():
    res = qp_mutate(three_cycle_qp(), 1)
    assert res.quiver() == IceQuiver.build(3, 3, [(2, 1), (1, 3)])
    assert res.potential == {}


def test_nondegeneracy_examples():
    assert nondegenerate_along(three_cycle_qp(), (1,)).ok
    tr = nondegenerate_along(qp_from_quiver(three_cycle()), (1,))
    assert not tr.ok and tr.failed_at == 0
    assert has_two_cycles(tr.steps[0][1].quiver())
    for seq in itertools.product((1, 2), repeat=4):
        assert nondegenerate_along(qp_from_quiver(kronecker(2)), seq).ok


def test_nondegenerate_steps_follow_quiver_mutation():
    qp = three_cycle_qp()
    for seq in itertools.product((1, 2, 3), repeat=3):
        tr = nondegenerate_along(qp, seq)
        assert tr.ok
        assert tr.steps[-1][1].quiver() == mutate_sequence(three_cycle(), seq)


def test_double_mutation_returns_the_quiver():
    q = IceQuiver.build(4, 4, [(1, 2), (2, 3), (3, 1), (3, 4), (4, 2)])
    qp = random_potential(q, 4, rng_seed=11)
    checked = 0
    for s in range(1, 5):
        once = qp_mutate(qp, s)
        if has_two_cycles(once.quiver()):
            continue
        twice = qp_mutate(once, s)
        assert twice.quiver() == q
        checked += 1
    assert checked >= 2


def test_scaled_potential_mutates_like_the_unit_potential():
    arrows = [(1, 2), (2, 3), (3, 1)]
    res = qp_mutate(make_qp(3, 3, arrows, {(C, B, A): 2}), 1)
    assert res.quiver() == mutate_quiver(three_cycle(), 1) and res.terms == ()


def test_reduction_with_non_unit_quadratic_coefficient():
    # x: 1->2 and y: 2->1 pair up with coefficient 2; x also lies on a triangle
    arrows = [(1, 2), (2, 1), (2, 3), (3, 1)]
    qp = make_qp(3, 3, arrows, {(0, 1): 2, (3, 2, 0): 1, (0, 1, 0, 1): 1})
    red = reduce_qp(qp)
    assert red.arrows == ((2, 3), (3, 1))
    assert red.terms == ()


def test_truncation_is_recorded():
    arrows = [(1, 2), (2, 3), (3, 1)]
    qp = make_qp(3, 3, arrows, {(C, B, A): 1, (C, B, A, C, B, A, C, B, A): 1}, order=8)
    assert qp.truncated and len(qp.terms) == 1


def test_random_potential():
    assert random_potential(a2(), 4, 0).terms == ()
    p = random_potential(three_cycle(), 3, 5)
    assert all(w == (A, C, B) for w, _ in p.terms)
    assert all(c in (-2, -1, 1, 2) for _, c in p.terms)
    assert random_potential(three_cycle(), 6, 5) == random_potential(three_cycle(), 6, 5)
    with pytest.raises(ValueError):
        random_potential(three_cycle(), 2, 0)


def test_cycle_enumeration():
    cyc = enumerate_cycles(three_cycle().arrow_list(), 6, 3)
    assert cyc == [(0, 2, 1), (0, 2, 1, 0, 2, 1)]
