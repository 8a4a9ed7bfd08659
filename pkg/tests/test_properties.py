import itertools

from hypothesis import HealthCheck, given, settings, strategies as st

from qclaw.dt import Stability, cg_along, hn_factorize, parity_defects, recompose
from qclaw.quiver import (IceQuiver, a2, b_matrix, fz_mutate_matrix, kronecker, mutate_quiver,
                          mutate_sequence, three_cycle)
from qclaw.scalars import Scalar
from qclaw.seed import initial_seed, mutate_seed_sequence, quantize, seed_vars_bar_invariant
from qclaw.series import AffineSeries, form_of

SLOW = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def quivers(draw, max_n=4, max_mult=2, all_principal=False):
    n = draw(st.integers(2, max_n))
    m = n if all_principal else draw(st.integers(1, n))
    counts = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if i > m:
                continue
            c = draw(st.integers(-max_mult, max_mult))
            if c > 0:
                counts[(i, j)] = c
            elif c < 0:
                counts[(j, i)] = -c
    return IceQuiver.from_counts(n, m, counts)


def sequences(q, max_len):
    return st.lists(st.integers(1, q.m), max_size=max_len).map(tuple)


@SLOW
@given(st.data())
def test_quiver_mutation_matches_matrix_mutation(data):
    q = data.draw(quivers())
    k = data.draw(st.integers(1, q.m))
    assert b_matrix(mutate_quiver(q, k)) == fz_mutate_matrix(b_matrix(q), k)


@SLOW
@given(st.data())
def test_mutation_is_an_involution(data):
    q = data.draw(quivers())
    k = data.draw(st.integers(1, q.m))
    assert mutate_quiver(mutate_quiver(q, k), k) == q


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_seed_mutation_keeps_compatibility_and_bar_invariance(data):
    base = data.draw(quivers(max_n=3, max_mult=1, all_principal=True))
    q, L = quantize(base)
    seq = data.draw(sequences(q, 3))
    s = mutate_seed_sequence(initial_seed(q, L), seq)   # raises if compatibility is lost
    assert seed_vars_bar_invariant(s)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_sign_coherence_and_parity_on_random_quivers(data):
    q = data.draw(quivers(max_n=3, all_principal=True))
    seq = data.draw(sequences(q, 6))
    cg = cg_along(q, seq)   # raises on a mixed-sign c-vector
    assert parity_defects(q, cg) == []
    assert b_matrix(cg.quiver) == b_matrix(mutate_sequence(q, seq))


def test_sign_coherence_on_all_short_sequences():
    for q in (a2(), kronecker(2), three_cycle()):
        for k in range(7):
            for seq in itertools.product(range(1, q.m + 1), repeat=k):
                cg_along(q, seq)


laurent = st.dictionaries(st.integers(-3, 3), st.integers(-3, 3), max_size=3).map(Scalar)


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda d: 0 < sum(d) <= 4),
                       laurent, max_size=6),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
       st.tuples(st.integers(1, 3), st.integers(1, 3)))
def test_hn_factors_recompose(terms, re, im):
    A = form_of(a2())
    T = AffineSeries(A, {(0, 0): Scalar({0: 1}), **terms}, 4)
    z = Stability(re, im)
    assert recompose(hn_factorize(T, z)).agrees(T)
