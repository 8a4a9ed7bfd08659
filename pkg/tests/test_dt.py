import itertools

import pytest

from qclaw.dt import (RIGHT_ANGLE, CapInsufficient, DegenerateSequence, NotStabilized, Phase,
                      Stability, cg_along, cluster_via_dt, degenerate_stability, dilog_product,
                      dt_extract, dt_invariants, duality_defects, hn_factorize, is_generic,
                      make_stability, no_exotics_check, parity_defects, product_up_to, psi,
                      recompose, slope, stack_ic_series, stabilizing_cluster_via_dt)
from qclaw.potential import three_cycle_qp
from qclaw.quiver import IceQuiver, a2, kronecker, three_cycle
from qclaw.scalars import ONE, Scalar
from qclaw.seed import cluster_monomial, initial_seed, mutate_seed_sequence, quantize
from qclaw.series import AffineSeries, form_of, qdilog
from qclaw.torus import TorusElement

ZETA = Stability((1, 0), (1, 1))   # phases pi/4 and pi/2
ZETA_REV = Stability((0, 1), (1, 1))
A = form_of(a2())


def E(d, sign=1, cap=8):
    return qdilog(A, d, sign, cap)


# slopes ----------------------------------------------------------------------

def test_slopes():
    deg = degenerate_stability(2)
    assert slope(deg, (1, 0)) == slope(deg, (3, 5))
    assert slope(ZETA, (0, 1)) > slope(ZETA, (1, 0))
    assert slope(ZETA, (2, 4)) == slope(ZETA, (1, 2))
    assert slope(ZETA, (0, 1)) == RIGHT_ANGLE
    with pytest.raises(ValueError):
        slope(ZETA, (0, 0))


def test_stability_must_lie_in_the_upper_half_plane():
    Stability((1,), (0,))
    with pytest.raises(ValueError):
        Stability((-1,), (0,))
    with pytest.raises(ValueError):
        Stability((0,), (-1,))


def test_phase_order_is_by_angle():
    assert Phase(1, 0) < Phase(1, 1) < Phase(0, 1) < Phase(-5, 1)
    assert Phase(2, 2) == Phase(1, 1) and hash(Phase(2, 2)) == hash(Phase(1, 1))


def test_genericity():
    assert is_generic(IceQuiver.build(1, 1, []), Stability((0,), (1,))).ok
    rep = is_generic(a2(), degenerate_stability(2))
    assert not rep.ok and rep.witness == ((0, 1), (1, 0))
    assert is_generic(a2(), ZETA, bound=6).ok


# c- and g-vectors --------------------------------------------------------------

def test_tropical_steps_on_a2():
    cg = cg_along(a2(), (1,))
    assert cg.signs == ("-",) and cg.simples == ((1, 0),)
    assert cg.C == ((-1, 0), (0, 1))
    cg2 = cg_along(a2(), (1, 2))
    assert cg2.simples[1] == (0, 1) and cg2.signs == ("-", "-")
    cg3 = cg_along(a2(), (1, 2, 1))
    assert all(x <= 0 for x in cg3.simples[2]) and cg3.signs[2] == "+"


def test_g_vector_of_first_mutation_is_leading_exponent():
    q, L = quantize(a2())
    cg = cg_along(q, (1,))
    assert cg.G[0] == (-1, 0, 1, 0)


def test_c_vectors_in_the_other_orientation():
    cg = cg_along(a2(), (2, 1))
    assert cg.simples == ((0, 1), (1, 1))


def test_make_stability():
    z, th = make_stability(cg_along(a2(), ()))
    assert z == degenerate_stability(2) and th == RIGHT_ANGLE
    z, th = make_stability(cg_along(a2(), (1,)))
    assert z == Stability((0, -1), (1, 1))
    # the last simple sits on the ray theta, the other one strictly above
    assert slope(z, (1, 0)) == th and slope(z, (0, 1)) > th


def test_psi_inverts_the_c_matrix():
    cg = cg_along(kronecker(2), (1, 2, 1))
    for d in [(1, 0), (0, 1), (2, -3)]:
        e = psi(cg, d)
        assert tuple(sum(e[j] * cg.C[j][i] for j in range(2)) for i in range(2)) == d


def test_duality_and_parity_along_sequences():
    for base in (a2(), kronecker(2), three_cycle()):
        q, L = quantize(base)
        for seq in itertools.product(range(1, base.m + 1), repeat=4):
            assert duality_defects(q, L, cg_along(q, seq)) == []
            assert parity_defects(base, cg_along(base, seq)) == []


# stack series and factorisation ------------------------------------------------

def test_stack_series_of_one_vertex():
    T = stack_ic_series(IceQuiver.build(1, 1, []), cap=3, window=10)
    assert T.coefficient((0,)) == ONE
    # v^4 / ((1 - v^2)(1 - v^4))
    assert T.coefficient((2,)).agrees(Scalar({4: 1, 6: 1, 8: 2, 10: 2, 12: 3}))


def test_stack_series_of_a2_factorises():
    T = stack_ic_series(a2(), 8)
    assert T.agrees(E((0, 1)) * E((1, 0)))
    # coefficient of Y^(1,1): v^chi / (1 - v^2)^2 with chi = 1
    c = T.coefficient((1, 1)).c
    assert [c[2 * k + 1] for k in range(6)] == [1, 2, 3, 4, 5, 6]


def test_hn_factors_in_both_chambers():
    T = stack_ic_series(a2(), 8)
    f1 = [f for f in hn_factorize(T, ZETA) if not f.trivial]
    assert [f.support[0] for f in f1] == [(0, 1), (1, 0)]
    assert f1[0].series.agrees(E((0, 1))) and f1[1].series.agrees(E((1, 0)))
    f2 = [f for f in hn_factorize(T, ZETA_REV) if not f.trivial]
    assert [f.support[0] for f in f2] == [(1, 0), (1, 1), (0, 1)]
    for f, d in zip(f2, [(1, 0), (1, 1), (0, 1)]):
        assert f.series.agrees(E(d))
    assert recompose(hn_factorize(T, ZETA_REV)).agrees(T)


def test_hn_of_a_single_ray():
    S = E((1, 1))
    fs = [f for f in hn_factorize(S, ZETA) if not f.trivial]
    assert len(fs) == 1 and fs[0].series.agrees(S)


def test_hn_needs_unit_constant():
    with pytest.raises(ValueError):
        hn_factorize(AffineSeries(A, {(0, 0): Scalar({0: 2})}, 3), ZETA)


def test_dt_extraction():
    om = dt_extract(E((1, 0)))
    assert om[(1, 0)] == ONE
    assert all(om[(k, 0)] == Scalar() for k in range(2, 9))
    assert dt_extract(AffineSeries.one(A, 5)) == {}


def test_dt_extraction_reports_insufficient_precision():
    with pytest.raises(CapInsufficient):
        dt_extract(qdilog(A, (1, 0), 1, 4, window=1))


def test_dt_invariants_of_a2_and_kronecker():
    assert dt_invariants(a2(), ZETA, 8).nonzero() == {(1, 0): ONE, (0, 1): ONE}
    rec = dt_invariants(a2(), ZETA_REV, 8)
    assert rec.nonzero() == {(1, 0): ONE, (1, 1): ONE, (0, 1): ONE} and rec.ok
    kr = dt_invariants(kronecker(2), ZETA_REV, 6)
    nz = kr.nonzero()
    assert nz[(1, 1)] == Scalar({-1: 1, 1: 1})
    assert all(nz[d] == ONE for d in [(1, 0), (0, 1), (1, 2), (2, 1), (2, 3), (3, 2)])
    assert set(nz) == {(1, 0), (0, 1), (1, 1), (1, 2), (2, 1), (2, 3), (3, 2)}
    assert kr.verdicts[(1, 1)].b == [1, 1] and kr.ok


def test_no_exotics_verdicts():
    assert no_exotics_check(ONE).b == [1]
    assert no_exotics_check(Scalar({-1: 1, 1: 1})).b == [1, 1]
    v = no_exotics_check(Scalar({-2: 1, 2: 1}))
    assert not v.ok and not v.unimodal and v.symmetric
    assert not no_exotics_check(Scalar({0: -1})).ok
    assert no_exotics_check(Scalar({-2: 1, 0: 1, 2: 1})).b == [1, 1, 1]


# dilogarithm products and the cluster formula -----------------------------------

def test_dilog_products():
    assert dilog_product(a2(), (), 6).agrees(AffineSeries.one(A, 6))
    assert dilog_product(a2(), (1,), 6).agrees(E((1, 0), cap=6))
    assert dilog_product(a2(), (1, 2), 6).agrees(E((0, 1), cap=6) * E((1, 0), cap=6))


def test_dilog_product_matches_the_stability_of_the_sequence():
    T = stack_ic_series(a2(), 6)
    for k in range(1, 5):
        for seq in itertools.product((1, 2), repeat=k):
            z, th = make_stability(cg_along(a2(), seq))
            assert product_up_to(hn_factorize(T, z), th).agrees(dilog_product(a2(), seq, 6))


def test_degenerate_sequence_is_refused():
    with pytest.raises(DegenerateSequence):
        dilog_product(three_cycle(), (1,), 4)
    assert dilog_product(three_cycle(), (1,), 4, qp=three_cycle_qp()).coefficient((1, 0, 0)).agrees(
        qdilog(form_of(three_cycle()), (1, 0, 0), 1, 4).coefficient((1, 0, 0)))


def test_cluster_via_dt_examples():
    q, L = quantize(a2())
    f = (1, 0, 2, 1)
    assert cluster_via_dt(q, L, (), f) == TorusElement.monomial(L, f)
    x = cluster_via_dt(q, L, (1,), (1, 0, 0, 0))
    assert x == TorusElement.monomial(L, (-1, 1, 0, 0)) + TorusElement.monomial(L, (-1, 0, 1, 0))


def test_cluster_via_dt_matches_seed_mutation():
    for base in (a2(), kronecker(2)):
        q, L = quantize(base)
        init = initial_seed(q, L)
        for seq in itertools.product((1, 2), repeat=3):
            for f in [(1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 1, 0)]:
                x, _ = stabilizing_cluster_via_dt(q, L, seq, f)
                assert x == cluster_monomial(mutate_seed_sequence(init, seq), f)


def test_literal_product_route_agrees():
    q, L = quantize(a2())
    for seq in [(1, 2), (2, 1, 2)]:
        a = cluster_via_dt(q, L, seq, (1, 1, 0, 0), 8, method="product", window=30)
        assert a == cluster_via_dt(q, L, seq, (1, 1, 0, 0), 8)


def test_three_cycle_needs_a_potential():
    q, L = quantize(three_cycle())
    with pytest.raises(DegenerateSequence):
        cluster_via_dt(q, L, (1,), (1, 0, 0, 0, 0, 0))


def test_unstabilised_cap_is_reported():
    q, L = quantize(kronecker(2))
    with pytest.raises(NotStabilized):
        cluster_via_dt(q, L, (1, 2, 1, 2), (0, 1, 0, 0), cap=2)
