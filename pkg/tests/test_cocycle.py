# -*- coding: utf-8 -*-

import math
from fractions import Fraction

import numpy as np
import pytest

from cocycle import STABLE, UNSTABLE, AnchoredPair, SuLoop, SuPath, arithmeticity_classify, \
    bowen_marcus_P, classify_flow, compose_pairs, holder_constant, lattice_fit, lift_su_path, \
    periodic_orbit_sums, reverse_pair, sample_su_loops, shift_pair, su_loop_weight, su_path_weight
from errors import EmptyEvidence, HeightOutOfRange, InvalidAnchors
from potential import Potential, Roof, as_potential
from shift import Point, birkhoff_sum, metric_d, period_and_decomposition, random_point, splice
from thermo import equilibrium_measure

X = Point(('a',), ('b',), ('a',), 0)
Y = Point(('b',), ('b',), ('a',), 0)


def _stable_pair(graph, rng, n=None):
    x = random_point(graph, rng)
    n = int(rng.integers(-3, 4)) if n is None else n
    z = random_point(graph, rng, zero=x[n])
    return AnchoredPair(x, splice(z, x, 0, n), STABLE, (0, n))


def _unstable_pair(graph, rng, n=None):
    x = random_point(graph, rng)
    n = int(rng.integers(-3, 4)) if n is None else n
    z = random_point(graph, rng, zero=x[n])
    return AnchoredPair(x, splice(x, z, n, 0), UNSTABLE, (0, n))


@pytest.fixture
def wide_roof(full_shift):
    return as_potential(full_shift, (-1, 2), {'a,b,b,a': Fraction(5, 2), 'b,a,a,b': Fraction(1, 3),
                                              'a,a,b,a': 2}, default=1, roof=True)


def test_anchored_pair_validation():
    AnchoredPair(X, Y, STABLE, (0, 0))
    with pytest.raises(InvalidAnchors):
        AnchoredPair(X, Y, UNSTABLE, (0, 0))
    with pytest.raises(InvalidAnchors):
        AnchoredPair(X, Y, STABLE, (-1, -1))
    with pytest.raises(ValueError):
        AnchoredPair(X, Y, 'sideways')


def test_pair_operations(full_shift, rng):
    pair = AnchoredPair(X, Y, STABLE, (0, 0))
    assert reverse_pair(pair).anchors == (0, 0) and reverse_pair(pair).x == Y
    moved = shift_pair(pair, 2)
    assert moved.anchors == (-2, -2) and moved.x == X.shift(2)
    for _ in range(50):
        first = _stable_pair(full_shift, rng)
        z = random_point(full_shift, rng, zero=first.y[1])
        second = AnchoredPair(first.y, splice(z, first.y, 0, 1), STABLE, (0, 1))
        joined = compose_pairs(first, second)
        assert (joined.x, joined.y) == (first.x, second.y)
    with pytest.raises(ValueError):
        compose_pairs(pair, reverse_pair(shift_pair(pair)))


def test_cocycle_terminates_for_memory_zero(full_shift):
    roof = as_potential(full_shift, (0, 0), {'a': Fraction(1, 2), 'b': 2}, roof=True)
    assert bowen_marcus_P(AnchoredPair(X, Y, STABLE, (0, 0)), roof) == (0, 0.0)
    x = Point.periodic(('a',))
    y = Point(('a',), ('b',), ('a',), 0)
    assert bowen_marcus_P(AnchoredPair(x, y, STABLE, (1, 0)), roof).value == 2
    constant = Roof.constant(full_shift, Fraction(3, 2))
    assert bowen_marcus_P(AnchoredPair(x, x, STABLE, (3, 1)), constant).value == 3


def test_cocycle_identities(full_shift, wide_roof, rng):
    for _ in range(500):
        pair = _stable_pair(full_shift, rng) if rng.random() < 0.5 else _unstable_pair(full_shift, rng)
        p = bowen_marcus_P(pair, wide_roof)
        assert p.exact
        assert bowen_marcus_P(shift_pair(pair), wide_roof).value - p.value == \
            wide_roof(pair.x) - wide_roof(pair.y)
        assert bowen_marcus_P(reverse_pair(pair), wide_roof).value == -p.value


def test_cocycle_equation(full_shift, wide_roof, rng):
    for side, anchor in ((STABLE, 1), (UNSTABLE, -1)):
        for _ in range(100):
            first = (_stable_pair if side == STABLE else _unstable_pair)(full_shift, rng)
            z = random_point(full_shift, rng, zero=first.y[anchor])
            y2 = splice(z, first.y, 0, anchor) if side == STABLE else splice(first.y, z, anchor, 0)
            second = AnchoredPair(first.y, y2, side, (0, anchor))
            assert bowen_marcus_P(first, wide_roof).value + bowen_marcus_P(second, wide_roof).value == \
                bowen_marcus_P(compose_pairs(first, second), wide_roof).value


def test_holder_bound(full_shift, wide_roof, rng):
    bound = holder_constant(wide_roof)
    alpha = wide_roof.envelope.alpha
    for _ in range(200):
        pair = _stable_pair(full_shift, rng, n=0)
        p = bowen_marcus_P(pair, wide_roof).value
        assert abs(p) <= bound * metric_d(pair.x, pair.y) ** alpha + 1e-12


def test_truncation_reports_error(full_shift, rng):
    roof = as_potential(full_shift, (-3, 0), {'a,a,a,a': 2}, default=1, roof=True)
    pair = _stable_pair(full_shift, rng)
    full = bowen_marcus_P(pair, roof)
    cut = bowen_marcus_P(pair, roof, max_terms=1)
    assert full.error_bound == 0.0
    assert cut.error_bound == pytest.approx(roof.envelope.tail(1))
    assert abs(float(cut.value) - float(full.value)) <= cut.error_bound + 1e-12


def test_su_paths(full_shift):
    roof = as_potential(full_shift, (0, 0), {'a': Fraction(1, 5), 'b': Fraction(1, 10)}, roof=True)
    x = Point.periodic(('a',))
    y = Point(('a',), ('b',), ('a',), 0)
    v = Point(('a',), ('b', 'a', 'a', 'b'), ('a',), -1)
    path = SuPath(x, (AnchoredPair(x, y, STABLE, (2, 0)), AnchoredPair(y, v, UNSTABLE, (1, 2))))
    assert path.end == v and not path.is_closed
    assert path.points == [x, y, v]
    lifted = lift_su_path(path, roof, 0)
    assert [t for _, t in lifted] == [0, Fraction(3, 10), Fraction(1, 5)]
    assert (lifted[0][0].base, lifted[0][0].height) == (x, 0)
    with pytest.raises(HeightOutOfRange):
        lift_su_path(path, roof, Fraction(1, 5))
    loop = path | path.reversed()
    assert isinstance(loop, SuLoop)
    assert su_loop_weight(loop, roof).value == 0
    with pytest.raises(ValueError):
        SuLoop(x, path.legs)
    with pytest.raises(ValueError):
        SuPath(y, path.legs)


def test_trivial_loop(full_shift, wide_roof):
    loop = SuLoop.trivial(X)
    assert su_loop_weight(loop, wide_roof) == (0, 0.0)
    assert lift_su_path(loop, wide_roof, 0)[-1][1] == 0


def test_sampled_loops(full_shift, wide_roof, rng):
    for loop in sample_su_loops(full_shift, rng, 100):
        assert loop.is_closed and len(loop.legs) == 4
        weight = su_loop_weight(loop, wide_roof).value
        assert su_loop_weight(loop.reversed(), wide_roof).value == -weight
        assert su_loop_weight(loop.shifted(1), wide_roof).value == weight
        assert su_loop_weight(loop.shifted(-2), wide_roof).value == weight
        assert lift_su_path(loop, wide_roof, 0)[-1][1] == weight
        head, tail = SuPath(loop.start, loop.legs[:2]), SuPath(loop.legs[1].y, loop.legs[2:])
        assert su_path_weight(head, wide_roof).value + su_path_weight(tail, wide_roof).value == weight


def test_sampled_loop_weight_memory_zero(full_shift, rng):
    roof = as_potential(full_shift, (0, 0), {'a': 2, 'b': Fraction(7, 3)}, roof=True)
    for loop in sample_su_loops(full_shift, rng, 50):
        x = loop.start
        c = loop.legs[0].anchors[1]
        f = loop.legs[3].anchors[0]
        assert su_loop_weight(loop, roof).value == birkhoff_sum(roof, x, f) - birkhoff_sum(roof, x, c)


def test_constant_roof_loops_on_lattice(golden, rng):
    roof = Roof.constant(golden, Fraction(3, 2))
    for loop in sample_su_loops(golden, rng, 50):
        assert su_loop_weight(loop, roof).value % Fraction(3, 2) == 0


def test_periodic_orbit_sums(full_shift, golden):
    roof = as_potential(full_shift, (0, 0), {'a': 2, 'b': 3}, roof=True)
    sums = dict(periodic_orbit_sums(roof, full_shift, 2))
    assert sums == {('a',): 2, ('b',): 3, ('a', 'a'): 4, ('a', 'b'): 5, ('b', 'b'): 6}
    constant = Roof.constant(full_shift, Fraction(3, 2))
    assert all(s == Fraction(3, 2) * len(w) for w, s in periodic_orbit_sums(constant, full_shift, 4))
    phi = Fraction('1.6180339887')
    g = as_potential(golden, (0, 0), {'a': 1, 'b': phi}, roof=True)
    values = {s for _, s in periodic_orbit_sums(g, golden, 4)}
    assert {1, 1 + phi, 2 + phi} <= values
    with pytest.raises(ValueError):
        periodic_orbit_sums(roof, full_shift, 0)


def test_lattice_fit():
    fit = lattice_fit([2, 3, 5])
    assert (fit.generator, fit.residual, fit.label) == (1, 0.0, 'Lattice(1)')
    assert lattice_fit([Fraction(3, 2), 3, Fraction(9, 2)]).generator == Fraction(3, 2)
    assert lattice_fit([1.5, 3.0, 4.5]).generator == pytest.approx(1.5)
    dense = lattice_fit([1.0, 1.6180339887, 2.6180339887])
    assert dense.generator is None and dense.label == 'Dense'
    assert dense.residual > 0
    assert not lattice_fit([0, 0]).informative


def test_arithmeticity_classify():
    report = arithmeticity_classify([Fraction(3, 2), 3, Fraction(9, 2)], [0, Fraction(-3, 2)])
    assert report.label == 'Lattice(3/2)' and report.consistent
    assert report.sampled_weights == [0, Fraction(-3, 2)]
    mixed = arithmeticity_classify([2, 3], [1.0, math.sqrt(2)])
    assert mixed.verdict == 'Dense'
    assert not mixed.consistent
    assert mixed.channels == {'periodic_sums': 'Lattice(1)', 'loop_weights': 'Dense'}
    with pytest.raises(EmptyEvidence):
        arithmeticity_classify([0], [0, 0])


def test_classify_lattice_roof(full_shift, fair_coin):
    roof = as_potential(full_shift, (0, 0), {'a': 2, 'b': 3}, roof=True)
    report = classify_flow(fair_coin, roof, rng=np.random.default_rng(1))
    assert report.arithmetic and report.verdict == 'BernoulliTimesRotation'
    assert (report.c, report.period_p, report.flow_period) == (1, 1, 1)
    assert report.theta == pytest.approx(2 * math.pi)
    assert report.holonomy.consistent


def test_classify_golden_roof(golden):
    roof = as_potential(golden, (0, 0), {'a': 1, 'b': Fraction('1.6180339887')}, roof=True)
    m = equilibrium_measure(Potential.constant(golden, 0))
    report = classify_flow(m, roof, rng=np.random.default_rng(2))
    assert not report.arithmetic
    assert report.verdict == 'Bernoulli'
    assert report.c is None and report.flow_period is None


@pytest.mark.parametrize('graph_name, value, c, flow_period', [
    ('full_shift', 1, 1, 1),
    ('period_two', Fraction(3, 2), 3, 3),
])
def test_classify_constant_roof(request, graph_name, value, c, flow_period):
    g = request.getfixturevalue(graph_name)
    m = equilibrium_measure(Potential.constant(g, 0))
    report = classify_flow(m, Roof.constant(g, value), rng=np.random.default_rng(3))
    assert report.verdict == 'BernoulliTimesRotation'
    assert (report.c, report.flow_period) == (c, flow_period)
    assert report.flow_period == report.period_p * report.c


def test_verdict_invariant_under_coboundary(full_shift, fair_coin, rng):
    roof = as_potential(full_shift, (0, 0), {'a': 2, 'b': 3}, roof=True)
    for _ in range(5):
        u = as_potential(full_shift, (0, 0), {'a': Fraction(int(rng.integers(0, 4)), 4),
                                              'b': Fraction(int(rng.integers(0, 4)), 4)})
        moved = roof.coboundary(u)
        before = classify_flow(fair_coin, roof, rng=np.random.default_rng(9), cycle_length=6)
        after = classify_flow(fair_coin, moved, rng=np.random.default_rng(9), cycle_length=6)
        assert (after.verdict, after.c, after.flow_period) == (before.verdict, before.c, before.flow_period)


def test_period_p_is_recoded_period(period_two):
    assert period_and_decomposition(period_two)[0] == 2
    m = equilibrium_measure(Potential.constant(period_two, 0))
    report = classify_flow(m, Roof.constant(period_two, Fraction(3, 2)), rng=np.random.default_rng(3))
    assert (report.c, report.period_p, report.flow_period) == (3, 1, 3)
