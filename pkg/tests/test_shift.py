# -*- coding: utf-8 -*-

import math

import pytest

from errors import Inadmissible, IsPureCycle, MismatchedZero, MissingInEdge, MissingOutEdge, \
    NotTransitive, UnknownVertex
from shift import Cylinder, Point, Word, agree_left, agree_right, check_point, complete_word, \
    cycle_length_gcd, extend_word, first_difference, is_mixing, is_transitive, metric_d, \
    period_and_decomposition, random_point, shift, smale_bracket, splice, validate_graph


def test_validate_graph_sorts_vertices():
    g = validate_graph(['b', 'a'], [('a', 'b'), ('b', 'a'), ('a', 'a')])
    assert g.vertices == ('a', 'b')
    assert g.successors['a'] == ('a', 'b')
    assert g.predecessors['a'] == ('a', 'b')


@pytest.mark.parametrize('vertices, edges, error', [
    (['a', 'b'], [('a', 'c')], UnknownVertex),
    (['a', 'b'], [('a', 'a'), ('b', 'a')], MissingInEdge),
    (['a', 'b'], [('a', 'a'), ('a', 'b')], MissingOutEdge),
    (['a', 'b'], [('a', 'b'), ('b', 'a')], IsPureCycle),
    (['a'], [('a', 'a')], IsPureCycle),
])
def test_validate_graph_rejects(vertices, edges, error):
    with pytest.raises(error):
        validate_graph(vertices, edges)


def test_words(golden, full_shift):
    assert golden.words(3) == [('a', 'a', 'a'), ('a', 'a', 'b'), ('a', 'b', 'a'),
                               ('b', 'a', 'a'), ('b', 'a', 'b')]
    assert len(full_shift.words(5)) == 32
    assert golden.closed_words(2) == [('a', 'a'), ('a', 'b'), ('b', 'a')]


def test_period_two(period_two):
    period, classes = period_and_decomposition(period_two)
    assert period == 2
    assert classes == [('a', 'c'), ('b', 'd')]
    assert not is_mixing(period_two)
    assert cycle_length_gcd(period_two) == 2


def test_period_three(period_three):
    period, classes = period_and_decomposition(period_three)
    assert period == 3
    assert classes == [('a', 'd'), ('b',), ('c',)]
    for u, v in period_three.edges:
        cu = next(i for i, c in enumerate(classes) if u in c)
        assert v in classes[(cu + 1) % 3]


def test_mixing(full_shift, golden):
    assert is_mixing(full_shift)
    assert period_and_decomposition(golden) == (1, [('a', 'b')])


def test_not_transitive():
    g = validate_graph(['a', 'b'], [('a', 'a'), ('a', 'b'), ('b', 'b')])
    assert not is_transitive(g)
    with pytest.raises(NotTransitive) as info:
        period_and_decomposition(g)
    assert info.value.pair == ('b', 'a')


def test_shortest_path_and_cycle(period_two):
    assert period_two.shortest_path('a', 'd') == ('a', 'b', 'c', 'd')
    assert period_two.shortest_cycle('c') == ('c', 'd', 'a', 'b')


def test_point_canonical_form():
    p = Point(('a',), ('a', 'b'), ('b',), 0)
    q = Point(('a',), (), ('b',), 1)
    assert p == q
    assert p.window(-2, 3) == ('a', 'a', 'a', 'b', 'b')
    assert Point(('a', 'b', 'a', 'b'), (), ('a', 'b'), 0) == Point.periodic(('a', 'b'))
    assert Point.periodic(('a', 'b')).is_periodic
    assert Point.periodic(('a', 'b'), 0) == Point.periodic(('b', 'a'), 1)
    assert Point.periodic(('a', 'b'), 1) == Point.periodic(('b', 'a'))
    assert Point.periodic(('a', 'b', 'c'), 5) == Point.periodic(('b', 'c', 'a'), 0)
    assert Point.periodic(('a', 'b')).shift(1) == Point.periodic(('b', 'a'))


def test_shift_moves_coordinates():
    x = Point(('a',), ('b', 'a', 'b'), ('a',), -1)
    for k in range(-3, 4):
        y = shift(x, k)
        assert all(y[i] == x[i + k] for i in range(-6, 6))
    assert Point.periodic(('a', 'b')).shift(2) == Point.periodic(('a', 'b'))


def test_word_operations():
    w = Word(('a', 'b', 'b'), -1)
    assert w.end == 2
    assert w.at(0) == 'b'
    assert w.shift(1) == Word(('a', 'b', 'b'), -2)
    assert w.restrict(0, 5) == Word(('b', 'b'), 0)
    assert w.agrees(Word(('b', 'b', 'a'), 0))
    assert not w.agrees(Word(('a',), 0))
    x = Point(('a',), ('b', 'b'), ('a',), 0)
    assert w.matches(x)
    assert Cylinder.of(('b', 'b')).contains(x)


def test_extend_word(full_shift, golden):
    ext = extend_word(full_shift, Word(('a',), 0), -1, 2)
    assert len(ext) == 4
    assert all(e.anchor == -1 and e.symbols[1] == 'a' for e in ext)
    assert [e.symbols for e in extend_word(golden, Word(('b',), 0), 0, 3)] == [('b', 'a', 'a'), ('b', 'a', 'b')]


def test_check_point(golden):
    check_point(golden, Point(('a',), ('b',), ('a',)))
    with pytest.raises(Inadmissible):
        check_point(golden, Point(('a',), ('b', 'b'), ('a',)))


def test_bracket():
    x = Point.periodic(('a',))
    y = Point(('b',), ('a',), ('b',), 0)
    z = smale_bracket(x, y)
    assert z == Point(('a',), (), ('b',), 1)
    assert z.window(-3, 3) == ('a', 'a', 'a', 'a', 'b', 'b')
    with pytest.raises(MismatchedZero):
        smale_bracket(x, Point.periodic(('b',)))


def test_splice_is_shifted_bracket(rng, full_shift):
    for _ in range(50):
        u, v = random_point(full_shift, rng), random_point(full_shift, rng)
        i, j = int(rng.integers(-3, 4)), int(rng.integers(-3, 4))
        if u[i] != v[j]:
            continue
        z = splice(u, v, i, j)
        assert all(z[k] == u[i + k] for k in range(-8, 1))
        assert all(z[k] == v[j + k] for k in range(0, 9))
        assert agree_left(z, 0, u, i)
        assert agree_right(z, 0, v, j)


def test_metric():
    x = Point.periodic(('a',))
    y = Point(('a',), ('b',), ('a',), 2)
    assert first_difference(x, y) == 2
    assert metric_d(x, y) == pytest.approx(math.exp(-2))
    assert metric_d(x, x) == 0.0
    assert first_difference(x, x) is None


def test_random_point_admissible(rng, golden, period_three):
    for g in (golden, period_three):
        for _ in range(100):
            x = check_point(g, random_point(g, rng, core_length=5))
            assert g.is_admissible(x.window(-10, 10))


def test_complete_word(period_two):
    x = complete_word(period_two, Word(('b', 'c', 'd'), 2))
    assert x.window(2, 5) == ('b', 'c', 'd')
    check_point(period_two, x)
    with pytest.raises(Inadmissible):
        complete_word(period_two, Word(('a', 'c'), 0))


GRAPHS = ['full_shift', 'golden', 'period_two']


@pytest.mark.parametrize('graph_name', GRAPHS)
def test_metric_is_symmetric_ultrametric(request, rng, graph_name):
    g = request.getfixturevalue(graph_name)
    for _ in range(1000):
        x, y, z = (random_point(g, rng, core_length=int(rng.integers(1, 7))).shift(int(rng.integers(-2, 3)))
                   for _ in range(3))
        assert metric_d(x, y) == metric_d(y, x)
        assert metric_d(x, z) <= max(metric_d(x, y), metric_d(y, z))
        assert (metric_d(x, y) == 0.0) == (x == y)


@pytest.mark.parametrize('graph_name', GRAPHS)
def test_shift_is_invertible(request, rng, graph_name):
    g = request.getfixturevalue(graph_name)
    for _ in range(300):
        x = random_point(g, rng)
        assert shift(shift(x, 1), -1) == x
        assert shift(shift(x, -1), 1) == x
        k = int(rng.integers(-7, 8))
        assert shift(shift(x, k), -k) == x


@pytest.mark.parametrize('graph_name', GRAPHS)
def test_bracket_is_idempotent(request, rng, graph_name):
    g = request.getfixturevalue(graph_name)
    for _ in range(300):
        x = random_point(g, rng)
        y = random_point(g, rng, zero=x[0])
        z = smale_bracket(x, y)
        assert smale_bracket(x, z) == z
        assert smale_bracket(z, y) == z
        assert smale_bracket(x, x) == x
        p = Point.periodic(g.shortest_cycle(x[0]), int(rng.integers(-4, 5)))
        assert smale_bracket(p, p) == p
