# -*- coding: utf-8 -*-

import math
from fractions import Fraction

import pytest

from errors import Inadmissible, InvalidPotential
from potential import HolderEnvelope, Potential, Roof, as_potential
from shift import Point, Word, birkhoff_sum, random_point


def test_as_potential_keys_and_default(golden):
    p = as_potential(golden, (0, 1), {'a,b': Fraction(1, 3), ('b', 'a'): 2}, default=0)
    assert p.table == {('a', 'a'): 0, ('a', 'b'): Fraction(1, 3), ('b', 'a'): 2}
    assert p.exact
    assert p.width == 2


def test_missing_window(golden):
    with pytest.raises(InvalidPotential):
        as_potential(golden, (0, 1), {'a,a': 1})


def test_inadmissible_window(golden):
    with pytest.raises(InvalidPotential):
        as_potential(golden, (0, 1), {'b,b': 1}, default=0)


def test_roof_must_be_positive(full_shift):
    with pytest.raises(InvalidPotential):
        as_potential(full_shift, (0, 0), {'a': 1, 'b': 0}, roof=True)
    roof = as_potential(full_shift, (0, 0), {'a': 2, 'b': 3}, roof=True)
    assert isinstance(roof, Roof)
    assert (roof.inf_r, roof.sup_r) == (2, 3)
    assert not roof.is_constant
    assert roof.constant_value is None
    assert Roof.constant(full_shift, Fraction(3, 2)).constant_value == Fraction(3, 2)


def test_evaluation(full_shift):
    p = as_potential(full_shift, (-1, 0), {'a,b': 5}, default=1)
    x = Point(('a',), ('b',), ('a',), 0)
    assert p(x) == 5
    assert p.at(x, 1) == 1
    assert p.at(x, -1) == 1
    with pytest.raises(Inadmissible):
        p.value(('a',))


def test_birkhoff_sums_exact(full_shift, rng):
    r = as_potential(full_shift, (0, 0), {'a': Fraction(1, 2), 'b': 3}, roof=True)
    x = random_point(full_shift, rng)
    for n in (1, 4, 7):
        total = birkhoff_sum(r, x, n)
        assert isinstance(total, (int, Fraction))
        assert total == sum(r.at(x, k) for k in range(n))
        assert birkhoff_sum(r, x, -n) == -birkhoff_sum(r, x.shift(-n), n)
    assert birkhoff_sum(r, x, 0) == 0


@pytest.mark.parametrize('graph_name, memory', [
    ('full_shift', (0, 0)),
    ('golden', (-1, 1)),
    ('period_two', (0, 2)),
])
def test_birkhoff_cocycle_identity(request, rng, graph_name, memory):
    g = request.getfixturevalue(graph_name)
    r = Potential.from_function(g, memory, lambda w: Fraction(int(rng.integers(1, 13)), int(rng.integers(1, 5))))
    for _ in range(100):
        x = random_point(g, rng)
        for n in range(-6, 7):
            moved = x.shift(n)
            for m in range(-6, 7):
                assert birkhoff_sum(r, x, m + n) == birkhoff_sum(r, x, n) + birkhoff_sum(r, moved, m)


def test_range_on(golden):
    p = as_potential(golden, (0, 1), {'a,a': 1, 'a,b': 4, 'b,a': 2})
    assert p.range_on(Word(('a',), 0)) == (1, 4)
    assert p.range_on(Word(('b',), 0)) == (2, 2)
    assert p.range_on(Word(('a', 'b'), 0)) == (4, 4)


def test_variation_and_envelope(full_shift):
    p = as_potential(full_shift, (0, 2), {'a,a,a': 1}, default=0)
    assert p.variation(0) == 1
    assert p.variation(1) == 1
    assert p.variation(2) == 1
    assert p.variation(3) == 0
    env = p.fitted_envelope(1.0)
    for k in range(6):
        assert p.variation(k) <= env.C * math.exp(-k) + 1e-12


def test_holder_envelope():
    env = HolderEnvelope(2.0, 0.5)
    q = math.exp(-0.5)
    assert env.tail(0) == pytest.approx(2.0 * q / (1 - q))
    with pytest.raises(InvalidPotential):
        HolderEnvelope(1.0, 0.0)


def test_extended_and_shifted(full_shift, rng):
    p = as_potential(full_shift, (0, 0), {'a': 1, 'b': 2})
    wide = p.extended(-1, 2)
    shifted = p.shifted(2)
    for _ in range(20):
        x = random_point(full_shift, rng)
        assert wide(x) == p(x)
        assert shifted(x) == p.at(x, 2)
    with pytest.raises(InvalidPotential):
        wide.extended(0, 2)


def test_coboundary_keeps_periodic_sums(full_shift):
    r = as_potential(full_shift, (0, 0), {'a': 2, 'b': 3}, roof=True)
    u = as_potential(full_shift, (0, 0), {'a': 0, 'b': Fraction(1, 2)})
    r2 = r.coboundary(u)
    assert isinstance(r2, Roof)
    assert r2.memory == (0, 1)
    for cycle in (('a',), ('a', 'b'), ('a', 'b', 'b'), ('b', 'a', 'a', 'b')):
        x = Point.periodic(cycle)
        assert birkhoff_sum(r2, x, len(cycle)) == birkhoff_sum(r, x, len(cycle))


def test_arithmetic(full_shift):
    p = as_potential(full_shift, (0, 0), {'a': 1, 'b': 2})
    q = as_potential(full_shift, (0, 1), {'a,b': 1}, default=0)
    total = p + q
    assert total.memory == (0, 1)
    assert total.table[('a', 'b')] == 2
    assert (total - q).table[('b', 'a')] == 2
    assert p.scaled(-2).table[('b',)] == -4
    assert isinstance(Potential.constant(full_shift, 0).scaled(3), Potential)
