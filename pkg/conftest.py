# -*- coding: utf-8 -*-
"""Shared fixtures: the standard small graphs and their measures."""

import math
from pathlib import Path

import numpy as np
import pytest

from potential import Potential, Roof, as_potential
from shift import validate_graph
from thermo import equilibrium_measure

CONFIGS = Path(__file__).parent / 'configs'


def bernoulli_potential(graph, p):
    return as_potential(graph, (0, 0), {'a': math.log(p), 'b': math.log(1 - p)}, name='bernoulli')


def markov_potential(graph, P):
    """phi(i, j) = log P(i, j) on a two-letter alphabet."""
    table = {f'{u},{v}': math.log(P[i][j]) for i, u in enumerate('ab') for j, v in enumerate('ab')}
    return as_potential(graph, (0, 1), table, name='markov')


@pytest.fixture
def full_shift():
    return validate_graph(['a', 'b'], [('a', 'a'), ('a', 'b'), ('b', 'a'), ('b', 'b')])


@pytest.fixture
def golden():
    return validate_graph(['a', 'b'], [('a', 'a'), ('a', 'b'), ('b', 'a')])


@pytest.fixture
def period_two():
    return validate_graph('abcd', [('a', 'b'), ('b', 'a'), ('b', 'c'), ('c', 'd'), ('d', 'a')])


@pytest.fixture
def period_three():
    return validate_graph('abcd', [('a', 'b'), ('b', 'c'), ('c', 'a'), ('c', 'd'), ('d', 'b')])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def fair_coin(full_shift):
    return equilibrium_measure(Potential.constant(full_shift, 0))


@pytest.fixture
def unit_roof(full_shift):
    return Roof.constant(full_shift, 1)


@pytest.fixture
def configs():
    return CONFIGS
