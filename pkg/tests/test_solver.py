# -*- coding: utf-8 -*-

import numpy as np
import pytest

from errors import NoConvergence
from solver import DenseSolver, PowerIterationSolver, SolverFactory


def _check_triple(matrix, data):
    assert np.allclose(matrix @ data.right, data.eigenvalue * data.right, atol=1e-10)
    assert np.allclose(data.left @ matrix, data.eigenvalue * data.left, atol=1e-10)
    assert np.all(data.right > 0) and np.all(data.left > 0)


def test_factory():
    assert isinstance(SolverFactory.create_solver('power'), PowerIterationSolver)
    assert isinstance(SolverFactory.create_solver('Dense'), DenseSolver)
    solver = SolverFactory.create_solver('power', tol=1e-10, max_iterations=50)
    assert solver.tol == 1e-10 and solver.max_iterations == 50
    with pytest.raises(ValueError):
        SolverFactory.create_solver('lanczos')


@pytest.mark.parametrize('seed', range(5))
def test_power_matches_dense(seed):
    rng = np.random.default_rng(seed)
    matrix = rng.random((5, 5)) + 0.05
    classes = [np.arange(5)]
    power = PowerIterationSolver().perron(matrix, classes)
    dense = DenseSolver().perron(matrix, classes)
    assert power.eigenvalue == pytest.approx(dense.eigenvalue, rel=1e-12)
    _check_triple(matrix, power)
    _check_triple(matrix, dense)
    assert power.residual < 1e-12


def test_periodic_matrix():
    # Class 0 = {0, 1}, class 1 = {2}: the matrix maps class c into class c + 1.
    matrix = np.array([[0.0, 0.0, 1.0],
                       [0.0, 0.0, 2.0],
                       [1.0, 1.0, 0.0]])
    data = PowerIterationSolver().perron(matrix, [np.array([0, 1]), np.array([2])])
    assert data.eigenvalue == pytest.approx(np.sqrt(3.0), rel=1e-12)
    _check_triple(matrix, data)


def test_no_convergence():
    matrix = np.array([[1.0, 1.0], [1.0, 0.0]])
    with pytest.raises(NoConvergence) as info:
        PowerIterationSolver(max_iterations=2).perron(matrix, [np.arange(2)])
    assert info.value.iterations == 2
