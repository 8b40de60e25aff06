# -*- coding: utf-8 -*-
"""
Perron eigen-solvers for nonnegative irreducible matrices.

This module provides a unified interface over two ways of computing the
Perron root with its right and left eigenvectors: power iteration on
the p-step operator (the default, with a residual based stopping rule)
and a dense scipy.linalg.eig solve used as an independent oracle.
"""

from abc import ABC, abstractmethod
import logging
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import linalg

from errors import NoConvergence

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"


class PerronData(NamedTuple):
    eigenvalue: float
    right: np.ndarray
    left: np.ndarray
    iterations: int
    residual: float


class SolverBase(ABC):
    """Abstract base class for all Perron solvers."""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)

    @abstractmethod
    def perron(self, matrix: np.ndarray, classes: Sequence[np.ndarray]) -> PerronData:
        """Perron triple of an irreducible matrix whose cyclic classes are given.

        `classes[c]` holds the indices of class c; the matrix maps functions
        supported on class c to functions supported on class c + 1.
        """
        pass

    @property
    @abstractmethod
    def solver_info(self) -> str:
        """Return human-readable solver information."""
        pass

    @staticmethod
    def residual(matrix: np.ndarray, eigenvalue: float, right: np.ndarray, left: np.ndarray) -> float:
        """max of the relative sup-norm residuals of both eigenvectors."""
        r = np.max(np.abs(matrix @ right - eigenvalue * right)) / (eigenvalue * np.max(np.abs(right)))
        l = np.max(np.abs(left @ matrix - eigenvalue * left)) / (eigenvalue * np.max(np.abs(left)))
        return float(max(r, l))


class PowerIterationSolver(SolverBase):
    """Power iteration on the p-step operator restricted to class 0."""

    MAX_ITERATIONS = 100000
    TOLERANCE = 1e-13

    def __init__(self, logger: Optional[logging.Logger] = None, tol: Optional[float] = None,
                 max_iterations: Optional[int] = None):
        super().__init__(logger)
        self.tol = tol if tol is not None else self.TOLERANCE
        self.max_iterations = max_iterations if max_iterations is not None else self.MAX_ITERATIONS

    @property
    def solver_info(self) -> str:
        return f'power(tol={self.tol:g}, max_iterations={self.max_iterations})'

    def _dominant(self, block: np.ndarray) -> tuple:
        """Dominant eigenpair of a primitive block, sup-normalized."""
        n = block.shape[0]
        floor = max(self.tol, 64 * np.finfo(float).eps * n)
        x = np.ones(n)
        residual = np.inf
        for iteration in range(1, self.max_iterations + 1):
            y = block @ x
            mu = float(np.max(y))
            y /= mu
            residual = float(np.max(np.abs(block @ y - mu * y))) / mu
            x = y
            if residual < floor:
                return mu, x, iteration
        raise NoConvergence(self.max_iterations, residual)

    def perron(self, matrix: np.ndarray, classes: Sequence[np.ndarray]) -> PerronData:
        p = len(classes)
        base = np.asarray(classes[0])
        step = np.linalg.matrix_power(matrix, p)
        block = step[np.ix_(base, base)]
        mu, right0, it_r = self._dominant(block)
        _, left0, it_l = self._dominant(block.T)
        lam = mu ** (1.0 / p)

        # Spread the class-0 vectors over all classes: h = sum_j lam^-j A^j h_0.
        n = matrix.shape[0]
        right, left = np.zeros(n), np.zeros(n)
        term_r, term_l = np.zeros(n), np.zeros(n)
        term_r[base], term_l[base] = right0, left0
        for j in range(p):
            right += term_r
            left += term_l
            term_r = (matrix @ term_r) / lam
            term_l = (term_l @ matrix) / lam
        residual = self.residual(matrix, lam, right, left)
        self.logger.debug('Power: lambda=%.15g after %d/%d iterations, residual %.2e',
                          lam, it_r, it_l, residual)
        return PerronData(lam, right, left, max(it_r, it_l), residual)


class DenseSolver(SolverBase):
    """Full eigendecomposition with scipy.linalg.eig."""

    @property
    def solver_info(self) -> str:
        return 'dense(scipy.linalg.eig)'

    def perron(self, matrix: np.ndarray, classes: Sequence[np.ndarray]) -> PerronData:
        w, vl, vr = linalg.eig(matrix, left=True, right=True)
        k = int(np.argmax(w.real))
        lam = float(w[k].real)
        right = np.abs(np.real(vr[:, k] / vr[np.argmax(np.abs(vr[:, k])), k]))
        left = np.abs(np.real(vl[:, k] / vl[np.argmax(np.abs(vl[:, k])), k]))
        residual = self.residual(matrix, lam, right, left)
        self.logger.debug('Dense: lambda=%.15g, residual %.2e', lam, residual)
        return PerronData(lam, right, left, 0, residual)


class SolverFactory:
    """Factory for creating solver instances."""

    @staticmethod
    def create_solver(solver_type: str, logger: Optional[logging.Logger] = None, **kwargs) -> SolverBase:
        """Create a solver instance of the specified type.

        Args:
            solver_type: 'power' or 'dense'
            logger: Optional logger instance
            **kwargs: tol and max_iterations for the power solver

        Returns:
            Solver instance

        Raises:
            ValueError: If solver_type is not supported
        """
        solver_type = solver_type.lower()

        if solver_type == 'power':
            return PowerIterationSolver(logger, **kwargs)
        elif solver_type == 'dense':
            return DenseSolver(logger)
        else:
            raise ValueError(f"Unsupported solver type: {solver_type}")
