# -*- coding: utf-8 -*-
"""
Exception hierarchy of markovflow.

Every failure raised by the library derives from MarkovFlowError, so a
caller may trap the whole family with a single except clause. Errors
caused by bad arguments also derive from ValueError. The command line
front end maps ConfigError to exit code 2 and every other
MarkovFlowError to exit code 3.
"""

from typing import Optional, Sequence, Tuple

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"


class MarkovFlowError(Exception):
    """Base class for all markovflow errors."""

    def as_dict(self) -> dict:
        """Machine readable description, used by the report emitter."""
        return {'type': type(self).__name__, 'message': str(self)}


# Graphs and points.

class GraphError(MarkovFlowError, ValueError):
    pass


class UnknownVertex(GraphError):
    def __init__(self, vertex: str):
        super().__init__(f'Unknown vertex: {vertex!r}')
        self.vertex = vertex


class MissingInEdge(GraphError):
    def __init__(self, vertex: str):
        super().__init__(f'Vertex {vertex!r} has no incoming edge')
        self.vertex = vertex


class MissingOutEdge(GraphError):
    def __init__(self, vertex: str):
        super().__init__(f'Vertex {vertex!r} has no outgoing edge')
        self.vertex = vertex


class IsPureCycle(GraphError):
    def __init__(self, cycle: Sequence[str]):
        super().__init__('Graph is a single cycle: ' + '->'.join(cycle))
        self.cycle = tuple(cycle)


class NotTransitive(GraphError):
    def __init__(self, source: str, target: str):
        super().__init__(f'No path from {source!r} to {target!r}')
        self.pair = (source, target)


class Inadmissible(MarkovFlowError, ValueError):
    def __init__(self, symbols: Sequence[str], where: str = ''):
        text = 'Inadmissible word: ' + ' '.join(symbols)
        super().__init__(text + (f' ({where})' if where else ''))
        self.symbols = tuple(symbols)


class MismatchedZero(MarkovFlowError, ValueError):
    def __init__(self, left: str, right: str):
        super().__init__(f'Bracket needs equal zero coordinates, got {left!r} and {right!r}')


# Potentials and measures.

class InvalidPotential(MarkovFlowError, ValueError):
    pass


class MemoryTooShort(MarkovFlowError, ValueError):
    def __init__(self, length: int, needed: int):
        super().__init__(f'Cylinder length {length} is below the required {needed}')
        self.length = length
        self.needed = needed


class NoConvergence(MarkovFlowError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(f'Power iteration did not converge after {iterations} iterations '
                         f'(residual {residual:.3e})')
        self.iterations = iterations
        self.residual = residual


class CapExceeded(MarkovFlowError):
    def __init__(self, what: str, cap: int):
        super().__init__(f'{what} exceeds the configured cap {cap}')
        self.cap = cap


class IncompatibleCylinder(MarkovFlowError, ValueError):
    pass


# Flows.

class IntervalAboveRoof(MarkovFlowError, ValueError):
    def __init__(self, top, roof_value):
        super().__init__(f'Interval top {top} exceeds the roof {roof_value} on the cylinder')


class RoofNotConstant(MarkovFlowError, ValueError):
    pass


class RoofNotOne(MarkovFlowError, ValueError):
    pass


class HeightOutOfRange(MarkovFlowError, ValueError):
    def __init__(self, height, roof_value):
        super().__init__(f'Height {height} is outside [0, {roof_value})')


# Cocycles.

class InvalidAnchors(MarkovFlowError, ValueError):
    def __init__(self, side: str, anchors: Tuple[int, int]):
        super().__init__(f'Points are not {side}-related at anchors {anchors}')
        self.anchors = anchors


class EmptyEvidence(MarkovFlowError, ValueError):
    def __init__(self):
        super().__init__('No evidence to classify')


# Partitions and d-bar.

class AtomCountMismatch(MarkovFlowError, ValueError):
    def __init__(self, left: int, right: int):
        super().__init__(f'Partitions have {left} and {right} atoms')


class ShapeMismatch(MarkovFlowError, ValueError):
    pass


class HypothesisFailed(MarkovFlowError):
    def __init__(self, which: str, detail: str = ''):
        super().__init__(f'Matching hypothesis failed: {which}' + (f' ({detail})' if detail else ''))
        self.which = which


class DeltaTooLarge(MarkovFlowError, ValueError):
    def __init__(self, delta, inf_r):
        super().__init__(f'delta={delta} must lie in (0, {inf_r})')


class ResolutionExceeded(MarkovFlowError):
    def __init__(self, cells: int, cap: int):
        super().__init__(f'Refinement needs {cells} cells, above the cap {cap}')
        self.cells = cells
        self.cap = cap


# Configuration.

class ConfigError(MarkovFlowError):
    pass


class ConfigParseError(ConfigError):
    def __init__(self, path: str, reason: str, line: Optional[int] = None, column: Optional[int] = None):
        where = path if line is None else f'{path}:{line}:{column}'
        super().__init__(f'{where}: {reason}')
        self.path = path
        self.reason = reason
        self.line = line
        self.column = column

    def as_dict(self) -> dict:
        return {'type': 'ParseError', 'path': self.path, 'reason': self.reason,
                'line': self.line, 'column': self.column}


class ConfigValidationError(ConfigError):
    def __init__(self, field: str, reason: str):
        super().__init__(f'{field}: {reason}')
        self.field = field
        self.reason = reason

    def as_dict(self) -> dict:
        return {'type': 'ValidationError', 'field': self.field, 'reason': self.reason}


class UnknownCommand(MarkovFlowError, ValueError):
    def __init__(self, command: str):
        super().__init__(f'Unsupported command: {command}')
        self.command = command
