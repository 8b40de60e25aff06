# -*- coding: utf-8 -*-
"""
Locally constant potentials and roof functions.

A Potential with memory (l, m) is a table from admissible windows
x_l ... x_m to numbers. General Hoelder functions only enter through a
HolderEnvelope (C, alpha) bounding var_k <= C exp(-alpha k), used for
tail estimates and never for pointwise evaluation beyond the table.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

from errors import Inadmissible, InvalidPotential
from numeric import Number, is_exact
from shift import Graph, Point, Symbols, Word, extend_word

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"


@dataclass(frozen=True)
class HolderEnvelope:
    C: float
    alpha: float

    def __post_init__(self):
        if self.C < 0 or not 0 < self.alpha <= 1:
            raise InvalidPotential(f'Hoelder envelope needs C >= 0 and alpha in (0, 1], got {self}')

    def tail(self, start: int) -> float:
        """Bound on sum_{k >= start} C exp(-alpha (k + 1))."""
        q = math.exp(-self.alpha)
        return self.C * q ** (start + 1) / (1 - q)


class Potential:
    """Function of the coordinates x_l, ..., x_m given by a table."""

    def __init__(self, graph: Graph, memory: Tuple[int, int], table: Mapping[Symbols, Number],
                 envelope: Optional[HolderEnvelope] = None, name: str = 'potential'):
        l, m = int(memory[0]), int(memory[1])
        if m < l:
            raise InvalidPotential(f'{name}: memory ({l}, {m}) is empty')
        self.graph = graph
        self.memory = (l, m)
        self.name = name
        self.table: Dict[Symbols, Number] = {}
        for key, value in table.items():
            key = tuple(key)
            if len(key) != m - l + 1 or not graph.is_admissible(key):
                raise InvalidPotential(f'{name}: window {key} is not an admissible word of length {m - l + 1}')
            if isinstance(value, float) and not math.isfinite(value):
                raise InvalidPotential(f'{name}: value on {key} is not finite')
            self.table[key] = value
        missing = [w for w in graph.words(m - l + 1) if w not in self.table]
        if missing:
            raise InvalidPotential(f'{name}: no value for window {missing[0]}')
        self._envelope = envelope

    @classmethod
    def from_function(cls, graph: Graph, memory: Tuple[int, int], func: Callable[[Symbols], Number],
                      **kwargs) -> 'Potential':
        l, m = memory
        return cls(graph, memory, {w: func(w) for w in graph.words(m - l + 1)}, **kwargs)

    @classmethod
    def constant(cls, graph: Graph, value: Number, **kwargs) -> 'Potential':
        return cls.from_function(graph, (0, 0), lambda w: value, **kwargs)

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.name}, memory={self.memory}, {len(self.table)} windows)'

    @property
    def width(self) -> int:
        return self.memory[1] - self.memory[0] + 1

    @property
    def one_sided(self) -> bool:
        return self.memory[0] >= 0

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.table.values())

    @property
    def envelope(self) -> HolderEnvelope:
        return self._envelope or self.fitted_envelope(1.0)

    def value(self, window: Iterable[str]) -> Number:
        key = tuple(window)
        try:
            return self.table[key]
        except KeyError:
            raise Inadmissible(key, self.name)

    def at(self, x: Point, k: int = 0) -> Number:
        """f(sigma^k x)."""
        l, m = self.memory
        return self.value(x.window(k + l, k + m + 1))

    def __call__(self, x: Point) -> Number:
        return self.at(x, 0)

    def sup(self) -> Number:
        return max(self.table.values())

    def inf(self) -> Number:
        return min(self.table.values())

    def range_on(self, word: Word) -> Tuple[Number, Number]:
        """(min, max) of the potential over the cylinder of `word`."""
        l, m = self.memory
        values = [self.table[w.restrict(l, m + 1).symbols]
                  for w in extend_word(self.graph, word, l, m + 1)]
        if not values:
            raise Inadmissible(word.symbols, self.name)
        return min(values), max(values)

    def variation(self, k: int) -> Number:
        """var_k = sup |f(x) - f(y)| over x, y with x_i = y_i for |i| < k."""
        l, m = self.memory
        lo, hi = max(l, -k + 1), min(m, k - 1)
        groups: Dict[Symbols, list] = {}
        for w, v in self.table.items():
            key = w[lo - l:hi - l + 1] if lo <= hi else ()
            groups.setdefault(key, []).append(v)
        return max(max(vs) - min(vs) for vs in groups.values())

    def fitted_envelope(self, alpha: float) -> HolderEnvelope:
        """Smallest C with var_k <= C exp(-alpha k) for all k."""
        l, m = self.memory
        reach = max(abs(l), abs(m)) + 1
        C = max(float(self.variation(k)) * math.exp(alpha * k) for k in range(reach + 1))
        return HolderEnvelope(C, alpha)

    def extended(self, lo: int, hi: int) -> 'Potential':
        """The same function written with memory (lo, hi), which must contain (l, m)."""
        l, m = self.memory
        if lo > l or hi < m:
            raise InvalidPotential(f'{self.name}: memory ({lo}, {hi}) does not contain ({l}, {m})')
        table = {w: self.table[w[l - lo:m - lo + 1]] for w in self.graph.words(hi - lo + 1)}
        return self._like((lo, hi), table)

    def shifted(self, k: int) -> 'Potential':
        """f o sigma^k."""
        l, m = self.memory
        return self._like((l + k, m + k), self.table)

    def combine(self, other: 'Potential', op: Callable[[Number, Number], Number]) -> 'Potential':
        lo = min(self.memory[0], other.memory[0])
        hi = max(self.memory[1], other.memory[1])
        a, b = self.extended(lo, hi), other.extended(lo, hi)
        return Potential(self.graph, (lo, hi), {w: op(a.table[w], b.table[w]) for w in a.table},
                         name=self.name)

    def __add__(self, other: 'Potential') -> 'Potential':
        return self.combine(other, lambda u, v: u + v)

    def __sub__(self, other: 'Potential') -> 'Potential':
        return self.combine(other, lambda u, v: u - v)

    def scaled(self, factor: Number) -> 'Potential':
        return Potential(self.graph, self.memory, {w: factor * v for w, v in self.table.items()},
                         name=self.name)

    def coboundary(self, u: 'Potential') -> 'Potential':
        """f + u o sigma - u, which has the same periodic-orbit sums as f."""
        result = self + u.shifted(1) - u
        return self._like(result.memory, result.table)

    def _like(self, memory, table) -> 'Potential':
        return Potential(self.graph, memory, table, self._envelope, self.name)


class Roof(Potential):
    """Strictly positive potential used as the return time of a suspension."""

    def __init__(self, graph: Graph, memory: Tuple[int, int], table: Mapping[Symbols, Number],
                 envelope: Optional[HolderEnvelope] = None, name: str = 'roof'):
        super().__init__(graph, memory, table, envelope, name)
        for w, v in self.table.items():
            if not v > 0:
                raise InvalidPotential(f'{name}: value on {",".join(w)} must be > 0')

    @classmethod
    def from_potential(cls, potential: Potential) -> 'Roof':
        return cls(potential.graph, potential.memory, potential.table, potential._envelope)

    @property
    def inf_r(self) -> Number:
        return self.inf()

    @property
    def sup_r(self) -> Number:
        return self.sup()

    @property
    def is_constant(self) -> bool:
        return self.inf_r == self.sup_r

    @property
    def constant_value(self) -> Optional[Number]:
        return self.inf_r if self.is_constant else None

    def _like(self, memory, table) -> 'Potential':
        values = list(table.values())
        if all(v > 0 for v in values):
            return Roof(self.graph, memory, table, self._envelope, self.name)
        return Potential(self.graph, memory, table, self._envelope, self.name)


def as_potential(graph: Graph, memory: Tuple[int, int],
                 table: Mapping[Union[str, Symbols], Number], default: Optional[Number] = None,
                 name: str = 'potential', roof: bool = False,
                 envelope: Optional[HolderEnvelope] = None) -> Potential:
    """Build a Potential or Roof from a table keyed by "a,b" strings or tuples.

    Windows missing from the table take `default` when it is given.
    """
    l, m = memory
    parsed: Dict[Symbols, Number] = {}
    for key, value in table.items():
        symbols = tuple(s.strip() for s in key.split(',')) if isinstance(key, str) else tuple(key)
        parsed[symbols] = value
    if default is not None:
        for w in graph.words(m - l + 1):
            parsed.setdefault(w, default)
    cls = Roof if roof else Potential
    return cls(graph, (l, m), parsed, envelope=envelope, name=name)
