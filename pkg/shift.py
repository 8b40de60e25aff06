# -*- coding: utf-8 -*-
"""
Topological Markov shifts over a finite directed graph.

A Graph is a finite vertex set with an edge relation; its admissible
bi-infinite paths form the shift space. Points of the shift are kept as
eventually periodic sequences:

    ...(past)(past) core (future)(future)...

with the first symbol of the core sitting at coordinate `anchor`. Such
points are closed under the shift and under the Smale bracket, they are
dense, and every coordinate lookup is a finite computation. Points are
stored in a canonical form (primitive cycles, shortest core, past pushed
as far right as possible) so that two Points compare equal exactly when
all their coordinates agree.

Strong connectivity and the period are computed with scipy.sparse.csgraph:
a breadth first search from vertex 0 assigns levels, and the period is
the gcd of level[u] + 1 - level[v] over all edges u->v. Vertices with
equal level modulo the period form the cyclic classes.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from errors import (GraphError, Inadmissible, IsPureCycle, MismatchedZero, MissingInEdge,
                    MissingOutEdge, NotTransitive, UnknownVertex)

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"

log = logging.getLogger(__name__)

Symbols = Tuple[str, ...]


@dataclass(frozen=True)
class Graph:
    """Finite directed graph; build it through validate_graph()."""
    vertices: Symbols
    edges: FrozenSet[Tuple[str, str]]

    @cached_property
    def index(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def successors(self) -> Dict[str, Symbols]:
        succ = {v: [] for v in self.vertices}
        for u, v in self.edges:
            succ[u].append(v)
        return {u: tuple(sorted(vs)) for u, vs in succ.items()}

    @cached_property
    def predecessors(self) -> Dict[str, Symbols]:
        pred = {v: [] for v in self.vertices}
        for u, v in self.edges:
            pred[v].append(u)
        return {v: tuple(sorted(us)) for v, us in pred.items()}

    @cached_property
    def adjacency(self) -> np.ndarray:
        matrix = np.zeros((len(self.vertices), len(self.vertices)), dtype=np.int64)
        for u, v in self.edges:
            matrix[self.index[u], self.index[v]] = 1
        return matrix

    @cached_property
    def csgraph(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(self.adjacency)

    @cached_property
    def _word_cache(self) -> Dict[int, List[Symbols]]:
        return {1: [(v,) for v in self.vertices]}

    def has_edge(self, u: str, v: str) -> bool:
        return (u, v) in self.edges

    def is_admissible(self, symbols: Sequence[str]) -> bool:
        if any(s not in self.index for s in symbols):
            return False
        return all((symbols[i], symbols[i + 1]) in self.edges for i in range(len(symbols) - 1))

    def words(self, length: int) -> List[Symbols]:
        """All admissible words of the given length, in lexicographic order."""
        if length <= 0:
            return [()]
        cache = self._word_cache
        top = max(k for k in cache if k <= length)
        for n in range(top + 1, length + 1):
            cache[n] = [w + (s,) for w in cache[n - 1] for s in self.successors[w[-1]]]
        return cache[length]

    def closed_words(self, length: int) -> List[Symbols]:
        """Admissible words w of the given length with an edge w[-1] -> w[0]."""
        return [w for w in self.words(length) if (w[-1], w[0]) in self.edges]

    def shortest_path(self, source: str, target: str) -> Symbols:
        """Shortest admissible word from source to target, both included.

        Ties are broken by visiting successors in sorted order.
        """
        if source == target:
            return (source,)
        parent = {source: None}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self.successors[u]:
                if v in parent:
                    continue
                parent[v] = u
                if v == target:
                    path = [v]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path))
                queue.append(v)
        raise NotTransitive(source, target)

    def shortest_cycle(self, vertex: str) -> Symbols:
        """Shortest closed word starting at vertex."""
        best = None
        for s in self.successors[vertex]:
            try:
                cycle = (vertex,) + self.shortest_path(s, vertex)[:-1]
            except NotTransitive:
                continue
            if best is None or len(cycle) < len(best):
                best = cycle
        if best is None:
            raise NotTransitive(vertex, vertex)
        return best


def validate_graph(vertices: Iterable[str], edges: Iterable[Sequence[str]]) -> Graph:
    """Build a Graph and check the standing assumptions.

    Every vertex needs an incoming and an outgoing edge, and the graph
    must not be a single cycle.

    Raises:
        GraphError: On an empty vertex set.
        UnknownVertex: If an edge mentions a vertex outside the set.
        MissingOutEdge, MissingInEdge: For a vertex without successor
            or predecessor.
        IsPureCycle: If the graph is one cycle through all vertices.
    """
    verts = tuple(sorted(set(vertices)))
    if not verts:
        raise GraphError('Empty vertex set')
    edge_set = set()
    for edge in edges:
        u, v = edge
        for w in (u, v):
            if w not in verts:
                raise UnknownVertex(w)
        edge_set.add((u, v))
    graph = Graph(verts, frozenset(edge_set))
    for v in verts:
        if not graph.successors[v]:
            raise MissingOutEdge(v)
        if not graph.predecessors[v]:
            raise MissingInEdge(v)
    if all(len(graph.successors[v]) == 1 and len(graph.predecessors[v]) == 1 for v in verts):
        cycle = [verts[0]]
        while graph.successors[cycle[-1]][0] != verts[0]:
            cycle.append(graph.successors[cycle[-1]][0])
        if len(cycle) == len(verts):
            raise IsPureCycle(cycle)
    log.debug('Graph: %d vertices, %d edges', len(verts), len(edge_set))
    return graph


def _unreachable_pair(g: Graph) -> Optional[Tuple[str, str]]:
    for i, u in enumerate(g.vertices):
        order = csgraph.breadth_first_order(g.csgraph, i_start=i, directed=True,
                                            return_predecessors=False)
        if len(order) < len(g.vertices):
            reached = set(int(k) for k in order)
            for j, v in enumerate(g.vertices):
                if j not in reached:
                    return u, v
    return None


def is_transitive(g: Graph) -> bool:
    n_components, _ = csgraph.connected_components(g.csgraph, directed=True, connection='strong')
    return n_components == 1


def period_and_decomposition(g: Graph) -> Tuple[int, List[Symbols]]:
    """Period p and the cyclic classes Sigma_0, ..., Sigma_{p-1}.

    Edges map Sigma_i into Sigma_{i+1 mod p}; Sigma_0 holds the smallest
    vertex.
    """
    if not is_transitive(g):
        raise NotTransitive(*_unreachable_pair(g))
    order, predecessors = csgraph.breadth_first_order(g.csgraph, i_start=0, directed=True,
                                                      return_predecessors=True)
    level = np.zeros(len(g.vertices), dtype=np.int64)
    for node in order[1:]:
        level[node] = level[predecessors[node]] + 1
    period = 0
    for u, v in g.edges:
        period = math.gcd(period, int(level[g.index[u]] - level[g.index[v]] + 1))
    components = [tuple(v for v in g.vertices if level[g.index[v]] % period == c)
                  for c in range(period)]
    return period, components


def is_mixing(g: Graph) -> bool:
    return is_transitive(g) and period_and_decomposition(g)[0] == 1


def cycle_length_gcd(g: Graph) -> int:
    """gcd of the lengths of all cycles of length <= |V|, by enumeration."""
    d = 0
    for n in range(1, len(g.vertices) + 1):
        if g.closed_words(n):
            d = math.gcd(d, n)
    return d


@dataclass(frozen=True)
class Word:
    """A finite word whose first symbol sits at coordinate `anchor`."""
    symbols: Symbols
    anchor: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'symbols', tuple(self.symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return f'_{self.anchor}[{",".join(self.symbols)}]'

    @property
    def end(self) -> int:
        """One past the last coordinate."""
        return self.anchor + len(self.symbols)

    def at(self, i: int) -> str:
        return self.symbols[i - self.anchor]

    def shift(self, k: int) -> 'Word':
        """Image under sigma^k: coordinate i moves to i - k."""
        return Word(self.symbols, self.anchor - k)

    def covers(self, lo: int, hi: int) -> bool:
        return self.anchor <= lo and hi <= self.end

    def restrict(self, lo: int, hi: int) -> 'Word':
        lo, hi = max(lo, self.anchor), min(hi, self.end)
        if hi <= lo:
            return Word((), lo)
        return Word(self.symbols[lo - self.anchor:hi - self.anchor], lo)

    def agrees(self, other: 'Word') -> bool:
        """True if both words carry the same symbols where they overlap."""
        lo, hi = max(self.anchor, other.anchor), min(self.end, other.end)
        return all(self.at(i) == other.at(i) for i in range(lo, hi))

    def matches(self, x: 'Point') -> bool:
        return x.window(self.anchor, self.end) == self.symbols


@dataclass(frozen=True)
class Cylinder:
    """The set of points carrying `word` at its coordinates."""
    word: Word

    @classmethod
    def of(cls, symbols: Sequence[str], anchor: int = 0) -> 'Cylinder':
        return cls(Word(tuple(symbols), anchor))

    def is_empty(self, graph: Graph) -> bool:
        return not graph.is_admissible(self.word.symbols)

    def contains(self, x: 'Point') -> bool:
        return self.word.matches(x)


def extend_word(graph: Graph, word: Word, lo: int, hi: int) -> List[Word]:
    """All admissible words on [min(lo, anchor), max(hi, end)) extending word."""
    lo, hi = min(lo, word.anchor), max(hi, word.end)
    if not word.symbols:
        return [Word(w, lo) for w in graph.words(hi - lo)]
    partial = [word.symbols]
    for _ in range(hi - word.end):
        partial = [w + (s,) for w in partial for s in graph.successors[w[-1]]]
    for _ in range(word.anchor - lo):
        partial = [(s,) + w for w in partial for s in graph.predecessors[w[0]]]
    return [Word(w, lo) for w in sorted(partial)]


def _primitive(cycle: Symbols) -> Symbols:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class Point:
    """Eventually periodic point ...(past) core (future)...

    Coordinates below `anchor` repeat `past` (so x_{anchor-1} = past[-1]),
    coordinates from anchor + len(core) on repeat `future`.
    """
    past: Symbols
    core: Symbols
    future: Symbols
    anchor: int = 0

    def __post_init__(self):
        past, core, future = _primitive(tuple(self.past)), tuple(self.core), _primitive(tuple(self.future))
        if not past or not future:
            raise ValueError('Point cycles must be nonempty')
        anchor = int(self.anchor)
        while core and core[-1] == future[-1]:
            future = (future[-1],) + future[:-1]
            core = core[:-1]
        while core and core[0] == past[0]:
            past = past[1:] + past[:1]
            core = core[1:]
            anchor += 1
        if not core:
            for _ in range(len(past) * len(future) + 1):
                if past == future:
                    # periodic: store the cycle starting at coordinate 0
                    a = anchor % len(past)
                    past = future = past[len(past) - a:] + past[:len(past) - a]
                    anchor = 0
                    break
                if future[0] != past[0]:
                    break
                past, future = past[1:] + past[:1], future[1:] + future[:1]
                anchor += 1
        object.__setattr__(self, 'past', past)
        object.__setattr__(self, 'core', core)
        object.__setattr__(self, 'future', future)
        object.__setattr__(self, 'anchor', anchor)

    @classmethod
    def periodic(cls, cycle: Sequence[str], anchor: int = 0) -> 'Point':
        """The periodic point with x_{anchor + k} = cycle[k mod len]."""
        return cls(tuple(cycle), (), tuple(cycle), anchor)

    def __getitem__(self, i: int) -> str:
        j = i - self.anchor
        if 0 <= j < len(self.core):
            return self.core[j]
        if j >= len(self.core):
            return self.future[(j - len(self.core)) % len(self.future)]
        return self.past[j % len(self.past)]

    def __str__(self) -> str:
        body = ''.join(self.window(-3, 0)) + '.' + ''.join(self.window(0, 4))
        return f'({"".join(self.past)})~{body}~({"".join(self.future)})'

    @property
    def end(self) -> int:
        return self.anchor + len(self.core)

    @property
    def is_periodic(self) -> bool:
        return not self.core and self.past == self.future

    def window(self, lo: int, hi: int) -> Symbols:
        """Coordinates x_lo, ..., x_{hi-1}."""
        return tuple(self[i] for i in range(lo, hi))

    def shift(self, k: int = 1) -> 'Point':
        """sigma^k x, that is (sigma^k x)_i = x_{i+k}."""
        return Point(self.past, self.core, self.future, self.anchor - k)


def check_point(graph: Graph, x: Point) -> Point:
    """Raise Inadmissible unless every coordinate pair of x is an edge."""
    body = x.past + x.core + x.future
    if not graph.is_admissible(body):
        raise Inadmissible(body, 'point body')
    if not graph.has_edge(x.past[-1], x.past[0]) or not graph.has_edge(x.future[-1], x.future[0]):
        raise Inadmissible(body, 'point cycles')
    return x


def shift(x: Point, k: int = 1) -> Point:
    return x.shift(k)


def agree_right(x: Point, i: int, y: Point, j: int) -> bool:
    """True iff x_{i+k} = y_{j+k} for every k >= 0."""
    horizon = max(x.end - i, y.end - j, 0) + len(x.future) * len(y.future)
    return all(x[i + k] == y[j + k] for k in range(horizon + 1))


def agree_left(x: Point, i: int, y: Point, j: int) -> bool:
    """True iff x_{i+k} = y_{j+k} for every k <= 0."""
    horizon = max(i - x.anchor, j - y.anchor, 0) + len(x.past) * len(y.past)
    return all(x[i - k] == y[j - k] for k in range(horizon + 1))


def first_difference(x: Point, y: Point) -> Optional[int]:
    """Smallest |n| with x_n != y_n, or None when x == y."""
    if x == y:
        return None
    reach = max(abs(x.anchor), abs(x.end), abs(y.anchor), abs(y.end))
    reach += len(x.future) * len(y.future) + len(x.past) * len(y.past) + 1
    for n in range(reach + 1):
        if x[n] != y[n] or x[-n] != y[-n]:
            return n
    return None


def metric_d(x: Point, y: Point) -> float:
    """d(x, y) = exp(-min{|n| : x_n != y_n})."""
    n = first_difference(x, y)
    return 0.0 if n is None else math.exp(-n)


def splice(u: Point, v: Point, i: int = 0, j: int = 0) -> Point:
    """The bracket [sigma^i u, sigma^j v]: past of sigma^i u, future of sigma^j v."""
    if u[i] != v[j]:
        raise MismatchedZero(u[i], v[j])
    a, b = u.shift(i), v.shift(j)
    lo, hi = min(a.anchor, 0), max(b.end, 1)
    core = a.window(lo, 1) + b.window(1, hi)
    past = a.window(lo - len(a.past), lo)
    future = b.window(hi, hi + len(b.future))
    return Point(past, core, future, lo)


def smale_bracket(x: Point, y: Point) -> Point:
    """[x, y]: z_i = x_i for i <= 0 and z_i = y_i for i >= 0."""
    return splice(x, y, 0, 0)


def birkhoff_sum(f, x: Point, n: int):
    """f_n(x) for every integer n, with f_0 = 0 and f_n = -f_{|n|} o sigma^n for n < 0.

    `f` is anything with an at(x, k) method returning f(sigma^k x); the
    sum stays exact for int and Fraction tables.
    """
    total = 0
    if n >= 0:
        for k in range(n):
            total += f.at(x, k)
    else:
        for k in range(n, 0):
            total -= f.at(x, k)
    return total


def _choice(rng: np.random.Generator, items: Sequence[str]) -> str:
    return items[int(rng.integers(len(items)))]


def random_point(graph: Graph, rng: np.random.Generator, core_length: int = 6,
                 zero: Optional[str] = None) -> Point:
    """Random eventually periodic point with a core around coordinate 0.

    The core is a random walk through `zero` (or a random vertex) at
    coordinate 0; past and future cycles are closed by shortest paths.
    """
    half = core_length // 2
    start = zero if zero is not None else _choice(rng, graph.vertices)
    right = [start]
    for _ in range(max(core_length - half - 1, 0)):
        right.append(_choice(rng, graph.successors[right[-1]]))
    left = []
    for _ in range(half):
        left.insert(0, _choice(rng, graph.predecessors[left[0] if left else start]))
    core = tuple(left + right)
    u = _choice(rng, graph.predecessors[core[0]])
    past = graph.shortest_path(_choice(rng, graph.successors[u]), u)
    w = _choice(rng, graph.successors[core[-1]])
    future = graph.shortest_path(w, _choice(rng, graph.predecessors[w]))
    return Point(past, core, future, -half)


def complete_word(graph: Graph, word: Word) -> Point:
    """Deterministic point extending an admissible word by shortest cycles."""
    if not word.symbols or not graph.is_admissible(word.symbols):
        raise Inadmissible(word.symbols)
    u = graph.predecessors[word.symbols[0]][0]
    past = graph.shortest_path(graph.successors[u][0], u)
    w = graph.successors[word.symbols[-1]][0]
    future = graph.shortest_path(w, graph.predecessors[w][0])
    return Point(past, word.symbols, future, word.anchor)
