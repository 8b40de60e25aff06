# -*- coding: utf-8 -*-
"""
Thermodynamic formalism for locally constant potentials.

A one-sided potential phi of memory (0, m) acts through the Ruelle
operator (L f)(x) = sum_{s -> x_0} exp(phi(s x)) f(s x). On functions of
the first L = m + 1 coordinates this is a nonnegative matrix indexed by
admissible words of length L; its Perron root lambda gives the pressure
log(lambda), the right eigenvector h and the left eigenvector xi give the
equilibrium measure nu(w) = h(w) xi(w) on length-L cylinders, and

    g(y) = exp(phi(y_0..y_m)) h(y_0..y_{L-1}) / (lambda h(y_1..y_L))

is its g-function. Longer cylinders follow from the chain rule
nu(w) = g(w_0..w_L) nu(w_1..). Potentials depending on the past are first
made one-sided with reduce_to_one_sided(), which subtracts the coboundary
h - h o sigma of an explicit transfer function built from a fixed past.

Periods larger than one are handled by the solver, which iterates the
p-step operator on one cyclic class.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from errors import (CapExceeded, IncompatibleCylinder, Inadmissible, InvalidPotential,
                    MemoryTooShort)
from numeric import exp
from potential import Potential, Roof
from shift import Graph, Point, Symbols, Word, complete_word, extend_word, period_and_decomposition, \
    validate_graph
from solver import SolverFactory

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"

log = logging.getLogger(__name__)


# One-sided reduction.

def fixed_past_symbol(graph: Graph) -> str:
    """Smallest vertex with a self-loop, else the smallest vertex on a shortest cycle."""
    loops = [v for v in graph.vertices if graph.has_edge(v, v)]
    if loops:
        return loops[0]
    lengths = {v: len(graph.shortest_cycle(v)) for v in graph.vertices}
    shortest = min(lengths.values())
    return min(v for v in graph.vertices if lengths[v] == shortest)


def fixed_past(graph: Graph, symbol: str, depth: int) -> Symbols:
    """Last `depth` symbols of the fixed admissible past in front of `symbol`.

    The past repeats the shortest cycle through the fixed-past symbol and
    then follows the shortest path from it to `symbol`.
    """
    if depth <= 0:
        return ()
    omega = fixed_past_symbol(graph)
    cycle = graph.shortest_cycle(omega)
    seq = graph.shortest_path(omega, symbol)[:-1]
    while len(seq) < depth:
        seq = cycle + seq
    return seq[-depth:]


def reduce_to_one_sided(f: Potential) -> Tuple[Potential, Potential]:
    """Split f = f_s + h - h o sigma with f_s depending on coordinates >= 0 only.

    Returns (f_s, h). The transfer function is
    h(x) = sum_{k >= 0} [f(sigma^k x) - f(sigma^k xhat)] where xhat replaces
    the past of x by the fixed past of x_0; for memory (l, m) only the
    terms k < -l survive, so h has memory (l, max(0, m - l - 1)) and f_s
    has memory (0, max(m - l, 1)).
    """
    graph = f.graph
    l, m = f.memory
    if l >= 0:
        return f, Potential.constant(graph, 0, name='transfer')
    K, span = -l, m - l + 1

    top = max(m - l, 1)
    table_s = {}
    for w in graph.words(top + 1):
        xhat = fixed_past(graph, w[0], K) + w
        yhat = fixed_past(graph, w[1], K) + w[1:]
        total = f.value(w[:span])
        for k in range(K):
            total += f.value(xhat[k:k + span]) - f.value(yhat[k:k + span])
        table_s[w] = total

    top_h = max(0, m - l - 1)
    table_h = {}
    for v in graph.words(top_h + K + 1):
        xhat = fixed_past(graph, v[K], K) + v[K:]
        total = 0
        for k in range(K):
            total += f.value(v[k:k + span]) - f.value(xhat[k:k + span])
        table_h[v] = total

    log.debug('Reduce: %s memory (%d, %d) -> (0, %d)', f.name, l, m, top)
    return (Potential(graph, (0, top), table_s, name=f.name + '^s'),
            Potential(graph, (l, top_h), table_h, name='transfer'))


def _one_sided(p: Potential) -> Potential:
    l, m = p.memory
    if l < 0:
        raise InvalidPotential(f'{p.name} depends on the past; reduce it to one-sided form first')
    return p if l == 0 else p.extended(0, m)


# Transfer operator.

@dataclass(frozen=True)
class CylinderFunction:
    """Function of the first `length` coordinates, as a table on words."""
    length: int
    values: Dict[Symbols, float]

    def __call__(self, word: Sequence[str]) -> float:
        return self.values[tuple(word[:self.length])]

    @classmethod
    def constant(cls, graph: Graph, length: int, value: float = 1.0) -> 'CylinderFunction':
        return cls(length, {w: value for w in graph.words(length)})

    @classmethod
    def indicator(cls, graph: Graph, length: int, prefix: Sequence[str]) -> 'CylinderFunction':
        prefix = tuple(prefix)
        return cls(length, {w: float(w[:len(prefix)] == prefix) for w in graph.words(length)})


def transfer_apply(p: Potential, f: CylinderFunction, depth: int = 1) -> CylinderFunction:
    """Apply the Ruelle operator `depth` times."""
    p = _one_sided(p)
    m = p.memory[1]
    needed = max(m, 1)
    if f.length < needed:
        raise MemoryTooShort(f.length, needed)
    graph = p.graph
    for _ in range(depth):
        values = {}
        for u in graph.words(f.length):
            total = 0.0
            for s in graph.predecessors[u[0]]:
                y = (s,) + u
                total += exp(p.value(y[:m + 1])) * f(y)
            values[u] = total
        f = CylinderFunction(f.length, values)
    return f


def word_matrix(p: Potential) -> Tuple[List[Symbols], np.ndarray, List[np.ndarray]]:
    """Ruelle matrix on length-L words and the cyclic classes of its indices.

    A[u, v] = exp(phi(v)) when v = (s, u_0, ..., u_{L-2}) with s -> u_0.
    """
    p = _one_sided(p)
    graph = p.graph
    L = p.memory[1] + 1
    words = graph.words(L)
    index = {w: i for i, w in enumerate(words)}
    matrix = np.zeros((len(words), len(words)))
    for u in words:
        for s in graph.predecessors[u[0]]:
            v = (s,) + u[:-1]
            matrix[index[u], index[v]] = exp(p.value(v))
    period, components = period_and_decomposition(graph)
    klass = {v: c for c, comp in enumerate(components) for v in comp}
    classes = [np.array([i for i, w in enumerate(words) if klass[w[0]] == c], dtype=np.int64)
               for c in range(period)]
    return words, matrix, classes


class PressureResult(NamedTuple):
    eigenvalue: float
    log_pressure: float
    residual: float
    iterations: int
    word_length: int


def _perron(p: Potential, solver: str, tol: Optional[float], max_iterations: Optional[int],
            logger: Optional[logging.Logger]):
    words, matrix, classes = word_matrix(p)
    kwargs = {}
    if solver == 'power':
        if tol is not None:
            kwargs['tol'] = tol
        if max_iterations is not None:
            kwargs['max_iterations'] = max_iterations
    engine = SolverFactory.create_solver(solver, logger, **kwargs)
    return words, engine.perron(matrix, classes), engine.solver_info


def pressure(p: Potential, solver: str = 'power', tol: Optional[float] = None,
             max_iterations: Optional[int] = None,
             logger: Optional[logging.Logger] = None) -> PressureResult:
    """Topological pressure log(lambda) of a one-sided potential."""
    words, data, _ = _perron(p, solver, tol, max_iterations, logger)
    return PressureResult(data.eigenvalue, math.log(data.eigenvalue), data.residual,
                          data.iterations, len(words[0]))


# Gibbs measures.

class GibbsMeasure:
    """Equilibrium measure of a one-sided locally constant potential."""

    def __init__(self, potential: Potential, eigenvalue: float, words: Sequence[Symbols],
                 right: np.ndarray, left: np.ndarray, solver_info: str = '', residual: float = 0.0,
                 iterations: int = 0):
        self.potential = _one_sided(potential)
        self.graph: Graph = potential.graph
        self.eigenvalue = float(eigenvalue)
        self.words = list(words)
        self.L = len(self.words[0])
        self.index = {w: i for i, w in enumerate(self.words)}
        self.right = np.asarray(right, dtype=float) / np.max(right)
        weights = self.right * np.asarray(left, dtype=float)
        self.masses = weights / weights.sum()
        self.solver_info = solver_info
        self.residual = residual
        self.iterations = iterations
        self._short: Dict[int, Dict[Symbols, float]] = {}
        self._g: Dict[Symbols, float] = {}
        for u in self.words:
            for s in self.graph.predecessors[u[0]]:
                y = (s,) + u
                v = y[:self.L]
                self._g[y] = (exp(self.potential.value(v)) * self.right[self.index[v]]
                              / (self.eigenvalue * self.right[self.index[u]]))
        self._next: Dict[Symbols, Tuple[Symbols, np.ndarray]] = {}

    def __repr__(self) -> str:
        return f'GibbsMeasure({self.potential.name}, lambda={self.eigenvalue:.12g}, L={self.L})'

    @property
    def log_pressure(self) -> float:
        return math.log(self.eigenvalue)

    @property
    def h_table(self) -> Dict[Symbols, float]:
        return {w: float(self.right[i]) for i, w in enumerate(self.words)}

    @property
    def xi_table(self) -> Dict[Symbols, float]:
        return {w: float(self.masses[i] / self.right[i]) for i, w in enumerate(self.words)}

    def g(self, window: Sequence[str]) -> float:
        """g on a word of length L + 1."""
        key = tuple(window)
        if len(key) < self.L + 1:
            raise MemoryTooShort(len(key), self.L + 1)
        try:
            return self._g[key[:self.L + 1]]
        except KeyError:
            raise Inadmissible(key[:self.L + 1], 'g-function')

    def cylinder_mass(self, word: Union[Word, Sequence[str]]) -> float:
        """nu of the cylinder of a word; the anchor is irrelevant by shift invariance."""
        symbols = word.symbols if isinstance(word, Word) else tuple(word)
        n = len(symbols)
        if n == 0:
            return 1.0
        if not self.graph.is_admissible(symbols):
            return 0.0
        if n < self.L:
            if n not in self._short:
                table: Dict[Symbols, float] = {}
                for w, mass in zip(self.words, self.masses):
                    table[w[:n]] = table.get(w[:n], 0.0) + float(mass)
                self._short[n] = table
            return self._short[n][symbols]
        mass = float(self.masses[self.index[symbols[n - self.L:]]])
        for i in range(n - self.L):
            mass *= self._g[symbols[i:i + self.L + 1]]
        return mass

    def integral(self, f: Potential) -> float:
        """Integral of a locally constant function."""
        return sum(self.cylinder_mass(w) * float(v) for w, v in f.table.items())

    def entropy(self) -> float:
        """Measure-theoretic entropy, -integral of log g."""
        return -sum(self.cylinder_mass(y) * math.log(g) for y, g in self._g.items())

    def variational_gap(self) -> float:
        """log(lambda) - (entropy + integral of phi); zero for an equilibrium measure."""
        return self.log_pressure - self.entropy() - self.integral(self.potential)

    def log_g_variations(self) -> List[float]:
        """var_k(log g) for k = 1..L+1, agreement on the first k coordinates."""
        result = []
        for k in range(1, self.L + 2):
            groups: Dict[Symbols, List[float]] = {}
            for y, g in self._g.items():
                groups.setdefault(y[:k], []).append(math.log(g))
            result.append(max(max(v) - min(v) for v in groups.values()))
        return result

    def gibbs_constant(self) -> float:
        """exp(sum_{k >= 2} var_k log g), bounding the local product distortion."""
        return math.exp(sum(self.log_g_variations()[1:]))

    def transition(self, context: Symbols) -> Tuple[Symbols, np.ndarray]:
        """Next-symbol law given the last L symbols."""
        if context not in self._next:
            symbols = self.graph.successors[context[-1]]
            probs = np.array([self.cylinder_mass(context + (s,)) for s in symbols])
            self._next[context] = (symbols, probs / probs.sum())
        return self._next[context]

    def sample_word(self, n: int, rng: np.random.Generator) -> Symbols:
        """A word of length n drawn from nu."""
        start = self.words[int(rng.choice(len(self.words), p=self.masses))]
        seq = list(start)
        while len(seq) < n:
            symbols, probs = self.transition(tuple(seq[-self.L:]))
            seq.append(symbols[int(rng.choice(len(symbols), p=probs))])
        return tuple(seq[:n])

    def sample_point(self, rng: np.random.Generator, half: int = 3) -> Point:
        """Point whose window [-half, half] is drawn from nu."""
        return complete_word(self.graph, Word(self.sample_word(2 * half + 1, rng), -half))

    def with_masses(self, masses: Dict[Symbols, float]) -> 'GibbsMeasure':
        """Same Perron data with the left vector rebuilt as nu / h."""
        left = np.array([masses[w] for w in self.words]) / self.right
        return GibbsMeasure(self.potential, self.eigenvalue, self.words, self.right, left,
                            self.solver_info, self.residual, self.iterations)


def equilibrium_measure(p: Potential, tol: Optional[float] = None, solver: str = 'power',
                        max_iterations: Optional[int] = None,
                        logger: Optional[logging.Logger] = None) -> GibbsMeasure:
    """Gibbs measure of a one-sided potential on a transitive graph."""
    words, data, info = _perron(p, solver, tol, max_iterations, logger)
    measure = GibbsMeasure(p, data.eigenvalue, words, data.right, data.left, info, data.residual,
                           data.iterations)
    (logger or log).info('Gibbs: %s, pressure %.15g', measure, measure.log_pressure)
    return measure


def g_function(m: GibbsMeasure, y: Union[Point, Word, Sequence[str]]) -> float:
    """g at a future y_0 y_1 ..., given as a Point or as a word of length >= L + 1."""
    if isinstance(y, Point):
        return m.g(y.window(0, m.L + 1))
    symbols = y.symbols if isinstance(y, Word) else tuple(y)
    return m.g(symbols)


def conditional_cylinder_mass(m: GibbsMeasure, future: Union[Word, Sequence[str]],
                              past_word: Sequence[str]) -> float:
    """g_n(x_{-n}...) = g(x_{-n}...) ... g(x_{-1}...), the mass of past_word given the future."""
    future = tuple(future.symbols if isinstance(future, Word) else future)
    past = tuple(past_word)
    if not past:
        return 1.0
    if len(future) < m.L:
        raise MemoryTooShort(len(future), m.L)
    seq = past + future
    if not m.graph.is_admissible(seq):
        raise Inadmissible(seq, 'past and future')
    value = 1.0
    for i in range(len(past)):
        value *= m.g(seq[i:i + m.L + 1])
    return value


# Projection measures and local product structure.

STABLE = 'stable'
UNSTABLE = 'unstable'


@dataclass(frozen=True)
class ProjectionMeasure:
    """Image of nu restricted to [x_0] under y -> [y, x] (stable) or y -> [x, y] (unstable)."""
    anchor_point: Point
    side: str
    underlying: GibbsMeasure = field(compare=False)

    def __post_init__(self):
        if self.side not in (STABLE, UNSTABLE):
            raise ValueError(f'Unknown side {self.side!r}')

    def total_mass(self) -> float:
        return self.underlying.cylinder_mass((self.anchor_point[0],))


def projection_measure_mass(pm: ProjectionMeasure, c) -> float:
    """Mass of a cylinder under a projection measure.

    The stable projection keeps the future of the anchor point, so the
    cylinder must agree with it on coordinates >= 0 and its mass is the
    nu-mass of its coordinates <= 0. The unstable case mirrors this.
    """
    word = c.word if hasattr(c, 'word') else c
    x, graph = pm.anchor_point, pm.underlying.graph
    if pm.side == STABLE:
        fixed = range(max(word.anchor, 0), word.end)
        lo, hi = min(word.anchor, 0), 1
    else:
        fixed = range(word.anchor, min(word.end, 1))
        lo, hi = 0, max(word.end, 1)
    for i in fixed:
        if word.at(i) != x[i]:
            raise IncompatibleCylinder(f'{word} disagrees with the anchor point at coordinate {i}')
    total = 0.0
    for ext in extend_word(graph, Word((x[0],), 0), lo, hi):
        if ext.agrees(word):
            total += pm.underlying.cylinder_mass(ext)
    return total


@dataclass(frozen=True)
class LocalProductReport:
    C_vw_estimate: float
    worst_ratio: float
    raw_min: float
    raw_max: float
    certified_bound: float
    certified: bool
    cylinders: int


def local_product_check(m: GibbsMeasure, edge: Tuple[str, str], sample_depth: int) -> LocalProductReport:
    """Compare nu(_l[w_l..w_n]) with nu(_l[w_l..w_0]) nu(_0[w_0..w_n]) through an edge.

    The raw ratio nu(full) / (nu(past) nu(future)) is collected together
    with its normalization by nu[v]; the latter equals 1 for Markov
    measures and is certified against the distortion bound exp(sum var_k
    log g) of the g-function.
    """
    v, w = edge
    if not m.graph.has_edge(v, w):
        raise Inadmissible((v, w), 'edge')
    nu_v = m.cylinder_mass((v,))
    raw_values = []
    for lo in range(-sample_depth, 1):
        for hi in range(0, sample_depth + 1):
            base = Word((v, w) if hi >= 1 else (v,), 0)
            for word in extend_word(m.graph, base, lo, hi + 1):
                full = m.cylinder_mass(word)
                past = m.cylinder_mass(word.restrict(lo, 1))
                future = m.cylinder_mass(word.restrict(0, hi + 1))
                raw_values.append(full / (past * future))
    raw = np.array(raw_values)
    normalized = raw * nu_v
    worst = float(max(normalized.max(), 1.0 / normalized.min()))
    bound = m.gibbs_constant()
    return LocalProductReport(float(raw.max()), worst, float(raw.min()), float(raw.max()), bound,
                              bool(worst <= bound * (1 + 1e-9)), len(raw_values))


# Return-word recoding.

@dataclass(frozen=True)
class ReturnWordRecoding:
    """Induced system on first-return words of a base word."""
    graph: Graph
    roof: Potential
    states: Dict[str, Symbols]
    return_times: Dict[str, int]
    base_word: Symbols
    truncated: bool

    def expand(self, sequence: Sequence[str]) -> Symbols:
        """Original symbols visited by consecutive induced states, overlaps removed."""
        out: List[str] = []
        for state in sequence:
            out.extend(self.states[state][:self.return_times[state]])
        return tuple(out)


def return_words(graph: Graph, base_word: Sequence[str], cap: int) -> Tuple[List[Symbols], bool]:
    """First-return words a xi a with return time |a| + |xi| <= cap."""
    a = tuple(base_word)
    if not graph.is_admissible(a):
        raise Inadmissible(a, 'base word')
    found, truncated = [], False
    stack = [a]
    while stack:
        seq = stack.pop()
        for s in graph.successors[seq[-1]]:
            nxt = seq + (s,)
            time = len(nxt) - len(a)
            if nxt[-len(a):] == a:
                found.append(nxt)
            elif time >= cap:
                truncated = True
            else:
                stack.append(nxt)
    return sorted(found, key=lambda w: (len(w), w)), truncated


def recode_return_words(graph: Graph, roof: Potential, base_word: Sequence[str],
                        cap: int = 8) -> ReturnWordRecoding:
    """Recode over first returns to [base_word], with induced roof R = r_{return time}.

    Raises CapExceeded when the base word does not recur within `cap`.
    The induced graph is complete on the return words, since each of them
    starts and ends with the base word.
    """
    a = tuple(base_word)
    words, truncated = return_words(graph, a, cap)
    if not words:
        raise CapExceeded(f'first return to {",".join(a)}', cap)
    if truncated:
        log.warning('Recode: return words of %s truncated at length %d', ','.join(a), cap)
    states = {'.'.join(w): w for w in words}
    times = {sid: len(w) - len(a) for sid, w in states.items()}
    ids = sorted(states)
    induced = validate_graph(ids, [(u, v) for u in ids for v in ids])

    l, m = roof.memory
    t_min = min(times.values())
    left = -(-max(0, -l) // t_min)
    right = -(-max(0, m - len(a) + 1) // t_min)
    table = {}
    for window in induced.words(left + right + 1):
        # Lay the states out on the original coordinates, state `left` at 0.
        coords: Dict[int, str] = {}
        start = -sum(times[s] for s in window[:left])
        for state in window:
            for k, sym in enumerate(states[state]):
                coords[start + k] = sym
            start += times[state]
        t0 = times[window[left]]
        total = 0
        for k in range(t0):
            total += roof.value(tuple(coords[i] for i in range(k + l, k + m + 1)))
        table[window] = total
    cls = Roof if all(v > 0 for v in table.values()) else Potential
    induced_roof = cls(induced, (-left, right), table, name=roof.name + '^induced')
    log.info('Recode: %d return words of %s (cap %d)', len(states), ','.join(a), cap)
    return ReturnWordRecoding(induced, induced_roof, states, times, a, truncated)


@dataclass(frozen=True)
class OneSidedRoof:
    graph: Graph
    roof: Roof
    transfer: Potential
    recoding: Optional[ReturnWordRecoding]


def positive_one_sided_roof(graph: Graph, roof: Roof, cap: int = 8) -> OneSidedRoof:
    """A positive roof independent of the past, cohomologous to `roof`.

    The transfer function is shifted by a constant so that 0 < h < inf(r)/2.
    When its oscillation is too large for that, the flow is recoded over
    first returns to a word whose return time n_0 satisfies
    osc(h) < n_0 inf(r) / 2, where the induced one-sided roof is positive.
    """
    rs, h = reduce_to_one_sided(roof)
    inf_r = roof.inf_r
    low, high = min(h.table.values()), max(h.table.values())
    osc = high - low
    if osc < inf_r / 2:
        margin = (inf_r / 2 - osc) / 2
        shifted = Potential(graph, h.memory, {w: v - low + margin for w, v in h.table.items()},
                            name='transfer')
        return OneSidedRoof(graph, Roof.from_potential(rs), shifted, None)

    n0 = int(math.floor(2 * osc / inf_r)) + 1
    for length in range(1, cap + 1):
        for word in graph.words(length):
            found, _ = return_words(graph, word, cap)
            if found and min(len(w) - length for w in found) >= n0:
                recoding = recode_return_words(graph, rs, word, cap)
                if not isinstance(recoding.roof, Roof):
                    raise InvalidPotential('induced one-sided roof is not positive')
                log.info('Roof: recoded over returns to %s (n0=%d)', ','.join(word), n0)
                return OneSidedRoof(recoding.graph, recoding.roof, h, recoding)
    raise CapExceeded(f'search for a base word with return time >= {n0}', cap)
