# -*- coding: utf-8 -*-
"""
Topological Markov flows.

The suspension of a shift under a positive roof r is the set of pairs
(x, t) with 0 <= t < r(x), flowing upward at unit speed and jumping from
(x, r(x)) to (sigma x, 0). Heights are kept exact whenever the roof table
and the flow times are ints or Fractions.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Tuple

from scipy import optimize

from errors import HeightOutOfRange, IntervalAboveRoof, RoofNotConstant, RoofNotOne
from numeric import Number
from potential import Potential, Roof
from shift import Graph, Point, Symbols, Word, extend_word, metric_d, period_and_decomposition, \
    smale_bracket, validate_graph
from thermo import GibbsMeasure, equilibrium_measure, pressure, reduce_to_one_sided

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowPoint:
    base: Point
    height: Number
    roof: Roof = field(compare=False, repr=False)

    def __post_init__(self):
        top = self.roof.at(self.base)
        if not 0 <= self.height < top:
            raise HeightOutOfRange(self.height, top)

    @property
    def roof_value(self) -> Number:
        return self.roof.at(self.base)


def flow_map(z: FlowPoint, tau: Number) -> FlowPoint:
    """sigma_r^tau (x, t) = (sigma^n x, t + tau - r_n(x)) for the unique admissible n."""
    x, t, roof = z.base, z.height + tau, z.roof
    top = roof.at(x)
    while t >= top:
        t -= top
        x = x.shift(1)
        top = roof.at(x)
    while t < 0:
        x = x.shift(-1)
        t += roof.at(x)
    return FlowPoint(x, t, roof)


# Bowen-Walters distance.

def _horizontal(x: Point, y: Point, t: float) -> float:
    """Length of the horizontal segment from (x, t) to (y, t) on the unit roof."""
    if x == y:
        return 0.0
    return (1 - t) * metric_d(x, y) + t * metric_d(x.shift(1), y.shift(1))


def _orbit_offset(x: Point, y: Point, reach: int = 3) -> Optional[int]:
    for j in range(-reach, reach + 1):
        if x.shift(j) == y:
            return j
    return None


def _bw_one_way(x: Point, s: float, y: Point, u: float, budget: int) -> float:
    best = math.inf
    j = _orbit_offset(x, y)
    if j is not None:
        best = abs(j + u - s)
    heights = sorted({h for h in (0.0, s, u) if 0 <= h < 1})
    for i in (-1, 0, 1):
        a = x.shift(i)
        for k in (-1, 0, 1):
            b = y.shift(k)
            for h in heights:
                pieces = (abs(i + h - s), _horizontal(a, b, h), abs(k + h - u))
                if sum(p > 0 for p in pieces) <= budget:
                    best = min(best, sum(pieces))
            if budget < 5 or a[0] != b[0]:
                continue
            q = smale_bracket(a, b)
            for h1 in heights:
                for h2 in heights:
                    pieces = (abs(i + h1 - s), _horizontal(a, q, h1), abs(h2 - h1),
                              _horizontal(q, b, h2), abs(k + h2 - u))
                    if sum(p > 0 for p in pieces) <= budget:
                        best = min(best, sum(pieces))
    return best


def bw_distance_upper(z: FlowPoint, w: FlowPoint, segment_budget: int = 3) -> float:
    """Upper bound on the Bowen-Walters distance from basic paths of at most K segments.

    Both points are moved to the unit roof by (x, t) -> (x, t / r(x)); the
    bound is the shortest enumerated path, minimised over both directions,
    and inf when no enumerated path fits the budget.
    """
    if segment_budget < 1:
        raise ValueError('segment budget must be >= 1')
    s = float(z.height) / float(z.roof_value)
    u = float(w.height) / float(w.roof_value)
    return min(_bw_one_way(z.base, s, w.base, u, segment_budget),
               _bw_one_way(w.base, u, z.base, s, segment_budget))


# Flow measures.

class FlowMeasure:
    """Suspension of a Gibbs measure: mu = (1 / int r dnu) nu x Lebesgue."""

    def __init__(self, base: GibbsMeasure, roof: Roof, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)
        self.base = base
        self.roof = roof
        self.normalizer = base.integral(roof)
        self.logger.debug('Flow: normalizer %.15g', self.normalizer)

    @property
    def graph(self) -> Graph:
        return self.base.graph

    def roof_range(self, word: Word) -> Tuple[Number, Number]:
        return self.roof.range_on(word)

    def block_mass(self, word: Word, a: Number = 0, b: Optional[Number] = None) -> float:
        """mu of [word] x [a, b); b=None stands for the roof itself."""
        low, _ = self.roof.range_on(word)
        if b is not None and b > low:
            raise IntervalAboveRoof(b, low)
        if a >= low or a < 0:
            raise IntervalAboveRoof(a, low)
        if b is not None:
            return self.base.cylinder_mass(word) * float(b - a) / self.normalizer
        l, m = self.roof.memory
        total = 0.0
        for ext in extend_word(self.graph, word, l, m + 1):
            top = self.roof.value(ext.restrict(l, m + 1).symbols)
            total += self.base.cylinder_mass(ext) * float(top - a)
        return total / self.normalizer


def suspend_measure(base: GibbsMeasure, roof: Roof) -> FlowMeasure:
    if base.graph != roof.graph:
        raise ValueError('measure and roof live on different graphs')
    return FlowMeasure(base, roof)


def induce_measure(fm: FlowMeasure) -> GibbsMeasure:
    """Recover the base measure from flow masses of cylinder x [0, min roof) blocks."""
    base = fm.base
    flows: Dict[Symbols, Tuple[float, float]] = {}
    for w in base.words:
        low, _ = fm.roof_range(Word(w, 0))
        flows[w] = (fm.block_mass(Word(w, 0), 0, low), float(low))
    normalizer = 1.0 / sum(mass / low for mass, low in flows.values())
    return base.with_masses({w: mass * normalizer / low for w, (mass, low) in flows.items()})


def abramov_entropy(base_entropy: float, fm: FlowMeasure) -> float:
    """Flow entropy h_nu(sigma) / int r dnu."""
    if base_entropy < 0:
        raise ValueError(f'entropy must be >= 0, got {base_entropy}')
    return base_entropy / fm.normalizer


def constant_roof_recode(graph: Graph, roof: Roof, p: Optional[int] = None) -> Tuple[Graph, Roof]:
    """Replace the base by its mixing component under sigma^p and the roof by p * c.

    Symbols of the new graph are the admissible paths of length p starting
    in the class of the smallest vertex, written as ids joined by "|".
    """
    if not roof.is_constant:
        raise RoofNotConstant(f'{roof.name} takes values in [{roof.inf_r}, {roof.sup_r}]')
    c = roof.constant_value
    if p is None:
        p, _ = period_and_decomposition(graph)
    if p == 1:
        return graph, roof
    _, components = period_and_decomposition(graph)
    first = set(components[0])
    paths = [w for w in graph.words(p) if w[0] in first]
    ids = {'|'.join(w): w for w in paths}
    edges = [(u, v) for u, a in ids.items() for v, b in ids.items() if graph.has_edge(a[-1], b[0])]
    recoded = validate_graph(ids, edges)
    log.info('Recode: period %d, %d symbols, roof %s', p, len(ids), p * c)
    return recoded, Roof.constant(recoded, p * c, name=roof.name)


class ProductCoordinates(NamedTuple):
    """rho(x, s) = (S^s x, s mod 1), with S^s x written as (base point, fractional time)."""
    time: Number
    circle: Number
    base: Point


def product_coordinates(z: FlowPoint, t: Number = 0) -> ProductCoordinates:
    """Coordinates of T^t z in the product of the base with the unit circle."""
    if not (z.roof.is_constant and z.roof.constant_value == 1):
        raise RoofNotOne(f'{z.roof.name} is not identically 1')
    time = z.height + t
    whole = math.floor(time)
    return ProductCoordinates(time, time - whole, z.base.shift(whole))


def check_product_conjugacy(z: FlowPoint, t: int) -> bool:
    """rho o T^t == (S^t x R^t) o rho at an integer time t."""
    moved = product_coordinates(flow_map(z, t))
    direct = product_coordinates(z, t)
    return moved.base == direct.base and moved.circle == direct.circle


def flow_entropy(graph: Graph, roof: Roof, solver: str = 'power') -> float:
    """Topological entropy of the flow: the root s of P(-s r) = 0."""
    one_sided, _ = reduce_to_one_sided(roof)
    h_top = pressure(Potential.constant(graph, 0), solver=solver).log_pressure
    lo, hi = h_top / float(roof.sup_r), h_top / float(roof.inf_r)
    if hi - lo <= 1e-15 * max(hi, 1.0):
        return hi

    def f(s: float) -> float:
        return pressure(one_sided.scaled(-s), solver=solver).log_pressure

    if f(lo) <= 0:
        return lo
    if f(hi) >= 0:
        return hi
    return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-14)


def flow_mme(graph: Graph, roof: Roof, solver: str = 'power') -> FlowMeasure:
    """Measure of maximal entropy of the flow, suspended from the equilibrium measure of -s r."""
    s = flow_entropy(graph, roof, solver)
    one_sided, _ = reduce_to_one_sided(roof)
    base = equilibrium_measure(one_sided.scaled(-s), solver=solver)
    return FlowMeasure(base, roof)
