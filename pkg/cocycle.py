# -*- coding: utf-8 -*-
"""
Bowen-Marcus cocycles, su-loops and the arithmeticity verdict.

Two points are stable-related with anchors (m, n) when y_m y_{m+1} ...
equals x_n x_{n+1} ..., and unstable-related when the pasts up to those
coordinates coincide. The stable cocycle is the limit of r_{m+k}(y) -
r_{n+k}(x) as k grows; the unstable one is the limit as k decreases.
For a roof with memory (l, m_r) only finitely many terms differ, so both
limits are finite exact sums.

Chains of such pairs (su-paths) carry a weight, the sum of their leg
cocycles. The weights of closed chains, together with the Birkhoff sums
of the roof over periodic orbits, are the evidence for deciding whether
the roof is arithmetic, that is whether everything lies on a lattice cZ.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from errors import EmptyEvidence, InvalidAnchors
from numeric import Estimate, Number, is_exact, normalize
from potential import Potential
from shift import Graph, Point, Symbols, agree_left, agree_right, birkhoff_sum, random_point, splice
from suspension import FlowPoint, flow_map

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"

log = logging.getLogger(__name__)

STABLE = 'stable'
UNSTABLE = 'unstable'


@dataclass(frozen=True)
class AnchoredPair:
    """x and y with y_m^inf = x_n^inf (stable) or y_-inf^m = x_-inf^n (unstable)."""
    x: Point
    y: Point
    side: str
    anchors: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        m, n = self.anchors
        if self.side == STABLE:
            ok = agree_right(self.y, m, self.x, n)
        elif self.side == UNSTABLE:
            ok = agree_left(self.y, m, self.x, n)
        else:
            raise ValueError(f'Unknown side {self.side!r}')
        if not ok:
            raise InvalidAnchors(self.side, self.anchors)


def reverse_pair(pair: AnchoredPair) -> AnchoredPair:
    m, n = pair.anchors
    return AnchoredPair(pair.y, pair.x, pair.side, (n, m))


def shift_pair(pair: AnchoredPair, k: int = 1) -> AnchoredPair:
    """The pair (sigma^k x, sigma^k y)."""
    m, n = pair.anchors
    return AnchoredPair(pair.x.shift(k), pair.y.shift(k), pair.side, (m - k, n - k))


def compose_pairs(first: AnchoredPair, second: AnchoredPair) -> AnchoredPair:
    """x ~ y and y ~ z give x ~ z on the same side."""
    if first.side != second.side or first.y != second.x:
        raise ValueError('pairs do not chain')
    m1, n1 = first.anchors
    m2, n2 = second.anchors
    s = max(m1, n2) if first.side == STABLE else min(m1, n2)
    return AnchoredPair(first.x, second.y, first.side, (m2 + s - n2, n1 + s - m1))


def bowen_marcus_P(pair: AnchoredPair, roof: Potential, tol: Optional[float] = None,
                   max_terms: Optional[int] = None) -> Estimate:
    """P^s or P^u of a pair, with an error bound from the roof envelope when truncated.

    Stable:   r_m(y) - r_n(x) + sum_{0 <= k < K} [r(sigma^{m+k} y) - r(sigma^{n+k} x)]
    Unstable: r_m(y) - r_n(x) - sum_{1 <= i < K} [r(sigma^{m-i} y) - r(sigma^{n-i} x)]

    where K is the reach of the roof into the past (stable) or the future
    (unstable); later terms vanish identically.
    """
    x, y = pair.x, pair.y
    m, n = pair.anchors
    l, mr = roof.memory
    value = birkhoff_sum(roof, y, m) - birkhoff_sum(roof, x, n)
    if pair.side == STABLE:
        offsets = list(range(0, max(0, -l)))
        sign = 1
    else:
        offsets = [-i for i in range(1, max(0, mr))]
        sign = -1
    error = 0.0
    if max_terms is not None and max_terms < len(offsets):
        error = roof.envelope.tail(max_terms)
        offsets = offsets[:max_terms]
        if tol is not None and error > tol:
            log.warning('Cocycle: truncation error %.3g above tolerance %.3g', error, tol)
    for k in offsets:
        value += sign * (roof.at(y, m + k) - roof.at(x, n + k))
    return Estimate(value, error)


def holder_constant(roof: Potential) -> float:
    """C' with |P^s(x, y)| <= C' d(x, y)^alpha on local stable sets."""
    env = roof.envelope
    return env.C / (1 - math.exp(-env.alpha))


# su-paths.

@dataclass(frozen=True)
class SuPath:
    """Chain start = x^0 -> x^1 -> ... -> x^n of stable and unstable legs."""
    start: Point
    legs: Tuple[AnchoredPair, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'legs', tuple(self.legs))
        current = self.start
        for leg in self.legs:
            if leg.x != current:
                raise ValueError('consecutive legs do not share endpoints')
            current = leg.y

    @property
    def end(self) -> Point:
        return self.legs[-1].y if self.legs else self.start

    @property
    def points(self) -> List[Point]:
        return [self.start] + [leg.y for leg in self.legs]

    @property
    def is_closed(self) -> bool:
        return self.end == self.start

    def __or__(self, other: 'SuPath') -> 'SuPath':
        if other.start != self.end:
            raise ValueError('paths do not chain')
        cls = SuLoop if other.end == self.start else SuPath
        return cls(self.start, self.legs + other.legs)

    def reversed(self) -> 'SuPath':
        return type(self)(self.end, tuple(reverse_pair(leg) for leg in reversed(self.legs)))

    def shifted(self, k: int = 1) -> 'SuPath':
        return type(self)(self.start.shift(k), tuple(shift_pair(leg, k) for leg in self.legs))


@dataclass(frozen=True)
class SuLoop(SuPath):
    def __post_init__(self):
        super().__post_init__()
        if not self.is_closed:
            raise ValueError('su-loop does not close')

    @classmethod
    def trivial(cls, x: Point) -> 'SuLoop':
        return cls(x, (AnchoredPair(x, x, STABLE, (0, 0)),))


def su_path_weight(path: SuPath, roof: Potential, tol: Optional[float] = None) -> Estimate:
    total = Estimate(0, 0.0)
    for leg in path.legs:
        total = total + bowen_marcus_P(leg, roof, tol)
    return total


def su_loop_weight(loop: SuLoop, roof: Potential, tol: Optional[float] = None) -> Estimate:
    """P(gamma), the sum of the leg cocycles around a closed chain."""
    return su_path_weight(loop, roof, tol)


def lift_su_path(path: SuPath, roof: Potential, start_height: Number) -> List[Tuple[FlowPoint, Number]]:
    """Flow points sigma_r^{theta + t_i}(x^i, 0) with running times t_0 = 0, t_i = t_{i-1} + P(leg_i)."""
    FlowPoint(path.start, start_height, roof)
    t = 0
    lifted = [(flow_map(FlowPoint(path.start, 0, roof), start_height), t)]
    for leg in path.legs:
        t = t + bowen_marcus_P(leg, roof).value
        lifted.append((flow_map(FlowPoint(leg.y, 0, roof), start_height + t), t))
    return lifted


def sample_su_loops(graph: Graph, rng: np.random.Generator, count: int,
                    start_points: Optional[Sequence[Point]] = None) -> List[SuLoop]:
    """Quadrilateral loops x -s-> w -u-> [w, sigma^e y] -s-> [sigma^f x, sigma^e y] -u-> x.

    w = [z, sigma^c x] for a random z; the anchor shifts c, e range over
    [-3, 3] and f over [-6, 6] subject to x_f = y_e.
    """
    loops = []
    for i in range(count):
        x = start_points[i % len(start_points)] if start_points else random_point(graph, rng)
        c = int(rng.integers(-3, 4))
        z = random_point(graph, rng, zero=x[c])
        w = splice(z, x, 0, c)
        y = random_point(graph, rng, zero=w[0])
        es = [e for e in range(-3, 4) if y[e] == w[0]]
        e = es[int(rng.integers(len(es)))]
        fs = [f for f in range(-6, 7) if x[f] == y[e]]
        f = fs[int(rng.integers(len(fs)))]
        p = splice(w, y, 0, e)
        q = splice(x, y, f, e)
        loops.append(SuLoop(x, (AnchoredPair(x, w, STABLE, (0, c)),
                                AnchoredPair(w, p, UNSTABLE, (0, 0)),
                                AnchoredPair(p, q, STABLE, (0, 0)),
                                AnchoredPair(q, x, UNSTABLE, (f, 0)))))
    return loops


# Periodic orbits and lattices.

def _min_rotation(word: Symbols) -> Symbols:
    return min(word[i:] + word[:i] for i in range(len(word)))


def periodic_orbit_sums(roof: Potential, graph: Graph, max_len: int) -> List[Tuple[Symbols, Number]]:
    """r_n over every periodic orbit of length n <= max_len, one entry per rotation class."""
    if max_len < 1:
        raise ValueError('max_len must be >= 1')
    sums = []
    for n in range(1, max_len + 1):
        for w in graph.closed_words(n):
            if w == _min_rotation(w):
                sums.append((w, birkhoff_sum(roof, Point.periodic(w), n)))
    return sums


class LatticeFit(NamedTuple):
    generator: Optional[Number]
    residual: float
    informative: bool

    @property
    def label(self) -> str:
        if not self.informative:
            return 'Uninformative'
        return 'Dense' if self.generator is None else f'Lattice({self.generator})'


def _relative_residuals(ratios: np.ndarray, qs: np.ndarray) -> np.ndarray:
    scaled = np.outer(qs, ratios)
    return np.max(np.abs(scaled - np.round(scaled)), axis=1)


def lattice_fit(values: Sequence[Number], tol: float = 1e-6, chunk: int = 4096) -> LatticeFit:
    """Largest c = v_min / Q with every value within tol (in units of c) of cZ.

    Q ranges up to v_min / (10 tol). Exact evidence is fitted by the
    rational gcd; float evidence first tries the continued-fraction
    denominators of the ratios v / v_min, then scans Q in chunks.
    """
    nonzero = [v for v in values if v != 0]
    if not nonzero:
        return LatticeFit(None, 0.0, False)
    v = np.abs(np.array([float(x) for x in nonzero]))
    v_ref = float(v.min())
    qmax = int(math.floor(v_ref / (10 * tol)))
    if qmax < 1:
        return LatticeFit(None, float(v_ref / 2), True)

    if all(is_exact(x) for x in nonzero):
        exact = [abs(Fraction(x)) for x in nonzero]
        c = Fraction(reduce(math.gcd, (q.numerator for q in exact)),
                     reduce(math.lcm, (q.denominator for q in exact)))
        if min(exact) / c <= qmax:
            return LatticeFit(normalize(c), 0.0, True)

    ratios = v / v_ref
    q = reduce(math.lcm, (Fraction(r).limit_denominator(qmax).denominator for r in ratios), 1)
    best_q, best = None, math.inf
    if q <= qmax and _relative_residuals(ratios, np.array([q]))[0] < tol:
        best_q = q
        upper = q
    else:
        upper = qmax
    for start in range(1, upper + 1, chunk):
        qs = np.arange(start, min(start + chunk, upper + 1))
        res = _relative_residuals(ratios, qs)
        hits = np.nonzero(res < tol)[0]
        if hits.size:
            best_q = int(qs[hits[0]])
            break
        k = int(np.argmin(res))
        if res[k] < best:
            best = float(res[k])
            worst_q = int(qs[k])
    if best_q is None:
        c = v_ref / worst_q
        log.debug('Lattice: dense, best candidate %.6g with relative residual %.3g', c, best)
        return LatticeFit(None, best * c, True)
    c = v_ref / best_q
    residual = float(np.max(np.abs(v - c * np.round(v / c))))
    return LatticeFit(c, residual, True)


@dataclass(frozen=True)
class HolonomyReport:
    sampled_weights: List[Number]
    verdict: str
    c: Optional[Number]
    residual: float
    consistent: bool
    channels: Dict[str, str] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f'Lattice({self.c})' if self.verdict == 'Lattice' else self.verdict


def arithmeticity_classify(sums: Sequence[Number], loop_weights: Sequence[Number],
                           tol: float = 1e-6) -> HolonomyReport:
    """Fit both evidence channels and their union to a lattice.

    The verdict comes from the union; the channels must not contradict
    each other (one Dense while the other is a Lattice), otherwise the
    report is marked inconsistent.
    """
    sums, loop_weights = list(sums), list(loop_weights)
    if not any(v != 0 for v in sums + loop_weights):
        raise EmptyEvidence()
    by_channel = {'periodic_sums': lattice_fit(sums, tol), 'loop_weights': lattice_fit(loop_weights, tol)}
    combined = lattice_fit(sums + loop_weights, tol)
    kinds = {'Dense' if f.generator is None else 'Lattice' for f in by_channel.values() if f.informative}
    consistent = len(kinds) <= 1
    if not consistent:
        log.warning('Holonomy: evidence channels disagree (%s)',
                    ', '.join(f.label for f in by_channel.values()))
    verdict = 'Dense' if combined.generator is None else 'Lattice'
    return HolonomyReport(loop_weights, verdict, combined.generator, combined.residual, consistent,
                          {name: f.label for name, f in by_channel.items()})


@dataclass(frozen=True)
class ClassificationReport:
    """Verdict of classify_flow.

    `period_p` is not the period of the base graph. It is the period of
    the recoded constant-roof system, the gcd of the periodic sums r_n(z)/c,
    so the rotation factor has period `flow_period = period_p * c`. It is 1
    when the flow is not arithmetic.
    """
    arithmetic: bool
    c: Optional[Number]
    theta: Optional[float]
    period_p: int
    flow_period: Optional[Number]
    verdict: str
    holonomy: HolonomyReport


def classify_flow(m, roof: Potential, graph: Optional[Graph] = None, tol: float = 1e-6,
                  rng: Optional[np.random.Generator] = None, loops: int = 32,
                  cycle_length: int = 8) -> ClassificationReport:
    """Bernoulli or Bernoulli times a rotation, from the holonomy evidence of the roof.

    In the arithmetic case the period p is the gcd of the periodic sums
    measured in units of the lattice generator c, and the rotation has
    period p * c.
    """
    graph = graph or roof.graph
    rng = rng if rng is not None else np.random.default_rng(0)
    sums = [s for _, s in periodic_orbit_sums(roof, graph, cycle_length)]
    starts = [m.sample_point(rng) for _ in range(loops)]
    weights = [su_loop_weight(loop, roof).value for loop in sample_su_loops(graph, rng, loops, starts)]
    holonomy = arithmeticity_classify(sums, weights, tol)
    if holonomy.verdict == 'Dense':
        log.info('Classify: dense holonomy, Bernoulli')
        return ClassificationReport(False, None, None, 1, None, 'Bernoulli', holonomy)
    c = holonomy.c
    p = reduce(math.gcd, (int(round(float(s / c))) for s in sums), 0) or 1
    flow_period = normalize(Fraction(p) * c) if is_exact(c) else p * c
    log.info('Classify: lattice %s, period %d, rotation period %s', c, p, flow_period)
    return ClassificationReport(True, c, 2 * math.pi / float(c), p, flow_period,
                                'BernoulliTimesRotation', holonomy)
