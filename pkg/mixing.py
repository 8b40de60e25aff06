# -*- coding: utf-8 -*-
"""
Partitions, d-bar distances and empirical mixing reports.

Every measurable set handled here is a finite union of blocks, a block
being a cylinder [w] of the base, optionally times a height interval
[a, b) of the suspension (b = None runs up to the roof). A CellSpace
refines a collection of blocks into disjoint cells whose masses are
Gibbs cylinder masses times interval lengths, so intersections, symmetric
differences and joint distributions all reduce to sums over cells.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, \
    Tuple, Union

import numpy as np
import ot

from errors import AtomCountMismatch, CapExceeded, DeltaTooLarge, HypothesisFailed, \
    ResolutionExceeded, ShapeMismatch
from numeric import Number
from potential import Potential
from shift import Graph, Symbols, Word, extend_word
from suspension import FlowMeasure
from thermo import GibbsMeasure

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"

log = logging.getLogger(__name__)

DEFAULT_CELL_CAP = 200000
DEFAULT_DBAR_CAP = 4096

Measure = Union[FlowMeasure, GibbsMeasure]
Labels = Tuple[int, ...]


@dataclass(frozen=True)
class Block:
    """[word] on the base, times [a, b) when interval is given (b=None: up to the roof)."""
    word: Word
    interval: Optional[Tuple[Number, Optional[Number]]] = None

    def __str__(self) -> str:
        if self.interval is None:
            return str(self.word)
        a, b = self.interval
        return f'{self.word}x[{a},{"r" if b is None else b})'


BlockSet = Tuple[Block, ...]


@dataclass(frozen=True)
class OrderedPartition:
    atoms: Tuple[BlockSet, ...]

    def __post_init__(self):
        object.__setattr__(self, 'atoms', tuple(tuple(a) for a in self.atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def blocks(self) -> List[Block]:
        return [b for atom in self.atoms for b in atom]


def cylinder_partition(graph: Graph, lo: int, hi: int, heights: bool = False) -> OrderedPartition:
    """Atoms [w] for the admissible words on coordinates lo..hi-1, as full columns when heights is set."""
    interval = (0, None) if heights else None
    return OrderedPartition(tuple((Block(Word(w, lo), interval),) for w in graph.words(hi - lo)))


def height_partition(breaks: Sequence[Number]) -> OrderedPartition:
    """Atoms Sigma x [b_i, b_{i+1}), the last one running up to the roof."""
    edges = list(breaks) + [None]
    return OrderedPartition(tuple((Block(Word((), 0), (edges[i], edges[i + 1])),)
                                  for i in range(len(breaks))))


# Cells.

class CellSpace:
    """Common refinement of a family of blocks into cells with exact masses."""

    def __init__(self, measure: Measure, blocks: Iterable[Block], cap: int = DEFAULT_CELL_CAP,
                 logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)
        self.measure = measure
        self.flow = isinstance(measure, FlowMeasure)
        base = measure.base if self.flow else measure
        graph = base.graph
        blocks = list(blocks)

        lo = min([b.word.anchor for b in blocks if len(b.word)] + [0])
        hi = max([b.word.end for b in blocks if len(b.word)] + [1])
        if self.flow:
            l, m = measure.roof.memory
            lo, hi = min(lo, l), max(hi, m + 1)
        elif any(b.interval is not None for b in blocks):
            raise ValueError('height intervals need a flow measure')
        self.lo, self.hi = lo, hi

        count = int(np.linalg.matrix_power(graph.adjacency, hi - lo - 1).sum())
        if count > cap:
            raise ResolutionExceeded(count, cap)
        words = graph.words(hi - lo)

        breaks = {0}
        for b in blocks:
            if b.interval is not None:
                breaks.update(v for v in b.interval if v is not None)
        breaks = sorted(breaks)

        self.words: List[Symbols] = []
        bottoms, tops, roofs, masses = [], [], [], []
        for w in words:
            nu = base.cylinder_mass(w)
            if not self.flow:
                self.words.append(w)
                bottoms.append(0.0)
                tops.append(0.0)
                roofs.append(0.0)
                masses.append(nu)
                continue
            top = measure.roof.value(w[l - lo:m - lo + 1])
            levels = [t for t in breaks if t < top] + [top]
            for s0, s1 in zip(levels, levels[1:]):
                self.words.append(w)
                bottoms.append(s0)
                tops.append(s1)
                roofs.append(top)
                masses.append(nu * float(s1 - s0) / measure.normalizer)
            if len(self.words) > cap:
                raise ResolutionExceeded(len(self.words), cap)

        index = graph.index
        self.symbols = np.array([[index[s] for s in w] for w in self.words], dtype=np.int64)
        self.bottoms = np.array(bottoms, dtype=object)
        self.tops = np.array(tops, dtype=object)
        self.roofs = np.array(roofs, dtype=object)
        self.masses = np.array(masses, dtype=float)
        self._index = index
        self.logger.debug('Cells: %d cells on coordinates [%d, %d)', len(self), lo, hi)

    def __len__(self) -> int:
        return len(self.masses)

    def block_indicator(self, block: Block) -> np.ndarray:
        w = block.word
        if len(w) and (w.anchor < self.lo or w.end > self.hi):
            raise ValueError(f'block {block} lies outside the refinement window')
        mask = np.ones(len(self), dtype=bool)
        if len(w):
            target = np.array([self._index[s] for s in w.symbols], dtype=np.int64)
            cols = self.symbols[:, w.anchor - self.lo:w.end - self.lo]
            mask &= np.all(cols == target, axis=1)
        if block.interval is not None:
            a, b = block.interval
            mask &= np.array([a <= s0 for s0 in self.bottoms], dtype=bool)
            if b is not None:
                mask &= np.array([s1 <= b for s1 in self.tops], dtype=bool)
        return mask

    def indicator(self, blockset: Iterable[Block]) -> np.ndarray:
        mask = np.zeros(len(self), dtype=bool)
        for block in blockset:
            mask |= self.block_indicator(block)
        return mask

    def mass(self, mask: np.ndarray) -> float:
        return float(self.masses[mask].sum())

    def labels(self, partition: OrderedPartition) -> np.ndarray:
        """Atom index of every cell, -1 outside all atoms."""
        labels = np.full(len(self), -1, dtype=np.int64)
        for i, atom in enumerate(partition.atoms):
            mask = self.indicator(atom)
            if np.any(labels[mask] >= 0):
                raise ValueError(f'atom {i} overlaps an earlier atom')
            labels[mask] = i
        return labels

    def defect(self, partition: OrderedPartition) -> float:
        return float(self.masses[self.labels(partition) < 0].sum())


def _space(measure: Measure, partitions: Iterable[OrderedPartition], extra: Iterable[Block] = (),
           cap: int = DEFAULT_CELL_CAP) -> CellSpace:
    blocks = [b for p in partitions for b in p.blocks] + list(extra)
    return CellSpace(measure, blocks, cap)


def partition_distance(alpha: OrderedPartition, beta: OrderedPartition, measure: Measure,
                       cap: int = DEFAULT_CELL_CAP) -> float:
    """d(alpha, beta) = sum_i mu(A_i symmetric-difference B_i)."""
    if len(alpha) != len(beta):
        raise AtomCountMismatch(len(alpha), len(beta))
    space = _space(measure, (alpha, beta), cap=cap)
    total = 0.0
    for a, b in zip(alpha.atoms, beta.atoms):
        total += space.mass(space.indicator(a) ^ space.indicator(b))
    return total


def joint_distribution(partitions: Sequence[OrderedPartition], space: CellSpace,
                       mask: Optional[np.ndarray] = None) -> Dict[Labels, float]:
    """Masses of the joint atoms A_{i_1} n ... n A_{i_k}, restricted to `mask` when given."""
    columns = np.stack([space.labels(p) for p in partitions], axis=1) if partitions else \
        np.zeros((len(space), 0), dtype=np.int64)
    keep = np.ones(len(space), dtype=bool) if mask is None else mask
    dist: Dict[Labels, float] = {}
    for row, mass in zip(columns[keep], space.masses[keep]):
        key = tuple(int(v) for v in row)
        dist[key] = dist.get(key, 0.0) + float(mass)
    return dist


def _check_shapes(alphas: Sequence[OrderedPartition], betas: Sequence[OrderedPartition]):
    if len(alphas) != len(betas):
        raise ShapeMismatch(f'{len(alphas)} and {len(betas)} partitions')
    for i, (a, b) in enumerate(zip(alphas, betas)):
        if len(a) != len(b):
            raise ShapeMismatch(f'partition {i} has {len(a)} and {len(b)} atoms')


def same_distribution(alphas: Sequence[OrderedPartition], betas: Sequence[OrderedPartition],
                      mu: Measure, nu: Measure, tol: float = 1e-12,
                      cap: int = DEFAULT_CELL_CAP) -> bool:
    """True iff every joint atom has the same mass on both sides."""
    _check_shapes(alphas, betas)
    p = joint_distribution(alphas, _space(mu, alphas, cap=cap))
    q = joint_distribution(betas, _space(nu, betas, cap=cap))
    return all(abs(p.get(k, 0.0) - q.get(k, 0.0)) <= tol for k in set(p) | set(q))


# d-bar.

class DbarResult(NamedTuple):
    value: float
    mode: str
    witness: Optional[dict] = None


def dbar_from_distributions(p: Mapping[Labels, float], q: Mapping[Labels, float], n: int) -> float:
    """Optimal transport between two joint label laws under the cost (2/n) * Hamming."""
    keys_p, keys_q = sorted(p), sorted(q)
    a = np.array([p[k] for k in keys_p], dtype=float)
    b = np.array([q[k] for k in keys_q], dtype=float)
    if n == 0:
        return 0.0
    # ot.dist with the hamming metric already divides by the word length.
    cost = 2 * ot.dist(np.array(keys_p, dtype=float), np.array(keys_q, dtype=float), metric='hamming')
    return float(ot.emd2(a / a.sum(), b / b.sum(), cost))


def dbar_exact_small(alphas: Sequence[OrderedPartition], betas: Sequence[OrderedPartition],
                     mu: Measure, nu: Measure, cap: int = DEFAULT_DBAR_CAP) -> DbarResult:
    """d-bar between two processes, as a transport problem between their joint laws."""
    _check_shapes(alphas, betas)
    p = joint_distribution(alphas, _space(mu, alphas))
    q = joint_distribution(betas, _space(nu, betas))
    if len(p) * len(q) > cap:
        raise CapExceeded('joint atom pairs', cap)
    return DbarResult(dbar_from_distributions(p, q, len(alphas)), 'Exact')


def smallest_epsilon(deviation: np.ndarray, mismatch: np.ndarray, masses: np.ndarray) -> float:
    """Least eps with mass{deviation > eps} <= eps and mass{mismatch > eps} <= eps."""
    def excess(eps: float) -> float:
        return max(masses[deviation > eps].sum(), masses[mismatch > eps].sum())

    candidates = {0.0, 1.0} | set(deviation.tolist()) | set(mismatch.tolist())
    candidates |= {excess(c) for c in list(candidates)}
    return min(c for c in candidates if excess(c) <= c)


def _greedy_matching(left: np.ndarray, right: np.ndarray, lmass: np.ndarray, rmass: np.ndarray) -> np.ndarray:
    order_l = sorted(range(len(lmass)), key=lambda i: (tuple(left[i]), -lmass[i], i))
    order_r = sorted(range(len(rmass)), key=lambda i: (tuple(right[i]), -rmass[i], i))
    target = np.empty(len(lmass), dtype=np.int64)
    target[order_l] = order_r
    return target


def dbar_upper_matching(alphas: Sequence[OrderedPartition], betas: Sequence[OrderedPartition],
                        mu: Measure, nu: Measure,
                        matching: Optional[Union[Callable[[int], int], Mapping[int, int]]] = None,
                        eps: Optional[float] = None, cap: int = DEFAULT_CELL_CAP) -> DbarResult:
    """Upper bound 16 eps on d-bar from a cell matching theta.

    theta must be a bijection between the cells of both refinements. It is
    eps-measure preserving when |nu(theta A) / mu(A) - 1| <= eps off a set
    of mu-mass at most eps, and the labels agree when the mismatch
    frequency (1/n) sum_i 1[alpha_i(x) != beta_i(theta x)] is at most eps
    off a set of mass at most eps. Without eps the least admissible value
    is used.
    """
    _check_shapes(alphas, betas)
    left_space, right_space = _space(mu, alphas, cap=cap), _space(nu, betas, cap=cap)
    left = np.stack([left_space.labels(p) for p in alphas], axis=1)
    right = np.stack([right_space.labels(p) for p in betas], axis=1)
    if len(left_space) != len(right_space):
        raise HypothesisFailed('invertible', f'{len(left_space)} and {len(right_space)} cells')
    if matching is None:
        target = _greedy_matching(left, right, left_space.masses, right_space.masses)
    else:
        func = matching.__getitem__ if isinstance(matching, Mapping) else matching
        target = np.array([int(func(i)) for i in range(len(left_space))], dtype=np.int64)
    if sorted(target.tolist()) != list(range(len(right_space))):
        raise HypothesisFailed('invertible', 'matching is not a bijection of cells')

    masses = left_space.masses
    deviation = np.abs(right_space.masses[target] / masses - 1.0)
    mismatch = np.mean(left != right[target], axis=1)
    if eps is None:
        eps = smallest_epsilon(deviation, mismatch, masses)
    else:
        if masses[deviation > eps].sum() > eps:
            raise HypothesisFailed('measure_preserving', f'eps={eps}')
        if masses[mismatch > eps].sum() > eps:
            raise HypothesisFailed('mismatch', f'eps={eps}')
    witness = {'epsilon': float(eps), 'cells': len(left_space),
               'matching': 'greedy' if matching is None else 'supplied'}
    return DbarResult(16 * float(eps), 'UpperBound', witness)


# Flow images.

def _roof_range(roof: Potential, word: Word, j: int) -> Tuple[Number, Number, List[Word]]:
    """Range of r(sigma^j x) over [word], with the extensions that determine it."""
    l, m = roof.memory
    exts = extend_word(roof.graph, word, j + l, j + m + 1)
    values = [roof.value(e.restrict(j + l, j + m + 1).symbols) for e in exts]
    return min(values), max(values), exts


def flow_image(block: Block, s: Number, roof: Potential) -> List[Block]:
    """sigma_r^s of a block, as blocks whose roof is determined on every piece."""
    out: List[Block] = []
    a, b = block.interval if block.interval is not None else (0, None)

    def place(cyl: Word, j: int, u: Number, v: Number):
        if not u < v:
            return
        if u < 0:
            lo, hi, exts = _roof_range(roof, cyl, j - 1)
            if lo != hi:
                for ext in exts:
                    place(ext, j, u, v)
                return
            place(cyl, j - 1, u + lo, min(v, 0) + lo)
            u = 0
            if not u < v:
                return
        lo, hi, exts = _roof_range(roof, cyl, j)
        if lo != hi:
            for ext in exts:
                place(ext, j, u, v)
            return
        if v > lo:
            place(cyl, j + 1, max(u, lo) - lo, v - lo)
            v = lo
        if u < v:
            out.append(Block(Word(cyl.symbols, cyl.anchor - j), (u, v)))

    if b is None:
        lo, hi, exts = _roof_range(roof, block.word, 0)
        pieces = [(block.word, lo)] if lo == hi else \
            [(e, roof.value(e.restrict(roof.memory[0], roof.memory[1] + 1).symbols)) for e in exts]
    else:
        pieces = [(block.word, b)]
    for cyl, top in pieces:
        place(cyl, 0, a + s, top + s)
    return out


def image_partition(partition: OrderedPartition, s: Number, roof: Potential) -> OrderedPartition:
    return OrderedPartition(tuple(tuple(img for blk in atom for img in flow_image(blk, s, roof))
                                  for atom in partition.atoms))


# Cube partitions.

@dataclass(frozen=True)
class CubePartition:
    n: int
    delta: Number
    cubes: Tuple[Block, ...]
    remainder: Tuple[Block, ...]
    remainder_mass: float
    certified: bool

    def as_partition(self) -> OrderedPartition:
        atoms = tuple((c,) for c in self.cubes)
        if self.remainder:
            atoms += (self.remainder,)
        return OrderedPartition(atoms)


def build_cube_partition(fm: FlowMeasure, n: int, delta: Number) -> CubePartition:
    """(n, delta)-cubes [w] x [k delta, (k+1) delta) below rho(w) = inf of r on [w], plus the remainder."""
    inf_r = fm.roof.inf_r
    if not 0 < delta < inf_r:
        raise DeltaTooLarge(delta, inf_r)
    cubes, remainder = [], []
    rest = 0.0
    for w in fm.graph.words(2 * n + 1):
        word = Word(w, -n)
        rho, top, _ = _roof_range(fm.roof, word, 0)
        k = int(math.floor(rho / delta))
        cubes.extend(Block(word, (i * delta, (i + 1) * delta)) for i in range(k))
        if k * delta < top:
            remainder.append(Block(word, (k * delta, None)))
            rest += fm.block_mass(word, k * delta, None)
    log.info('Cubes: n=%d delta=%s, %d cubes, remainder mass %.6g', n, delta, len(cubes), rest)
    return CubePartition(n, delta, tuple(cubes), tuple(remainder), rest, rest <= delta)


# K-mixing and VWB.

@dataclass(frozen=True)
class KMixingReport:
    fraction_good: float
    worst_atom: float
    atoms: int
    profile: Dict[int, float]
    non_decaying: bool
    target_mass: float
    exact: bool = True


def k_mixing_report(fm: FlowMeasure, B: Sequence[Block], beta: OrderedPartition, t0: Number,
                    N: int, N_prime: int, delta: float, cap: int = DEFAULT_CELL_CAP) -> KMixingReport:
    """|mu(B | A) - mu(B)| over the atoms A of the join of sigma_r^{t0 k} beta, N <= k <= N'."""
    ks = list(range(N, N_prime + 1))
    images = {k: image_partition(beta, t0 * k, fm.roof) for k in ks}
    space = _space(fm, images.values(), B, cap)
    in_b = space.indicator(B)
    target = space.mass(in_b)

    def deviations(parts: Sequence[OrderedPartition]) -> List[Tuple[float, float]]:
        joint = joint_distribution(parts, space)
        hit = joint_distribution(parts, space, in_b)
        return [(mass, abs(hit.get(key, 0.0) / mass - target))
                for key, mass in joint.items() if mass > 0]

    rows = deviations([images[k] for k in ks])
    good = sum(mass for mass, dev in rows if dev < delta)
    worst = max(dev for _, dev in rows)
    profile = {k: max(dev for _, dev in deviations([images[k]])) for k in ks}
    first, last = profile[ks[0]], profile[ks[-1]]
    non_decaying = last >= delta and (len(ks) == 1 or last > 0.5 * first)
    log.info('K-mixing: %d atoms, fraction good %.6g, worst %.3g', len(rows), good, worst)
    return KMixingReport(good, worst, len(rows), profile, non_decaying, target)


@dataclass(frozen=True)
class VWBReport:
    dbar_estimates: List[Tuple[Labels, float, float]]
    epsilon_achieved: float
    fraction_within: float
    coverage: Dict[str, int] = field(default_factory=dict)


def vwb_report(fm: FlowMeasure, gamma: OrderedPartition, n: int, N: int, N_prime: int,
               t0: Optional[Number] = None, eps: float = 0.1, cap: int = DEFAULT_CELL_CAP) -> VWBReport:
    """d-bar between the future gamma-process and the same process conditioned on far-past atoms.

    The future process is sigma_r^{-t0 i} gamma for i = 1..n, the
    conditioning atoms are those of the join of sigma_r^{t0 k} gamma for
    N <= k <= N'. eps achieved is the least e such that all atoms but a
    set of mass <= e have d-bar <= e.
    """
    if t0 is None:
        t0 = fm.roof.inf_r / 2
    future = [image_partition(gamma, -t0 * i, fm.roof) for i in range(1, n + 1)]
    past = [image_partition(gamma, t0 * k, fm.roof) for k in range(N, N_prime + 1)]
    space = _space(fm, future + past, cap=cap)
    overall = joint_distribution(future, space)
    past_labels = np.stack([space.labels(p) for p in past], axis=1)

    estimates = []
    for key in sorted({tuple(int(v) for v in row) for row in past_labels}):
        mask = np.all(past_labels == np.array(key), axis=1)
        mass = space.mass(mask)
        if mass <= 0:
            continue
        conditional = {k: v / mass for k, v in joint_distribution(future, space, mask).items()}
        estimates.append((key, mass, dbar_from_distributions(conditional, overall, n)))

    ranked = sorted(estimates, key=lambda e: -e[2])
    best, excluded = math.inf, 0.0
    for j in range(len(ranked) + 1):
        nxt = ranked[j][2] if j < len(ranked) else 0.0
        best = min(best, max(excluded, nxt))
        if j < len(ranked):
            excluded += ranked[j][1]
    within = sum(mass for _, mass, d in estimates if d <= eps)
    log.info('VWB: %d atoms, eps achieved %.6g', len(estimates), best)
    return VWBReport(estimates, best, within, {'n': n, 'N': N, 'N_prime': N_prime})
