# -*- coding: utf-8 -*-
"""
Analysis configuration documents.

A configuration is a JSON object with the keys graph, potential, roof,
tolerances, params and seed. Numbers in tables may be written as JSON
numbers, as rational strings ("1/3") or as logarithms ("log(1/3)"); JSON
floats are read as the exact decimal they spell, so "1.5" and 1.5 both
become Fraction(3, 2).
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PrivateAttr, ValidationError, \
    ValidationInfo, field_validator

from errors import ConfigParseError, ConfigValidationError, GraphError, Inadmissible, InvalidPotential
from numeric import Number, to_number
from potential import HolderEnvelope, Potential, Roof, as_potential
from shift import Graph, validate_graph

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"

log = logging.getLogger(__name__)


def _number(value: Any) -> Number:
    try:
        return to_number(value)
    except ValueError as e:
        raise ValueError(str(e))


def _positive(value: Any) -> Number:
    number = _number(value)
    if not number > 0:
        raise ValueError('must be > 0')
    return number


Value = Annotated[Any, BeforeValidator(_number)]
PositiveValue = Annotated[Any, BeforeValidator(_positive)]


class GraphSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    vertices: List[str] = Field(min_length=1)
    edges: List[Tuple[str, str]]

    @field_validator('edges')
    @classmethod
    def _known_vertices(cls, edges, info: ValidationInfo):
        known = set(info.data.get('vertices') or ())
        for u, v in edges:
            for w in (u, v):
                if w not in known:
                    raise ValueError(f'unknown vertex {w!r}')
        return edges


class PotentialSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    memory: Tuple[int, int] = (0, 0)
    table: Dict[str, Value] = Field(default_factory=dict)
    default: Optional[Value] = None


class HolderSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    C: float = Field(ge=0)
    alpha: float = Field(gt=0, le=1)


class RoofSpec(BaseModel):
    model_config = ConfigDict(extra='forbid')

    memory: Tuple[int, int] = (0, 0)
    table: Dict[str, PositiveValue] = Field(default_factory=dict)
    default: Optional[PositiveValue] = None
    holder: Optional[HolderSpec] = None


class Tolerances(BaseModel):
    model_config = ConfigDict(extra='forbid')

    pressure: float = Field(1e-13, gt=0)
    lattice: float = Field(1e-6, gt=0)
    dbar_cap: int = Field(4096, gt=0)
    cell_cap: int = Field(200000, gt=0)
    epsilon: float = Field(0.1, gt=0)
    max_iterations: int = Field(100000, gt=0)


class Params(BaseModel):
    model_config = ConfigDict(extra='forbid')

    solver: Literal['power', 'dense'] = 'power'
    cylinder_length: int = Field(3, ge=1)
    cycle_length: int = Field(8, ge=1)
    loops: int = Field(32, ge=1)
    segment_budget: int = Field(3, ge=1)
    sample_depth: int = Field(2, ge=0)
    return_cap: int = Field(8, ge=1)
    cube_n: int = Field(0, ge=0)
    delta: Optional[PositiveValue] = None
    t0: Optional[PositiveValue] = None
    N: int = Field(1, ge=0)
    N_prime: Optional[int] = Field(None, ge=0)
    dbar_n: int = Field(2, ge=1)
    target_atom: Optional[str] = None


class AnalysisConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    graph: GraphSpec
    potential: PotentialSpec = Field(default_factory=lambda: PotentialSpec(default=0))
    roof: Optional[RoofSpec] = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    params: Params = Field(default_factory=Params)
    seed: Optional[int] = Field(None, ge=0)

    _digest: str = PrivateAttr(default='')

    @property
    def digest(self) -> str:
        return self._digest


def canonical_document(document: Any) -> str:
    return json.dumps(document, sort_keys=True, separators=(',', ':'), ensure_ascii=True)


def _first_error(e: ValidationError) -> ConfigValidationError:
    err = e.errors()[0]
    where = '.'.join(str(p) for p in err['loc'])
    reason = err['msg']
    if err.get('ctx', {}).get('error') is not None:
        reason = str(err['ctx']['error'])
    return ConfigValidationError(where, reason)


def parse_config(text: str, path: str = '<string>') -> AnalysisConfig:
    """Parse and validate a configuration document.

    Raises:
        ConfigParseError: On malformed JSON, with line and column.
        ConfigValidationError: On the first schema violation, with a dotted field path.
    """
    try:
        document = json.loads(text, parse_float=str)
    except json.JSONDecodeError as e:
        raise ConfigParseError(path, e.msg, e.lineno, e.colno)
    if not isinstance(document, dict):
        raise ConfigValidationError('', 'top level must be an object')
    try:
        cfg = AnalysisConfig.model_validate(document)
    except ValidationError as e:
        raise _first_error(e)
    cfg._digest = hashlib.sha256(canonical_document(document).encode('utf-8')).hexdigest()
    build(cfg)
    log.debug('Config: %s validated, digest %s', path, cfg.digest[:12])
    return cfg


def load_config(path: str) -> AnalysisConfig:
    try:
        with open(path, encoding='utf-8') as fd:
            text = fd.read()
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigParseError(path, str(e))
    return parse_config(text, path)


@dataclass(frozen=True)
class Setup:
    """Objects built from a validated configuration."""
    graph: Graph
    potential: Potential
    roof: Optional[Roof]


def build(cfg: AnalysisConfig) -> Setup:
    try:
        graph = validate_graph(cfg.graph.vertices, cfg.graph.edges)
    except GraphError as e:
        raise ConfigValidationError('graph', str(e))
    try:
        potential = as_potential(graph, cfg.potential.memory, cfg.potential.table,
                                 cfg.potential.default, name='potential')
    except (InvalidPotential, Inadmissible) as e:
        raise ConfigValidationError('potential.table', str(e))
    roof = None
    if cfg.roof is not None:
        envelope = None
        if cfg.roof.holder is not None:
            envelope = HolderEnvelope(cfg.roof.holder.C, cfg.roof.holder.alpha)
        try:
            roof = as_potential(graph, cfg.roof.memory, cfg.roof.table, cfg.roof.default,
                                name='roof', roof=True, envelope=envelope)
        except (InvalidPotential, Inadmissible) as e:
            raise ConfigValidationError('roof.table', str(e))
    if cfg.params.target_atom is not None and cfg.params.target_atom not in graph.index:
        raise ConfigValidationError('params.target_atom', f'unknown vertex {cfg.params.target_atom!r}')
    return Setup(graph, potential, roof)
