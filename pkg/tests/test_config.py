# -*- coding: utf-8 -*-

import json
from fractions import Fraction

import pytest

from config import build, load_config, parse_config
from errors import ConfigParseError, ConfigValidationError
from potential import Roof

FULL_SHIFT = {
    'graph': {'vertices': ['a', 'b'], 'edges': [['a', 'a'], ['a', 'b'], ['b', 'a'], ['b', 'b']]},
    'roof': {'table': {'a': 1, 'b': 2}},
    'seed': 1,
}


def _document(**changes):
    doc = json.loads(json.dumps(FULL_SHIFT))
    for dotted, value in changes.items():
        *path, last = dotted.split('__')
        node = doc
        for key in path:
            node = node.setdefault(key, {})
        node[last] = value
    return json.dumps(doc)


def test_bundled_configs_parse(configs):
    for path in sorted(configs.glob('*.json')):
        cfg = load_config(str(path))
        assert len(cfg.digest) == 64
        assert cfg.seed is not None
        assert isinstance(build(cfg).roof, Roof)


def test_golden_config(configs):
    cfg = load_config(str(configs / 'golden_mean.json'))
    assert cfg.roof.table['b'] == Fraction('1.6180339887')
    assert cfg.params.cycle_length == 8
    setup = build(cfg)
    assert setup.graph.vertices == ('a', 'b')
    assert setup.roof.inf_r == 1


def test_floats_are_exact_decimals():
    cfg = parse_config(_document(roof__table={'a': 1.5, 'b': '1/3'}, potential={'default': 'log(1/2)'}))
    assert cfg.roof.table == {'a': Fraction(3, 2), 'b': Fraction(1, 3)}
    assert cfg.potential.default == pytest.approx(-0.6931471805599453)


def test_defaults():
    cfg = parse_config(_document())
    assert cfg.params.solver == 'power'
    assert cfg.tolerances.lattice == 1e-6
    assert cfg.potential.default == 0
    assert cfg.params.N_prime is None


def test_malformed_json():
    with pytest.raises(ConfigParseError) as info:
        parse_config('{\n  "graph": ,\n}', 'broken.json')
    assert (info.value.line, info.value.column) == (2, 12)
    assert info.value.as_dict()['type'] == 'ParseError'
    assert str(info.value).startswith('broken.json:2:12')


def test_missing_file(tmp_path):
    with pytest.raises(ConfigParseError):
        load_config(str(tmp_path / 'absent.json'))


@pytest.mark.parametrize('changes, field, reason', [
    ({'roof__table': {'a': 1, 'b': 0}}, 'roof.table.b', 'must be > 0'),
    ({'roof__default': '-1/2'}, 'roof.default', 'must be > 0'),
    ({'graph__edges': [['a', 'c']]}, 'graph.edges', "unknown vertex 'c'"),
    ({'potential__table': {'a': 'log(0)'}}, 'potential.table.a', 'log of a non-positive number'),
    ({'params__solver': 'lanczos'}, 'params.solver', None),
    ({'seed': -3}, 'seed', None),
    ({'colour': 'blue'}, 'colour', None),
])
def test_schema_errors(changes, field, reason):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(_document(**changes))
    assert info.value.field == field
    if reason is not None:
        assert info.value.reason == reason
    assert info.value.as_dict()['type'] == 'ValidationError'


@pytest.mark.parametrize('changes, field', [
    ({'graph': {'vertices': ['a', 'b'], 'edges': [['a', 'b'], ['b', 'a']]}}, 'graph'),
    ({'roof__memory': [0, 1]}, 'roof.table'),
    ({'params__target_atom': 'z'}, 'params.target_atom'),
])
def test_semantic_errors(changes, field):
    with pytest.raises(ConfigValidationError) as info:
        parse_config(_document(**changes))
    assert info.value.field == field


def test_top_level_must_be_object():
    with pytest.raises(ConfigValidationError):
        parse_config('[1, 2]')


def test_digest_ignores_layout():
    shuffled = json.dumps(dict(reversed(list(FULL_SHIFT.items()))), indent=4)
    assert parse_config(shuffled).digest == parse_config(json.dumps(FULL_SHIFT)).digest
    assert parse_config(_document(seed=2)).digest != parse_config(json.dumps(FULL_SHIFT)).digest
