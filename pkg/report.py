# -*- coding: utf-8 -*-
"""
Deterministic report emission.

Reports are serialized canonically: object keys sorted, floats written
with 17 significant digits and non-finite floats as strings, so that the
same configuration and seed always produce the same bytes.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from numeric import Estimate, is_exact

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"


def tagged(value, error_bound: Optional[float] = None) -> dict:
    """A numeric result with its error bound, or marked exact."""
    if isinstance(value, Estimate):
        value, error_bound = value.value, value.error_bound
    if isinstance(value, Fraction) and value.denominator == 1:
        value = value.numerator
    if is_exact(value) and not error_bound:
        entry = {'value': float(value) if isinstance(value, Fraction) else int(value), 'exact': True}
        if isinstance(value, Fraction):
            entry['rational'] = f'{value.numerator}/{value.denominator}'
        return entry
    return {'value': float(value), 'error_bound': float(error_bound or 0.0)}


@dataclass
class Report:
    command: str
    input_digest: str
    results: Dict[str, Any] = field(default_factory=dict)
    errors: List[dict] = field(default_factory=list)
    runtime: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {'command': self.command, 'input_digest': self.input_digest, 'results': self.results,
                'errors': self.errors, 'runtime': self.runtime}

    @property
    def ok(self) -> bool:
        return not self.errors


def _plain(obj):
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, Fraction)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _scalar(obj) -> str:
    if obj is None:
        return 'null'
    if obj is True:
        return 'true'
    if obj is False:
        return 'false'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return '"%s"' % ('nan' if math.isnan(obj) else ('inf' if obj > 0 else '-inf'))
        return format(obj, '.17g')
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    raise TypeError(f'cannot serialize {type(obj).__name__}')


def canonical_json(obj, indent: int = 2, level: int = 0) -> str:
    obj = _plain(obj)
    pad, inner = ' ' * (indent * level), ' ' * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            return '{}'
        items = [f'{inner}{_scalar(str(k))}: {canonical_json(obj[k], indent, level + 1)}'
                 for k in sorted(obj, key=str)]
        return '{\n' + ',\n'.join(items) + '\n' + pad + '}'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return '[]'
        items = [inner + canonical_json(v, indent, level + 1) for v in obj]
        return '[\n' + ',\n'.join(items) + '\n' + pad + ']'
    return _scalar(obj)


def _flatten(obj, prefix: str, out: List[str]):
    obj = _plain(obj)
    if isinstance(obj, dict):
        if set(obj) >= {'value'} and ('exact' in obj or 'error_bound' in obj):
            bound = 'exact' if obj.get('exact') else f'+/- {_scalar(float(obj["error_bound"]))}'
            out.append(f'{prefix}: {_scalar(_plain(obj["value"]))} ({bound})')
            return
        for k in sorted(obj, key=str):
            _flatten(obj[k], f'{prefix}.{k}' if prefix else str(k), out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(v, f'{prefix}[{i}]', out)
    else:
        out.append(f'{prefix}: {_scalar(obj)}')


def _find_verdict(obj) -> Optional[str]:
    if isinstance(obj, dict):
        if isinstance(obj.get('verdict'), str):
            return obj['verdict']
        for k in sorted(obj, key=str):
            found = _find_verdict(obj[k])
            if found:
                return found
    return None


def emit_report(report: Report, fmt: str = 'json') -> bytes:
    """Serialize a report as canonical JSON or as flat "key: value" text lines."""
    if fmt == 'json':
        return (canonical_json(report.as_dict()) + '\n').encode('utf-8')
    if fmt != 'text':
        raise ValueError(f'Unsupported format: {fmt}')
    lines = [f'command: {report.command}', f'input_digest: {report.input_digest}']
    verdict = _find_verdict(report.results)
    if verdict is not None:
        lines.append(f'verdict: {verdict}')
    _flatten(report.results, 'results', lines)
    _flatten(report.errors, 'errors', lines)
    _flatten(report.runtime, 'runtime', lines)
    return ('\n'.join(lines) + '\n').encode('utf-8')
