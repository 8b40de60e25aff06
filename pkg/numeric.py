# -*- coding: utf-8 -*-
"""
Exact and approximate number helpers.

Tables of potentials and roofs hold ints, Fractions or floats. Sums of
ints and Fractions stay exact, so Birkhoff sums over rational tables,
flow heights and periodic-orbit sums carry no rounding error at all.
Anything that passes through exp/log or an eigen-solver becomes a float
and travels as an Estimate with an explicit error bound.
"""

import math
import re
from fractions import Fraction
from typing import NamedTuple, Union

__license__ = "GPLv3-or-later"
__version__ = "0.3.0"

Q = Fraction
Number = Union[int, Fraction, float]

LOG_RE = re.compile(r'^\s*log\s*\(\s*(?P<arg>[^()]+?)\s*\)\s*$')


class Estimate(NamedTuple):
    """A value with an absolute error bound; a bound of 0 means exact."""
    value: Number
    error_bound: float = 0.0

    @property
    def exact(self) -> bool:
        return self.error_bound == 0 and is_exact(self.value)

    def __add__(self, other):
        if isinstance(other, Estimate):
            return Estimate(self.value + other.value, self.error_bound + other.error_bound)
        return Estimate(self.value + other, self.error_bound)

    def __neg__(self):
        return Estimate(-self.value, self.error_bound)


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def to_q(x: Union[int, float, str, Fraction]) -> Fraction:
    """Convert to a Fraction; floats go through their repr to avoid binary noise."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Q(repr(x))
    return Q(x)


def to_number(value: Union[int, float, str, Fraction]) -> Number:
    """Parse a table entry.

    Accepted forms are ints, floats (kept exact as the decimal they print
    as), rational or decimal strings such as "1/3" or "0.25", and
    logarithms written "log(1/3)", which evaluate to a float.
    """
    if isinstance(value, bool):
        raise ValueError('booleans are not numbers')
    if isinstance(value, int):
        return value
    if isinstance(value, (float, Fraction)):
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError('must be finite')
        return normalize(to_q(value))
    if isinstance(value, str):
        match = LOG_RE.match(value)
        if match:
            arg = to_q(match.group('arg').replace(' ', ''))
            if arg <= 0:
                raise ValueError('log of a non-positive number')
            return math.log(arg)
        try:
            return normalize(to_q(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f'cannot parse number {value!r}')
    raise ValueError(f'unsupported number type {type(value).__name__}')


def normalize(q: Fraction) -> Number:
    """Collapse integral Fractions to int."""
    return q.numerator if q.denominator == 1 else q


def exp(value: Number) -> float:
    return math.exp(float(value))


def fmt_number(value: Number) -> str:
    if isinstance(value, Fraction):
        return f'{value.numerator}/{value.denominator}'
    return repr(value)
