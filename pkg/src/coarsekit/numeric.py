"""Threshold comparisons with a fixed tolerance.

Distances coming from integral sources (matrices of ints, graph geodesics
with int weights, grids, weighted-l1 tuples) stay exact Python ints or
Fractions and are compared exactly.  Anything involving a float goes
through a tolerance of TOL = 1e-9, because decomposition validity is
threshold-sensitive and float noise must not flip a verdict.

The two primitive pairs are (gt, le) and (ge, lt); each pair is an exact
complement so that "distance > r" and "distance <= r" never both hold.
"""

from __future__ import annotations

from fractions import Fraction

TOL = 1e-9

_EXACT_TYPES = (int, Fraction)


def is_exact(*values) -> bool:
    return all(isinstance(v, _EXACT_TYPES) for v in values)


def gt(a, b) -> bool:
    """a > b, tolerantly for floats (a must clear b by more than TOL)."""
    if is_exact(a, b):
        return a > b
    return a > b + TOL


def le(a, b) -> bool:
    """a <= b; exact complement of gt."""
    return not gt(a, b)


def ge(a, b) -> bool:
    """a >= b, tolerantly for floats (b - TOL is enough)."""
    if is_exact(a, b):
        return a >= b
    return a >= b - TOL


def lt(a, b) -> bool:
    """a < b; exact complement of ge."""
    return not ge(a, b)


def eq(a, b) -> bool:
    if is_exact(a, b):
        return a == b
    return abs(a - b) <= TOL
