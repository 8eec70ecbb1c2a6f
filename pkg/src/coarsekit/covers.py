"""Covers of a point set and their three scale statistics: multiplicity,
d-multiplicity, and Lebesgue number, plus the distance-enlargement that
trades d-multiplicity for Lebesgue number.

A cover lives on a ``domain`` (all points of the parent space by default,
or a member subset); balls, complements and distances are always taken
inside the domain.  Balls are open, "element met by a ball" means the
ball intersects it, and the Lebesgue number is the exact min-max value
min_x max_U dist(x, domain - U), which on a finite space is the largest
lambda such that every open lambda-ball fits inside some element.  A
cover containing the whole domain as an element has unbounded Lebesgue
number, reported as math.inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from coarsekit import numeric
from coarsekit.errors import InputError
from coarsekit.spaces import FiniteMetricSpace, MetricFamily, PointId

UNBOUNDED = math.inf


@dataclass(frozen=True)
class Cover:
    space: FiniteMetricSpace
    elements: tuple[tuple[PointId, ...], ...]
    domain: tuple[PointId, ...]
    element_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.elements:
            raise InputError("a cover needs at least one element")
        dom = set(self.domain)
        union: set[PointId] = set()
        for el in self.elements:
            if not el:
                raise InputError("cover elements must be nonempty")
            if not set(el) <= dom:
                raise InputError("cover element leaves the domain")
            union |= set(el)
        if union != dom:
            raise InputError("cover elements do not cover the domain")
        if self.element_ids and len(self.element_ids) != len(self.elements):
            raise InputError("element_ids length mismatch")

    @staticmethod
    def build(
        space: FiniteMetricSpace,
        elements: Iterable[Iterable[PointId]],
        domain: Iterable[PointId] | None = None,
        element_ids: Iterable[str] = (),
    ) -> "Cover":
        dom = tuple(sorted(set(domain))) if domain is not None else tuple(space.points)
        els = tuple(tuple(sorted(set(e))) for e in elements)
        return Cover(space, els, dom, tuple(element_ids))

    def as_family(self, family_id: str | None = None) -> MetricFamily:
        fid = family_id or f"{self.space.space_id}/cover"
        return MetricFamily(fid, tuple((self.space, el) for el in self.elements))


def multiplicity(cover: Cover) -> int:
    """Largest number of elements any single point belongs to."""
    best = 0
    for x in cover.domain:
        count = sum(1 for el in cover.elements if x in set(el))
        best = max(best, count)
    return best


def d_multiplicity(cover: Cover, d) -> int:
    """Largest number of elements met by any open d-ball of the domain."""
    best = 0
    for x in cover.domain:
        count = 0
        for el in cover.elements:
            if any(numeric.lt(cover.space.dist(x, y), d) for y in el):
                count += 1
        best = max(best, count)
    return best


def lebesgue_number(cover: Cover):
    """min over points of max over elements of distance to the element's
    complement in the domain; ``UNBOUNDED`` when some element is the
    whole domain."""
    dom = set(cover.domain)
    value = UNBOUNDED
    for x in cover.domain:
        best = 0
        for el in cover.elements:
            comp = dom - set(el)
            if not comp:
                best = UNBOUNDED
                break
            best = max(best, cover.space.point_to_set(x, comp))
        value = min(value, best)
    return value


def enlarge(cover: Cover, lam) -> Cover:
    """Replace each element V by {x in domain : dist(x, V) <= lam}.

    The result covers the same domain, has Lebesgue number >= lam, and its
    multiplicity is bounded by the lam-multiplicity of the input.
    """
    new_elements = []
    for el in cover.elements:
        grown = tuple(
            x for x in cover.domain if numeric.le(cover.space.point_to_set(x, el), lam)
        )
        new_elements.append(grown)
    return Cover(cover.space, tuple(new_elements), cover.domain, cover.element_ids)
