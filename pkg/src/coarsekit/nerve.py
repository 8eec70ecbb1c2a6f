"""Uniform simplicial complexes under the l1 metric on barycentric
coordinates, nerves of covers, distance-quotient partitions of unity,
Lipschitz measurement, and star-preimage covers.

Complex points are sparse vertex->coordinate maps; coordinates are exact
Fractions whenever the underlying distances are exact, which makes the
Lipschitz measurements below exact as well.  The metric is the global l1
distance (points in disjoint simplices are 2 apart), not a path metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from coarsekit import numeric
from coarsekit.covers import Cover, lebesgue_number, multiplicity
from coarsekit.errors import (
    ConsistencyError,
    InputError,
    LipschitzTooLarge,
    PreconditionFailed,
)
from coarsekit.spaces import FiniteMetricSpace, PointId

VertexId = int


@dataclass(frozen=True)
class UniformComplex:
    vertices: tuple[VertexId, ...]
    facets: tuple[frozenset, ...]
    vertex_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.facets:
            raise InputError("a complex needs at least one facet")
        union = set()
        for f in self.facets:
            if not f:
                raise InputError("facets must be nonempty")
            union |= f
        if union != set(self.vertices):
            raise InputError("vertex set must equal the union of facets")

    @staticmethod
    def build(facets: Iterable[Iterable[VertexId]], labels: Iterable[str] = ()) -> "UniformComplex":
        fs = {frozenset(f) for f in facets}
        maximal = tuple(
            sorted(
                (f for f in fs if not any(f < g for g in fs)),
                key=lambda f: sorted(f),
            )
        )
        vertices = tuple(sorted(set().union(*maximal)))
        return UniformComplex(vertices, maximal, tuple(labels))

    @property
    def dim(self) -> int:
        return max(len(f) for f in self.facets) - 1

    def has_simplex(self, vertex_set: Iterable[VertexId]) -> bool:
        vs = frozenset(vertex_set)
        return any(vs <= f for f in self.facets)

    def all_simplices(self) -> list[frozenset]:
        out = set()
        for f in self.facets:
            verts = sorted(f)
            for k in range(1, len(verts) + 1):
                out.update(frozenset(c) for c in combinations(verts, k))
        return sorted(out, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class ComplexPoint:
    coords: tuple[tuple[VertexId, object], ...]  # sparse, sorted, nonzero

    @staticmethod
    def build(coords: dict, complex_ref: UniformComplex | None = None) -> "ComplexPoint":
        items = tuple(sorted((v, c) for v, c in coords.items() if c != 0))
        total = sum(c for _, c in items)
        if not numeric.eq(total, 1):
            raise InputError(f"coordinates sum to {total}, not 1")
        if any(c < 0 for _, c in items):
            raise InputError("coordinates must be nonnegative")
        if complex_ref is not None and not complex_ref.has_simplex(v for v, _ in items):
            raise InputError("support is not a simplex of the complex")
        return ComplexPoint(items)

    @staticmethod
    def vertex(v: VertexId) -> "ComplexPoint":
        return ComplexPoint(((v, 1),))

    def coord(self, v: VertexId):
        for w, c in self.coords:
            if w == v:
                return c
        return 0

    @property
    def support(self) -> tuple[VertexId, ...]:
        return tuple(v for v, _ in self.coords)

    def max_coordinate(self):
        return max(c for _, c in self.coords)

    def as_dict(self) -> dict:
        return dict(self.coords)


def l1_distance(a: ComplexPoint, b: ComplexPoint):
    da, db = a.as_dict(), b.as_dict()
    return sum(abs(da.get(v, 0) - db.get(v, 0)) for v in set(da) | set(db))


def nerve_of_cover(cover: Cover) -> UniformComplex:
    """One vertex per cover element; a vertex set spans a simplex exactly
    when the elements share a point.  The dimension is multiplicity - 1."""
    element_sets = [set(el) for el in cover.elements]
    facet_candidates = set()
    for x in cover.domain:
        facet_candidates.add(
            frozenset(i for i, el in enumerate(element_sets) if x in el)
        )
    labels = cover.element_ids or tuple(str(i) for i in range(len(cover.elements)))
    return UniformComplex.build(facet_candidates, labels)


@dataclass(frozen=True)
class ComplexMap:
    space: FiniteMetricSpace
    domain: tuple[PointId, ...]
    complex_ref: UniformComplex
    values: dict[PointId, ComplexPoint]

    def __post_init__(self):
        if set(self.values) != set(self.domain):
            raise InputError("map must be total on its domain")


def map_lipschitz_constant(cmap: ComplexMap):
    """max over point pairs of l1 image distance over source distance."""
    best = 0
    pts = sorted(cmap.domain)
    for x, y in combinations(pts, 2):
        d = cmap.space.dist(x, y)
        ratio = l1_distance(cmap.values[x], cmap.values[y]) / d
        if ratio > best:
            best = ratio
    return best


def partition_of_unity_map(cover: Cover, epsilon, n: int) -> ComplexMap:
    """Map each point to the nerve using normalized distances to element
    complements: the weight of element U at x is dist(x, U^c) divided by
    the sum over all elements.

    Preconditions: multiplicity <= n+1 and Lebesgue number at least
    (2n+2)(2n+3)/epsilon; then the map is epsilon-Lipschitz for the l1
    metric and the preimage of each vertex's open star sits inside the
    corresponding element.  Elements equal to the whole domain have empty
    complement (infinite distance); all mass goes to them, split equally.
    """
    mult = multiplicity(cover)
    if mult > n + 1:
        raise PreconditionFailed("multiplicity", mult, n + 1)
    required = (2 * n + 2) * (2 * n + 3) / epsilon
    leb = lebesgue_number(cover)
    if not numeric.ge(leb, required):
        raise PreconditionFailed("lebesgue", leb, required)

    complex_ref = nerve_of_cover(cover)
    dom_set = set(cover.domain)
    complements = [sorted(dom_set - set(el)) for el in cover.elements]
    values = {}
    for x in cover.domain:
        dists = [
            cover.space.point_to_set(x, comp) if comp else math.inf
            for comp in complements
        ]
        unbounded = [i for i, d in enumerate(dists) if d == math.inf]
        if unbounded:
            share = Fraction(1, len(unbounded))
            coords = {i: share for i in unbounded}
        else:
            total = sum(dists)
            if numeric.is_exact(total, *dists):
                coords = {
                    i: Fraction(d, total) for i, d in enumerate(dists) if d != 0
                }
            else:
                coords = {i: d / total for i, d in enumerate(dists) if d != 0}
        values[x] = ComplexPoint.build(coords, complex_ref)
    return ComplexMap(cover.space, cover.domain, complex_ref, values)


@dataclass
class StarCoverReport:
    complex_ref: UniformComplex
    dim: int
    lebesgue_bound: object
    tested_points: int
    min_max_coordinate: object
    ok: bool

    def summary(self) -> dict:
        return {
            "dim": self.dim,
            "lebesgue_bound": "unbounded"
            if self.lebesgue_bound == math.inf
            else float(self.lebesgue_bound),
            "tested_points": self.tested_points,
            "min_max_coordinate": float(self.min_max_coordinate),
            "ok": self.ok,
        }


def barycenter(simplex: frozenset) -> ComplexPoint:
    share = Fraction(1, len(simplex))
    return ComplexPoint(tuple((v, share) for v in sorted(simplex)))


def star_cover(
    complex_ref: UniformComplex,
    extra_points: Iterable[ComplexPoint] = (),
    rng=None,
    n_random: int = 0,
) -> StarCoverReport:
    """Certify the pigeonhole bound behind the open-star cover: every
    tested point of a complex of dimension n has some coordinate at least
    1/(n+1), so its open 1/(n+1)-ball sits inside that vertex's star.

    Tested points are all simplex barycenters, any supplied points, and
    optionally random points (random facet, integer-random exact
    coordinates).  A single-vertex complex has star = everything and the
    bound is unbounded.
    """
    n = complex_ref.dim
    bound = math.inf if len(complex_ref.vertices) == 1 else Fraction(1, n + 1)
    tested = [barycenter(s) for s in complex_ref.all_simplices()]
    tested.extend(extra_points)
    if n_random and rng is not None:
        facets = sorted(complex_ref.facets, key=lambda f: sorted(f))
        for _ in range(n_random):
            facet = sorted(facets[rng.randrange(len(facets))])
            raws = [rng.randint(1, 1000) for _ in facet]
            total = sum(raws)
            coords = {v: Fraction(w, total) for v, w in zip(facet, raws)}
            tested.append(ComplexPoint.build(coords, complex_ref))
    floor = Fraction(1, n + 1)
    min_max = min((p.max_coordinate() for p in tested), default=1)
    ok = all(numeric.ge(p.max_coordinate(), floor) for p in tested)
    return StarCoverReport(
        complex_ref=complex_ref,
        dim=n,
        lebesgue_bound=bound,
        tested_points=len(tested),
        min_max_coordinate=min_max,
        ok=ok,
    )


def pullback_star_cover(cmap: ComplexMap, r) -> Cover:
    """Preimages of open vertex stars, one element per vertex with a
    nonzero coordinate somewhere.

    Requires the measured Lipschitz constant to be at most 1/((n+1) r)
    for n the complex dimension; the resulting cover has multiplicity at
    most n+1 and Lebesgue number strictly above r."""
    n = cmap.complex_ref.dim
    lip = map_lipschitz_constant(cmap)
    limit = Fraction(1, (n + 1)) / r if numeric.is_exact(r) else 1 / ((n + 1) * r)
    if not numeric.le(lip, limit):
        raise LipschitzTooLarge(lip, limit)
    elements = []
    ids = []
    for v in cmap.complex_ref.vertices:
        el = tuple(x for x in cmap.domain if cmap.values[x].coord(v) != 0)
        if el:
            elements.append(el)
            ids.append(str(v))
    cover = Cover.build(cmap.space, elements, domain=cmap.domain, element_ids=ids)
    if multiplicity(cover) > n + 1:
        raise ConsistencyError("star preimage multiplicity exceeded the dimension bound")
    if not numeric.gt(lebesgue_number(cover), r):
        raise ConsistencyError("star preimage Lebesgue number failed to clear the scale")
    return cover
