"""Finite metric spaces, metric families, and the scale-sensitive
primitives everything else builds on: threshold components, nets, mesh,
and sandwich checks for maps between families.

Points of a space are dense ids 0..N-1.  Distances are stored as a full
symmetric matrix and stay exact (ints) whenever the source data is
integral; family members are subsets held by reference to their parent
space, so certificates can always cite parts as subsets of the original
spaces.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from coarsekit import numeric
from coarsekit.errors import DisconnectedGraph, InputError, MetricViolation

PointId = int


class UnionFind:
    """Union-find with path compression over a fixed id universe."""

    def __init__(self, ids: Iterable[int]):
        self.parent = {i: i for i in ids}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return [sorted(g) for g in sorted(groups.values(), key=min)]


@dataclass(frozen=True)
class FiniteMetricSpace:
    space_id: str
    dist_matrix: tuple[tuple[float, ...], ...]
    label: str | None = None
    source: dict | None = field(default=None, compare=False, repr=False)

    @property
    def n_points(self) -> int:
        return len(self.dist_matrix)

    @property
    def points(self) -> range:
        return range(self.n_points)

    def dist(self, p: PointId, q: PointId):
        return self.dist_matrix[p][q]

    def set_distance(self, a: Iterable[PointId], b: Iterable[PointId]):
        """min distance between two nonempty point sets; inf if either is empty."""
        a, b = list(a), list(b)
        if not a or not b:
            return math.inf
        return min(self.dist_matrix[p][q] for p in a for q in b)

    def point_to_set(self, p: PointId, s: Iterable[PointId]):
        s = list(s)
        if not s:
            return math.inf
        row = self.dist_matrix[p]
        return min(row[q] for q in s)

    def diameter(self, subset: Iterable[PointId] | None = None):
        pts = list(subset) if subset is not None else list(self.points)
        if len(pts) <= 1:
            return 0
        return max(self.dist_matrix[p][q] for p, q in combinations(pts, 2))

    def min_positive_gap(self, subset: Iterable[PointId] | None = None):
        pts = list(subset) if subset is not None else list(self.points)
        if len(pts) <= 1:
            return math.inf
        return min(self.dist_matrix[p][q] for p, q in combinations(pts, 2))


def _validate_matrix(rows: Sequence[Sequence]) -> None:
    n = len(rows)
    if n < 1:
        raise InputError("a space needs at least one point")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise InputError(f"distance matrix is not square at row {i}")
    for i in range(n):
        if rows[i][i] != 0:
            raise MetricViolation(i, i, reason="nonzero diagonal")
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise MetricViolation(i, j, reason="asymmetric")
            if rows[i][j] <= 0:
                raise MetricViolation(i, j, reason="nonpositive off-diagonal")
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dij = rows[i][j]
            for k in range(n):
                if k == i or k == j:
                    continue
                if numeric.gt(dij, rows[i][k] + rows[k][j]):
                    raise MetricViolation(i, j, k)


def _freeze(rows: Sequence[Sequence]) -> tuple[tuple, ...]:
    return tuple(tuple(v for v in row) for row in rows)


def _minkowski(a: Sequence, b: Sequence, p) -> float:
    diffs = [abs(x - y) for x, y in zip(a, b)]
    if p == 1:
        return sum(diffs)
    if p == 2:
        return math.sqrt(sum(d * d for d in diffs))
    return max(diffs)  # p = inf


def _graph_geodesics(n: int, edges: Sequence[Sequence]) -> list[list]:
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for e in edges:
        u, v, w = e
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"edge ({u},{v}) out of range")
        if w <= 0:
            raise InputError(f"edge ({u},{v}) has nonpositive weight {w}")
        adj[u].append((v, w))
        adj[v].append((u, w))
    rows = []
    for src in range(n):
        dist = {src: 0}
        heap = [(0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist.get(u, math.inf):
                continue
            for v, w in adj[u]:
                nd = d + w
                if nd < dist.get(v, math.inf):
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        if len(dist) != n:
            raise DisconnectedGraph(
                f"no path from {src} to {sorted(set(range(n)) - set(dist))[:5]}"
            )
        rows.append([dist[v] for v in range(n)])
    return rows


def build_space(source: dict) -> FiniteMetricSpace:
    """Build a verified space from one of the supported source forms.

    Supported ``source["type"]`` values: ``matrix`` (validated for all
    metric axioms), ``points`` (p-norm cloud, p in {1, 2, "inf"}),
    ``weighted_l1`` (tuples with positive weights, default weight i+1 on
    coordinate i), ``graph`` (undirected weighted, geodesic metric), and
    ``grid`` (integer grid under a p-norm, default l1).
    """
    kind = source.get("type")
    space_id = source.get("space_id", kind or "space")
    label = source.get("label")

    if kind == "matrix":
        rows = source["dist"]
        _validate_matrix(rows)
        return FiniteMetricSpace(space_id, _freeze(rows), label, source)

    if kind == "points":
        coords = source["coords"]
        if not coords:
            raise InputError("empty point cloud")
        p = source.get("p", 2)
        if p not in (1, 2, "inf"):
            raise InputError(f"unsupported p-norm {p!r}")
        rows = [[_minkowski(a, b, p) for b in coords] for a in coords]
        return FiniteMetricSpace(space_id, _freeze(rows), label, source)

    if kind == "weighted_l1":
        tuples = source["tuples"]
        if not tuples:
            raise InputError("empty tuple list")
        width = len(tuples[0])
        if any(len(t) != width for t in tuples):
            raise InputError("tuples have mixed lengths")
        weights = source.get("weights", [i + 1 for i in range(width)])
        if len(weights) != width or any(w <= 0 for w in weights):
            raise InputError("weights must be positive, one per coordinate")
        rows = [
            [sum(w * abs(x - y) for w, x, y in zip(weights, a, b)) for b in tuples]
            for a in tuples
        ]
        return FiniteMetricSpace(space_id, _freeze(rows), label, source)

    if kind == "graph":
        n = source["n"]
        if n < 1:
            raise InputError("graph needs at least one vertex")
        rows = _graph_geodesics(n, source.get("edges", []))
        if n > 1:
            # duplicate vertices (zero geodesic distance) are not a metric
            for i in range(n):
                for j in range(i + 1, n):
                    if rows[i][j] == 0:
                        raise MetricViolation(i, j, reason="nonpositive off-diagonal")
        return FiniteMetricSpace(space_id, _freeze(rows), label, source)

    if kind == "grid":
        width, height = source["width"], source["height"]
        if width < 1 or height < 1:
            raise InputError("grid dimensions must be positive")
        p = source.get("p", 1)
        if p not in (1, 2, "inf"):
            raise InputError(f"unsupported p-norm {p!r}")
        coords = [(x, y) for y in range(height) for x in range(width)]
        rows = [[_minkowski(a, b, p) for b in coords] for a in coords]
        return FiniteMetricSpace(space_id, _freeze(rows), label, source)

    raise InputError(f"unknown space source type {kind!r}")


@dataclass(frozen=True)
class MetricFamily:
    """An ordered collection of subsets of parent spaces, treated as one
    object.  Duplicate member subsets are permitted."""

    family_id: str
    members: tuple[tuple[FiniteMetricSpace, tuple[PointId, ...]], ...]
    index_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.members:
            raise InputError("a family needs at least one member")
        for space, pts in self.members:
            if not pts:
                raise InputError("family members must be nonempty")
            if any(p not in space.points for p in pts):
                raise InputError("member points outside parent space")
        if self.index_labels and len(self.index_labels) != len(self.members):
            raise InputError("index_labels length mismatch")

    @staticmethod
    def of_space(space: FiniteMetricSpace, family_id: str | None = None) -> "MetricFamily":
        return MetricFamily(
            family_id or space.space_id,
            ((space, tuple(space.points)),),
        )

    @staticmethod
    def of_members(
        family_id: str,
        members: Iterable[tuple[FiniteMetricSpace, Iterable[PointId]]],
        labels: Iterable[str] = (),
    ) -> "MetricFamily":
        return MetricFamily(
            family_id,
            tuple((s, tuple(sorted(set(p)))) for s, p in members),
            tuple(labels),
        )

    def member_keys(self) -> list[tuple[str, tuple[PointId, ...]]]:
        return [(s.space_id, pts) for s, pts in self.members]


def mesh(family: MetricFamily):
    """Largest member diameter."""
    return max(space.diameter(pts) for space, pts in family.members)


def r_components(
    space: FiniteMetricSpace, subset: Iterable[PointId], r
) -> list[tuple[PointId, ...]]:
    """Partition ``subset`` into classes of the transitive closure of
    "distance <= r".  Distinct classes are pairwise more than r apart and
    each class is maximal.  Classes come back sorted by least point id.
    """
    pts = sorted(set(subset))
    if not pts:
        raise InputError("r_components needs a nonempty subset")
    uf = UnionFind(pts)
    for p, q in combinations(pts, 2):
        if numeric.le(space.dist(p, q), r):
            uf.union(p, q)
    return [tuple(c) for c in uf.classes()]


def max_separated_net(
    space: FiniteMetricSpace, subset: Iterable[PointId], l_sep
) -> tuple[PointId, ...]:
    """Greedy maximal l_sep-separated subset, scanning ids ascending."""
    pts = sorted(set(subset))
    if not pts:
        raise InputError("max_separated_net needs a nonempty subset")
    net: list[PointId] = []
    for p in pts:
        if all(numeric.ge(space.dist(p, q), l_sep) for q in net):
            net.append(p)
    return tuple(net)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Nondecreasing function on [0, inf) given by sample points, evaluated
    by linear interpolation and extrapolated with the boundary slopes."""

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.samples:
            raise InputError("piecewise-linear function needs samples")
        ts = [t for t, _ in self.samples]
        vs = [v for _, v in self.samples]
        if ts != sorted(ts) or len(set(ts)) != len(ts):
            raise InputError("sample abscissae must be strictly increasing")
        if any(b < a for a, b in zip(vs, vs[1:])):
            raise InputError("samples must be nondecreasing")

    @staticmethod
    def from_pairs(pairs: Iterable[Sequence]) -> "PiecewiseLinear":
        return PiecewiseLinear(tuple((t, v) for t, v in pairs))

    @staticmethod
    def linear(slope) -> "PiecewiseLinear":
        return PiecewiseLinear(((0, 0), (1, slope)))

    def __call__(self, t):
        pts = self.samples
        if len(pts) == 1:
            return pts[0][1]
        if t <= pts[0][0]:
            lo, hi = pts[0], pts[1]
        elif t >= pts[-1][0]:
            lo, hi = pts[-2], pts[-1]
        else:
            for lo, hi in zip(pts, pts[1:]):
                if lo[0] <= t <= hi[0]:
                    break
        span = hi[0] - lo[0]
        value = lo[1] + (hi[1] - lo[1]) * (t - lo[0]) / span
        return max(value, 0)


@dataclass(frozen=True)
class MemberMap:
    """One function of a family map: points of a source member to points
    of a target member."""

    source_index: int
    target_index: int
    mapping: dict[PointId, PointId]


@dataclass(frozen=True)
class FamilyMap:
    source: MetricFamily
    target: MetricFamily
    maps: tuple[MemberMap, ...]
    delta: PiecewiseLinear
    rho: PiecewiseLinear

    def __post_init__(self):
        covered = {m.source_index for m in self.maps}
        if covered != set(range(len(self.source.members))):
            raise InputError("every source member needs at least one map")
        for t, _ in self.delta.samples:
            if self.delta(t) > self.rho(t):
                raise InputError("lower bound exceeds upper bound at sampled point")

    def map_for(self, source_index: int) -> MemberMap:
        for m in self.maps:
            if m.source_index == source_index:
                return m
        raise InputError(f"no map for source member {source_index}")


@dataclass
class FamilyMapReport:
    ok: bool
    worst_pair: tuple | None
    worst_side: str | None
    tight_lower: list[tuple]
    tight_upper: list[tuple]
    closeness_constant: float | None = None

    def summary(self) -> dict:
        return {
            "ok": self.ok,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "worst_side": self.worst_side,
            "tight_lower": [list(t) for t in self.tight_lower],
            "tight_upper": [list(t) for t in self.tight_upper],
            "closeness_constant": self.closeness_constant,
        }


def verify_family_map(fmap: FamilyMap, inverse: FamilyMap | None = None) -> FamilyMapReport:
    """Check the two-sided distance sandwich on every pair of every member.

    Reports the first worst violating pair, plus the empirically tightest
    lower/upper envelopes (per distinct source distance, the min and max
    image distance).  With ``inverse`` given, also reports the smallest
    closeness constant making both round trips uniformly close to the
    identity.
    """
    ok = True
    worst_pair = None
    worst_side = None
    worst_gap = 0
    lower: dict = {}
    upper: dict = {}
    for mm in fmap.maps:
        src_space, src_pts = fmap.source.members[mm.source_index]
        tgt_space, tgt_pts = fmap.target.members[mm.target_index]
        for x, y in combinations(sorted(src_pts), 2):
            if x not in mm.mapping or y not in mm.mapping:
                raise InputError(f"map is not total on member {mm.source_index}")
            dx = src_space.dist(x, y)
            dy = tgt_space.dist(mm.mapping[x], mm.mapping[y])
            lower[dx] = min(lower.get(dx, math.inf), dy)
            upper[dx] = max(upper.get(dx, -math.inf), dy)
            lo, hi = fmap.delta(dx), fmap.rho(dx)
            if numeric.lt(dy, lo):
                gap = lo - dy
                if gap > worst_gap:
                    worst_pair, worst_side, worst_gap = (x, y), "lower", gap
                ok = False
            elif numeric.gt(dy, hi):
                gap = dy - hi
                if gap > worst_gap:
                    worst_pair, worst_side, worst_gap = (x, y), "upper", gap
                ok = False
    closeness = None
    if inverse is not None:
        closeness = 0
        for mm in fmap.maps:
            src_space, src_pts = fmap.source.members[mm.source_index]
            back = inverse.map_for(mm.target_index).mapping
            for x in src_pts:
                closeness = max(closeness, src_space.dist(x, back[mm.mapping[x]]))
        for mm in inverse.maps:
            tgt_space, tgt_pts = inverse.source.members[mm.source_index]
            fwd = fmap.map_for(mm.target_index).mapping
            for y in tgt_pts:
                closeness = max(closeness, tgt_space.dist(y, fwd[mm.mapping[y]]))
    return FamilyMapReport(
        ok=ok,
        worst_pair=worst_pair,
        worst_side=worst_side,
        tight_lower=sorted(lower.items()),
        tight_upper=sorted(upper.items()),
        closeness_constant=closeness,
    )
