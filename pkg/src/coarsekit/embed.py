"""Finite-dimensional Euclidean feature maps on metric-space subsets:
the unit-norm/small-variation/decaying-correlation criterion checks, and
the weighted gluing of per-part maps into a whole-space map.

Hilbert spaces are modeled as finite-dimensional blocks; a glued map's
codomain is the concatenation of per-part blocks with implicit zeros.
The long-range decay condition is asymptotic, so it is reported as a
profile over a finite grid of separations with no pass/fail threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from coarsekit import numeric
from coarsekit.decompose import DecompositionCertificate
from coarsekit.errors import (
    InputError,
    PartConditionViolated,
    WeightAxiomViolated,
)
from coarsekit.spaces import FiniteMetricSpace, PointId

Vector = tuple[float, ...]


def vec_norm(v: Sequence[float]) -> float:
    return math.sqrt(sum(x * x for x in v))


def vec_inner(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


def vec_dist(a: Sequence[float], b: Sequence[float]) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


@dataclass(frozen=True)
class FeatureMap:
    space: FiniteMetricSpace
    domain: tuple[PointId, ...]
    vectors: dict[PointId, Vector]

    def __post_init__(self):
        if set(self.vectors) != set(self.domain):
            raise InputError("feature map must be total on its domain")
        dims = {len(v) for v in self.vectors.values()}
        if len(dims) > 1:
            raise InputError("feature vectors have mixed dimensions")

    @property
    def dim(self) -> int:
        return len(next(iter(self.vectors.values())))

    @staticmethod
    def constant(space, domain, vector) -> "FeatureMap":
        pts = tuple(sorted(set(domain)))
        return FeatureMap(space, pts, {p: tuple(vector) for p in pts})


@dataclass
class FeatureMapReport:
    unit_norm_ok: bool
    worst_norm_deviation: float
    variation_ok: bool
    worst_close_pair: tuple | None
    worst_close_deviation: float
    decay_profile: list[tuple[float, float]]

    def summary(self) -> dict:
        return {
            "unit_norm_ok": self.unit_norm_ok,
            "worst_norm_deviation": self.worst_norm_deviation,
            "variation_ok": self.variation_ok,
            "worst_close_pair": list(self.worst_close_pair)
            if self.worst_close_pair
            else None,
            "worst_close_deviation": self.worst_close_deviation,
            "decay_profile": [[s, v] for s, v in self.decay_profile],
        }


def check_feature_map(
    fmap: FeatureMap, close_range, epsilon, decay_grid: Iterable = ()
) -> FeatureMapReport:
    """Check unit norms everywhere and small variation on pairs within
    close_range; report the largest absolute inner product among pairs at
    or beyond each grid separation (0 when no such pair exists)."""
    worst_norm = 0.0
    for p in fmap.domain:
        worst_norm = max(worst_norm, abs(vec_norm(fmap.vectors[p]) - 1))
    unit_ok = worst_norm <= numeric.TOL

    variation_ok = True
    worst_pair = None
    worst_dev = 0.0
    pair_data = []
    for x, y in combinations(sorted(fmap.domain), 2):
        d = fmap.space.dist(x, y)
        gap = vec_dist(fmap.vectors[x], fmap.vectors[y])
        corr = abs(vec_inner(fmap.vectors[x], fmap.vectors[y]))
        pair_data.append((d, corr))
        if numeric.le(d, close_range) and numeric.gt(gap, epsilon):
            variation_ok = False
            if gap - epsilon > worst_dev:
                worst_pair, worst_dev = (x, y), gap - epsilon

    profile = []
    for s in decay_grid:
        level = max((corr for d, corr in pair_data if numeric.ge(d, s)), default=0.0)
        profile.append((s, level))

    return FeatureMapReport(
        unit_norm_ok=unit_ok,
        worst_norm_deviation=worst_norm,
        variation_ok=variation_ok,
        worst_close_pair=worst_pair,
        worst_close_deviation=worst_dev,
        decay_profile=profile,
    )


def enlarge_set(
    space: FiniteMetricSpace, domain: Iterable[PointId], part: Iterable[PointId], lam
) -> tuple[PointId, ...]:
    part = list(part)
    return tuple(
        x for x in sorted(domain) if numeric.le(space.point_to_set(x, part), lam)
    )


def enlarge_parts(
    cert: DecompositionCertificate, member_index: int, lam
) -> list[tuple[PointId, ...]]:
    """The member's parts in level-major order, each grown by lam within
    the member."""
    space, pts = cert.source.members[member_index]
    out = []
    for level in cert.member_levels[member_index]:
        for part in level:
            out.append(enlarge_set(space, pts, part, lam))
    return out


@dataclass
class GlueResult:
    feature_map: FeatureMap
    norm_max_deviation: float
    close_pairs_ok: bool
    worst_close_pair: tuple | None
    worst_close_gap: float
    decay_profile: list[tuple[float, float]]
    enlargement_ok: bool

    def summary(self) -> dict:
        return {
            "norm_max_deviation": self.norm_max_deviation,
            "close_pairs_ok": self.close_pairs_ok,
            "worst_close_pair": list(self.worst_close_pair)
            if self.worst_close_pair
            else None,
            "worst_close_gap": self.worst_close_gap,
            "decay_profile": [[s, v] for s, v in self.decay_profile],
            "enlargement_ok": self.enlargement_ok,
        }


def glue_embeddings(
    space: FiniteMetricSpace,
    domain: Iterable[PointId],
    parts: Sequence[Iterable[PointId]],
    weights: Sequence[dict],
    part_maps: Sequence[FeatureMap],
    close_range,
    epsilon,
    decay_grid: Iterable = (),
) -> GlueResult:
    """Glue per-part unit feature maps with weight square roots.

    Weight axioms: (a) weights sum to 1 at every domain point, (b) a
    part's weight vanishes off that part, (c) pairs within close_range
    have total weight variation at most epsilon**2 / 4.  Each part map
    must have unit norms and variation at most epsilon/2 (on pairs within
    close_range) on the part enlarged by close_range, and is extended by
    zero beyond it.  The glued map then has unit norms, variation at most
    epsilon on pairs within close_range, and its long-range correlation
    profile is reported on the grid.
    """
    dom = tuple(sorted(set(domain)))
    if not (len(parts) == len(weights) == len(part_maps)):
        raise InputError("parts, weights and part maps must align")
    part_sets = [set(p) for p in parts]
    enlarged = [set(enlarge_set(space, dom, p, close_range)) for p in parts]

    for x in dom:
        total = sum(w.get(x, 0) for w in weights)
        if not numeric.eq(total, 1):
            raise WeightAxiomViolated("a", f"weights at {x} sum to {total}")
    for j, w in enumerate(weights):
        for x, value in w.items():
            if value != 0 and x not in part_sets[j]:
                raise WeightAxiomViolated("b", f"weight of part {j} nonzero at {x}")
        if any(v < 0 for v in w.values()):
            raise WeightAxiomViolated("b", f"negative weight in part {j}")
    budget = epsilon**2 / 4
    for x, y in combinations(dom, 2):
        if numeric.le(space.dist(x, y), close_range):
            swing = sum(abs(w.get(x, 0) - w.get(y, 0)) for w in weights)
            if numeric.gt(swing, budget):
                raise WeightAxiomViolated(
                    "c", f"variation {float(swing)} at pair ({x},{y}) exceeds {budget}"
                )

    for j, fmap in enumerate(part_maps):
        missing = enlarged[j] - set(fmap.domain)
        if missing:
            raise PartConditionViolated(
                j, "domain", f"map missing enlarged points {sorted(missing)[:5]}"
            )
        for x in sorted(enlarged[j]):
            if abs(vec_norm(fmap.vectors[x]) - 1) > numeric.TOL:
                raise PartConditionViolated(j, "unit_norm", f"at point {x}")
        half = epsilon / 2
        for x, y in combinations(sorted(enlarged[j]), 2):
            if numeric.le(space.dist(x, y), close_range):
                gap = vec_dist(fmap.vectors[x], fmap.vectors[y])
                if numeric.gt(gap, half):
                    raise PartConditionViolated(
                        j, "variation", f"gap {gap} at pair ({x},{y})"
                    )

    enlargement_ok = all(
        part_sets[j] <= enlarged[j]
        and all(
            numeric.le(space.point_to_set(x, sorted(part_sets[j])), close_range)
            for x in enlarged[j]
        )
        for j in range(len(parts))
    )

    dims = [fm.dim for fm in part_maps]
    vectors = {}
    for x in dom:
        blocks: list[float] = []
        for j, fmap in enumerate(part_maps):
            w = float(weights[j].get(x, 0))
            if w != 0 and x in enlarged[j]:
                root = math.sqrt(w)
                blocks.extend(root * c for c in fmap.vectors[x])
            else:
                blocks.extend([0.0] * dims[j])
        vectors[x] = tuple(blocks)
    glued = FeatureMap(space, dom, vectors)

    norm_dev = max(abs(vec_norm(v) - 1) for v in vectors.values())
    close_ok = True
    worst_pair = None
    worst_gap = 0.0
    pair_data = []
    for x, y in combinations(dom, 2):
        d = space.dist(x, y)
        gap = vec_dist(vectors[x], vectors[y])
        corr = abs(vec_inner(vectors[x], vectors[y]))
        pair_data.append((d, corr))
        if numeric.le(d, close_range) and numeric.gt(gap, epsilon):
            close_ok = False
            if gap - epsilon > worst_gap:
                worst_pair, worst_gap = (x, y), gap - epsilon
    profile = [
        (s, max((corr for d, corr in pair_data if numeric.ge(d, s)), default=0.0))
        for s in decay_grid
    ]

    return GlueResult(
        feature_map=glued,
        norm_max_deviation=norm_dev,
        close_pairs_ok=close_ok,
        worst_close_pair=worst_pair,
        worst_close_gap=worst_gap,
        decay_profile=profile,
        enlargement_ok=enlargement_ok,
    )


def glue_certificate_embeddings(
    cert: DecompositionCertificate,
    weights: Sequence[dict],
    part_maps: Sequence[FeatureMap],
    close_range,
    epsilon,
    decay_grid: Iterable = (),
    member_index: int = 0,
    enlarge_by=0,
) -> GlueResult:
    """Glue along a certificate's parts (level-major order), optionally
    pre-grown by ``enlarge_by`` so the weight supports may overlap."""
    space, pts = cert.source.members[member_index]
    if enlarge_by:
        parts = enlarge_parts(cert, member_index, enlarge_by)
    else:
        parts = [
            part
            for level in cert.member_levels[member_index]
            for part in level
        ]
    return glue_embeddings(
        space, pts, parts, weights, part_maps, close_range, epsilon, decay_grid
    )
