from __future__ import annotations

import math
import random

import pytest

from conftest import line_space
from coarsekit.covers import Cover
from coarsekit.embed import (
    FeatureMap,
    check_feature_map,
    enlarge_parts,
    enlarge_set,
    glue_certificate_embeddings,
    glue_embeddings,
)
from coarsekit.decompose import DecompositionCertificate
from coarsekit.errors import PartConditionViolated, WeightAxiomViolated
from coarsekit.nerve import partition_of_unity_map
from coarsekit.spaces import MetricFamily


def pou_weights(space, cover):
    """Weights from the distance-quotient partition of unity, exact."""
    cmap = partition_of_unity_map(cover, 4, len(cover.elements) - 1)
    return [
        {
            p: cmap.values[p].coord(i)
            for p in cover.domain
            if cmap.values[p].coord(i) != 0
        }
        for i in range(len(cover.elements))
    ]


class TestCheckFeatureMap:
    def test_constant_unit_map_never_decays(self):
        space = line_space(10)
        fmap = FeatureMap.constant(space, space.points, (1.0,))
        report = check_feature_map(fmap, 2, 0.5, decay_grid=(1, 5, 9))
        assert report.unit_norm_ok
        assert report.variation_ok
        assert report.decay_profile == [(1, 1.0), (5, 1.0), (9, 1.0)]

    def test_orthonormal_per_point_decays_but_varies(self):
        space = line_space(5)
        vectors = {
            p: tuple(1.0 if i == p else 0.0 for i in range(5))
            for p in space.points
        }
        fmap = FeatureMap(space, tuple(space.points), vectors)
        report = check_feature_map(fmap, 1, 1.0, decay_grid=(1, 3))
        assert report.unit_norm_ok
        assert not report.variation_ok  # sqrt(2) > 1 for adjacent points
        assert report.decay_profile == [(1, 0.0), (3, 0.0)]

    def test_profile_matches_brute_force(self):
        rng = random.Random(13)
        space = line_space(12)
        vectors = {}
        for p in space.points:
            raw = [rng.uniform(-1, 1) for _ in range(3)]
            norm = math.sqrt(sum(x * x for x in raw))
            vectors[p] = tuple(x / norm for x in raw)
        fmap = FeatureMap(space, tuple(space.points), vectors)
        report = check_feature_map(fmap, 1, 2, decay_grid=(2, 6))
        for s, value in report.decay_profile:
            brute = max(
                (
                    abs(sum(a * b for a, b in zip(vectors[x], vectors[y])))
                    for x in space.points
                    for y in space.points
                    if x != y and space.dist(x, y) >= s
                ),
                default=0.0,
            )
            assert value == pytest.approx(brute, abs=1e-12)

    def test_decay_profile_nonincreasing(self):
        rng = random.Random(14)
        space = line_space(10)
        vectors = {}
        for p in space.points:
            raw = [rng.uniform(-1, 1) for _ in range(4)]
            norm = math.sqrt(sum(x * x for x in raw))
            vectors[p] = tuple(x / norm for x in raw)
        fmap = FeatureMap(space, tuple(space.points), vectors)
        profile = check_feature_map(fmap, 1, 2, decay_grid=(1, 3, 5, 8)).decay_profile
        values = [v for _, v in profile]
        assert values == sorted(values, reverse=True)


class TestGlue:
    def _two_intervals(self):
        space = line_space(30)
        parts = [tuple(range(0, 20)), tuple(range(10, 30))]
        cover = Cover.build(space, parts)
        weights = pou_weights(space, cover)
        xi = [
            FeatureMap.constant(space, enlarge_set(space, space.points, parts[0], 1), (1.0, 0.0)),
            FeatureMap.constant(space, enlarge_set(space, space.points, parts[1], 1), (0.0, 1.0)),
        ]
        return space, parts, weights, xi

    def test_single_part_reproduces_the_map(self):
        space = line_space(8)
        parts = [tuple(space.points)]
        weights = [{p: 1 for p in space.points}]
        xi = [FeatureMap.constant(space, space.points, (0.6, 0.8))]
        result = glue_embeddings(space, space.points, parts, weights, xi, 1, 1)
        assert result.feature_map.vectors[0] == (0.6, 0.8)
        assert result.norm_max_deviation <= 1e-12

    def test_two_interval_norm_identity_and_variation(self):
        space, parts, weights, xi = self._two_intervals()
        result = glue_embeddings(
            space, space.points, parts, weights, xi, 1, 0.9, decay_grid=(5, 25)
        )
        assert result.norm_max_deviation <= 1e-9
        assert result.close_pairs_ok
        assert result.enlargement_ok

    def test_norm_square_is_weighted_average(self):
        space, parts, weights, xi = self._two_intervals()
        result = glue_embeddings(space, space.points, parts, weights, xi, 1, 0.9)
        for p in space.points:
            v = result.feature_map.vectors[p]
            total = sum(float(w.get(p, 0)) for w in weights)
            assert sum(c * c for c in v) == pytest.approx(total, abs=1e-12)

    def test_weight_sum_axiom_enforced(self):
        space = line_space(6)
        parts = [tuple(space.points)]
        weights = [{p: 0.5 for p in space.points}]
        xi = [FeatureMap.constant(space, space.points, (1.0,))]
        with pytest.raises(WeightAxiomViolated) as exc:
            glue_embeddings(space, space.points, parts, weights, xi, 1, 1)
        assert exc.value.axiom == "a"

    def test_weight_support_axiom_enforced(self):
        space = line_space(6)
        parts = [(0, 1, 2), (3, 4, 5)]
        weights = [
            {0: 1, 1: 1, 2: 1, 3: 1},
            {3: 0, 4: 1, 5: 1},
        ]
        xi = [
            FeatureMap.constant(space, space.points, (1.0,)),
            FeatureMap.constant(space, space.points, (1.0,)),
        ]
        with pytest.raises(WeightAxiomViolated) as exc:
            glue_embeddings(space, space.points, parts, weights, xi, 1, 1)
        assert exc.value.axiom == "b"

    def test_weight_variation_axiom_enforced(self):
        space = line_space(6)
        parts = [(0, 1, 2), (3, 4, 5)]
        weights = [
            {0: 1, 1: 1, 2: 1},
            {3: 1, 4: 1, 5: 1},
        ]
        xi = [
            FeatureMap.constant(space, space.points, (1.0, 0.0)),
            FeatureMap.constant(space, space.points, (0.0, 1.0)),
        ]
        # indicator weights jump by 2 across the 2-3 gap; budget is eps^2/4
        with pytest.raises(WeightAxiomViolated) as exc:
            glue_embeddings(space, space.points, parts, weights, xi, 1, 1)
        assert exc.value.axiom == "c"

    def test_part_unit_norm_enforced_on_enlargement(self):
        space, parts, weights, _ = self._two_intervals()
        xi = [
            FeatureMap.constant(space, enlarge_set(space, space.points, parts[0], 1), (1.0, 0.0)),
            FeatureMap.constant(space, enlarge_set(space, space.points, parts[1], 1), (0.0, 0.5)),
        ]
        with pytest.raises(PartConditionViolated) as exc:
            glue_embeddings(space, space.points, parts, weights, xi, 1, 0.9)
        assert exc.value.condition == "unit_norm"

    def test_certificate_parts_can_be_grown_before_gluing(self):
        space = line_space(30)
        family = MetricFamily.of_space(space)
        cert = DecompositionCertificate.build(
            family, 9, 1, [[[[*range(0, 15)]], [[*range(15, 30)]]]]
        )
        parts = enlarge_parts(cert, 0, 5)
        assert parts[0] == tuple(range(0, 20))
        assert parts[1] == tuple(range(10, 30))
        cover = Cover.build(space, parts)
        weights = pou_weights(space, cover)
        xi = [
            FeatureMap.constant(space, enlarge_set(space, space.points, parts[0], 1), (1.0, 0.0)),
            FeatureMap.constant(space, enlarge_set(space, space.points, parts[1], 1), (0.0, 1.0)),
        ]
        result = glue_certificate_embeddings(
            cert, weights, xi, 1, 0.9, enlarge_by=5
        )
        assert result.norm_max_deviation <= 1e-9
        assert result.close_pairs_ok
