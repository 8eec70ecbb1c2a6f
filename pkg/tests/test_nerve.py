from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from conftest import line_space
from coarsekit.covers import Cover, lebesgue_number, multiplicity
from coarsekit.decompose import certificate_from_cover, verify_certificate
from coarsekit.errors import InputError, LipschitzTooLarge, PreconditionFailed
from coarsekit.fixtures import random_metric_space
from coarsekit.nerve import (
    ComplexPoint,
    UniformComplex,
    barycenter,
    l1_distance,
    map_lipschitz_constant,
    nerve_of_cover,
    partition_of_unity_map,
    pullback_star_cover,
    star_cover,
)


class TestL1:
    def test_same_point_zero(self):
        p = ComplexPoint.vertex(3)
        assert l1_distance(p, p) == 0

    def test_distinct_vertices_are_two_apart(self):
        assert l1_distance(ComplexPoint.vertex(0), ComplexPoint.vertex(1)) == 2

    def test_edge_midpoint_to_endpoint(self):
        mid = ComplexPoint.build({0: Fraction(1, 2), 1: Fraction(1, 2)})
        assert l1_distance(mid, ComplexPoint.vertex(0)) == 1

    def test_coordinates_must_sum_to_one(self):
        with pytest.raises(InputError):
            ComplexPoint.build({0: 0.5, 1: 0.4})

    def test_support_must_span_a_simplex(self):
        complex_ref = UniformComplex.build([(0, 1), (2,)])
        with pytest.raises(InputError):
            ComplexPoint.build({0: 0.5, 2: 0.5}, complex_ref)


class TestNerve:
    def test_partition_gives_isolated_vertices(self):
        space = line_space(6)
        cover = Cover.build(space, [(0, 1, 2), (3, 4, 5)])
        complex_ref = nerve_of_cover(cover)
        assert complex_ref.dim == 0
        assert len(complex_ref.vertices) == 2

    def test_single_overlap_gives_an_edge(self):
        space = line_space(5)
        cover = Cover.build(space, [(0, 1, 2), (2, 3, 4)])
        complex_ref = nerve_of_cover(cover)
        assert complex_ref.dim == 1
        assert complex_ref.facets == (frozenset({0, 1}),)

    def test_simplices_match_intersection_scan(self):
        rng = random.Random(17)
        for seed in range(8):
            space = random_metric_space(10, seed)
            elements = []
            for _ in range(4):
                c = rng.randrange(10)
                rad = rng.randint(1, 6)
                elements.append(
                    tuple(x for x in space.points if space.dist(c, x) <= rad)
                )
            uncovered = set(space.points) - {x for el in elements for x in el}
            if uncovered:
                elements.append(tuple(sorted(uncovered)))
            cover = Cover.build(space, elements)
            complex_ref = nerve_of_cover(cover)
            for k in range(1, len(cover.elements) + 1):
                for combo in combinations(range(len(cover.elements)), k):
                    has_common = bool(
                        set.intersection(*(set(cover.elements[i]) for i in combo))
                    )
                    assert complex_ref.has_simplex(combo) == has_common

    def test_dimension_is_multiplicity_minus_one(self):
        space = line_space(9)
        cover = Cover.build(space, [(0, 1, 2, 3), (2, 3, 4, 5), (3, 6, 7, 8)])
        assert nerve_of_cover(cover).dim == multiplicity(cover) - 1


def two_interval_cover(space, overlap_start, overlap_end):
    n = space.n_points
    return Cover.build(
        space, [range(0, overlap_end), range(overlap_start, n)]
    )


class TestPartitionOfUnity:
    def test_required_lebesgue_for_unit_epsilon(self):
        # (2n+2)(2n+3)/epsilon at n=1, epsilon=1 is 20
        space = line_space(40)
        cover = two_interval_cover(space, 1, 39)
        assert lebesgue_number(cover) == 20
        cmap = partition_of_unity_map(cover, 1, 1)
        assert map_lipschitz_constant(cmap) <= 1

    def test_precondition_rejects_small_lebesgue(self):
        space = line_space(12)
        cover = two_interval_cover(space, 5, 7)
        with pytest.raises(PreconditionFailed):
            partition_of_unity_map(cover, 1, 1)

    def test_point_in_single_far_element_maps_to_vertex(self):
        space = line_space(30)
        cover = two_interval_cover(space, 10, 20)
        cmap = partition_of_unity_map(cover, 4, 1)
        value = cmap.values[0]  # deep inside the first element only
        assert value.support == (0,)
        assert value.max_coordinate() == 1

    def test_weights_sum_to_one_with_exact_arithmetic(self):
        space = line_space(30)
        cover = two_interval_cover(space, 10, 20)
        cmap = partition_of_unity_map(cover, 4, 1)
        for p in space.points:
            coords = cmap.values[p].as_dict()
            assert sum(coords.values()) == 1
            assert all(isinstance(c, Fraction) for c in coords.values())

    def test_support_inside_containing_elements(self):
        space = line_space(30)
        cover = two_interval_cover(space, 10, 20)
        cmap = partition_of_unity_map(cover, 4, 1)
        for p in space.points:
            for v in cmap.values[p].support:
                assert p in set(cover.elements[v])

    def test_lipschitz_bound_on_all_pairs(self):
        space = line_space(40)
        cover = two_interval_cover(space, 1, 39)
        cmap = partition_of_unity_map(cover, 1, 1)
        for x, y in combinations(space.points, 2):
            assert l1_distance(cmap.values[x], cmap.values[y]) <= space.dist(x, y)

    def test_whole_domain_element_takes_all_mass(self):
        space = line_space(10)
        cover = Cover.build(space, [range(10), (3, 4)])
        cmap = partition_of_unity_map(cover, 1, 1)
        for p in space.points:
            assert cmap.values[p].support == (0,)


class TestStarCover:
    def test_single_vertex_unbounded(self):
        complex_ref = UniformComplex.build([(0,)])
        report = star_cover(complex_ref)
        assert report.lebesgue_bound == math.inf
        assert report.ok

    def test_edge_exact_analysis(self):
        # along one edge the worst point is the midpoint: both coordinates
        # equal 1/2, so the bound 1/(n+1) = 1/2 is met with equality
        complex_ref = UniformComplex.build([(0, 1)])
        report = star_cover(complex_ref)
        assert report.lebesgue_bound == Fraction(1, 2)
        assert report.min_max_coordinate == Fraction(1, 2)
        assert report.ok

    def test_simplex_barycenter_attains_the_bound(self):
        for size in (2, 3, 4, 5):
            complex_ref = UniformComplex.build([tuple(range(size))])
            center = barycenter(frozenset(range(size)))
            assert center.max_coordinate() == Fraction(1, size)
            report = star_cover(complex_ref)
            assert report.min_max_coordinate == Fraction(1, size)
            assert report.ok

    def test_random_points_respect_pigeonhole(self):
        rng = random.Random(23)
        complex_ref = UniformComplex.build([(0, 1, 2), (2, 3), (3, 4, 5, 6)])
        report = star_cover(complex_ref, rng=rng, n_random=500)
        assert report.ok
        assert report.tested_points > 500


class TestPullbackStarCover:
    def test_constant_map_covers_everything(self):
        space = line_space(7)
        complex_ref = UniformComplex.build([(0,)])
        values = {p: ComplexPoint.vertex(0) for p in space.points}
        from coarsekit.nerve import ComplexMap

        cmap = ComplexMap(space, tuple(space.points), complex_ref, values)
        cover = pullback_star_cover(cmap, 5)
        assert cover.elements == (tuple(space.points),)

    def test_roundtrip_on_line(self):
        # build a partition-of-unity map and pull the star cover back:
        # multiplicity stays within dim+1 and the Lebesgue number clears r
        space = line_space(40)
        cover = Cover.build(space, [range(0, 39), range(1, 40)])
        cmap = partition_of_unity_map(cover, 1, 1)
        r = 2
        assert map_lipschitz_constant(cmap) <= Fraction(1, 2 * r)
        back = pullback_star_cover(cmap, r)
        assert multiplicity(back) <= 2
        assert lebesgue_number(back) > r

    def test_rejects_large_lipschitz_constant(self):
        space = line_space(6)
        complex_ref = UniformComplex.build([(0,), (1,)])
        from coarsekit.nerve import ComplexMap

        values = {
            p: ComplexPoint.vertex(0 if p < 3 else 1) for p in space.points
        }
        cmap = ComplexMap(space, tuple(space.points), complex_ref, values)
        with pytest.raises(LipschitzTooLarge):
            pullback_star_cover(cmap, 100)

    def test_multiplicity_equals_support_bound(self):
        space = line_space(40)
        cover = Cover.build(space, [range(0, 39), range(1, 40)])
        cmap = partition_of_unity_map(cover, 1, 1)
        back = pullback_star_cover(cmap, 2)
        support_bound = max(len(cmap.values[p].support) for p in space.points)
        assert multiplicity(back) == support_bound

    def test_full_pipeline_yields_certificate(self):
        # cover statistics to complex map to star cover to certificate
        space = line_space(40)
        cover = Cover.build(space, [range(0, 39), range(1, 40)])
        cmap = partition_of_unity_map(cover, 1, 1)
        back = pullback_star_cover(cmap, 2)
        m = multiplicity(back)
        leb = lebesgue_number(back)
        r = Fraction(2 * int(leb) - 1, 2 * m) if leb != math.inf else 1
        cert = certificate_from_cover(back, r, m - 1)
        assert verify_certificate(cert).ok
