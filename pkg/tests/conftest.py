from __future__ import annotations

import pytest

from coarsekit.spaces import FiniteMetricSpace, MetricFamily, build_space


def line_space(count: int, space_id: str | None = None) -> FiniteMetricSpace:
    return build_space(
        {
            "type": "points",
            "space_id": space_id or f"line{count}",
            "coords": [[i] for i in range(count)],
            "p": 1,
        }
    )


def grid_space(width: int, height: int) -> FiniteMetricSpace:
    return build_space(
        {
            "type": "grid",
            "space_id": f"grid{width}x{height}",
            "width": width,
            "height": height,
        }
    )


@pytest.fixture
def line10():
    return line_space(10)


@pytest.fixture
def line8():
    return line_space(8)


def family_of(space) -> MetricFamily:
    return MetricFamily.of_space(space)


def bfs_threshold_components(space, subset, r):
    """Independent oracle: breadth-first search on the graph with an edge
    wherever the distance is at most r."""
    subset = sorted(set(subset))
    remaining = set(subset)
    components = []
    while remaining:
        start = min(remaining)
        queue = [start]
        comp = {start}
        remaining.discard(start)
        while queue:
            u = queue.pop()
            for v in sorted(remaining):
                if space.dist(u, v) <= r:
                    comp.add(v)
                    remaining.discard(v)
                    queue.append(v)
        components.append(tuple(sorted(comp)))
    return sorted(components, key=min)


def independent_certificate_check(cert) -> bool:
    """Quadratic-scan re-implementation of the certificate contract, kept
    free of the production verifier's code paths."""
    for m_idx, (space, pts) in enumerate(cert.source.members):
        seen = set()
        levels = cert.member_levels[m_idx]
        if len(levels) != cert.n + 1:
            return False
        for level in levels:
            for part in level:
                if not part or not set(part) <= set(pts):
                    return False
                if set(part) & seen:
                    return False
                seen |= set(part)
            for i in range(len(level)):
                for j in range(i + 1, len(level)):
                    d = min(
                        space.dist(a, b) for a in level[i] for b in level[j]
                    )
                    if d <= cert.r:
                        return False
        if seen != set(pts):
            return False
    target_keys = sorted(
        (s.space_id, pts) for s, pts in cert.target.members
    )
    part_keys = sorted(
        (cert.source.members[m][0].space_id, part)
        for m, levels in enumerate(cert.member_levels)
        for level in levels
        for part in level
    )
    return target_keys == part_keys
