"""Bundled fixture spaces and families used by the CLI, the service,
tests, and the UI."""

from __future__ import annotations

import random

from coarsekit.errors import InputError
from coarsekit.spaces import FiniteMetricSpace, MetricFamily, build_space


def line_source(count: int, start: int = 0, space_id: str | None = None) -> dict:
    return {
        "type": "points",
        "space_id": space_id or f"line{count}",
        "coords": [[start + i] for i in range(count)],
        "p": 1,
    }


def grid_source(width: int, height: int, space_id: str | None = None) -> dict:
    return {
        "type": "grid",
        "space_id": space_id or f"grid{width}x{height}",
        "width": width,
        "height": height,
        "p": 1,
    }


_SPACE_SOURCES: dict[str, dict] = {
    "singleton": {"type": "matrix", "space_id": "singleton", "dist": [[0]]},
    "pair": {"type": "matrix", "space_id": "pair", "dist": [[0, 1], [1, 0]]},
    "line8": line_source(8, space_id="line8"),
    "line16": line_source(16, space_id="line16"),
    "line30": line_source(30, space_id="line30"),
    "line31": line_source(31, space_id="line31"),
    "line40": line_source(40, space_id="line40"),
    "line64": line_source(64, space_id="line64"),
    # the 0..100 integer segment (101 points)
    "line100": line_source(101, space_id="line100"),
    "grid8": grid_source(8, 8, space_id="grid8"),
    "grid16": grid_source(16, 16, space_id="grid16"),
    "wcube3": {
        "type": "weighted_l1",
        "space_id": "wcube3",
        "tuples": [
            [a, b, c] for a in (0, 1) for b in (0, 1) for c in (0, 1)
        ],
        "weights": [1, 2, 3],
    },
}

_DESCRIPTIONS = {
    "singleton": "one point",
    "pair": "two points at distance 1",
    "line8": "integer segment 0..7",
    "line16": "integer segment 0..15",
    "line30": "integer segment 0..29",
    "line31": "integer segment 0..30",
    "line40": "integer segment 0..39",
    "line64": "integer segment 0..63",
    "line100": "integer segment 0..100",
    "grid8": "8x8 integer grid, l1 metric",
    "grid16": "16x16 integer grid, l1 metric",
    "wcube3": "binary triples under weighted l1 with weights 1,2,3",
    "segments8": "family of nested segments 0..k inside line8",
}

_FAMILY_NAMES = ("segments8",)


def fixture_names() -> list[str]:
    return sorted(list(_SPACE_SOURCES) + list(_FAMILY_NAMES))


def describe_fixtures() -> list[dict]:
    out = []
    for name in fixture_names():
        if name in _FAMILY_NAMES:
            fam = fixture_family(name)
            out.append(
                {
                    "name": name,
                    "kind": "family",
                    "members": len(fam.members),
                    "description": _DESCRIPTIONS.get(name, ""),
                }
            )
        else:
            space = fixture_space(name)
            out.append(
                {
                    "name": name,
                    "kind": "space",
                    "points": space.n_points,
                    "description": _DESCRIPTIONS.get(name, ""),
                }
            )
    return out


def fixture_space(name: str) -> FiniteMetricSpace:
    if name not in _SPACE_SOURCES:
        raise InputError(f"unknown fixture space {name!r}")
    return build_space(_SPACE_SOURCES[name])


def fixture_family(name: str) -> MetricFamily:
    if name in _SPACE_SOURCES:
        return MetricFamily.of_space(fixture_space(name))
    if name == "segments8":
        line = fixture_space("line8")
        members = [(line, tuple(range(k + 1))) for k in range(8)]
        return MetricFamily.of_members("segments8", members)
    raise InputError(f"unknown fixture {name!r}")


def random_metric_space(
    n_points: int, seed: int, space_id: str | None = None, max_weight: int = 9
) -> FiniteMetricSpace:
    """Deterministic random integer metric: random symmetric weights run
    through shortest-path closure, so all metric axioms hold exactly."""
    if n_points < 1:
        raise InputError("need at least one point")
    rng = random.Random(seed)
    n = n_points
    weights = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w = rng.randint(1, max_weight)
            weights[i][j] = weights[j][i] = w
    for k in range(n):
        for i in range(n):
            wik = weights[i][k]
            row_k = weights[k]
            row_i = weights[i]
            for j in range(n):
                alt = wik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
                    weights[j][i] = alt
    return build_space(
        {
            "type": "matrix",
            "space_id": space_id or f"random{n}-{seed}",
            "dist": weights,
        }
    )
