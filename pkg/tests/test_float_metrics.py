"""Euclidean (float) metrics through the main pipelines: everything else
in the suite leans on exact integer distances, so these pin down the
tolerance-comparison paths."""

from __future__ import annotations

import random

from coarsekit.covers import Cover, lebesgue_number, multiplicity
from coarsekit.decompose import defend, exhaustive_decompose, verify_certificate
from coarsekit.game import DEFENDER_WON, IN_PROGRESS, challenge, start_session
from coarsekit.nerve import map_lipschitz_constant, partition_of_unity_map
from coarsekit.spaces import MetricFamily, build_space


def float_cloud(count, seed, span=20.0):
    rng = random.Random(seed)
    coords = [[rng.uniform(0, span), rng.uniform(0, span)] for _ in range(count)]
    return build_space(
        {"type": "points", "space_id": f"cloud{count}-{seed}", "coords": coords, "p": 2}
    )


def half_step_line(count):
    return build_space(
        {
            "type": "points",
            "space_id": f"halfline{count}",
            "coords": [[0.5 * i] for i in range(count)],
            "p": 1,
        }
    )


def test_defend_and_verify_on_euclidean_clouds():
    for seed in range(4):
        cloud = float_cloud(16, seed)
        family = MetricFamily.of_space(cloud)
        for r in (0.5, 1.7, 3.3):
            cert = defend(family, r, "net_then_grave")
            assert verify_certificate(cert).ok


def test_oracle_on_euclidean_subset():
    cloud = float_cloud(18, 9)
    verdict = exhaustive_decompose(cloud, 2.5, 1, 10.0, subset=range(8))
    assert verdict.decomposable
    assert verify_certificate(verdict.witness).ok


def test_partition_of_unity_on_fractional_line():
    space = half_step_line(80)  # diameter 39.5
    cover = Cover.build(space, [range(0, 78), range(2, 80)])
    n, eps = 1, 2.0
    assert multiplicity(cover) <= n + 1
    assert lebesgue_number(cover) >= (2 * n + 2) * (2 * n + 3) / eps
    cmap = partition_of_unity_map(cover, eps, n)
    measured = map_lipschitz_constant(cmap)
    assert 0 < measured <= eps * (1 + 1e-9)


def test_game_on_fractional_line():
    # members spanning 3.0 at scale 1.3 are a fixed point of the net-ball
    # pipeline (no greedy net yields the asymmetric cover needed to carve
    # them), so 3.0 is the strategy's floor on this fixture
    space = half_step_line(60)
    session = start_session(
        MetricFamily.of_space(space), 3.0, "net_then_grave", max_turns=12
    )
    while session.status == IN_PROGRESS:
        challenge(session, 1.3)
    assert session.status == DEFENDER_WON
    assert session.turns[-1].mesh <= 3.0
