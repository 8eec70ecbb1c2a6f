from __future__ import annotations

import pytest

from conftest import family_of, line_space
from coarsekit.errors import InputError, SessionFinished
from coarsekit.game import (
    DEFENDER_STUCK,
    DEFENDER_WON,
    IN_PROGRESS,
    challenge,
    replay_transcript,
    start_session,
)
from coarsekit.jsonio import session_from_json, session_to_json
from coarsekit.decompose import verify_certificate
from coarsekit.spaces import MetricFamily, mesh


def singleton_family():
    space = line_space(6)
    return MetricFamily.of_members("dots", [(space, [i]) for i in range(6)])


class TestLifecycle:
    def test_singletons_win_immediately(self):
        session = start_session(singleton_family(), 0, "net_then_grave")
        assert session.status == DEFENDER_WON
        assert session.turns == []

    def test_line_starts_in_progress(self):
        session = start_session(family_of(line_space(101)), 5, "net_then_grave")
        assert session.status == IN_PROGRESS

    def test_negative_bound_rejected(self):
        with pytest.raises(InputError):
            start_session(singleton_family(), -1, "net_then_grave")

    def test_challenge_on_finished_session_raises(self):
        session = start_session(singleton_family(), 0, "net_then_grave")
        with pytest.raises(SessionFinished):
            challenge(session, 1)

    def test_nonpositive_scale_rejected(self):
        session = start_session(family_of(line_space(20)), 1, "net_then_grave")
        with pytest.raises(InputError):
            challenge(session, 0)


class TestPlay:
    def test_small_scale_singleton_win(self):
        space = line_space(8)
        family = MetricFamily.of_members("sparse", [(space, [0, 3, 6])])
        session = start_session(family, 0, "singletons")
        challenge(session, 1)
        assert session.status == DEFENDER_WON
        assert session.turns[0].mesh == 0

    def test_every_turn_certificate_verifies_and_mesh_decreases(self):
        session = start_session(family_of(line_space(101)), 5, "net_then_grave")
        previous = mesh(session.initial_family)
        while session.status == IN_PROGRESS:
            challenge(session, 2)
            turn = session.turns[-1]
            assert verify_certificate(turn.certificate).ok
            assert turn.mesh <= previous
            previous = turn.mesh
        assert session.status == DEFENDER_WON

    def test_stuck_strategy_recorded(self):
        session = start_session(family_of(line_space(8)), 0, "singletons")
        challenge(session, 1)
        assert session.status == DEFENDER_STUCK
        assert "gap" in session.stuck_reason

    def test_max_turns_cap(self):
        # bound 0 is unreachable for a multi-point family via net_then_grave,
        # so the session must stop at the cap
        session = start_session(
            family_of(line_space(30)), 0, "net_then_grave", max_turns=3
        )
        for r in (1, 1, 1):
            if session.status == IN_PROGRESS:
                challenge(session, 1)
        assert session.status == DEFENDER_STUCK
        assert "max_turns" in session.stuck_reason

    def test_geometric_script_cannot_outrun_growing_scales(self):
        # bound 0 needs singleton parts, which need gaps above the scale;
        # a geometrically growing challenge makes that unreachable, so the
        # session must end stuck (at the cap or earlier)
        session = start_session(
            family_of(line_space(64)), 0, "net_then_grave", max_turns=6
        )
        r = 1
        while session.status == IN_PROGRESS:
            challenge(session, r)
            if session.turns:
                assert session.turns[-1].mesh > 0
            r *= 2
        assert session.status == DEFENDER_STUCK

    def test_determinism(self):
        def run():
            session = start_session(
                family_of(line_space(60)), 4, "net_then_grave", session_id="d"
            )
            for r in (2, 2, 2, 2):
                if session.status == IN_PROGRESS:
                    challenge(session, r)
            return session_to_json(session)

        assert run() == run()


class TestReplay:
    def test_one_turn_composition_is_identity(self):
        session = start_session(family_of(line_space(40)), 5, "net_then_grave")
        challenge(session, 2)
        assert session.status == DEFENDER_WON
        report = replay_transcript(session)
        assert report.ok
        assert report.composed_levels == session.turns[0].certificate.n + 1

    def test_replay_requires_finished_session(self):
        session = start_session(family_of(line_space(40)), 1, "net_then_grave")
        with pytest.raises(SessionFinished):
            replay_transcript(session)

    def test_multi_turn_replay_multiplies_levels(self):
        session = start_session(
            family_of(line_space(101)), 2, "net_then_grave", max_turns=16
        )
        while session.status == IN_PROGRESS:
            challenge(session, 2)
        assert session.status == DEFENDER_WON
        assert len(session.turns) >= 2
        report = replay_transcript(session)
        assert report.ok
        expected = 1
        for turn in session.turns:
            expected *= turn.certificate.n + 1
        assert report.composed_levels == expected
        assert report.composed_scale == min(t.scale for t in session.turns)
        assert mesh(report.composed.target) <= 2

    def test_won_session_zero_turns_replays_trivially(self):
        session = start_session(singleton_family(), 0, "net_then_grave")
        report = replay_transcript(session)
        assert report.ok
        assert report.composed is None


class TestTranscriptRoundTrip:
    def test_json_round_trip(self):
        session = start_session(
            family_of(line_space(50)), 4, "net_then_grave", session_id="rt"
        )
        while session.status == IN_PROGRESS:
            challenge(session, 2)
        payload = session_to_json(session)
        loaded = session_from_json(payload)
        assert session_to_json(loaded) == payload
        for turn in loaded.turns:
            assert verify_certificate(turn.certificate).ok
