"""The decomposition game: a challenger declares scales, a defender
strategy answers with certificates, and the defender wins once the
current family's mesh drops to the declared bound.

A session is a state machine mutated only through ``challenge``; every
appended certificate is verified before it enters the transcript, so a
finished transcript replays into one composed certificate whose scale is
the minimum challenge and whose level count is the product of the
per-turn level counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from coarsekit import numeric
from coarsekit.decompose import (
    DecompositionCertificate,
    compose_certificates,
    defend,
    verify_certificate,
)
from coarsekit.errors import (
    ConsistencyError,
    InputError,
    SessionFinished,
    StrategyFailed,
)
from coarsekit.spaces import MetricFamily, mesh

IN_PROGRESS = "in_progress"
DEFENDER_WON = "defender_won"
DEFENDER_STUCK = "defender_stuck"

DEFAULT_MAX_TURNS = 32


@dataclass
class GameTurn:
    scale: float
    certificate: DecompositionCertificate
    family: MetricFamily
    mesh: float


@dataclass
class GameSession:
    session_id: str
    initial_family: MetricFamily
    bound: float
    strategy: str
    max_turns: int = DEFAULT_MAX_TURNS
    turns: list[GameTurn] = field(default_factory=list)
    status: str = IN_PROGRESS
    stuck_reason: str | None = None

    @property
    def current_family(self) -> MetricFamily:
        return self.turns[-1].family if self.turns else self.initial_family

    @property
    def current_mesh(self):
        return self.turns[-1].mesh if self.turns else mesh(self.initial_family)


def start_session(
    family: MetricFamily,
    bound,
    strategy: str,
    max_turns: int = DEFAULT_MAX_TURNS,
    session_id: str = "session",
) -> GameSession:
    if bound < 0:
        raise InputError("bound must be nonnegative")
    if max_turns < 1:
        raise InputError("max_turns must be positive")
    session = GameSession(session_id, family, bound, strategy, max_turns)
    if numeric.le(mesh(family), bound):
        session.status = DEFENDER_WON
    return session


def challenge(session: GameSession, r) -> GameSession:
    """Run one turn: the defender answers the scale r on the current
    family.  On strategy failure the session ends stuck; on success the
    verified certificate and its target family are appended and the
    status updates."""
    if session.status != IN_PROGRESS:
        raise SessionFinished(f"session is {session.status}")
    if not numeric.gt(r, 0):
        raise InputError("challenge scale must be positive")
    family = session.current_family
    try:
        cert = defend(family, r, session.strategy)
    except StrategyFailed as exc:
        session.status = DEFENDER_STUCK
        session.stuck_reason = exc.reason
        return session
    report = verify_certificate(cert)
    if not report.ok:
        raise ConsistencyError(
            f"strategy produced an invalid certificate: {report.first_violation}"
        )
    new_family = cert.target
    turn = GameTurn(r, cert, new_family, mesh(new_family))
    session.turns.append(turn)
    if numeric.le(turn.mesh, session.bound):
        session.status = DEFENDER_WON
    elif len(session.turns) >= session.max_turns:
        session.status = DEFENDER_STUCK
        session.stuck_reason = f"max_turns {session.max_turns} reached"
    return session


@dataclass
class ReplayReport:
    ok: bool
    composed: DecompositionCertificate | None
    composed_scale: float | None
    composed_levels: int | None
    expected_scale: float | None
    expected_levels: int | None
    final_mesh: float | None

    def summary(self) -> dict:
        return {
            "ok": self.ok,
            "composed_scale": self.composed_scale,
            "composed_levels": self.composed_levels,
            "expected_scale": self.expected_scale,
            "expected_levels": self.expected_levels,
            "final_mesh": self.final_mesh,
        }


def replay_transcript(session: GameSession) -> ReplayReport:
    """Compose all turn certificates of a finished session and check the
    combined scale and level count against the turn-by-turn record."""
    if session.status == IN_PROGRESS:
        raise SessionFinished("session still in progress")
    if not session.turns:
        return ReplayReport(True, None, None, None, None, None, session.current_mesh)
    composed = session.turns[0].certificate
    for turn in session.turns[1:]:
        composed = compose_certificates(composed, turn.certificate)
    report = verify_certificate(composed)
    expected_scale = min(t.certificate.r for t in session.turns)
    expected_levels = 1
    for t in session.turns:
        expected_levels *= t.certificate.n + 1
    ok = (
        report.ok
        and composed.r == expected_scale
        and composed.n + 1 == expected_levels
    )
    return ReplayReport(
        ok=ok,
        composed=composed,
        composed_scale=composed.r,
        composed_levels=composed.n + 1,
        expected_scale=expected_scale,
        expected_levels=expected_levels,
        final_mesh=session.turns[-1].mesh,
    )
