"""Canonical JSON serialization for every artifact the toolkit reads or
writes: spaces, families, covers, certificates, doubling certificates,
feature maps, and game transcripts.

Canonical form: sorted keys, two-space indent, trailing newline, floats
in shortest round-trip form.  Reloading a written artifact and writing it
again yields identical bytes.  Unbounded quantities (a Lebesgue number
when an element is the whole domain) serialize as the string
"unbounded".
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from coarsekit.covers import Cover
from coarsekit.decompose import DecompositionCertificate
from coarsekit.doubling import DoublingCertificate
from coarsekit.embed import FeatureMap
from coarsekit.errors import InputError
from coarsekit.game import GameSession, GameTurn
from coarsekit.spaces import FiniteMetricSpace, MetricFamily, build_space, mesh


def encode_value(x):
    """Numbers for JSON: ints stay ints, Fractions become floats, and
    infinities become the string "unbounded"."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "unbounded"
        return int(x) if x.is_integer() and abs(x) < 2**53 else x
    return x


def canonical_dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def space_to_json(space: FiniteMetricSpace) -> dict:
    if space.source is not None:
        src = dict(space.source)
        src["space_id"] = space.space_id
        if space.label is not None:
            src["label"] = space.label
        return src
    return {
        "type": "matrix",
        "space_id": space.space_id,
        "dist": [[encode_value(v) for v in row] for row in space.dist_matrix],
    }


def space_from_json(data: dict) -> FiniteMetricSpace:
    return build_space(data)


def family_to_json(family: MetricFamily) -> dict:
    spaces: dict[str, dict] = {}
    members = []
    for space, pts in family.members:
        spaces.setdefault(space.space_id, space_to_json(space))
        members.append({"space": space.space_id, "points": list(pts)})
    out = {
        "family_id": family.family_id,
        "spaces": [spaces[k] for k in sorted(spaces)],
        "members": members,
    }
    if family.index_labels:
        out["labels"] = list(family.index_labels)
    return out


def family_from_json(data: dict) -> MetricFamily:
    spaces = {}
    for src in data.get("spaces", []):
        space = build_space(src)
        spaces[space.space_id] = space
    members = []
    for m in data["members"]:
        sid = m["space"]
        if sid not in spaces:
            raise InputError(f"member references unknown space {sid!r}")
        members.append((spaces[sid], tuple(m["points"])))
    return MetricFamily(
        data["family_id"], tuple(members), tuple(data.get("labels", ()))
    )


def cover_to_json(cover: Cover) -> dict:
    out = {
        "space": cover.space.space_id,
        "elements": [list(el) for el in cover.elements],
        "domain": list(cover.domain),
    }
    if cover.element_ids:
        out["element_ids"] = list(cover.element_ids)
    return out


def cover_from_json(data: dict, space: FiniteMetricSpace) -> Cover:
    if data.get("space", space.space_id) != space.space_id:
        raise InputError(
            f"cover references space {data['space']!r}, got {space.space_id!r}"
        )
    return Cover.build(
        space,
        data["elements"],
        domain=data.get("domain"),
        element_ids=data.get("element_ids", ()),
    )


def certificate_to_json(cert: DecompositionCertificate) -> dict:
    members = []
    for m_idx, levels in enumerate(cert.member_levels):
        space = cert.source.members[m_idx][0]
        members.append(
            {
                "space": space.space_id,
                "levels": [[list(part) for part in level] for level in levels],
            }
        )
    return {
        "r": encode_value(cert.r),
        "n": cert.n,
        "source": family_to_json(cert.source),
        "members": members,
        "target": cert.target.family_id,
    }


def certificate_from_json(data: dict) -> DecompositionCertificate:
    source = family_from_json(data["source"])
    member_levels = [m["levels"] for m in data["members"]]
    for m, (space, _pts) in zip(data["members"], source.members):
        if m["space"] != space.space_id:
            raise InputError("certificate member order does not match its source family")
    return DecompositionCertificate.build(
        source, data["r"], data["n"], member_levels, target_id=data["target"]
    )


def doubling_to_json(cert: DoublingCertificate) -> dict:
    witnesses = [
        {
            "center": center,
            "scale": encode_value(scale),
            "balls": list(balls),
        }
        for (center, scale), balls in sorted(cert.witnesses.items())
    ]
    return {
        "space": space_to_json(cert.space),
        "subset": list(cert.subset),
        "R": encode_value(cert.base_scale),
        "scales": [encode_value(s) for s in cert.scales],
        "mode": cert.mode,
        "N": cert.doubling_constant,
        "witnesses": witnesses,
    }


def doubling_from_json(data: dict) -> DoublingCertificate:
    space = build_space(data["space"])
    witnesses = {
        (w["center"], w["scale"]): tuple(w["balls"]) for w in data["witnesses"]
    }
    return DoublingCertificate(
        space,
        tuple(data["subset"]),
        data["R"],
        tuple(data["scales"]),
        witnesses,
        data.get("mode", "ambient"),
    )


def feature_map_to_json(fmap: FeatureMap) -> dict:
    return {
        "space": fmap.space.space_id,
        "dim": fmap.dim,
        "vectors": {str(p): list(v) for p, v in sorted(fmap.vectors.items())},
    }


def feature_map_from_json(data: dict, space: FiniteMetricSpace) -> FeatureMap:
    vectors = {int(p): tuple(v) for p, v in data["vectors"].items()}
    return FeatureMap(space, tuple(sorted(vectors)), vectors)


def session_to_json(session: GameSession) -> dict:
    turns = []
    for idx, turn in enumerate(session.turns):
        cert = turn.certificate
        turns.append(
            {
                "turn": idx + 1,
                "r": encode_value(turn.scale),
                "n": cert.n,
                "part_count": cert.part_count(),
                "mesh": encode_value(turn.mesh),
                "certificate": certificate_to_json(cert),
            }
        )
    return {
        "session_id": session.session_id,
        "bound": encode_value(session.bound),
        "strategy": session.strategy,
        "max_turns": session.max_turns,
        "status": session.status,
        "stuck_reason": session.stuck_reason,
        "initial_family": family_to_json(session.initial_family),
        "initial_mesh": encode_value(mesh(session.initial_family)),
        "turns": turns,
    }


def session_from_json(data: dict) -> GameSession:
    family = family_from_json(data["initial_family"])
    session = GameSession(
        session_id=data["session_id"],
        initial_family=family,
        bound=data["bound"],
        strategy=data["strategy"],
        max_turns=data["max_turns"],
        status=data["status"],
        stuck_reason=data.get("stuck_reason"),
    )
    for t in data["turns"]:
        cert = certificate_from_json(t["certificate"])
        session.turns.append(GameTurn(t["r"], cert, cert.target, t["mesh"]))
    return session
