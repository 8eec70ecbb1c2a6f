"""Batch front door.

Subcommands: build, decompose, verify, compose, oracle, cover-stats,
nerve, lipschitz, doubling, glue, game, fixtures.  Exit code 0 on
success, 1 on verification failure, 2 on usage errors.  Diagnostics go
to stderr as JSON {code, message}; artifacts are canonical JSON and are
never overwritten without --force.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from coarsekit import jsonio, numeric
from coarsekit.covers import d_multiplicity, lebesgue_number, multiplicity
from coarsekit.decompose import (
    STRATEGIES,
    compose_certificates,
    defend,
    exhaustive_decompose,
    verify_certificate,
)
from coarsekit.doubling import certify_doubling, dyadic_grid, verify_doubling_certificate
from coarsekit.embed import glue_certificate_embeddings
from coarsekit.errors import CoarsekitError, InputError
from coarsekit.fixtures import (
    describe_fixtures,
    fixture_family,
    fixture_space,
    random_metric_space,
)
from coarsekit.game import challenge, replay_transcript, start_session
from coarsekit.nerve import map_lipschitz_constant, nerve_of_cover, partition_of_unity_map
from coarsekit.spaces import MetricFamily, mesh


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"code": "usage", "message": message}), file=sys.stderr)
        raise SystemExit(2)


def _fail(code: str, message: str, status: int) -> int:
    print(json.dumps({"code": code, "message": message}), file=sys.stderr)
    return status


def _parse_number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _parse_number_list(text: str) -> list:
    return [_parse_number(part) for part in text.split(",") if part.strip()]


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})")


def _write_artifact(path: str, data, force: bool) -> None:
    target = Path(path)
    if target.exists() and not force:
        raise InputError(f"{path} exists; pass --force to overwrite")
    target.write_text(jsonio.canonical_dumps(data), encoding="utf-8")


def _emit(data) -> None:
    sys.stdout.write(jsonio.canonical_dumps(data))


def _load_family(args) -> MetricFamily:
    given = [
        name
        for name in ("fixture", "family", "space")
        if getattr(args, name, None)
    ]
    if len(given) != 1:
        raise InputError("give exactly one of --fixture, --family, --space")
    if args.fixture:
        return fixture_family(args.fixture)
    if args.family:
        return jsonio.family_from_json(_read_json(args.family))
    space = jsonio.space_from_json(_read_json(args.space))
    return MetricFamily.of_space(space)


def _load_space(args):
    if getattr(args, "fixture", None):
        return fixture_space(args.fixture)
    if getattr(args, "space", None):
        return jsonio.space_from_json(_read_json(args.space))
    raise InputError("give --fixture or --space")


def _add_space_inputs(parser, family=False):
    parser.add_argument("--fixture", help="bundled fixture name")
    parser.add_argument("--space", help="space JSON file")
    if family:
        parser.add_argument("--family", help="family JSON file")


def build_parser() -> _Parser:
    parser = _Parser(prog="coarsekit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="validate a space source and write canonical JSON")
    p.add_argument("--source", required=True, help="space source JSON file")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("fixtures", help="list bundled fixtures or export one")
    p.add_argument("--name")
    p.add_argument("--random-points", type=int, help="generate a random metric space")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("decompose", help="run a defender strategy at a scale")
    _add_space_inputs(p, family=True)
    p.add_argument("--r", required=True)
    p.add_argument("--strategy", default="net_then_grave", choices=STRATEGIES)
    p.add_argument("--n", type=int)
    p.add_argument("--diam")
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("verify", help="verify a decomposition certificate")
    p.add_argument("--cert", required=True)

    p = sub.add_parser("compose", help="chain two certificates")
    p.add_argument("--outer", required=True)
    p.add_argument("--inner", required=True)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("oracle", help="brute-force decomposability at a scale")
    _add_space_inputs(p)
    p.add_argument("--r", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--diam", required=True)
    p.add_argument("--witness", help="write the witness certificate here")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("cover-stats", help="multiplicity, Lebesgue number, mesh")
    _add_space_inputs(p)
    p.add_argument("--cover", required=True)
    p.add_argument("--d", help="also report d-multiplicity at this d")

    p = sub.add_parser("nerve", help="nerve complex of a cover")
    _add_space_inputs(p)
    p.add_argument("--cover", required=True)
    p.add_argument("--out")
    p.add_argument("--dot", help="write a dot-format graph of the 1-skeleton")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("lipschitz", help="partition-of-unity map and its constant")
    _add_space_inputs(p)
    p.add_argument("--cover", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("doubling", help="greedy doubling certificate")
    _add_space_inputs(p)
    p.add_argument("--R", required=True)
    p.add_argument("--grid", default="dyadic", help='"dyadic" or comma list of scales')
    p.add_argument("--subset", help="comma list of point ids")
    p.add_argument("--mode", default="ambient", choices=("ambient", "intrinsic"))
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("glue", help="glue per-part feature maps along a certificate")
    p.add_argument("--cert", required=True)
    p.add_argument("--weights", required=True, help='JSON {"weights": [{point: w}]}')
    p.add_argument("--parts", required=True, help='JSON {"maps": [feature map]}')
    p.add_argument("--R", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--enlarge", default="0", help="grow certificate parts first")
    p.add_argument("--grid", default="", help="comma list of decay separations")
    p.add_argument("--member", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("game", help="run a scripted challenger session")
    _add_space_inputs(p, family=True)
    p.add_argument("--bound", required=True)
    p.add_argument("--strategy", default="net_then_grave", choices=STRATEGIES)
    p.add_argument("--script", required=True, help='comma list of scales, e.g. "2,4,8"')
    p.add_argument("--max-turns", type=int, default=32)
    p.add_argument("--out")
    p.add_argument("--force", action="store_true")

    return parser


def _cmd_build(args) -> int:
    space = jsonio.space_from_json(_read_json(args.source))
    _write_artifact(args.out, jsonio.space_to_json(space), args.force)
    return 0


def _cmd_fixtures(args) -> int:
    if args.random_points:
        space = random_metric_space(args.random_points, args.seed)
        payload = jsonio.space_to_json(space)
        if args.out:
            _write_artifact(args.out, payload, args.force)
        else:
            _emit(payload)
        return 0
    if args.name:
        names = {f["name"]: f for f in describe_fixtures()}
        if args.name not in names:
            raise InputError(f"unknown fixture {args.name!r}")
        if names[args.name]["kind"] == "family":
            payload = jsonio.family_to_json(fixture_family(args.name))
        else:
            payload = jsonio.space_to_json(fixture_space(args.name))
        if args.out:
            _write_artifact(args.out, payload, args.force)
        else:
            _emit(payload)
        return 0
    _emit({"fixtures": describe_fixtures()})
    return 0


def _cmd_decompose(args) -> int:
    family = _load_family(args)
    r = _parse_number(args.r)
    diam = _parse_number(args.diam) if args.diam else None
    cert = defend(family, r, args.strategy, n=args.n, diameter_bound=diam)
    report = verify_certificate(cert)
    payload = jsonio.certificate_to_json(cert)
    if args.out:
        _write_artifact(args.out, payload, args.force)
    else:
        _emit(payload)
    if not report.ok:
        return _fail("verification", str(report.first_violation), 1)
    return 0


def _cmd_verify(args) -> int:
    cert = jsonio.certificate_from_json(_read_json(args.cert))
    report = verify_certificate(cert)
    _emit(report.summary())
    return 0 if report.ok else 1


def _cmd_compose(args) -> int:
    outer = jsonio.certificate_from_json(_read_json(args.outer))
    inner = jsonio.certificate_from_json(_read_json(args.inner))
    cert = compose_certificates(outer, inner)
    report = verify_certificate(cert)
    payload = jsonio.certificate_to_json(cert)
    if args.out:
        _write_artifact(args.out, payload, args.force)
    else:
        _emit(payload)
    return 0 if report.ok else _fail("verification", str(report.first_violation), 1)


def _cmd_oracle(args) -> int:
    space = _load_space(args)
    verdict = exhaustive_decompose(
        space, _parse_number(args.r), args.n, _parse_number(args.diam)
    )
    _emit(
        {
            "decomposable": verdict.decomposable,
            "min_worst_diameter": jsonio.encode_value(verdict.min_worst_diameter),
        }
    )
    if args.witness and verdict.witness is not None:
        _write_artifact(
            args.witness, jsonio.certificate_to_json(verdict.witness), args.force
        )
    return 0


def _cmd_cover_stats(args) -> int:
    space = _load_space(args)
    cover = jsonio.cover_from_json(_read_json(args.cover), space)
    stats = {
        "multiplicity": multiplicity(cover),
        "lebesgue": jsonio.encode_value(lebesgue_number(cover)),
        "mesh": jsonio.encode_value(
            max(space.diameter(el) for el in cover.elements)
        ),
        "elements": len(cover.elements),
    }
    if args.d:
        stats["d"] = jsonio.encode_value(_parse_number(args.d))
        stats["d_multiplicity"] = d_multiplicity(cover, _parse_number(args.d))
    _emit(stats)
    return 0


def _cmd_nerve(args) -> int:
    space = _load_space(args)
    cover = jsonio.cover_from_json(_read_json(args.cover), space)
    complex_ref = nerve_of_cover(cover)
    payload = {
        "vertices": list(complex_ref.vertices),
        "facets": [sorted(f) for f in complex_ref.facets],
        "dim": complex_ref.dim,
    }
    if args.out:
        _write_artifact(args.out, payload, args.force)
    else:
        _emit(payload)
    if args.dot:
        lines = ["graph nerve {"]
        for v in complex_ref.vertices:
            lines.append(f"  v{v};")
        seen = set()
        for facet in complex_ref.facets:
            verts = sorted(facet)
            for i, a in enumerate(verts):
                for b in verts[i + 1 :]:
                    if (a, b) not in seen:
                        seen.add((a, b))
                        lines.append(f"  v{a} -- v{b};")
        lines.append("}")
        dot_path = Path(args.dot)
        if dot_path.exists() and not args.force:
            raise InputError(f"{args.dot} exists; pass --force to overwrite")
        dot_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _cmd_lipschitz(args) -> int:
    space = _load_space(args)
    cover = jsonio.cover_from_json(_read_json(args.cover), space)
    epsilon = _parse_number(args.epsilon)
    cmap = partition_of_unity_map(cover, epsilon, args.n)
    measured = map_lipschitz_constant(cmap)
    ok = numeric.le(measured, epsilon)
    _emit(
        {
            "epsilon": jsonio.encode_value(epsilon),
            "required_lebesgue": jsonio.encode_value(
                (2 * args.n + 2) * (2 * args.n + 3) / epsilon
            ),
            "measured_lebesgue": jsonio.encode_value(lebesgue_number(cover)),
            "multiplicity": multiplicity(cover),
            "lipschitz": float(measured),
            "ok": ok,
        }
    )
    if args.out:
        payload = {
            "space": space.space_id,
            "complex": {
                "vertices": list(cmap.complex_ref.vertices),
                "facets": [sorted(f) for f in cmap.complex_ref.facets],
            },
            "values": {
                str(p): {str(v): float(c) for v, c in cp.coords}
                for p, cp in sorted(cmap.values.items())
            },
        }
        _write_artifact(args.out, payload, args.force)
    return 0 if ok else 1


def _cmd_doubling(args) -> int:
    space = _load_space(args)
    subset = (
        tuple(int(p) for p in args.subset.split(",")) if args.subset else None
    )
    base = _parse_number(args.R)
    if args.grid == "dyadic":
        pts = subset if subset is not None else tuple(space.points)
        grid = dyadic_grid(base, max(space.diameter(pts), base))
    else:
        grid = tuple(_parse_number_list(args.grid))
    cert = certify_doubling(space, subset, base, grid, mode=args.mode)
    if not verify_doubling_certificate(cert):
        return _fail("verification", "doubling certificate failed coverage check", 1)
    payload = jsonio.doubling_to_json(cert)
    if args.out:
        _write_artifact(args.out, payload, args.force)
    else:
        _emit(payload)
    return 0


def _cmd_glue(args) -> int:
    cert = jsonio.certificate_from_json(_read_json(args.cert))
    space = cert.source.members[args.member][0]
    weights_data = _read_json(args.weights)["weights"]
    weights = [
        {int(p): w for p, w in entry.items()} for entry in weights_data
    ]
    maps_data = _read_json(args.parts)["maps"]
    part_maps = [jsonio.feature_map_from_json(m, space) for m in maps_data]
    result = glue_certificate_embeddings(
        cert,
        weights,
        part_maps,
        _parse_number(args.R),
        _parse_number(args.epsilon),
        decay_grid=_parse_number_list(args.grid),
        member_index=args.member,
        enlarge_by=_parse_number(args.enlarge),
    )
    _emit(result.summary())
    if args.out:
        _write_artifact(
            args.out, jsonio.feature_map_to_json(result.feature_map), args.force
        )
    ok = result.close_pairs_ok and result.norm_max_deviation <= numeric.TOL
    return 0 if ok else 1


def _cmd_game(args) -> int:
    family = _load_family(args)
    session = start_session(
        family,
        _parse_number(args.bound),
        args.strategy,
        max_turns=args.max_turns,
        session_id="cli",
    )
    for r in _parse_number_list(args.script):
        if session.status != "in_progress":
            break
        challenge(session, r)
    payload = jsonio.session_to_json(session)
    if session.status != "in_progress":
        replay = replay_transcript(session)
        payload["replay"] = replay.summary()
    if args.out:
        _write_artifact(args.out, payload, args.force)
    else:
        _emit(payload)
    return 0


_HANDLERS = {
    "build": _cmd_build,
    "fixtures": _cmd_fixtures,
    "decompose": _cmd_decompose,
    "verify": _cmd_verify,
    "compose": _cmd_compose,
    "oracle": _cmd_oracle,
    "cover-stats": _cmd_cover_stats,
    "nerve": _cmd_nerve,
    "lipschitz": _cmd_lipschitz,
    "doubling": _cmd_doubling,
    "glue": _cmd_glue,
    "game": _cmd_game,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _HANDLERS[args.command](args)
    except InputError as exc:
        return _fail("input", str(exc), 2)
    except CoarsekitError as exc:
        return _fail(type(exc).__name__, str(exc), 1)


if __name__ == "__main__":
    raise SystemExit(main())
