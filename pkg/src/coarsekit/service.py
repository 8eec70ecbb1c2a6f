"""HTTP facade over the game engine.

Endpoints: POST /sessions, GET /sessions/{id}, POST /sessions/{id}/challenge,
GET /fixtures, DELETE /sessions/{id}.  JSON bodies only; every error body
is {"code": ..., "message": ...}.  Session ids are monotonic integers and
the store is in-memory; this is a local research tool with no auth.
Challenges to one session are serialized behind a per-session lock.
"""

from __future__ import annotations

import argparse
import itertools
import json
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from coarsekit import jsonio, numeric
from coarsekit.decompose import STRATEGIES
from coarsekit.errors import CoarsekitError, InputError, SessionFinished
from coarsekit.fixtures import describe_fixtures, fixture_family
from coarsekit.game import DEFAULT_MAX_TURNS, GameSession, challenge, start_session
from coarsekit.spaces import MetricFamily


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


class SessionStore:
    def __init__(self):
        self._sessions: dict[int, GameSession] = {}
        self._locks: dict[int, threading.Lock] = {}
        self._meta: dict[int, dict] = {}
        self._create_lock = threading.Lock()
        self._ids = itertools.count(1)

    def create(self, family, bound, strategy, max_turns) -> int:
        with self._create_lock:
            session_id = next(self._ids)
            session = start_session(
                family, bound, strategy, max_turns, session_id=str(session_id)
            )
            self._sessions[session_id] = session
            self._locks[session_id] = threading.Lock()
            self._meta[session_id] = {"created_seq": session_id}
        return session_id

    def get(self, session_id: int) -> GameSession:
        if session_id not in self._sessions:
            raise ApiError(404, f"unknown session {session_id}")
        return self._sessions[session_id]

    def lock(self, session_id: int) -> threading.Lock:
        if session_id not in self._locks:
            raise ApiError(404, f"unknown session {session_id}")
        return self._locks[session_id]

    def delete(self, session_id: int) -> None:
        if session_id not in self._sessions:
            raise ApiError(404, f"unknown session {session_id}")
        with self._create_lock:
            del self._sessions[session_id]
            del self._locks[session_id]
            del self._meta[session_id]


def _load_extra_fixtures(fixture_dir: str | None) -> dict[str, MetricFamily]:
    extras: dict[str, MetricFamily] = {}
    if not fixture_dir:
        return extras
    for path in sorted(Path(fixture_dir).glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        if "family_id" in data:
            family = jsonio.family_from_json(data)
            extras[family.family_id] = family
        elif "type" in data:
            space = jsonio.space_from_json(data)
            extras[space.space_id] = MetricFamily.of_space(space)
    return extras


def _session_payload(session: GameSession, session_id: int) -> dict:
    payload = jsonio.session_to_json(session)
    payload["id"] = session_id
    return payload


def _canonical_response(payload: dict, status: int = 200) -> Response:
    # responses carry the same canonical bytes the CLI writes, so a saved
    # response body is already a valid, diffable artifact
    return Response(
        content=jsonio.canonical_dumps(payload),
        status_code=status,
        media_type="application/json",
    )


def create_app(
    fixture_dir: str | None = None,
    ui_dir: str | None = None,
    snapshot_path: str | None = None,
) -> FastAPI:
    app = FastAPI(title="coarsekit game service")
    store = SessionStore()
    extra_fixtures = _load_extra_fixtures(fixture_dir)

    if snapshot_path:

        @app.on_event("shutdown")
        def _snapshot():
            payload = {
                str(sid): _session_payload(session, sid)
                for sid, session in store._sessions.items()
            }
            Path(snapshot_path).write_text(
                jsonio.canonical_dumps(payload), encoding="utf-8"
            )

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.status, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422, content={"code": 422, "message": str(exc)})

    def _resolve_family(body: dict) -> MetricFamily:
        if "fixture" in body:
            name = body["fixture"]
            if name in extra_fixtures:
                return extra_fixtures[name]
            try:
                return fixture_family(name)
            except InputError:
                raise ApiError(422, f"unknown fixture {name!r}")
        if "family" in body:
            try:
                return jsonio.family_from_json(body["family"])
            except (InputError, KeyError, TypeError) as exc:
                raise ApiError(422, f"bad family: {exc}")
        raise ApiError(422, "body needs a fixture name or an inline family")

    @app.get("/fixtures")
    async def list_fixtures():
        bundled = describe_fixtures()
        for name, family in sorted(extra_fixtures.items()):
            bundled.append(
                {
                    "name": name,
                    "kind": "family",
                    "members": len(family.members),
                    "description": "loaded from fixture directory",
                }
            )
        return _canonical_response({"fixtures": bundled})

    @app.post("/sessions")
    async def create_session(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise ApiError(422, "body must be JSON")
        if not isinstance(body, dict):
            raise ApiError(422, "body must be a JSON object")
        family = _resolve_family(body)
        bound = body.get("bound")
        if not isinstance(bound, (int, float)) or isinstance(bound, bool) or bound < 0:
            raise ApiError(422, "bound must be a nonnegative number")
        strategy = body.get("strategy", "net_then_grave")
        if strategy not in STRATEGIES:
            raise ApiError(422, f"unknown strategy {strategy!r}")
        max_turns = body.get("max_turns", DEFAULT_MAX_TURNS)
        if not isinstance(max_turns, int) or max_turns < 1:
            raise ApiError(422, "max_turns must be a positive integer")
        session_id = store.create(family, bound, strategy, max_turns)
        return _canonical_response(_session_payload(store.get(session_id), session_id))

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: int):
        return _canonical_response(_session_payload(store.get(session_id), session_id))

    @app.post("/sessions/{session_id}/challenge")
    async def post_challenge(session_id: int, request: Request):
        session = store.get(session_id)
        try:
            body = await request.json()
        except json.JSONDecodeError:
            raise ApiError(422, "body must be JSON")
        r = body.get("r") if isinstance(body, dict) else None
        if not isinstance(r, (int, float)) or isinstance(r, bool) or not numeric.gt(r, 0):
            raise ApiError(422, "r must be a positive number")
        with store.lock(session_id):
            try:
                challenge(session, r)
            except SessionFinished:
                raise ApiError(409, f"session is {session.status}")
            except CoarsekitError as exc:
                raise ApiError(422, str(exc))
        return _canonical_response(_session_payload(session, session_id))

    @app.delete("/sessions/{session_id}")
    async def delete_session(session_id: int):
        store.delete(session_id)
        return Response(status_code=204)

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="coarsekit-serve", description=__doc__)
    parser.add_argument("--port", type=int, default=8008)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--fixture-dir", help="directory of extra space/family JSON")
    parser.add_argument("--ui-dir", help="serve a static UI bundle from this directory")
    parser.add_argument("--snapshot", help="write all sessions here on shutdown")
    args = parser.parse_args(argv)

    import uvicorn

    uvicorn.run(
        create_app(args.fixture_dir, args.ui_dir, args.snapshot),
        host=args.host,
        port=args.port,
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
