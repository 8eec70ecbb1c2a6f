from __future__ import annotations

import threading

import pytest
from fastapi.testclient import TestClient

from coarsekit.decompose import verify_certificate
from coarsekit.jsonio import canonical_dumps, certificate_from_json, session_from_json
from coarsekit.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


class TestSessions:
    def test_singleton_fixture_wins_at_start(self, client):
        response = client.post(
            "/sessions", json={"fixture": "singleton", "bound": 0, "strategy": "net_then_grave"}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "defender_won"
        assert body["turns"] == []

    def test_challenge_appends_verified_turn(self, client):
        created = client.post(
            "/sessions", json={"fixture": "line100", "bound": 5}
        ).json()
        response = client.post(f"/sessions/{created['id']}/challenge", json={"r": 2})
        assert response.status_code == 200
        body = response.json()
        assert len(body["turns"]) == 1
        cert = certificate_from_json(body["turns"][0]["certificate"])
        assert verify_certificate(cert).ok

    def test_get_returns_same_payload_as_challenge(self, client):
        created = client.post("/sessions", json={"fixture": "line64", "bound": 5}).json()
        after = client.post(f"/sessions/{created['id']}/challenge", json={"r": 2}).json()
        fetched = client.get(f"/sessions/{created['id']}").json()
        assert fetched == after

    def test_challenge_on_finished_session_conflicts(self, client):
        created = client.post(
            "/sessions", json={"fixture": "singleton", "bound": 0}
        ).json()
        response = client.post(f"/sessions/{created['id']}/challenge", json={"r": 2})
        assert response.status_code == 409
        assert response.json()["code"] == 409

    def test_invalid_scale_rejected(self, client):
        created = client.post("/sessions", json={"fixture": "line64", "bound": 5}).json()
        for bad in (0, -3, "two", None):
            response = client.post(
                f"/sessions/{created['id']}/challenge", json={"r": bad}
            )
            assert response.status_code == 422

    def test_unknown_session_is_404(self, client):
        assert client.get("/sessions/31337").status_code == 404
        assert client.post("/sessions/31337/challenge", json={"r": 1}).status_code == 404
        assert client.delete("/sessions/31337").status_code == 404

    def test_unknown_fixture_rejected(self, client):
        response = client.post("/sessions", json={"fixture": "nope", "bound": 1})
        assert response.status_code == 422

    def test_bad_bound_rejected(self, client):
        response = client.post("/sessions", json={"fixture": "line64", "bound": -1})
        assert response.status_code == 422

    def test_inline_family_accepted(self, client):
        family = {
            "family_id": "inline",
            "spaces": [
                {
                    "type": "points",
                    "space_id": "mini",
                    "coords": [[0], [4], [9]],
                    "p": 1,
                }
            ],
            "members": [{"space": "mini", "points": [0, 1, 2]}],
        }
        response = client.post(
            "/sessions", json={"family": family, "bound": 0, "strategy": "singletons"}
        )
        assert response.status_code == 200
        body = response.json()
        challenge = client.post(f"/sessions/{body['id']}/challenge", json={"r": 2})
        assert challenge.json()["status"] == "defender_won"

    def test_delete_removes_session(self, client):
        created = client.post("/sessions", json={"fixture": "line64", "bound": 5}).json()
        assert client.delete(f"/sessions/{created['id']}").status_code == 204
        assert client.get(f"/sessions/{created['id']}").status_code == 404

    def test_ids_are_monotonic_integers(self, client):
        first = client.post("/sessions", json={"fixture": "line64", "bound": 5}).json()
        second = client.post("/sessions", json={"fixture": "line64", "bound": 5}).json()
        assert second["id"] == first["id"] + 1


class TestTranscripts:
    def test_served_transcript_is_reloadable_and_verifiable(self, client):
        created = client.post("/sessions", json={"fixture": "line100", "bound": 5}).json()
        client.post(f"/sessions/{created['id']}/challenge", json={"r": 2})
        payload = client.get(f"/sessions/{created['id']}").json()
        payload.pop("id")
        session = session_from_json(payload)
        for turn in session.turns:
            assert verify_certificate(turn.certificate).ok

    def test_responses_are_canonical_bytes(self, client):
        created = client.post("/sessions", json={"fixture": "line64", "bound": 5}).json()
        client.post(f"/sessions/{created['id']}/challenge", json={"r": 2})
        response = client.get(f"/sessions/{created['id']}")
        assert response.content == canonical_dumps(response.json()).encode()

    def test_fixture_listing_contains_bundled_spaces(self, client):
        names = [f["name"] for f in client.get("/fixtures").json()["fixtures"]]
        assert "line100" in names
        assert "singleton" in names

    def test_extra_fixture_dir(self, tmp_path):
        (tmp_path / "custom.json").write_text(
            canonical_dumps(
                {
                    "type": "points",
                    "space_id": "custom5",
                    "coords": [[2 * i] for i in range(5)],
                    "p": 1,
                }
            )
        )
        client = TestClient(create_app(fixture_dir=str(tmp_path)))
        names = [f["name"] for f in client.get("/fixtures").json()["fixtures"]]
        assert "custom5" in names
        response = client.post("/sessions", json={"fixture": "custom5", "bound": 1})
        assert response.status_code == 200


class TestConcurrency:
    def test_parallel_session_creation_yields_distinct_ids(self, client):
        ids = []
        lock = threading.Lock()

        def create():
            body = client.post(
                "/sessions", json={"fixture": "line64", "bound": 5}
            ).json()
            with lock:
                ids.append(body["id"])

        threads = [threading.Thread(target=create) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(ids)) == 8
