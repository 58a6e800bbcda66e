import pytest
from fastapi.testclient import TestClient

from entdetect.forest.model import ForestStrategy
from entdetect.pauli import parse_pauli
from entdetect.service import FileSessionStore, InMemorySessionStore, create_app
from entdetect.session import Session


@pytest.fixture()
def client(tiny_model2):
    return TestClient(create_app(model=tiny_model2))


def create(client, **overrides):
    body = {"n_qubits": 2, "strategy": "forest", "seed": 7}
    body.update(overrides)
    response = client.post("/v1/sessions", json=body)
    assert response.status_code == 201, response.text
    return response.json()


class TestHealth:
    def test_healthz(self, client):
        assert client.get("/healthz").json() == {"status": "ok"}
        assert client.get("/v1/healthz").status_code == 200


class TestSessionLifecycle:
    def test_create_returns_valid_recommendation(self, client):
        doc = create(client)
        assert doc["status"] == "undetermined"
        assert doc["criterion_sum"] == 0
        rec = doc["recommendation"]
        assert isinstance(rec, str) and len(rec) == 2
        parse_pauli(rec)

    def test_bell_flow_reaches_entangled(self, client):
        doc = create(client)
        sid = doc["id"]
        first = doc["recommendation"]
        r1 = client.post(
            f"/v1/sessions/{sid}/results",
            json={"observable": first, "value": 1.0},
        )
        assert r1.status_code == 200
        doc1 = r1.json()
        assert doc1["criterion_sum"] == pytest.approx(1.0)
        assert doc1["status"] == "undetermined"
        second = doc1["recommendation"]
        r2 = client.post(
            f"/v1/sessions/{sid}/results",
            json={"observable": second, "value": -1.0},
        )
        doc2 = r2.json()
        assert doc2["status"] == "entangled"
        assert doc2["criterion_sum"] == pytest.approx(2.0)
        assert doc2["recommendation"] is None
        assert [row["observable"] for row in doc2["history"]] == [first, second]
        assert doc2["history"][-1]["running_sum"] == pytest.approx(2.0)

    def test_get_roundtrip(self, client):
        sid = create(client)["id"]
        got = client.get(f"/v1/sessions/{sid}")
        assert got.status_code == 200
        assert got.json()["id"] == sid

    def test_delete(self, client):
        sid = create(client)["id"]
        assert client.delete(f"/v1/sessions/{sid}").status_code == 204
        assert client.get(f"/v1/sessions/{sid}").status_code == 404
        assert client.delete(f"/v1/sessions/{sid}").status_code == 404


class TestErrorMapping:
    def test_unknown_session_404(self, client):
        assert client.get("/v1/sessions/nope").status_code == 404

    def test_duplicate_409(self, client):
        sid = create(client, strategy="tree")["id"]
        body = {"observable": "xx", "value": 0.5}
        assert client.post(f"/v1/sessions/{sid}/results", json=body).status_code == 200
        assert client.post(f"/v1/sessions/{sid}/results", json=body).status_code == 409

    def test_malformed_observable_422(self, client):
        sid = create(client, strategy="tree")["id"]
        response = client.post(
            f"/v1/sessions/{sid}/results",
            json={"observable": "ab", "value": 0.5},
        )
        assert response.status_code == 422

    def test_out_of_range_value_422(self, client):
        sid = create(client, strategy="tree")["id"]
        response = client.post(
            f"/v1/sessions/{sid}/results",
            json={"observable": "xx", "value": 1.7},
        )
        assert response.status_code == 422

    def test_qubit_mismatch_400(self, client):
        sid = create(client, strategy="tree")["id"]
        response = client.post(
            f"/v1/sessions/{sid}/results",
            json={"observable": "xyz", "value": 0.5},
        )
        assert response.status_code == 400

    def test_forest_model_qubit_mismatch_400(self, client):
        response = client.post(
            "/v1/sessions", json={"n_qubits": 3, "strategy": "forest"}
        )
        assert response.status_code == 400

    def test_unknown_strategy_422(self, client):
        response = client.post(
            "/v1/sessions", json={"n_qubits": 2, "strategy": "oracle"}
        )
        assert response.status_code == 422

    def test_forest_unavailable_without_model_400(self):
        bare = TestClient(create_app(model=None))
        response = bare.post(
            "/v1/sessions", json={"n_qubits": 2, "strategy": "forest"}
        )
        assert response.status_code == 400

    def test_bad_qubit_count_422(self, client):
        response = client.post(
            "/v1/sessions", json={"n_qubits": 0, "strategy": "tree"}
        )
        assert response.status_code == 422


class TestNoDriftFromLibrary:
    @pytest.mark.parametrize("strategy", ["forest", "tree", "bayes"])
    def test_api_recommendation_matches_library(self, client, tiny_model2, strategy):
        doc = create(client, strategy=strategy, seed=99)
        sid = doc["id"]
        values = [0.5, -0.4, 0.3]  # sum of squares stays below one
        for value in values:
            rec = client.get(f"/v1/sessions/{sid}").json()["recommendation"]
            client.post(
                f"/v1/sessions/{sid}/results",
                json={"observable": rec, "value": value},
            )
        api_doc = client.get(f"/v1/sessions/{sid}").json()

        from entdetect.service import build_strategy

        lib_strategy = build_strategy(strategy, 2, 99, None, tiny_model2)
        session = Session(2)
        for row in api_doc["history"]:
            session.record_result(parse_pauli(row["observable"]), row["value"])
        assert lib_strategy.recommend(session).label == api_doc["recommendation"]

    def test_whatif_shadow_replay_matches(self, client):
        # a shadow session created with the same seed and replayed history
        # previews exactly what committing would recommend
        doc = create(client, strategy="bayes", seed=123)
        sid = doc["id"]
        rec0 = doc["recommendation"]
        client.post(
            f"/v1/sessions/{sid}/results",
            json={"observable": rec0, "value": 0.9},
        )
        main_doc = client.get(f"/v1/sessions/{sid}").json()

        shadow = create(client, strategy="bayes", seed=123)
        shadow_id = shadow["id"]
        client.post(
            f"/v1/sessions/{shadow_id}/results",
            json={"observable": rec0, "value": 0.9},
        )
        shadow_doc = client.get(f"/v1/sessions/{shadow_id}").json()
        assert shadow_doc["recommendation"] == main_doc["recommendation"]
        client.delete(f"/v1/sessions/{shadow_id}")
        # main session untouched by the shadow
        after = client.get(f"/v1/sessions/{sid}").json()
        assert after["history"] == main_doc["history"]


class TestStores:
    def test_ttl_eviction(self, tiny_model2):
        app = create_app(model=tiny_model2, store=InMemorySessionStore(ttl_seconds=0))
        client = TestClient(app)
        sid = create(client, strategy="tree")["id"]
        assert client.get(f"/v1/sessions/{sid}").status_code == 404

    def test_file_store_survives_restart(self, tiny_model2, tmp_path):
        path = tmp_path / "sessions.json"
        store1 = FileSessionStore(str(path), model=tiny_model2)
        client1 = TestClient(create_app(model=tiny_model2, store=store1))
        doc = create(client1, strategy="forest", seed=11)
        sid = doc["id"]
        rec = doc["recommendation"]
        client1.post(
            f"/v1/sessions/{sid}/results",
            json={"observable": rec, "value": 0.7},
        )
        expected = client1.get(f"/v1/sessions/{sid}").json()

        store2 = FileSessionStore(str(path), model=tiny_model2)
        client2 = TestClient(create_app(model=tiny_model2, store=store2))
        revived = client2.get(f"/v1/sessions/{sid}")
        assert revived.status_code == 200
        assert revived.json()["history"] == expected["history"]
        assert revived.json()["recommendation"] == expected["recommendation"]
