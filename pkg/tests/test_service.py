import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from shellsym.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_health(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json()["status"] == "ok"


class TestClassifyEndpoint:
    def test_plate(self, client):
        r = client.post("/classify", json={"config": {"surface": "0"}})
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "ok"
        assert body["report"]["algebra_dimension"] == 10

    def test_unknown_config_key_422(self, client):
        r = client.post("/classify", json={"config": {"nope": 1}})
        assert r.status_code == 422

    def test_bad_expression_400(self, client):
        r = client.post("/classify", json={"config": {"surface": "foo(x1)"}})
        assert r.status_code == 400
        assert "surface" in r.json()["detail"]


class TestTransformEndpoint:
    def test_files_returned(self, client):
        r = client.post("/transform", json={
            "config": {"surface": "0.5*(x1^2+x2^2)", "epsilon": 0.9}})
        assert r.status_code == 200
        body = r.json()
        assert set(body["files"]) == {"P.csv", "K.csv", "boundary_data.json"}
        assert body["files"]["P.csv"].startswith("x1,x2,value")


class TestSolveEndpoint:
    def test_plate_solve(self, client):
        r = client.post("/solve", json={
            "config": {"surface": "0", "load": "0", "grid": {"n": 11}},
            "system": "marguerre"})
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "ok"
        assert body["report"]["converged"] is True
        assert "w.csv" in body["files"]

    def test_bad_system_rejected(self, client):
        r = client.post("/solve", json={"config": {}, "system": "unknown"})
        assert r.status_code == 422


class TestVerifyEndpoint:
    def test_reduction(self, client):
        r = client.post("/verify", json={
            "config": {"surface": "0.5*(x1^2+x2^2)", "epsilon": 0.9},
            "check": "reduction"})
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "ok"
        assert body["report"]["passes"]["reduction"] is True

    def test_check_required(self, client):
        r = client.post("/verify", json={"config": {}})
        assert r.status_code == 422
