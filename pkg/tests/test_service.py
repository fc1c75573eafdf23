import math

import pytest
from fastapi.testclient import TestClient

from tuplesieve.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestMeta:
    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok"}

    def test_meta(self, client):
        body = client.get("/meta").json()
        assert body["package"] == "tuplesieve"
        assert body["schema_version"] == 1


class TestTupleEndpoints:
    def test_admissible(self, client):
        body = client.post("/tuples/admissible", json={"offsets": [0, 4, 6, 10, 12, 16]}).json()
        assert body["admissible"] is True
        assert body["diameter"] == 16
        assert body["residue_counts"]["2"] == 1

    def test_residues(self, client):
        body = client.post("/tuples/residues", json={"offsets": [0, 4, 6, 10, 12, 16], "p": 5}).json()
        assert body["nu"] == 4

    def test_singular_series(self, client):
        body = client.post("/tuples/singular-series", json={"offsets": [0, 2], "tol": 1e-7}).json()
        assert abs(body["value"] - 1.3203236316937393) < 1e-7
        assert body["truncation_bound"] <= 1e-7

    def test_narrowest(self, client):
        body = client.post("/tuples/narrowest", json={"k": 6}).json()
        assert body["offsets"] == [0, 4, 6, 10, 12, 16]

    def test_narrowest_not_found(self, client):
        body = client.post("/tuples/narrowest", json={"k": 3, "diameter_cap": 5}).json()
        assert body["found"] is False and body["offsets"] is None

    def test_gallagher(self, client):
        body = client.post("/tuples/gallagher", json={"k": 1, "h": 10}).json()
        assert body["ordered_sum"] == 10.0

    def test_offsets_validated(self, client):
        assert client.post("/tuples/admissible", json={"offsets": [0, 0]}).status_code == 422
        assert client.post("/tuples/admissible", json={"offsets": []}).status_code == 422


class TestWeightEndpoint:
    def test_lambda_table_summary(self, client):
        body = client.post("/weights/table", json={
            "kind": "lambda_R", "start": 0, "end": 100, "R": 10.0, "max_values": 3}).json()
        assert body["count"] == 100
        assert body["values"][0] == pytest.approx(math.log(10.0))

    def test_gpy_requires_offsets(self, client):
        resp = client.post("/weights/table", json={
            "kind": "gpy", "start": 0, "end": 10, "R": 5.0, "ell": 0})
        assert resp.status_code == 422

    def test_moment_requires_order_and_window(self, client):
        resp = client.post("/weights/table", json={
            "kind": "moment", "start": 0, "end": 10, "R": 5.0})
        assert resp.status_code == 422

    def test_selberg_summary(self, client):
        body = client.post("/weights/table", json={
            "kind": "selberg", "start": 0, "end": 200, "R": 10.0, "offsets": [0, 2]}).json()
        assert body["kind"] == "selberg" and body["count"] == 200


class TestCorrEndpoints:
    def test_self(self, client):
        body = client.post("/corr/self", json={"N": 10000, "theta": 0.25}).json()
        kinds = [r["kind"] for r in body["reports"]]
        assert kinds == ["self_rr", "self_lr"]
        for r in body["reports"]:
            assert 0.5 < r["ratio"] < 1.5

    def test_pair_requires_one_truncation(self, client):
        assert client.post("/corr/pair", json={"N": 1000, "shift": 2}).status_code == 422
        assert client.post("/corr/pair", json={
            "N": 1000, "shift": 2, "R": 10.0, "theta": 0.25}).status_code == 422

    def test_pair_zero_shift_rejected(self, client):
        assert client.post("/corr/pair", json={"N": 1000, "shift": 0, "R": 10.0}).status_code == 422

    def test_second_moment(self, client):
        body = client.post("/corr/second-moment", json={"N": 10000, "lambda_param": 1.0}).json()
        rep = body["reports"][0]
        assert rep["kind"] == "second_moment"
        assert rep["ratio"] is not None

    def test_hl(self, client):
        body = client.post("/corr/hardy-littlewood", json={"offsets": [0, 2], "N": 10000}).json()
        kinds = [r["kind"] for r in body["reports"]]
        assert kinds == ["hl_lambda", "hl_count"]
        assert body["reports"][1]["empirical"] == 205.0  # twin pairs below 1e4

    def test_gpy_theta_case(self, client):
        body = client.post("/corr/gpy-theta", json={
            "N": 1000, "R": 10.0, "offsets1": [0, 2], "ell1": 0,
            "offsets2": [0, 6], "ell2": 0, "h0": 2}).json()
        assert body["reports"][0]["params"]["case"] == "in_one"


class TestDetectEndpoints:
    def test_heathbrown(self, client):
        body = client.post("/detect/heathbrown", json={
            "pairs": [[1, 0], [1, 2]], "rho": 1 / 14, "x": 10000, "witness_cap": 5}).json()
        assert set(body["components"]) == {"Q1", "Q2"}
        assert body["witness_count"] > 0
        assert all(w["verified"] for w in body["witnesses"])

    def test_heathbrown_degenerate(self, client):
        resp = client.post("/detect/heathbrown", json={
            "pairs": [[1, 2], [2, 4]], "rho": 0.1, "x": 1000})
        assert resp.status_code == 422

    def test_gaps(self, client):
        body = client.post("/detect/gaps", json={"limit": 1000, "r": 1, "max_rows": 5}).json()
        assert body["rows_capped"] is True
        assert body["min_raw_gap"] == 1

    def test_gpy_form(self, client):
        body = client.post("/detect/gpy", json={
            "N": 1000, "h": 5, "k": 2, "ell": 1, "r": 1, "theta": 0.2}).json()
        assert body["form"] == "gpy_sum"
        assert "prime_mass" in body["components"]

    def test_first_moment(self, client):
        body = client.post("/detect/first-moment", json={
            "N": 1000, "lambda_param": 1.0, "theta": 0.25}).json()
        assert body["total"] >= 0

    def test_mollified(self, client):
        body = client.post("/detect/mollified", json={
            "N": 1000, "lambda_param": 1.0, "rho": 0.5, "C": 1.0, "theta": 0.25}).json()
        assert body["form"] == "mollified"

    def test_gs(self, client):
        body = client.post("/detect/gs", json={
            "offsets": [0, 4, 6, 10, 12, 16], "ell": 1, "r": 1, "N": 1000, "theta": 0.25}).json()
        assert body["params"]["admissible"] is True


class TestDistEndpoints:
    def test_theta(self, client):
        body = client.post("/dist/theta", json={"N": 100, "q": 4, "a": 1}).json()
        assert body["value"] == pytest.approx(39.134358990396204, rel=1e-12)

    def test_theta_validation(self, client):
        assert client.post("/dist/theta", json={"N": 100, "q": 4, "a": 4}).status_code == 422

    def test_bv(self, client):
        body = client.post("/dist/bv", json={"N": 10000, "Q": 20}).json()
        assert body["Q"] == 20 and len(body["per_q"]) == 20

    def test_probe(self, client):
        body = client.post("/dist/probe", json={"N": 10000, "alphas": [0.2, 0.4]}).json()
        totals = [r["total"] for r in body["reports"]]
        assert totals[0] <= totals[1]


class TestE2Endpoints:
    def test_sieve(self, client):
        body = client.post("/e2/sieve", json={"limit": 100, "max_values": 4}).json()
        assert body["values"] == [6, 10, 14, 15]
        assert body["values_capped"] is True

    def test_gaps(self, client):
        body = client.post("/e2/gaps", json={"limit": 1000}).json()
        assert body["min_gap"] == 1
        assert sum(body["histogram"].values()) == body["count"]


class TestErrorMapping:
    def test_core_value_error_maps_to_422(self, client):
        # passes request validation, rejected by the core precondition |shift| <= R
        resp = client.post("/corr/pair", json={"N": 1000, "shift": 50, "R": 10.0})
        assert resp.status_code == 422
        assert "shift" in resp.json()["detail"]

    def test_resource_budget_maps_to_507(self, client, monkeypatch):
        monkeypatch.setenv("TUPLESIEVE_MEM_CAP", "1000")
        resp = client.post("/e2/sieve", json={"limit": 10 ** 7})
        assert resp.status_code == 507
        assert resp.json()["code"] == "resource"

    def test_determinism_across_calls(self, client):
        a = client.post("/corr/self", json={"N": 20000, "theta": 0.25}).json()
        b = client.post("/corr/self", json={"N": 20000, "theta": 0.25}).json()
        assert a == b
