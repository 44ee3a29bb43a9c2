"""Tests for the HTTP service endpoints."""

from fastapi.testclient import TestClient

from zpulse.service import app

client = TestClient(app)

FAST_OPTIMIZER = {
    "target_fidelity": 0.95,
    "max_iterations": 200,
    "restarts": 2,
}
FAST_SCHEDULE = {"gate_time_ns": 30.0}


class TestHealthAndTarget:
    def test_health(self):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"

    def test_target_ifredkin(self):
        resp = client.get("/target/ifredkin+")
        assert resp.status_code == 200
        data = resp.json()
        assert data["dim"] == 8
        assert data["matrix_imag"][5][6] == 1.0
        assert data["matrix_real"][5][5] == 0.0

    def test_target_iswap(self):
        resp = client.get("/target/iswap-baseline")
        data = resp.json()
        assert data["dim"] == 4
        assert data["qubits"] == [1, 2]

    def test_unknown_target(self):
        resp = client.get("/target/cnot")
        assert resp.status_code == 422


class TestOptimizeEndpoint:
    def test_baseline_run(self):
        resp = client.post(
            "/optimize",
            json={
                "problem": "iswap-baseline",
                "schedule": FAST_SCHEDULE,
                "optimizer": FAST_OPTIMIZER,
                "seed": 5,
            },
        )
        assert resp.status_code == 200
        data = resp.json()
        assert data["reached_target"] is True
        assert data["fidelity"] >= 0.95
        assert len(data["coarse"]["t_ns"]) == 30
        assert len(data["fine"]["t_ns"]) == 300
        assert data["trace"][0]["iteration"] == 0
        # P is parked: its waveform must sit at the parking detuning
        assert all(abs(v - 3.5) < 1e-12 for v in data["coarse"]["delta_P_GHz"])

    def test_invalid_schedule_422(self):
        resp = client.post(
            "/optimize",
            json={"schedule": {"gate_time_ns": 7.0}, "seed": 1},
        )
        assert resp.status_code == 422

    def test_deterministic(self):
        body = {
            "problem": "iswap-baseline",
            "schedule": FAST_SCHEDULE,
            "optimizer": {"target_fidelity": 1.0, "max_iterations": 15, "restarts": 1},
            "seed": 9,
        }
        a = client.post("/optimize", json=body).json()
        b = client.post("/optimize", json=body).json()
        assert a["fidelity"] == b["fidelity"]
        assert a["coarse"] == b["coarse"]
        assert a["trace"] == b["trace"]


class TestTrajectoryEndpoint:
    def test_constant_populations_when_decoupled(self):
        n = 300
        times = [0.1 * m for m in range(n)]
        payload = {
            "device": {"couplings_ghz": [1e-13, 1e-13, 1e-13]},
            "schedule": FAST_SCHEDULE,
            "pulse": {
                "t_ns": times,
                "delta_P_GHz": [1.0] * n,
                "delta_S1_GHz": [1.5] * n,
                "delta_S2_GHz": [2.0] * n,
            },
            "initial": "0|110",
            "watch": ["0|110", "0|101"],
        }
        resp = client.post("/trajectory", json=payload)
        assert resp.status_code == 200
        cols = resp.json()["columns"]
        assert all(abs(v - 1.0) < 1e-12 for v in cols["0|110"])
        assert all(v < 1e-12 for v in cols["0|101"])

    def test_row_count_mismatch_422(self):
        payload = {
            "schedule": FAST_SCHEDULE,
            "pulse": {
                "t_ns": [0.0, 1.0],
                "delta_P_GHz": [1.0, 1.0],
                "delta_S1_GHz": [1.5, 1.5],
                "delta_S2_GHz": [2.0, 2.0],
            },
            "initial": "0|110",
        }
        resp = client.post("/trajectory", json=payload)
        assert resp.status_code == 422

    def test_unknown_label_422(self):
        n = 300
        payload = {
            "schedule": FAST_SCHEDULE,
            "pulse": {
                "t_ns": [0.1 * m for m in range(n)],
                "delta_P_GHz": [1.0] * n,
                "delta_S1_GHz": [1.5] * n,
                "delta_S2_GHz": [2.0] * n,
            },
            "initial": "5|000",
        }
        resp = client.post("/trajectory", json=payload)
        assert resp.status_code == 422


class TestSweepEndpoint:
    def test_single_point(self):
        resp = client.post(
            "/sweep",
            json={
                "problem": "iswap-baseline",
                "schedule": FAST_SCHEDULE,
                "optimizer": {"target_fidelity": 0.9, "max_iterations": 150, "restarts": 1},
                "seed": 3,
                "t_min_ns": 30.0,
                "t_max_ns": 30.0,
                "t_step_ns": 2.0,
            },
        )
        assert resp.status_code == 200
        data = resp.json()
        assert len(data["rows"]) == 1
        assert data["minimal_feasible_ns"] == 30.0

    def test_empty_range_422(self):
        resp = client.post(
            "/sweep",
            json={"t_min_ns": 50.0, "t_max_ns": 40.0, "t_step_ns": 1.0},
        )
        assert resp.status_code == 422


class TestCheckgradEndpoint:
    def test_small_error(self):
        resp = client.post(
            "/checkgrad",
            json={
                "problem": "iswap-baseline",
                "schedule": FAST_SCHEDULE,
                "probes": 15,
                "seed": 2,
            },
        )
        assert resp.status_code == 200
        assert resp.json()["max_rel_error"] < 1e-6

    def test_corrupt_adjoint_flagged(self):
        resp = client.post(
            "/checkgrad",
            json={
                "problem": "iswap-baseline",
                "schedule": FAST_SCHEDULE,
                "probes": 10,
                "seed": 2,
                "corrupt_adjoint": True,
            },
        )
        assert resp.json()["max_rel_error"] > 1e-3
