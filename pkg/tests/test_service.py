import json
import time

import pytest
from fastapi.testclient import TestClient

from geneval import (
    ConstraintSet,
    EvaluationFunction,
    OracleConfig,
    ScenarioConfig,
    build_comparison_set,
    label_set,
    mirror,
    save_comparison_set,
)
from geneval.preferences import load_preferences, parse_label
from geneval.service import (
    ServiceConfig,
    create_app,
    default_init_function,
    presentation_flip,
)

TINY_GRID = {"weight_values": [0.0, 0.5, 1.0], "p_values": [1, 2]}


@pytest.fixture
def comps_path(tmp_path):
    cfg = ScenarioConfig()
    cs = build_comparison_set(cfg, 3, 2, seed=14)
    path = tmp_path / "comps.json"
    save_comparison_set(cs, path)
    return path


@pytest.fixture
def client(tmp_path, comps_path):
    config = ServiceConfig(data_dir=str(tmp_path / "data"))
    return TestClient(create_app(config))


def make_session(client, comps_path) -> str:
    r = client.post("/api/sessions", json={"comparison_set_path": str(comps_path)})
    assert r.status_code == 200
    return r.json()["session_id"]


def answer_all(client, sid, label="EQUIVALENT") -> int:
    n = 0
    while True:
        r = client.get(f"/api/sessions/{sid}/next").json()
        if r["status"] == "complete":
            return n
        client.post(f"/api/sessions/{sid}/preferences",
                    json={"comparison_id": r["comparison"]["id"], "label": label})
        n += 1


def wait_for_job(client, job_id, timeout=30.0) -> dict:
    deadline = time.time() + timeout
    while time.time() < deadline:
        r = client.get(f"/api/learn/{job_id}").json()
        if r["status"] in ("done", "failed"):
            return r
        time.sleep(0.02)
    raise TimeoutError(f"job {job_id} did not finish")


class TestSessions:
    def test_create_and_list(self, client, comps_path):
        sid = make_session(client, comps_path)
        listing = client.get("/api/sessions").json()["sessions"]
        assert [s["session_id"] for s in listing] == [sid]
        assert listing[0]["total"] == 6

    def test_missing_path_rejected(self, client):
        r = client.post("/api/sessions", json={"comparison_set_path": "/nope.json"})
        assert r.status_code == 400

    def test_unknown_session_404(self, client):
        assert client.get("/api/sessions/ghost/next").status_code == 404


class TestNextAndPreferences:
    def test_fresh_session_serves_first_comparison(self, client, comps_path):
        sid = make_session(client, comps_path)
        r = client.get(f"/api/sessions/{sid}/next").json()
        assert r["status"] == "comparison"
        assert r["progress"] == {"answered": 0, "total": 6}
        assert {"id", "object_id", "initial_geometry", "a", "b"} <= set(r["comparison"])

    def test_repeated_get_is_idempotent(self, client, comps_path):
        sid = make_session(client, comps_path)
        r1 = client.get(f"/api/sessions/{sid}/next").json()
        r2 = client.get(f"/api/sessions/{sid}/next").json()
        assert r1 == r2

    def test_submit_advances_progress(self, client, comps_path):
        sid = make_session(client, comps_path)
        first = client.get(f"/api/sessions/{sid}/next").json()["comparison"]["id"]
        r = client.post(f"/api/sessions/{sid}/preferences",
                        json={"comparison_id": first, "label": "BETTER_A"})
        assert r.status_code == 200
        assert r.json() == {"answered": 1, "total": 6}
        second = client.get(f"/api/sessions/{sid}/next").json()["comparison"]["id"]
        assert second != first

    def test_complete_session(self, client, comps_path):
        sid = make_session(client, comps_path)
        n = answer_all(client, sid)
        assert n == 6
        r = client.get(f"/api/sessions/{sid}/next").json()
        assert r["status"] == "complete"
        assert r["progress"]["answered"] == 6

    def test_bad_label_names_the_seven_symbols(self, client, comps_path):
        sid = make_session(client, comps_path)
        cid = client.get(f"/api/sessions/{sid}/next").json()["comparison"]["id"]
        r = client.post(f"/api/sessions/{sid}/preferences",
                        json={"comparison_id": cid, "label": "BEST_EVER"})
        assert r.status_code == 400
        for symbol in ("FAR_BETTER_A", "EQUIVALENT", "FAR_BETTER_B"):
            assert symbol in r.json()["detail"]

    def test_unknown_comparison_404(self, client, comps_path):
        sid = make_session(client, comps_path)
        r = client.post(f"/api/sessions/{sid}/preferences",
                        json={"comparison_id": "ghost", "label": "BETTER_A"})
        assert r.status_code == 404

    def test_resubmission_supersedes_without_double_count(self, client, comps_path):
        sid = make_session(client, comps_path)
        cid = client.get(f"/api/sessions/{sid}/next").json()["comparison"]["id"]
        client.post(f"/api/sessions/{sid}/preferences",
                    json={"comparison_id": cid, "label": "BETTER_A"})
        r = client.post(f"/api/sessions/{sid}/preferences",
                        json={"comparison_id": cid, "label": "EQUIVALENT"})
        assert r.json()["answered"] == 1

    def test_submitted_labels_are_unmirrored(self, client, comps_path, tmp_path):
        # session ids are random, so retry until this one presents both a
        # flipped and an unflipped comparison
        for _ in range(10):
            sid = make_session(client, comps_path)
            ids = [e["id"] for e in
                   json.loads(comps_path.read_text())["comparisons"]]
            flips = {cid: presentation_flip(sid, cid) for cid in ids}
            if any(flips.values()) and not all(flips.values()):
                break
        assert any(flips.values()) and not all(flips.values())
        submitted = {}
        while True:
            r = client.get(f"/api/sessions/{sid}/next").json()
            if r["status"] == "complete":
                break
            cid = r["comparison"]["id"]
            client.post(f"/api/sessions/{sid}/preferences",
                        json={"comparison_id": cid, "label": "BETTER_A"})
            submitted[cid] = "BETTER_A"
        log = load_preferences(tmp_path / "data" / "sessions" / sid / "preferences.jsonl")
        assert len(log) == len(submitted)
        for rec in log:
            expected = parse_label(submitted[rec.comparison_id])
            if flips[rec.comparison_id]:
                expected = mirror(expected)
            assert rec.label is expected

    def test_review_endpoint_returns_presented_label(self, client, comps_path):
        sid = make_session(client, comps_path)
        r = client.get(f"/api/sessions/{sid}/next").json()["comparison"]
        cid = r["id"]
        review = client.get(f"/api/sessions/{sid}/comparisons/{cid}").json()
        assert review["label"] is None
        assert review["comparison"] == r  # same presentation orientation
        client.post(f"/api/sessions/{sid}/preferences",
                    json={"comparison_id": cid, "label": "SLIGHTLY_BETTER_A"})
        review = client.get(f"/api/sessions/{sid}/comparisons/{cid}").json()
        # the label comes back exactly as the user expressed it
        assert review["label"] == "SLIGHTLY_BETTER_A"
        assert client.get(f"/api/sessions/{sid}/comparisons/ghost").status_code == 404

    def test_flipped_presentation_swaps_payload_sides(self, client, comps_path):
        cs_obj = json.loads(comps_path.read_text())
        sid = make_session(client, comps_path)
        r = client.get(f"/api/sessions/{sid}/next").json()["comparison"]
        entry = next(e for e in cs_obj["comparisons"] if e["id"] == r["id"])
        if presentation_flip(sid, r["id"]):
            assert r["a"]["id"] == entry["b"]["id"]
            assert r["b"]["id"] == entry["a"]["id"]
        else:
            assert r["a"]["id"] == entry["a"]["id"]


class TestLearnJobs:
    def test_learn_without_preferences_conflicts(self, client, comps_path):
        sid = make_session(client, comps_path)
        assert client.post(f"/api/sessions/{sid}/learn", json={}).status_code == 409

    def test_learn_lifecycle(self, client, comps_path):
        sid = make_session(client, comps_path)
        answer_all(client, sid)
        r = client.post(f"/api/sessions/{sid}/learn", json={"grid": TINY_GRID})
        assert r.status_code == 202
        job_id = r.json()["job_id"]
        status = client.get(f"/api/learn/{job_id}").json()["status"]
        assert status in ("queued", "running", "done")
        done = wait_for_job(client, job_id)
        assert done["status"] == "done"
        result = done["result"]
        assert result["best_error_percent"] <= result["initial_error_percent"]

    def test_unknown_job_404(self, client):
        assert client.get("/api/learn/ghost").status_code == 404

    def test_second_learn_while_running_conflicts(self, client, comps_path):
        sid = make_session(client, comps_path)
        answer_all(client, sid)
        slow = {"grid": None, "tabu": {"max_iterations": 400, "tabu_tenure": 7,
                                       "seed": 0, "stop_at_zero": False}}
        slow["grid"] = {"weight_values": [round(0.05 * i, 2) for i in range(21)],
                        "p_values": list(range(1, 9))}
        r1 = client.post(f"/api/sessions/{sid}/learn", json=slow)
        assert r1.status_code == 202
        r2 = client.post(f"/api/sessions/{sid}/learn", json=slow)
        assert r2.status_code == 409
        wait_for_job(client, r1.json()["job_id"])


class TestReports:
    def test_report_before_job_conflicts_for_learnt(self, client, comps_path):
        sid = make_session(client, comps_path)
        answer_all(client, sid)
        r = client.get(f"/api/sessions/{sid}/report", params={"function": "learnt"})
        assert r.status_code == 409

    def test_bad_function_param(self, client, comps_path):
        sid = make_session(client, comps_path)
        r = client.get(f"/api/sessions/{sid}/report", params={"function": "bogus"})
        assert r.status_code == 400

    def test_initial_and_learnt_reports(self, client, comps_path):
        sid = make_session(client, comps_path)
        answer_all(client, sid)
        initial = client.get(f"/api/sessions/{sid}/report",
                             params={"function": "initial"}).json()
        assert len(initial["rows"]) == 6
        flags = [row["compatible"] for row in initial["rows"]]
        assert flags == sorted(flags)  # incompatible first
        inc = sum(1 for f in flags if not f)
        assert initial["global_error_percent"] == pytest.approx(100.0 * inc / 6)

        job = client.post(f"/api/sessions/{sid}/learn",
                          json={"grid": TINY_GRID}).json()["job_id"]
        wait_for_job(client, job)
        learnt = client.get(f"/api/sessions/{sid}/report",
                            params={"function": "learnt"}).json()
        assert learnt["global_error_percent"] <= initial["global_error_percent"]

    def test_function_endpoint(self, client, comps_path):
        sid = make_session(client, comps_path)
        r = client.get(f"/api/sessions/{sid}/function").json()
        assert r["learnt"] is None
        assert "orientation" not in r["initial"]["constraints"]
        answer_all(client, sid)
        job = client.post(f"/api/sessions/{sid}/learn",
                          json={"grid": TINY_GRID}).json()["job_id"]
        wait_for_job(client, job)
        r = client.get(f"/api/sessions/{sid}/function").json()
        assert r["learnt"] is not None


class TestDurability:
    def test_restart_reconstructs_sessions(self, tmp_path, comps_path):
        data_dir = str(tmp_path / "data")
        client1 = TestClient(create_app(ServiceConfig(data_dir=data_dir)))
        sid = make_session(client1, comps_path)
        for _ in range(3):
            r = client1.get(f"/api/sessions/{sid}/next").json()
            client1.post(f"/api/sessions/{sid}/preferences",
                         json={"comparison_id": r["comparison"]["id"],
                               "label": "SLIGHTLY_BETTER_B"})
        # new app over the same files stands in for a process restart
        client2 = TestClient(create_app(ServiceConfig(data_dir=data_dir)))
        r = client2.get(f"/api/sessions/{sid}/next").json()
        assert r["progress"] == {"answered": 3, "total": 6}
        report = client2.get(f"/api/sessions/{sid}/report",
                             params={"function": "initial"}).json()
        assert len(report["rows"]) == 3

    def test_torn_tail_line_tolerated(self, tmp_path, comps_path):
        data_dir = str(tmp_path / "data")
        client1 = TestClient(create_app(ServiceConfig(data_dir=data_dir)))
        sid = make_session(client1, comps_path)
        r = client1.get(f"/api/sessions/{sid}/next").json()
        client1.post(f"/api/sessions/{sid}/preferences",
                     json={"comparison_id": r["comparison"]["id"], "label": "BETTER_B"})
        log = tmp_path / "data" / "sessions" / sid / "preferences.jsonl"
        with open(log, "a") as f:
            f.write('{"comparison_id": "half-writ')  # simulated crash mid-append
        client2 = TestClient(create_app(ServiceConfig(data_dir=data_dir)))
        assert client2.get(f"/api/sessions/{sid}/next").json()["progress"]["answered"] == 1


class TestConfig:
    def test_env_overrides(self, tmp_path, monkeypatch):
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps({"port": 9000, "data_dir": "from-file"}))
        monkeypatch.setenv("GENEVAL_PORT", "9100")
        monkeypatch.setenv("GENEVAL_DATA_DIR", str(tmp_path / "env-data"))
        cfg = ServiceConfig.load(cfg_path)
        assert cfg.port == 9100
        assert cfg.data_dir == str(tmp_path / "env-data")

    def test_defaults_without_file(self):
        cfg = ServiceConfig.load(None)
        assert cfg.port == 8000


def test_default_init_function_excludes_orientation():
    cset = ConstraintSet(("size", "orientation", "position"))
    f = default_init_function(cset)
    assert "orientation" not in f.constraint_set
    assert f.weights == (0.5, 0.5)
    only_orientation = ConstraintSet(("orientation",))
    assert default_init_function(only_orientation).constraint_set == only_orientation
