import json
import time

import pytest
from fastapi.testclient import TestClient

from txpopt.service import create_app, state_view


@pytest.fixture()
def client(tmp_path, profile):
    app = create_app(profile=profile, runs_dir=tmp_path / "runs")
    with TestClient(app) as c:
        yield c


def wait_done(client, run_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        handle = client.get(f"/runs/{run_id}").json()
        if handle["status"] in ("done", "failed"):
            return handle
        time.sleep(0.02)
    raise TimeoutError(f"run {run_id} did not finish")


def sse_events(response_text):
    events = []
    for block in response_text.split("\n\n"):
        lines = [l for l in block.strip().split("\n") if l]
        if not lines:
            continue
        event = {"event": "message"}
        for line in lines:
            key, _, value = line.partition(": ")
            event[key if key != "data" else "data"] = value
            if key == "event":
                event["event"] = value
        if "data" in event:
            event["data"] = json.loads(event["data"])
        events.append(event)
    return events


class TestRunLifecycle:
    def test_sa_run_completes(self, client):
        created = client.post("/runs", json={"kind": "sa", "config": {"max_steps": 400}})
        assert created.status_code == 201
        handle = created.json()
        assert handle["status"] in ("pending", "running")
        final = wait_done(client, handle["id"])
        assert final["status"] == "done"
        assert final["progress"] == 1.0
        assert 0.0 <= final["result"]["best_reward"] <= 1.0

    def test_unknown_kind_rejected(self, client):
        response = client.post("/runs", json={"kind": "tabu", "config": {}})
        assert response.status_code == 400

    def test_two_creates_distinct_ids(self, client):
        a = client.post("/runs", json={"kind": "random", "config": {"episodes": 3}}).json()
        b = client.post("/runs", json={"kind": "random", "config": {"episodes": 3}}).json()
        assert a["id"] != b["id"]
        wait_done(client, a["id"])
        wait_done(client, b["id"])

    def test_unknown_run_404(self, client):
        assert client.get("/runs/run-9999").status_code == 404

    def test_bad_config_fails_run(self, client):
        handle = client.post("/runs", json={"kind": "sa", "config": {"alpha": 7.0}}).json()
        final = wait_done(client, handle["id"])
        assert final["status"] == "failed"
        assert "alpha" in final["error"]


class TestStateViews:
    def test_gauges_from_recorded_state(self, client):
        handle = client.post("/runs", json={"kind": "random",
                                            "config": {"episodes": 5, "seed": 3}}).json()
        wait_done(client, handle["id"])
        view = client.get(f"/runs/{handle['id']}/state").json()
        assert len(view["links"]) == 3
        assert 0 <= view["bandwidth_consumption_pct"] <= 200
        assert 0 <= view["power_consumption_pct"] <= 200
        for link in view["links"]:
            assert link["freq_hi_hz"] > link["freq_lo_hz"]
            assert isinstance(link["margin_ok"], bool)

    def test_state_at_step_and_beyond(self, client):
        handle = client.post("/runs", json={"kind": "random",
                                            "config": {"episodes": 4, "seed": 0}}).json()
        wait_done(client, handle["id"])
        rows = client.get(f"/runs/{handle['id']}/state").json()
        last_step = rows["step"]
        ok = client.get(f"/runs/{handle['id']}/state", params={"step": last_step})
        assert ok.status_code == 200
        beyond = client.get(f"/runs/{handle['id']}/state",
                            params={"step": last_step + 10_000})
        assert beyond.status_code == 404

    def test_power_gauge_over_100(self, profile):
        norms = [[0.1, 1.0, 0], [0.5, 1.0, 0], [0.9, 1.0, 0]]  # 3 x 40 W = 120 W
        view = state_view(profile, norms)
        assert view["power_consumption_pct"] == pytest.approx(120.0)

    def test_gauge_capped_at_200(self, profile):
        from dataclasses import replace

        small = replace(profile, transponder=replace(profile.transponder, total_eirp=10.0))
        norms = [[0.1, 1.0, 0], [0.5, 1.0, 0], [0.9, 1.0, 0]]  # 120 W on a 10 W budget
        view = state_view(small, norms)
        assert view["power_consumption_pct"] == 200.0

    def test_margin_flag_tracks_power_floor(self, profile):
        floor = profile.min_eirp_table[0]
        lo_norm = (floor * 0.5) / profile.eirp_hi
        hi_norm = (floor * 1.5) / profile.eirp_hi
        view = state_view(profile, [[0.1, lo_norm, 0], [0.5, hi_norm, 0], [0.9, 0.9, 0]])
        assert view["links"][0]["margin_ok"] is False
        assert view["links"][1]["margin_ok"] is True


class TestWeights:
    def test_round_trip(self, client):
        got = client.get("/weights").json()
        assert got["link_share"] == 0.7
        new = dict(got)
        new["margin"] = 2.5
        assert client.put("/weights", json=new).status_code == 200
        assert client.get("/weights").json()["margin"] == 2.5

    def test_invalid_rejected(self, client):
        zeroed = client.get("/weights").json()
        for name in ("overlap", "on_transponder", "peb", "margin"):
            zeroed[name] = 0.0
        response = client.put("/weights", json=zeroed)
        assert response.status_code == 400
        assert client.get("/weights").json()["overlap"] == 1.0  # unchanged

    def test_group_scaling_leaves_fresh_runs_unchanged(self, client):
        cfg = {"episodes": 40, "seed": 11}
        a = client.post("/runs", json={"kind": "random", "config": cfg}).json()
        base = wait_done(client, a["id"])["result"]["mean_final_reward"]

        doubled = client.get("/weights").json()
        for name in ("bandwidth", "eirp", "packed", "free_resource"):
            doubled[name] = 2.0
        client.put("/weights", json=doubled)
        b = client.post("/runs", json={"kind": "random", "config": cfg}).json()
        scaled = wait_done(client, b["id"])["result"]["mean_final_reward"]
        assert scaled == pytest.approx(base, abs=1e-12)


class TestEvents:
    def test_replay_then_end(self, client):
        handle = client.post("/runs", json={"kind": "random",
                                            "config": {"episodes": 5, "seed": 2}}).json()
        wait_done(client, handle["id"])
        with client.stream("GET", f"/runs/{handle['id']}/events") as response:
            text = "".join(response.iter_text())
        events = sse_events(text)
        assert events[-1]["event"] == "end"
        data_events = [e for e in events if e["event"] == "message"]
        steps = [e["data"]["step"] for e in data_events]
        assert steps == sorted(steps)
        assert len(steps) == len(set(steps))
        assert len(data_events) == 5

    def test_reconnect_resumes_without_gaps(self, client):
        handle = client.post("/runs", json={"kind": "random",
                                            "config": {"episodes": 6, "seed": 5}}).json()
        wait_done(client, handle["id"])
        with client.stream("GET", f"/runs/{handle['id']}/events") as response:
            full = [e["data"]["step"] for e in sse_events("".join(response.iter_text()))
                    if e["event"] == "message"]
        cut = full[2]
        with client.stream("GET", f"/runs/{handle['id']}/events",
                           params={"after": cut}) as response:
            resumed = [e["data"]["step"] for e in sse_events("".join(response.iter_text()))
                       if e["event"] == "message"]
        assert resumed == full[3:]

    def test_unknown_run_events_404(self, client):
        assert client.get("/runs/nope/events").status_code == 404


class TestCheckpointInference:
    def test_train_then_infer(self, client):
        handle = client.post("/runs", json={
            "kind": "ppo-train",
            "config": {"total_steps": 1000, "seed": 0},
        }).json()
        final = wait_done(client, handle["id"], timeout=120.0)
        assert final["status"] == "done"
        ckpt_id = final["result"]["checkpoint"]
        response = client.post(f"/checkpoints/{ckpt_id}/infer",
                               json={"episodes": 3, "seed": 1})
        assert response.status_code == 200
        body = response.json()
        assert len(body["proposals"]) == 3
        proposal = body["proposals"][0]
        assert len(proposal["view"]["links"]) == 3
        assert 0 <= proposal["breakdown"]["total"] <= 1

    def test_missing_checkpoint_404(self, client):
        assert client.post("/checkpoints/ghost/infer", json={}).status_code == 404

    def test_ppo_infer_run_kind(self, client):
        handle = client.post("/runs", json={
            "kind": "ppo-train",
            "config": {"total_steps": 500, "seed": 1},
        }).json()
        final = wait_done(client, handle["id"], timeout=120.0)
        infer = client.post("/runs", json={
            "kind": "ppo-infer",
            "config": {"checkpoint": final["result"]["checkpoint"], "episodes": 4},
        }).json()
        done = wait_done(client, infer["id"])
        assert done["status"] == "done"
        assert 0 <= done["result"]["mean_final_reward"] <= 1


class TestProfileEndpoint:
    def test_profile_served(self, client, profile):
        body = client.get("/profile").json()
        assert body == profile.to_dict()
