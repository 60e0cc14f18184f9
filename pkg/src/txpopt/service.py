"""Operator service: a local HTTP facade over the workbench.

Runs (annealing, random baseline, policy training/inference) execute on
worker threads; their traces are append-only buffers the endpoints read.
Every served number is recomputed through the environment/reward modules,
never duplicated here. Single-operator tool: binds to localhost by default.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from .env import TransponderEnv, make_link
from .ppo import PpoConfig, inference, load_checkpoint, save_checkpoint, train
from .profile import EnvProfile, load_profile
from .rewards import METRIC_NAMES, MetricWeights, WeightError, total_reward
from .sa import SaParams, sa_run

RUN_KINDS = ("sa", "random", "ppo-train", "ppo-infer")


class RunCreate(BaseModel):
    kind: str
    config: dict = Field(default_factory=dict)


class WeightsBody(BaseModel):
    overlap: float = 1.0
    on_transponder: float = 1.0
    peb: float = 1.0
    margin: float = 1.0
    bandwidth: float = 1.0
    eirp: float = 1.0
    packed: float = 1.0
    free_resource: float = 1.0
    link_share: float = 0.7
    transponder_share: float = 0.3


class InferBody(BaseModel):
    episodes: int = 10
    seed: int = 0


@dataclass
class RunRecord:
    """One run's lifecycle plus its append-only trace buffer."""

    id: str
    kind: str
    config: dict
    profile: EnvProfile
    status: str = "pending"            # pending -> running -> done | failed
    progress: float = 0.0
    error: str | None = None
    result: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)   # (step, reward, link norms)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def add_row(self, step: int, reward: float, state_norms: list) -> None:
        with self.lock:
            self.rows.append((step, reward, state_norms))

    def snapshot(self, after: int = -1) -> list:
        with self.lock:
            if after < 0:
                return list(self.rows)
            return [r for r in self.rows if r[0] > after]

    def handle(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "status": self.status,
            "progress": round(self.progress, 6),
            "error": self.error,
            "result": self.result,
        }


def _state_norms(state) -> list:
    return [[link.center_freq_norm, link.eirp_norm, link.modfec_index]
            for link in state.links]


def state_view(profile: EnvProfile, norms: list) -> dict:
    """Transponder panel data, recomputed from the owning modules."""
    links = [make_link(profile, *row) for row in norms]
    spec = profile.transponder
    sum_bw = sum(l.bandwidth for l in links)
    sum_eirp = sum(l.eirp for l in links)
    view_links = []
    for link in links:
        floor = profile.min_eirp_table[link.modfec_index]
        view_links.append({
            "freq_lo_hz": link.center_freq - 0.5 * link.bandwidth,
            "freq_hi_hz": link.center_freq + 0.5 * link.bandwidth,
            "eirp_w": link.eirp,
            "min_eirp_w": floor,
            "modfec_index": link.modfec_index,
            "margin_ok": link.eirp >= floor,
        })
    return {
        "links": view_links,
        "transponder": {
            "freq_lo_hz": spec.freq_lo,
            "freq_hi_hz": spec.freq_hi,
            "total_eirp_w": spec.total_eirp,
        },
        "bandwidth_consumption_pct": min(200.0, 100.0 * sum_bw / spec.total_bandwidth),
        "power_consumption_pct": min(200.0, 100.0 * sum_eirp / spec.total_eirp),
    }


class RunManager:
    def __init__(self, runs_dir: Path):
        self.runs: dict[str, RunRecord] = {}
        self._counter = itertools.count()
        self._lock = threading.Lock()
        self.runs_dir = runs_dir

    def create(self, kind: str, config: dict, profile: EnvProfile) -> RunRecord:
        with self._lock:
            run_id = f"run-{next(self._counter):04d}"
            record = RunRecord(id=run_id, kind=kind, config=config, profile=profile)
            self.runs[run_id] = record
        thread = threading.Thread(target=self._execute, args=(record,), daemon=True)
        thread.start()
        return record

    def get(self, run_id: str) -> RunRecord:
        record = self.runs.get(run_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id}")
        return record

    # -- workers --------------------------------------------------------------

    def _execute(self, record: RunRecord) -> None:
        record.status = "running"
        try:
            worker = {
                "sa": self._run_sa,
                "random": self._run_random,
                "ppo-train": self._run_ppo_train,
                "ppo-infer": self._run_ppo_infer,
            }[record.kind]
            worker(record)
            record.progress = 1.0
            record.status = "done"
        except Exception as exc:  # failed runs keep their partial trace
            record.error = f"{type(exc).__name__}: {exc}"
            record.status = "failed"

    def _run_sa(self, record: RunRecord) -> None:
        cfg = record.config
        params = SaParams(
            t_max=float(cfg.get("t_max", 100.0)),
            t_min=float(cfg.get("t_min", 0.0)),
            alpha=float(cfg.get("alpha", 0.95)),
            steps_per_temp=int(cfg.get("steps_per_temp", 100)),
            damping=float(cfg.get("damping", 0.0)),
            max_steps=int(cfg.get("max_steps", 20_000)),
            seed=int(cfg.get("seed", 0)),
        )
        env = TransponderEnv(record.profile, action_space=1)
        record_every = max(1, params.max_steps // int(cfg.get("trace_points", 500)))

        def on_step(step, current, best):
            record.progress = (step + 1) / params.max_steps
            if step % record_every == 0 or step == params.max_steps - 1:
                record.add_row(step, best, _state_norms(env.state))

        result = sa_run(env, params, record_every=record_every, on_step=on_step)
        record.result = {"best_reward": result.best_reward}

    def _run_random(self, record: RunRecord) -> None:
        cfg = record.config
        episodes = int(cfg.get("episodes", 1000))
        seed = int(cfg.get("seed", 0))
        env = TransponderEnv(record.profile, action_space=int(cfg.get("action_space", 1)))
        env.reset(seed=seed)
        finals = []
        steps = 0
        for ep in range(episodes):
            if ep > 0:
                env.reset()
            done = False
            reward = 0.0
            while not done:
                _, reward, done = env.step(env.sample_action())
                steps += 1
            finals.append(reward)
            record.add_row(steps, reward, _state_norms(env.state))
            record.progress = (ep + 1) / episodes
        record.result = {
            "mean_final_reward": float(np.mean(finals)),
            "std_final_reward": float(np.std(finals)),
        }

    def _run_ppo_train(self, record: RunRecord) -> None:
        cfg = record.config
        config = PpoConfig(
            action_space=int(cfg.get("action_space", 1)),
            total_steps=int(cfg.get("total_steps", 20_000)),
            learning_rate=float(cfg.get("learning_rate", 1e-5)),
            seed=int(cfg.get("seed", 0)),
        )
        profile = record.profile

        def on_batch(steps_done, stats, terms):
            record.progress = min(1.0, steps_done / config.total_steps)

        result = train(lambda: TransponderEnv(profile, action_space=config.action_space),
                       config, on_batch=on_batch)
        ev = result.eval_trace
        for i in range(len(ev)):
            record.add_row(int(ev.steps[i]), float(ev.total[i]), None)
        last_eval = float(ev.total[-1]) if len(ev) else None
        ckpt_path = self.runs_dir / f"{record.id}.npz"
        save_checkpoint(ckpt_path, result.net, config, optimizer=result.optimizer,
                        rng_state=result.rng_state)
        record.result = {
            "checkpoint": record.id,
            "final_eval_reward": last_eval,
            "env_steps": result.env_steps,
        }

    def _run_ppo_infer(self, record: RunRecord) -> None:
        cfg = record.config
        checkpoint = cfg.get("checkpoint")
        if not checkpoint:
            raise ValueError("ppo-infer requires a checkpoint id")
        ckpt = load_checkpoint(self.runs_dir / f"{checkpoint}.npz")
        env = TransponderEnv(record.profile, action_space=ckpt.config.action_space)
        episodes = int(cfg.get("episodes", 10))
        result = inference(ckpt.net, env, episodes=episodes,
                           seed=int(cfg.get("seed", 0)))
        for ep, (reward, state) in enumerate(zip(result.finals, result.final_states)):
            record.add_row(ep, float(reward), _state_norms(state))
            record.progress = (ep + 1) / episodes
        record.result = {"mean_final_reward": result.mean, "std_final_reward": result.std}


def create_app(profile_path: str | None = None, runs_dir: str | None = None,
               profile: EnvProfile | None = None,
               console_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="txpopt operator service")
    base_profile = profile if profile is not None else load_profile(profile_path)
    directory = Path(runs_dir) if runs_dir else Path.cwd() / "txpopt_runs"
    directory.mkdir(parents=True, exist_ok=True)
    manager = RunManager(directory)
    state = {"profile": base_profile}

    console = Path(console_dir) if console_dir else _default_console_dir()
    if console is not None and (console / "index.html").exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=console, html=True), name="console")

    @app.get("/profile")
    def get_profile():
        return state["profile"].to_dict()

    @app.get("/weights")
    def get_weights():
        return state["profile"].weights.to_dict()

    @app.put("/weights")
    def put_weights(body: WeightsBody):
        weights = MetricWeights(**body.model_dump())
        try:
            weights.validate()
        except WeightError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        state["profile"] = state["profile"].with_weights(weights)
        return weights.to_dict()

    @app.post("/runs", status_code=201)
    def create_run(body: RunCreate):
        if body.kind not in RUN_KINDS:
            raise HTTPException(status_code=400,
                                detail=f"unknown run kind {body.kind!r}; expected one of {RUN_KINDS}")
        try:
            record = manager.create(body.kind, dict(body.config), state["profile"])
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return record.handle()

    @app.get("/runs")
    def list_runs():
        return [r.handle() for r in manager.runs.values()]

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return manager.get(run_id).handle()

    @app.get("/runs/{run_id}/state")
    def get_run_state(run_id: str, step: int | None = None):
        record = manager.get(run_id)
        rows = record.snapshot()
        rows = [r for r in rows if r[2] is not None]
        if not rows:
            raise HTTPException(status_code=404, detail="no state recorded for this run")
        if step is None:
            row = rows[-1]
        else:
            matches = [r for r in rows if r[0] <= step]
            if not matches or step > rows[-1][0]:
                raise HTTPException(status_code=404,
                                    detail=f"step {step} beyond recorded trace")
            row = matches[-1]
        view = state_view(record.profile, row[2])
        view["step"] = row[0]
        view["reward"] = row[1]
        return view

    @app.get("/runs/{run_id}/events")
    async def stream_events(run_id: str, request: Request, after: int = -1):
        record = manager.get(run_id)

        async def gen():
            last = after
            while True:
                for step, reward, norms in record.snapshot(after=last):
                    last = step
                    payload = {"step": step, "reward": reward}
                    if norms is not None:
                        payload["state"] = state_view(record.profile, norms)
                    yield f"id: {step}\ndata: {json.dumps(payload)}\n\n"
                if record.status in ("done", "failed"):
                    # flush anything appended after the terminal status flipped
                    tail = record.snapshot(after=last)
                    for step, reward, norms in tail:
                        last = step
                        payload = {"step": step, "reward": reward}
                        if norms is not None:
                            payload["state"] = state_view(record.profile, norms)
                        yield f"id: {step}\ndata: {json.dumps(payload)}\n\n"
                    yield f"event: end\ndata: {json.dumps(record.handle())}\n\n"
                    return
                if await request.is_disconnected():
                    return
                await asyncio.sleep(0.02)

        return StreamingResponse(gen(), media_type="text/event-stream")

    @app.post("/checkpoints/{checkpoint_id}/infer")
    def infer_checkpoint(checkpoint_id: str, body: InferBody):
        path = directory / f"{checkpoint_id}.npz"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"unknown checkpoint {checkpoint_id}")
        ckpt = load_checkpoint(path)
        env = TransponderEnv(state["profile"], action_space=ckpt.config.action_space)
        result = inference(ckpt.net, env, episodes=body.episodes, seed=body.seed)
        proposals = []
        for reward, final_state in zip(result.finals, result.final_states):
            proposals.append({
                "reward": float(reward),
                "view": state_view(state["profile"], _state_norms(final_state)),
                "breakdown": _breakdown_dict(final_state),
            })
        return {
            "mean_final_reward": result.mean,
            "std_final_reward": result.std,
            "proposals": proposals,
        }

    app.state.manager = manager
    return app


def _breakdown_dict(state) -> dict:
    bd = total_reward(state)
    return {
        "total": bd.total,
        "metric_means": dict(zip(METRIC_NAMES, bd.metric_means())),
    }


def _default_console_dir() -> Path | None:
    # built console assets, when the frontend sits next to the package checkout
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.exists() else None
