"""Experiment orchestration: multi-seed comparisons, grid search, smoothing.

Mirrors the two reference experiments: a full-reconfiguration environment
with 10-step episodes (seeds 0-4) and a single-edit environment with
100-step episodes (seeds 0-2). Every run is seeded; rerunning a spec writes
byte-identical CSV files.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .env import TransponderEnv
from .ppo import PpoConfig, inference, save_checkpoint, train
from .profile import EnvProfile, default_profile
from .rewards import METRIC_NAMES
from .sa import SaParams, sa_run
from .trace import RunTrace, TraceRecorder

OPTIMIZERS = ("ppo", "sa", "random")


@dataclass
class ExperimentSpec:
    action_space: int = 1
    total_steps: int = 200_000
    sa_steps: int = 50_000
    random_episodes: int = 1000
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    optimizers: tuple[str, ...] = OPTIMIZERS
    learning_rate: float = 1e-5
    inference_episodes: int = 50
    inference_seed: int = 10_000
    workers: int = 1

    def validate(self) -> None:
        if self.action_space not in (1, 2):
            raise ValueError("action_space must be 1 or 2")
        for opt in self.optimizers:
            if opt not in OPTIMIZERS:
                raise ValueError(f"unknown optimizer {opt!r}")

    @classmethod
    def experiment1(cls, **overrides) -> "ExperimentSpec":
        return replace(cls(action_space=1, seeds=(0, 1, 2, 3, 4)), **overrides)

    @classmethod
    def experiment2(cls, **overrides) -> "ExperimentSpec":
        return replace(cls(action_space=2, seeds=(0, 1, 2)), **overrides)


@dataclass
class RunOutcome:
    optimizer: str
    seed: int
    final_reward: float
    trace: RunTrace
    checkpoint_path: str | None = None


@dataclass
class ComparisonResult:
    spec: ExperimentSpec
    outcomes: list[RunOutcome]
    rows: list[dict] = field(default_factory=list)

    def table_csv(self) -> str:
        lines = ["algorithm,environment,reward_mean,reward_std"]
        for row in self.rows:
            lines.append(
                f"{row['algorithm']},{row['environment']},"
                f"{format(row['reward_mean'], '.17g')},{format(row['reward_std'], '.17g')}"
            )
        return "\n".join(lines) + "\n"

    def write(self, outdir: str | Path) -> list[Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        summary = outdir / "summary.csv"
        summary.write_text(self.table_csv(), encoding="utf-8")
        written.append(summary)
        for oc in self.outcomes:
            path = outdir / f"trace_{oc.optimizer}_seed{oc.seed}.csv"
            oc.trace.write_csv(path)
            written.append(path)
        return written


def smooth(series, window: int):
    """Trailing moving average, same length as the input; window=1 is identity."""
    if window < 1:
        raise ValueError("window must be >= 1")
    series = np.asarray(series, dtype=np.float64)
    if window == 1 or len(series) == 0:
        return series.copy()
    out = np.empty_like(series)
    csum = np.cumsum(series)
    for i in range(len(series)):
        lo = max(0, i - window + 1)
        total = csum[i] - (csum[lo - 1] if lo > 0 else 0.0)
        out[i] = total / (i - lo + 1)
    return out


def environment_label(action_space: int) -> str:
    return f"transponder-space{action_space}"


def run_random(profile: EnvProfile, seed: int, episodes: int,
               action_space: int = 1) -> RunOutcome:
    """Uniform-random policy; the trace records each episode's final step."""
    env = TransponderEnv(profile, action_space=action_space)
    env.reset(seed=seed)
    recorder = TraceRecorder({"optimizer": "random", "seed": seed})
    finals = np.empty(episodes, dtype=np.float64)
    steps = 0
    for ep in range(episodes):
        if ep > 0:
            env.reset()
        done = False
        reward = 0.0
        while not done:
            _, reward, done = env.step(env.sample_action())
            steps += 1
        finals[ep] = reward
        recorder.add(steps, reward, env.last_metric_means())
    return RunOutcome("random", seed, float(finals.mean()), recorder.build())


def run_sa(profile: EnvProfile, seed: int, max_steps: int,
           record_every: int = 100) -> RunOutcome:
    env = TransponderEnv(profile, action_space=1)
    params = SaParams(max_steps=max_steps, seed=seed)
    result = sa_run(env, params, record_every=record_every)
    return RunOutcome("sa", seed, result.best_reward, result.trace)


def run_ppo(profile: EnvProfile, seed: int, spec: ExperimentSpec,
            checkpoint_dir: str | Path | None = None) -> RunOutcome:
    config = PpoConfig(
        action_space=spec.action_space,
        total_steps=spec.total_steps,
        learning_rate=spec.learning_rate,
        seed=seed,
    )
    result = train(lambda: TransponderEnv(profile, action_space=spec.action_space), config)
    env = TransponderEnv(profile, action_space=spec.action_space)
    inf = inference(result.net, env, episodes=spec.inference_episodes,
                    seed=spec.inference_seed + seed)
    ckpt_path = None
    if checkpoint_dir is not None:
        ckpt_dir = Path(checkpoint_dir)
        ckpt_dir.mkdir(parents=True, exist_ok=True)
        ckpt_path = str(ckpt_dir / f"ppo_space{spec.action_space}_seed{seed}.npz")
        save_checkpoint(ckpt_path, result.net, config, optimizer=result.optimizer,
                        rng_state=result.rng_state,
                        extra={"inference_mean": inf.mean, "inference_std": inf.std})
    return RunOutcome("ppo", seed, inf.mean, result.trace, checkpoint_path=ckpt_path)


def _run_one(args) -> RunOutcome:
    profile_dict, optimizer, seed, spec, checkpoint_dir = args
    profile = EnvProfile.from_dict(profile_dict)
    if optimizer == "random":
        return run_random(profile, seed, spec.random_episodes, spec.action_space)
    if optimizer == "sa":
        return run_sa(profile, seed, spec.sa_steps)
    return run_ppo(profile, seed, spec, checkpoint_dir)


def run_comparison(spec: ExperimentSpec, profile: EnvProfile | None = None,
                   checkpoint_dir: str | Path | None = None) -> ComparisonResult:
    """Run every optimizer x seed cell and aggregate mean +- std per optimizer."""
    spec.validate()
    profile = profile if profile is not None else default_profile()
    ckpt = str(checkpoint_dir) if checkpoint_dir is not None else None
    jobs = [(profile.to_dict(), opt, seed, spec, ckpt)
            for opt in spec.optimizers for seed in spec.seeds]
    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcomes = list(pool.map(_run_one, jobs))
    else:
        outcomes = [_run_one(job) for job in jobs]

    rows = []
    env_label = environment_label(spec.action_space)
    for opt in spec.optimizers:
        finals = np.array([oc.final_reward for oc in outcomes if oc.optimizer == opt])
        rows.append({
            "algorithm": opt,
            "environment": env_label,
            "reward_mean": float(finals.mean()),
            "reward_std": float(finals.std()),
        })
    return ComparisonResult(spec=spec, outcomes=outcomes, rows=rows)


@dataclass
class GridSearchResult:
    rows: list[dict]
    winner_rate: float

    def table_csv(self) -> str:
        lines = ["learning_rate,reward_mean,reward_std"]
        for row in self.rows:
            lines.append(
                f"{format(row['learning_rate'], '.17g')},"
                f"{format(row['reward_mean'], '.17g')},{format(row['reward_std'], '.17g')}"
            )
        return "\n".join(lines) + "\n"


def grid_search(learning_rates, seeds, spec: ExperimentSpec,
                profile: EnvProfile | None = None) -> GridSearchResult:
    """Train one policy per (rate, seed); the winner maximizes the mean final
    reward, ties broken toward the smaller rate."""
    if not learning_rates:
        raise ValueError("need at least one learning rate")
    if not seeds:
        raise ValueError("need at least one seed")
    profile = profile if profile is not None else default_profile()
    rows = []
    for rate in learning_rates:
        finals = []
        for seed in seeds:
            run_spec = replace(spec, learning_rate=rate, seeds=(seed,))
            outcome = run_ppo(profile, seed, run_spec)
            finals.append(outcome.final_reward)
        finals = np.array(finals)
        rows.append({
            "learning_rate": float(rate),
            "reward_mean": float(finals.mean()),
            "reward_std": float(finals.std()),
        })
    best_mean = max(row["reward_mean"] for row in rows)
    winner = min(row["learning_rate"] for row in rows if row["reward_mean"] == best_mean)
    return GridSearchResult(rows=rows, winner_rate=winner)


def attainable_metric_maxima(profile: EnvProfile) -> dict:
    """Per-metric maxima over all states, used by the learning-order checks.

    Free resource is capped by the narrowest possible link staying on the
    transponder; every other metric can reach 1.
    """
    min_bw = min(profile.bandwidth_table)
    frr_max = (profile.transponder.total_bandwidth - min_bw) / profile.transponder.total_bandwidth
    maxima = {name: 1.0 for name in METRIC_NAMES}
    maxima["free_resource"] = frr_max
    return maxima


def crossing_step(trace: RunTrace, metric: str, threshold: float,
                  window: int = 5) -> int | None:
    """First trace step whose smoothed metric mean reaches the threshold."""
    values = smooth(trace.metric(metric), window)
    hits = np.nonzero(values >= threshold)[0]
    if len(hits) == 0:
        return None
    return int(trace.steps[hits[0]])


def spec_digest(spec: ExperimentSpec, profile: EnvProfile) -> str:
    blob = json.dumps({"spec": spec.__dict__, "profile": profile.to_dict()},
                      sort_keys=True, default=list)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]
