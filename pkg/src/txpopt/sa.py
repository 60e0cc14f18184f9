"""Simulated annealing over full link configurations.

Maximizes the environment reward directly: an improving proposal is always
accepted, a worsening one with probability exp(delta / temperature) under a
geometric cooling schedule. Neighbor moves shrink with temperature, from
broad exploration to local refinement.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .env import NUM_LINKS, FullAction, TransponderEnv, sample_full_action
from .trace import RunTrace, TraceRecorder

# neighbor-move scale at the hot and cold ends of the schedule
SIGMA_MAX = 0.3
SIGMA_MIN = 0.01
RESAMPLE_HOT = 0.1
RESAMPLE_COLD = 0.02
# probability of re-drawing one whole link instead of jittering; escapes
# basins where a MOD-FEC flip is only viable together with a power change
KICK_HOT = 0.08
KICK_COLD = 0.02


@dataclass
class SaParams:
    t_max: float = 100.0
    t_min: float = 0.0
    alpha: float = 0.95
    steps_per_temp: int = 100
    damping: float = 0.0     # optional extra per-step shrink of the move size
    max_steps: int = 50_000
    seed: int = 0

    def validate(self) -> None:
        if not self.t_max > self.t_min >= 0:
            raise ValueError(f"need t_max > t_min >= 0, got {self.t_max}, {self.t_min}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0,1), got {self.alpha}")
        if self.steps_per_temp < 1:
            raise ValueError("steps_per_temp must be >= 1")
        if self.damping < 0:
            raise ValueError("damping must be >= 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class SaResult:
    best_action: FullAction
    best_reward: float
    trace: RunTrace
    # full per-step series for the (step, temp, current, best) CSV
    temps: np.ndarray = field(repr=False, default=None)
    current: np.ndarray = field(repr=False, default=None)
    best_series: np.ndarray = field(repr=False, default=None)

    def annealing_csv(self) -> str:
        buf = io.StringIO()
        buf.write("step,temp,current_reward,best_reward\n")
        for i in range(len(self.current)):
            buf.write(
                f"{i},{format(self.temps[i], '.17g')},"
                f"{format(self.current[i], '.17g')},{format(self.best_series[i], '.17g')}\n"
            )
        return buf.getvalue()


def temperature(step: int, params: SaParams) -> float:
    """Geometric schedule: t_max * alpha^(level), floored at t_min."""
    if step < 0:
        raise ValueError("step must be >= 0")
    level = step // params.steps_per_temp
    return max(params.t_min, params.t_max * params.alpha ** level)


def kick_move(current: FullAction, rng: np.random.Generator) -> FullAction:
    """Re-draw one link uniformly; escapes coupled local optima."""
    out = current.copy()
    i = int(rng.integers(0, NUM_LINKS))
    out.center_freq[i] = rng.random()
    out.eirp[i] = rng.random()
    out.modfec[i] = rng.integers(0, NUM_LINKS)
    return out


def gaussian_move(current: FullAction, sigma: float, resample_p: float,
                  rng: np.random.Generator) -> FullAction:
    """Jitter all continuous components; flip each discrete one with resample_p."""
    cf = np.clip(current.center_freq + rng.normal(0.0, sigma, NUM_LINKS), 0.0, 1.0)
    eirp = np.clip(current.eirp + rng.normal(0.0, sigma, NUM_LINKS), 0.0, 1.0)
    modfec = current.modfec.copy()
    for i in range(NUM_LINKS):
        if rng.random() < resample_p:
            modfec[i] = rng.integers(0, NUM_LINKS)
    return FullAction(center_freq=cf, eirp=eirp, modfec=modfec)


def neighbor(current: FullAction, temp_fraction: float, rng: np.random.Generator,
             step_scale: float = 1.0) -> FullAction:
    """Perturb a configuration; move size interpolates with temp_fraction."""
    kick_p = KICK_HOT * temp_fraction + KICK_COLD
    if rng.random() < kick_p:
        return kick_move(current, rng)
    sigma = (SIGMA_MAX * temp_fraction + SIGMA_MIN * (1.0 - temp_fraction)) * step_scale
    resample_p = RESAMPLE_HOT * temp_fraction + RESAMPLE_COLD
    return gaussian_move(current, sigma, resample_p, rng)


def accept(delta: float, temp: float, u: float) -> bool:
    """Paper acceptance rule; at zero temperature only improvements pass."""
    if delta >= 0.0:
        return True
    if temp <= 0.0:
        return False
    return u < math.exp(delta / temp)


def sa_run(env: TransponderEnv, params: SaParams, record_every: int = 1,
           on_step=None) -> SaResult:
    """Run annealing for exactly ``params.max_steps`` reward evaluations."""
    params.validate()
    if env.action_space != 1:
        raise ValueError("simulated annealing drives the full action space (space 1)")
    rng = np.random.default_rng(params.seed)
    env.reset(seed=params.seed)

    temp_span = params.t_max - params.t_min
    recorder = TraceRecorder({"optimizer": "sa", "seed": params.seed})
    temps = np.empty(params.max_steps)
    current_series = np.empty(params.max_steps)
    best_series = np.empty(params.max_steps)

    current_action = sample_full_action(rng)
    _, current_reward, _ = env.step(current_action)
    metrics = env.last_metric_means()
    best_action = current_action.copy()
    best_reward = current_reward

    for step in range(params.max_steps):
        temp = temperature(step, params)
        if step > 0:
            frac = (temp - params.t_min) / temp_span
            scale = 1.0 / (1.0 + params.damping * step)
            proposal = neighbor(current_action, frac, rng, scale)
            _, reward, _ = env.step(proposal)
            u = rng.random()
            if accept(reward - current_reward, temp, u):
                current_action = proposal
                current_reward = reward
                metrics = env.last_metric_means()
            if reward > best_reward:
                best_reward = reward
                best_action = proposal.copy()
        temps[step] = temp
        current_series[step] = current_reward
        best_series[step] = best_reward
        if step % record_every == 0 or step == params.max_steps - 1:
            recorder.add(step, best_reward, metrics)
        if on_step is not None:
            on_step(step, current_reward, best_reward)

    return SaResult(
        best_action=best_action,
        best_reward=best_reward,
        trace=recorder.build(),
        temps=temps,
        current=current_series,
        best_series=best_series,
    )
