"""Clipped-surrogate policy optimization over the transponder environment.

On-policy loop: collect a fixed-size batch, compute advantages, run several
epochs of shuffled minibatch gradient steps, then discard the batch. Both
action spaces share the loop; an action codec maps sampled head values onto
environment actions.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from ..env import (
    NUM_LINKS,
    OBS_SIZE,
    FullAction,
    SingleParamAction,
    TransponderEnv,
)
from ..trace import RunTrace, TraceRecorder
from . import dist
from .gae import discounted_advantages
from .net import PolicyNet

CHECKPOINT_FORMAT = 1


class TrainingDiverged(RuntimeError):
    """Raised when a loss evaluates non-finite; carries batch statistics."""


@dataclass
class PpoConfig:
    gamma: float = 0.99
    batch_size: int = 2000
    clip_epsilon: float = 0.3
    gae_lambda: float = 1.0
    entropy_coeff: float = 0.0
    sgd_epochs: int = 30
    minibatch_size: int = 128
    learning_rate: float = 1e-5
    total_steps: int = 200_000
    seed: int = 0
    action_space: int = 1
    hidden: tuple[int, int] = (256, 256)
    value_coeff: float = 0.5
    grad_clip: float = 0.5
    init_logstd: float = 0.5
    dtype: str = "float32"

    def validate(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if self.clip_epsilon <= 0:
            raise ValueError("clip_epsilon must be positive")
        if self.minibatch_size > self.batch_size:
            raise ValueError("minibatch_size must not exceed batch_size")
        if self.action_space not in (1, 2):
            raise ValueError("action_space must be 1 or 2")


class ActionCodec:
    """Maps the network's head values onto environment actions."""

    def __init__(self, action_space: int):
        self.action_space = action_space
        if action_space == 1:
            self.n_cont = 2 * NUM_LINKS            # center freq x3, eirp x3
            self.cat_arities = (3, 3, 3)           # modfec per link
        elif action_space == 2:
            self.n_cont = 1                        # new value for cf/eirp edits
            self.cat_arities = (3, 3, 3)           # link, parameter, modfec value
        else:
            raise ValueError(f"unknown action space {action_space}")

    def to_env_action(self, cont: np.ndarray, cats: np.ndarray):
        if self.action_space == 1:
            return FullAction(
                center_freq=np.asarray(cont[:NUM_LINKS], dtype=np.float64),
                eirp=np.asarray(cont[NUM_LINKS:], dtype=np.float64),
                modfec=np.asarray(cats, dtype=np.int64),
            )
        return SingleParamAction(
            link=int(cats[0]),
            param=int(cats[1]),
            continuous=float(cont[0]),
            discrete=int(cats[2]),
        )


@dataclass
class RolloutBatch:
    """On-policy transitions plus everything the update needs."""

    obs: np.ndarray          # (n, obs) net dtype
    presquash: np.ndarray    # (n, n_cont) float64, pre-sigmoid samples
    cat_actions: np.ndarray  # (n, n_cat) int
    squash_corr: np.ndarray  # (n,) float64, change-of-variables term
    logp_old: np.ndarray     # (n,) float64
    values: np.ndarray       # (n,) float64
    rewards: np.ndarray      # (n,) float64
    dones: np.ndarray        # (n,) bool
    version: int             # net.version that generated the batch
    last_value: float
    advantages: np.ndarray | None = None
    returns: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.rewards)


def head_logp(net: PolicyNet, out: np.ndarray, presquash: np.ndarray,
              cat_actions: np.ndarray, squash_corr: np.ndarray):
    """Joint log-probability of stored actions under the current outputs.

    Returns (logp, parts) where parts carries the intermediate arrays the
    gradient assembly reuses.
    """
    means, logstd_raw, logits, value = net.split_heads(out)
    means = means.astype(np.float64)
    logstd = dist.clamp_logstd(logstd_raw.astype(np.float64))
    logp = dist.gaussian_logpdf(presquash, means, logstd) + squash_corr
    probs = []
    for k, lg in enumerate(logits):
        lsm = dist.log_softmax(lg.astype(np.float64))
        logp = logp + np.take_along_axis(lsm, cat_actions[:, k:k + 1], axis=1)[:, 0]
        probs.append(np.exp(lsm))
    parts = {
        "means": means,
        "logstd": logstd,
        "logstd_raw": logstd_raw.astype(np.float64),
        "probs": probs,
        "value": value.astype(np.float64),
    }
    return logp, parts


def ppo_loss(net: PolicyNet, batch: RolloutBatch, idx: np.ndarray,
             config: PpoConfig, want_grads: bool = True):
    """Clipped-surrogate loss (+ value and entropy terms) and its gradients.

    Loss math runs in float64; gradients flow back through the network in its
    parameter dtype.
    """
    obs = batch.obs[idx]
    presquash = batch.presquash[idx]
    cat_actions = batch.cat_actions[idx]
    corr = batch.squash_corr[idx]
    logp_old = batch.logp_old[idx]
    adv = batch.advantages[idx]
    ret = batch.returns[idx]
    n = len(idx)

    out, cache = net.forward(obs)
    logp_new, parts = head_logp(net, out, presquash, cat_actions, corr)

    with np.errstate(over="ignore"):  # overflow lands in the non-finite guard
        ratio = np.exp(logp_new - logp_old)
    clipped = np.clip(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon)
    surr1 = ratio * adv
    surr2 = clipped * adv
    policy_loss = -np.minimum(surr1, surr2).mean()

    value = parts["value"]
    verr = value - ret
    value_loss = np.mean(verr * verr)

    logstd = parts["logstd"]
    entropy = (logstd + 0.5 * (dist.LOG_2PI + 1.0)).sum(axis=-1)
    for p in parts["probs"]:
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0.0, p * np.log(p), 0.0)
        entropy = entropy - plogp.sum(axis=-1)
    entropy_mean = entropy.mean()

    loss = policy_loss + config.value_coeff * value_loss - config.entropy_coeff * entropy_mean
    if not np.isfinite(loss):
        raise TrainingDiverged(
            f"non-finite loss: policy={policy_loss}, value={value_loss}, "
            f"ratio range [{ratio.min()}, {ratio.max()}], "
            f"adv range [{adv.min()}, {adv.max()}]"
        )
    terms = {
        "loss": float(loss),
        "policy_loss": float(policy_loss),
        "value_loss": float(value_loss),
        "entropy": float(entropy_mean),
    }
    if not want_grads:
        return terms, None

    # d(loss)/d(logp): the unclipped branch carries gradient; on the clip
    # boundary both branches coincide
    use_unclipped = surr1 <= surr2
    dlogp = np.where(use_unclipped, -adv * ratio, 0.0) / n

    dout = np.zeros_like(out, dtype=np.float64)
    means = parts["means"]
    std = np.exp(logstd)
    t = (presquash - means) / std
    dout[:, net.mean_slice] = dlogp[:, None] * (t / std)
    dlogstd = dlogp[:, None] * (t * t - 1.0)
    if config.entropy_coeff != 0.0:
        dlogstd = dlogstd - config.entropy_coeff / n
    # clamp: no gradient outside the active range
    raw = parts["logstd_raw"]
    inside = (raw > dist.LOGSTD_MIN) & (raw < dist.LOGSTD_MAX)
    dout[:, net.logstd_slice] = np.where(inside, dlogstd, 0.0)

    for k, s in enumerate(net.cat_slices):
        p = parts["probs"][k]
        onehot = np.zeros_like(p)
        onehot[np.arange(n), cat_actions[:, k]] = 1.0
        dlogits = dlogp[:, None] * (onehot - p)
        if config.entropy_coeff != 0.0:
            lp = np.log(np.maximum(p, 1e-300))
            h = -(p * lp).sum(axis=-1, keepdims=True)
            dlogits = dlogits + (config.entropy_coeff / n) * p * (lp + h)
        dout[:, s] = dlogits

    dout[:, net.value_index] = config.value_coeff * 2.0 * verr / n

    grads = net.backward(cache, dout)
    return terms, grads


class Adam:
    def __init__(self, params: dict, lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v, dtype=np.float64) for k, v in params.items()}
        self.v = {k: np.zeros_like(v, dtype=np.float64) for k, v in params.items()}

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for k, g in grads.items():
            g = g.astype(np.float64)
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * (g * g)
            update = self.lr * (self.m[k] / b1c) / (np.sqrt(self.v[k] / b2c) + self.eps)
            params[k] -= update.astype(params[k].dtype)

    def state(self) -> dict:
        return {"t": self.t, "m": self.m, "v": self.v}

    def load_state(self, state: dict) -> None:
        self.t = int(state["t"])
        self.m = {k: np.array(v, dtype=np.float64) for k, v in state["m"].items()}
        self.v = {k: np.array(v, dtype=np.float64) for k, v in state["v"].items()}


def clip_grad_norm(grads: dict, max_norm: float) -> float:
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g.astype(np.float64) ** 2))
    norm = float(np.sqrt(total))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for k in grads:
            grads[k] = grads[k] * scale
    return norm


def sample_step(net: PolicyNet, codec: ActionCodec, obs: np.ndarray,
                rng: np.random.Generator):
    """Sample one composite action; returns everything the batch stores."""
    out, _ = net.forward(obs[None, :])
    means, logstd_raw, logits, value = net.split_heads(out)
    means = means[0].astype(np.float64)
    logstd = dist.clamp_logstd(logstd_raw[0].astype(np.float64))
    std = np.exp(logstd)
    eps = rng.standard_normal(codec.n_cont)
    z = means + std * eps
    a_cont = dist.sigmoid(z)
    corr = float(dist.squash_correction(z))
    logp = float(dist.gaussian_logpdf(z, means, logstd)) + corr
    cats = np.empty(len(codec.cat_arities), dtype=np.int64)
    for k, lg in enumerate(logits):
        lsm = dist.log_softmax(lg[0].astype(np.float64))
        u = rng.random()
        cats[k] = int(dist.categorical_sample(lsm[None, :], np.array([u]))[0])
        logp += float(lsm[cats[k]])
    return z, a_cont, cats, corr, logp, float(value[0])


def mode_action(net: PolicyNet, codec: ActionCodec, obs: np.ndarray):
    """Deterministic action: squashed mean and argmax logits."""
    out, _ = net.forward(obs[None, :])
    means, _, logits, _ = net.split_heads(out)
    cont = dist.sigmoid(means[0].astype(np.float64))
    cats = np.array([int(np.argmax(lg[0])) for lg in logits], dtype=np.int64)
    return codec.to_env_action(cont, cats)


def collect_batch(env: TransponderEnv, net: PolicyNet, codec: ActionCodec,
                  rng: np.random.Generator, config: PpoConfig,
                  obs: np.ndarray):
    """Gather ``batch_size`` on-policy transitions; env persists across calls."""
    n = config.batch_size
    version = net.version
    batch = RolloutBatch(
        obs=np.empty((n, OBS_SIZE), dtype=net.dtype),
        presquash=np.empty((n, codec.n_cont), dtype=np.float64),
        cat_actions=np.empty((n, len(codec.cat_arities)), dtype=np.int64),
        squash_corr=np.empty(n, dtype=np.float64),
        logp_old=np.empty(n, dtype=np.float64),
        values=np.empty(n, dtype=np.float64),
        rewards=np.empty(n, dtype=np.float64),
        dones=np.empty(n, dtype=bool),
        version=version,
        last_value=0.0,
    )
    metric_sums = np.zeros(8, dtype=np.float64)
    final_rewards = []
    for i in range(n):
        z, a_cont, cats, corr, logp, value = sample_step(net, codec, obs, rng)
        action = codec.to_env_action(a_cont, cats)
        next_obs, reward, done = env.step(action)
        batch.obs[i] = obs.astype(net.dtype)
        batch.presquash[i] = z
        batch.cat_actions[i] = cats
        batch.squash_corr[i] = corr
        batch.logp_old[i] = logp
        batch.values[i] = value
        batch.rewards[i] = reward
        batch.dones[i] = done
        metric_sums += env.last_metric_means()
        if done:
            final_rewards.append(reward)
            obs = env.reset()
        else:
            obs = next_obs
    if not batch.dones[-1]:
        out, _ = net.forward(obs[None, :])
        batch.last_value = float(out[0, net.value_index])
    if net.version != version:
        raise RuntimeError("network updated while a rollout was in flight")
    stats = {
        "mean_step_reward": float(batch.rewards.mean()),
        "mean_final_reward": float(np.mean(final_rewards)) if final_rewards else float("nan"),
        "metric_means": tuple(metric_sums / n),
    }
    return batch, obs, stats


def update(net: PolicyNet, optimizer: Adam, batch: RolloutBatch,
           config: PpoConfig, rng: np.random.Generator) -> dict:
    """One PPO update phase over a collected batch."""
    if batch.version != net.version:
        raise RuntimeError(
            f"off-policy batch: collected at version {batch.version}, "
            f"net is at {net.version}"
        )
    adv, ret = discounted_advantages(
        batch.rewards, batch.values, batch.dones,
        config.gamma, config.gae_lambda, batch.last_value,
    )
    # per-batch normalization keeps the surrogate scale stable at zero entropy bonus
    mean = adv.mean()
    std = adv.std()
    batch.advantages = (adv - mean) / (std + 1e-8)
    batch.returns = ret

    n = len(batch)
    last_terms: dict = {}
    for _ in range(config.sgd_epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.minibatch_size):
            idx = order[start:start + config.minibatch_size]
            terms, grads = ppo_loss(net, batch, idx, config)
            clip_grad_norm(grads, config.grad_clip)
            optimizer.step(net.params, grads)
            net.version += 1
            last_terms = terms
    return last_terms


@dataclass
class TrainResult:
    net: PolicyNet
    trace: RunTrace             # sampled-rollout means per batch
    eval_trace: RunTrace        # deterministic-policy evaluation per batch
    config: PpoConfig
    final_obs: np.ndarray = field(repr=False, default=None)
    env_steps: int = 0
    rng_state: dict = field(default_factory=dict, repr=False)
    optimizer: "Adam" = field(default=None, repr=False)


def evaluate_mode(net: PolicyNet, codec: ActionCodec, env: TransponderEnv,
                  episodes: int, seed: int):
    """Short deterministic evaluation; returns (mean final reward, metric means)."""
    env.reset(seed=seed)
    finals = np.empty(episodes)
    metric_sums = np.zeros(8)
    for ep in range(episodes):
        obs = env.reset() if ep > 0 else env.observe()
        done = False
        reward = 0.0
        while not done:
            obs, reward, done = env.step(mode_action(net, codec, obs))
        finals[ep] = reward
        metric_sums += env.last_metric_means()
    return float(finals.mean()), tuple(metric_sums / episodes)


EVAL_EPISODES = 3
EVAL_SEED = 977


def train(env_factory, config: PpoConfig, on_batch=None) -> TrainResult:
    """Run the full training loop; fully deterministic under config.seed."""
    config.validate()
    seeds = np.random.SeedSequence(config.seed).spawn(3)
    net_seed = int(seeds[0].generate_state(1)[0])
    env_seed = int(seeds[1].generate_state(1)[0])
    rng = np.random.default_rng(seeds[2])

    codec = ActionCodec(config.action_space)
    net = PolicyNet(
        obs_size=OBS_SIZE,
        n_cont=codec.n_cont,
        cat_arities=codec.cat_arities,
        hidden=config.hidden,
        dtype=np.dtype(config.dtype),
        seed=net_seed,
        init_logstd=config.init_logstd,
    )
    optimizer = Adam(net.params, lr=config.learning_rate)

    env = env_factory()
    if env.action_space != config.action_space:
        raise ValueError("environment action space disagrees with config")
    obs = env.reset(seed=env_seed)

    meta = {
        "optimizer": "ppo",
        "seed": config.seed,
        "action_space": config.action_space,
        "learning_rate": config.learning_rate,
    }
    recorder = TraceRecorder(meta)
    eval_recorder = TraceRecorder(meta | {"series": "mode_eval"})
    eval_env = env_factory()
    steps_done = 0
    while steps_done < config.total_steps:
        batch, obs, stats = collect_batch(env, net, codec, rng, config, obs)
        steps_done += len(batch)
        terms = update(net, optimizer, batch, config, rng)
        recorder.add(steps_done, stats["mean_step_reward"], stats["metric_means"])
        eval_reward, eval_metrics = evaluate_mode(net, codec, eval_env,
                                                  EVAL_EPISODES, EVAL_SEED)
        eval_recorder.add(steps_done, eval_reward, eval_metrics)
        if on_batch is not None:
            on_batch(steps_done, stats, terms)
    return TrainResult(net=net, trace=recorder.build(),
                       eval_trace=eval_recorder.build(), config=config,
                       final_obs=obs, env_steps=steps_done,
                       rng_state=rng.bit_generator.state, optimizer=optimizer)


@dataclass
class InferenceResult:
    mean: float
    std: float
    finals: np.ndarray
    final_states: list


def inference(net: PolicyNet, env: TransponderEnv, episodes: int,
              seed: int | None = None) -> InferenceResult:
    """Apply the policy deterministically; no updates happen here."""
    codec = ActionCodec(env.action_space)
    obs = env.reset(seed=seed)
    finals = np.empty(episodes, dtype=np.float64)
    final_states = []
    for ep in range(episodes):
        if ep > 0:
            obs = env.reset()
        done = False
        reward = 0.0
        while not done:
            action = mode_action(net, codec, obs)
            obs, reward, done = env.step(action)
        finals[ep] = reward
        final_states.append(env.state)
    return InferenceResult(
        mean=float(finals.mean()),
        std=float(finals.std()),
        finals=finals,
        final_states=final_states,
    )


# -- checkpointing -----------------------------------------------------------

def save_checkpoint(path, net: PolicyNet, config: PpoConfig,
                    optimizer: Adam | None = None, rng_state: dict | None = None,
                    extra: dict | None = None) -> None:
    """Versioned npz dump of parameters, config and RNG state.

    Loading restores every array bit-exactly.
    """
    arrays = {f"param_{k}": v for k, v in net.params.items()}
    if optimizer is not None:
        arrays.update({f"adam_m_{k}": v for k, v in optimizer.m.items()})
        arrays.update({f"adam_v_{k}": v for k, v in optimizer.v.items()})
        arrays["adam_t"] = np.array(optimizer.t, dtype=np.int64)
    header = {
        "format": CHECKPOINT_FORMAT,
        "net": net.spec(),
        "net_version": net.version,
        "config": asdict(config),
        "rng_state": _jsonable(rng_state) if rng_state else None,
        "extra": extra or {},
    }
    arrays["header"] = np.frombuffer(json.dumps(header).encode("utf-8"), dtype=np.uint8)
    np.savez(path, **arrays)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


@dataclass
class Checkpoint:
    net: PolicyNet
    config: PpoConfig
    rng_state: dict | None
    adam_state: dict | None
    extra: dict


def load_checkpoint(path) -> Checkpoint:
    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode("utf-8"))
        if header["format"] != CHECKPOINT_FORMAT:
            raise ValueError(f"unsupported checkpoint format {header['format']}")
        cfg_dict = dict(header["config"])
        cfg_dict["hidden"] = tuple(cfg_dict["hidden"])
        config = PpoConfig(**cfg_dict)
        net = PolicyNet.from_spec(header["net"])
        net.load_params({k[len("param_"):]: data[k] for k in data.files
                         if k.startswith("param_")})
        net.version = int(header["net_version"])
        adam_state = None
        if "adam_t" in data.files:
            adam_state = {
                "t": int(data["adam_t"]),
                "m": {k[len("adam_m_"):]: data[k] for k in data.files
                      if k.startswith("adam_m_")},
                "v": {k[len("adam_v_"):]: data[k] for k in data.files
                      if k.startswith("adam_v_")},
            }
        return Checkpoint(net=net, config=config, rng_state=header.get("rng_state"),
                          adam_state=adam_state, extra=header["extra"])
