"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The deterministic-policy training runs behind the learning criteria are
shared through session fixtures; everything is seeded, so the whole module
is reproducible run to run.
"""

import math
import time
from dataclasses import dataclass

import numpy as np
import pytest

from txpopt import _fallback, rewards
from txpopt.core import compute_bandwidth
from txpopt.env import TransponderEnv
from txpopt.harness import (
    ExperimentSpec,
    attainable_metric_maxima,
    crossing_step,
    run_comparison,
    smooth,
)
from txpopt.ppo import PpoConfig, inference, train
from txpopt.ppo.net import PolicyNet
from txpopt.ppo.trainer import ActionCodec, RolloutBatch, head_logp, ppo_loss
from txpopt.profile import LinkDemand, ModFec
from txpopt.rewards import MetricWeights, combine
from txpopt.sa import SaParams, sa_run

DESK_SEEDS = (0, 1, 2)
DESK_STEPS = 200_000
DESK_LR = 1e-5

FIRST_GROUP = ("eirp", "on_transponder", "overlap", "bandwidth")
SECOND_GROUP = ("margin", "packed", "free_resource")


def report(name: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")


@dataclass
class DeskRun:
    seed: int
    action_space: int
    inference_mean: float
    inference_std: float
    train_trace: RunTrace
    eval_trace: RunTrace


@pytest.fixture(scope="session")
def random_baseline(profile):
    """5 seeds x 1000 episodes of uniform-random actions (space 1)."""
    t0 = time.time()
    finals = []
    for seed in range(5):
        env = TransponderEnv(profile, action_space=1)
        env.reset(seed=seed)
        for ep in range(1000):
            if ep > 0:
                env.reset()
            done = False
            reward = 0.0
            while not done:
                _, reward, done = env.step(env.sample_action())
            finals.append(reward)
    finals = np.array(finals)
    return {"mean": float(finals.mean()), "std": float(finals.std()),
            "elapsed": time.time() - t0}


def desk_run(profile, seed: int, action_space: int) -> DeskRun:
    config = PpoConfig(action_space=action_space, total_steps=DESK_STEPS,
                       learning_rate=DESK_LR, seed=seed)
    result = train(lambda: TransponderEnv(profile, action_space=action_space), config)
    env = TransponderEnv(profile, action_space=action_space)
    inf = inference(result.net, env, episodes=50, seed=10_000 + seed)
    return DeskRun(seed, action_space, inf.mean, inf.std,
                   result.trace, result.eval_trace)


@pytest.fixture(scope="session")
def desk_space1(profile):
    return [desk_run(profile, seed, 1) for seed in DESK_SEEDS]


@pytest.fixture(scope="session")
def desk_space2(profile):
    return [desk_run(profile, seed, 2) for seed in DESK_SEEDS]


class TestRewardMathProperties:
    def test_property_suite_10k_states(self, profile):
        t0 = time.time()
        env = TransponderEnv(profile, action_space=1)
        env.reset(seed=0)
        rng = np.random.default_rng(0)
        base_weights = MetricWeights()
        checked = 0
        ok = True
        for _ in range(10_000):
            env.step(env.sample_action())
            raw = env.last_raw
            total = combine(raw, base_weights)
            # range
            ok &= 0.0 <= total <= 1.0
            # group scaling invariance
            c = float(rng.uniform(0.2, 5.0))
            scaled = MetricWeights(overlap=c, on_transponder=c, peb=c, margin=c)
            ok &= abs(combine(raw, scaled) - total) <= 1e-12
            # monotonicity under one indicator flip
            i = int(rng.integers(0, 16))
            if raw[i] < 1.0:
                bumped = list(raw)
                bumped[i] = 1.0
                ok &= combine(tuple(bumped), base_weights) >= total - 1e-15
            # decomposition
            breakdown = rewards.total_reward(env.state)
            ok &= abs(breakdown.partial_sum() - breakdown.total) <= 1e-12
            checked += 1
            if not ok:
                break
        elapsed = time.time() - t0
        ok = ok and checked == 10_000 and elapsed < 10.0
        report("reward-math", ok, f"{checked} states, {elapsed:.1f}s")
        assert ok

    def test_extremes(self):
        w = MetricWeights()
        ok = (abs(combine(tuple([1.0] * 16), w) - 1.0) <= 1e-12
              and combine(tuple([0.0] * 16), w) == 0.0)
        report("reward-extremes", ok, "all-ones=1, all-zeros=0")
        assert ok


class TestBandwidthOracle:
    def test_1000_triples_within_1_ulp(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(1000):
            data_rate = float(rng.uniform(0.0, 5e7))
            fec = float(rng.uniform(0.1, 1.0))
            mod = float(rng.uniform(0.5, 8.0))
            demand = LinkDemand(data_rate=data_rate)
            modfec = ModFec(mod=mod, fec=fec, min_eirp_per_rate=1.0)
            got = compute_bandwidth(demand, modfec)
            # the three defining equations, evaluated independently
            transmission = data_rate * 1.0 * 1.0 * fec
            symbol = transmission * mod
            want = symbol * (1.0 + 1.0 + 1.0)
            err_ulp = abs(got - want) / math.ulp(max(want, 1e-300))
            worst = max(worst, err_ulp)
        ok = worst <= 1.0
        report("bandwidth-oracle", ok, f"worst error {worst:.2f} ulp over 1000 triples")
        assert ok


class TestRandomBaseline:
    def test_mean_in_reference_band(self, random_baseline):
        mean = random_baseline["mean"]
        elapsed = random_baseline["elapsed"]
        ok = 0.45 <= mean <= 0.55 and elapsed < 60.0
        report("random-baseline", ok,
               f"mean {mean:.4f} +- {random_baseline['std']:.4f}, {elapsed:.1f}s")
        assert ok


class TestSaConvergence:
    def test_mean_best_over_five_seeds(self, profile, random_baseline):
        t0 = time.time()
        bests = []
        for seed in range(5):
            env = TransponderEnv(profile, action_space=1)
            result = sa_run(env, SaParams(max_steps=50_000, seed=seed),
                            record_every=1000)
            bests.append(result.best_reward)
        elapsed = time.time() - t0
        mean_best = float(np.mean(bests))
        floor = random_baseline["mean"] + 0.40
        ok = mean_best >= 0.95 and mean_best >= floor and elapsed < 120.0
        report("sa-convergence", ok,
               f"mean best {mean_best:.4f} (floor {floor:.4f}), {elapsed:.1f}s")
        assert ok


@pytest.mark.slow
class TestPpoLearning:
    def test_desk_scale_beats_random(self, desk_space1, random_baseline):
        means = [run.inference_mean for run in desk_space1]
        final_mean = float(np.mean(means))
        threshold = random_baseline["mean"] + 0.15
        curves_ok = True
        for run in desk_space1:
            smoothed = smooth(run.train_trace.total, 10)
            decile = max(1, len(smoothed) // 10)
            curves_ok &= smoothed[-decile:].mean() > smoothed[:decile].mean()
        ok = final_mean >= threshold and curves_ok
        report("ppo-learning", ok,
               f"inference mean {final_mean:.4f} vs threshold {threshold:.4f}; "
               f"rising curve: {curves_ok}")
        assert ok


@pytest.mark.slow
class TestSpaceOrdering:
    def test_space1_above_space2(self, desk_space1, desk_space2):
        s1 = np.array([run.inference_mean for run in desk_space1])
        s2 = np.array([run.inference_mean for run in desk_space2])
        ok = s1.mean() > s2.mean()
        # paper saw a wider spread for the single-edit space; at desk scale the
        # comparison is informative only, reported but not gated
        std_note = f"std s1 {s1.std():.4f} vs s2 {s2.std():.4f} (soft check, not gated)"
        report("space-ordering", ok,
               f"space1 {s1.mean():.4f} > space2 {s2.mean():.4f}; {std_note}")
        assert ok


@pytest.mark.slow
class TestMetricSignature:
    def test_first_group_learned_before_second(self, profile, desk_space1):
        # deterministic-evaluation curves, checked per seed: every run must
        # learn the budget/placement group before margin, packing and free
        # resource (pooling seeds would blur the crossings, since each seed
        # locks in a disjoint placement at its own time)
        maxima = attainable_metric_maxima(profile)
        ok = True
        crossings_per_seed = {}
        for run in desk_space1:
            crossings = {name: crossing_step(run.eval_trace, name, 0.9 * maxima[name])
                         for name in rewards.METRIC_NAMES}
            crossings_per_seed[run.seed] = crossings
            first = [crossings[n] for n in FIRST_GROUP]
            second = [crossings[n] for n in SECOND_GROUP]
            ok &= all(c is not None for c in first) and all(
                s is None or all(f < s for f in first) for s in second)
        report("metric-signature", ok, f"crossings per seed {crossings_per_seed}")
        assert ok


class TestPpoNumerics:
    def test_gradient_check_and_oracles(self):
        # finite differences on a float64 toy net
        codec = ActionCodec(1)
        net = PolicyNet(obs_size=4, n_cont=codec.n_cont, cat_arities=codec.cat_arities,
                        hidden=(8, 8), dtype=np.float64, seed=3)
        rng = np.random.default_rng(0)
        n = 12
        batch = RolloutBatch(
            obs=rng.normal(size=(n, 4)),
            presquash=rng.normal(size=(n, codec.n_cont)),
            cat_actions=rng.integers(0, 3, size=(n, 3)),
            squash_corr=rng.random(n),
            logp_old=rng.normal(-8, 0.5, size=n),
            values=rng.normal(size=n),
            rewards=rng.random(n),
            dones=np.zeros(n, dtype=bool),
            version=0,
            last_value=0.0,
            advantages=rng.normal(size=n),
            returns=rng.normal(size=n),
        )
        cfg = PpoConfig(entropy_coeff=0.01)
        idx = np.arange(n)
        _, grads = ppo_loss(net, batch, idx, cfg)

        def loss_value():
            terms, _ = ppo_loss(net, batch, idx, cfg, want_grads=False)
            return terms["loss"]

        worst = 0.0
        for name, p in net.params.items():
            flat = p.ravel()
            g = grads[name].ravel()
            for j in rng.choice(flat.size, size=min(8, flat.size), replace=False):
                eps = 1e-6
                orig = flat[j]
                flat[j] = orig + eps
                lp = loss_value()
                flat[j] = orig - eps
                lm = loss_value()
                flat[j] = orig
                fd = (lp - lm) / (2 * eps)
                worst = max(worst, abs(fd - g[j]) / max(abs(fd), abs(g[j]), 1e-8))
        grad_ok = worst < 1e-4

        # GAE vs brute force, exact at lambda=1
        from txpopt.ppo import discounted_advantages

        gae_ok = True
        for _ in range(20):
            m = int(rng.integers(5, 50))
            rews = rng.random(m)
            vals = rng.normal(size=m)
            dones = rng.random(m) < 0.2
            dones[-1] = True
            gamma = float(rng.uniform(0.5, 1.0))
            adv, _ = discounted_advantages(rews, vals, dones, gamma, 1.0)
            for t in range(m):
                g = 0.0
                for k in range(m - 1, t - 1, -1):
                    if dones[k]:
                        g = 0.0
                    g = rews[k] + gamma * g
                gae_ok &= adv[t] == g - vals[t]

        # clip inert at huge epsilon
        terms, _ = ppo_loss(net, batch, idx, PpoConfig(clip_epsilon=1e6))
        out, _ = net.forward(batch.obs)
        logp, _ = head_logp(net, out, batch.presquash, batch.cat_actions,
                            batch.squash_corr)
        ratio = np.exp(logp - batch.logp_old)
        clip_ok = abs(terms["policy_loss"] - (-np.mean(ratio * batch.advantages))) <= 1e-12

        ok = grad_ok and gae_ok and clip_ok
        report("ppo-numerics", ok,
               f"fd rel err {worst:.2e}; gae exact {gae_ok}; clip inert {clip_ok}")
        assert ok


class TestDeterminism:
    def test_compare_rerun_byte_identical(self, tmp_path, profile):
        spec = ExperimentSpec(optimizers=("sa", "random"), seeds=(0, 1),
                              sa_steps=2000, random_episodes=100)
        dirs = [tmp_path / "first", tmp_path / "second"]
        for d in dirs:
            run_comparison(spec, profile).write(d)
        names = sorted(p.name for p in dirs[0].iterdir())
        ok = names == sorted(p.name for p in dirs[1].iterdir())
        for name in names:
            ok &= (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
        report("determinism", ok, f"{len(names)} files byte-identical")
        assert ok


class TestBackendParity:
    def test_kernels_bit_identical(self, profile):
        from txpopt.core import available_backends

        backends = available_backends()
        if "compiled" not in backends:
            report("kernel-parity", True, "compiled kernel absent; pure fallback active")
            return
        from conftest import random_raw_args

        rng = np.random.default_rng(99)
        ok = True
        for _ in range(10_000):
            args = random_raw_args(rng, profile)
            ok &= backends["compiled"](*args) == _fallback.raw_indicators(*args)
        report("kernel-parity", ok, "10000 random states bit-identical")
        assert ok
