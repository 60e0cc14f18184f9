import numpy as np
import pytest

from txpopt.harness import (
    ExperimentSpec,
    attainable_metric_maxima,
    crossing_step,
    environment_label,
    grid_search,
    run_comparison,
    run_random,
    run_sa,
    smooth,
)
from txpopt.trace import RunTrace


class TestSmooth:
    def test_constant_series_unchanged(self):
        assert smooth([1.0, 1.0, 1.0], 2).tolist() == [1.0, 1.0, 1.0]

    def test_trailing_mean_hand_checked(self):
        assert smooth([0.0, 2.0], 2).tolist() == [0.0, 1.0]

    def test_window_one_is_identity(self):
        series = [0.3, 0.9, 0.1, 0.5]
        assert smooth(series, 1).tolist() == series

    def test_length_preserved_and_warmup_partial(self):
        out = smooth([4.0, 0.0, 2.0, 6.0], 3)
        assert out.tolist() == [4.0, 2.0, 2.0, 8.0 / 3.0]

    def test_window_below_one_rejected(self):
        with pytest.raises(ValueError):
            smooth([1.0], 0)


def tiny_spec(**overrides):
    base = dict(total_steps=1000, sa_steps=1500, random_episodes=60,
                seeds=(0, 1), optimizers=("sa", "random"))
    base.update(overrides)
    return ExperimentSpec(**base)


class TestRunComparison:
    def test_random_baseline_in_reference_band(self, profile):
        spec = tiny_spec(optimizers=("random",), random_episodes=400,
                         seeds=(0, 1, 2, 3, 4))
        result = run_comparison(spec, profile)
        row = result.rows[0]
        assert row["algorithm"] == "random"
        assert 0.45 <= row["reward_mean"] <= 0.55

    def test_sa_beats_random(self, profile):
        result = run_comparison(tiny_spec(), profile)
        by_alg = {r["algorithm"]: r for r in result.rows}
        assert by_alg["sa"]["reward_mean"] > by_alg["random"]["reward_mean"]

    def test_empty_optimizer_set(self, profile):
        result = run_comparison(tiny_spec(optimizers=()), profile)
        assert result.rows == []
        assert result.table_csv() == "algorithm,environment,reward_mean,reward_std\n"

    def test_aggregation_matches_recomputation(self, profile):
        spec = tiny_spec(optimizers=("random",), seeds=(0, 1, 2))
        result = run_comparison(spec, profile)
        finals = [oc.final_reward for oc in result.outcomes]
        assert result.rows[0]["reward_mean"] == pytest.approx(np.mean(finals), abs=0)
        assert result.rows[0]["reward_std"] == pytest.approx(np.std(finals), abs=0)

    def test_rerun_writes_byte_identical_csvs(self, tmp_path, profile):
        spec = tiny_spec()
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        run_comparison(spec, profile).write(out_a)
        run_comparison(spec, profile).write(out_b)
        files_a = sorted(p.name for p in out_a.iterdir())
        files_b = sorted(p.name for p in out_b.iterdir())
        assert files_a == files_b
        for name in files_a:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_environment_label(self):
        assert environment_label(1) == "transponder-space1"
        assert environment_label(2) == "transponder-space2"

    def test_unknown_optimizer_rejected(self):
        with pytest.raises(ValueError):
            tiny_spec(optimizers=("dqn",)).validate()


class TestRunners:
    def test_run_random_trace_shape(self, profile):
        outcome = run_random(profile, seed=0, episodes=20)
        assert len(outcome.trace) == 20
        assert outcome.trace.steps[-1] == 20 * profile.space1_episode_len
        assert 0 <= outcome.final_reward <= 1

    def test_run_sa_outcome(self, profile):
        outcome = run_sa(profile, seed=0, max_steps=800)
        assert outcome.optimizer == "sa"
        assert outcome.final_reward == outcome.trace.total[-1]


class TestGridSearch:
    def test_single_cell(self, profile):
        spec = ExperimentSpec(total_steps=500)
        result = grid_search([1e-4], [0], spec, profile)
        assert result.winner_rate == 1e-4
        assert len(result.rows) == 1

    def test_tie_breaks_toward_smaller_rate(self, monkeypatch, profile):
        import txpopt.harness as harness

        def fake_run_ppo(profile_, seed, spec, checkpoint_dir=None):
            return harness.RunOutcome("ppo", seed, 0.5,
                                      RunTrace(np.array([1]), np.array([0.5]),
                                               np.zeros((1, 8))))

        monkeypatch.setattr(harness, "run_ppo", fake_run_ppo)
        result = harness.grid_search([1e-3, 1e-5], [0], ExperimentSpec(), profile)
        assert result.winner_rate == 1e-5

    def test_empty_inputs_rejected(self, profile):
        with pytest.raises(ValueError):
            grid_search([], [0], ExperimentSpec(), profile)
        with pytest.raises(ValueError):
            grid_search([1e-4], [], ExperimentSpec(), profile)


class TestSignatureHelpers:
    def test_attainable_maxima(self, profile):
        maxima = attainable_metric_maxima(profile)
        assert maxima["overlap"] == 1.0
        expected_frr = 1.0 - min(profile.bandwidth_table) / profile.transponder.total_bandwidth
        assert maxima["free_resource"] == pytest.approx(expected_frr)

    def test_crossing_step(self):
        steps = np.array([10, 20, 30, 40])
        metrics = np.zeros((4, 8))
        metrics[:, 0] = [0.0, 0.5, 0.95, 1.0]
        trace = RunTrace(steps, np.zeros(4), metrics)
        assert crossing_step(trace, "overlap", 0.9, window=1) == 30
        assert crossing_step(trace, "on_transponder", 0.9, window=1) is None
