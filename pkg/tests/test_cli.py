import numpy as np

from txpopt.cli import main


def test_sa_command(tmp_path, capsys):
    assert main(["sa", "--steps", "500", "--seed", "0",
                 "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "best reward" in out
    csv = (tmp_path / "sa_seed0.csv").read_text()
    assert csv.startswith("step,temp,current_reward,best_reward\n")


def test_compare_command(tmp_path, capsys):
    out_dir = tmp_path / "cmp"
    code = main([
        "compare", "--optimizers", "random", "sa",
        "--seeds", "0", "1", "--sa-steps", "800", "--random-episodes", "40",
        "--out", str(out_dir),
    ])
    assert code == 0
    summary = (out_dir / "summary.csv").read_text().strip().split("\n")
    assert summary[0] == "algorithm,environment,reward_mean,reward_std"
    assert len(summary) == 3
    assert (out_dir / "trace_sa_seed0.csv").exists()
    assert (out_dir / "trace_random_seed1.csv").exists()


def test_train_and_infer_commands(tmp_path, capsys):
    out_dir = tmp_path / "train"
    assert main(["train", "--total-steps", "1000", "--seed", "0",
                 "--out", str(out_dir)]) == 0
    ckpt = out_dir / "ppo_space1_seed0.npz"
    assert ckpt.exists()
    assert (out_dir / "train_trace_seed0.csv").exists()

    assert main(["infer", "--checkpoint", str(ckpt), "--episodes", "3",
                 "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "inference over 3 episodes" in out
    assert "link 0" in out


def test_grid_search_command(tmp_path, capsys):
    out_dir = tmp_path / "grid"
    assert main(["grid-search", "--rates", "0.0003", "--seeds", "0",
                 "--total-steps", "500", "--out", str(out_dir)]) == 0
    text = (out_dir / "grid_search.csv").read_text()
    assert text.startswith("learning_rate,reward_mean,reward_std\n")
    assert "winner: 0.0003" in capsys.readouterr().out


def test_compare_rerun_byte_identical(tmp_path):
    args = ["compare", "--optimizers", "random", "--seeds", "0",
            "--random-episodes", "30"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()
    assert ((a / "trace_random_seed0.csv").read_bytes()
            == (b / "trace_random_seed0.csv").read_bytes())
