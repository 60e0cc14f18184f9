"""Command-line interface.

Subcommands: ``compare`` (multi-seed optimizer comparison), ``grid-search``
(learning-rate sweep), ``train`` / ``infer`` (single policy), ``sa`` (one
annealing run), ``serve`` (operator service). All emit CSV plus a short
text summary; outputs are byte-reproducible for a fixed spec.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .env import TransponderEnv
from .harness import ExperimentSpec, grid_search, run_comparison
from .ppo import PpoConfig, inference, load_checkpoint, save_checkpoint, train
from .profile import load_profile
from .sa import SaParams, sa_run


def _add_profile_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profile", default=None, help="environment profile YAML (default: built-in)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="txpopt",
                                     description="transponder link-configuration workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="run optimizers over seeds and tabulate")
    _add_profile_arg(p)
    p.add_argument("--action-space", type=int, default=1, choices=(1, 2))
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    p.add_argument("--optimizers", nargs="*", default=["ppo", "sa", "random"])
    p.add_argument("--total-steps", type=int, default=200_000, help="PPO training steps")
    p.add_argument("--sa-steps", type=int, default=50_000)
    p.add_argument("--random-episodes", type=int, default=1000)
    p.add_argument("--learning-rate", type=float, default=1e-5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory for CSVs")

    p = sub.add_parser("grid-search", help="learning-rate grid search")
    _add_profile_arg(p)
    p.add_argument("--action-space", type=int, default=1, choices=(1, 2))
    p.add_argument("--rates", type=float, nargs="+", required=True)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--total-steps", type=int, default=200_000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train one policy and save a checkpoint")
    _add_profile_arg(p)
    p.add_argument("--action-space", type=int, default=1, choices=(1, 2))
    p.add_argument("--lr", type=float, default=1e-5)
    p.add_argument("--total-steps", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("infer", help="deterministic episodes from a checkpoint")
    _add_profile_arg(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--episodes", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sa", help="one simulated-annealing run")
    _add_profile_arg(p)
    p.add_argument("--steps", type=int, default=50_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.95)
    p.add_argument("--steps-per-temp", type=int, default=100)
    p.add_argument("--damping", type=float, default=0.0)
    p.add_argument("--out", default=None, help="directory for the annealing CSV")

    p = sub.add_parser("serve", help="run the operator HTTP service")
    _add_profile_arg(p)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default=None,
                   help="bind address (default: TXPOPT_BIND or 127.0.0.1)")
    p.add_argument("--runs-dir", default=None, help="directory for run artifacts")
    return parser


def cmd_compare(args) -> int:
    profile = load_profile(args.profile)
    spec = ExperimentSpec(
        action_space=args.action_space,
        total_steps=args.total_steps,
        sa_steps=args.sa_steps,
        random_episodes=args.random_episodes,
        seeds=tuple(args.seeds),
        optimizers=tuple(args.optimizers),
        learning_rate=args.learning_rate,
        workers=args.workers,
    )
    result = run_comparison(spec, profile, checkpoint_dir=Path(args.out) / "checkpoints")
    written = result.write(args.out)
    print(result.table_csv(), end="")
    print(f"wrote {len(written)} files under {args.out}")
    return 0


def cmd_grid_search(args) -> int:
    profile = load_profile(args.profile)
    spec = ExperimentSpec(action_space=args.action_space, total_steps=args.total_steps)
    result = grid_search(args.rates, args.seeds, spec, profile)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "grid_search.csv").write_text(result.table_csv(), encoding="utf-8")
    print(result.table_csv(), end="")
    print(f"winner: {result.winner_rate:g}")
    return 0


def cmd_train(args) -> int:
    profile = load_profile(args.profile)
    config = PpoConfig(action_space=args.action_space, learning_rate=args.lr,
                       total_steps=args.total_steps, seed=args.seed)
    result = train(lambda: TransponderEnv(profile, action_space=args.action_space), config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    ckpt = outdir / f"ppo_space{args.action_space}_seed{args.seed}.npz"
    save_checkpoint(ckpt, result.net, config, optimizer=result.optimizer,
                    rng_state=result.rng_state)
    result.trace.write_csv(outdir / f"train_trace_seed{args.seed}.csv")
    result.eval_trace.write_csv(outdir / f"eval_trace_seed{args.seed}.csv")
    print(f"trained {result.env_steps} steps; checkpoint at {ckpt}")
    return 0


def cmd_infer(args) -> int:
    profile = load_profile(args.profile)
    ckpt = load_checkpoint(args.checkpoint)
    env = TransponderEnv(profile, action_space=ckpt.config.action_space)
    result = inference(ckpt.net, env, episodes=args.episodes, seed=args.seed)
    print(f"inference over {args.episodes} episodes: "
          f"{result.mean:.6f} +- {result.std:.6f}")
    last = result.final_states[-1]
    for i, link in enumerate(last.links):
        print(f"  link {i}: center {link.center_freq/1e6:.3f} MHz, "
              f"bw {link.bandwidth/1e6:.3f} MHz, eirp {link.eirp:.2f} W, "
              f"modfec {link.modfec_index}")
    return 0


def cmd_sa(args) -> int:
    profile = load_profile(args.profile)
    params = SaParams(t_max=args.t_max, t_min=args.t_min, alpha=args.alpha,
                      steps_per_temp=args.steps_per_temp, damping=args.damping,
                      max_steps=args.steps, seed=args.seed)
    env = TransponderEnv(profile, action_space=1)
    result = sa_run(env, params, record_every=max(1, args.steps // 1000))
    print(f"best reward {result.best_reward:.6f} after {args.steps} evaluations")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / f"sa_seed{args.seed}.csv"
        path.write_text(result.annealing_csv(), encoding="utf-8")
        print(f"annealing trace at {path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host = args.host or os.environ.get("TXPOPT_BIND", "127.0.0.1")
    app = create_app(profile_path=args.profile, runs_dir=args.runs_dir)
    uvicorn.run(app, host=host, port=args.port, log_level="info")
    return 0


COMMANDS = {
    "compare": cmd_compare,
    "grid-search": cmd_grid_search,
    "train": cmd_train,
    "infer": cmd_infer,
    "sa": cmd_sa,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
