"""Throughput benchmark: compiled metric kernel vs pure-Python fallback.

Run directly:  python benchmarks/bench_kernels.py [n_evals]
"""

import sys
import time

import numpy as np

from txpopt.core import available_backends
from txpopt.env import TransponderEnv
from txpopt.profile import default_profile


def bench_kernel(fn, args_list):
    t0 = time.perf_counter()
    for args in args_list:
        fn(*args)
    return time.perf_counter() - t0


def bench_env_steps(profile, n):
    env = TransponderEnv(profile, action_space=1)
    env.reset(seed=0)
    actions = [env.sample_action() for _ in range(n)]
    t0 = time.perf_counter()
    for action in actions:
        env.step(action)
    return time.perf_counter() - t0


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    profile = default_profile()
    rng = np.random.default_rng(0)
    t = profile.transponder
    args_list = [
        (
            *rng.uniform(0, 36e6, 3), *rng.choice(profile.bandwidth_table, 3),
            *rng.uniform(0, 40, 3), *rng.choice(profile.min_eirp_table, 3),
            t.freq_lo, t.freq_hi, t.total_bandwidth, t.total_eirp,
            profile.peb_ratio_max,
        )
        for _ in range(n)
    ]

    print(f"metric-kernel throughput over {n:,} evaluations:")
    times = {}
    for name, fn in available_backends().items():
        elapsed = bench_kernel(fn, args_list)
        times[name] = elapsed
        print(f"  {name:9s} {elapsed:7.3f} s   {n / elapsed / 1e6:6.2f} M evals/s")
    if "compiled" in times and "pure" in times:
        print(f"  speedup   {times['pure'] / times['compiled']:.1f}x")

    n_steps = min(n, 50_000)
    elapsed = bench_env_steps(profile, n_steps)
    print(f"\nfull environment steps ({n_steps:,}): {elapsed:.3f} s "
          f"({n_steps / elapsed / 1e3:.0f} k steps/s, "
          f"backend selected at import)")


if __name__ == "__main__":
    main()
