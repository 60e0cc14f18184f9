import math

import numpy as np

from txpopt.core import compute_bandwidth
from txpopt.profile import LinkDemand, ModFec


def naive_three_step(data_rate, oh, rs, fec, mod, rollout, spacing):
    # independent evaluation of the three defining equations
    transmission_rate = data_rate * oh * rs * fec
    symbol_rate = transmission_rate * mod
    return symbol_rate * (1.0 + rollout + spacing)


def test_unit_factors_give_three():
    demand = LinkDemand(data_rate=1.0)
    modfec = ModFec(mod=1.0, fec=1.0, min_eirp_per_rate=1.0)
    assert compute_bandwidth(demand, modfec) == 3.0


def test_zero_data_rate_gives_zero():
    demand = LinkDemand(data_rate=0.0)
    modfec = ModFec(mod=2.0, fec=0.5, min_eirp_per_rate=1.0)
    assert compute_bandwidth(demand, modfec) == 0.0


def test_hand_checked_product():
    # 2 * 0.5 * 2 * (1 + 1 + 1) = 6
    demand = LinkDemand(data_rate=2.0)
    modfec = ModFec(mod=2.0, fec=0.5, min_eirp_per_rate=1.0)
    assert compute_bandwidth(demand, modfec) == 6.0


def test_oracle_1000_random_triples():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        data_rate = float(rng.uniform(0.0, 5e7))
        fec = float(rng.uniform(0.1, 1.0))
        mod = float(rng.uniform(0.5, 8.0))
        oh = float(rng.uniform(0.5, 2.0))
        rs = float(rng.uniform(0.5, 2.0))
        rollout = float(rng.uniform(0.0, 1.5))
        spacing = float(rng.uniform(0.0, 1.5))
        demand = LinkDemand(data_rate=data_rate, oh_factor=oh, rs_factor=rs,
                            rollout_factor=rollout, spacing_factor=spacing)
        modfec = ModFec(mod=mod, fec=fec, min_eirp_per_rate=1.0)
        got = compute_bandwidth(demand, modfec)
        want = naive_three_step(data_rate, oh, rs, fec, mod, rollout, spacing)
        assert abs(got - want) <= math.ulp(want)


def test_pure_and_deterministic():
    demand = LinkDemand(data_rate=1.23e6)
    modfec = ModFec(mod=3.0, fec=0.75, min_eirp_per_rate=1e-5)
    assert compute_bandwidth(demand, modfec) == compute_bandwidth(demand, modfec)
