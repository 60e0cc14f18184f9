"""Advantage estimation over a rollout batch."""

from __future__ import annotations

import numpy as np


def discounted_advantages(rewards: np.ndarray, values: np.ndarray,
                          dones: np.ndarray, gamma: float, lam: float,
                          last_value: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Generalized advantage estimates and returns, float64 throughout.

    Episode boundaries (``dones``) stop all bootstrapping. For ``lam == 1``
    the advantage is computed directly as the discounted reward sum to the
    episode end minus the value estimate; a truncated tail bootstraps from
    ``last_value``.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=bool)
    n = len(rewards)
    adv = np.empty(n, dtype=np.float64)

    if lam == 1.0:
        g = float(last_value)
        for t in range(n - 1, -1, -1):
            if dones[t]:
                g = 0.0
            g = rewards[t] + gamma * g
            adv[t] = g - values[t]
        returns = adv + values
        return adv, returns

    gae = 0.0
    next_value = float(last_value)
    for t in range(n - 1, -1, -1):
        nonterminal = 0.0 if dones[t] else 1.0
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        gae = delta + gamma * lam * nonterminal * gae
        adv[t] = gae
        next_value = values[t]
    returns = adv + values
    return adv, returns
