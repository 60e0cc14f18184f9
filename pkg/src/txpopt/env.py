"""Deterministic three-link transponder environment.

Two action spaces drive the same state: space 1 rewrites every link
parameter each step, space 2 edits a single parameter of a single link.
The observation (per link: normalized center frequency, normalized EIRP,
MOD-FEC index, bandwidth share) fully reconstructs the state. All randomness
flows through an instance-owned seeded generator; one instance is
single-threaded, parallel workers each get their own instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rewards
from .profile import NUM_LINKS, EnvProfile, TransponderSpec

OBS_PER_LINK = 4
OBS_SIZE = NUM_LINKS * OBS_PER_LINK

PARAM_CENTER_FREQ = 0
PARAM_EIRP = 1
PARAM_MODFEC = 2


def clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def denormalize(norm: float, lo: float, hi: float) -> float:
    """Map a [0,1] action component onto [lo, hi] (values clamped first)."""
    if lo >= hi:
        raise ValueError(f"denormalize requires lo < hi, got [{lo}, {hi}]")
    return lo + clamp01(norm) * (hi - lo)


@dataclass(frozen=True)
class LinkConfig:
    """One link's decision variables plus derived physical values.

    The normalized coordinates are canonical; center frequency, EIRP and
    bandwidth are derived from them through the profile, which keeps
    observation round-trips bit-exact.
    """

    center_freq_norm: float
    eirp_norm: float
    modfec_index: int
    center_freq: float
    eirp: float
    bandwidth: float


def make_link(profile: EnvProfile, center_freq_norm: float, eirp_norm: float,
              modfec_index: int) -> LinkConfig:
    cf = clamp01(float(center_freq_norm))
    en = clamp01(float(eirp_norm))
    idx = int(modfec_index)
    if not 0 <= idx < len(profile.catalog):
        raise ValueError(f"modfec_index {idx} outside catalog")
    t = profile.transponder
    return LinkConfig(
        center_freq_norm=cf,
        eirp_norm=en,
        modfec_index=idx,
        center_freq=denormalize(cf, t.freq_lo, t.freq_hi),
        eirp=denormalize(en, profile.eirp_lo, profile.eirp_hi),
        bandwidth=profile.bandwidth_table[idx],
    )


@dataclass(frozen=True)
class EnvState:
    links: tuple[LinkConfig, ...]
    profile: EnvProfile
    step_count: int = 0

    @property
    def transponder(self) -> TransponderSpec:
        return self.profile.transponder


@dataclass
class FullAction:
    """Action space 1: every parameter of every link, set each step."""

    center_freq: np.ndarray  # (3,) in [0,1]
    eirp: np.ndarray         # (3,) in [0,1]
    modfec: np.ndarray       # (3,) ints in {0,1,2}

    def copy(self) -> "FullAction":
        return FullAction(self.center_freq.copy(), self.eirp.copy(), self.modfec.copy())


@dataclass
class SingleParamAction:
    """Action space 2: one parameter of one link changes per step."""

    link: int
    param: int          # PARAM_CENTER_FREQ / PARAM_EIRP / PARAM_MODFEC
    continuous: float   # used for center_freq / eirp edits
    discrete: int       # used for modfec edits; ignored otherwise


def sample_full_action(rng: np.random.Generator) -> FullAction:
    return FullAction(
        center_freq=rng.random(NUM_LINKS),
        eirp=rng.random(NUM_LINKS),
        modfec=rng.integers(0, NUM_LINKS, size=NUM_LINKS),
    )


def sample_single_param_action(rng: np.random.Generator) -> SingleParamAction:
    return SingleParamAction(
        link=int(rng.integers(0, NUM_LINKS)),
        param=int(rng.integers(0, 3)),
        continuous=float(rng.random()),
        discrete=int(rng.integers(0, 3)),
    )


class TransponderEnv:
    """Seedable episode protocol over the three-link state."""

    def __init__(self, profile: EnvProfile | None = None, action_space: int = 1,
                 seed: int | None = None):
        self.profile = profile if profile is not None else _default_profile()
        if action_space not in (1, 2):
            raise ValueError(f"action_space must be 1 or 2, got {action_space}")
        self.action_space = action_space
        self.episode_length = self.profile.episode_length(action_space)
        self._rng = np.random.default_rng(seed)
        self._links: tuple[LinkConfig, ...] | None = None
        self._step_count = 0
        self.last_raw: tuple[float, ...] | None = None

    # -- episode protocol ---------------------------------------------------

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        links = []
        for _ in range(NUM_LINKS):
            cf = float(self._rng.random())
            en = float(self._rng.random())
            idx = int(self._rng.integers(0, len(self.profile.catalog)))
            links.append(make_link(self.profile, cf, en, idx))
        self._links = tuple(links)
        self._step_count = 0
        self.last_raw = None
        return self.observe()

    def step(self, action) -> tuple[np.ndarray, float, bool]:
        if self._links is None:
            raise RuntimeError("call reset() before step()")
        if self.action_space == 1:
            self._apply_full(action)
        else:
            self._apply_single(action)
        self._step_count += 1
        raw = rewards.state_raw_indicators(self.state)
        self.last_raw = raw
        reward = rewards.combine(raw, self.profile.weights)
        done = self._step_count >= self.episode_length
        return self.observe(), reward, done

    def _apply_full(self, action: FullAction) -> None:
        links = []
        for i in range(NUM_LINKS):
            cf = float(action.center_freq[i])
            en = float(action.eirp[i])
            if not (math.isfinite(cf) and math.isfinite(en)):
                raise ValueError(f"non-finite action component for link {i}")
            links.append(make_link(self.profile, cf, en, int(action.modfec[i])))
        self._links = tuple(links)

    def _apply_single(self, action: SingleParamAction) -> None:
        i = int(action.link)
        if not 0 <= i < NUM_LINKS:
            raise ValueError(f"link index {i} out of range")
        old = self._links[i]
        if action.param == PARAM_CENTER_FREQ:
            value = float(action.continuous)
            if not math.isfinite(value):
                raise ValueError("non-finite center-frequency value")
            new = make_link(self.profile, value, old.eirp_norm, old.modfec_index)
        elif action.param == PARAM_EIRP:
            value = float(action.continuous)
            if not math.isfinite(value):
                raise ValueError("non-finite eirp value")
            new = make_link(self.profile, old.center_freq_norm, value, old.modfec_index)
        elif action.param == PARAM_MODFEC:
            new = make_link(self.profile, old.center_freq_norm, old.eirp_norm,
                            int(action.discrete))
        else:
            raise ValueError(f"param selector {action.param} out of range")
        links = list(self._links)
        links[i] = new
        self._links = tuple(links)

    # -- views ---------------------------------------------------------------

    @property
    def state(self) -> EnvState:
        if self._links is None:
            raise RuntimeError("environment not reset")
        return EnvState(links=self._links, profile=self.profile, step_count=self._step_count)

    def observe(self) -> np.ndarray:
        return observe_state(self.state)

    def sample_action(self):
        if self.action_space == 1:
            return sample_full_action(self._rng)
        return sample_single_param_action(self._rng)

    def last_metric_means(self) -> tuple[float, ...]:
        if self.last_raw is None:
            raise RuntimeError("no step evaluated yet")
        return rewards.raw_metric_means(self.last_raw)


def observe_state(state: EnvState) -> np.ndarray:
    """Flat observation; a pure function of the state."""
    total_bw = state.profile.transponder.total_bandwidth
    obs = np.empty(OBS_SIZE, dtype=np.float64)
    for i, link in enumerate(state.links):
        base = i * OBS_PER_LINK
        obs[base] = link.center_freq_norm
        obs[base + 1] = link.eirp_norm
        obs[base + 2] = float(link.modfec_index)
        obs[base + 3] = link.bandwidth / total_bw
    return obs


def reconstruct_state(obs: np.ndarray, profile: EnvProfile, step_count: int = 0) -> EnvState:
    """Inverse of ``observe_state``: exact because norms are stored verbatim."""
    links = []
    for i in range(NUM_LINKS):
        base = i * OBS_PER_LINK
        links.append(
            make_link(profile, float(obs[base]), float(obs[base + 1]), int(obs[base + 2]))
        )
    return EnvState(links=tuple(links), profile=profile, step_count=step_count)


def _default_profile() -> EnvProfile:
    from .profile import default_profile

    return default_profile()
