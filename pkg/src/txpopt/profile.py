"""Environment profile: transponder bounds, MOD-FEC catalog, demand and weights.

Everything an experiment can re-parameterize lives here and round-trips
through a YAML file; ``data/default_profile.yaml`` is the canonical profile
used by the tests and the paper-style experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import yaml

from .core import compute_bandwidth
from .rewards import MetricWeights


class ProfileError(ValueError):
    """Raised for physically or structurally invalid profile values."""


@dataclass(frozen=True)
class TransponderSpec:
    freq_lo: float
    freq_hi: float
    total_eirp: float

    def __post_init__(self):
        if not self.freq_hi > self.freq_lo:
            raise ProfileError(f"freq_hi must exceed freq_lo, got [{self.freq_lo}, {self.freq_hi}]")
        if not self.total_eirp > 0:
            raise ProfileError(f"total_eirp must be positive, got {self.total_eirp}")

    @property
    def total_bandwidth(self) -> float:
        return self.freq_hi - self.freq_lo


@dataclass(frozen=True)
class ModFec:
    """One modulation/coding option: bandwidth factors plus its power floor."""

    mod: float
    fec: float
    min_eirp_per_rate: float  # W per bps of demand

    def __post_init__(self):
        if self.mod <= 0 or self.fec <= 0 or self.min_eirp_per_rate <= 0:
            raise ProfileError(f"ModFec factors must be positive: {self}")


@dataclass(frozen=True)
class LinkDemand:
    data_rate: float  # bps, shared by all links
    oh_factor: float = 1.0
    rs_factor: float = 1.0
    overhead: float = 1.0  # carried for completeness, not part of the bandwidth product
    spacing_factor: float = 1.0
    rollout_factor: float = 1.0

    def __post_init__(self):
        if self.data_rate < 0:
            raise ProfileError(f"data_rate must be >= 0, got {self.data_rate}")


NUM_LINKS = 3


@dataclass(frozen=True)
class EnvProfile:
    transponder: TransponderSpec
    catalog: tuple[ModFec, ...]
    demand: LinkDemand
    eirp_lo: float = 0.0
    eirp_hi: float = 50.0
    weights: MetricWeights = field(default_factory=MetricWeights)
    space1_episode_len: int = 10
    space2_episode_len: int = 100
    peb_ratio_max: float = 2.0

    def __post_init__(self):
        if len(self.catalog) != NUM_LINKS:
            raise ProfileError(f"catalog must have exactly {NUM_LINKS} entries, got {len(self.catalog)}")
        if not self.eirp_hi > self.eirp_lo:
            raise ProfileError(f"eirp range invalid: [{self.eirp_lo}, {self.eirp_hi}]")
        if self.eirp_lo < 0:
            raise ProfileError("eirp_lo must be >= 0")
        if self.peb_ratio_max <= 1.0:
            raise ProfileError("peb_ratio_max must exceed 1")
        self.weights.validate()
        # derived lookup tables, one entry per catalog index
        bw = tuple(compute_bandwidth(self.demand, mf) for mf in self.catalog)
        floor = tuple(self.demand.data_rate * mf.min_eirp_per_rate for mf in self.catalog)
        object.__setattr__(self, "bandwidth_table", bw)
        object.__setattr__(self, "min_eirp_table", floor)

    bandwidth_table: tuple[float, ...] = field(init=False, repr=False)
    min_eirp_table: tuple[float, ...] = field(init=False, repr=False)

    def episode_length(self, action_space: int) -> int:
        if action_space == 1:
            return self.space1_episode_len
        if action_space == 2:
            return self.space2_episode_len
        raise ProfileError(f"unknown action space {action_space}")

    def with_weights(self, weights: MetricWeights) -> "EnvProfile":
        return replace(self, weights=weights)

    def to_dict(self) -> dict:
        return {
            "transponder": {
                "freq_lo_hz": self.transponder.freq_lo,
                "freq_hi_hz": self.transponder.freq_hi,
                "total_eirp_w": self.transponder.total_eirp,
            },
            "link": {
                "data_rate_bps": self.demand.data_rate,
                "eirp_range_w": [self.eirp_lo, self.eirp_hi],
                "oh_factor": self.demand.oh_factor,
                "rs_factor": self.demand.rs_factor,
                "overhead": self.demand.overhead,
                "spacing_factor": self.demand.spacing_factor,
                "rollout_factor": self.demand.rollout_factor,
            },
            "modfec_catalog": [
                {"mod": mf.mod, "fec": mf.fec, "min_eirp_per_rate": mf.min_eirp_per_rate}
                for mf in self.catalog
            ],
            "weights": {
                "overlap": self.weights.overlap,
                "on_transponder": self.weights.on_transponder,
                "peb": self.weights.peb,
                "margin": self.weights.margin,
                "bandwidth": self.weights.bandwidth,
                "eirp": self.weights.eirp,
                "packed": self.weights.packed,
                "free_resource": self.weights.free_resource,
                "link_share": self.weights.link_share,
                "transponder_share": self.weights.transponder_share,
            },
            "episodes": {
                "space1_steps": self.space1_episode_len,
                "space2_steps": self.space2_episode_len,
            },
            "reward_shape": {
                "peb_ratio_max": self.peb_ratio_max,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnvProfile":
        try:
            t = d["transponder"]
            link = d["link"]
            cat = d["modfec_catalog"]
            w = d.get("weights", {})
            eps = d.get("episodes", {})
            shape = d.get("reward_shape", {})
            return cls(
                transponder=TransponderSpec(
                    freq_lo=float(t["freq_lo_hz"]),
                    freq_hi=float(t["freq_hi_hz"]),
                    total_eirp=float(t["total_eirp_w"]),
                ),
                catalog=tuple(
                    ModFec(
                        mod=float(m["mod"]),
                        fec=float(m["fec"]),
                        min_eirp_per_rate=float(m["min_eirp_per_rate"]),
                    )
                    for m in cat
                ),
                demand=LinkDemand(
                    data_rate=float(link["data_rate_bps"]),
                    oh_factor=float(link.get("oh_factor", 1.0)),
                    rs_factor=float(link.get("rs_factor", 1.0)),
                    overhead=float(link.get("overhead", 1.0)),
                    spacing_factor=float(link.get("spacing_factor", 1.0)),
                    rollout_factor=float(link.get("rollout_factor", 1.0)),
                ),
                eirp_lo=float(link.get("eirp_range_w", [0.0, 50.0])[0]),
                eirp_hi=float(link.get("eirp_range_w", [0.0, 50.0])[1]),
                weights=MetricWeights(
                    overlap=float(w.get("overlap", 1.0)),
                    on_transponder=float(w.get("on_transponder", 1.0)),
                    peb=float(w.get("peb", 1.0)),
                    margin=float(w.get("margin", 1.0)),
                    bandwidth=float(w.get("bandwidth", 1.0)),
                    eirp=float(w.get("eirp", 1.0)),
                    packed=float(w.get("packed", 1.0)),
                    free_resource=float(w.get("free_resource", 1.0)),
                    link_share=float(w.get("link_share", 0.7)),
                    transponder_share=float(w.get("transponder_share", 0.3)),
                ),
                space1_episode_len=int(eps.get("space1_steps", 10)),
                space2_episode_len=int(eps.get("space2_steps", 100)),
                peb_ratio_max=float(shape.get("peb_ratio_max", 2.0)),
            )
        except (KeyError, IndexError, TypeError) as exc:
            raise ProfileError(f"malformed profile: {exc}") from exc

    @classmethod
    def from_yaml(cls, path: str | Path) -> "EnvProfile":
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise ProfileError(f"profile file {path} did not parse to a mapping")
        return cls.from_dict(data)

    def to_yaml(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=False)


def default_profile() -> EnvProfile:
    """The canonical profile shipped with the package."""
    ref = resources.files("txpopt").joinpath("data/default_profile.yaml")
    with resources.as_file(ref) as path:
        return EnvProfile.from_yaml(path)


def load_profile(path: str | Path | None) -> EnvProfile:
    return default_profile() if path is None else EnvProfile.from_yaml(path)
