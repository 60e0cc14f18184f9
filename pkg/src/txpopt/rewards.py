"""Weighted multi-metric reward for a three-link transponder configuration.

Eight metrics grade a configuration: four per link (overlap-free placement,
fully on transponder, power/bandwidth proportionality, power margin) and four
for the whole transponder (bandwidth budget, EIRP budget, packing, free
resource). Per-link metrics share ``link_share`` of the total (default 0.7),
transponder metrics the rest; within each group the metric weights are
normalized by the group sum so the total lies in [0, 1] with maximum 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from . import core

if TYPE_CHECKING:
    from .env import EnvState, LinkConfig
    from .profile import LinkDemand, ModFec, TransponderSpec

METRIC_NAMES = (
    "overlap",
    "on_transponder",
    "peb",
    "margin",
    "bandwidth",
    "eirp",
    "packed",
    "free_resource",
)

LINK_METRICS = METRIC_NAMES[:4]
TRANSPONDER_METRICS = METRIC_NAMES[4:]


class WeightError(ValueError):
    """Invalid metric weighting."""


@dataclass(frozen=True)
class MetricWeights:
    overlap: float = 1.0
    on_transponder: float = 1.0
    peb: float = 1.0
    margin: float = 1.0
    bandwidth: float = 1.0
    eirp: float = 1.0
    packed: float = 1.0
    free_resource: float = 1.0
    link_share: float = 0.7
    transponder_share: float = 0.3

    def validate(self) -> None:
        for name in METRIC_NAMES:
            if getattr(self, name) < 0:
                raise WeightError(f"weight {name} must be >= 0")
        if self.link_share < 0 or self.transponder_share < 0:
            raise WeightError("shares must be >= 0")
        if abs(self.link_share + self.transponder_share - 1.0) > 1e-9:
            raise WeightError("link_share + transponder_share must equal 1")
        if self.link_group_sum() <= 0:
            raise WeightError("at least one link-metric weight must be positive")
        if self.transponder_group_sum() <= 0:
            raise WeightError("at least one transponder-metric weight must be positive")

    def link_group_sum(self) -> float:
        return self.overlap + self.on_transponder + self.peb + self.margin

    def transponder_group_sum(self) -> float:
        return self.bandwidth + self.eirp + self.packed + self.free_resource

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES} | {
            "link_share": self.link_share,
            "transponder_share": self.transponder_share,
        }


@dataclass(frozen=True)
class RewardBreakdown:
    """Weighted partial rewards; fields sum to ``total``.

    Per-link tuples hold each link's already-weighted contribution. ``raw``
    keeps the 16 unweighted metric values in kernel order for traces.
    """

    overlap: tuple[float, float, float]
    on_transponder: tuple[float, float, float]
    peb: tuple[float, float, float]
    margin: tuple[float, float, float]
    bandwidth: float
    eirp: float
    packed: float
    free_resource: float
    total: float
    raw: tuple[float, ...]

    def partial_sum(self) -> float:
        return (
            sum(self.overlap)
            + sum(self.on_transponder)
            + sum(self.peb)
            + sum(self.margin)
            + self.bandwidth
            + self.eirp
            + self.packed
            + self.free_resource
        )

    def metric_means(self) -> tuple[float, ...]:
        """Unweighted per-metric values, link metrics averaged over links."""
        return raw_metric_means(self.raw)


def raw_metric_means(raw: Sequence[float]) -> tuple[float, ...]:
    return (
        (raw[0] + raw[1] + raw[2]) / 3.0,
        (raw[3] + raw[4] + raw[5]) / 3.0,
        (raw[6] + raw[7] + raw[8]) / 3.0,
        (raw[9] + raw[10] + raw[11]) / 3.0,
        raw[12],
        raw[13],
        raw[14],
        raw[15],
    )


# ---------------------------------------------------------------------------
# individual metric operations (reference path; the fused kernel computes the
# same quantities in one call for the per-step hot path)
# ---------------------------------------------------------------------------

def link_interval(link: "LinkConfig") -> tuple[float, float]:
    half = 0.5 * link.bandwidth
    return link.center_freq - half, link.center_freq + half


def overlap_indicator(link: "LinkConfig", others: Sequence["LinkConfig"]) -> float:
    """1.0 iff the link's half-open band intersects no other link's band."""
    lo, hi = link_interval(link)
    for other in others:
        olo, ohi = link_interval(other)
        if lo < ohi and olo < hi:
            return 0.0
    return 1.0


def on_transponder_indicator(link: "LinkConfig", spec: "TransponderSpec") -> float:
    """1.0 iff the link's band lies inside the transponder (edges inclusive)."""
    lo, hi = link_interval(link)
    return 1.0 if (lo >= spec.freq_lo and hi <= spec.freq_hi) else 0.0


def margin_reward(link: "LinkConfig", demand: "LinkDemand", modfec: "ModFec") -> float:
    """1 at the exact power floor, 0 below it, linear decay above it."""
    min_required = demand.data_rate * modfec.min_eirp_per_rate
    if min_required <= 0:
        raise WeightError(f"margin undefined for non-positive power floor {min_required}")
    if link.eirp < min_required:
        return 0.0
    return max(0.0, 1.0 - (link.eirp - min_required) / min_required)


def peb_indicator(link: "LinkConfig", spec: "TransponderSpec", ratio_max: float = 2.0) -> float:
    """1.0 iff power share / bandwidth share is within [1/ratio_max, ratio_max]."""
    if link.bandwidth <= 0:
        return 0.0
    ratio = (link.eirp / spec.total_eirp) / (link.bandwidth / spec.total_bandwidth)
    return 1.0 if (1.0 / ratio_max) <= ratio <= ratio_max else 0.0


def transponder_indicators(state: "EnvState") -> tuple[float, float, float, float]:
    """(bandwidth_ok, eirp_ok, packed, free_resource) for the whole system."""
    raw = state_raw_indicators(state)
    return raw[12], raw[13], raw[14], raw[15]


def state_raw_indicators(state: "EnvState") -> tuple[float, ...]:
    """All 16 unweighted metric values via the selected kernel backend."""
    l0, l1, l2 = state.links
    p = state.profile
    return core.raw_indicators(
        l0.center_freq, l1.center_freq, l2.center_freq,
        l0.bandwidth, l1.bandwidth, l2.bandwidth,
        l0.eirp, l1.eirp, l2.eirp,
        p.min_eirp_table[l0.modfec_index],
        p.min_eirp_table[l1.modfec_index],
        p.min_eirp_table[l2.modfec_index],
        p.transponder.freq_lo, p.transponder.freq_hi,
        p.transponder.total_bandwidth, p.transponder.total_eirp,
        p.peb_ratio_max,
    )


def combine(raw: Sequence[float], weights: MetricWeights) -> float:
    """Weighted total in [0, 1] from the 16 raw metric values.

    Group sums are accumulated in the same order as their all-ones maxima, so
    a group with every metric satisfied contributes exactly its share.
    """
    w = weights
    link_num = 0.0
    link_den = 0.0
    for i in range(3):
        link_num += w.overlap * raw[i]
        link_num += w.on_transponder * raw[3 + i]
        link_num += w.peb * raw[6 + i]
        link_num += w.margin * raw[9 + i]
        link_den += w.overlap
        link_den += w.on_transponder
        link_den += w.peb
        link_den += w.margin
    tp_num = (
        w.bandwidth * raw[12]
        + w.eirp * raw[13]
        + w.packed * raw[14]
        + w.free_resource * raw[15]
    )
    tp_den = w.bandwidth + w.eirp + w.packed + w.free_resource
    return w.link_share * (link_num / link_den) + w.transponder_share * (tp_num / tp_den)


def total_reward(state: "EnvState", weights: MetricWeights | None = None) -> RewardBreakdown:
    """Full weighted breakdown for a state (weights default to the profile's)."""
    w = state.profile.weights if weights is None else weights
    w.validate()
    raw = state_raw_indicators(state)
    link_scale = w.link_share / (3.0 * w.link_group_sum())
    tp_scale = w.transponder_share / w.transponder_group_sum()
    return RewardBreakdown(
        overlap=tuple(link_scale * w.overlap * raw[i] for i in range(3)),
        on_transponder=tuple(link_scale * w.on_transponder * raw[3 + i] for i in range(3)),
        peb=tuple(link_scale * w.peb * raw[6 + i] for i in range(3)),
        margin=tuple(link_scale * w.margin * raw[9 + i] for i in range(3)),
        bandwidth=tp_scale * w.bandwidth * raw[12],
        eirp=tp_scale * w.eirp * raw[13],
        packed=tp_scale * w.packed * raw[14],
        free_resource=tp_scale * w.free_resource * raw[15],
        total=combine(raw, w),
        raw=raw,
    )
