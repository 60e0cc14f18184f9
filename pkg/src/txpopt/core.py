"""Numeric core: backend selection and the link-bandwidth formula.

The fused metric kernel has two interchangeable implementations — the
compiled extension and a pure-Python fallback. Selection happens once at
import; set ``TXPOPT_PURE=1`` to force the fallback (used by the parity
tests and the benchmark).
"""

from __future__ import annotations

import os
from typing import TYPE_CHECKING

from . import _fallback

if TYPE_CHECKING:
    from .profile import LinkDemand, ModFec

try:
    from . import _speedups
except ImportError:
    _speedups = None

if _speedups is not None and not os.environ.get("TXPOPT_PURE"):
    raw_indicators = _speedups.raw_indicators
    BACKEND = "compiled"
else:
    raw_indicators = _fallback.raw_indicators
    BACKEND = "pure"


def available_backends() -> dict:
    """Name -> kernel function, for benchmarks and parity tests."""
    out = {"pure": _fallback.raw_indicators}
    if _speedups is not None:
        out["compiled"] = _speedups.raw_indicators
    return out


def compute_bandwidth(demand: "LinkDemand", modfec: "ModFec") -> float:
    """Occupied bandwidth of a link in Hz.

    Three-step evaluation: transmission rate from data rate and coding,
    symbol rate from modulation, then pulse-shaping/spacing expansion.
    """
    transmission_rate = demand.data_rate * demand.oh_factor * demand.rs_factor * modfec.fec
    symbol_rate = transmission_rate * modfec.mod
    return symbol_rate * (1.0 + demand.rollout_factor + demand.spacing_factor)
