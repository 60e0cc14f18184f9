import numpy as np
import pytest

from txpopt.env import LinkConfig
from txpopt.profile import EnvProfile, default_profile


@pytest.fixture(scope="session")
def profile() -> EnvProfile:
    return default_profile()


def make_raw_link(center_freq: float, bandwidth: float, eirp: float = 10.0,
                  modfec_index: int = 0) -> LinkConfig:
    """LinkConfig with arbitrary physical values, bypassing profile derivation."""
    return LinkConfig(
        center_freq_norm=0.0,
        eirp_norm=0.0,
        modfec_index=modfec_index,
        center_freq=center_freq,
        eirp=eirp,
        bandwidth=bandwidth,
    )


def random_raw_args(rng: np.random.Generator, profile: EnvProfile):
    """Argument tuple for the metric kernel with loosely-physical ranges."""
    widths = rng.uniform(0.0, 2.0e7, 3)
    return (
        *rng.uniform(-5e6, 4.1e7, 3),
        *widths,
        *rng.uniform(0.0, 60.0, 3),
        *rng.uniform(1.0, 30.0, 3),
        profile.transponder.freq_lo,
        profile.transponder.freq_hi,
        profile.transponder.total_bandwidth,
        profile.transponder.total_eirp,
        profile.peb_ratio_max,
    )
