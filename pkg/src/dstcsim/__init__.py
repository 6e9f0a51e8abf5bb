"""Baseband simulator for two-relay amplify-and-forward networks with
differential space-time coding, including an OFDM-based scheme that
tolerates relay timing offsets, the conventional differential baseline,
and a coherent benchmark.
"""

from .analysis import SnrSurface, noise_variance, snr, snr_surface, tap_power_c
from .baselines import ConventionalLink, coherent_block
from .channel import (
    BlockChannel,
    BlockChannelSampler,
    DelayProfile,
    JakesProcess,
    awgn,
    fractional_taps,
    raised_cosine,
)
from .harness import (
    BerPoint,
    ConfigError,
    SimConfig,
    build_config,
    run_point,
    run_sweep,
    two_proportion_z,
    write_ber_csv,
)
from .modem import (
    Constellation,
    build_ustc,
    demap_bits,
    diff_decode_decoupled,
    diff_decode_joint,
    diff_encode,
    get_constellation,
    map_bits,
)
from .pipeline import OfdmDstcLink, destination_decode, source_encode
from .power import PowerAllocation

__version__ = "0.1.0"

__all__ = [
    "BerPoint",
    "BlockChannel",
    "BlockChannelSampler",
    "ConfigError",
    "Constellation",
    "ConventionalLink",
    "DelayProfile",
    "JakesProcess",
    "OfdmDstcLink",
    "PowerAllocation",
    "SimConfig",
    "SnrSurface",
    "awgn",
    "build_config",
    "build_ustc",
    "coherent_block",
    "demap_bits",
    "destination_decode",
    "diff_decode_decoupled",
    "diff_decode_joint",
    "diff_encode",
    "fractional_taps",
    "get_constellation",
    "map_bits",
    "noise_variance",
    "raised_cosine",
    "run_point",
    "run_sweep",
    "snr",
    "snr_surface",
    "source_encode",
    "tap_power_c",
    "two_proportion_z",
    "write_ber_csv",
]
