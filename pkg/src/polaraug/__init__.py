"""Polar codes with graph-based augmentation, decoded by belief propagation."""

__version__ = "0.1.0"

from .bp import bp_decode, box_plus, pe_count
from .channel import ChannelPoint, SimResult, StopRule, System, run_point, run_sweep
from .codec import assemble_input, encode, encode_matrix_oracle
from .construction import CodeSpec, ConfigurationError, build_reliabilities, construct, partition_channels
from .coupling import AugmentedSpec, build_coupled, build_setup, decode_augmented, encode_augmented

__all__ = [
    "AugmentedSpec", "ChannelPoint", "CodeSpec", "ConfigurationError", "SimResult", "StopRule", "System",
    "assemble_input", "bp_decode", "box_plus", "build_coupled", "build_reliabilities", "build_setup",
    "construct", "decode_augmented", "encode", "encode_augmented", "encode_matrix_oracle",
    "partition_channels", "pe_count", "run_point", "run_sweep",
]
