"""Bhattacharyya-based construction of polar codes.

The synthesized channels are ranked by the Bhattacharyya recursion and split
into three sets: information (most reliable), semipolarized (intermediate)
and frozen (least reliable).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ConfigurationError(ValueError):
    """Raised for inconsistent code or experiment parameters."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def log2_exact(n: int) -> int:
    if not is_power_of_two(int(n)):
        raise ConfigurationError(f"length must be a power of two, got {n}")
    return int(n).bit_length() - 1


def polarize_step(z: float) -> tuple[float, float]:
    """One polarization step of a Bhattacharyya value.

    Returns ``(z_minus, z_plus) = (2z - z**2, z**2)``.
    """
    if not 0.0 <= z <= 1.0 or math.isnan(z):
        raise ValueError(f"Bhattacharyya value must lie in [0, 1], got {z}")
    return 2.0 * z - z * z, z * z


@dataclass(frozen=True)
class ChannelReliabilities:
    """Bhattacharyya parameters of the ``2**n`` synthesized channels."""

    n: int
    z: np.ndarray
    design_snr_db: float

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.shape != (1 << self.n,):
            raise ConfigurationError(f"expected {1 << self.n} values, got {z.shape}")
        if np.any(z < 0.0) or np.any(z > 1.0):
            raise ConfigurationError("Bhattacharyya values must lie in [0, 1]")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def size(self) -> int:
        return 1 << self.n

    def ranking(self) -> np.ndarray:
        """Channel indices from most to least reliable, ties by smaller index."""
        return np.lexsort((np.arange(self.size), self.z))


def initial_bhattacharyya(design_snr_db: float) -> float:
    """Bhattacharyya value of BPSK over AWGN at the given Es/N0 in dB."""
    return math.exp(-(10.0 ** (design_snr_db / 10.0)))


def _recurse(z0: float, n: int) -> np.ndarray:
    # index bit picks minus (0) or plus (1); most significant bit applied first
    z = np.array([z0], dtype=float)
    for _ in range(n):
        z = np.stack([2.0 * z - z * z, z * z], axis=1).reshape(-1)
    return z


def build_reliabilities(n: int, design_snr_db: float = 0.0) -> ChannelReliabilities:
    """Run the polarization recursion ``n`` times from the AWGN design point.

    ``z[i]`` belongs to input position ``i`` of ``u @ F^(x)n``.
    """
    if n < 0:
        raise ConfigurationError(f"n must be non-negative, got {n}")
    z = _recurse(initial_bhattacharyya(design_snr_db), n)
    return ChannelReliabilities(n=n, z=z, design_snr_db=float(design_snr_db))


def reliabilities_from_z0(n: int, z0: float) -> ChannelReliabilities:
    """Same recursion started from an explicit Bhattacharyya value."""
    if not 0.0 <= z0 <= 1.0:
        raise ValueError(f"z0 must lie in [0, 1], got {z0}")
    # design SNR that would produce z0; inf for z0 == 0
    snr_db = 10.0 * math.log10(-math.log(z0)) if 0.0 < z0 < 1.0 else math.nan
    return ChannelReliabilities(n=n, z=_recurse(z0, n), design_snr_db=snr_db)


@dataclass(frozen=True)
class CodeSpec:
    """A polar code of length ``n_total`` with its three channel sets.

    Attributes
    ----------
    n_total : int
        Block length N.
    k_info : int
        Number of pure information positions.
    info_set, semi_set, frozen_set : tuple of int
        Sorted channel indices of each set.
    reliabilities : ChannelReliabilities or None
        Bhattacharyya values used for the construction.
    """

    n_total: int
    k_info: int
    info_set: tuple[int, ...]
    frozen_set: tuple[int, ...]
    semi_set: tuple[int, ...] = ()
    reliabilities: ChannelReliabilities | None = field(default=None, compare=False)

    def __post_init__(self):
        log2_exact(self.n_total)
        sets = [tuple(sorted(int(i) for i in s)) for s in (self.info_set, self.frozen_set, self.semi_set)]
        object.__setattr__(self, "info_set", sets[0])
        object.__setattr__(self, "frozen_set", sets[1])
        object.__setattr__(self, "semi_set", sets[2])
        if len(self.info_set) != self.k_info:
            raise ConfigurationError("k_info does not match the information set size")
        joined = sorted(sets[0] + sets[1] + sets[2])
        if joined != list(range(self.n_total)):
            raise ConfigurationError("information, semipolarized and frozen sets must tile 0..N-1")

    @property
    def n(self) -> int:
        return log2_exact(self.n_total)

    @property
    def n_semi(self) -> int:
        return len(self.semi_set)

    @property
    def rate(self) -> float:
        """Rate of the code counting semipolarized positions as carried bits."""
        return (self.k_info + self.n_semi) / self.n_total

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_total, dtype=bool)
        mask[list(self.frozen_set)] = True
        return mask

    def thresholds(self) -> tuple[float, float] | None:
        """Realized (delta1, delta2) boundaries on the Bhattacharyya scale.

        delta1 is the largest z among information channels and delta2 the
        largest z among semipolarized channels; ``None`` without reliabilities.
        """
        if self.reliabilities is None:
            return None
        z = self.reliabilities.z
        d1 = float(z[list(self.info_set)].max()) if self.info_set else 0.0
        d2 = float(z[list(self.semi_set)].max()) if self.semi_set else d1
        return d1, d2

    def to_dict(self) -> dict:
        d = {
            "n_total": self.n_total,
            "k_info": self.k_info,
            "info_set": list(self.info_set),
            "semi_set": list(self.semi_set),
            "frozen_set": list(self.frozen_set),
        }
        if self.reliabilities is not None:
            d["design_snr_db"] = self.reliabilities.design_snr_db
            th = self.thresholds()
            d["delta1"], d["delta2"] = th
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CodeSpec":
        rel = None
        snr = d.get("design_snr_db")
        if snr is not None and not (isinstance(snr, float) and math.isnan(snr)):
            rel = build_reliabilities(log2_exact(d["n_total"]), snr)
        return cls(
            n_total=int(d["n_total"]),
            k_info=int(d["k_info"]),
            info_set=tuple(d["info_set"]),
            frozen_set=tuple(d["frozen_set"]),
            semi_set=tuple(d.get("semi_set", ())),
            reliabilities=rel,
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "CodeSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


def partition_channels(rel: ChannelReliabilities, k_info: int, n_semi: int, k_frozen: int) -> CodeSpec:
    """Split channels by reliability rank into information/semi/frozen sets."""
    if min(k_info, n_semi, k_frozen) < 0 or k_info + n_semi + k_frozen != rel.size:
        raise ConfigurationError(
            f"set sizes {k_info}+{n_semi}+{k_frozen} do not sum to N={rel.size}"
        )
    order = rel.ranking()
    return CodeSpec(
        n_total=rel.size,
        k_info=k_info,
        info_set=tuple(order[:k_info].tolist()),
        semi_set=tuple(order[k_info:k_info + n_semi].tolist()),
        frozen_set=tuple(order[k_info + n_semi:].tolist()),
        reliabilities=rel,
    )


def construct(n_total: int, k_info: int, n_semi: int = 0, design_snr_db: float = 0.0) -> CodeSpec:
    """Convenience wrapper: build reliabilities for ``n_total`` and partition."""
    rel = build_reliabilities(log2_exact(n_total), design_snr_db)
    return partition_channels(rel, k_info, n_semi, n_total - k_info - n_semi)
