"""BPSK over AWGN and the Monte Carlo BER/FER driver.

Every frame draws its information bits and noise from its own generator,
seeded by ``(seed, frame_index)``. Frames are decoded in batches (optionally
on several threads) but tallied strictly in frame order, so results do not
depend on batch size or worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import bp
from .codec import assemble_input, encode
from .construction import CodeSpec, ConfigurationError
from .coupling import AugmentedSpec, decode_augmented, encode_augmented

CONVENTIONS = ("EbN0", "EsN0")


@dataclass(frozen=True)
class ChannelPoint:
    snr_db: float
    convention: str = "EbN0"
    rate: float = 0.5

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ConfigurationError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if not 0.0 < self.rate <= 1.0:
            raise ConfigurationError(f"rate must lie in (0, 1], got {self.rate}")

    @property
    def noise_var(self) -> float:
        """Noise variance per real dimension for unit-energy BPSK."""
        lin = 10.0 ** (self.snr_db / 10.0)
        if self.convention == "EbN0":
            return 1.0 / (2.0 * self.rate * lin)
        return 1.0 / (2.0 * lin)


@dataclass(frozen=True)
class StopRule:
    min_frame_errors: int = 100
    max_frames: int = 100_000

    def __post_init__(self):
        if self.min_frame_errors < 1 or self.max_frames < 1:
            raise ConfigurationError("stop rule bounds must be positive")


@dataclass
class SimResult:
    point: ChannelPoint
    frames: int = 0
    bit_errors: int = 0
    frame_errors: int = 0
    info_bits_total: int = 0
    iters_total: int = 0
    seed: int = 0
    # sum over frames of (bit errors in the frame)**2, for the interval below
    bit_errors_sq: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits_total if self.info_bits_total else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def avg_iters(self) -> float:
        return self.iters_total / self.frames if self.frames else 0.0

    def ber_interval(self, z: float = 1.959964) -> tuple[float, float]:
        """Normal interval for the BER with frames as independent samples.

        Bit errors cluster inside failed frames, so the per-frame error
        fraction, not the single bit, is the sampling unit.
        """
        if self.frames < 2:
            return 0.0, 1.0
        k = self.info_bits_total / self.frames
        mean = self.bit_errors / self.frames
        var = (self.bit_errors_sq - self.frames * mean * mean) / (self.frames - 1)
        half = z * math.sqrt(max(var, 0.0) / self.frames) / k
        return max(0.0, self.ber - half), min(1.0, self.ber + half)

    def fer_interval(self, z: float = 1.959964) -> tuple[float, float]:
        """Wilson score interval for the FER."""
        return _wilson(self.frame_errors, self.frames, z)

    def as_row(self) -> dict:
        return {
            "snr_db": self.point.snr_db,
            "convention": self.point.convention,
            "frames": self.frames,
            "bit_errors": self.bit_errors,
            "frame_errors": self.frame_errors,
            "ber": self.ber,
            "fer": self.fer,
            "avg_iters": self.avg_iters,
            "seed": self.seed,
        }


def _wilson(k: int, n: int, z: float) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    den = 1.0 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


def modulate(x) -> np.ndarray:
    """BPSK: bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(x, dtype=float)


def transmit(s, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian noise of variance ``noise_var``."""
    if not noise_var > 0.0:
        raise ConfigurationError("noise variance must be positive")
    s = np.asarray(s, dtype=float)
    return s + rng.normal(0.0, math.sqrt(noise_var), size=s.shape)


def llr(y, noise_var: float) -> np.ndarray:
    """Channel LLRs ``2 y / sigma^2``, positive favouring bit 0, clipped."""
    if not noise_var > 0.0:
        raise ConfigurationError("noise variance must be positive")
    return np.clip(2.0 * np.asarray(y, dtype=float) / noise_var, -bp.CLIP, bp.CLIP)


class System:
    """Uniform encode/decode view of a plain or augmented code."""

    def __init__(self, code, max_iters: int = bp.DEFAULT_MAX_ITERS, early_stop: bool = False,
                 coupled: bool = True):
        if isinstance(code, CodeSpec) and code.n_semi:
            raise ConfigurationError("plain codes must not have semipolarized positions")
        if not isinstance(code, (CodeSpec, AugmentedSpec)):
            raise TypeError(f"unsupported system {type(code).__name__}")
        self.code = code
        self.max_iters = max_iters
        self.early_stop = early_stop
        self.coupled = coupled

    @property
    def k(self) -> int:
        return self.code.k_info if isinstance(self.code, CodeSpec) else self.code.total_k

    @property
    def n(self) -> int:
        return self.code.n_total if isinstance(self.code, CodeSpec) else self.code.total_n

    @property
    def rate(self) -> float:
        return self.k / self.n

    def encode(self, info) -> np.ndarray:
        if isinstance(self.code, CodeSpec):
            return encode(assemble_input(self.code, info))
        return encode_augmented(self.code, info)

    def decode(self, channel_llrs):
        if isinstance(self.code, CodeSpec):
            u, iters = bp.bp_decode(self.code, channel_llrs, self.max_iters, self.early_stop)
            return u[..., list(self.code.info_set)], iters
        return decode_augmented(self.code, channel_llrs, self.max_iters, self.early_stop, self.coupled)


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    return np.random.default_rng([seed, frame])


def _simulate_batch(system: System, noise_var: float, seed: int, first: int, count: int):
    info = np.empty((count, system.k), dtype=np.uint8)
    y = np.empty((count, system.n))
    for i in range(count):
        rng = frame_rng(seed, first + i)
        info[i] = rng.integers(0, 2, system.k, dtype=np.uint8)
        y[i] = transmit(modulate(system.encode(info[i])), noise_var, rng)
    info_hat, iters = system.decode(llr(y, noise_var))
    return np.count_nonzero(info_hat != info, axis=1), np.asarray(iters)


def run_point(system, point: ChannelPoint, stop_rule: StopRule = StopRule(), seed: int = 0,
              batch_size: int = 64, workers: int = 1) -> SimResult:
    """Simulate frames until ``stop_rule`` is met and return the tallies.

    ``system`` is a :class:`System` or a bare code spec (decoded with the
    defaults). ``batch_size`` and ``workers`` affect speed only.
    """
    if not isinstance(system, System):
        system = System(system)
    res = SimResult(point=point, seed=seed)
    nv = point.noise_var
    next_frame = 0

    def batches():
        nonlocal next_frame
        while True:
            count = min(batch_size, stop_rule.max_frames - next_frame)
            if count <= 0:
                return
            yield next_frame, count
            next_frame += count

    def consume(errs, iters) -> bool:
        for e, it in zip(errs, iters):
            res.frames += 1
            res.info_bits_total += system.k
            res.bit_errors += int(e)
            res.bit_errors_sq += int(e) * int(e)
            res.frame_errors += int(e > 0)
            res.iters_total += int(it)
            if res.frame_errors >= stop_rule.min_frame_errors or res.frames >= stop_rule.max_frames:
                return True
        return False

    if workers <= 1:
        for first, count in batches():
            if consume(*_simulate_batch(system, nv, seed, first, count)):
                break
        return res

    with ThreadPoolExecutor(workers) as pool:
        gen = batches()
        first = [b for b in (next(gen, None) for _ in range(workers)) if b is not None]
        pending = [pool.submit(_simulate_batch, system, nv, seed, *b) for b in first]
        while pending:
            if consume(*pending.pop(0).result()):
                for fut in pending:
                    fut.cancel()
                break
            nxt = next(gen, None)
            if nxt is not None:
                pending.append(pool.submit(_simulate_batch, system, nv, seed, *nxt))
    return res


def run_sweep(system, points, stop_rule: StopRule = StopRule(), base_seed: int = 0,
              **kwargs) -> list[SimResult]:
    """:func:`run_point` for each point with seed ``base_seed + index``."""
    return [run_point(system, p, stop_rule, base_seed + i, **kwargs) for i, p in enumerate(points)]


def result_dict(res: SimResult) -> dict:
    d = res.as_row()
    d["point"] = asdict(res.point)
    return d
