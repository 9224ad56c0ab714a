"""Augmented polar codes: inner codes coupled through auxiliary polar codes.

An auxiliary codeword is interleaved and loaded onto the semipolarized input
positions of one or more inner codes. Setup 1 is serial augmentation (one
inner, one auxiliary code); setups 2 and 3 couple several inner codes, which
yields total lengths that are not powers of two.

Information bits are ordered auxiliary codes first, then inner codes, each
in list order. The transmitted word is the concatenation of inner codewords.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bp
from .codec import assemble_input, encode
from .construction import CodeSpec, ConfigurationError, construct

DEFAULT_SEED = 20170101


@dataclass(frozen=True)
class Permutation:
    """Interleaver ``v[i] = c[forward[i]]``."""

    forward: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        fwd = np.asarray(self.forward, dtype=np.int64)
        if not np.array_equal(np.sort(fwd), np.arange(fwd.size)):
            raise ConfigurationError("interleaver is not a bijection")
        fwd.setflags(write=False)
        object.__setattr__(self, "forward", fwd)

    @property
    def size(self) -> int:
        return self.forward.size

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.forward)
        inv[self.forward] = np.arange(self.size)
        return inv

    def interleave(self, a):
        return np.asarray(a)[..., self.forward]

    def deinterleave(self, a):
        a = np.asarray(a)
        out = np.empty_like(a)
        out[..., self.forward] = a
        return out


def make_interleaver(size: int, seed: int) -> Permutation:
    """Uniformly random permutation, reproducible from ``(size, seed)``."""
    if size < 1:
        raise ConfigurationError("interleaver size must be positive")
    return Permutation(np.random.default_rng(seed).permutation(size), int(seed))


@dataclass(frozen=True)
class CouplingEdge:
    """``count`` interleaved symbols of aux code ``aux_id``, starting at
    ``offset``, loaded onto semipolarized positions of inner code ``inner_id``."""

    aux_id: int
    inner_id: int
    count: int
    offset: int


@dataclass(frozen=True)
class AugmentedSpec:
    inner_codes: tuple[CodeSpec, ...]
    aux_codes: tuple[CodeSpec, ...]
    edges: tuple[CouplingEdge, ...]
    interleavers: tuple[Permutation, ...]
    name: str = "custom"
    # per edge: (aux slice start, inner semi-slot indices into semi_set)
    _routes: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        for name in ("inner_codes", "aux_codes", "edges", "interleavers"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.inner_codes:
            raise ConfigurationError("at least one inner code is required")
        if len(self.interleavers) != len(self.aux_codes):
            raise ConfigurationError("one interleaver per auxiliary code is required")
        for a, (aux, pi) in enumerate(zip(self.aux_codes, self.interleavers)):
            if aux.n_semi:
                raise ConfigurationError(f"auxiliary code {a} must not have semipolarized positions")
            if pi.size != aux.n_total:
                raise ConfigurationError(f"interleaver {a} size does not match its code")
            spans = sorted((e.offset, e.offset + e.count) for e in self.edges if e.aux_id == a)
            pos = 0
            for lo, hi in spans:
                if lo != pos or hi <= lo:
                    raise ConfigurationError(f"edges of auxiliary code {a} do not tile its codeword")
                pos = hi
            if pos != aux.n_total:
                raise ConfigurationError(f"edges of auxiliary code {a} do not tile its codeword")
        fill = [0] * len(self.inner_codes)
        routes = []
        for e in self.edges:
            if not (0 <= e.aux_id < len(self.aux_codes) and 0 <= e.inner_id < len(self.inner_codes)):
                raise ConfigurationError(f"edge {e} references an unknown code")
            start = fill[e.inner_id]
            routes.append(np.arange(start, start + e.count))
            fill[e.inner_id] += e.count
        for j, inner in enumerate(self.inner_codes):
            if fill[j] != inner.n_semi:
                raise ConfigurationError(
                    f"inner code {j} receives {fill[j]} symbols but has {inner.n_semi} semipolarized positions"
                )
        object.__setattr__(self, "_routes", tuple(routes))

    @property
    def total_n(self) -> int:
        return sum(c.n_total for c in self.inner_codes)

    @property
    def total_k(self) -> int:
        return sum(c.k_info for c in self.aux_codes + self.inner_codes)

    @property
    def rate(self) -> float:
        return self.total_k / self.total_n

    @property
    def lengths(self) -> list[int]:
        return [c.n_total for c in self.aux_codes + self.inner_codes]

    def code_rates(self) -> dict[str, list[float]]:
        """``K_aux / N_aux`` per aux code and ``(K_i + incoming) / N_i`` per inner code."""
        return {
            "aux": [c.k_info / c.n_total for c in self.aux_codes],
            "inner": [(c.k_info + c.n_semi) / c.n_total for c in self.inner_codes],
        }

    def split_info(self, info):
        """Split info bits ``(..., total_k)`` into aux slices and inner slices."""
        info = np.asarray(info)
        if info.shape[-1] != self.total_k:
            raise ConfigurationError(f"expected {self.total_k} info bits, got {info.shape[-1]}")
        cuts = np.cumsum([c.k_info for c in self.aux_codes + self.inner_codes])[:-1]
        parts = np.split(info, cuts, axis=-1)
        na = len(self.aux_codes)
        return parts[:na], parts[na:]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inner_codes": [c.to_dict() for c in self.inner_codes],
            "aux_codes": [c.to_dict() for c in self.aux_codes],
            "edges": [
                {"aux_id": e.aux_id, "inner_id": e.inner_id, "count": e.count, "offset": e.offset}
                for e in self.edges
            ],
            "interleavers": [{"seed": p.seed, "forward": p.forward.tolist()} for p in self.interleavers],
            "total_k": self.total_k,
            "total_n": self.total_n,
            "rate": self.rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentedSpec":
        return cls(
            inner_codes=[CodeSpec.from_dict(c) for c in d["inner_codes"]],
            aux_codes=[CodeSpec.from_dict(c) for c in d["aux_codes"]],
            edges=[CouplingEdge(**e) for e in d["edges"]],
            interleavers=[Permutation(p["forward"], p.get("seed")) for p in d["interleavers"]],
            name=d.get("name", "custom"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "AugmentedSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


def build_coupled(inner, aux, wiring, design_snr_db: float = 0.0, seed: int = DEFAULT_SEED,
                  name: str = "custom") -> AugmentedSpec:
    """Build a coupling graph from code sizes.

    Parameters
    ----------
    inner : list of (N, K)
        Inner code lengths and pure information counts.
    aux : list of (N, K)
        Auxiliary code lengths and information counts.
    wiring : list of (aux_id, inner_id, count)
        Each auxiliary codeword is cut into consecutive pieces in the order
        its wires appear. The semipolarized count of an inner code is the
        sum of its incoming wires.
    seed : int
        Interleaver ``a`` uses seed ``seed + a``.
    """
    offsets = [0] * len(aux)
    incoming = [0] * len(inner)
    edges = []
    for a, j, count in wiring:
        edges.append(CouplingEdge(a, j, count, offsets[a]))
        offsets[a] += count
        incoming[j] += count
    aux_codes = [construct(N, K, 0, design_snr_db) for N, K in aux]
    inner_codes = [construct(N, K, incoming[j], design_snr_db) for j, (N, K) in enumerate(inner)]
    interleavers = [make_interleaver(N, seed + a) for a, (N, _) in enumerate(aux)]
    return AugmentedSpec(inner_codes, aux_codes, edges, interleavers, name=name)


def build_setup(setup_id: int, design_snr_db: float = 0.0, seed: int = DEFAULT_SEED) -> AugmentedSpec:
    """Setups 1-3 with the parameters of the original experiments (all rate 1/2).

    1. one N=4096 inner code augmented by a (256, 128) auxiliary code;
    2. inner codes of length 2048 and 1024 coupled by one (256, 128)
       auxiliary code, half of its codeword to each (N = 3072);
    3. four (1024, 448) inner codes in a ring with four (128, 64) auxiliary
       codes; aux ``i`` feeds inner ``i`` and inner ``i + 1 mod 4``.
    """
    if setup_id == 1:
        return build_coupled([(4096, 1920)], [(256, 128)], [(0, 0, 256)],
                             design_snr_db, seed, name="setup1")
    if setup_id == 2:
        return build_coupled([(2048, 960), (1024, 448)], [(256, 128)], [(0, 0, 128), (0, 1, 128)],
                             design_snr_db, seed, name="setup2")
    if setup_id == 3:
        wiring = []
        for i in range(4):
            wiring += [(i, i, 64), (i, (i + 1) % 4, 64)]
        return build_coupled([(1024, 448)] * 4, [(128, 64)] * 4, wiring,
                             design_snr_db, seed, name="setup3")
    raise ConfigurationError(f"unknown setup {setup_id!r}; expected 1, 2 or 3")


def encode_augmented(spec: AugmentedSpec, info_bits) -> np.ndarray:
    """Encode ``info_bits`` of shape ``(..., total_k)`` to ``(..., total_n)``."""
    info = np.asarray(info_bits, dtype=np.uint8)
    aux_info, inner_info = spec.split_info(info)
    batch = info.shape[:-1]
    semi = [np.zeros(batch + (c.n_semi,), dtype=np.uint8) for c in spec.inner_codes]
    interleaved = [pi.interleave(encode(assemble_input(c, u)))
                   for c, u, pi in zip(spec.aux_codes, aux_info, spec.interleavers)]
    for e, slots in zip(spec.edges, spec._routes):
        semi[e.inner_id][..., slots] = interleaved[e.aux_id][..., e.offset:e.offset + e.count]
    words = [encode(assemble_input(c, u, s)) for c, u, s in zip(spec.inner_codes, inner_info, semi)]
    return np.concatenate(words, axis=-1)


def _channel_slices(spec: AugmentedSpec, llr: np.ndarray) -> list[np.ndarray]:
    cuts = np.cumsum([c.n_total for c in spec.inner_codes])[:-1]
    return np.split(llr, cuts, axis=-1)


def _gather_aux_inputs(spec, inner_states) -> list[np.ndarray]:
    """Deinterleaved leftmost-stage inner L messages, one array per aux code."""
    B = inner_states[0].l_msg.shape[0]
    v = [np.zeros((B, c.n_total)) for c in spec.aux_codes]
    for e, slots in zip(spec.edges, spec._routes):
        pos = np.asarray(spec.inner_codes[e.inner_id].semi_set)[slots]
        v[e.aux_id][:, e.offset:e.offset + e.count] = inner_states[e.inner_id].l_msg[:, 0, pos]
    return [pi.deinterleave(x) for pi, x in zip(spec.interleavers, v)]


def _scatter_semi(spec, values_per_aux, B) -> list[np.ndarray]:
    """Route interleaved per-aux values onto inner semi slots."""
    semi = [np.zeros((B, c.n_semi)) for c in spec.inner_codes]
    for e, slots in zip(spec.edges, spec._routes):
        semi[e.inner_id][:, slots] = values_per_aux[e.aux_id][:, e.offset:e.offset + e.count]
    return semi


def _info_decisions(spec, inner_states, aux_states) -> np.ndarray:
    parts = [bp.hard(bp.posterior(s, 0))[:, list(c.info_set)]
             for c, s in zip(spec.aux_codes + spec.inner_codes, aux_states + inner_states)]
    return np.concatenate(parts, axis=-1)


def _consistent(spec, inner_states, aux_states) -> np.ndarray:
    """Per frame: every constituent code satisfies its G check and each aux
    codeword estimate matches the inner semi decisions it feeds."""
    ok = None
    u_inner = []
    for st in inner_states + aux_states:
        u, x = bp.harden(st)
        c = bp.converged(u, x)
        ok = c if ok is None else ok & c
        u_inner.append(u)
    x_aux = [pi.interleave(bp.harden(st)[1]) for pi, st in zip(spec.interleavers, aux_states)]
    for e, slots in zip(spec.edges, spec._routes):
        pos = np.asarray(spec.inner_codes[e.inner_id].semi_set)[slots]
        ok &= np.all(u_inner[e.inner_id][:, pos] == x_aux[e.aux_id][:, e.offset:e.offset + e.count], axis=-1)
    return ok


def decode_augmented(spec: AugmentedSpec, channel_llrs, max_iters: int = bp.DEFAULT_MAX_ITERS,
                     early_stop: bool = False, coupled: bool = True, trace=None):
    """Joint BP decoding of an augmented code.

    Each global iteration runs one BP iteration on every inner decoder, hands
    the leftmost-stage L messages of the semipolarized positions through the
    deinterleavers to the auxiliary decoders' right boundary, runs one BP
    iteration on every auxiliary decoder, and returns their rightmost-stage
    R messages through the interleavers as priors for the semipolarized
    inputs of the inner decoders.

    With ``coupled=False`` the exchange is skipped and semi priors stay 0.

    Parameters
    ----------
    channel_llrs : array_like, shape (total_n,) or (B, total_n)
    trace : callable, optional
        Called as ``trace(iteration, inner_bcs)`` after the inner step;
        used for instrumentation in tests.

    Returns
    -------
    info_hat : ndarray of uint8, shape (..., total_k)
    iters : int or ndarray of int
    """
    llr = np.asarray(channel_llrs, dtype=float)
    single = llr.ndim == 1
    llr = np.atleast_2d(llr)
    if llr.shape[-1] != spec.total_n:
        raise ConfigurationError(f"expected {spec.total_n} channel LLRs, got {llr.shape[-1]}")
    B = llr.shape[0]
    chan = _channel_slices(spec, llr)
    inner_states = [bp.BpState.zeros(c.n_total, B) for c in spec.inner_codes]
    aux_states = [bp.BpState.zeros(c.n_total, B) for c in spec.aux_codes]
    semi = [np.zeros((B, c.n_semi)) for c in spec.inner_codes]
    aux_left = [bp.frozen_priors(c, batch=(B,)) for c in spec.aux_codes]

    info_out = np.zeros((B, spec.total_k), dtype=np.uint8)
    aux_inputs = [np.zeros((B, c.n_total)) for c in spec.aux_codes]
    iters = np.full(B, max_iters, dtype=int)
    active = np.arange(B)

    def record(idx, sel):
        info_out[idx] = _info_decisions(spec, inner_states, aux_states)[sel]
        if not coupled:
            for store, v in zip(aux_inputs, _gather_aux_inputs(spec, inner_states)):
                store[idx] = v[sel]

    for it in range(1, max_iters + 1):
        bcs = [bp.BoundaryCondition(bp.frozen_priors(c, s), ch)
               for c, s, ch in zip(spec.inner_codes, semi, chan)]
        for st, bc in zip(inner_states, bcs):
            bp.iterate(st, bc, order="rl")
        if trace is not None:
            trace(it, bcs)
        if coupled and spec.aux_codes:
            aux_right = _gather_aux_inputs(spec, inner_states)
            for st, left, right in zip(aux_states, aux_left, aux_right):
                bp.iterate(st, bp.BoundaryCondition(left, right), order="lr")
            feedback = [pi.interleave(st.r_msg[:, st.n, :]) for pi, st in zip(spec.interleavers, aux_states)]
            semi = _scatter_semi(spec, feedback, len(active))
        if not early_stop:
            continue
        if coupled:
            done = _consistent(spec, inner_states, aux_states)
        else:
            done = np.logical_and.reduce([bp.converged(*bp.harden(st)) for st in inner_states])
        if np.any(done):
            record(active[done], done)
            iters[active[done]] = it
            keep = ~done
            active = active[keep]
            inner_states = [s.take(keep) for s in inner_states]
            aux_states = [s.take(keep) for s in aux_states]
            semi = [s[keep] for s in semi]
            chan = [c[keep] for c in chan]
            aux_left = [a[keep] for a in aux_left]
            if active.size == 0:
                break
    if active.size:
        record(active, slice(None))

    if not coupled and spec.aux_codes:
        # standalone aux decoding from the semipolarized-position messages
        k0 = 0
        for c, right in zip(spec.aux_codes, aux_inputs):
            u_hat, _ = bp.bp_decode(c, right, max_iters, early_stop)
            info_out[:, k0:k0 + c.k_info] = u_hat[:, list(c.info_set)]
            k0 += c.k_info
    if single:
        return info_out[0], int(iters[0])
    return info_out, iters


def uncoupled_baseline(spec: AugmentedSpec, channel_llrs, max_iters: int = bp.DEFAULT_MAX_ITERS,
                       early_stop: bool = False):
    """Decode every inner code on its own (semi priors fixed at 0), then the
    auxiliary codes once from the resulting semipolarized-position messages."""
    return decode_augmented(spec, channel_llrs, max_iters, early_stop, coupled=False)
