"""Belief-propagation decoding on the polar factor graph.

The graph has ``n + 1`` stages of ``N`` nodes. Stage 0 is the left (input,
a-priori) side and stage ``n`` the right (channel) side. Between stage ``s``
and ``s + 1`` sit ``N / 2`` processing elements with span ``h = 2**s``, the
same butterflies, in the same order, as :func:`polaraug.codec.encode`.
Span 1 next to the inputs and span ``N / 2`` next to the channel is the
layer order that matches the successive-cancellation recursion; BP on the
reversed layer order performs far worse for Bhattacharyya-constructed codes.

All arrays may carry leading batch axes; every frame is processed
independently, so results do not depend on how frames are batched.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import encode
from .construction import CodeSpec, log2_exact

CLIP = 40.0
FROZEN_LLR = CLIP
DEFAULT_MAX_ITERS = 60


def box_plus(a, b):
    """``ln((1 + e^(a+b)) / (e^a + e^b))`` evaluated without overflow."""
    a = np.clip(a, -CLIP, CLIP)
    b = np.clip(b, -CLIP, CLIP)
    out = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    out += np.log1p(np.exp(-np.abs(a + b)))
    out -= np.log1p(np.exp(-np.abs(a - b)))
    return out


def pe_update(l_in1, l_in2, r_in1, r_in2):
    """Message update of one processing element.

    ``l_in*`` arrive from the right-hand nodes, ``r_in*`` from the left-hand
    nodes. Returns ``(l_out1, l_out2, r_out1, r_out2)``; the ``l_out``
    go to the left nodes and the ``r_out`` to the right nodes.
    """
    lr2 = np.add(l_in2, r_in2)
    f11 = box_plus(r_in1, l_in1)
    l_out1 = box_plus(l_in1, lr2)
    r_out1 = box_plus(r_in1, lr2)
    l_out2 = np.clip(f11 + l_in2, -CLIP, CLIP)
    r_out2 = np.clip(f11 + r_in2, -CLIP, CLIP)
    return l_out1, l_out2, r_out1, r_out2


@dataclass
class BpState:
    """L (right-to-left) and R (left-to-right) messages, shape ``(..., n+1, N)``."""

    n: int
    l_msg: np.ndarray
    r_msg: np.ndarray

    @classmethod
    def zeros(cls, N: int, batch: tuple[int, ...] | int = ()) -> "BpState":
        n = log2_exact(N)
        if isinstance(batch, int):
            batch = (batch,)
        shape = tuple(batch) + (n + 1, N)
        return cls(n, np.zeros(shape), np.zeros(shape))

    @property
    def N(self) -> int:
        return self.l_msg.shape[-1]

    def copy(self) -> "BpState":
        return BpState(self.n, self.l_msg.copy(), self.r_msg.copy())

    def take(self, idx) -> "BpState":
        """Frames ``idx`` along the first batch axis."""
        return BpState(self.n, self.l_msg[idx], self.r_msg[idx])


@dataclass
class BoundaryCondition:
    """A-priori LLRs on the left boundary and channel LLRs on the right."""

    left_priors: np.ndarray
    right_priors: np.ndarray


def frozen_priors(spec: CodeSpec, semi_priors=None, batch: tuple[int, ...] = ()) -> np.ndarray:
    """Left-boundary priors: +FROZEN_LLR on frozen, 0 on info, given values on semi."""
    if semi_priors is not None and not batch:
        batch = np.shape(semi_priors)[:-1]
    p = np.zeros(tuple(batch) + (spec.n_total,))
    p[..., list(spec.frozen_set)] = FROZEN_LLR
    if semi_priors is not None and spec.n_semi:
        p[..., list(spec.semi_set)] = semi_priors
    return p


def _view(a: np.ndarray, stage: int, layer: int, n: int) -> np.ndarray:
    # nodes of `stage` grouped as (block, pair member, offset) for PE layer `layer`
    N = a.shape[-1]
    h = 1 << layer
    return a[..., stage, :].reshape(a.shape[:-2] + (N // (2 * h), 2, h))


def r_sweep(state: BpState) -> None:
    """Propagate R messages from stage 0 to stage n."""
    n, L, R = state.n, state.l_msg, state.r_msg
    for s in range(n):
        rl, rr, lr = _view(R, s, s, n), _view(R, s + 1, s, n), _view(L, s + 1, s, n)
        lr2 = lr[..., 1, :] + rl[..., 1, :]
        rr[..., 0, :] = box_plus(rl[..., 0, :], lr2)
        rr[..., 1, :] = np.clip(box_plus(rl[..., 0, :], lr[..., 0, :]) + rl[..., 1, :], -CLIP, CLIP)


def l_sweep(state: BpState) -> None:
    """Propagate L messages from stage n to stage 0."""
    n, L, R = state.n, state.l_msg, state.r_msg
    for s in range(n - 1, -1, -1):
        ll, lr, rl = _view(L, s, s, n), _view(L, s + 1, s, n), _view(R, s, s, n)
        lr2 = lr[..., 1, :] + rl[..., 1, :]
        ll[..., 0, :] = box_plus(lr[..., 0, :], lr2)
        ll[..., 1, :] = np.clip(box_plus(rl[..., 0, :], lr[..., 0, :]) + lr[..., 1, :], -CLIP, CLIP)


def inject(state: BpState, bc: BoundaryCondition) -> None:
    state.r_msg[..., 0, :] = np.clip(bc.left_priors, -CLIP, CLIP)
    state.l_msg[..., state.n, :] = np.clip(bc.right_priors, -CLIP, CLIP)


def iterate(state: BpState, bc: BoundaryCondition, order: str = "rl") -> BpState:
    """One BP iteration, updating ``state`` in place.

    ``order="rl"`` runs the R sweep then the L sweep; ``"lr"`` the reverse.
    The boundary condition is written into the boundary stages first.
    """
    inject(state, bc)
    sweeps = {"rl": (r_sweep, l_sweep), "lr": (l_sweep, r_sweep)}[order]
    for sweep in sweeps:
        sweep(state)
    return state


def posterior(state: BpState, stage: int) -> np.ndarray:
    return state.l_msg[..., stage, :] + state.r_msg[..., stage, :]


def hard(llr) -> np.ndarray:
    """Bit 1 for strictly negative LLR, 0 otherwise (ties decide 0)."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def harden(state: BpState, bc: BoundaryCondition | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Hard decisions ``(u_hat, x_hat)`` at the left and right boundaries."""
    return hard(posterior(state, 0)), hard(posterior(state, state.n))


def converged(u_hat, x_hat) -> np.ndarray | bool:
    """``encode(u_hat) == x_hat`` per frame."""
    ok = np.all(encode(u_hat) == np.asarray(x_hat), axis=-1)
    return bool(ok) if np.ndim(ok) == 0 else ok


def pe_count(lengths) -> int:
    """Total processing elements ``sum(log2(N_i) * N_i / 2)``."""
    return sum(log2_exact(N) * N // 2 for N in lengths)


def bp_decode(spec: CodeSpec, channel_llrs, max_iters: int = DEFAULT_MAX_ITERS,
              early_stop: bool = False):
    """Decode a plain polar code.

    Parameters
    ----------
    spec : CodeSpec
        Code with an empty semipolarized set, or with semi positions treated
        as unknown (zero prior).
    channel_llrs : array_like, shape (N,) or (B, N)
    max_iters : int
    early_stop : bool
        Stop a frame once its decisions satisfy :func:`converged`.

    Returns
    -------
    u_hat : ndarray of uint8, shape (..., N)
        Hard decisions on all input positions.
    iters : ndarray of int, shape (...)
        Iterations used per frame.
    """
    llr = np.asarray(channel_llrs, dtype=float)
    single = llr.ndim == 1
    llr = np.atleast_2d(llr)
    B = llr.shape[0]
    state = BpState.zeros(spec.n_total, B)
    bc = BoundaryCondition(frozen_priors(spec, batch=(B,)), llr)
    u_out = np.zeros((B, spec.n_total), dtype=np.uint8)
    iters = np.full(B, max_iters, dtype=int)
    active = np.arange(B)
    for it in range(1, max_iters + 1):
        iterate(state, bc)
        if not early_stop:
            continue
        u_hat, x_hat = harden(state)
        done = converged(u_hat, x_hat)
        if np.any(done):
            u_out[active[done]] = u_hat[done]
            iters[active[done]] = it
            keep = ~done
            active = active[keep]
            state = state.take(keep)
            bc = BoundaryCondition(bc.left_priors[keep], bc.right_priors[keep])
            if active.size == 0:
                break
    if active.size:
        u_out[active] = harden(state)[0]
    if single:
        return u_out[0], int(iters[0])
    return u_out, iters
