"""Polar encoding with the generator ``G = F^{(x)n}``, ``F = [[1, 0], [1, 1]]``.

No bit-reversal permutation is applied; the BP factor graph in
:mod:`polaraug.bp` uses the same natural-order butterfly.
"""
from __future__ import annotations

import numpy as np

from .construction import CodeSpec, ConfigurationError, log2_exact


def _as_bits(u) -> np.ndarray:
    u = np.asarray(u)
    if u.size and not np.all((u == 0) | (u == 1)):
        raise ConfigurationError("bit vectors may only contain 0 and 1")
    return u.astype(np.uint8)


def encode(u) -> np.ndarray:
    """Encode ``u`` (shape ``(..., N)``) as ``u @ G`` over GF(2).

    Works on a single vector or a batch along leading axes.
    """
    x = _as_bits(u).copy()
    N = x.shape[-1]
    n = log2_exact(N)
    lead = x.shape[:-1]
    for s in range(n):
        h = 1 << s
        v = x.reshape(lead + (N // (2 * h), 2, h))
        v[..., 0, :] ^= v[..., 1, :]
    return x


def generator_matrix(N: int) -> np.ndarray:
    """Materialized ``F^{(x)n}`` as a uint8 array."""
    n = log2_exact(N)
    if N > 1 << 12:
        raise ConfigurationError("matrix oracle limited to N <= 4096")
    F = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    G = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        G = np.kron(G, F)
    return G


def encode_matrix_oracle(u) -> np.ndarray:
    """Reference encoder: explicit vector-matrix product mod 2. O(N^2)."""
    u = _as_bits(u)
    G = generator_matrix(u.shape[-1])
    # float product is exact here: sums never exceed 4096
    return np.fmod(u.astype(float) @ G.astype(float), 2.0).astype(np.uint8)


def assemble_input(spec: CodeSpec, info_bits, semi_bits=()) -> np.ndarray:
    """Place info and semi bits on their channels; frozen channels get 0.

    Accepts batches: ``info_bits`` of shape ``(..., k_info)``.
    """
    info = _as_bits(info_bits)
    semi = _as_bits(semi_bits)
    if info.shape[-1] != spec.k_info:
        raise ConfigurationError(f"expected {spec.k_info} info bits, got {info.shape[-1]}")
    if spec.n_semi and semi.shape[-1] != spec.n_semi:
        raise ConfigurationError(f"expected {spec.n_semi} semi bits, got {semi.shape[-1]}")
    if not spec.n_semi and semi.size:
        raise ConfigurationError("code has no semipolarized positions")
    u = np.zeros(info.shape[:-1] + (spec.n_total,), dtype=np.uint8)
    u[..., list(spec.info_set)] = info
    if spec.n_semi:
        u[..., list(spec.semi_set)] = semi
    return u
