"""Staircase block structure, stream encoding and component-word geometry.

Word ``j`` of word group ``g`` is row ``j`` of ``[B_g^T  B_(g+1)]``: bit
``u < m`` is ``B_g[u, j]`` and bit ``u >= m`` is ``B_(g+1)[j, u - m]``. A
stream of ``N`` blocks therefore has ``N - 1`` word groups, and block entry
``B_b[r, c]`` is protected by word ``(b - 1, r)`` and word ``(b, c)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from staircase.bch import BchCode


@dataclass(frozen=True)
class StaircaseParams:
    code: BchCode
    m: int = field(init=False)
    rate: Fraction = field(init=False)
    d_stair: int = field(init=False)

    def __post_init__(self):
        code = self.code
        if code.n % 2:
            raise ValueError(f"component length must be even, got n={code.n}")
        m = code.n // 2
        if code.k <= m:
            raise ValueError(f"staircase encoding needs k > n/2 (k={code.k}, m={m})")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "rate", Fraction(code.k - m, code.n - m))
        object.__setattr__(self, "d_stair", code.d_min ** 2)

    @property
    def payload_bits(self) -> int:
        """Information bits carried by each block after the first."""
        return self.m * (self.code.k - self.m)


def word_bit_location(m: int, g: int, j: int, u: int) -> tuple[int, int, int]:
    """Block coordinates ``(b, r, c)`` of bit ``u`` of word ``(g, j)``."""
    if u < m:
        return g, u, j
    return g + 1, j, u - m


class Stream:
    """A finite run of staircase blocks.

    ``blocks`` is an ``(N, m, m)`` uint8 array of 0/1 values owned by the
    stream; decoders mutate it in place.
    """

    def __init__(self, params: StaircaseParams, blocks):
        blocks = np.asarray(blocks, dtype=np.uint8)
        m = params.m
        if blocks.ndim != 3 or blocks.shape[1:] != (m, m):
            raise ValueError(f"blocks must have shape (N, {m}, {m}), got {blocks.shape}")
        self.params = params
        self.blocks = blocks

    def __len__(self):
        return self.blocks.shape[0]

    def __repr__(self):
        return f"Stream(blocks={len(self)}, m={self.params.m})"

    @property
    def m(self) -> int:
        return self.params.m

    @property
    def n_groups(self) -> int:
        return len(self) - 1

    def copy(self) -> "Stream":
        return Stream(self.params, self.blocks.copy())

    def group_words(self, g: int) -> np.ndarray:
        """All ``m`` words of group ``g`` as a fresh ``(m, n)`` array."""
        return np.concatenate([self.blocks[g].T, self.blocks[g + 1]], axis=1)

    def group_syndromes(self, g: int) -> np.ndarray:
        return self.params.code.syndromes(self.group_words(g))

    def payload(self) -> np.ndarray:
        """Systematic information bits of blocks 1..N-1, flattened."""
        width = self.params.code.k - self.m
        return self.blocks[1:, :, :width].reshape(-1).copy()


class ComponentWord:
    """Writable view of word ``j`` of group ``g``; writes land in the blocks."""

    def __init__(self, stream: Stream, g: int, j: int):
        if not 0 <= g < stream.n_groups:
            raise IndexError(f"word group {g} outside [0, {stream.n_groups})")
        if not 0 <= j < stream.m:
            raise IndexError(f"word index {j} outside [0, {stream.m})")
        self.stream = stream
        self.g = g
        self.j = j

    def __len__(self):
        return 2 * self.stream.m

    def _loc(self, u: int):
        if not 0 <= u < 2 * self.stream.m:
            raise IndexError(u)
        return word_bit_location(self.stream.m, self.g, self.j, u)

    def __getitem__(self, u: int) -> int:
        b, r, c = self._loc(u)
        return int(self.stream.blocks[b, r, c])

    def __setitem__(self, u: int, value: int):
        b, r, c = self._loc(u)
        self.stream.blocks[b, r, c] = value & 1

    def flip(self, u: int):
        b, r, c = self._loc(u)
        self.stream.blocks[b, r, c] ^= 1

    def __array__(self, dtype=None, copy=None):
        blocks = self.stream.blocks
        out = np.concatenate([blocks[self.g][:, self.j], blocks[self.g + 1][self.j, :]])
        return out if dtype is None else out.astype(dtype)


def component_word(stream: Stream, g: int, j: int) -> ComponentWord:
    return ComponentWord(stream, g, j)


def encode_stream(params: StaircaseParams, info) -> Stream:
    """Encode a payload into ``1 + len(info) / payload_bits`` blocks.

    Block 0 is the all-zero initial block.
    """
    info = np.asarray(info, dtype=np.uint8).reshape(-1)
    per_block = params.payload_bits
    if info.size % per_block:
        raise ValueError(
            f"payload length {info.size} is not a multiple of {per_block} bits per block"
        )
    m = params.m
    width = params.code.k - m
    count = info.size // per_block
    blocks = np.zeros((count + 1, m, m), dtype=np.uint8)
    chunks = info.reshape(count, m, width)
    for i in range(1, count + 1):
        rows = np.concatenate([blocks[i - 1].T, chunks[i - 1]], axis=1)
        blocks[i] = params.code.encode(rows)[:, m:]
    return Stream(params, blocks)


def validate_stream(stream: Stream) -> np.ndarray:
    """Boolean ``(N - 1, m)`` array, True where the word's syndrome is zero."""
    if len(stream) < 2:
        raise ValueError("need at least two blocks")
    return np.stack([stream.group_syndromes(g) == 0 for g in range(stream.n_groups)])
