"""Stall-pattern resolving: syndrome indicators, masking matrices, bit-flip.

At window position ``i`` the decoder looks at word groups ``i``, ``i+1`` and
``i+2``. A stall pattern whose lowest block is ``B_(i+1)`` has its "central"
words in group ``i+1`` and its remaining words split between groups ``i``
and ``i+2``; the masking matrices of ``B_(i+1)`` and ``B_(i+2)`` together
cover all of its intersections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from staircase.blocks import Stream
from staircase.window import (
    DecoderConfig,
    DecodeReport,
    DecodingState,
    MaskedToPositions,
    RestrictedToBlocks,
    SingleErrorOnly,
    block_errors,
)

MASKED_PASSES = 2
RESTRICTED_PASSES = 2
RESOLVE_ROUNDS = 2


@dataclass(frozen=True)
class StallDiagnosis:
    i: int
    indicators: tuple  # syndrome indicators of groups i, i+1, i+2

    @property
    def deltas(self) -> tuple[int, int, int]:
        return tuple(int(s.sum()) for s in self.indicators)

    @property
    def delta0(self) -> int:
        return int(self.indicators[0].sum())

    @property
    def delta1(self) -> int:
        return int(self.indicators[1].sum())

    @property
    def delta2(self) -> int:
        return int(self.indicators[2].sum())

    def involved(self, k: int) -> list[int]:
        """Indices of nonzero-syndrome words in group ``i + k``."""
        return [int(j) for j in np.flatnonzero(self.indicators[k])]

    def masks(self) -> tuple[np.ndarray, np.ndarray]:
        """Masking matrices of blocks ``i+1`` and ``i+2``."""
        s0, s1, s2 = self.indicators
        return masking_matrix(s0, s1), masking_matrix(s1, s2)


@dataclass
class ResolutionReport:
    i: int
    outcome: str = "unresolved"  # resolved | unresolved | altered
    rounds: list = field(default_factory=list)  # (deltas, branch, bits flipped)


def syndrome_indicator(state: DecodingState, g: int) -> np.ndarray:
    """Entry ``j`` is 1 iff word ``j`` of group ``g`` has a nonzero syndrome."""
    return state.indicator(g)


def masking_matrix(s_prev, s_cur) -> np.ndarray:
    """Outer product ``s_prev * s_cur^T`` over GF(2)."""
    return np.outer(np.asarray(s_prev, dtype=np.uint8), np.asarray(s_cur, dtype=np.uint8))


def bit_flip(state: DecodingState, b: int, mask) -> int:
    """Add ``mask`` to block ``b`` modulo 2, keeping syndromes current."""
    mask = np.asarray(mask)
    if mask.shape != (state.m, state.m):
        raise ValueError(f"mask shape {mask.shape} does not match block size {state.m}")
    rows, cols = np.nonzero(mask)
    for r, c in zip(rows.tolist(), cols.tolist()):
        state.flip(b, r, c)
    return len(rows)


def diagnose(state: DecodingState, i: int) -> StallDiagnosis:
    if i + 3 >= state.n_blocks:
        raise ValueError(f"diagnosis at {i} needs blocks up to {i + 3}")
    return StallDiagnosis(i, tuple(state.indicator(g) for g in (i, i + 1, i + 2)))


def _pattern_positions(diag: StallDiagnosis) -> frozenset:
    i = diag.i
    m1, m2 = diag.masks()
    positions = {(i + 1, int(r), int(c)) for r, c in zip(*np.nonzero(m1))}
    positions |= {(i + 2, int(r), int(c)) for r, c in zip(*np.nonzero(m2))}
    return frozenset(positions)


def _flip_one_row(state: DecodingState, diag: StallDiagnosis) -> int:
    """Flip the intersections of a single involved row word.

    Candidates are the involved words of groups ``i`` (rows of ``B_(i+1)``)
    and ``i+2`` (columns of ``B_(i+2)``); the one crossing the most involved
    central words wins, lowest index first.
    """
    i = diag.i
    central = diag.involved(1)
    candidates = [(0, j) for j in diag.involved(0)] + [(2, j) for j in diag.involved(2)]
    if not candidates or not central:
        return 0
    # every candidate crosses all involved central words of the same group
    best = max(candidates, key=lambda kj: (len(central), -kj[0], -kj[1]))
    k, j = best
    for x in central:
        if k == 0:
            state.flip(i + 1, j, x)
        else:
            state.flip(i + 2, x, j)
    return len(central)


def resolve(
    state: DecodingState,
    i: int,
    config: DecoderConfig,
    diagnosis: StallDiagnosis | None = None,
) -> ResolutionReport:
    """Bit-flip a suspected stall pattern and clean up around it."""
    d_min = state.code.d_min
    lo, hi = i, min(i + config.W - 1, state.n_blocks - 1)
    report = ResolutionReport(i)
    initial = diagnosis if diagnosis is not None else diagnose(state, i)
    diag = initial
    for round_ in range(RESOLVE_ROUNDS):
        if round_:
            state.decode_pass(lo, hi, SingleErrorOnly())
            diag = diagnose(state, i)
        if diag.delta0 == 0:
            break
        d0, d1, d2 = diag.deltas
        mask = MaskedToPositions(_pattern_positions(diag))
        if d0 + d2 < d_min or d1 < d_min:
            m1, m2 = diag.masks()
            flipped = bit_flip(state, i + 1, m1) + bit_flip(state, i + 2, m2)
            branch = "full"
        else:
            flipped = _flip_one_row(state, diag)
            branch = "single_row"
        report.rounds.append(((d0, d1, d2), branch, flipped))
        for _ in range(MASKED_PASSES):
            state.decode_pass(i, i + 3, mask)
        restricted = RestrictedToBlocks(i + 1, i + 2)
        for _ in range(RESTRICTED_PASSES):
            state.decode_pass(i, i + 3, restricted)

    if state.residual(i, i + 3) == 0:
        report.outcome = "resolved"
    else:
        final = diagnose(state, i)
        same = all(np.array_equal(a, b) for a, b in zip(final.indicators, initial.indicators))
        report.outcome = "unresolved" if same else "altered"
    return report


def decode_stream_improved(
    stream: Stream,
    config: DecoderConfig = DecoderConfig(W=10),
    reference: Stream | None = None,
    genie: bool = False,
) -> tuple[Stream, DecodeReport]:
    """Sliding-window decoding with stall-pattern resolving, on a copy."""
    if len(stream) < config.W + 3:
        raise ValueError(f"stream has {len(stream)} blocks, needs at least {config.W + 3}")
    out = stream.copy()
    state = DecodingState(out, reference, genie)
    report = DecodeReport()
    for i in range(len(out) - config.W + 1):
        window = state.decode_window(i, config)
        report.windows += 1
        report.passes += len(window.passes)
        hi = i + config.W - 1
        if state.residual(i, hi):
            state.decode_pass(i, hi, SingleErrorOnly())
        if i + 3 >= len(out) or not state.nonzero[i]:
            continue
        diag = diagnose(state, i)
        if diag.delta0:
            report.resolutions.append(resolve(state, i, config, diag))
    report.bits_flipped = state.bits_flipped
    report.residual_nonzero = sum(state.nonzero)
    if reference is not None:
        report.block_errors = block_errors(out, reference)
    return out, report
