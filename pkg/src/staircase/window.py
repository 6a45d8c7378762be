"""Sliding-window iterative decoding in the syndrome domain."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from staircase.bch import DETECTED, NO_ERROR, DecodeOutcome, Status
from staircase.blocks import Stream, word_bit_location


@dataclass(frozen=True)
class DecoderConfig:
    W: int = 7
    v_max: int = 8

    def __post_init__(self):
        if self.W < 2:
            raise ValueError(f"window size must be >= 2, got {self.W}")
        if self.v_max < 1:
            raise ValueError(f"v_max must be >= 1, got {self.v_max}")


# Iteration modes. A pass decodes every word with a nonzero syndrome and
# commits the outcome only when the mode allows it.

@dataclass(frozen=True)
class Full:
    def allows(self, outcome: DecodeOutcome, locations) -> bool:
        return True


@dataclass(frozen=True)
class SingleErrorOnly:
    def allows(self, outcome, locations) -> bool:
        return len(outcome.positions) == 1


@dataclass(frozen=True)
class MaskedToPositions:
    positions: frozenset  # of (block, row, col)

    def allows(self, outcome, locations) -> bool:
        return all(loc in self.positions for loc in locations)


@dataclass(frozen=True)
class RestrictedToBlocks:
    first: int
    last: int  # inclusive

    def groups(self, lo: int, hi: int) -> range:
        # groups touching blocks first..last
        return range(max(lo, self.first - 1), min(hi, self.last + 1))

    def allows(self, outcome, locations) -> bool:
        return all(self.first <= b <= self.last for b, _, _ in locations)


@dataclass
class PassReport:
    corrected: int = 0
    bits_flipped: int = 0
    detected: int = 0
    skipped: int = 0
    residual: int = 0
    per_group: dict = field(default_factory=dict)  # g -> (corrected, detected)


@dataclass
class WindowReport:
    start: int
    passes: list

    @property
    def residual(self) -> int:
        return self.passes[-1].residual if self.passes else 0


class DecodingState:
    """A stream plus cached syndromes of every component word.

    With ``genie=True`` the component decoder consults ``reference`` and
    corrects a word only when its true error weight is at most ``t``; it
    never miscorrects. This exists for testing the resolving guarantee.
    """

    def __init__(self, stream: Stream, reference: Stream | None = None, genie: bool = False):
        if genie and reference is None:
            raise ValueError("genie decoding needs the reference stream")
        self.stream = stream
        self.code = stream.params.code
        self.m = stream.m
        self.reference = reference
        self.genie = genie
        self.syn = [[int(s) for s in stream.group_syndromes(g)] for g in range(stream.n_groups)]
        self.nonzero = [sum(1 for s in row if s) for row in self.syn]
        self.bits_flipped = 0

    @property
    def n_blocks(self) -> int:
        return len(self.stream)

    def flip(self, b: int, r: int, c: int):
        """Flip one block entry and update both crossing syndromes."""
        m = self.m
        self.stream.blocks[b, r, c] ^= 1
        self.bits_flipped += 1
        cols = self.code.columns
        if b >= 1:
            self._xor(b - 1, r, cols[m + c])
        if b < len(self.syn):
            self._xor(b, c, cols[r])

    def _xor(self, g: int, j: int, delta: int):
        row = self.syn[g]
        before = row[j]
        after = before ^ delta
        row[j] = after
        if not before:
            self.nonzero[g] += 1
        elif not after:
            self.nonzero[g] -= 1

    def decode_word(self, g: int, j: int) -> DecodeOutcome:
        s = self.syn[g][j]
        if not s:
            return NO_ERROR
        if not self.genie:
            return self.code.decode_syndrome(s)
        blocks = self.stream.blocks
        ref = self.reference.blocks
        err = np.concatenate([
            blocks[g][:, j] ^ ref[g][:, j],
            blocks[g + 1][j, :] ^ ref[g + 1][j, :],
        ])
        positions = tuple(int(u) for u in np.flatnonzero(err))
        if len(positions) <= self.code.t:
            return DecodeOutcome(Status.CORRECTED, positions)
        return DETECTED

    def residual(self, lo: int, hi: int) -> int:
        return sum(self.nonzero[lo:hi])

    def indicator(self, g: int) -> np.ndarray:
        return np.fromiter((s != 0 for s in self.syn[g]), dtype=np.uint8, count=self.m)

    def decode_pass(self, lo: int, hi: int, mode=Full()) -> PassReport:
        """One sweep over word groups ``lo .. hi-1`` in ascending order."""
        report = PassReport()
        m = self.m
        groups = mode.groups(lo, hi) if isinstance(mode, RestrictedToBlocks) else range(lo, hi)
        full = isinstance(mode, Full)
        for g in groups:
            if not self.nonzero[g]:
                report.per_group[g] = (0, 0)
                continue
            corrected = detected = 0
            row = self.syn[g]
            for j in range(m):
                if not row[j]:
                    continue
                outcome = self.decode_word(g, j)
                if outcome.status is Status.DETECTED:
                    detected += 1
                    continue
                if outcome.status is Status.NO_ERROR:
                    continue
                locations = [word_bit_location(m, g, j, u) for u in outcome.positions]
                if not full and not mode.allows(outcome, locations):
                    report.skipped += 1
                    continue
                for b, r, c in locations:
                    self.flip(b, r, c)
                corrected += 1
                report.bits_flipped += len(locations)
            report.corrected += corrected
            report.detected += detected
            report.per_group[g] = (corrected, detected)
        report.residual = self.residual(lo, hi)
        return report

    def decode_window(self, i: int, config: DecoderConfig) -> WindowReport:
        """Full passes over blocks ``i .. i+W-1`` until the last group is quiet."""
        if i + config.W > self.n_blocks:
            raise ValueError(f"window [{i}, {i + config.W}) exceeds {self.n_blocks} blocks")
        lo, hi = i, i + config.W - 1
        last = hi - 1
        passes = []
        for _ in range(config.v_max):
            report = self.decode_pass(lo, hi, Full())
            passes.append(report)
            if report.per_group.get(last, (0, 0)) == (0, 0):
                break
        return WindowReport(i, passes)


@dataclass
class DecodeReport:
    windows: int = 0
    passes: int = 0
    bits_flipped: int = 0
    block_errors: np.ndarray | None = None  # per-block bit errors vs reference
    residual_nonzero: int = 0
    resolutions: list = field(default_factory=list)

    @property
    def bit_errors(self) -> int | None:
        return None if self.block_errors is None else int(self.block_errors.sum())


def block_errors(stream: Stream, reference: Stream) -> np.ndarray:
    return (stream.blocks != reference.blocks).sum(axis=(1, 2))


def decode_stream_regular(
    stream: Stream,
    config: DecoderConfig = DecoderConfig(),
    reference: Stream | None = None,
    genie: bool = False,
) -> tuple[Stream, DecodeReport]:
    """Regular sliding-window decoding of a copy of ``stream``."""
    if len(stream) < config.W:
        raise ValueError(f"stream has {len(stream)} blocks, window needs {config.W}")
    out = stream.copy()
    state = DecodingState(out, reference, genie)
    report = DecodeReport()
    for i in range(len(out) - config.W + 1):
        window = state.decode_window(i, config)
        report.windows += 1
        report.passes += len(window.passes)
    report.bits_flipped = state.bits_flipped
    report.residual_nonzero = sum(state.nonzero)
    if reference is not None:
        report.block_errors = block_errors(out, reference)
    return out, report
