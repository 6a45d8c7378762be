"""Channels, stall-pattern injection, solved-fraction campaigns and floor curves."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from staircase import floor
from staircase.blocks import StaircaseParams, Stream, encode_stream
from staircase.floor import PatternShape
from staircase.resolver import decode_stream_improved
from staircase.window import DecoderConfig, decode_stream_regular

# Solved fractions for the m=255, t=2 staircase code used when no campaign
# results are supplied: (K, L, eps) -> fraction.
DEFAULT_SOLVED_FRACTIONS = {
    (3, 3, 9): 1.0,
    (3, 4, 12): 0.51,
    (4, 3, 12): 0.56,
    (4, 4, 12): 1.0,
    (4, 4, 13): 1.0,
    (4, 4, 14): 0.79,
    (5, 5, 15): 1.0,
    (5, 5, 16): 0.999,
    (5, 5, 17): 0.974,
    (5, 5, 18): 0.951,
    (6, 6, 18): 0.999,
    (6, 6, 19): 0.999,
    (6, 6, 20): 0.989,
    (7, 7, 21): 1.0,
    (7, 7, 22): 0.999,
    (7, 7, 23): 0.99,
}

DEFAULT_P = 5e-3
DEFAULT_XI = 1.6e-3


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Generator for trial ``trial``; a pure function of both arguments."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, trial]))


# -- binary symmetric channel -----------------------------------------------

def bsc_apply(stream: Stream, p: float, seed: int) -> tuple[Stream, np.ndarray]:
    """Flip every transmitted bit with probability ``p``.

    Block 0 is the known all-zero start block and is not transmitted.
    Returns the corrupted copy and the error mask.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"crossover probability must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    mask = np.zeros_like(stream.blocks)
    mask[1:] = rng.random(stream.blocks[1:].shape) < p
    return Stream(stream.params, stream.blocks ^ mask), mask


@dataclass
class BscRun:
    p: float
    seed: int
    data_blocks: int
    payload_bits: int
    input_errors: int
    output_errors: int

    @property
    def ber_in(self) -> float:
        return self.input_errors / self.payload_bits

    @property
    def ber_out(self) -> float:
        return self.output_errors / self.payload_bits


def simulate_bsc(
    params: StaircaseParams,
    p: float,
    data_blocks: int,
    seed: int,
    config: DecoderConfig = DecoderConfig(),
    improved: bool = False,
) -> BscRun:
    """Encode random data, pass it through a BSC and decode.

    ``W - 1`` (plus 3 for the improved decoder) zero-payload blocks are
    appended so the last data blocks see full windows; only data-block
    payload bits are counted.
    """
    rng = np.random.default_rng(seed)
    tail = config.W - 1 + (3 if improved else 0)
    payload = rng.integers(0, 2, (data_blocks, params.payload_bits), dtype=np.uint8)
    payload = np.concatenate([payload, np.zeros((tail, params.payload_bits), np.uint8)])
    reference = encode_stream(params, payload)
    received, _ = bsc_apply(reference, p, int(rng.integers(2**63)))
    decode = decode_stream_improved if improved else decode_stream_regular
    decoded, _ = decode(received, config)
    width = params.code.k - params.m
    data = slice(1, 1 + data_blocks)
    ref = reference.blocks[data, :, :width]
    return BscRun(
        p=p,
        seed=seed,
        data_blocks=data_blocks,
        payload_bits=ref.size,
        input_errors=int((received.blocks[data, :, :width] != ref).sum()),
        output_errors=int((decoded.blocks[data, :, :width] != ref).sum()),
    )


# -- stall-pattern injection ------------------------------------------------

def _sample_margins(shape: PatternShape, rng: np.random.Generator) -> tuple[list, list]:
    classes = list(floor.margin_classes(shape))
    weights = [mult * floor.contingency_count(r, s) for r, s, mult in classes]
    total = sum(weights)
    x = int(rng.integers(total)) if total < 2**63 else int(rng.random() * total)
    for (r, s, _), w in zip(classes, weights):
        if x < w:
            break
        x -= w
    r, s = list(r), list(s)
    rng.shuffle(r)
    rng.shuffle(s)
    return r, s


def _sample_with_margins(r, s, rng: np.random.Generator) -> np.ndarray:
    """Uniform binary matrix with row sums ``r`` and column sums ``s``."""
    K, L = len(r), len(s)
    mat = np.zeros((K, L), dtype=np.uint8)
    residual = list(r)
    for j in range(L):
        rest = tuple(sorted(s[j + 1:], reverse=True))
        options, weights = [], []
        for rows in itertools.combinations([i for i in range(K) if residual[i]], s[j]):
            after = residual[:]
            for i in rows:
                after[i] -= 1
            w = floor.contingency_count(after, rest) if rest else int(not any(after))
            if w:
                options.append(rows)
                weights.append(w)
        total = sum(weights)
        x = int(rng.integers(total)) if total < 2**63 else int(rng.random() * total)
        for rows, w in zip(options, weights):
            if x < w:
                break
            x -= w
        for i in rows:
            mat[i, j] = 1
            residual[i] -= 1
    return mat


def sample_stall_matrix(shape: PatternShape, rng: np.random.Generator, method: str = "exact") -> np.ndarray:
    """A ``K x L`` matrix drawn uniformly from the stall patterns of ``shape``.

    ``"rejection"`` draws uniform weight-eps matrices until one qualifies;
    ``"exact"`` samples margins and then a matrix directly, which gives the
    same distribution without the rejection cost.
    """
    K, L, eps, t = shape.K, shape.L, shape.eps, shape.t
    if method == "rejection":
        while True:
            flat = np.zeros(K * L, dtype=np.uint8)
            flat[rng.choice(K * L, eps, replace=False)] = 1
            mat = flat.reshape(K, L)
            if (mat.sum(1) >= t + 1).all() and (mat.sum(0) >= t + 1).all():
                return mat
    if method != "exact":
        raise ValueError(f"unknown sampling method {method!r}")
    r, s = _sample_margins(shape, rng)
    return _sample_with_margins(r, s, rng)


@dataclass
class InjectionSpec:
    shape: PatternShape
    anchor: int  # lowest block holding the pattern
    split: int  # rows taken from the group before the central words
    rows_before: list  # row indices of B_anchor
    rows_after: list  # column indices of B_(anchor+1)
    central: list  # word indices of group ``anchor``
    matrix: np.ndarray
    positions: list = field(default_factory=list)  # (block, row, col)


def sample_stall_pattern(
    shape: PatternShape,
    m: int,
    rng: np.random.Generator,
    anchor: int = 1,
    method: str = "exact",
    split: str = "uniform",
) -> InjectionSpec:
    """Place a uniformly drawn stall pattern around block ``anchor``.

    ``a`` of the ``K`` rows are rows of ``B_anchor``, the rest are columns
    of ``B_(anchor+1)``. With ``split="uniform"`` ``a`` is uniform on
    ``1..K``; with ``split="placements"`` it is drawn in proportion to
    ``C(m, a) C(m, K - a)`` so every placement counted by
    :func:`floor.count_positions` is equally likely.
    """
    K, L = shape.K, shape.L
    if K > 2 * m or L > m:
        raise ValueError(f"({K},{L}) pattern does not fit m={m}")
    splits = [a for a in range(1, K + 1) if a <= m and K - a <= m]
    if split == "uniform":
        weights = np.ones(len(splits))
    elif split == "placements":
        weights = np.array([math.comb(m, a) * math.comb(m, K - a) for a in splits], dtype=float)
    else:
        raise ValueError(f"unknown split {split!r}")
    a = int(rng.choice(splits, p=weights / weights.sum()))
    matrix = sample_stall_matrix(shape, rng, method)
    rows_before = sorted(int(x) for x in rng.choice(m, a, replace=False))
    rows_after = sorted(int(x) for x in rng.choice(m, K - a, replace=False))
    central = sorted(int(x) for x in rng.choice(m, L, replace=False))
    positions = []
    for k, l in zip(*np.nonzero(matrix)):
        j = central[l]
        if k < a:
            positions.append((anchor, rows_before[k], j))
        else:
            positions.append((anchor + 1, j, rows_after[k - a]))
    return InjectionSpec(shape, anchor, a, rows_before, rows_after, central, matrix, positions)


def inject(stream: Stream, spec: InjectionSpec) -> Stream:
    out = stream.copy()
    for b, r, c in spec.positions:
        out.blocks[b, r, c] ^= 1
    return out


# -- solved-fraction campaigns -----------------------------------------------

@dataclass
class CampaignReport:
    shape: PatternShape
    trials: int
    resolved: int
    seed: int
    clean_stream: int = 0  # trials whose whole decoded stream matched
    elapsed: float = 0.0
    outcomes: list = field(default_factory=list, repr=False)

    @property
    def unresolved(self) -> int:
        return self.trials - self.resolved

    @property
    def solved_fraction(self) -> float:
        return self.resolved / self.trials

    @property
    def half_width(self) -> float:
        """95% normal-approximation confidence half-width."""
        f = self.solved_fraction
        return 1.96 * math.sqrt(f * (1 - f) / self.trials)


def run_trial(
    params: StaircaseParams,
    shape: PatternShape,
    config: DecoderConfig,
    master_seed: int,
    trial: int,
    payload: str = "zero",
    genie: bool = False,
    anchor: int | None = None,
) -> tuple[bool, bool]:
    """Inject one pattern, decode, and report ``(blocks clean, stream clean)``."""
    rng = trial_rng(master_seed, trial)
    margin = config.W + 3
    if anchor is None:
        anchor = margin
    n_blocks = anchor + 2 + margin
    if payload == "zero":
        reference = Stream(params, np.zeros((n_blocks, params.m, params.m), np.uint8))
    elif payload == "random":
        bits = rng.integers(0, 2, (n_blocks - 1) * params.payload_bits, dtype=np.uint8)
        reference = encode_stream(params, bits)
    else:
        raise ValueError(f"unknown payload mode {payload!r}")
    spec = sample_stall_pattern(shape, params.m, rng, anchor=anchor)
    received = inject(reference, spec)
    decoded, report = decode_stream_improved(received, config, reference=reference, genie=genie)
    errors = report.block_errors
    return bool(errors[anchor] == 0 and errors[anchor + 1] == 0), bool(errors.sum() == 0)


def run_solved_fraction(
    shape: PatternShape,
    params: StaircaseParams,
    trials: int,
    seed: int,
    config: DecoderConfig = DecoderConfig(W=10),
    payload: str = "zero",
    genie: bool = False,
) -> CampaignReport:
    """Fraction of injected stall patterns the improved decoder clears.

    Decoding only sees syndromes, so an all-zero reference stream behaves
    exactly like a random codeword stream (``payload="random"``).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if shape.t != params.code.t:
        raise ValueError("pattern shape and component code disagree on t")
    start = time.perf_counter()
    outcomes = [run_trial(params, shape, config, seed, i, payload, genie) for i in range(trials)]
    return CampaignReport(
        shape=shape,
        trials=trials,
        resolved=sum(ok for ok, _ in outcomes),
        seed=seed,
        clean_stream=sum(clean for _, clean in outcomes),
        elapsed=time.perf_counter() - start,
        outcomes=[ok for ok, _ in outcomes],
    )


# -- capacity and conjectured floors ----------------------------------------

def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def parse_rate(rate) -> Fraction:
    return Fraction(rate) if not isinstance(rate, float) else Fraction(rate).limit_denominator(10**9)


def capacity_threshold(rate, tol: float = 1e-12) -> float:
    """Crossover probability at which BSC capacity equals ``rate``."""
    r = float(parse_rate(rate))
    if not 0.0 < r < 1.0:
        raise ValueError(f"rate must be in (0, 1), got {rate}")
    target = 1.0 - r
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if binary_entropy(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def floor_terms(solved: dict, m: int, t: int, p: float, xi: float) -> list:
    return [
        floor.FloorTerm(PatternShape(K, L, eps, t), m, p, xi, fraction)
        for (K, L, eps), fraction in solved.items()
    ]


def conjectured_floor_curve(
    solved: dict,
    m: int,
    t: int,
    xi: float,
    p_grid,
) -> list[tuple[float, float, float]]:
    """Rows ``(p, regular, improved)`` of formula-based output BER."""
    rows = []
    counts = {key: floor.exact_count(PatternShape(*key, t)) for key in solved}
    for p in p_grid:
        regular = improved = 0.0
        for key, fraction in solved.items():
            shape = PatternShape(*key, t)
            contribution = floor.p_c_new(shape, m, p, xi, counts[key])
            regular += contribution
            improved += (1.0 - fraction) * contribution
        rows.append((float(p), regular, improved))
    return rows
