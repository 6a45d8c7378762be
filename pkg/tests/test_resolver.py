import numpy as np
import pytest

from staircase.blocks import Stream
from staircase.floor import PatternShape
from staircase.resolver import (
    bit_flip,
    decode_stream_improved,
    diagnose,
    masking_matrix,
    resolve,
    syndrome_indicator,
)
from staircase.sim import inject, run_trial, sample_stall_pattern
from staircase.window import DecoderConfig, DecodingState, decode_stream_regular


def zero_stream(params, n_blocks):
    return Stream(params, np.zeros((n_blocks, params.m, params.m), np.uint8))


def injected(params, key, seed, anchor=3, n_blocks=16):
    ref = zero_stream(params, n_blocks)
    spec = sample_stall_pattern(PatternShape(*key, params.code.t), params.m, np.random.default_rng(seed), anchor=anchor)
    return ref, spec, inject(ref, spec)


def test_masking_matrix_is_the_outer_product():
    s0 = np.array([1, 0, 1, 0])
    s1 = np.array([0, 1, 1, 0])
    expected = [[s0[r] & s1[c] for c in range(4)] for r in range(4)]
    assert masking_matrix(s0, s1).tolist() == expected


def test_bit_flip_is_an_involution(toy_params):
    ref, _, received = injected(toy_params, (4, 4, 13), 0)
    state = DecodingState(received.copy())
    blocks = state.stream.blocks.copy()
    syn = [row[:] for row in state.syn]
    mask = np.random.default_rng(1).integers(0, 2, (16, 16))
    assert bit_flip(state, 4, mask) == mask.sum()
    assert bit_flip(state, 4, mask) == mask.sum()
    assert np.array_equal(state.stream.blocks, blocks) and state.syn == syn
    with pytest.raises(ValueError):
        bit_flip(state, 4, np.ones((3, 3)))


@pytest.mark.parametrize("key", [(3, 3, 9), (4, 4, 13), (5, 4, 17), (4, 5, 16)])
@pytest.mark.parametrize("seed", range(4))
def test_indicators_and_masks_cover_the_pattern(toy_params, key, seed):
    ref, spec, received = injected(toy_params, key, seed)
    state = DecodingState(received)
    diag = diagnose(state, spec.anchor - 1)
    K, L, _ = key
    assert diag.deltas == (spec.split, L, K - spec.split)
    assert np.array_equal(diag.indicators[1], syndrome_indicator(state, spec.anchor))
    m1, m2 = diag.masks()
    covered = {(spec.anchor, int(r), int(c)) for r, c in zip(*np.nonzero(m1))}
    covered |= {(spec.anchor + 1, int(r), int(c)) for r, c in zip(*np.nonzero(m2))}
    assert len(covered) == K * L
    assert set(spec.positions) <= covered


def test_minimal_stall_is_cleared_by_one_flip(toy_params):
    ref, spec, received = injected(toy_params, (3, 3, 9), 2)
    state = DecodingState(received)
    report = resolve(state, spec.anchor - 1, DecoderConfig(W=10))
    assert report.rounds[0][1:] == ("full", 9)
    assert report.outcome == "resolved"
    assert np.array_equal(received.blocks, ref.blocks)


def test_full_flip_leaves_the_complement(toy_params):
    # a (4,4) pattern of weight 12 leaves KL - eps = 4 errors after the flip
    ref, spec, received = injected(toy_params, (4, 4, 12), 3)
    state = DecodingState(received)
    diag = diagnose(state, spec.anchor - 1)
    m1, m2 = diag.masks()
    bit_flip(state, spec.anchor, m1)
    bit_flip(state, spec.anchor + 1, m2)
    assert (received.blocks != ref.blocks).sum() == 4


@pytest.mark.parametrize("seed", range(3))
def test_large_pattern_takes_the_single_row_branch(toy_params, seed):
    ref, spec, received = injected(toy_params, (6, 6, 18), seed)
    # delta0 + delta2 = K = 6 and delta1 = L = 6 both reach d_min
    state = DecodingState(received, ref, genie=True)
    report = resolve(state, spec.anchor - 1, DecoderConfig(W=10))
    assert report.rounds[0][1] == "single_row"
    assert report.outcome == "resolved"
    assert np.array_equal(received.blocks, ref.blocks)


def test_no_diagnosis_without_room(toy_params):
    state = DecodingState(zero_stream(toy_params, 5))
    with pytest.raises(ValueError):
        diagnose(state, 2)


@pytest.mark.parametrize("key", [(3, 3, 9), (4, 4, 16), (5, 3, 15), (5, 5, 19)])
def test_genie_resolves_theorem_shapes(toy_params, key):
    config = DecoderConfig(W=10)
    for trial in range(20):
        assert run_trial(toy_params, PatternShape(*key, 2), config, 5, trial, genie=True)[0]


def test_improved_decoder_clears_what_the_regular_one_cannot(big_params):
    ref, spec, received = injected(big_params, (3, 3, 9), 4, anchor=13, n_blocks=28)
    _, regular = decode_stream_regular(received, DecoderConfig(W=10), reference=ref)
    _, improved = decode_stream_improved(received, DecoderConfig(W=10), reference=ref)
    assert regular.bit_errors == 9
    assert improved.bit_errors == 0
    assert [r.outcome for r in improved.resolutions] == ["resolved"]


def test_improved_decoder_needs_room_for_resolving(toy_params):
    with pytest.raises(ValueError):
        decode_stream_improved(zero_stream(toy_params, 12), DecoderConfig(W=10))
