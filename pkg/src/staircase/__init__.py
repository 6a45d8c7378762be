"""Staircase codes with extended BCH components, stall-pattern resolving and error-floor analysis."""

from staircase.gf import GaloisField, build_field, PRIMITIVE_POLYNOMIALS
from staircase.bch import BchCode, DecodeOutcome, Status, build_bch
from staircase.blocks import StaircaseParams, Stream, encode_stream, component_word, validate_stream
from staircase.window import (
    DecoderConfig,
    Full,
    SingleErrorOnly,
    MaskedToPositions,
    RestrictedToBlocks,
    DecodingState,
    decode_stream_regular,
)
from staircase.resolver import (
    StallDiagnosis,
    syndrome_indicator,
    masking_matrix,
    bit_flip,
    diagnose,
    resolve,
    decode_stream_improved,
)
from staircase import floor, sim, streamfile

__version__ = "0.1.0"

__all__ = [
    "GaloisField",
    "build_field",
    "PRIMITIVE_POLYNOMIALS",
    "BchCode",
    "DecodeOutcome",
    "Status",
    "build_bch",
    "StaircaseParams",
    "Stream",
    "encode_stream",
    "component_word",
    "validate_stream",
    "DecoderConfig",
    "Full",
    "SingleErrorOnly",
    "MaskedToPositions",
    "RestrictedToBlocks",
    "DecodingState",
    "decode_stream_regular",
    "StallDiagnosis",
    "syndrome_indicator",
    "masking_matrix",
    "bit_flip",
    "diagnose",
    "resolve",
    "decode_stream_improved",
    "floor",
    "sim",
    "streamfile",
]
