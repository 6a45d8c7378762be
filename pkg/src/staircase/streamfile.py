"""Binary stream files.

A file is a 16-byte header followed by the blocks in order. Each block is
stored row-major, one bit per entry, least significant bit first, with
every row padded to a whole number of bytes.

Header (little-endian): magic ``b"STRC"``, version, q, t, flags, shorten,
m, block count. Flag bit 0 marks an extended component code.
"""

from __future__ import annotations

import struct

import numpy as np

from staircase.bch import build_bch
from staircase.blocks import StaircaseParams, Stream
from staircase.gf import build_field

MAGIC = b"STRC"
VERSION = 1
HEADER = struct.Struct("<4sBBBBHHI")
FLAG_EXTENDED = 1


def params_for(q: int, t: int, shorten: int, extended: bool = True) -> StaircaseParams:
    return StaircaseParams(build_bch(build_field(q), t, extended=extended, shorten=shorten))


def dumps(stream: Stream) -> bytes:
    code = stream.params.code
    flags = FLAG_EXTENDED if code.extended else 0
    head = HEADER.pack(
        MAGIC, VERSION, code.field.q, code.t, flags, code.shorten, stream.m, len(stream.blocks)
    )
    body = np.packbits(stream.blocks, axis=2, bitorder="little")
    return head + body.tobytes()


def loads(data: bytes) -> Stream:
    if len(data) < HEADER.size:
        raise ValueError("truncated stream header")
    magic, version, q, t, flags, shorten, m, count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported stream version {version}")
    params = params_for(q, t, shorten, bool(flags & FLAG_EXTENDED))
    if params.m != m:
        raise ValueError(f"header block size {m} does not match the code (m={params.m})")
    row_bytes = (m + 7) // 8
    body = np.frombuffer(data, dtype=np.uint8, offset=HEADER.size)
    if body.size != count * m * row_bytes:
        raise ValueError(f"expected {count * m * row_bytes} payload bytes, got {body.size}")
    blocks = np.unpackbits(body.reshape(count, m, row_bytes), axis=2, count=m, bitorder="little")
    return Stream(params, blocks)


def write(path, stream: Stream) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(stream))


def read(path) -> Stream:
    with open(path, "rb") as fh:
        return loads(fh.read())
