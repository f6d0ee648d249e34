"""Lossless timestamp-column compression: delta, zigzag, 128-value bit packing.

The packed entry stream of a column is ``[0] + deltas``: entry ``i`` is
``ts[i] - ts[i-1]`` and entry 0 is ``ts[0] - base = 0``.  Keeping the leading
zero means packed block ``k`` covers exactly rows ``128k .. 128k+127``, the
same rows as block ``k`` of a segment's min/max index, so a sorted block can
be decoded on its own from its first value (its index minimum).

Serialized layout, little-endian throughout::

    column header  magic 0xD7 | version 0x01 | total_count u64 | base u64
    per block      count-1 u8 | bit_width u8 | ceil(count*width/8) payload bytes

Deltas are taken modulo 2**64 and read as signed 64-bit, so any sequence of
unsigned 64-bit values round-trips, sorted or not.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CorruptBlockError, EmptyInputError

__all__ = [
    "BLOCK_SIZE",
    "DeltaStream",
    "PackedBlock",
    "CompressedColumn",
    "delta_encode",
    "delta_decode",
    "zigzag",
    "unzigzag",
    "compress_column",
    "decompress_column",
    "compression_ratio",
    "serialized_size",
]

BLOCK_SIZE = 128
MAGIC = 0xD7
VERSION = 0x01
COLUMN_HEADER = struct.Struct("<BBQQ")
BLOCK_HEADER_SIZE = 2

_MASK64 = (1 << 64) - 1
_SIGN64 = 1 << 63


def _wrap_signed(d: int) -> int:
    return ((d + _SIGN64) & _MASK64) - _SIGN64


def _check_u64(ts: Sequence[int]) -> None:
    for t in ts:
        if not 0 <= t <= _MASK64:
            raise ValueError(f"timestamp outside unsigned 64-bit range: {t}")


@dataclass(frozen=True)
class DeltaStream:
    base: int
    deltas: tuple[int, ...]


def delta_encode(ts: Sequence[int]) -> DeltaStream:
    if len(ts) == 0:
        raise EmptyInputError("cannot delta-encode an empty sequence")
    ts = [int(t) for t in ts]
    _check_u64(ts)
    return DeltaStream(ts[0], tuple(_wrap_signed(b - a) for a, b in zip(ts, ts[1:])))


def delta_decode(stream: DeltaStream) -> list[int]:
    out = [stream.base]
    cur = stream.base
    for d in stream.deltas:
        cur = (cur + d) & _MASK64
        out.append(cur)
    return out


def zigzag(n: int) -> int:
    """Map a signed 64-bit integer to unsigned: 0, -1, 1, -2 ... -> 0, 1, 2, 3 ..."""
    return ((n << 1) ^ (n >> 63)) & _MASK64


def unzigzag(z: int) -> int:
    return (z >> 1) ^ -(z & 1)


@dataclass(frozen=True)
class PackedBlock:
    count: int
    bit_width: int
    payload: bytes

    @classmethod
    def pack(cls, values: Sequence[int]) -> "PackedBlock":
        """Pack unsigned values LSB-first at the minimal common width."""
        count = len(values)
        if not 1 <= count <= BLOCK_SIZE:
            raise ValueError(f"block holds 1..{BLOCK_SIZE} values, got {count}")
        width = max(values).bit_length()
        if width == 0:
            return cls(count, 0, b"")
        acc = 0
        shift = 0
        for v in values:
            acc |= v << shift
            shift += width
        return cls(count, width, acc.to_bytes((shift + 7) // 8, "little"))

    def unpack(self) -> list[int]:
        w = self.bit_width
        if w == 0:
            return [0] * self.count
        acc = int.from_bytes(self.payload, "little")
        mask = (1 << w) - 1
        return [(acc >> (i * w)) & mask for i in range(self.count)]

    @property
    def nbytes(self) -> int:
        return BLOCK_HEADER_SIZE + len(self.payload)

    def validate(self) -> None:
        if not 1 <= self.count <= BLOCK_SIZE:
            raise CorruptBlockError(f"block count {self.count} outside 1..{BLOCK_SIZE}")
        if not 0 <= self.bit_width <= 64:
            raise CorruptBlockError(f"bit width {self.bit_width} outside 0..64")
        expected = (self.count * self.bit_width + 7) // 8
        if len(self.payload) != expected:
            raise CorruptBlockError(f"payload is {len(self.payload)} bytes, expected {expected}")


@dataclass(frozen=True)
class CompressedColumn:
    base: int
    blocks: tuple[PackedBlock, ...]
    total_count: int

    @property
    def nbytes(self) -> int:
        return COLUMN_HEADER.size + sum(b.nbytes for b in self.blocks)

    def block_deltas(self, k: int) -> list[int]:
        """Signed deltas stored in block ``k`` (its first entry links to block ``k-1``)."""
        return [unzigzag(z) for z in self.blocks[k].unpack()]

    def decode_block(self, k: int, first: int) -> list[int]:
        """Values of block ``k`` given its first value, without touching other blocks."""
        out = [first]
        cur = first
        for z in self.blocks[k].unpack()[1:]:
            cur = (cur + ((z >> 1) ^ -(z & 1))) & _MASK64
            out.append(cur)
        return out

    def validate(self) -> None:
        if self.total_count < 1 or not self.blocks:
            raise CorruptBlockError("column has no rows")
        for i, block in enumerate(self.blocks):
            block.validate()
            if i < len(self.blocks) - 1 and block.count != BLOCK_SIZE:
                raise CorruptBlockError(f"non-final block {i} holds {block.count} values")
        if sum(b.count for b in self.blocks) != self.total_count:
            raise CorruptBlockError("block counts do not add up to total_count")

    def to_bytes(self) -> bytes:
        parts = [COLUMN_HEADER.pack(MAGIC, VERSION, self.total_count, self.base)]
        for b in self.blocks:
            parts.append(bytes((b.count - 1, b.bit_width)))
            parts.append(b.payload)
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedColumn":
        col, end = cls.read_from(data, 0)
        if end != len(data):
            raise CorruptBlockError(f"{len(data) - end} trailing bytes after column")
        return col

    @classmethod
    def read_from(cls, data: bytes | memoryview, offset: int = 0) -> tuple["CompressedColumn", int]:
        """Parse one column starting at ``offset``; returns it and the end offset."""
        data = memoryview(data)
        if len(data) - offset < COLUMN_HEADER.size:
            raise CorruptBlockError("truncated column header")
        magic, version, total, base = COLUMN_HEADER.unpack_from(data, offset)
        if magic != MAGIC or version != VERSION:
            raise CorruptBlockError(f"bad column magic/version {magic:#x}/{version}")
        pos = offset + COLUMN_HEADER.size
        blocks = []
        remaining = total
        while remaining > 0:
            if len(data) - pos < BLOCK_HEADER_SIZE:
                raise CorruptBlockError("truncated block header")
            count = data[pos] + 1
            width = data[pos + 1]
            size = (count * width + 7) // 8
            pos += BLOCK_HEADER_SIZE
            if len(data) - pos < size:
                raise CorruptBlockError("truncated block payload")
            blocks.append(PackedBlock(count, width, bytes(data[pos : pos + size])))
            pos += size
            remaining -= count
        col = cls(base, tuple(blocks), total)
        col.validate()
        return col, pos


def compress_column(ts: Sequence[int]) -> CompressedColumn:
    stream = delta_encode(ts)
    entries = [0]
    entries.extend(zigzag(d) for d in stream.deltas)
    blocks = tuple(PackedBlock.pack(entries[i : i + BLOCK_SIZE]) for i in range(0, len(entries), BLOCK_SIZE))
    return CompressedColumn(stream.base, blocks, len(entries))


def decompress_column(c: CompressedColumn) -> list[int]:
    c.validate()
    entries: list[int] = []
    for b in c.blocks:
        entries.extend(b.unpack())
    if entries[0] != 0:
        raise CorruptBlockError("first entry must be zero")
    out = []
    cur = c.base
    for z in entries:
        cur = (cur + ((z >> 1) ^ -(z & 1))) & _MASK64
        out.append(cur)
    return out


def serialized_size(counts_and_widths: Iterable[tuple[int, int]]) -> int:
    """Byte size of a column with the given ``(count, width)`` blocks."""
    return COLUMN_HEADER.size + sum(BLOCK_HEADER_SIZE + (n * w + 7) // 8 for n, w in counts_and_widths)


def compression_ratio(c: CompressedColumn) -> Fraction:
    """Raw 8-byte-per-value size over serialized size, headers included."""
    return Fraction(c.total_count * 8, c.nbytes)
