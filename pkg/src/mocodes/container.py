"""Self-describing compressed file format.

Layout (all multi-byte fields little-endian)::

    offset  size  field
    0       4     magic b"GCC1"
    4       1     version (1)
    5       1     flags: bits 0-1 pay-off id, other bits zero
    6       8     alpha, IEEE-754 double
    14      8     t, IEEE-754 double (NaN for the max/average pay-offs)
    22      8     symbol count, uint64
    30      2     number of distinct symbols n, uint16
    32      2n    n pairs (byte value, code length)
    32+2n   ...   canonical codeword bitstream, MSB first, zero padded

The table alone determines the canonical code, so decoding needs no model.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, canonical_assign, decode_indices, encode, kraft_ok
from .design import PAYOFFS
from .errors import BadMagic, ContainerError, KraftViolation, TruncatedStream, UnsupportedVersion

MAGIC = b"GCC1"
VERSION = 1

_FIXED = struct.Struct("<4sBBddQH")


@dataclass(frozen=True)
class ContainerHeader:
    alpha: float
    t: float
    count: int
    table: tuple[tuple[int, int], ...]  # (byte value, length), ascending byte value
    payoff: str = "max-avg"
    version: int = VERSION

    @property
    def flags(self) -> int:
        return PAYOFFS.index(self.payoff)

    def pack(self) -> bytes:
        out = bytearray(_FIXED.pack(MAGIC, self.version, self.flags, self.alpha, self.t, self.count, len(self.table)))
        for sym, length in self.table:
            out += bytes((sym, length))
        return bytes(out)

    @classmethod
    def unpack(cls, blob: bytes) -> tuple["ContainerHeader", int]:
        """Parse a header; returns it with the payload offset."""
        if len(blob) < 4 or blob[:4] != MAGIC:
            raise BadMagic("not a GCC1 container")
        if len(blob) < _FIXED.size:
            raise TruncatedStream("header truncated")
        magic, version, flags, alpha, t, count, n = _FIXED.unpack_from(blob)
        if version != VERSION:
            raise UnsupportedVersion(f"container version {version}")
        if flags >> 2:
            raise ContainerError(f"unknown flag bits {flags:#04x}")
        end = _FIXED.size + 2 * n
        if len(blob) < end:
            raise TruncatedStream("symbol table truncated")
        raw = blob[_FIXED.size:end]
        table = tuple((raw[2 * i], raw[2 * i + 1]) for i in range(n))
        header = cls(alpha=alpha, t=t, count=count, table=table, payoff=PAYOFFS[flags], version=version)
        return header, end

    def codebook(self) -> Codebook:
        syms = [s for s, _ in self.table]
        lengths = [l for _, l in self.table]
        if not self.table or len(set(syms)) != len(syms):
            raise ContainerError("bad symbol table")
        if min(lengths) < 1 or not kraft_ok(lengths):
            raise KraftViolation("symbol table violates the Kraft inequality")
        return canonical_assign(lengths, syms)


def write_container(data: bytes, table: dict[int, int], alpha: float, t: float | None, payoff: str) -> bytes:
    """Encode ``data`` with the byte -> length ``table`` and prepend a header."""
    header = ContainerHeader(
        alpha=float(alpha),
        t=math.nan if t is None else float(t),
        count=len(data),
        table=tuple(sorted(table.items())),
        payoff=payoff,
    )
    payload, _ = encode(header.codebook(), data)
    return header.pack() + payload


def read_container(blob: bytes) -> bytes:
    header, offset = ContainerHeader.unpack(blob)
    cb = header.codebook()
    idx = decode_indices(cb, blob[offset:], header.count)
    return np.asarray(cb.symbols, dtype=np.uint8)[idx].tobytes()
