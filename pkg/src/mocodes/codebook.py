"""Integer rounding, canonical binary prefix codes and bit-level coding.

Canonical rule (bit-exact, shared with the container format): symbols are
ordered by ``(length, symbol id)`` and given consecutive code values, the
value being left-shifted whenever the length grows. Bits are written
most-significant first and the last byte is zero padded.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .distributions import LengthVector, SourceModel, kraft_sum
from .errors import InadmissibleInput, InputError, KraftViolation, TruncatedStream, UnknownSymbol

ROUNDING_EPS = 1e-9
# widest code the vectorised decoder handles (uint64 windows, int64 values)
FAST_MAX_LENGTH = 62


def integer_lengths(lengths: LengthVector | Sequence[float], D: int | None = None) -> LengthVector:
    """Round admissible real lengths up to integers (never below 1)."""
    if isinstance(lengths, LengthVector):
        D = lengths.D if D is None else D
        real = lengths.lengths.astype(float)
    else:
        D = 2 if D is None else D
        real = np.asarray(lengths, dtype=float)
    if np.any(real < 0) or not np.all(np.isfinite(real)):
        raise InadmissibleInput("lengths must be finite and non-negative")
    if kraft_sum(real, D) > 1 + 1e-9:
        raise InadmissibleInput(f"Kraft sum {kraft_sum(real, D):.12g} exceeds 1")
    out = np.maximum(np.ceil(real - ROUNDING_EPS), 1).astype(np.int64)
    if not kraft_ok(out.tolist(), D):
        # only reachable when the epsilon guard rounds a marginally inadmissible input down
        raise InadmissibleInput("rounded lengths violate the Kraft inequality")
    return LengthVector(out, D=D, integral=True)


def kraft_ok(lengths: Iterable[int], D: int = 2) -> bool:
    """Exact integer Kraft test."""
    lengths = list(lengths)
    if not lengths:
        return True
    top = max(lengths)
    return sum(D ** (top - l) for l in lengths) <= D**top


def huffman_baseline(m: SourceModel) -> LengthVector:
    """Binary Huffman lengths in the model's sorted order.

    Ties pop the earliest-created node first (leaves are created in sorted
    order, internal nodes after them).
    """
    n = len(m)
    heap = [(float(p), i, (i,)) for i, p in enumerate(m.probs)]
    heapq.heapify(heap)
    depth = [0] * n
    created = n
    while len(heap) > 1:
        p1, _, a = heapq.heappop(heap)
        p2, _, b = heapq.heappop(heap)
        for leaf in a + b:
            depth[leaf] += 1
        heapq.heappush(heap, (p1 + p2, created, a + b))
        created += 1
    return LengthVector(depth, D=2, integral=True)


@dataclass(frozen=True)
class Codebook:
    """Canonical binary prefix code.

    ``symbols`` and ``lengths`` are in canonical order; ``codes[i]`` is the
    integer value of symbol ``symbols[i]``'s codeword. ``first_code``,
    ``counts`` and ``offsets`` are indexed by length (0..max_length).
    """

    symbols: tuple
    lengths: tuple[int, ...]
    codes: tuple[int, ...]
    first_code: tuple[int, ...]
    counts: tuple[int, ...]
    offsets: tuple[int, ...]
    D: int = 2

    @property
    def max_length(self) -> int:
        return max(self.lengths)

    def entry(self, symbol) -> tuple[int, int]:
        """(length, code) for ``symbol``."""
        i = self._index[symbol]
        return self.lengths[i], self.codes[i]

    def bitstring(self, symbol) -> str:
        length, code = self.entry(symbol)
        return format(code, f"0{length}b")

    def as_dict(self) -> dict:
        return {s: self.bitstring(s) for s in self.symbols}

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_index_cache")
        if idx is None:
            idx = {s: i for i, s in enumerate(self.symbols)}
            object.__setattr__(self, "_index_cache", idx)
        return idx


def canonical_assign(lengths: LengthVector | Sequence[int], symbols: Sequence[Hashable] | None = None, D: int = 2) -> Codebook:
    """Canonical code for integer ``lengths``; ``symbols[i]`` defaults to ``i``."""
    if isinstance(lengths, LengthVector):
        D = lengths.D
        lengths = lengths.lengths
    if D != 2:
        raise InputError("canonical codes are binary only (D = 2)")
    lengths = [int(l) for l in lengths]
    if symbols is None:
        symbols = range(len(lengths))
    symbols = list(symbols)
    if len(symbols) != len(lengths):
        raise InputError("symbols and lengths differ in size")
    if len(set(symbols)) != len(symbols):
        raise InputError("duplicate symbols")
    if not lengths:
        raise InputError("empty code")
    if min(lengths) < 1:
        raise KraftViolation("codeword lengths must be >= 1")
    if not kraft_ok(lengths, 2):
        raise KraftViolation(f"lengths {lengths} violate the Kraft inequality")

    order = sorted(range(len(lengths)), key=lambda i: (lengths[i], symbols[i]))
    top = max(lengths)
    counts = [0] * (top + 1)
    for l in lengths:
        counts[l] += 1
    first_code = [0] * (top + 1)
    offsets = [0] * (top + 1)
    code = 0
    for l in range(1, top + 1):
        code = (code + counts[l - 1]) << 1
        first_code[l] = code
        offsets[l] = offsets[l - 1] + counts[l - 1]
    codes = []
    next_code = list(first_code)
    for i in order:
        codes.append(next_code[lengths[i]])
        next_code[lengths[i]] += 1
    return Codebook(
        symbols=tuple(symbols[i] for i in order),
        lengths=tuple(lengths[i] for i in order),
        codes=tuple(codes),
        first_code=tuple(first_code),
        counts=tuple(counts),
        offsets=tuple(offsets),
        D=D,
    )


def _to_indices(cb: Codebook, symbols) -> np.ndarray:
    """Canonical indices for a symbol sequence."""
    if isinstance(symbols, (bytes, bytearray, memoryview)):
        symbols = np.frombuffer(symbols, dtype=np.uint8)
    if isinstance(symbols, np.ndarray) and symbols.dtype.kind in "iu":
        ints = [s for s in cb.symbols if isinstance(s, (int, np.integer))]
        if len(ints) == len(cb.symbols) and min(ints) >= 0 and max(ints) < 1 << 20:
            lut = np.full(max(max(ints), int(symbols.max(initial=0))) + 1, -1, dtype=np.int64)
            lut[list(ints)] = np.arange(len(ints))
            if symbols.size and symbols.min() < 0:
                raise UnknownSymbol(int(symbols.min()))
            idx = lut[symbols]
            if np.any(idx < 0):
                raise UnknownSymbol(int(symbols[np.argmax(idx < 0)]))
            return idx
        symbols = symbols.tolist()
    index = cb._index
    try:
        return np.fromiter((index[s] for s in symbols), dtype=np.int64)
    except KeyError as exc:
        raise UnknownSymbol(exc.args[0]) from None


def encode(cb: Codebook, symbols) -> tuple[bytes, int]:
    """Concatenate codewords; returns the packed bytes and the bit count."""
    idx = _to_indices(cb, symbols)
    if idx.size == 0:
        return b"", 0
    lengths = np.asarray(cb.lengths, dtype=np.int64)
    width = cb.max_length
    # table[i] = codeword bits of canonical symbol i, left aligned
    table = np.zeros((len(cb.symbols), width), dtype=np.uint8)
    for i, (l, c) in enumerate(zip(cb.lengths, cb.codes)):
        for j in range(l):
            table[i, j] = (c >> (l - 1 - j)) & 1
    used = np.arange(width) < lengths[:, None]
    out = []
    nbits = 0
    # chunking keeps the (n, width) gather bounded in memory
    chunk = max(1, (1 << 24) // width)
    for start in range(0, idx.size, chunk):
        part = idx[start:start + chunk]
        bits = table[part][used[part]]
        out.append(bits)
        nbits += bits.size
    return np.packbits(np.concatenate(out)).tobytes(), nbits


def decode(cb: Codebook, data: bytes, count: int) -> list:
    """Decode exactly ``count`` symbols from ``data``."""
    return [cb.symbols[i] for i in decode_indices(cb, data, count).tolist()]


def decode_indices(cb: Codebook, data: bytes, count: int) -> np.ndarray:
    """Canonical indices of the first ``count`` decoded symbols."""
    if count < 0:
        raise InputError("negative symbol count")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    if cb.max_length > FAST_MAX_LENGTH:
        return np.array(_decode_serial(cb, data, count), dtype=np.int64)
    L = cb.max_length
    bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    nbits = bits.size
    if nbits == 0:
        raise TruncatedStream("empty payload")
    padded = np.concatenate([bits, np.zeros(L, dtype=np.uint8)]).astype(np.uint64)
    window = np.zeros(nbits, dtype=np.uint64)
    for j in range(L):
        window = (window << np.uint64(1)) | padded[j:j + nbits]
    sym_at = np.full(nbits, -1, dtype=np.int64)
    len_at = np.zeros(nbits, dtype=np.int64)
    for l in range(1, L + 1):
        if cb.counts[l] == 0:
            continue
        value = (window >> np.uint64(L - l)).astype(np.int64) - cb.first_code[l]
        hit = (value >= 0) & (value < cb.counts[l]) & (sym_at < 0)
        sym_at[hit] = cb.offsets[l] + value[hit]
        len_at[hit] = l
    sym_list = sym_at.tolist()
    len_list = len_at.tolist()
    out = [0] * count
    pos = 0
    for n in range(count):
        if pos >= nbits:
            raise TruncatedStream(f"stream ended after {n} of {count} symbols")
        s = sym_list[pos]
        if s < 0:
            raise TruncatedStream(f"invalid codeword at bit {pos}")
        out[n] = s
        pos += len_list[pos]
        if pos > nbits:
            raise TruncatedStream(f"stream ended inside symbol {n}")
    return np.array(out, dtype=np.int64)


def _decode_serial(cb: Codebook, data: bytes, count: int) -> list[int]:
    """Bit-by-bit canonical decoding via the first-code / offset tables."""
    data = bytes(data)
    nbits = len(data) * 8
    pos = 0
    out = []
    for n in range(count):
        code, l = 0, 0
        while True:
            if pos >= nbits:
                raise TruncatedStream(f"stream ended after {n} of {count} symbols")
            code = (code << 1) | ((data[pos >> 3] >> (7 - (pos & 7))) & 1)
            pos += 1
            l += 1
            if l > cb.max_length:
                raise TruncatedStream(f"invalid codeword ending at bit {pos}")
            value = code - cb.first_code[l]
            if 0 <= value < cb.counts[l]:
                out.append(cb.offsets[l] + value)
                break
    return out
