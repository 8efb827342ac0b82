"""Bit-level buffers and varints."""
from __future__ import annotations


class TruncatedStream(ValueError):
    pass


class BitWriter:
    """Append-only bit buffer, MSB-first within each byte."""

    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self.nbits = 0

    def write_bit(self, bit: int) -> None:
        self._acc = (self._acc << 1) | (bit & 1)
        self._nacc += 1
        self.nbits += 1
        if self._nacc == 8:
            self._buf.append(self._acc)
            self._acc = 0
            self._nacc = 0

    def write_bits(self, value: int, width: int) -> None:
        if value < 0 or value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        for shift in range(width - 1, -1, -1):
            self.write_bit((value >> shift) & 1)

    def getvalue(self) -> bytes:
        if self._nacc:
            return bytes(self._buf) + bytes([self._acc << (8 - self._nacc)])
        return bytes(self._buf)


class BitReader:
    """Reads ``nbits`` bits from ``data``.

    ``pad=True`` returns zeros past the end (used by the arithmetic decoder,
    whose encoder relies on implicit zero padding); otherwise running past
    the end raises ``TruncatedStream``.
    """

    def __init__(self, data: bytes, nbits: int | None = None, pad: bool = False):
        self._data = bytes(data)
        self.nbits = len(self._data) * 8 if nbits is None else nbits
        if self.nbits > len(self._data) * 8:
            raise TruncatedStream(f"stream holds {len(self._data) * 8} bits, header says {self.nbits}")
        self.pos = 0
        self.pad = pad

    def read_bit(self) -> int:
        if self.pos >= self.nbits:
            if self.pad:
                self.pos += 1
                return 0
            raise TruncatedStream("read past end of bit stream")
        byte = self._data[self.pos >> 3]
        bit = (byte >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return bit

    def read_bits(self, width: int) -> int:
        v = 0
        for _ in range(width):
            v = (v << 1) | self.read_bit()
        return v

    @property
    def remaining(self) -> int:
        return self.nbits - self.pos


def write_varint(out: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("varints are unsigned")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def read_varint(data: bytes, pos: int) -> tuple[int, int]:
    shift = 0
    value = 0
    while True:
        if pos >= len(data):
            raise TruncatedStream("varint runs past end of buffer")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            return value, pos
