"""Length-prefixed binary encoding: 1-byte type tags, 4-byte big-endian lengths.

Every serialized structure in this project (group messages, bundles, key
state snapshots) is built from the same three primitives: fixed-width
big-endian integers, length-prefixed byte strings, and tagged frames
(tag byte + u32 length + body). Decoding is strict: out-of-bounds reads,
wrong tags and trailing garbage all raise DecodeError with the offending
offset.
"""

from __future__ import annotations

import struct


class DecodeError(Exception):
    """Malformed input; `offset` points at the byte where decoding failed."""

    def __init__(self, reason: str, offset: int):
        super().__init__(f"{reason} (offset {offset})")
        self.reason = reason
        self.offset = offset


class Writer:
    def __init__(self) -> None:
        self._buf = bytearray()

    def u8(self, value: int) -> "Writer":
        if not 0 <= value <= 0xFF:
            raise ValueError(f"u8 out of range: {value}")
        self._buf.append(value)
        return self

    def u32(self, value: int) -> "Writer":
        if not 0 <= value <= 0xFFFFFFFF:
            raise ValueError(f"u32 out of range: {value}")
        self._buf += struct.pack(">I", value)
        return self

    def u64(self, value: int) -> "Writer":
        if not 0 <= value <= 0xFFFFFFFFFFFFFFFF:
            raise ValueError(f"u64 out of range: {value}")
        self._buf += struct.pack(">Q", value)
        return self

    def raw(self, data: bytes) -> "Writer":
        self._buf += data
        return self

    def lp_bytes(self, data: bytes) -> "Writer":
        """u32 length + raw bytes."""
        self.u32(len(data))
        self._buf += data
        return self

    def lp_str(self, text: str) -> "Writer":
        return self.lp_bytes(text.encode("utf-8"))

    def tagged(self, tag: int, body: bytes) -> "Writer":
        self.u8(tag)
        return self.lp_bytes(body)

    def getvalue(self) -> bytes:
        return bytes(self._buf)


class Reader:
    def __init__(self, data: bytes, base_offset: int = 0):
        self._data = data
        self._pos = 0
        self._base = base_offset

    @property
    def offset(self) -> int:
        return self._base + self._pos

    def remaining(self) -> int:
        return len(self._data) - self._pos

    def _need(self, n: int) -> None:
        if self._pos + n > len(self._data):
            raise DecodeError("truncated input", self.offset)

    def u8(self) -> int:
        self._need(1)
        value = self._data[self._pos]
        self._pos += 1
        return value

    def u32(self) -> int:
        self._need(4)
        (value,) = struct.unpack_from(">I", self._data, self._pos)
        self._pos += 4
        return value

    def u64(self) -> int:
        self._need(8)
        (value,) = struct.unpack_from(">Q", self._data, self._pos)
        self._pos += 8
        return value

    def raw(self, n: int) -> bytes:
        self._need(n)
        value = self._data[self._pos : self._pos + n]
        self._pos += n
        return bytes(value)

    def lp_bytes(self) -> bytes:
        n = self.u32()
        return self.raw(n)

    def lp_str(self) -> str:
        at = self.offset
        raw = self.lp_bytes()
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise DecodeError("invalid utf-8", at) from None

    def tagged(self, expected_tag: int) -> "Reader":
        """Read a tagged frame, returning a sub-reader over its body."""
        at = self.offset
        tag = self.u8()
        if tag != expected_tag:
            raise DecodeError(f"expected tag 0x{expected_tag:02x}, got 0x{tag:02x}", at)
        body = self.lp_bytes()
        return Reader(body, base_offset=at + 5)

    def peek_u8(self) -> int:
        self._need(1)
        return self._data[self._pos]

    def expect_end(self) -> None:
        if self._pos != len(self._data):
            raise DecodeError("trailing garbage", self.offset)


# Frame tags, globally unique so a misdirected blob fails fast on the tag check.
TAG_BUNDLE = 0x01
TAG_PRIMARY = 0x02
TAG_ENDPOINT = 0x03
TAG_BLOCK = 0x04
TAG_IDENTITY = 0x10
TAG_PREKEY = 0x11
TAG_PROPOSAL = 0x12
TAG_COMMIT = 0x13
TAG_WELCOME = 0x14
TAG_GROUP_STATE = 0x15
TAG_TREE_NODE = 0x16
TAG_SNAPSHOT = 0x17
TAG_PATH_ENTRY = 0x18
TAG_SEALED = 0x19
TAG_EPOCH_SECRETS = 0x1A
TAG_SEC_PARAMS = 0x20
TAG_DIR_RECORD = 0x21
TAG_SESSION = 0x22
