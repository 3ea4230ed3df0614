"""Bundle model and deterministic codec.

A bundle is a primary block (routing header) plus an ordered list of typed
blocks: exactly one payload block (number 1), an age block carrying
accumulated delay, and optional security blocks. The encoding is a strict
TLV form (1-byte tags, 4-byte big-endian lengths); it is canonical, round-
trips exactly, and the decoder rejects anything malformed with the byte
offset — it never raises anything but DecodeError on arbitrary input.

All times are stored as integer microseconds; constructors take seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Optional

from .units import to_us
from .wire import (
    TAG_BLOCK,
    TAG_BUNDLE,
    TAG_ENDPOINT,
    TAG_PRIMARY,
    DecodeError,
    Reader,
    Writer,
)

BUNDLE_VERSION = 7
MAX_PAYLOAD = 16 * 1024 * 1024
MAX_NAME_LEN = 64
PAYLOAD_BLOCK_NUMBER = 1


class PayloadTooLarge(Exception):
    pass


class BadLifetime(Exception):
    pass


class BlockType(IntEnum):
    PAYLOAD = 1
    AGE = 7
    BIB = 11
    BCB = 12


class EndpointScheme(IntEnum):
    NODE = 1


@dataclass(frozen=True)
class EndpointId:
    name: str
    scheme: EndpointScheme = EndpointScheme.NODE

    def __post_init__(self):
        if not self.name:
            raise ValueError("endpoint name must be nonempty")
        if len(self.name.encode("utf-8")) > MAX_NAME_LEN:
            raise ValueError("endpoint name exceeds 64 bytes")


@dataclass(frozen=True)
class PrimaryBlock:
    source: EndpointId
    destination: EndpointId
    creation_time_us: int
    sequence: int
    lifetime_us: int
    version: int = BUNDLE_VERSION


@dataclass(frozen=True)
class Block:
    block_type: int
    block_number: int
    flags: int
    body: bytes


@dataclass(frozen=True)
class Bundle:
    primary: PrimaryBlock
    blocks: tuple[Block, ...]

    def block_by_number(self, number: int) -> Optional[Block]:
        for b in self.blocks:
            if b.block_number == number:
                return b
        return None

    def blocks_of_type(self, block_type: int) -> list[Block]:
        return [b for b in self.blocks if b.block_type == block_type]

    def payload(self) -> bytes:
        block = self.block_by_number(PAYLOAD_BLOCK_NUMBER)
        assert block is not None
        return block.body

    def age_us(self) -> int:
        ages = self.blocks_of_type(BlockType.AGE)
        if not ages:
            return 0
        return int.from_bytes(ages[0].body, "big")

    def replace_block(self, number: int, new_block: Block) -> "Bundle":
        blocks = tuple(
            new_block if b.block_number == number else b for b in self.blocks
        )
        return replace(self, blocks=blocks)

    def without_block(self, number: int) -> "Bundle":
        return replace(
            self, blocks=tuple(b for b in self.blocks if b.block_number != number)
        )

    def with_block(self, new_block: Block) -> "Bundle":
        return replace(self, blocks=self.blocks + (new_block,))

    def next_block_number(self) -> int:
        return max(b.block_number for b in self.blocks) + 1

    def key(self) -> tuple:
        """Uniqueness key per the primary-block invariant."""
        p = self.primary
        return (p.source.name, p.creation_time_us, p.sequence)


def _validate(bundle: Bundle, offset: int = 0) -> None:
    numbers = [b.block_number for b in bundle.blocks]
    if len(set(numbers)) != len(numbers):
        raise DecodeError("duplicate block_number", offset)
    payloads = bundle.blocks_of_type(BlockType.PAYLOAD)
    if len(payloads) != 1:
        raise DecodeError("bundle must carry exactly one payload block", offset)
    if payloads[0].block_number != PAYLOAD_BLOCK_NUMBER:
        raise DecodeError("payload block must be number 1", offset)
    if bundle.primary.lifetime_us <= 0:
        raise DecodeError("lifetime must be positive", offset)
    if bundle.primary.version != BUNDLE_VERSION:
        raise DecodeError(f"unsupported bundle version {bundle.primary.version}", offset)


def create_bundle(
    source: EndpointId,
    destination: EndpointId,
    payload: bytes,
    lifetime: float,
    now: float,
    sequence: int = 0,
) -> Bundle:
    if lifetime <= 0:
        raise BadLifetime("lifetime must be positive")
    if len(payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    primary = PrimaryBlock(
        source=source,
        destination=destination,
        creation_time_us=to_us(now),
        sequence=sequence,
        lifetime_us=to_us(lifetime),
    )
    blocks = (
        Block(BlockType.PAYLOAD, PAYLOAD_BLOCK_NUMBER, 0, payload),
        Block(BlockType.AGE, 2, 0, (0).to_bytes(8, "big")),
    )
    return Bundle(primary, blocks)


def process_at_hop(bundle: Bundle, now: float) -> Optional[Bundle]:
    """Refresh the age block from the shared clock; None when expired."""
    age = to_us(now) - bundle.primary.creation_time_us
    if age > bundle.primary.lifetime_us:
        return None
    ages = bundle.blocks_of_type(BlockType.AGE)
    body = max(age, 0).to_bytes(8, "big")
    if ages:
        return bundle.replace_block(
            ages[0].block_number, replace(ages[0], body=body)
        )
    return bundle.with_block(Block(BlockType.AGE, bundle.next_block_number(), 0, body))


# -- Codec --------------------------------------------------------------------

def encode_endpoint(ep: EndpointId) -> bytes:
    body = Writer().u8(ep.scheme).lp_str(ep.name).getvalue()
    return Writer().tagged(TAG_ENDPOINT, body).getvalue()


def decode_endpoint(reader: Reader) -> EndpointId:
    r = reader.tagged(TAG_ENDPOINT)
    at = r.offset
    scheme = r.u8()
    name = r.lp_str()
    r.expect_end()
    try:
        return EndpointId(name, EndpointScheme(scheme))
    except ValueError as exc:
        raise DecodeError(str(exc), at) from None


def encode_primary(p: PrimaryBlock) -> bytes:
    body = (
        Writer()
        .u8(p.version)
        .raw(encode_endpoint(p.source))
        .raw(encode_endpoint(p.destination))
        .u64(p.creation_time_us)
        .u64(p.sequence)
        .u64(p.lifetime_us)
        .getvalue()
    )
    return Writer().tagged(TAG_PRIMARY, body).getvalue()


def decode_primary(reader: Reader) -> PrimaryBlock:
    r = reader.tagged(TAG_PRIMARY)
    version = r.u8()
    source = decode_endpoint(r)
    destination = decode_endpoint(r)
    creation = r.u64()
    sequence = r.u64()
    lifetime = r.u64()
    r.expect_end()
    return PrimaryBlock(source, destination, creation, sequence, lifetime, version)


def encode_block(b: Block) -> bytes:
    body = (
        Writer()
        .u8(b.block_type)
        .u32(b.block_number)
        .u32(b.flags)
        .lp_bytes(b.body)
        .getvalue()
    )
    return Writer().tagged(TAG_BLOCK, body).getvalue()


def decode_block(reader: Reader) -> Block:
    r = reader.tagged(TAG_BLOCK)
    at = r.offset
    block_type = r.u8()
    if block_type not in (BlockType.PAYLOAD, BlockType.AGE, BlockType.BIB, BlockType.BCB):
        raise DecodeError(f"unknown block type {block_type}", at)
    number = r.u32()
    flags = r.u32()
    body = r.lp_bytes()
    r.expect_end()
    return Block(BlockType(block_type), number, flags, body)


def encode_bundle(bundle: Bundle) -> bytes:
    _validate(bundle)
    w = Writer().raw(encode_primary(bundle.primary)).u32(len(bundle.blocks))
    for b in bundle.blocks:
        w.raw(encode_block(b))
    return Writer().tagged(TAG_BUNDLE, w.getvalue()).getvalue()


def decode_bundle(raw: bytes) -> Bundle:
    outer = Reader(raw)
    r = outer.tagged(TAG_BUNDLE)
    primary = decode_primary(r)
    count = r.u32()
    if count > len(raw):  # cheap bound: each block costs >= 1 byte
        raise DecodeError("implausible block count", r.offset)
    blocks = tuple(decode_block(r) for _ in range(count))
    r.expect_end()
    outer.expect_end()
    bundle = Bundle(primary, blocks)
    _validate(bundle, offset=0)
    return bundle
