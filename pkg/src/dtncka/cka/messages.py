"""Group message types: identities, pre-key bundles, proposals, commits, welcomes.

Everything here has a deterministic encoding (1-byte tags, 4-byte BE length
prefixes). Signatures always cover the encoded content with the signature
field itself excluded, so any bit flip in a signed message is caught either
by the decoder or by verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..rng import Rng
from ..wire import (
    TAG_COMMIT,
    TAG_IDENTITY,
    TAG_PATH_ENTRY,
    TAG_PREKEY,
    TAG_PROPOSAL,
    TAG_SEALED,
    TAG_SNAPSHOT,
    TAG_WELCOME,
    DecodeError,
    Reader,
    Writer,
)
from . import suites
from .suites import CipherSuiteProfile


class InvalidProposal(Exception):
    pass


MAX_NAME_LEN = 64


@dataclass(frozen=True)
class Identity:
    name: str
    signature_public_key: bytes

    def __post_init__(self):
        if not self.name:
            raise ValueError("identity name must be nonempty")
        if len(self.name.encode("utf-8")) > MAX_NAME_LEN:
            raise ValueError("identity name too long")
        if len(self.signature_public_key) != suites.SIG_PUBLIC_LEN:
            raise ValueError("signature public key must be 32 bytes")


def new_identity(name: str, rng: Rng) -> tuple[Identity, bytes]:
    """Returns (identity, signing_private_key)."""
    private, public = suites.sig_generate(rng)
    return Identity(name, public), private


def encode_identity(ident: Identity) -> bytes:
    body = Writer().lp_str(ident.name).lp_bytes(ident.signature_public_key).getvalue()
    return Writer().tagged(TAG_IDENTITY, body).getvalue()


def decode_identity(reader: Reader) -> Identity:
    r = reader.tagged(TAG_IDENTITY)
    name = r.lp_str()
    key = r.lp_bytes()
    r.expect_end()
    at = reader.offset
    try:
        return Identity(name, key)
    except ValueError as exc:
        raise DecodeError(str(exc), at) from None


# -- Pre-key bundles ----------------------------------------------------------

@dataclass(frozen=True)
class PreKeyBundle:
    identity: Identity
    init_kem_public_key: bytes
    suite: CipherSuiteProfile
    signature: bytes

    def signed_content(self) -> bytes:
        return (
            Writer()
            .raw(encode_identity(self.identity))
            .lp_bytes(self.init_kem_public_key)
            .raw(self.suite.encode())
            .getvalue()
        )

    def verify(self) -> None:
        suites.verify(
            self.identity.signature_public_key, self.signed_content(), self.signature
        )


def new_prekey_bundle(
    identity: Identity,
    signing_private_key: bytes,
    rng: Rng,
    suite: CipherSuiteProfile = suites.DEFAULT_SUITE,
) -> tuple[PreKeyBundle, bytes]:
    """Returns (bundle, init_kem_private_key)."""
    private, public = suites.kem_generate(rng)
    unsigned = PreKeyBundle(identity, public, suite, b"")
    signature = suites.sign(signing_private_key, unsigned.signed_content())
    return PreKeyBundle(identity, public, suite, signature), private


def encode_prekey_bundle(pkb: PreKeyBundle) -> bytes:
    body = (
        Writer()
        .raw(encode_identity(pkb.identity))
        .lp_bytes(pkb.init_kem_public_key)
        .raw(pkb.suite.encode())
        .lp_bytes(pkb.signature)
        .getvalue()
    )
    return Writer().tagged(TAG_PREKEY, body).getvalue()


def decode_prekey_bundle(reader: Reader) -> PreKeyBundle:
    r = reader.tagged(TAG_PREKEY)
    identity = decode_identity(r)
    init_key = r.lp_bytes()
    suite = CipherSuiteProfile.decode(r.raw(4))
    signature = r.lp_bytes()
    r.expect_end()
    return PreKeyBundle(identity, init_key, suite, signature)


def decode_prekey_bundle_bytes(raw: bytes) -> PreKeyBundle:
    r = Reader(raw)
    pkb = decode_prekey_bundle(r)
    r.expect_end()
    return pkb


# -- Proposals ----------------------------------------------------------------

PROPOSAL_ADD = 1
PROPOSAL_REMOVE = 2
PROPOSAL_UPDATE = 3


@dataclass(frozen=True)
class Proposal:
    kind: int
    proposer: int
    add_prekey: Optional[PreKeyBundle] = None
    remove_leaf: Optional[int] = None
    update_public_key: Optional[bytes] = None
    signature: bytes = b""

    def signed_content(self, group_id: bytes, epoch: int) -> bytes:
        w = Writer().lp_bytes(group_id).u64(epoch).u8(self.kind).u32(self.proposer)
        if self.kind == PROPOSAL_ADD:
            assert self.add_prekey is not None
            w.raw(encode_prekey_bundle(self.add_prekey))
        elif self.kind == PROPOSAL_REMOVE:
            assert self.remove_leaf is not None
            w.u32(self.remove_leaf)
        elif self.kind == PROPOSAL_UPDATE:
            assert self.update_public_key is not None
            w.lp_bytes(self.update_public_key)
        else:
            raise InvalidProposal(f"unknown proposal kind {self.kind}")
        return w.getvalue()


def encode_proposal(p: Proposal) -> bytes:
    w = Writer().u8(p.kind).u32(p.proposer)
    if p.kind == PROPOSAL_ADD:
        w.u8(1).raw(encode_prekey_bundle(p.add_prekey))
    elif p.kind == PROPOSAL_REMOVE:
        w.u8(2).u32(p.remove_leaf)
    elif p.kind == PROPOSAL_UPDATE:
        w.u8(3).lp_bytes(p.update_public_key)
    else:
        raise InvalidProposal(f"unknown proposal kind {p.kind}")
    w.lp_bytes(p.signature)
    return Writer().tagged(TAG_PROPOSAL, w.getvalue()).getvalue()


def decode_proposal(reader: Reader) -> Proposal:
    r = reader.tagged(TAG_PROPOSAL)
    kind = r.u8()
    proposer = r.u32()
    payload_kind = r.u8()
    add_prekey = None
    remove_leaf = None
    update_public_key = None
    if payload_kind == 1:
        add_prekey = decode_prekey_bundle(r)
    elif payload_kind == 2:
        remove_leaf = r.u32()
    elif payload_kind == 3:
        update_public_key = r.lp_bytes()
    else:
        raise DecodeError(f"unknown proposal payload {payload_kind}", r.offset)
    if payload_kind != kind:
        raise DecodeError("proposal kind/payload mismatch", r.offset)
    signature = r.lp_bytes()
    r.expect_end()
    return Proposal(
        kind, proposer, add_prekey, remove_leaf, update_public_key, signature
    )


# -- Commit messages ----------------------------------------------------------

@dataclass(frozen=True)
class SealedSecret:
    recipient_node: int
    kem_enc: bytes
    ciphertext: bytes


def _encode_sealed(s: SealedSecret) -> bytes:
    body = (
        Writer().u32(s.recipient_node).lp_bytes(s.kem_enc).lp_bytes(s.ciphertext)
    ).getvalue()
    return Writer().tagged(TAG_SEALED, body).getvalue()


def _decode_sealed(reader: Reader) -> SealedSecret:
    r = reader.tagged(TAG_SEALED)
    out = SealedSecret(r.u32(), r.lp_bytes(), r.lp_bytes())
    r.expect_end()
    return out


@dataclass(frozen=True)
class PathEntry:
    """Sealed path secret for one copath resolution: one ciphertext per recipient."""

    node_index: int  # the re-keyed direct-path node this secret belongs to
    ciphertexts: tuple[SealedSecret, ...]


def _encode_path_entry(e: PathEntry) -> bytes:
    w = Writer().u32(e.node_index).u32(len(e.ciphertexts))
    for s in e.ciphertexts:
        w.raw(_encode_sealed(s))
    return Writer().tagged(TAG_PATH_ENTRY, w.getvalue()).getvalue()


def _decode_path_entry(reader: Reader) -> PathEntry:
    r = reader.tagged(TAG_PATH_ENTRY)
    node_index = r.u32()
    count = r.u32()
    ciphertexts = tuple(_decode_sealed(r) for _ in range(count))
    r.expect_end()
    return PathEntry(node_index, ciphertexts)


@dataclass(frozen=True)
class CommitMessage:
    epoch: int  # the epoch this commit was built in (pre-increment)
    committer: int
    proposals: tuple[Proposal, ...]
    new_leaf_public_key: Optional[bytes]  # None for a self-removing commit
    path_public_keys: tuple[tuple[int, bytes], ...]  # every re-keyed parent node
    path_entries: tuple[PathEntry, ...]  # one per non-empty copath resolution
    confirmation_tag: bytes = b""
    signature: bytes = b""

    @property
    def path_ciphertext_count(self) -> int:
        """Path-update entries: one per non-empty copath resolution."""
        return len(self.path_entries)

    def content_bytes(self, group_id: bytes) -> bytes:
        """Everything covered by the committer signature and the transcript."""
        w = Writer().lp_bytes(group_id).u64(self.epoch).u32(self.committer)
        w.u32(len(self.proposals))
        for p in self.proposals:
            w.raw(encode_proposal(p))
        if self.new_leaf_public_key is not None:
            w.u8(1).lp_bytes(self.new_leaf_public_key)
        else:
            w.u8(0)
        w.u32(len(self.path_public_keys))
        for node_index, public_key in self.path_public_keys:
            w.u32(node_index).lp_bytes(public_key)
        w.u32(len(self.path_entries))
        for e in self.path_entries:
            w.raw(_encode_path_entry(e))
        return w.getvalue()


def encode_commit(msg: CommitMessage) -> bytes:
    w = Writer().raw(msg.content_bytes(b""))
    w.lp_bytes(msg.confirmation_tag)
    w.lp_bytes(msg.signature)
    return Writer().tagged(TAG_COMMIT, w.getvalue()).getvalue()


def decode_commit(raw: bytes) -> CommitMessage:
    outer = Reader(raw)
    r = outer.tagged(TAG_COMMIT)
    if r.lp_bytes() != b"":
        raise DecodeError("commit frame must not embed a group id", r.offset)
    epoch = r.u64()
    committer = r.u32()
    proposals = tuple(decode_proposal(r) for _ in range(r.u32()))
    new_leaf_public_key = r.lp_bytes() if r.u8() else None
    path_public_keys = tuple((r.u32(), r.lp_bytes()) for _ in range(r.u32()))
    path_entries = tuple(_decode_path_entry(r) for _ in range(r.u32()))
    confirmation_tag = r.lp_bytes()
    signature = r.lp_bytes()
    r.expect_end()
    outer.expect_end()
    return CommitMessage(
        epoch,
        committer,
        proposals,
        new_leaf_public_key,
        path_public_keys,
        path_entries,
        confirmation_tag,
        signature,
    )


# -- Welcome messages ---------------------------------------------------------

@dataclass(frozen=True)
class GroupSnapshot:
    group_id: bytes
    suite: CipherSuiteProfile
    epoch: int
    transcript_hash: bytes
    public_tree: bytes  # encoded public-only node array


def encode_snapshot(s: GroupSnapshot) -> bytes:
    body = (
        Writer()
        .lp_bytes(s.group_id)
        .raw(s.suite.encode())
        .u64(s.epoch)
        .lp_bytes(s.transcript_hash)
        .lp_bytes(s.public_tree)
        .getvalue()
    )
    return Writer().tagged(TAG_SNAPSHOT, body).getvalue()


def decode_snapshot(reader: Reader) -> GroupSnapshot:
    r = reader.tagged(TAG_SNAPSHOT)
    group_id = r.lp_bytes()
    suite = CipherSuiteProfile.decode(r.raw(4))
    epoch = r.u64()
    transcript_hash = r.lp_bytes()
    public_tree = r.lp_bytes()
    r.expect_end()
    return GroupSnapshot(group_id, suite, epoch, transcript_hash, public_tree)


@dataclass(frozen=True)
class WelcomeMessage:
    snapshot: GroupSnapshot
    sealed_joiner_secrets: tuple[SealedSecret, ...]  # recipient_node = joiner leaf

    @property
    def joiner_count(self) -> int:
        return len(self.sealed_joiner_secrets)


def encode_welcome(msg: WelcomeMessage) -> bytes:
    w = Writer().raw(encode_snapshot(msg.snapshot))
    w.u32(len(msg.sealed_joiner_secrets))
    for s in msg.sealed_joiner_secrets:
        w.raw(_encode_sealed(s))
    return Writer().tagged(TAG_WELCOME, w.getvalue()).getvalue()


def decode_welcome(raw: bytes) -> WelcomeMessage:
    outer = Reader(raw)
    r = outer.tagged(TAG_WELCOME)
    snapshot = decode_snapshot(r)
    sealed = tuple(_decode_sealed(r) for _ in range(r.u32()))
    r.expect_end()
    outer.expect_end()
    return WelcomeMessage(snapshot, sealed)
