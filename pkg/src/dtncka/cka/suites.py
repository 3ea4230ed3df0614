"""Cipher suite registry and primitive bindings.

A suite names four algorithms: a KEM, an AEAD, a 256-bit hash and a signature
scheme. All secret and digest lengths equal the hash output (32 bytes). The
registry is fixed; anything not listed is rejected at group creation. HKDF
(extract-and-expand over HMAC-SHA-256) is the single PRF behind the key
schedule, exporters and KEM key derivation, pinned by golden vectors.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from enum import IntEnum

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import AESGCM, ChaCha20Poly1305
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from ..rng import Rng
from ..wire import Writer

SECRET_LEN = 32
NONCE_LEN = 12
TAG_LEN = 16
KEM_PUBLIC_LEN = 32
SIG_PUBLIC_LEN = 32


class KemId(IntEnum):
    X25519_HKDF_SHA256 = 1


class AeadId(IntEnum):
    CHACHA20_POLY1305 = 1
    AES_256_GCM = 2


class HashId(IntEnum):
    SHA256 = 1


class SigId(IntEnum):
    ED25519 = 1


class UnsupportedSuite(Exception):
    pass


class OpenFailed(Exception):
    """AEAD or sealed-box authentication failure."""


class BadSignature(Exception):
    pass


@dataclass(frozen=True)
class CipherSuiteProfile:
    kem_id: KemId
    aead_id: AeadId
    hash_id: HashId
    sig_id: SigId

    def encode(self) -> bytes:
        return bytes([self.kem_id, self.aead_id, self.hash_id, self.sig_id])

    @classmethod
    def decode(cls, raw: bytes) -> "CipherSuiteProfile":
        if len(raw) != 4:
            raise UnsupportedSuite(f"suite encoding must be 4 bytes, got {len(raw)}")
        try:
            suite = cls(KemId(raw[0]), AeadId(raw[1]), HashId(raw[2]), SigId(raw[3]))
        except ValueError as exc:
            raise UnsupportedSuite(str(exc)) from None
        require_registered(suite)
        return suite


DEFAULT_SUITE = CipherSuiteProfile(
    KemId.X25519_HKDF_SHA256, AeadId.CHACHA20_POLY1305, HashId.SHA256, SigId.ED25519
)

REGISTRY = frozenset(
    {
        DEFAULT_SUITE,
        CipherSuiteProfile(
            KemId.X25519_HKDF_SHA256, AeadId.AES_256_GCM, HashId.SHA256, SigId.ED25519
        ),
    }
)


def require_registered(suite: CipherSuiteProfile) -> None:
    if suite not in REGISTRY:
        raise UnsupportedSuite(f"unregistered suite {suite}")


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


# -- HKDF (RFC 5869, HMAC-SHA-256) ------------------------------------------

def hkdf_extract(salt: bytes, ikm: bytes) -> bytes:
    if not salt:
        salt = bytes(32)
    return hmac.new(salt, ikm, hashlib.sha256).digest()


def hkdf_expand(prk: bytes, info: bytes, length: int) -> bytes:
    if length < 1 or length > 255 * 32:
        raise ValueError(f"expand length out of range: {length}")
    out = bytearray()
    block = b""
    counter = 1
    while len(out) < length:
        block = hmac.new(prk, block + info + bytes([counter]), hashlib.sha256).digest()
        out += block
        counter += 1
    return bytes(out[:length])


def expand_label(secret: bytes, label: str, context: bytes, length: int) -> bytes:
    """Labeled expand: info = lp(label) || lp(context), lengths 4-byte BE."""
    info = Writer().lp_str(label).lp_bytes(context).getvalue()
    return hkdf_expand(secret, info, length)


# -- KEM (X25519 + HKDF) ------------------------------------------------------

def kem_generate(rng: Rng) -> tuple[bytes, bytes]:
    """Returns (private, public), both 32 bytes."""
    private = rng.bytes(32)
    return private, kem_public_from_private(private)


def kem_public_from_private(private: bytes) -> bytes:
    key = X25519PrivateKey.from_private_bytes(private)
    return key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)


def _kem_shared(dh: bytes, ephemeral_pub: bytes, recipient_pub: bytes) -> bytes:
    prk = hkdf_extract(b"", dh)
    return expand_label(prk, "kem", ephemeral_pub + recipient_pub, SECRET_LEN)


def kem_encap(recipient_pub: bytes, rng: Rng) -> tuple[bytes, bytes]:
    """Returns (enc, shared): enc is the ephemeral public key on the wire."""
    eph_private, eph_public = kem_generate(rng)
    dh = X25519PrivateKey.from_private_bytes(eph_private).exchange(
        X25519PublicKey.from_public_bytes(recipient_pub)
    )
    return eph_public, _kem_shared(dh, eph_public, recipient_pub)


def kem_decap(enc: bytes, private: bytes) -> bytes:
    sk = X25519PrivateKey.from_private_bytes(private)
    dh = sk.exchange(X25519PublicKey.from_public_bytes(enc))
    recipient_pub = sk.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    return _kem_shared(dh, enc, recipient_pub)


# -- AEAD ---------------------------------------------------------------------

def _aead(suite: CipherSuiteProfile, key: bytes):
    if suite.aead_id == AeadId.CHACHA20_POLY1305:
        return ChaCha20Poly1305(key)
    if suite.aead_id == AeadId.AES_256_GCM:
        return AESGCM(key)
    raise UnsupportedSuite(f"unknown AEAD {suite.aead_id}")


def aead_seal(
    suite: CipherSuiteProfile, key: bytes, nonce: bytes, plaintext: bytes, ad: bytes
) -> bytes:
    """Returns ciphertext || 16-byte tag."""
    return _aead(suite, key).encrypt(nonce, plaintext, ad)


def aead_open(
    suite: CipherSuiteProfile, key: bytes, nonce: bytes, ciphertext: bytes, ad: bytes
) -> bytes:
    try:
        return _aead(suite, key).decrypt(nonce, ciphertext, ad)
    except Exception:
        raise OpenFailed("AEAD authentication failed") from None


# -- Sealed box: KEM encap + AEAD under the derived key ----------------------
#
# Each seal uses a fresh encapsulation, hence a fresh key, so the zero nonce
# never repeats under the same key.

def seal_to(
    suite: CipherSuiteProfile, recipient_pub: bytes, plaintext: bytes, rng: Rng
) -> tuple[bytes, bytes]:
    enc, shared = kem_encap(recipient_pub, rng)
    key = expand_label(shared, "seal", b"", SECRET_LEN)
    ct = aead_seal(suite, key, bytes(NONCE_LEN), plaintext, b"")
    return enc, ct


def open_sealed(
    suite: CipherSuiteProfile, enc: bytes, ciphertext: bytes, private: bytes
) -> bytes:
    shared = kem_decap(enc, private)
    key = expand_label(shared, "seal", b"", SECRET_LEN)
    return aead_open(suite, key, bytes(NONCE_LEN), ciphertext, b"")


# -- Signatures (Ed25519) -----------------------------------------------------

def sig_generate(rng: Rng) -> tuple[bytes, bytes]:
    private = rng.bytes(32)
    return private, sig_public_from_private(private)


def sig_public_from_private(private: bytes) -> bytes:
    key = Ed25519PrivateKey.from_private_bytes(private)
    return key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)


def sign(private: bytes, message: bytes) -> bytes:
    return Ed25519PrivateKey.from_private_bytes(private).sign(message)


def verify(public: bytes, message: bytes, signature: bytes) -> None:
    try:
        Ed25519PublicKey.from_public_bytes(public).verify(signature, message)
    except (InvalidSignature, ValueError):
        raise BadSignature("signature verification failed") from None
