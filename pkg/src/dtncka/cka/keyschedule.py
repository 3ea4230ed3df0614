"""Epoch key schedule.

Each commit folds a fresh commit secret into the chain:

    joiner_secret = HKDF-Extract(prev_init_secret, commit_secret)
    epoch_secret  = Expand(joiner_secret, "epoch", group_context_hash)
    init_secret'  = Expand(epoch_secret, "init")
    exporter      = Expand(epoch_secret, "exporter")
    confirm_key   = Expand(epoch_secret, "confirm")

New members receive joiner_secret sealed in a welcome and run the same
derivation from there, which is what makes their exporter converge with
everyone else's. Exports hang off the exporter secret with a caller label
and hashed context.
"""

from __future__ import annotations

from dataclasses import dataclass

from .suites import SECRET_LEN, expand_label, hkdf_extract, sha256


class BadSecretLength(Exception):
    pass


class BadLength(Exception):
    pass


EXPORT_MIN_LEN = 16
EXPORT_MAX_LEN = 255 * 32


@dataclass(frozen=True)
class EpochSecrets:
    epoch: int
    init_secret: bytes
    epoch_secret: bytes
    exporter_secret: bytes
    confirmation_key: bytes


def _require_32(name: str, value: bytes) -> None:
    if len(value) != SECRET_LEN:
        raise BadSecretLength(f"{name} must be {SECRET_LEN} bytes, got {len(value)}")


def derive_joiner_secret(prev_init_secret: bytes, commit_secret: bytes) -> bytes:
    _require_32("prev_init_secret", prev_init_secret)
    _require_32("commit_secret", commit_secret)
    return hkdf_extract(prev_init_secret, commit_secret)


def derive_epoch_from_joiner(
    joiner_secret: bytes, group_context_hash: bytes, epoch: int
) -> EpochSecrets:
    _require_32("joiner_secret", joiner_secret)
    _require_32("group_context_hash", group_context_hash)
    epoch_secret = expand_label(joiner_secret, "epoch", group_context_hash, SECRET_LEN)
    return EpochSecrets(
        epoch=epoch,
        init_secret=expand_label(epoch_secret, "init", b"", SECRET_LEN),
        epoch_secret=epoch_secret,
        exporter_secret=expand_label(epoch_secret, "exporter", b"", SECRET_LEN),
        confirmation_key=expand_label(epoch_secret, "confirm", b"", SECRET_LEN),
    )


def derive_epoch(
    prev_init_secret: bytes,
    commit_secret: bytes,
    group_context_hash: bytes,
    epoch: int = 0,
) -> EpochSecrets:
    joiner = derive_joiner_secret(prev_init_secret, commit_secret)
    return derive_epoch_from_joiner(joiner, group_context_hash, epoch)


def export_from(
    exporter_secret: bytes, label: str, context: bytes, length: int
) -> bytes:
    """Deterministic export; distinct labels or contexts give independent streams."""
    if not EXPORT_MIN_LEN <= length <= EXPORT_MAX_LEN:
        raise BadLength(
            f"export length must be in [{EXPORT_MIN_LEN}, {EXPORT_MAX_LEN}], got {length}"
        )
    _require_32("exporter_secret", exporter_secret)
    return expand_label(exporter_secret, label, sha256(context), length)
