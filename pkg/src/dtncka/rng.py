"""Injectable randomness sources.

All key generation and nonce seeding flows through one of these objects so a
scenario run is a pure function of its seed. The deterministic source is a
SHA-256 counter generator; it is not a vetted DRBG and exists for
reproducibility, not for production entropy.
"""

from __future__ import annotations

import hashlib
import os


class Rng:
    """Interface: .bytes(n) returns n random bytes."""

    def bytes(self, n: int) -> bytes:
        raise NotImplementedError


class SystemRng(Rng):
    def bytes(self, n: int) -> bytes:
        return os.urandom(n)


class DeterministicRng(Rng):
    def __init__(self, seed: bytes | int | str):
        if isinstance(seed, int):
            seed = seed.to_bytes(16, "big", signed=False)
        elif isinstance(seed, str):
            seed = seed.encode("utf-8")
        self._seed = hashlib.sha256(seed).digest()
        self._counter = 0

    def bytes(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            block = hashlib.sha256(
                self._seed + self._counter.to_bytes(8, "big")
            ).digest()
            out += block
            self._counter += 1
        return bytes(out[:n])

    def fork(self, label: str) -> "DeterministicRng":
        """Independent stream derived from this seed and a label."""
        return DeterministicRng(self._seed + b"/" + label.encode("utf-8"))
