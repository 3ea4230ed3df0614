"""Ratcheted group keys for delay-tolerant space links, with a session baseline."""

__version__ = "0.1.0"
