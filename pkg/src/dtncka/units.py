"""Time units: the simulator clock and all encoded times are integer microseconds."""

SECOND_US = 1_000_000


def to_us(seconds) -> int:
    return round(seconds * SECOND_US)


def to_s(us: int) -> float:
    return us / SECOND_US
