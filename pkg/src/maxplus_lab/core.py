"""Scalar arithmetic of the max-plus semifield R_max = R u {-inf}.

``a (+) b = max(a, b)`` and ``a (x) b = a + b``; the bottom element -inf is
neutral for (+) and absorbing for (x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

BOTTOM_TOKEN = "-inf"


@dataclass(frozen=True)
class MaxScalar:
    """An element of R_max.

    Bottom is carried as an explicit tag; ``value`` is ignored when
    ``is_bottom`` is set. Construct through :meth:`of` or :data:`BOTTOM`.
    """

    value: float = 0.0
    is_bottom: bool = False

    def __post_init__(self):
        if self.is_bottom:
            object.__setattr__(self, "value", 0.0)
            return
        v = float(self.value)
        if math.isnan(v) or math.isinf(v):
            raise ValueError(f"MaxScalar value must be finite, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def of(cls, x) -> "MaxScalar":
        if isinstance(x, MaxScalar):
            return x
        x = float(x)
        if x == -math.inf:
            return BOTTOM
        return cls(x)

    def __float__(self) -> float:
        return -math.inf if self.is_bottom else self.value

    def __str__(self) -> str:
        return format_scalar(self)


BOTTOM = MaxScalar(is_bottom=True)
ZERO = MaxScalar(0.0)  # the (x)-unit


def oplus(a, b) -> MaxScalar:
    a, b = MaxScalar.of(a), MaxScalar.of(b)
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    return a if a.value >= b.value else b


def otimes(a, b) -> MaxScalar:
    a, b = MaxScalar.of(a), MaxScalar.of(b)
    if a.is_bottom or b.is_bottom:
        return BOTTOM
    s = a.value + b.value
    if math.isinf(s):
        raise OverflowError("otimes overflowed to infinity")
    return MaxScalar(s)


def leq(a, b) -> bool:
    """Standard order: ``a <= b`` iff ``a (+) b == b``."""
    return oplus(a, b) == MaxScalar.of(b)


def format_scalar(a) -> str:
    """Text form: ``repr`` of the float (round-trips bit-exactly) or ``-inf``."""
    a = MaxScalar.of(a)
    return BOTTOM_TOKEN if a.is_bottom else repr(a.value)


def parse_scalar(token: str) -> MaxScalar:
    token = token.strip()
    if token == BOTTOM_TOKEN:
        return BOTTOM
    try:
        v = float(token)
    except ValueError:
        raise ValueError(f"unparseable max-plus scalar {token!r}") from None
    if math.isnan(v) or math.isinf(v):
        raise ValueError(f"unparseable max-plus scalar {token!r}")
    return MaxScalar(v)
