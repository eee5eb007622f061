"""Fixed-point digit codes.

A complemental code ``c0.c1...cp`` has value ``-c0 + sum_i c_i 2**-i``; a
plain code ``.c1...cp`` has value ``sum_i c_i 2**-i``.  Wider integer parts
(used for internal accumulators) follow the same two's-complement rule with
the leading digit carrying weight ``-2**(I-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class FixedPointFormat:
    integer_digits: int
    fraction_digits: int
    complemental: bool

    def __post_init__(self):
        if self.fraction_digits < 0:
            raise ValueError("fraction_digits must be non-negative")
        if self.complemental and self.integer_digits < 1:
            raise ValueError("complemental formats need a sign digit")
        if self.integer_digits < 0:
            raise ValueError("integer_digits must be non-negative")

    @classmethod
    def plain(cls, p: int) -> FixedPointFormat:
        return cls(0, p, False)

    @classmethod
    def signed(cls, p: int) -> FixedPointFormat:
        return cls(1, p, True)

    @property
    def width(self) -> int:
        return self.integer_digits + self.fraction_digits

    @property
    def ulp(self) -> float:
        return 2.0**-self.fraction_digits

    @property
    def min_int(self) -> int:
        return -(1 << (self.width - 1)) if self.complemental else 0

    @property
    def max_int(self) -> int:
        return (1 << (self.width - 1)) - 1 if self.complemental else (1 << self.width) - 1

    def to_signed(self, code: int) -> int:
        """Register integer -> scaled value (``value * 2**p``)."""
        if self.complemental and code >> (self.width - 1):
            return code - (1 << self.width)
        return code

    def to_code(self, scaled: int) -> int:
        """Scaled value -> register integer (wrapping modulo ``2**width``)."""
        return scaled % (1 << self.width)

    def decode(self, code: int) -> float:
        return self.to_signed(code) / 2.0**self.fraction_digits


@dataclass(frozen=True)
class FixedPointCode:
    format: FixedPointFormat
    code: int

    def __post_init__(self):
        if not 0 <= self.code < (1 << self.format.width):
            raise ValueError(f"code {self.code} does not fit {self.format.width} digits")

    @property
    def digits(self) -> tuple[int, ...]:
        w = self.format.width
        return tuple((self.code >> (w - 1 - i)) & 1 for i in range(w))

    @property
    def value(self) -> float:
        return self.format.decode(self.code)

    @property
    def scaled(self) -> int:
        return self.format.to_signed(self.code)

    def text(self) -> str:
        d = "".join(str(b) for b in self.digits)
        i = self.format.integer_digits
        return d[:i] + "." + d[i:]

    @classmethod
    def parse(cls, text: str, fmt: FixedPointFormat) -> FixedPointCode:
        head, _, tail = text.partition(".")
        if len(head) != fmt.integer_digits or len(tail) != fmt.fraction_digits:
            raise ValueError(f"{text!r} does not match format {fmt}")
        bits = head + tail
        if set(bits) - {"0", "1"}:
            raise ValueError(f"{text!r} is not a binary digit string")
        return cls(fmt, int(bits, 2) if bits else 0)


def round_scaled(x: float, p: int) -> int:
    """Nearest integer to ``x * 2**p`` with ties toward minus infinity."""
    return math.ceil(x * 2.0**p - 0.5)


def encode_fixed(x: float, fmt: FixedPointFormat) -> FixedPointCode:
    """Nearest code to ``x``; raises ``DomainError`` when out of range."""
    if not math.isfinite(x):
        raise DomainError(f"cannot encode {x}")
    if fmt.complemental:
        bound = 2.0 ** (fmt.integer_digits - 1)
        if not -bound < x < bound:
            raise DomainError(f"{x} outside the open interval ({-bound}, {bound})")
    elif not 0 <= x < 2.0**fmt.integer_digits:
        raise DomainError(f"{x} outside [0, {2 ** fmt.integer_digits})")
    scaled = round_scaled(x, fmt.fraction_digits)
    if not fmt.min_int <= scaled <= fmt.max_int:
        raise DomainError(f"{x} rounds to an unrepresentable code at {fmt.fraction_digits} digits")
    return FixedPointCode(fmt, fmt.to_code(scaled))
