"""Binary prime-reciprocal (d-) sequences.

The binary expansion of 1/p repeats with period equal to the multiplicative
order of 2 modulo p.  Digit ``a(i)`` (1-based) is ``(2**i mod p) mod 2``.
Sequences are stored zero-based: ``bits[i - 1] == a(i)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

# Deterministic for every n < 3.3e24, which covers all 64-bit inputs.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

MAX_PRIME = (1 << 64) - 1


class SequenceFormatError(ValueError):
    """Malformed sequence file.  ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for 64-bit integers."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> tuple[int, ...]:
    """Distinct prime factors of ``n`` by trial division, ascending."""
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append(n)
    return tuple(factors)


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime ``value`` together with the distinct primes dividing value-1."""

    value: int
    cofactor_primes: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        v = self.value
        if not isinstance(v, int) or isinstance(v, bool):
            raise TypeError(f"prime must be an int, got {type(v).__name__}")
        if v < 2 or v > MAX_PRIME:
            raise ValueError(f"{v} is out of range (need 3 <= p < 2**64)")
        if not is_prime(v):
            raise ValueError(f"{v} is not prime")
        if v % 2 == 0:
            raise ValueError(f"{v} is even; 2 must be invertible mod p")
        object.__setattr__(self, "cofactor_primes", prime_factors(v - 1))

    def __int__(self):
        return self.value


def _as_modulus(p) -> PrimeModulus:
    return p if isinstance(p, PrimeModulus) else PrimeModulus(p)


def multiplicative_order(p) -> int:
    """Smallest t > 0 with 2**t == 1 (mod p).

    Starts from p-1 and strips each cofactor prime while the power stays 1,
    so the cost is a handful of modular exponentiations.
    """
    p = _as_modulus(p)
    t = p.value - 1
    for q in p.cofactor_primes:
        while t % q == 0 and pow(2, t // q, p.value) == 1:
            t //= q
    return t


def is_primitive_root_2(p) -> bool:
    p = _as_modulus(p)
    n = p.value - 1
    return all(pow(2, n // q, p.value) != 1 for q in p.cofactor_primes)


@dataclass(frozen=True)
class DSequence:
    prime: PrimeModulus
    bits: tuple[int, ...]
    period: int
    maximal: bool

    def __post_init__(self):
        if len(self.bits) != self.period:
            raise ValueError(f"bits has length {len(self.bits)}, period is {self.period}")

    def digit(self, i: int) -> int:
        """a(i) for any i >= 1, extending the period cyclically."""
        if i < 1:
            raise IndexError("digits are indexed from 1")
        return self.bits[(i - 1) % self.period]

    def extended(self, n_digits: int) -> list[int]:
        return [self.bits[i % self.period] for i in range(n_digits)]

    def __str__(self):
        return bits_to_str(self.bits)


def generate_dsequence(p) -> DSequence:
    """One full period of the binary expansion of 1/p.

    Uses the recurrence b(0) = 1, b(i+1) = 2 b(i) mod p, a(i) = b(i) mod 2.
    """
    p = _as_modulus(p)
    period = multiplicative_order(p)
    bits = []
    b = 1
    for _ in range(period):
        b = 2 * b % p.value
        bits.append(b & 1)
    return DSequence(prime=p, bits=tuple(bits), period=period, maximal=period == p.value - 1)


def long_division_oracle(p, n_digits: int) -> list[int]:
    """First ``n_digits`` binary digits of 1/p by schoolbook long division.

    Kept independent of :func:`generate_dsequence` for cross-checking.
    """
    p = _as_modulus(p)
    if n_digits < 1:
        raise ValueError("n_digits must be >= 1")
    digits = []
    remainder = 1
    for _ in range(n_digits):
        remainder *= 2
        if remainder >= p.value:
            digits.append(1)
            remainder -= p.value
        else:
            digits.append(0)
    return digits


def digit_frequency(bits: Sequence[int]) -> tuple[int, int]:
    """(number of zeros, number of ones)."""
    if len(bits) == 0:
        raise ValueError("digit_frequency of an empty sequence")
    ones = sum(1 for b in bits if b)
    return len(bits) - ones, ones


def find_maximal_primes(limit: int) -> list[PrimeModulus]:
    """Odd primes p <= limit for which 2 is a primitive root, ascending."""
    return [PrimeModulus(n) for n in range(3, limit + 1, 2)
            if is_prime(n) and is_primitive_root_2(n)]


def lfsr_msequence(taps: Iterable[int], degree: int, seed: int = 1) -> list[int]:
    """One period of a Fibonacci LFSR output.

    ``taps`` are the exponents of the feedback polynomial below ``degree``
    (for x^4 + x + 1 pass ``taps=(0, 1)``, ``degree=4``), so the output obeys
    s[n + degree] = XOR of s[n + t] for t in taps.  ``seed`` holds the first
    ``degree`` output bits, most significant first (0b0001 -> 0,0,0,1).
    With a primitive polynomial the period is 2**degree - 1.
    """
    taps = tuple(taps)
    if not 0 < seed < (1 << degree):
        raise ValueError("seed must be a nonzero degree-bit state")
    s = [(seed >> (degree - 1 - i)) & 1 for i in range(degree)]
    n = (1 << degree) - 1
    while len(s) < n:
        k = len(s) - degree
        s.append(sum(s[k + t] for t in taps) & 1)
    return s


# -- text encoding ----------------------------------------------------------

_HEADER = re.compile(r"^# dseq p=(\d+) period=(\d+)$")
LINE_WIDTH = 80


def bits_to_str(bits: Iterable[int]) -> str:
    return "".join("1" if b else "0" for b in bits)


def str_to_bits(text: str) -> list[int]:
    out = []
    for ch in text:
        if ch not in "01":
            raise ValueError(f"invalid digit {ch!r}")
        out.append(ord(ch) - 48)
    return out


def format_sequence(bits: Sequence[int], prime: int = 0) -> str:
    """Render the sequence file format.  ``prime=0`` marks a non-d-sequence."""
    text = bits_to_str(bits)
    lines = [f"# dseq p={int(prime)} period={len(text)}"]
    lines += [text[i:i + LINE_WIDTH] for i in range(0, len(text), LINE_WIDTH)]
    return "\n".join(lines) + "\n"


def parse_sequence(text: str) -> tuple[int, list[int]]:
    """Parse the sequence file format, returning ``(prime, bits)``."""
    if not text:
        raise SequenceFormatError("empty file", 1)
    if not text.endswith("\n"):
        raise SequenceFormatError("file is not newline-terminated", text.count("\n") + 1)
    lines = text[:-1].split("\n")
    m = _HEADER.match(lines[0])
    if not m:
        raise SequenceFormatError("expected header '# dseq p=<prime> period=<n>'", 1)
    prime, period = int(m.group(1)), int(m.group(2))
    bits: list[int] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            raise SequenceFormatError("empty line", lineno)
        if len(line) > LINE_WIDTH:
            raise SequenceFormatError(f"line longer than {LINE_WIDTH} characters", lineno)
        bad = next((c for c in line if c not in "01"), None)
        if bad is not None:
            raise SequenceFormatError(f"invalid character {bad!r}", lineno)
        bits.extend(ord(c) - 48 for c in line)
    if len(bits) != period:
        raise SequenceFormatError(f"header says period={period} but file holds {len(bits)} digits",
                                  len(lines))
    if period == 0:
        raise SequenceFormatError("sequence is empty", 1)
    return prime, bits


def write_sequence(path, bits: Sequence[int], prime: int = 0) -> None:
    Path(path).write_text(format_sequence(bits, prime), encoding="ascii")


def read_sequence(path) -> tuple[int, list[int]]:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError as exc:
        raise SequenceFormatError("non-ASCII content", raw[:exc.start].count(b"\n") + 1) from exc
    return parse_sequence(text)
