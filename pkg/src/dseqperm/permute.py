"""Block partitions, permutations, and cyclic permutation schedules.

A permutation of size B is stored as ``mapping`` where ``mapping[j]`` is the
1-based source position whose digit lands at output position j.  With the
letter notation (a = 1, b = 2, ...) the string "hajbl..." therefore reads
"output 1 takes the digit at h, output 2 takes the digit at a, ...".

A schedule ``[P1, ..., Pn]`` applied to blocks ``S1 S2 S3 ...`` produces
``P1(S1) P2(S2) ... Pn(Sn) P1(Sn+1) ...``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

MASK64 = (1 << 64) - 1


class PermutationParseError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class BlockPartition:
    sequence_length: int
    block_size: int
    block_count: int

    def __post_init__(self):
        if min(self.sequence_length, self.block_size, self.block_count) < 1:
            raise ValueError("partition sizes must be positive")
        if self.block_size * self.block_count != self.sequence_length:
            raise DimensionError(
                f"block_size {self.block_size} x block_count {self.block_count} "
                f"!= sequence length {self.sequence_length}")

    @classmethod
    def from_block_size(cls, sequence_length: int, block_size: int) -> "BlockPartition":
        if block_size < 1 or sequence_length % block_size:
            raise DimensionError(
                f"block size {block_size} does not divide sequence length {sequence_length}")
        return cls(sequence_length, block_size, sequence_length // block_size)

    @property
    def even(self) -> bool:
        return self.block_count % 2 == 0


def partitions_of(sequence_length: int) -> list[BlockPartition]:
    """Every (block_size, block_count) factorization, by increasing block size."""
    if sequence_length < 1:
        raise ValueError("sequence length must be >= 1")
    return [BlockPartition(sequence_length, b, sequence_length // b)
            for b in range(1, sequence_length + 1) if sequence_length % b == 0]


@dataclass(frozen=True)
class Permutation:
    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        if not m:
            raise ValueError("permutation must have size >= 1")
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"mapping is not a bijection on 1..{len(m)}: {list(m)}")
        object.__setattr__(self, "mapping", m)

    @property
    def size(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(tuple(range(1, size + 1)))

    def is_identity(self) -> bool:
        return all(v == j for j, v in enumerate(self.mapping, start=1))

    def apply(self, block: Sequence) -> list:
        if len(block) != self.size:
            raise DimensionError(f"block length {len(block)} != permutation size {self.size}")
        return [block[src - 1] for src in self.mapping]

    def to_numeric(self) -> str:
        return ",".join(map(str, self.mapping))


def invert(perm: Permutation) -> Permutation:
    inv = [0] * perm.size
    for j, src in enumerate(perm.mapping, start=1):
        inv[src - 1] = j
    return Permutation(tuple(inv))


def parse_letter_permutation(text: str) -> Permutation:
    """Parse letter notation such as ``"hajblcfedgikovusrqnpmt"``.

    The letters must be exactly the first ``len(text)`` lowercase letters,
    each once.
    """
    if not text:
        raise PermutationParseError("empty permutation")
    if len(text) > 26:
        raise PermutationParseError(f"letter notation holds at most 26 positions, got {len(text)}")
    alphabet = string.ascii_lowercase[:len(text)]
    seen = set()
    for ch in text:
        if ch not in string.ascii_lowercase:
            raise PermutationParseError(f"invalid character {ch!r}")
        if ch not in alphabet:
            raise PermutationParseError(
                f"letter {ch!r} out of range for size {len(text)} (expected a-{alphabet[-1]})")
        if ch in seen:
            raise PermutationParseError(f"duplicate letter {ch!r}")
        seen.add(ch)
    return Permutation(tuple(ord(ch) - ord("a") + 1 for ch in text))


def format_letter_permutation(perm: Permutation) -> str:
    if perm.size > 26:
        raise ValueError(f"size {perm.size} permutation has no letter form; use numeric notation")
    return "".join(chr(ord("a") + src - 1) for src in perm.mapping)


def parse_numeric_permutation(text: str) -> Permutation:
    try:
        mapping = tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise PermutationParseError(f"bad numeric permutation {text!r}") from exc
    try:
        return Permutation(mapping)
    except ValueError as exc:
        raise PermutationParseError(str(exc)) from exc


def parse_permutation(text: str) -> Permutation:
    """Letter or numeric form, whichever ``text`` is."""
    text = text.strip()
    if text and text[0].isdigit():
        return parse_numeric_permutation(text)
    return parse_letter_permutation(text)


@dataclass(frozen=True)
class PermutationSchedule:
    permutations: tuple[Permutation, ...]

    def __post_init__(self):
        perms = tuple(self.permutations)
        if not perms:
            raise ValueError("schedule needs at least one permutation")
        sizes = {p.size for p in perms}
        if len(sizes) != 1:
            raise DimensionError(f"schedule mixes permutation sizes {sorted(sizes)}")
        object.__setattr__(self, "permutations", perms)

    def __len__(self):
        return len(self.permutations)

    @property
    def size(self) -> int:
        return self.permutations[0].size

    def index_matrix(self) -> np.ndarray:
        """Zero-based source indices, one row per schedule member."""
        return np.array([p.mapping for p in self.permutations], dtype=np.intp) - 1


def _check_dims(length: int, partition: BlockPartition, schedule: PermutationSchedule):
    if length != partition.sequence_length:
        raise DimensionError(
            f"sequence length {length} != partition length {partition.sequence_length}")
    if schedule.size != partition.block_size:
        raise DimensionError(
            f"permutation size {schedule.size} != block size {partition.block_size}")


def apply_schedule_array(bits: np.ndarray, partition: BlockPartition,
                         schedule: PermutationSchedule) -> np.ndarray:
    _check_dims(len(bits), partition, schedule)
    blocks = np.asarray(bits).reshape(partition.block_count, partition.block_size)
    rows = np.arange(partition.block_count)
    idx = schedule.index_matrix()[rows % len(schedule)]
    return blocks[rows[:, None], idx].reshape(-1)


def apply_schedule(bits: Sequence[int], partition: BlockPartition,
                   schedule: PermutationSchedule) -> list[int]:
    """Block k (1-based) is permuted by schedule member ((k - 1) mod n) + 1."""
    return apply_schedule_array(np.asarray(bits), partition, schedule).tolist()


class SplitMix64:
    """splitmix64 generator (Steele, Lea, Flood).

    Each call adds 0x9E3779B97F4A7C15 to the state modulo 2**64 and returns
    the state passed through the mixer::

        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        z = z ^ (z >> 31)

    all arithmetic modulo 2**64.
    """

    def __init__(self, state: int):
        self.state = state & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        return splitmix64_mix(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound).

        Draws are rejected while they fall at or above the largest multiple
        of ``bound`` not exceeding 2**64, then reduced modulo ``bound``.
        """
        if bound < 1:
            raise ValueError("bound must be >= 1")
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            x = self.next()
            if x < limit:
                return x % bound


def splitmix64_mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(seed: int) -> int:
    """First output of a splitmix64 generator seeded with ``seed``."""
    return SplitMix64(seed).next()


# The shuffler is the splitmix64 state itself.
SeededShuffler = SplitMix64


def random_permutation(size: int, shuffler: SplitMix64) -> Permutation:
    """Fisher-Yates shuffle of the identity [1..size].

    For i = size-1 down to 1 (zero-based), swap position i with position
    ``shuffler.below(i + 1)``.  Advances the shuffler by at least size-1
    draws.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    mapping = list(range(1, size + 1))
    for i in range(size - 1, 0, -1):
        j = shuffler.below(i + 1)
        mapping[i], mapping[j] = mapping[j], mapping[i]
    return Permutation(tuple(mapping))


def random_schedule(n: int, size: int, shuffler: SplitMix64) -> PermutationSchedule:
    return PermutationSchedule(tuple(random_permutation(size, shuffler) for _ in range(n)))


def format_schedule(schedule: PermutationSchedule, letters: bool = False) -> str:
    if letters:
        lines = [format_letter_permutation(p) for p in schedule.permutations]
    else:
        lines = [p.to_numeric() for p in schedule.permutations]
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> PermutationSchedule:
    """One permutation per line; ``#`` comment lines and blank lines are skipped."""
    perms = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            perms.append(parse_permutation(line))
        except PermutationParseError as exc:
            raise PermutationParseError(f"line {lineno}: {exc}") from exc
    if not perms:
        raise PermutationParseError("schedule file holds no permutations")
    try:
        return PermutationSchedule(tuple(perms))
    except DimensionError as exc:
        raise PermutationParseError(str(exc)) from exc


def read_schedule(path) -> PermutationSchedule:
    return parse_schedule(Path(path).read_text())


def write_schedule(path, schedule: PermutationSchedule) -> None:
    Path(path).write_text(format_schedule(schedule))
