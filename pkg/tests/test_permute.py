import itertools
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from dseqperm.permute import (
    BlockPartition,
    DimensionError,
    Permutation,
    PermutationParseError,
    PermutationSchedule,
    SplitMix64,
    apply_schedule,
    format_letter_permutation,
    format_schedule,
    invert,
    parse_letter_permutation,
    parse_permutation,
    parse_schedule,
    partitions_of,
    random_permutation,
    random_schedule,
    splitmix64,
)
from dseqperm.sequence import bits_to_str, generate_dsequence, str_to_bits

from oracles import ref_shuffle

WORKED_PERM = "hajblcfedgikovusrqnpmt"
WORKED_BLOCK = "1010100110110111101111"
WORKED_OUT = "1100110100111111011101"


def sched(*letters):
    return PermutationSchedule(tuple(parse_letter_permutation(x) for x in letters))


def test_partitions_of():
    pairs = [(p.block_size, p.block_count) for p in partitions_of(1276)]
    assert (22, 58) in pairs and (4, 319) in pairs
    assert pairs == sorted(pairs)
    pairs = [(p.block_size, p.block_count) for p in partitions_of(1786)]
    assert (19, 94) in pairs and (38, 47) in pairs
    assert [(p.block_size, p.block_count) for p in partitions_of(7)] == [(1, 7), (7, 1)]


def test_partition_parity_and_validation():
    assert BlockPartition(1276, 22, 58).even
    assert not BlockPartition(1276, 4, 319).even
    with pytest.raises(DimensionError):
        BlockPartition(1276, 5, 255)
    with pytest.raises(DimensionError):
        BlockPartition.from_block_size(1276, 5)


def test_worked_letter_permutation():
    p = parse_letter_permutation(WORKED_PERM)
    assert p.size == 22
    assert bits_to_str(p.apply(str_to_bits(WORKED_BLOCK))) == WORKED_OUT
    assert format_letter_permutation(p) == WORKED_PERM


def test_letter_small_cases():
    assert parse_letter_permutation("abc").is_identity()
    assert parse_letter_permutation("ba").apply([0, 1]) == [1, 0]
    assert format_letter_permutation(Permutation.identity(3)) == "abc"
    assert format_letter_permutation(Permutation((2, 1))) == "ba"


@pytest.mark.parametrize("text, culprit", [("abb", "'b'"), ("abd", "'d'"), ("aB", "'B'"),
                                           ("a1", "'1'")])
def test_letter_parse_errors_name_character(text, culprit):
    with pytest.raises(PermutationParseError, match=culprit):
        parse_letter_permutation(text)


def test_letter_format_too_large():
    with pytest.raises(ValueError):
        format_letter_permutation(Permutation.identity(27))


def test_invert():
    assert invert(Permutation.identity(4)).is_identity()
    assert invert(Permutation((2, 3, 1))).mapping == (3, 1, 2)
    p = parse_letter_permutation(WORKED_PERM)
    block = str_to_bits(WORKED_BLOCK)
    assert invert(p).apply(p.apply(block)) == block
    assert invert(p).apply(list(p.mapping)) == list(range(1, 23))


def test_apply_schedule_worked_block():
    out = apply_schedule(str_to_bits(WORKED_BLOCK), BlockPartition(22, 22, 1), sched(WORKED_PERM))
    assert bits_to_str(out) == WORKED_OUT


def test_apply_schedule_two_transpositions():
    out = apply_schedule(str_to_bits("01001110"), BlockPartition(8, 2, 4), sched("ba", "ab"))
    assert bits_to_str(out) == "10001110"


def test_apply_schedule_cycles_members():
    # block k uses member (k-1) mod n; tag blocks with their own indices to see who moved
    part = BlockPartition(9, 3, 3)
    out = apply_schedule(list(range(9)), part, sched("cab", "bca"))
    assert out == [2, 0, 1, 4, 5, 3, 8, 6, 7]


def test_apply_schedule_dimension_errors():
    with pytest.raises(DimensionError, match="3.*2"):
        apply_schedule([0] * 6, BlockPartition(6, 2, 3), sched("abc"))
    with pytest.raises(DimensionError, match="5.*6"):
        apply_schedule([0] * 5, BlockPartition(6, 2, 3), sched("ab"))
    with pytest.raises(DimensionError):
        PermutationSchedule((Permutation.identity(2), Permutation.identity(3)))


@pytest.mark.parametrize("n", [1, 2, 5])
def test_identity_schedule(n):
    bits = list(generate_dsequence(1277).bits)
    s = PermutationSchedule((Permutation.identity(22),) * n)
    assert apply_schedule(bits, BlockPartition(1276, 22, 58), s) == bits


# -- splitmix64 / shuffling ---------------------------------------------------

def test_splitmix64_reference_values():
    # published reference outputs for seed 1234567
    g = SplitMix64(1234567)
    assert [g.next() for _ in range(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821]
    assert splitmix64(1234567) == 6457827717110365317


def test_below_range_and_rejection():
    g = SplitMix64(9)
    assert all(0 <= g.below(7) < 7 for _ in range(1000))
    assert all(g.below(1) == 0 for _ in range(10))
    with pytest.raises(ValueError):
        g.below(0)


def test_random_permutation_size_one():
    for seed in range(10):
        assert random_permutation(1, SplitMix64(seed)).is_identity()


def test_random_permutation_reproducible():
    a = SplitMix64(42)
    first = [random_permutation(5, a), random_permutation(5, a)]
    b = SplitMix64(42)
    second = [random_permutation(5, b), random_permutation(5, b)]
    assert first == second
    assert a.state == b.state
    assert [p.mapping for p in first] == ref_shuffle(5, 42, 2)


def test_random_permutation_matches_reference_22():
    g = SplitMix64(2024)
    assert [random_permutation(22, g).mapping for _ in range(4)] == ref_shuffle(22, 2024, 4)


def test_random_permutation_uniform_size3():
    counts = Counter()
    for seed in range(600):
        g = SplitMix64(seed)
        for _ in range(100):
            counts[random_permutation(3, g).mapping] += 1
    assert set(counts) == set(itertools.permutations((1, 2, 3)))
    for c in counts.values():
        assert abs(c / 60000 - 1 / 6) <= 0.01
    # chi-square with 5 degrees of freedom; 20.5 is the 0.999 quantile
    chi2 = sum((c - 10000) ** 2 / 10000 for c in counts.values())
    assert chi2 < 20.5


# -- schedule file format ---------------------------------------------------

def test_schedule_file_roundtrip():
    s = random_schedule(4, 22, SplitMix64(3))
    assert parse_schedule(format_schedule(s)) == s
    assert parse_schedule(format_schedule(s, letters=True)) == s


def test_schedule_file_comments_and_mixed_forms():
    s = parse_schedule("# header\nba\n\n2,1\n# tail\n")
    assert [p.mapping for p in s.permutations] == [(2, 1), (2, 1)]
    assert parse_permutation("8,1,10,2,12,3,6,5,4,7,9,11,15,22,21,19,18,17,14,16,13,20") \
        == parse_letter_permutation(WORKED_PERM)


@pytest.mark.parametrize("text", ["", "# nothing\n", "ab\nabc\n", "1,1\n", "zz\n"])
def test_schedule_file_errors(text):
    with pytest.raises(PermutationParseError):
        parse_schedule(text)


# -- properties -------------------------------------------------------------

@st.composite
def perms(draw, max_size=26):
    n = draw(st.integers(1, max_size))
    return Permutation(tuple(draw(st.permutations(range(1, n + 1)))))


@given(perms())
def test_letter_roundtrip_property(p):
    assert parse_letter_permutation(format_letter_permutation(p)) == p


@given(perms(40), st.data())
def test_invert_property(p, data):
    block = data.draw(st.lists(st.integers(0, 1), min_size=p.size, max_size=p.size))
    assert invert(p).apply(p.apply(block)) == block
    assert p.apply(invert(p).apply(block)) == block


@given(st.integers(1, 8), st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**64 - 1),
       st.data())
@settings(max_examples=80)
def test_apply_preserves_block_multisets(size, count, n, seed, data):
    part = BlockPartition(size * count, size, count)
    bits = data.draw(st.lists(st.integers(0, 1), min_size=size * count, max_size=size * count))
    out = apply_schedule(bits, part, random_schedule(n, size, SplitMix64(seed)))
    for k in range(count):
        blk = slice(k * size, (k + 1) * size)
        assert sorted(out[blk]) == sorted(bits[blk])


@pytest.mark.parametrize("p, block_size", [(1277, 22), (1787, 19), (1277, 2), (13, 2), (13, 3)])
def test_complement_preservation(p, block_size):
    seq = generate_dsequence(p)
    part = BlockPartition.from_block_size(seq.period, block_size)
    assert part.even
    half_blocks = part.block_count // 2
    h = seq.period // 2
    for n in [d for d in range(1, half_blocks + 1) if half_blocks % d == 0]:
        for seed in range(5):
            out = apply_schedule(list(seq.bits), part,
                                 random_schedule(n, block_size, SplitMix64(seed)))
            assert all(out[i + h] == 1 - out[i] for i in range(h)), (n, seed)
