"""Exit criteria for the package, one test (or group) per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

import json
import time
import timeit
from fractions import Fraction

import numpy as np
import pytest

from dseqperm.cli import main
from dseqperm.harness import PRESETS, prime_sweep, run_sweep
from dseqperm.metrics import (
    autocorrelation,
    bits_autocorrelation,
    improvement_factor,
    max_offpeak,
    randomness_measure,
    randomness_measure_exact,
)
from dseqperm.permute import BlockPartition, PermutationSchedule, apply_schedule, parse_letter_permutation
from dseqperm.sequence import (
    bits_to_str,
    find_maximal_primes,
    generate_dsequence,
    is_prime,
    lfsr_msequence,
    long_division_oracle,
    str_to_bits,
)

from oracles import brute_numerators

ACCEPTANCE_SEEDS = (0, 20240601, 2**64 - 1)


@pytest.fixture(scope="module")
def sweeps():
    """table1/table2 presets at trials=100 for several master seeds, plus timing."""
    start = time.perf_counter()
    out = {(name, seed): run_sweep(PRESETS[name](trials=100, master_seed=seed))
           for name in ("table1", "table2") for seed in ACCEPTANCE_SEEDS}
    elapsed = time.perf_counter() - start
    return out, elapsed


@pytest.mark.criterion(1, "d-sequence of 13 is 000100111011, < 1 ms")
def test_exact_generation():
    assert bits_to_str(generate_dsequence(13).bits) == "000100111011"
    best = min(timeit.repeat(lambda: generate_dsequence(13), number=100, repeat=5)) / 100
    print(f"generate_dsequence(13): {best * 1e6:.1f} us")
    assert best < 1e-3


@pytest.mark.criterion(2, "22-letter permutation maps the worked block exactly")
def test_exact_permutation():
    perm = parse_letter_permutation("hajblcfedgikovusrqnpmt")
    out = apply_schedule(str_to_bits("1010100110110111101111"), BlockPartition(22, 22, 1),
                         PermutationSchedule((perm,)))
    assert bits_to_str(out) == "1100110100111111011101"


@pytest.mark.criterion(3, "table1 n=0,1 and table2 n=0 max off-peak == 1.0 on every trial")
def test_deterministic_columns(sweeps):
    reports, _ = sweeps
    for seed in ACCEPTANCE_SEEDS:
        t1, t2 = reports["table1", seed], reports["table2", seed]
        for n in (0, 1):
            assert t1.row(n).trial_max_offpeak == [1.0] * 100
        assert t2.row(0).trial_max_offpeak == [1.0] * 100


@pytest.mark.criterion(4, "table1/table2 bands at trials=100, runtime < 2 min")
def test_statistical_bands(sweeps):
    reports, elapsed = sweeps
    for seed in ACCEPTANCE_SEEDS:
        t1, t2 = reports["table1", seed], reports["table2", seed]
        for n in list(range(2, 11)) + [58]:
            m = t1.row(n).mean_max_offpeak
            assert 0.05 <= m <= 0.25, ("table1", seed, n, m)
        for n in range(1, 11):
            m = t2.row(n).mean_max_offpeak
            assert 0.15 <= m <= 0.70, ("table2", seed, n, m)
        m = t2.row(319).mean_max_offpeak
        assert 0.10 <= m <= 0.35, ("table2", seed, 319, m)
    print(f"{len(reports)} sweeps in {elapsed:.1f} s")
    # the criterion's budget is for one table1 + table2 pass; all seeds must fit too
    assert elapsed < 120


@pytest.mark.criterion(5, "I x max_offpeak == 1 within 1e-12 on every report")
def test_improvement_identity(sweeps):
    reports, _ = sweeps
    checked = 0
    for report in reports.values():
        for row in report.rows:
            for m, i in zip(row.trial_max_offpeak, row.trial_improvement_factor):
                assert abs(i * m - 1) < 1e-12
                checked += 1
    for p in find_maximal_primes(2000):
        prof = bits_autocorrelation(generate_dsequence(p).bits)
        assert abs(improvement_factor(prof) * max_offpeak(prof)[0] - 1) < 1e-12
        checked += 1
    print(f"{checked} reports checked")


@pytest.mark.criterion(6, "R of the period-15 m-sequence equals 1 - 1/15 exactly")
def test_msequence_oracle():
    seq = lfsr_msequence((0, 1), 4, 0b0001)
    assert len(seq) == 15
    prof = bits_autocorrelation(seq)
    assert randomness_measure_exact(prof) == 1 - Fraction(1, 15)
    assert randomness_measure(prof) == float(Fraction(14, 15))


@pytest.mark.criterion(7, "prime sweep trend: mean R on [100,200] > mean R on [3,50], < 1 s")
def test_prime_sweep_trend():
    start = time.perf_counter()
    rows = prime_sweep(200)
    elapsed = time.perf_counter() - start
    low = [r for p, r in rows if p <= 50]
    high = [r for p, r in rows if 100 <= p <= 200]
    print(f"mean R [3,50]={np.mean(low):.4f} [100,200]={np.mean(high):.4f} in {elapsed * 1e3:.0f} ms")
    assert np.mean(high) > np.mean(low)
    assert elapsed < 1.0


@pytest.mark.criterion(8, "c(period/2) == -1 for every maximal prime < 2000")
def test_complement_peak():
    primes = find_maximal_primes(1999)
    assert len(primes) > 100
    for p in primes:
        seq = generate_dsequence(p)
        prof = bits_autocorrelation(seq.bits)
        assert prof.exact(seq.period // 2) == -1, p.value


@pytest.mark.criterion(9, "autocorrelation == O(n^2) oracle; generator == long division")
def test_oracle_equivalence():
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = int(rng.integers(2, 501))
        values = (2 * rng.integers(0, 2, n) - 1).tolist()
        assert autocorrelation(values).numerators.tolist() == brute_numerators(values)
    for p in (q for q in range(3, 2000, 2) if is_prime(q)):
        seq = generate_dsequence(p)
        assert list(seq.bits) == long_division_oracle(p, seq.period)


@pytest.mark.criterion(10, "table1 sweep: --workers 1 and --workers 8 byte-identical")
def test_parallel_determinism(tmp_path, capsys):
    outputs = []
    for workers in (1, 8):
        d = tmp_path / f"w{workers}"
        assert main(["sweep", "--preset", "table1", "--trials", "100", "--seed", "31337",
                     "--workers", str(workers), "--out-dir", str(d)]) == 0
        outputs.append({f.name: f.read_bytes() for f in sorted(d.iterdir())})
    capsys.readouterr()
    assert set(outputs[0]) == {"table1_sweep.csv", "table1_lags.csv", "table1_report.json"}
    assert outputs[0] == outputs[1]
    assert json.loads(outputs[0]["table1_report.json"])["config"]["master_seed"] == 31337


@pytest.mark.criterion(11, "two or three permutations suffice: n=2,3 mean max < 0.25 (I > 4)")
def test_conclusion_claim(sweeps):
    reports, _ = sweeps
    for seed in ACCEPTANCE_SEEDS:
        t1 = reports["table1", seed]
        for n in (2, 3):
            assert t1.row(n).mean_max_offpeak < 0.25
            assert 1 / t1.row(n).mean_max_offpeak > 4
            assert t1.row(n).mean_improvement_factor > 4
