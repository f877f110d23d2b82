"""Seeded Monte Carlo sweeps over the number of block permutations.

For every schedule length n in a sweep and every trial t, the trial seed is

    seed = splitmix64(splitmix64(master_seed) XOR ((n * 0x9E3779B97F4A7C15 + t) mod 2**64))

where splitmix64(x) is the first output of a generator seeded with x.  The
inner mix keeps nearby master seeds (0, 1, 2, ...) from sharing trials; an
unmixed XOR would only permute the low bits of t.  A fresh schedule of n
random permutations is drawn from a splitmix64 shuffler started at that
seed.  n = 0 is the unpermuted sequence.  Trials only depend on
(config, n, t), so the report is identical for any worker count;
aggregation folds trials in (n, t) order.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metrics import autocorrelation
from .permute import (
    MASK64,
    BlockPartition,
    SplitMix64,
    apply_schedule_array,
    random_schedule,
    splitmix64,
)
from .sequence import PrimeModulus, find_maximal_primes, generate_dsequence

log = logging.getLogger(__name__)

GOLDEN = 0x9E3779B97F4A7C15
DEFAULT_TRIALS = 100

SWEEP_CSV_HEADER = ["n_perms", "trials", "mean_max_offpeak", "std_max_offpeak",
                    "min", "max", "mean_improvement_factor"]
LAG_CSV_HEADER = ["n_perms", "k", "mean_abs_c_k"]


class ConfigError(ValueError):
    pass


class EntropyUnavailableError(OSError):
    pass


def trial_seed(master_seed: int, n_perms: int, trial: int) -> int:
    return splitmix64(splitmix64(master_seed) ^ ((n_perms * GOLDEN + trial) & MASK64))


@dataclass(frozen=True)
class SweepConfig:
    prime: int
    partition: BlockPartition
    perm_counts: tuple[int, ...]
    trials: int = DEFAULT_TRIALS
    master_seed: int = 0
    label: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "perm_counts", tuple(int(n) for n in self.perm_counts))
        try:
            p = PrimeModulus(int(self.prime))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        seq = generate_dsequence(p)
        if not seq.maximal:
            raise ConfigError(f"2 is not a primitive root of {p.value}; "
                              f"period {seq.period} is not maximal")
        validate_grid(self.partition, self.perm_counts, self.trials, self.master_seed)
        if self.partition.sequence_length != seq.period:
            raise ConfigError(f"partition length {self.partition.sequence_length} "
                              f"!= period {seq.period} of p={p.value}")

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "prime": self.prime,
            "block_size": self.partition.block_size,
            "block_count": self.partition.block_count,
            "sequence_length": self.partition.sequence_length,
            "perm_counts": list(self.perm_counts),
            "trials": self.trials,
            "master_seed": self.master_seed,
        }


def validate_grid(partition: BlockPartition, perm_counts, trials: int, seed: int) -> None:
    if not perm_counts:
        raise ConfigError("perm_counts is empty")
    for n in perm_counts:
        if not 0 <= n <= partition.block_count:
            raise ConfigError(f"perm count {n} outside 0..{partition.block_count} "
                              f"(block count)")
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if not 0 <= seed <= MASK64:
        raise ConfigError("master_seed must be a 64-bit unsigned integer")
    if partition.block_size == 1:
        warnings.warn("block size 1: every permutation is the identity, "
                      "no improvement is possible", stacklevel=3)


def _preset_counts(block_count: int) -> tuple[int, ...]:
    return tuple(range(11)) + (block_count,)


def _preset(label, prime, block_size, trials, master_seed) -> SweepConfig:
    part = BlockPartition.from_block_size(prime - 1, block_size)
    return SweepConfig(prime, part, _preset_counts(part.block_count), trials, master_seed, label)


def table1_preset(trials: int = DEFAULT_TRIALS, master_seed: int = 0) -> SweepConfig:
    """p = 1277 cut into 58 blocks of 22 digits (even block count)."""
    return _preset("table1", 1277, 22, trials, master_seed)


def table2_preset(trials: int = DEFAULT_TRIALS, master_seed: int = 0) -> SweepConfig:
    """p = 1277 cut into 319 blocks of 4 digits (odd block count)."""
    return _preset("table2", 1277, 4, trials, master_seed)


def figure9_preset(trials: int = DEFAULT_TRIALS, master_seed: int = 0) -> SweepConfig:
    """p = 1787 cut into 94 blocks of 19 digits (even block count)."""
    return _preset("fig9", 1787, 19, trials, master_seed)


def figure10_preset(trials: int = DEFAULT_TRIALS, master_seed: int = 0) -> SweepConfig:
    """p = 1787 cut into 47 blocks of 38 digits (odd block count)."""
    return _preset("fig10", 1787, 38, trials, master_seed)


PRESETS = {
    "table1": table1_preset,
    "table2": table2_preset,
    "fig9": figure9_preset,
    "fig10": figure10_preset,
}


@dataclass
class SweepRow:
    n_perms: int
    trials: int
    trial_max_offpeak: list[float]
    trial_improvement_factor: list[float]
    mean_abs_c_by_lag: list[float]
    mean_c_by_lag: list[float]

    @property
    def mean_max_offpeak(self) -> float:
        return float(np.mean(self.trial_max_offpeak))

    @property
    def std_max_offpeak(self) -> float:
        return float(np.std(self.trial_max_offpeak))

    @property
    def min_max_offpeak(self) -> float:
        return min(self.trial_max_offpeak)

    @property
    def max_max_offpeak(self) -> float:
        return max(self.trial_max_offpeak)

    @property
    def mean_improvement_factor(self) -> float:
        return float(np.mean(self.trial_improvement_factor))

    def summary(self) -> dict:
        return {
            "n_perms": self.n_perms,
            "trials": self.trials,
            "mean_max_offpeak": self.mean_max_offpeak,
            "std_max_offpeak": self.std_max_offpeak,
            "min": self.min_max_offpeak,
            "max": self.max_max_offpeak,
            "mean_improvement_factor": self.mean_improvement_factor,
        }


@dataclass
class SweepReport:
    config: dict
    rows: list[SweepRow]
    source: str = "dsequence"
    deterministic: bool = True
    invocation: dict | None = field(default=None)

    def row(self, n_perms: int) -> SweepRow:
        for r in self.rows:
            if r.n_perms == n_perms:
                return r
        raise KeyError(n_perms)

    @property
    def trials(self) -> int:
        return self.config["trials"]

    @property
    def seed(self) -> int:
        return self.config["master_seed"]


# -- trial execution --------------------------------------------------------

def _trial_numerators(bits: np.ndarray, partition: BlockPartition, n_perms: int,
                      seed: int) -> np.ndarray:
    if n_perms == 0:
        permuted = bits
    else:
        schedule = random_schedule(n_perms, partition.block_size, SplitMix64(seed))
        permuted = apply_schedule_array(bits, partition, schedule)
    return autocorrelation(2 * permuted - 1).numerators


def _run_range(args) -> list[np.ndarray]:
    bits, partition, n_perms, start, stop, master_seed = args
    if n_perms == 0:
        # Unpermuted: every trial is the same sequence.
        return [_trial_numerators(bits, partition, 0, 0)] * (stop - start)
    return [_trial_numerators(bits, partition, n_perms, trial_seed(master_seed, n_perms, t))
            for t in range(start, stop)]


def _aggregate(n_perms: int, numerators: Sequence[np.ndarray], length: int) -> SweepRow:
    stack = np.stack(numerators)
    abs_stack = np.abs(stack)
    off_max = abs_stack[:, 1:].max(axis=1)
    trial_max = (off_max / length).tolist()
    trial_if = [float("inf") if m == 0 else length / int(m) for m in off_max]
    return SweepRow(
        n_perms=n_perms,
        trials=len(numerators),
        trial_max_offpeak=trial_max,
        trial_improvement_factor=trial_if,
        mean_abs_c_by_lag=(abs_stack.sum(axis=0) / (len(numerators) * length)).tolist(),
        mean_c_by_lag=(stack.sum(axis=0) / (len(numerators) * length)).tolist(),
    )


def _shards(n_perms: int, trials: int, workers: int) -> list[tuple[int, int]]:
    """Contiguous (start, stop) trial ranges for one schedule length."""
    if n_perms == 0 or workers <= 1:
        return [(0, trials)]
    bounds = np.linspace(0, trials, min(workers, trials) + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _run_cells(bits, partition, perm_counts, trials, master_seed, workers) -> list[SweepRow]:
    tasks, owners = [], []
    for n in perm_counts:
        for start, stop in _shards(n, trials, workers):
            tasks.append((bits, partition, n, start, stop, master_seed))
            owners.append(n)
    if workers <= 1:
        results = [_run_range(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_range, tasks))
    rows = []
    for n in perm_counts:
        nums = [x for owner, res in zip(owners, results) if owner == n for x in res]
        rows.append(_aggregate(n, nums, partition.sequence_length))
    return rows


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepReport:
    """Run every (n, trial) cell of ``config`` and aggregate per n."""
    seq = generate_dsequence(config.prime)
    bits = np.array(seq.bits, dtype=np.int64)
    log.info("sweep %s: p=%d block=%d counts=%s trials=%d", config.label, config.prime,
             config.partition.block_size, config.perm_counts, config.trials)
    rows = _run_cells(bits, config.partition, config.perm_counts, config.trials,
                        config.master_seed, workers)
    return SweepReport(config=config.as_dict(), rows=rows)


def prime_sweep(limit: int) -> list[tuple[int, float]]:
    """(p, R) of the unpermuted d-sequence for every maximal prime <= limit."""
    from .metrics import randomness_measure

    out = []
    for p in find_maximal_primes(limit):
        seq = generate_dsequence(p)
        prof = autocorrelation(2 * np.array(seq.bits, dtype=np.int64) - 1)
        out.append((p.value, randomness_measure(prof)))
    return out


# -- OS entropy baseline ----------------------------------------------------

@dataclass(frozen=True)
class BaselineSource:
    kind: str
    length: int
    prime: int | None = None

    def __post_init__(self):
        if self.kind not in ("dsequence", "os_rng"):
            raise ConfigError(f"unknown baseline kind {self.kind!r}")
        if self.length < 2:
            raise ConfigError("baseline length must be >= 2")
        if self.kind == "dsequence" and self.prime is None:
            raise ConfigError("dsequence baseline needs a prime")


def os_random_bits(length: int) -> np.ndarray:
    try:
        raw = os.urandom((length + 7) // 8)
    except NotImplementedError as exc:
        raise EntropyUnavailableError("no OS entropy source available") from exc
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:length].astype(np.int64)


def baseline_sweep(source: BaselineSource, partition: BlockPartition,
                   perm_counts: Sequence[int], trials: int = DEFAULT_TRIALS,
                   seed: int = 0, workers: int = 1) -> SweepReport:
    """Like :func:`run_sweep`, with the input drawn from ``source``.

    For ``os_rng`` every (n, trial) cell draws a fresh sequence from the host
    entropy source, so the report is not reproducible.  Schedules still come
    from the seeded derivation.
    """
    if source.length != partition.sequence_length:
        raise ConfigError(f"source length {source.length} != partition length "
                          f"{partition.sequence_length}")
    if source.kind == "dsequence":
        cfg = SweepConfig(source.prime, partition, tuple(perm_counts), trials, seed, "baseline")
        return run_sweep(cfg, workers=workers)

    validate_grid(partition, perm_counts, trials, seed)
    rows = []
    for n in perm_counts:
        nums = [_trial_numerators(os_random_bits(source.length), partition, n,
                                  trial_seed(seed, n, t))
                for t in range(trials)]
        rows.append(_aggregate(n, nums, partition.sequence_length))
    config = {
        "label": "baseline",
        "source": "os_rng",
        "block_size": partition.block_size,
        "block_count": partition.block_count,
        "sequence_length": partition.sequence_length,
        "perm_counts": list(perm_counts),
        "trials": trials,
        "master_seed": seed,
    }
    return SweepReport(config=config, rows=rows, source="os_rng", deterministic=False)


# -- serialization ----------------------------------------------------------

def _fmt(x: float, digits: int | None) -> str:
    if digits is None:
        return repr(float(x))
    return f"{x:.{digits}f}"


def sweep_csv(report: SweepReport, round_digits: int | None = None) -> str:
    buf = io.StringIO()
    if not report.deterministic:
        buf.write(f"# source={report.source} nondeterministic: input drawn from OS entropy\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_CSV_HEADER)
    for row in report.rows:
        s = row.summary()
        w.writerow([s["n_perms"], s["trials"]] +
                   [_fmt(s[k], round_digits) for k in SWEEP_CSV_HEADER[2:]])
    return buf.getvalue()


def lag_csv(report: SweepReport, round_digits: int | None = None) -> str:
    buf = io.StringIO()
    if not report.deterministic:
        buf.write(f"# source={report.source} nondeterministic: input drawn from OS entropy\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LAG_CSV_HEADER)
    for row in report.rows:
        for k, v in enumerate(row.mean_abs_c_by_lag):
            w.writerow([row.n_perms, k, _fmt(v, round_digits)])
    return buf.getvalue()


def _json_float(x: float):
    return None if x == float("inf") else x


def report_dict(report: SweepReport) -> dict:
    rows = []
    for row in report.rows:
        d = row.summary()
        d["mean_improvement_factor"] = _json_float(d["mean_improvement_factor"])
        d["trial_max_offpeak"] = row.trial_max_offpeak
        d["trial_improvement_factor"] = [_json_float(x) for x in row.trial_improvement_factor]
        d["mean_abs_autocorr_by_lag"] = row.mean_abs_c_by_lag
        d["mean_autocorr_by_lag"] = row.mean_c_by_lag
        rows.append(d)
    return {
        "config": report.config,
        "source": report.source,
        "deterministic": report.deterministic,
        "invocation": report.invocation,
        "rows": rows,
    }


def report_json(report: SweepReport) -> str:
    return json.dumps(report_dict(report), indent=1) + "\n"


def config_from_dict(d: dict) -> SweepConfig:
    """Rebuild a :class:`SweepConfig` from the ``config`` block of a report."""
    part = BlockPartition(d["sequence_length"], d["block_size"], d["block_count"])
    return SweepConfig(d["prime"], part, tuple(d["perm_counts"]), d["trials"],
                       d["master_seed"], d.get("label", "custom"))


__all__ = [
    "BaselineSource", "ConfigError", "EntropyUnavailableError", "PRESETS", "SweepConfig",
    "SweepReport", "SweepRow", "baseline_sweep", "config_from_dict", "figure10_preset",
    "figure9_preset", "lag_csv", "prime_sweep", "report_dict", "report_json", "run_sweep",
    "sweep_csv", "table1_preset", "table2_preset", "trial_seed",
]
