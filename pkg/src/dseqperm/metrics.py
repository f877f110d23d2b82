"""Cyclic autocorrelation, the randomness measure R, and the improvement factor.

Bits map to bipolar values by 1 -> +1, 0 -> -1.  For a bipolar sequence of
length n, the cyclic autocorrelation numerator at lag k is the integer

    N(k) = sum_j a[j] * a[(j + k) mod n]

and c(k) = N(k) / n.  Everything downstream is derived from the integer
numerators, so R, max |c(k)| and I are exact rationals until the final
float conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gammaincc

ALPHA = 0.01


def to_bipolar(bits: Sequence[int]) -> np.ndarray:
    a = np.asarray(bits, dtype=np.int64)
    if a.size == 0:
        raise ValueError("cannot map an empty sequence")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    return 2 * a - 1


@dataclass(frozen=True, eq=False)
class AutocorrelationProfile:
    """Integer numerators N(0..n-1) of a cyclic autocorrelation."""

    numerators: np.ndarray
    n: int

    def __post_init__(self):
        self.numerators.flags.writeable = False

    @property
    def c(self) -> np.ndarray:
        return self.numerators / self.n

    def exact(self, k: int) -> Fraction:
        return Fraction(int(self.numerators[k]), self.n)

    def __len__(self):
        return self.n


def _cyclic_numerators(a: np.ndarray) -> np.ndarray:
    n = a.size
    f = np.fft.rfft(a.astype(np.float64))
    raw = np.fft.irfft(f * np.conj(f), n)
    num = np.rint(raw).astype(np.int64)
    # Sums of n terms of +-1 are exact in float; this only trips on a numerics bug.
    if np.max(np.abs(raw - num)) > 0.25:
        raise ArithmeticError("FFT autocorrelation lost integer precision")
    return num


def autocorrelation(seq: Sequence[int]) -> AutocorrelationProfile:
    """Cyclic autocorrelation of a bipolar (+1/-1) sequence, n >= 2."""
    a = np.asarray(seq, dtype=np.int64)
    if a.size < 2:
        raise ValueError("autocorrelation needs n >= 2")
    if not np.isin(a, (-1, 1)).all():
        raise ValueError("autocorrelation expects bipolar +1/-1 values")
    return AutocorrelationProfile(_cyclic_numerators(a), int(a.size))


def bits_autocorrelation(bits: Sequence[int]) -> AutocorrelationProfile:
    return autocorrelation(to_bipolar(bits))


def randomness_measure_exact(profile: AutocorrelationProfile) -> Fraction:
    n = profile.n
    total = int(np.abs(profile.numerators[1:]).sum())
    return 1 - Fraction(total, n * (n - 1))


def randomness_measure(profile: AutocorrelationProfile) -> float:
    """R = 1 - mean of |c(k)| over k = 1..n-1."""
    return float(randomness_measure_exact(profile))


def max_offpeak_numerator(profile: AutocorrelationProfile) -> tuple[int, int]:
    off = np.abs(profile.numerators[1:])
    k = int(np.argmax(off))
    return int(off[k]), k + 1


def max_offpeak(profile: AutocorrelationProfile) -> tuple[float, int]:
    """(max |c(k)| over k != 0, smallest lag attaining it)."""
    num, lag = max_offpeak_numerator(profile)
    return num / profile.n, lag


def improvement_factor(profile: AutocorrelationProfile) -> float:
    """1 / max |c(k)|; ``math.inf`` when every off-peak value is zero."""
    num, _ = max_offpeak_numerator(profile)
    if num == 0:
        return math.inf
    return float(Fraction(profile.n, num))


@dataclass(frozen=True)
class MetricsReport:
    randomness_measure: float
    max_offpeak: float
    improvement_factor: float
    offpeak_argmax: int


def metrics_report(bits_or_profile) -> MetricsReport:
    profile = (bits_or_profile if isinstance(bits_or_profile, AutocorrelationProfile)
               else bits_autocorrelation(bits_or_profile))
    value, lag = max_offpeak(profile)
    return MetricsReport(
        randomness_measure=randomness_measure(profile),
        max_offpeak=value,
        improvement_factor=improvement_factor(profile),
        offpeak_argmax=lag,
    )


# -- statistical tests ------------------------------------------------------

@dataclass(frozen=True)
class StatTestResult:
    test_name: str
    statistic: float | None
    p_value: float
    applicable: bool = True
    low_confidence: bool = False

    @property
    def passed(self) -> bool:
        return self.applicable and self.p_value >= ALPHA

    def as_dict(self) -> dict:
        return {
            "test_name": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "pass": self.passed,
            "applicable": self.applicable,
            "low_confidence": self.low_confidence,
        }


def _bits_array(bits) -> np.ndarray:
    a = np.asarray(bits, dtype=np.int64)
    if a.size == 0:
        raise ValueError("statistical tests need a non-empty sequence")
    return a


def monobit_test(bits) -> StatTestResult:
    """Frequency (monobit) test."""
    a = _bits_array(bits)
    n = a.size
    s_obs = abs(int((2 * a - 1).sum())) / math.sqrt(n)
    return StatTestResult("monobit", s_obs, math.erfc(s_obs / math.sqrt(2)),
                          low_confidence=n < 100)


def default_block_len(n: int) -> int:
    # Smallest M with M >= 20, M > n/100 and N = n // M < 100.
    if n < 20:
        return n
    return max(20, n // 99 + 1)


def block_frequency_test(bits, block_len: int | None = None) -> StatTestResult:
    """Frequency test within blocks of ``block_len`` bits; the tail is discarded."""
    a = _bits_array(bits)
    m = default_block_len(a.size) if block_len is None else block_len
    if not 1 <= m <= a.size:
        raise ValueError(f"block_len must be in 1..{a.size}, got {m}")
    n_blocks = a.size // m
    pi = a[:n_blocks * m].reshape(n_blocks, m).sum(axis=1) / m
    chi2 = float(4 * m * ((pi - 0.5) ** 2).sum())
    p = float(gammaincc(n_blocks / 2, chi2 / 2))
    return StatTestResult("block_frequency", chi2, p, low_confidence=a.size < 100)


def runs_test(bits) -> StatTestResult:
    """Runs test; not applicable when the ones-proportion fails its frequency gate."""
    a = _bits_array(bits)
    n = a.size
    pi = a.sum() / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return StatTestResult("runs", None, 0.0, applicable=False,
                              low_confidence=n < 100)
    v_obs = 1 + int((a[1:] != a[:-1]).sum())
    spread = 2 * n * pi * (1 - pi)
    p = math.erfc(abs(v_obs - spread) / (2 * math.sqrt(2 * n) * pi * (1 - pi)))
    return StatTestResult("runs", float(v_obs), p, low_confidence=n < 100)


def stat_tests(bits, block_len: int | None = None) -> list[StatTestResult]:
    return [monobit_test(bits), block_frequency_test(bits, block_len), runs_test(bits)]
