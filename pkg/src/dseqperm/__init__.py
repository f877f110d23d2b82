"""Binary prime-reciprocal sequences hardened by cyclic block permutations."""

from .harness import (
    BaselineSource,
    ConfigError,
    SweepConfig,
    SweepReport,
    baseline_sweep,
    figure9_preset,
    figure10_preset,
    prime_sweep,
    run_sweep,
    table1_preset,
    table2_preset,
)
from .metrics import (
    AutocorrelationProfile,
    MetricsReport,
    StatTestResult,
    autocorrelation,
    bits_autocorrelation,
    block_frequency_test,
    improvement_factor,
    max_offpeak,
    metrics_report,
    monobit_test,
    randomness_measure,
    runs_test,
    to_bipolar,
)
from .permute import (
    BlockPartition,
    Permutation,
    PermutationSchedule,
    SeededShuffler,
    SplitMix64,
    apply_schedule,
    format_letter_permutation,
    invert,
    parse_letter_permutation,
    partitions_of,
    random_permutation,
)
from .sequence import (
    DSequence,
    PrimeModulus,
    digit_frequency,
    find_maximal_primes,
    generate_dsequence,
    is_primitive_root_2,
    long_division_oracle,
    multiplicative_order,
)

__version__ = "0.1.0"
