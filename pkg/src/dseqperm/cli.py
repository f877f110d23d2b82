"""Command-line interface.

Exit codes: 0 success, 2 usage or validation error, 3 environment error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness, metrics, permute, sequence

EXIT_OK, EXIT_USAGE, EXIT_ENV = 0, 2, 3


class UsageError(Exception):
    pass


def _read_seq(path):
    try:
        return sequence.read_sequence(path)
    except FileNotFoundError as exc:
        raise UsageError(f"{path}: no such file") from exc
    except sequence.SequenceFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_generate(args) -> int:
    try:
        p = sequence.PrimeModulus(args.prime)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    seq = sequence.generate_dsequence(p)
    out = args.out or f"p{p.value}.dseq"
    sequence.write_sequence(out, seq.bits, p.value)
    print(f"period={seq.period} maximal={str(seq.maximal).lower()}")
    return EXIT_OK


def cmd_permute(args) -> int:
    prime, bits = _read_seq(args.input)
    try:
        partition = permute.BlockPartition.from_block_size(len(bits), args.block_size)
    except permute.DimensionError as exc:
        raise UsageError(f"sequence length {len(bits)} is not divisible by block size "
                         f"{args.block_size}") from exc
    if args.schedule:
        try:
            schedule = permute.read_schedule(args.schedule)
        except (OSError, permute.PermutationParseError) as exc:
            raise UsageError(f"{args.schedule}: {exc}") from exc
    else:
        if args.n_perms is None:
            raise UsageError("give --n-perms (with --seed) or --schedule")
        if not 0 <= args.n_perms <= partition.block_count:
            raise UsageError(f"--n-perms {args.n_perms} outside 0..{partition.block_count}")
        if args.n_perms == 0:
            schedule = None
        else:
            schedule = permute.random_schedule(args.n_perms, partition.block_size,
                                               permute.SplitMix64(args.seed))
    if schedule is None:
        out_bits = bits
        sidecar = "# identity: no permutations applied\n"
    else:
        try:
            out_bits = permute.apply_schedule(bits, partition, schedule)
        except permute.DimensionError as exc:
            raise UsageError(str(exc)) from exc
        sidecar = (f"# block_size={partition.block_size} n_perms={len(schedule)} "
                   f"seed={args.seed if not args.schedule else 'file'}\n"
                   + permute.format_schedule(schedule))
    sequence.write_sequence(args.out, out_bits, prime)
    Path(str(args.out) + ".schedule").write_text(sidecar)
    return EXIT_OK


def _autocorr_csv(profile) -> str:
    lines = ["k,c_k"]
    lines += [f"{k},{c!r}" for k, c in enumerate(profile.c.tolist())]
    return "\n".join(lines) + "\n"


def cmd_autocorr(args) -> int:
    _, bits = _read_seq(args.input)
    if len(bits) < 2:
        raise UsageError("autocorrelation needs at least 2 digits")
    text = _autocorr_csv(metrics.bits_autocorrelation(bits))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def metrics_record(prime, bits, block_size=None, n_perms=None, block_len=None) -> dict:
    rep = metrics.metrics_report(bits)
    return {
        "prime": prime or None,
        "block_size": block_size,
        "n_perms": n_perms,
        "R": rep.randomness_measure,
        "max_offpeak": rep.max_offpeak,
        "argmax_lag": rep.offpeak_argmax,
        "improvement_factor": None if rep.improvement_factor == float("inf")
        else rep.improvement_factor,
        "tests": [t.as_dict() for t in metrics.stat_tests(bits, block_len)],
    }


def cmd_metrics(args) -> int:
    prime, bits = _read_seq(args.input)
    if len(bits) < 2:
        raise UsageError("metrics need at least 2 digits")
    rec = metrics_record(prime, bits, args.block_size, args.n_perms, args.block_len)
    if args.json:
        sys.stdout.write(json.dumps(rec) + "\n")
    else:
        print(f"R={rec['R']:.6f} max_offpeak={rec['max_offpeak']:.6f} "
              f"lag={rec['argmax_lag']} I={rec['improvement_factor']}")
        for t in rec["tests"]:
            verdict = "pass" if t["pass"] else ("n/a" if not t["applicable"] else "FAIL")
            print(f"  {t['test_name']:<16} p={t['p_value']:.6f} {verdict}")
    return EXIT_OK


def _write_reports(report, label, out_dir, round_digits):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{label}_sweep.csv").write_text(harness.sweep_csv(report, round_digits))
    (out / f"{label}_lags.csv").write_text(harness.lag_csv(report, round_digits))
    (out / f"{label}_report.json").write_text(harness.report_json(report))


def _sweep_config(args) -> harness.SweepConfig:
    if args.replay:
        data = json.loads(Path(args.replay).read_text())
        return harness.config_from_dict(data["config"])
    if args.preset:
        return harness.PRESETS[args.preset](args.trials, args.seed)
    if args.prime is None or args.block_size is None:
        raise UsageError("give --preset, --replay, or --prime with --block-size")
    p = args.prime
    try:
        part = permute.BlockPartition.from_block_size(p - 1, args.block_size)
    except (ValueError, permute.DimensionError) as exc:
        raise UsageError(str(exc)) from exc
    counts = args.perm_counts
    if counts is None:
        counts = list(range(11)) + [part.block_count]
        counts = sorted(set(c for c in counts if c <= part.block_count))
    return harness.SweepConfig(p, part, tuple(counts), args.trials, args.seed,
                               f"p{p}_b{args.block_size}")


def cmd_sweep(args) -> int:
    try:
        config = _sweep_config(args)
    except (harness.ConfigError, OSError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid sweep configuration: {exc}") from exc
    report = harness.run_sweep(config, workers=args.workers)
    report.invocation = {"subcommand": "sweep", **config.as_dict(), "round": args.round}
    _write_reports(report, config.label, args.out_dir, args.round)
    for row in report.rows:
        print(f"n={row.n_perms:<4d} mean_max_offpeak={row.mean_max_offpeak:.4f} "
              f"I={row.mean_improvement_factor:.2f}")
    return EXIT_OK


def cmd_primes(args) -> int:
    if args.limit < 0:
        raise UsageError("--limit must be non-negative")
    lines = ["prime,period,R"]
    for p, r in (harness.prime_sweep(args.limit) if args.limit >= 3 else []):
        value = f"{r:.{args.round}f}" if args.round is not None else repr(r)
        lines.append(f"{p},{p - 1},{value}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_baseline(args) -> int:
    try:
        part = permute.BlockPartition.from_block_size(args.length, args.block_size)
        counts = args.perm_counts or sorted({0, 1, 2, 3, part.block_count})
        source = harness.BaselineSource("os_rng", args.length)
        report = harness.baseline_sweep(source, part, counts, args.trials, args.seed)
    except (harness.ConfigError, permute.DimensionError) as exc:
        raise UsageError(str(exc)) from exc
    report.invocation = {"subcommand": "baseline", **report.config, "round": args.round}
    _write_reports(report, "baseline", args.out_dir, args.round)
    print("# source=os_rng: input drawn from host entropy, output is not reproducible")
    for row in report.rows:
        print(f"n={row.n_perms:<4d} mean_max_offpeak={row.mean_max_offpeak:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dseqperm",
                                 description="d-sequence block-permutation hardening")
    ap.add_argument("--verbose", "-v", action="store_true")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("generate", help="write one period of the d-sequence of 1/p")
    g.add_argument("--prime", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("permute", help="apply a block permutation schedule")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--n-perms", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schedule")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_permute)

    a = sub.add_parser("autocorr", help="cyclic autocorrelation CSV")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--out")
    a.set_defaults(func=cmd_autocorr)

    m = sub.add_parser("metrics", help="R, max off-peak, improvement factor, stat tests")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--json", action="store_true")
    m.add_argument("--block-size", type=int, help="annotation recorded in the JSON")
    m.add_argument("--n-perms", type=int, help="annotation recorded in the JSON")
    m.add_argument("--block-len", type=int, help="block frequency test block length")
    m.set_defaults(func=cmd_metrics)

    s = sub.add_parser("sweep", help="Monte Carlo permutation-count sweep")
    s.add_argument("--preset", choices=sorted(harness.PRESETS))
    s.add_argument("--replay", help="rerun the config embedded in a report JSON")
    s.add_argument("--prime", type=int)
    s.add_argument("--block-size", type=int)
    s.add_argument("--perm-counts", type=_int_list)
    s.add_argument("--trials", type=int, default=harness.DEFAULT_TRIALS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-dir", default=".")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--round", type=int)
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("primes", help="R of maximal d-sequences up to a limit")
    r.add_argument("--limit", type=int, required=True)
    r.add_argument("--out")
    r.add_argument("--round", type=int)
    r.set_defaults(func=cmd_primes)

    b = sub.add_parser("baseline", help="sweep over OS-entropy sequences")
    b.add_argument("--length", type=int, default=1276)
    b.add_argument("--block-size", type=int, default=22)
    b.add_argument("--perm-counts", type=_int_list)
    b.add_argument("--trials", type=int, default=harness.DEFAULT_TRIALS)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out-dir", default=".")
    b.add_argument("--round", type=int)
    b.set_defaults(func=cmd_baseline)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except harness.EntropyUnavailableError as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
