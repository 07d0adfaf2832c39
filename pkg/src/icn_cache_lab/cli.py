"""Command-line entry point: ``icn-cache-lab generate|simulate|analyze``.

Exit codes: 0 success, 1 usage error, 2 input-data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import re
import sys
from typing import Optional, Sequence

from . import analysis, overhead
from .config import ConfigError, load_config
from .experiments import chunked_stream
from .sim import run_many, summary_csv
from .workload import (
    KB,
    KBPS,
    TRACE_PROFILES,
    PatternSpec,
    TraceFormatError,
    ZipfSpec,
    chunks_per_second,
    load_trace,
    pattern_stream,
    save_trace,
    trace_profile_stream,
    zipf_stream,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
JOBS_ENV = "ICN_CACHE_LAB_JOBS"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _write_text(path: Optional[str], text: str) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


# -- generate ---------------------------------------------------------------------


def _summary(stream, path: str) -> str:
    ids = stream.chunks
    return f"wrote {len(ids)} requests ({len(set(ids.tolist()))} unique) to {path}"


def cmd_generate(args) -> int:
    if args.source == "zipf":
        stream = zipf_stream(
            ZipfSpec(args.contents, args.alpha, args.requests, args.seed, args.interarrival, args.arrivals)
        )
    elif args.source == "chunked":
        stream = chunked_stream(
            args.contents,
            args.alpha,
            args.requests,
            args.seed,
            chunk_kb=args.chunk_kb,
            bitrate_kbps=args.bitrate_kbps,
            content_kb=args.content_kb,
            interarrival=args.interarrival,
            arrivals=args.arrivals,
        )
        rate = chunks_per_second(args.bitrate_kbps * KBPS, int(round(args.chunk_kb * KB)))
        print(f"chunk rate {rate:g} chunks/s")
    elif args.source == "pattern":
        if args.kind == "fickle" and args.seed is None:
            raise UsageError("fickle patterns are random: --seed is required")
        spec = PatternSpec(
            args.kind,
            length=args.length,
            period=args.period,
            reps=args.reps,
            set_size=args.set_size,
            burst_length=args.burst_length,
            bursts=args.bursts,
            phases=args.phases,
            phase_length=args.phase_length,
            alphabet=args.alphabet,
            rotation=args.rotation,
            seed=args.seed or 0,
        )
        stream = pattern_stream(spec)
    else:
        stream = trace_profile_stream(args.row, args.scale, seed=args.seed)
    save_trace(stream, args.out)
    print(_summary(stream, args.out))
    return EXIT_OK


# -- simulate -----------------------------------------------------------------------


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9.-]+", "_", text).strip("_")


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config)
    except FileNotFoundError as exc:
        raise DataError(f"config not found: {exc.filename}") from None
    except ConfigError as exc:
        raise DataError(f"invalid config: {exc}") from None
    if args.topology:
        cfg.topologies = list(args.topology)
    out_dir = args.out or cfg.output
    try:
        streams = cfg.streams()
    except FileNotFoundError as exc:
        raise DataError(f"trace not found: {exc.filename}") from None
    except ValueError as exc:
        raise DataError(str(exc)) from None

    cells = cfg.cells()
    # compute everything before writing so a failure leaves no partial output
    results = []
    for seed, stream in streams:
        for cell, report in zip(cells, run_many(stream, cells, args.jobs)):
            results.append((seed, cell, report))

    os.makedirs(out_dir, exist_ok=True)
    for seed, cell, report in results:
        stem = f"{_slug(cell.policy.label)}_c{cell.capacity}_{_slug(cell.topology)}"
        if seed is not None:
            stem += f"_s{seed}"
        base = os.path.join(out_dir, stem)
        _write_text(base + ".json", report.to_json())
        _write_text(base + ".csv", report.nodes_csv())
        if report.dynamics:
            _write_text(base + "_dynamics.csv", report.dynamics_csv())
    _write_text(os.path.join(out_dir, "summary.csv"), summary_csv([r for _, _, r in results]))
    print(f"{len(results)} cells written to {out_dir}")
    return EXIT_OK


# -- analyze -------------------------------------------------------------------------


def _load(path: str):
    try:
        return load_trace(path)
    except FileNotFoundError:
        raise DataError(f"trace not found: {path}") from None


def cmd_analyze(args) -> int:
    what = args.what
    if what == "overhead":
        return _analyze_overhead(args)
    stream = _load(args.trace)
    if what == "rd-cdf":
        profile = analysis.reuse_distance(stream, args.mode)
        fh, close = _open_out(args.out)
        try:
            analysis.write_cdf_csv(profile, fh)
        finally:
            if close:
                fh.close()
        inf = int(len(profile.distances) - len(profile.finite))
        print(f"{len(profile.finite)} finite distances, {inf} first accesses", file=sys.stderr)
    elif what == "popularity":
        ids, counts = analysis.popularity_histogram(stream)
        fh, close = _open_out(args.out)
        try:
            analysis.write_popularity_csv(ids, counts, fh)
        finally:
            if close:
                fh.close()
    else:
        window = args.window or len(stream)
        if window > len(stream):
            raise DataError(f"window {window} exceeds stream length {len(stream)}")
        tc = analysis.traffic_counts(stream, window)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["window", "h1", "h2", "h3", "beta", "gamma"])
        for k, (a, b, c) in enumerate(zip(tc.h1.tolist(), tc.h2.tolist(), tc.h3.tolist())):
            w.writerow([k, a, b, c, repr(b / a), repr(c / a)])
        _write_text(args.out, buf.getvalue())
        print(f"beta={tc.pooled_beta:g} gamma={tc.pooled_gamma:g}", file=sys.stderr)
    return EXIT_OK


def _analyze_overhead(args) -> int:
    if args.pointer_bits is not None and args.pointer_bits < overhead.min_pointer_bits(args.entries):
        raise UsageError(
            f"--pointer-bits {args.pointer_bits} cannot address {args.entries} entries"
        )
    if args.policy:
        try:
            bits = overhead.space_overhead(args.policy, args.entries, args.pointer_bits, args.counter_bits, args.ghosts)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        print(bits)
        return EXIT_OK
    rows = overhead.overhead_rows(args.entries, args.pointer_bits, args.counter_bits, args.ghosts)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if v is None else v) for k, v in row.items()})
    _write_text(args.out, buf.getvalue())
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="icn-cache-lab", description="Chunk-cache replacement experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a synthetic trace")
    gsub = gen.add_subparsers(dest="source", required=True, parser_class=_Parser)

    def zipf_args(p, default_arrivals):
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--contents", type=_positive_int, required=True)
        p.add_argument("--requests", type=_positive_int, required=True)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--interarrival", type=float, default=1.0, help="mean seconds between content requests")
        p.add_argument("--arrivals", choices=["constant", "poisson"], default=default_arrivals)
        p.add_argument("-o", "--out", required=True)

    zipf_args(gsub.add_parser("zipf", help="i.i.d. Zipf content requests"), "constant")
    ch = gsub.add_parser("chunked", help="Zipf sessions split into paced chunk requests")
    zipf_args(ch, "poisson")
    ch.add_argument("--chunk-kb", type=float, default=15.0)
    ch.add_argument("--bitrate-kbps", type=float, default=600.0)
    ch.add_argument("--content-kb", type=float, default=600.0)

    pat = gsub.add_parser("pattern", help="scan, loop, correlated or fickle pattern")
    pat.add_argument("--kind", choices=["scan", "loop", "correlated", "fickle"], required=True)
    pat.add_argument("--length", type=int, default=0)
    pat.add_argument("--period", type=int, default=0)
    pat.add_argument("--reps", type=int, default=1)
    pat.add_argument("--set-size", type=int, default=0)
    pat.add_argument("--burst-length", type=int, default=0)
    pat.add_argument("--bursts", type=int, default=1)
    pat.add_argument("--phases", type=int, default=1)
    pat.add_argument("--phase-length", type=int, default=0)
    pat.add_argument("--alphabet", type=int, default=0)
    pat.add_argument("--rotation", type=float, default=0.5)
    pat.add_argument("--seed", type=int)
    pat.add_argument("-o", "--out", required=True)

    prof = gsub.add_parser("profile", help="stream matching a measured trace's count profile")
    prof.add_argument("--row", choices=sorted(TRACE_PROFILES), required=True)
    prof.add_argument("--scale", type=float, default=1e-3)
    prof.add_argument("--seed", type=int, required=True)
    prof.add_argument("-o", "--out", required=True)

    sim = sub.add_parser("simulate", help="run an experiment config")
    sim.add_argument("config")
    sim.add_argument("--topology", action="append", help="single, line:K or ideal-coop:K (repeatable)")
    sim.add_argument("--jobs", type=_positive_int, default=_default_jobs(), help=f"worker processes (default ${JOBS_ENV} or 1)")
    sim.add_argument("-o", "--out", help="output directory (overrides the config)")

    ana = sub.add_parser("analyze", help="stream statistics and overhead model")
    asub = ana.add_subparsers(dest="what", required=True, parser_class=_Parser)
    rd = asub.add_parser("rd-cdf", help="reuse-distance CDF")
    rd.add_argument("trace")
    rd.add_argument("--mode", choices=["distinct", "raw"], default="distinct")
    rd.add_argument("-o", "--out")
    pop = asub.add_parser("popularity", help="rank-frequency table")
    pop.add_argument("trace")
    pop.add_argument("-o", "--out")
    bg = asub.add_parser("beta-gamma", help="per-window h1/h2/h3, beta and gamma")
    bg.add_argument("trace")
    bg.add_argument("--window", type=_positive_int, help="requests per window (default: whole trace)")
    bg.add_argument("-o", "--out")
    ov = asub.add_parser("overhead", help="control-memory bits and time classes")
    ov.add_argument("--policy")
    ov.add_argument("--entries", type=_positive_int, required=True)
    ov.add_argument("--pointer-bits", type=_positive_int)
    ov.add_argument("--counter-bits", type=_positive_int)
    ov.add_argument("--ghosts", type=int)
    ov.add_argument("-o", "--out")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"generate": cmd_generate, "simulate": cmd_simulate, "analyze": cmd_analyze}
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"icn-cache-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, TraceFormatError) as exc:
        print(f"icn-cache-lab: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        # spec validation failures from the library (bad alpha, counts, ...)
        print(f"icn-cache-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
