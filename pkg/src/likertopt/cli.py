"""Command-line interface: benchmark runs, CSV summaries, and the
interactive session service."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import BenchSettings, run_benchmark, summarize_csv
from .benchmarks import BENCHMARKS


def _add_bench_parser(subparsers) -> None:
    p = subparsers.add_parser("bench", help="run a benchmark reproduction")
    p.add_argument("--function", required=True, choices=sorted(BENCHMARKS))
    p.add_argument("--algo", default="ampl", choices=["ampl", "apl-rbf", "both"])
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--n-init", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--alpha-bar", type=float, default=0.1)
    p.add_argument("--sigma1", type=float, required=True)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("bench-out"))
    p.add_argument("--multi-prob", type=float, default=0.5)
    p.add_argument("--oracle-sigma", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--scan-points", type=int, default=None)
    p.add_argument("--refine-iters", type=int, default=200)


def _add_summarize_parser(subparsers) -> None:
    p = subparsers.add_parser("summarize", help="summarize per-trial CSV files")
    p.add_argument("csv", nargs="+", type=Path)
    p.add_argument("--function", default="unknown")
    p.add_argument("--algo", default="unknown")
    p.add_argument("--out", type=Path, default=None)


def _add_serve_parser(subparsers) -> None:
    p = subparsers.add_parser("serve", help="start the interactive session service")
    p.add_argument(
        "--bind", default=os.environ.get("LIKERTOPT_BIND", "127.0.0.1:8642")
    )
    p.add_argument("--data-dir", type=Path, default=None)
    p.add_argument("--propose-timeout", type=float, default=10.0)


def _run_bench(args) -> int:
    if args.runs < 1:
        print("error: --runs must be positive", file=sys.stderr)
        return 2
    settings = BenchSettings(
        function=args.function,
        algo=args.algo,
        runs=args.runs,
        n_init=args.n_init,
        n_max=args.n_max,
        alpha_bar=args.alpha_bar,
        sigma1=args.sigma1,
        sigma2=args.sigma2,
        lam=args.lam,
        seed=args.seed,
        multi_prob=args.multi_prob,
        oracle_sigma=args.oracle_sigma,
        jobs=max(1, args.jobs),
        scan_points=args.scan_points,
        refine_iters=args.refine_iters,
    )
    summaries = run_benchmark(settings, args.out)
    print(f"{'function':<12} {'algo':<8} {'runs':>4} {'d_b':>10} {'d_w':>10}")
    for algo, summary in summaries.items():
        print(
            f"{summary.function:<12} {algo:<8} {summary.runs:>4}"
            f" {summary.d_b:>10.4f} {summary.d_w:>10.4f}"
        )
    print(f"artifacts written to {args.out}")
    return 0


def _run_summarize(args) -> int:
    summary = summarize_csv(args.csv, function=args.function, algo=args.algo)
    text = json.dumps(summary.to_dict(), indent=2)
    if args.out is not None:
        args.out.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def _run_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.bind.rpartition(":")
    app = create_app(data_dir=args.data_dir, propose_timeout=args.propose_timeout)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="likertopt",
        description="Preference-based black-box optimization tools",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_bench_parser(subparsers)
    _add_summarize_parser(subparsers)
    _add_serve_parser(subparsers)
    args = parser.parse_args(argv)
    if args.command == "bench":
        return _run_bench(args)
    if args.command == "summarize":
        return _run_summarize(args)
    return _run_serve(args)


if __name__ == "__main__":
    sys.exit(main())
