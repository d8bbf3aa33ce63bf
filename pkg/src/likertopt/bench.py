"""Multi-run benchmark harness: seeded engine runs against the synthetic
decision maker, per-trial CSV output, and gap summaries.

Per-run seeds are ``base_seed + run_index``, so the two algorithm modes
share identical initial sample sets run by run.  CSV columns:
``run_id,seed,iteration,is_init,alpha,x,true_f,gap,is_new_best`` with
floats printed to 17 significant digits and ``x`` semicolon-joined.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .benchmarks import BenchmarkFunction, get_benchmark
from .engine import MODE_AMPL, MODE_APL_RBF, EngineConfig, TrialLog, run_loop
from .errors import SchemaError
from .oracle import OracleConfig, SyntheticDecisionMaker, default_oracle_sigma

CSV_HEADER = [
    "run_id",
    "seed",
    "iteration",
    "is_init",
    "alpha",
    "x",
    "true_f",
    "gap",
    "is_new_best",
]

_ORACLE_STREAM = 3


@dataclass(frozen=True)
class BenchSettings:
    function: str
    algo: str
    runs: int
    n_init: int
    n_max: int
    alpha_bar: float
    sigma1: float
    sigma2: float
    lam: float = 1.0
    seed: int = 0
    multi_prob: float = 0.5
    oracle_sigma: float | None = None
    jobs: int = 1
    scan_points: int | None = None
    refine_iters: int = 200


@dataclass(frozen=True)
class RunSummary:
    function: str
    algo: str
    runs: int
    d_b: float  # mean final best gap across runs
    d_w: float  # worst final best gap across runs
    series_iter: tuple[int, ...]
    series_min: tuple[float, ...]
    series_mean: tuple[float, ...]
    series_max: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "algo": self.algo,
            "runs": self.runs,
            "d_b": self.d_b,
            "d_w": self.d_w,
            "series": {
                "iter": list(self.series_iter),
                "min": list(self.series_min),
                "mean": list(self.series_mean),
                "max": list(self.series_max),
            },
        }


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _oracle_for(fn: BenchmarkFunction, settings: BenchSettings, run_seed: int, algo: str):
    sigma = settings.oracle_sigma
    if sigma is None:
        sigma = default_oracle_sigma(fn)
    # the baseline answers with a single outcome per query
    multi = settings.multi_prob if algo == MODE_AMPL else 0.0
    oracle_seed = int(
        np.random.SeedSequence(run_seed, spawn_key=(_ORACLE_STREAM,)).generate_state(1)[0]
    )
    return SyntheticDecisionMaker(
        fn, OracleConfig(sigma=sigma, multi_prob=multi, seed=oracle_seed)
    )


def single_run(settings: BenchSettings, algo: str, run_index: int) -> TrialLog:
    fn = get_benchmark(settings.function)
    run_seed = settings.seed + run_index
    config = EngineConfig(
        mode=algo,
        n_init=settings.n_init,
        n_max=settings.n_max,
        alpha_bar=settings.alpha_bar,
        sigma1=settings.sigma1,
        sigma2=settings.sigma2,
        lam=settings.lam,
        scan_points=settings.scan_points,
        refine_iters=settings.refine_iters,
        seed=run_seed,
    )
    oracle = _oracle_for(fn, settings, run_seed, algo)
    return run_loop(config, fn.problem(), oracle)


def trial_rows(log: TrialLog, run_id: int, seed: int) -> list[list[str]]:
    rows = []
    for row in log.rows:
        rows.append(
            [
                str(run_id),
                str(seed),
                str(row.iteration),
                "true" if row.is_init else "false",
                _fmt(row.alpha),
                ";".join(_fmt(v) for v in row.point),
                _fmt(row.true_f) if row.true_f is not None else "",
                _fmt(row.gap) if row.gap is not None else "",
                "true" if row.is_new_best else "false",
            ]
        )
    return rows


def write_trials_csv(path: Path, all_rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(all_rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def run_benchmark_algo(settings: BenchSettings, algo: str) -> tuple[list[TrialLog], RunSummary]:
    """Execute all runs of one algorithm, in run-parallel worker threads."""
    logs: list[TrialLog | None] = [None] * settings.runs
    if settings.jobs > 1:
        with ThreadPoolExecutor(max_workers=settings.jobs) as pool:
            futures = {
                pool.submit(single_run, settings, algo, k): k
                for k in range(settings.runs)
            }
            for future, k in futures.items():
                logs[k] = future.result()
    else:
        for k in range(settings.runs):
            logs[k] = single_run(settings, algo, k)
    summary = summarize_logs(logs, settings.function, algo)
    return logs, summary


def summarize_logs(logs: list[TrialLog], function: str, algo: str) -> RunSummary:
    gap_series = []
    for log in logs:
        gaps = [row.gap for row in log.rows]
        if any(g is None for g in gaps):
            raise SchemaError("runs without ground-truth gaps cannot be summarized")
        gap_series.append(np.array(gaps, dtype=float))
    lengths = {len(g) for g in gap_series}
    if len(lengths) != 1:
        raise SchemaError(f"runs have inconsistent lengths: {sorted(lengths)}")
    stacked = np.vstack(gap_series)
    finals = stacked[:, -1]
    iters = tuple(range(1, stacked.shape[1] + 1))
    return RunSummary(
        function=function,
        algo=algo,
        runs=len(logs),
        d_b=float(finals.mean()),
        d_w=float(finals.max()),
        series_iter=iters,
        series_min=tuple(stacked.min(axis=0).tolist()),
        series_mean=tuple(stacked.mean(axis=0).tolist()),
        series_max=tuple(stacked.max(axis=0).tolist()),
    )


def run_benchmark(settings: BenchSettings, out_dir: Path) -> dict[str, RunSummary]:
    """Run the requested algorithm(s), write CSV + JSON artifacts, and
    return the summaries keyed by algorithm name."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    algos = [settings.algo] if settings.algo != "both" else [MODE_AMPL, MODE_APL_RBF]
    summaries: dict[str, RunSummary] = {}
    for algo in algos:
        logs, summary = run_benchmark_algo(settings, algo)
        rows: list[list[str]] = []
        for run_id, log in enumerate(logs):
            rows.extend(trial_rows(log, run_id, settings.seed + run_id))
        stem = f"{settings.function}_{algo}"
        write_trials_csv(out_dir / f"{stem}_trials.csv", rows)
        (out_dir / f"{stem}_summary.json").write_text(
            json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
        summaries[algo] = summary
    return summaries


def parse_trials_csv(path: Path) -> dict[int, list[dict]]:
    """Rows grouped by run_id, ordered by iteration."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise SchemaError(f"unexpected CSV header in {path}: {header}")
        runs: dict[int, list[dict]] = {}
        for raw in reader:
            if len(raw) != len(CSV_HEADER):
                raise SchemaError(f"malformed row in {path}: {raw}")
            row = {
                "run_id": int(raw[0]),
                "seed": int(raw[1]),
                "iteration": int(raw[2]),
                "is_init": raw[3] == "true",
                "alpha": float(raw[4]),
                "x": np.array([float(v) for v in raw[5].split(";")]),
                "true_f": float(raw[6]) if raw[6] else None,
                "gap": float(raw[7]) if raw[7] else None,
                "is_new_best": raw[8] == "true",
            }
            runs.setdefault(row["run_id"], []).append(row)
    for rows in runs.values():
        rows.sort(key=lambda r: r["iteration"])
    return runs


def summarize_csv(
    paths: list[Path], function: str = "unknown", algo: str = "unknown"
) -> RunSummary:
    per_run: dict[tuple[str, int], np.ndarray] = {}
    for path in paths:
        for run_id, rows in parse_trials_csv(Path(path)).items():
            gaps = [r["gap"] for r in rows]
            if any(g is None for g in gaps):
                raise SchemaError(f"run {run_id} in {path} lacks gap values")
            per_run[(str(path), run_id)] = np.array(gaps, dtype=float)
    if not per_run:
        raise SchemaError("no runs found")
    lengths = {len(g) for g in per_run.values()}
    if len(lengths) != 1:
        raise SchemaError(f"runs have inconsistent lengths: {sorted(lengths)}")
    stacked = np.vstack(list(per_run.values()))
    finals = stacked[:, -1]
    return RunSummary(
        function=function,
        algo=algo,
        runs=stacked.shape[0],
        d_b=float(finals.mean()),
        d_w=float(finals.max()),
        series_iter=tuple(range(1, stacked.shape[1] + 1)),
        series_min=tuple(stacked.min(axis=0).tolist()),
        series_mean=tuple(stacked.mean(axis=0).tolist()),
        series_max=tuple(stacked.max(axis=0).tolist()),
    )
