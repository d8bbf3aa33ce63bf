"""Optimization engine: initialization, query scheduling, feedback
ingestion, best tracking, exploration-weight updates, surrogate refits and
proposal of the next sample.

Two modes: the full multi-outcome algorithm compares each new sample
against both the previous sample and the incumbent best and adapts the
exploration weight; the baseline mode compares against the best only and
keeps the weight fixed.

All randomness derives from the config seed through named substreams, so a
(seed, config, feedback stream) triple reproduces the trajectory exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acquisition import (
    AcquisitionContext,
    acquisition_eval,
    acquisition_eval_many,
    surrogate_range,
    update_alpha,
)
from .errors import (
    BudgetExhaustedError,
    UnknownQueryError,
    WrongPhaseError,
)
from .globalmin import (
    SearchBudget,
    _project_segment,
    latin_hypercube,
    minimize_acquisition,
)
from .preferences import OutcomeSet, PreferenceRecord, validate_outcome_set
from .problem import ValidatedProblem, scale_point, scale_points, unscale_point
from .surrogate import (
    DEFAULT_GAMMA,
    DEFAULT_GAMMA_GRID,
    SurrogateModel,
    cross_validate_gamma,
    fit_surrogate,
)

MODE_AMPL = "ampl"
MODE_APL_RBF = "apl-rbf"

PHASE_INITIALIZING = "initializing"
PHASE_AWAITING_FEEDBACK = "awaiting_feedback"
PHASE_READY_TO_PROPOSE = "ready_to_propose"
PHASE_DONE = "done"

PURPOSE_VS_PREVIOUS = "vs_previous"
PURPOSE_VS_BEST = "vs_best"

# seed substream tags
_STREAM_LHS = 0
_STREAM_SEARCH = 1
_STREAM_PERTURB = 2
_STREAM_CV = 4

_DUPLICATE_TOL = 1e-9
_PERTURB_RADIUS = 1e-3


@dataclass(frozen=True)
class EngineConfig:
    mode: str
    n_init: int
    n_max: int
    alpha_bar: float
    sigma1: float
    sigma2: float
    lam: float = 1.0
    gamma_grid: tuple[float, ...] = DEFAULT_GAMMA_GRID
    cv_k: int = 5
    cv_period: int = 5
    scan_points: int | None = None
    refine_iters: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (MODE_AMPL, MODE_APL_RBF):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not (2 <= self.n_init < self.n_max):
            raise ValueError("need 2 <= n_init < n_max")
        if not (0 < self.sigma1 < self.sigma2):
            raise ValueError("need 0 < sigma1 < sigma2")
        if self.alpha_bar <= 0:
            raise ValueError("alpha_bar must be positive")
        if self.lam <= 0:
            raise ValueError("lam must be positive")


@dataclass(frozen=True)
class PreferenceQuery:
    query_id: str
    i: int  # newest sample (candidate A)
    j: int  # previous sample or incumbent best (candidate B)
    purpose: str


@dataclass
class EngineState:
    samples: list[np.ndarray] = field(default_factory=list)  # original units
    records: list[PreferenceRecord] = field(default_factory=list)
    best_index: int = 0
    alpha: float = 0.0
    iteration: int = 0
    pending: list[PreferenceQuery] = field(default_factory=list)
    phase: str = PHASE_INITIALIZING
    gamma: float = DEFAULT_GAMMA
    proposals_made: int = 0
    init_cursor: int = 1  # next init sample (0-based) awaiting comparisons
    query_counter: int = 0
    samples_resolved: int = 0
    # per resolved sample: promotion flag, post-update alpha, best index
    new_best_flags: list[bool] = field(default_factory=list)
    alpha_history: list[float] = field(default_factory=list)
    best_history: list[int] = field(default_factory=list)
    _pending_promotion: bool = False


class Engine:
    """Single-owner mutable wrapper around one optimization run."""

    def __init__(self, config: EngineConfig, problem: ValidatedProblem):
        self.config = config
        self.problem = problem
        self.state = EngineState()
        st = self.state
        st.alpha = config.alpha_bar
        points = latin_hypercube(
            problem.n,
            config.n_init,
            problem,
            np.random.SeedSequence(config.seed, spawn_key=(_STREAM_LHS,)),
        )
        st.samples = [points[k].copy() for k in range(config.n_init)]
        st.iteration = config.n_init
        self._scaled = scale_points(problem, points).copy()
        self._resolve_sample(0, promoted=True)
        self._schedule_queries(st.init_cursor)

    # -- scheduling ----------------------------------------------------

    def _new_query(self, i: int, j: int, purpose: str) -> PreferenceQuery:
        st = self.state
        st.query_counter += 1
        return PreferenceQuery(f"q{st.query_counter:04d}", i, j, purpose)

    def _schedule_queries(self, sample_idx: int) -> None:
        st = self.state
        prev = sample_idx - 1
        queries = []
        if self.config.mode == MODE_AMPL and prev != st.best_index:
            queries.append(self._new_query(sample_idx, prev, PURPOSE_VS_PREVIOUS))
        queries.append(self._new_query(sample_idx, st.best_index, PURPOSE_VS_BEST))
        st.pending = queries

    def _resolve_sample(self, sample_idx: int, promoted: bool) -> None:
        st = self.state
        st.samples_resolved = sample_idx + 1
        st.new_best_flags.append(promoted)
        st.alpha_history.append(st.alpha)
        st.best_history.append(st.best_index)

    # -- operations ----------------------------------------------------

    def pending_queries(self) -> list[PreferenceQuery]:
        return list(self.state.pending)

    def ingest_feedback(self, query_id: str, outcomes) -> None:
        st = self.state
        if st.phase not in (PHASE_INITIALIZING, PHASE_AWAITING_FEEDBACK):
            raise WrongPhaseError(f"no feedback expected in phase {st.phase!r}")
        match = [q for q in st.pending if q.query_id == query_id]
        if not match:
            raise UnknownQueryError(f"query {query_id!r} is not pending")
        query = match[0]
        os = outcomes if isinstance(outcomes, OutcomeSet) else validate_outcome_set(outcomes)
        st.records.append(
            PreferenceRecord(i=query.i, j=query.j, outcome_set=os, query_id=query_id)
        )
        st.pending = [q for q in st.pending if q.query_id != query_id]

        if query.purpose == PURPOSE_VS_BEST:
            ps = [o.p for o in os.outcomes]
            promoted = all(p <= 0 for p in ps) and any(p < 0 for p in ps)
            if promoted:
                st.best_index = query.i
            st._pending_promotion = promoted
            if st.phase == PHASE_AWAITING_FEEDBACK and self.config.mode == MODE_AMPL:
                st.alpha = update_alpha(st.alpha, self.config.alpha_bar, promoted)

        if st.pending:
            return
        self._resolve_sample(query.i, st._pending_promotion)
        st._pending_promotion = False
        if st.phase == PHASE_INITIALIZING:
            st.init_cursor += 1
            if st.init_cursor < self.config.n_init:
                self._schedule_queries(st.init_cursor)
            else:
                st.phase = PHASE_READY_TO_PROPOSE
        else:
            st.phase = (
                PHASE_DONE
                if len(st.samples) >= self.config.n_max
                else PHASE_READY_TO_PROPOSE
            )

    def current_best(self) -> tuple[int, np.ndarray]:
        return self.state.best_index, self.state.samples[self.state.best_index].copy()

    def _seed_for(self, stream: int, index: int) -> int:
        ss = np.random.SeedSequence(self.config.seed, spawn_key=(stream, index))
        return int(ss.generate_state(1)[0])

    def _refit(self) -> SurrogateModel:
        st, cfg = self.state, self.config
        if st.proposals_made % cfg.cv_period == 0:
            st.gamma = cross_validate_gamma(
                self._scaled,
                st.records,
                cfg.gamma_grid,
                cfg.cv_k,
                cfg.sigma1,
                cfg.sigma2,
                cfg.lam,
                seed=self._seed_for(_STREAM_CV, st.proposals_made),
                fallback_gamma=st.gamma,
            )
        model, _ = fit_surrogate(
            self._scaled, st.records, cfg.sigma1, cfg.sigma2, cfg.lam, st.gamma
        )
        return model

    def _dedup_proposal(self, point: np.ndarray) -> np.ndarray:
        """Nudge a proposal that exactly reproduces an existing sample."""
        scaled = scale_point(self.problem, point)
        gaps = np.max(np.abs(self._scaled - scaled), axis=1)
        if float(gaps.min()) >= _DUPLICATE_TOL:
            return point
        rng = np.random.default_rng(
            np.random.SeedSequence(
                self.config.seed, spawn_key=(_STREAM_PERTURB, len(self.state.samples))
            )
        )
        n = self.problem.n
        for _ in range(100):
            direction = rng.normal(size=n)
            norm = float(np.linalg.norm(direction))
            if norm == 0.0:
                continue
            radius = _PERTURB_RADIUS * float(rng.random()) ** (1.0 / n)
            candidate_scaled = scaled + direction / norm * radius
            candidate = _project_segment(
                self.problem, point, unscale_point(self.problem, candidate_scaled)
            )
            new_scaled = scale_point(self.problem, candidate)
            if float(np.max(np.abs(self._scaled - new_scaled), axis=1).min()) >= _DUPLICATE_TOL:
                return candidate
        return point

    def propose_next(self) -> np.ndarray:
        st, cfg = self.state, self.config
        if st.phase == PHASE_DONE or len(st.samples) >= cfg.n_max:
            raise BudgetExhaustedError(f"sample budget {cfg.n_max} exhausted")
        if st.phase != PHASE_READY_TO_PROPOSE:
            raise WrongPhaseError(f"cannot propose in phase {st.phase!r}")

        model = self._refit()
        delta_f = surrogate_range(model, self._scaled)
        ctx = AcquisitionContext(
            model=model,
            samples=self._scaled,
            delta_f=delta_f,
            alpha=st.alpha,
            alpha_bar=cfg.alpha_bar,
        )

        def objective(x):
            return acquisition_eval(ctx, scale_point(self.problem, x))

        def objective_batch(xs):
            return acquisition_eval_many(ctx, scale_points(self.problem, xs))

        budget = SearchBudget(
            scan_points=cfg.scan_points or 2000 * self.problem.n,
            refine_iters=cfg.refine_iters,
            seed=self._seed_for(_STREAM_SEARCH, len(st.samples)),
        )
        # the scan cloud alone can miss the incumbent's basin in high
        # dimension, so seed it with the best and newest samples
        anchors = np.array([st.samples[st.best_index], st.samples[-1]])
        point = minimize_acquisition(
            objective,
            self.problem,
            budget,
            objective_batch=objective_batch,
            extra_candidates=anchors,
        )
        point = self._dedup_proposal(point)

        new_idx = len(st.samples)
        st.samples.append(point.copy())
        self._scaled = np.vstack([self._scaled, scale_point(self.problem, point)])
        st.iteration = len(st.samples)
        st.proposals_made += 1
        self._schedule_queries(new_idx)
        st.phase = PHASE_AWAITING_FEEDBACK
        return point.copy()


def init_engine(config: EngineConfig, problem: ValidatedProblem) -> Engine:
    return Engine(config, problem)


@dataclass(frozen=True)
class TrialRow:
    iteration: int          # 1-based sample number
    point: np.ndarray       # original units
    is_init: bool
    alpha: float
    is_new_best: bool
    true_f: float | None
    gap: float | None       # best-so-far gap to the optimum, when known


@dataclass(frozen=True)
class TrialLog:
    rows: tuple[TrialRow, ...]

    def final_gap(self) -> float | None:
        return self.rows[-1].gap if self.rows else None


def run_loop(config: EngineConfig, problem: ValidatedProblem, oracle) -> TrialLog:
    """Drive a full run against an oracle callable ``(x_a, x_b) -> OutcomeSet``.

    When the oracle also exposes ``true_f`` and ``optimum_value``, rows carry
    the true objective of each sample and the best-so-far gap.
    """
    engine = init_engine(config, problem)
    true_f = getattr(oracle, "true_f", None)
    optimum = getattr(oracle, "optimum_value", None)

    rows: list[TrialRow] = []

    def emit_resolved():
        st = engine.state
        while len(rows) < st.samples_resolved:
            k = len(rows)
            point = st.samples[k]
            f_val = float(true_f(point)) if true_f is not None else None
            gap = None
            if true_f is not None and optimum is not None:
                gap = float(true_f(st.samples[st.best_history[k]])) - float(optimum)
            rows.append(
                TrialRow(
                    iteration=k + 1,
                    point=point.copy(),
                    is_init=k < config.n_init,
                    alpha=st.alpha_history[k],
                    is_new_best=st.new_best_flags[k],
                    true_f=f_val,
                    gap=gap,
                )
            )

    emit_resolved()
    while engine.state.phase != PHASE_DONE:
        while engine.state.pending:
            query = engine.state.pending[0]
            answer = oracle(
                engine.state.samples[query.i], engine.state.samples[query.j]
            )
            engine.ingest_feedback(query.query_id, answer)
        emit_resolved()
        if engine.state.phase == PHASE_READY_TO_PROPOSE:
            engine.propose_next()
    emit_resolved()
    return TrialLog(rows=tuple(rows))
