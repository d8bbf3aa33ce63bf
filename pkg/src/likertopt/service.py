"""HTTP service for interactive optimization sessions.

A human decision maker drives one engine per session by answering
preference queries.  Every session is persisted as an append-only JSONL
event log; replaying the log reconstructs the engine state exactly (the
engine is deterministic given config and feedback).  The API never exposes
surrogate values or any objective data, only candidate points.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from concurrent.futures import Future, ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeoutError
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .engine import (
    MODE_AMPL,
    MODE_APL_RBF,
    PHASE_DONE,
    PHASE_READY_TO_PROPOSE,
    Engine,
    EngineConfig,
)
from .errors import LikertOptError, OutcomeSetError
from .problem import ValidatedProblem, problem_from_dict, validate_problem, ProblemSpec
from .preferences import validate_outcome_set

DEFAULT_BIND = "127.0.0.1:8642"
DEFAULT_PROPOSE_TIMEOUT = 10.0


class ProblemBody(BaseModel):
    n: int
    lower: list[float]
    upper: list[float]
    linear: list[dict] = Field(default_factory=list)


class ConfigBody(BaseModel):
    mode: str = MODE_AMPL
    n_init: int = 6
    n_max: int = 20
    alpha_bar: float = 0.1
    sigma1: float = 0.033
    sigma2: float = 0.5
    lam: float = 1.0
    seed: int = 0
    scan_points: int | None = None
    refine_iters: int = 200
    cv_period: int = 5


class CreateSessionBody(BaseModel):
    problem: ProblemBody
    config: ConfigBody = Field(default_factory=ConfigBody)
    idempotency_key: str | None = None
    preview_url_template: str | None = None


class OutcomeBody(BaseModel):
    p: int
    c: int


class FeedbackBody(BaseModel):
    outcomes: list[OutcomeBody]


def _engine_config(body: ConfigBody) -> EngineConfig:
    if body.mode not in (MODE_AMPL, MODE_APL_RBF):
        raise ValueError(f"unknown mode {body.mode!r}")
    return EngineConfig(
        mode=body.mode,
        n_init=body.n_init,
        n_max=body.n_max,
        alpha_bar=body.alpha_bar,
        sigma1=body.sigma1,
        sigma2=body.sigma2,
        lam=body.lam,
        seed=body.seed,
        scan_points=body.scan_points,
        refine_iters=body.refine_iters,
        cv_period=body.cv_period,
    )


class SessionRuntime:
    """One live session: engine, its event log, and a serialization lock."""

    def __init__(
        self,
        session_id: str,
        problem: ValidatedProblem,
        config: EngineConfig,
        log_path: Path,
        preview_url_template: str | None = None,
        fresh: bool = True,
    ):
        self.session_id = session_id
        self.problem = problem
        self.config = config
        self.log_path = log_path
        self.preview_url_template = preview_url_template
        self.lock = threading.RLock()
        self.answered: dict[str, int] = {}  # query_id -> event seq
        self.events: list[dict] = []
        self.proposal_future: Future | None = None
        self.engine = Engine(config, problem)
        if fresh:
            self._append(
                "created",
                problem=_problem_dict(problem),
                config=_config_dict(config),
                preview_url_template=preview_url_template,
            )
            for idx, point in enumerate(self.engine.state.samples):
                self._append("sample_added", index=idx, x=list(map(float, point)))
            self._log_issued_queries()

    # -- event log ------------------------------------------------------

    def _append(self, event_type: str, **payload) -> None:
        event = {"seq": len(self.events), "type": event_type, **payload}
        self.events.append(event)
        with open(self.log_path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(event) + "\n")

    def _log_issued_queries(self) -> None:
        logged = {
            e["query_id"] for e in self.events if e["type"] == "query_issued"
        }
        for q in self.engine.state.pending:
            if q.query_id not in logged:
                self._append(
                    "query_issued",
                    query_id=q.query_id,
                    i=q.i,
                    j=q.j,
                    purpose=q.purpose,
                )

    # -- operations -----------------------------------------------------

    def submit_feedback(self, query_id: str, outcomes: list[tuple[int, int]]) -> dict:
        with self.lock:
            if query_id in self.answered:
                raise ResubmittedQuery(query_id)
            outcome_set = validate_outcome_set(outcomes)
            self.engine.ingest_feedback(query_id, outcome_set)
            self._append(
                "feedback",
                query_id=query_id,
                outcomes=[[o.p, o.c] for o in outcome_set.outcomes],
                best_index=self.engine.state.best_index,
            )
            self.answered[query_id] = len(self.events) - 1
            self._log_issued_queries()
            return {"accepted": True, "best_index": self.engine.state.best_index}

    def _run_proposal(self) -> None:
        point = self.engine.propose_next()
        self._append(
            "proposal",
            index=len(self.engine.state.samples) - 1,
            x=list(map(float, point)),
        )
        self._append(
            "sample_added",
            index=len(self.engine.state.samples) - 1,
            x=list(map(float, point)),
        )
        self._log_issued_queries()

    def next_query(self, executor: ThreadPoolExecutor, timeout: float) -> dict:
        with self.lock:
            state = self.engine.state
            if state.pending:
                return self._query_view(state.pending[0])
            if state.phase == PHASE_DONE:
                return {"done": True, "iteration": state.iteration, "n_max": self.config.n_max}
            if state.phase != PHASE_READY_TO_PROPOSE:
                return {"propose_pending": True}
            if self.proposal_future is None:
                self.proposal_future = executor.submit(self._locked_proposal)
            future = self.proposal_future
        try:
            future.result(timeout=timeout)
        except FutureTimeoutError:
            return {"propose_pending": True}
        except Exception:
            with self.lock:
                self.proposal_future = None
            raise
        with self.lock:
            self.proposal_future = None
            if self.engine.state.pending:
                return self._query_view(self.engine.state.pending[0])
            return {"propose_pending": True}

    def _locked_proposal(self) -> None:
        with self.lock:
            if self.engine.state.phase == PHASE_READY_TO_PROPOSE:
                self._run_proposal()

    def _query_view(self, query) -> dict:
        state = self.engine.state
        view = {
            "query_id": query.query_id,
            "a": list(map(float, state.samples[query.i])),
            "b": list(map(float, state.samples[query.j])),
            "purpose": query.purpose,
            "iteration": state.iteration,
            "n_max": self.config.n_max,
        }
        if self.preview_url_template:
            view["preview_a"] = _render_preview(self.preview_url_template, view["a"])
            view["preview_b"] = _render_preview(self.preview_url_template, view["b"])
        return view

    def best_view(self) -> dict:
        with self.lock:
            index, point = self.engine.current_best()
            return {
                "index": index,
                "x": list(map(float, point)),
                "iteration": self.engine.state.iteration,
                "n_max": self.config.n_max,
                "phase": self.engine.state.phase,
            }


class ResubmittedQuery(Exception):
    pass


def _render_preview(template: str, coords: list[float]) -> str:
    return template.replace("{x}", ",".join(f"{v:.12g}" for v in coords))


def _problem_dict(problem: ValidatedProblem) -> dict:
    return {
        "n": problem.n,
        "lower": problem.lower.tolist(),
        "upper": problem.upper.tolist(),
        "linear": [
            {"a": a.tolist(), "b": float(b)}
            for a, b in zip(problem.a_mat, problem.b_vec)
        ],
    }


def _config_dict(config: EngineConfig) -> dict:
    return {
        "mode": config.mode,
        "n_init": config.n_init,
        "n_max": config.n_max,
        "alpha_bar": config.alpha_bar,
        "sigma1": config.sigma1,
        "sigma2": config.sigma2,
        "lam": config.lam,
        "gamma_grid": list(config.gamma_grid),
        "cv_k": config.cv_k,
        "cv_period": config.cv_period,
        "scan_points": config.scan_points,
        "refine_iters": config.refine_iters,
        "seed": config.seed,
    }


def _config_from_dict(obj: dict) -> EngineConfig:
    return EngineConfig(
        mode=obj["mode"],
        n_init=obj["n_init"],
        n_max=obj["n_max"],
        alpha_bar=obj["alpha_bar"],
        sigma1=obj["sigma1"],
        sigma2=obj["sigma2"],
        lam=obj["lam"],
        gamma_grid=tuple(obj["gamma_grid"]),
        cv_k=obj["cv_k"],
        cv_period=obj["cv_period"],
        scan_points=obj["scan_points"],
        refine_iters=obj["refine_iters"],
        seed=obj["seed"],
    )


def replay_session(log_path: Path) -> SessionRuntime:
    """Rebuild a session from its event log.

    Only `created` and `feedback` events drive the engine; everything else
    is deterministic, and replayed proposals are checked against the log.
    """
    events = [json.loads(line) for line in log_path.read_text(encoding="utf-8").splitlines()]
    if not events or events[0]["type"] != "created":
        raise ValueError(f"corrupt session log {log_path}")
    created = events[0]
    problem = problem_from_dict(created["problem"])
    config = _config_from_dict(created["config"])
    runtime = SessionRuntime(
        session_id=log_path.stem,
        problem=problem,
        config=config,
        log_path=log_path,
        preview_url_template=created.get("preview_url_template"),
        fresh=False,
    )
    runtime.events = events
    engine = runtime.engine
    for event in events:
        if event["type"] == "feedback":
            while not any(
                q.query_id == event["query_id"] for q in engine.state.pending
            ):
                if engine.state.phase != PHASE_READY_TO_PROPOSE:
                    raise ValueError(
                        f"log expects query {event['query_id']} that never became pending"
                    )
                engine.propose_next()
            engine.ingest_feedback(
                event["query_id"],
                validate_outcome_set([tuple(o) for o in event["outcomes"]]),
            )
            runtime.answered[event["query_id"]] = event["seq"]
        elif event["type"] == "proposal":
            index = event["index"]
            if index >= len(engine.state.samples):
                if engine.state.phase != PHASE_READY_TO_PROPOSE:
                    raise ValueError("proposal event in a non-proposing phase")
                engine.propose_next()
            replayed = engine.state.samples[index]
            if any(abs(a - b) > 1e-9 for a, b in zip(replayed, event["x"])):
                raise ValueError(f"replayed proposal {index} diverged from the log")
    return runtime


def create_app(
    data_dir: Path | str | None = None,
    propose_timeout: float = DEFAULT_PROPOSE_TIMEOUT,
) -> FastAPI:
    data_dir = Path(
        data_dir
        or os.environ.get("LIKERTOPT_DATA_DIR")
        or Path.cwd() / "likertopt-data"
    )
    data_dir.mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="likertopt session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, SessionRuntime] = {}
    idempotency: dict[str, str] = {}
    registry_lock = threading.Lock()
    executor = ThreadPoolExecutor(max_workers=4)
    app.state.data_dir = data_dir

    def get_session(session_id: str) -> SessionRuntime:
        with registry_lock:
            runtime = sessions.get(session_id)
            if runtime is None:
                log_path = data_dir / f"{session_id}.jsonl"
                if not log_path.exists():
                    raise HTTPException(status_code=404, detail="unknown session")
                runtime = replay_session(log_path)
                sessions[session_id] = runtime
            return runtime

    @app.get("/")
    def root():
        return {"service": "likertopt", "sessions": len(sessions)}

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        with registry_lock:
            if body.idempotency_key and body.idempotency_key in idempotency:
                return {"session_id": idempotency[body.idempotency_key]}
        try:
            problem = validate_problem(
                ProblemSpec(
                    n=body.problem.n,
                    lower=body.problem.lower,
                    upper=body.problem.upper,
                    linear_constraints=[
                        (row["a"], row["b"]) for row in body.problem.linear
                    ],
                )
            )
            config = _engine_config(body.config)
        except (LikertOptError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        session_id = uuid.uuid4().hex
        runtime = SessionRuntime(
            session_id=session_id,
            problem=problem,
            config=config,
            log_path=data_dir / f"{session_id}.jsonl",
            preview_url_template=body.preview_url_template,
        )
        with registry_lock:
            sessions[session_id] = runtime
            if body.idempotency_key:
                idempotency[body.idempotency_key] = session_id
        return {"session_id": session_id}

    @app.get("/v1/sessions/{session_id}/queries/next")
    def next_query(session_id: str):
        runtime = get_session(session_id)
        return runtime.next_query(executor, propose_timeout)

    @app.post("/v1/sessions/{session_id}/queries/{query_id}/feedback")
    def submit_feedback(session_id: str, query_id: str, body: FeedbackBody):
        runtime = get_session(session_id)
        try:
            return runtime.submit_feedback(
                query_id, [(o.p, o.c) for o in body.outcomes]
            )
        except ResubmittedQuery:
            raise HTTPException(status_code=409, detail="query already answered")
        except OutcomeSetError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": exc.rule, "message": str(exc)},
            )
        except LikertOptError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/v1/sessions/{session_id}/best")
    def get_best(session_id: str):
        return get_session(session_id).best_view()

    @app.get("/v1/sessions/{session_id}/history")
    def get_history(session_id: str):
        runtime = get_session(session_id)
        with runtime.lock:
            return {"events": list(runtime.events)}

    return app
