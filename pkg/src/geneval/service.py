"""HTTP service running the dialogue loop.

Serves comparisons one at a time, records graded preferences in an
append-only log, runs learning jobs off the request path, and reports
compatibility diagnostics. State is file-backed (comparison-set JSON,
preference JSONL, learn-result JSON) so a restart against the same data
directory reconstructs every session exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .compat import CompatibilityThresholds, diagnose
from .evalfunc import ConstraintSet, EvaluationFunction
from .learn import (
    LearnResult,
    ParameterGrid,
    TabuConfig,
    snap_to_grid,
    tabu_search,
)
from .preferences import (
    ComparisonSet,
    PreferenceRecord,
    append_preference,
    latest_by_comparison,
    load_comparison_set,
    mirror,
    next_unanswered,
    now_iso,
    parse_label,
)


def default_init_function(constraints: ConstraintSet) -> EvaluationFunction:
    """Equal-weight starting function over the learnable constraints.

    Orientation is left out of the learned function space by default; it is
    still evaluated and stored, which is what makes missing-constraint
    diagnostics possible.
    """
    learnable = [c for c in constraints if c != "orientation"]
    if not learnable:
        learnable = list(constraints)
    return EvaluationFunction(ConstraintSet(learnable), [0.5] * len(learnable), 1)


@dataclass
class ServiceConfig:
    port: int = 8000
    data_dir: str = "geneval-data"
    thresholds: CompatibilityThresholds = field(default_factory=CompatibilityThresholds)
    grid: ParameterGrid = field(default_factory=ParameterGrid)
    ui_dir: str | None = None
    init_function: EvaluationFunction | None = None

    @classmethod
    def load(cls, path: str | Path | None = None) -> "ServiceConfig":
        """Config file plus environment overrides (GENEVAL_PORT, GENEVAL_DATA_DIR)."""
        obj = {}
        if path is not None:
            obj = json.loads(Path(path).read_text())
        cfg = cls(
            port=obj.get("port", 8000),
            data_dir=obj.get("data_dir", "geneval-data"),
            thresholds=CompatibilityThresholds.from_json_obj(obj["thresholds"])
            if "thresholds" in obj else CompatibilityThresholds(),
            grid=ParameterGrid.from_json_obj(obj["grid"]) if "grid" in obj else ParameterGrid(),
            ui_dir=obj.get("ui_dir"),
            init_function=EvaluationFunction.from_json_obj(obj["init_function"])
            if "init_function" in obj else None,
        )
        if "GENEVAL_PORT" in os.environ:
            cfg.port = int(os.environ["GENEVAL_PORT"])
        if "GENEVAL_DATA_DIR" in os.environ:
            cfg.data_dir = os.environ["GENEVAL_DATA_DIR"]
        return cfg


def presentation_flip(session_id: str, comparison_id: str) -> bool:
    """Deterministic A/B side flip per (session, comparison).

    Suppresses position bias without any per-request state: repeated GETs
    return the same presentation, and the flip can be recomputed when the
    preference comes back in.
    """
    digest = hashlib.sha256(f"{session_id}:{comparison_id}".encode()).digest()
    return bool(digest[0] & 1)


class Session:
    def __init__(self, session_id: str, comparison_set_path: str,
                 comparison_set: ComparisonSet, init_function: EvaluationFunction,
                 created_at: str, directory: Path):
        self.session_id = session_id
        self.comparison_set_path = comparison_set_path
        self.comparison_set = comparison_set
        self.init_function = init_function
        self.created_at = created_at
        self.directory = directory
        self.lock = threading.Lock()
        self.answered: set[str] = set()
        self.preferences: list[PreferenceRecord] = []
        self.learnt: LearnResult | None = None
        self.running_job: str | None = None

    @property
    def prefs_path(self) -> Path:
        return self.directory / "preferences.jsonl"

    @property
    def learnt_path(self) -> Path:
        return self.directory / "learnt.json"

    def progress(self) -> dict:
        return {"answered": len(self.answered), "total": len(self.comparison_set)}


@dataclass
class LearnJob:
    job_id: str
    session_id: str
    status: str = "queued"  # queued | running | done | failed
    result: LearnResult | None = None
    error_message: str | None = None

    def to_json_obj(self) -> dict:
        obj = {"job_id": self.job_id, "session_id": self.session_id, "status": self.status}
        if self.status == "done":
            obj["result"] = self.result.to_json_obj()
        if self.status == "failed":
            obj["error_message"] = self.error_message
        return obj


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _load_preferences_tolerant(path: Path) -> list[PreferenceRecord]:
    """Replay the log, tolerating a torn final line from a crashed writer."""
    records: list[PreferenceRecord] = []
    if not path.exists():
        return records
    lines = path.read_text(encoding="utf-8").splitlines()
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(PreferenceRecord.from_json_obj(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError):
            if i == len(lines) - 1:
                break  # torn tail write; everything before it is intact
            raise
    return records


class ServiceState:
    """All sessions and jobs, reconstructed from the data directory."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        self.sessions: dict[str, Session] = {}
        self.jobs: dict[str, LearnJob] = {}
        self.lock = threading.Lock()
        (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
        self._restore()

    def _restore(self) -> None:
        for meta_path in sorted(self.data_dir.glob("sessions/*/session.json")):
            meta = json.loads(meta_path.read_text())
            session = Session(
                session_id=meta["session_id"],
                comparison_set_path=meta["comparison_set_path"],
                comparison_set=load_comparison_set(meta["comparison_set_path"]),
                init_function=EvaluationFunction.from_json_obj(meta["init_function"]),
                created_at=meta["created_at"],
                directory=meta_path.parent,
            )
            session.preferences = _load_preferences_tolerant(session.prefs_path)
            session.answered = set(latest_by_comparison(session.preferences))
            if session.learnt_path.exists():
                session.learnt = LearnResult.from_json_obj(
                    json.loads(session.learnt_path.read_text()))
            self.sessions[session.session_id] = session

    def create_session(self, comparison_set_path: str,
                       init_function: EvaluationFunction | None = None) -> Session:
        comparison_set = load_comparison_set(comparison_set_path)
        init = init_function or self.config.init_function or \
            default_init_function(comparison_set.scenario.constraint_set)
        session_id = "s-" + uuid.uuid4().hex[:10]
        directory = self.data_dir / "sessions" / session_id
        directory.mkdir(parents=True)
        session = Session(session_id, str(comparison_set_path), comparison_set,
                          init, now_iso(), directory)
        _atomic_write(directory / "session.json", json.dumps({
            "session_id": session_id,
            "comparison_set_path": str(comparison_set_path),
            "init_function": init.to_json_obj(),
            "created_at": session.created_at,
        }, indent=2))
        with self.lock:
            self.sessions[session_id] = session
        return session

    def find_session_for_path(self, comparison_set_path: str) -> Session | None:
        resolved = str(Path(comparison_set_path).resolve())
        for session in self.sessions.values():
            if str(Path(session.comparison_set_path).resolve()) == resolved:
                return session
        return None

    def get_session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def get_job(self, job_id: str) -> LearnJob:
        job = self.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return job


def _comparison_payload(session: Session, comparison) -> dict:
    flipped = presentation_flip(session.session_id, comparison.comparison_id)
    first, second = (comparison.b, comparison.a) if flipped else (comparison.a, comparison.b)
    return {
        "id": comparison.comparison_id,
        "object_id": comparison.object_id,
        "initial_geometry": comparison.initial.to_json_obj(),
        "a": {"id": first.candidate_id, "geometry": first.geometry.to_json_obj()},
        "b": {"id": second.candidate_id, "geometry": second.geometry.to_json_obj()},
    }


def _run_learn_job(state: ServiceState, session: Session, job: LearnJob,
                   init: EvaluationFunction, thresholds: CompatibilityThresholds,
                   grid: ParameterGrid, tabu_cfg: TabuConfig,
                   prefs: list[PreferenceRecord]) -> None:
    with state.lock:
        job.status = "running"
    try:
        result = tabu_search(session.comparison_set, prefs,
                             snap_to_grid(init, grid), thresholds, grid, tabu_cfg)
        _atomic_write(session.learnt_path,
                      json.dumps(result.to_json_obj(), indent=2))
        with state.lock:
            session.learnt = result
            job.result = result
            job.status = "done"
    except Exception as exc:  # report the failure through the job status
        with state.lock:
            job.error_message = str(exc)
            job.status = "failed"
    finally:
        with session.lock:
            session.running_job = None


def create_app(config: ServiceConfig) -> FastAPI:
    state = ServiceState(config)
    app = FastAPI(title="geneval", version="0.1.0")
    app.state.service = state
    # the bundled UI is same-origin; permissive CORS keeps separately served
    # dev bundles (and scripted browser tests) working too
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/api/sessions")
    async def create_session(request: Request):
        body = await request.json()
        path = body.get("comparison_set_path")
        if not path or not Path(path).exists():
            raise HTTPException(status_code=400,
                                detail=f"comparison_set_path missing or not found: {path!r}")
        init = EvaluationFunction.from_json_obj(body["init_function"]) \
            if "init_function" in body else None
        session = state.create_session(path, init)
        return {"session_id": session.session_id, **session.progress()}

    @app.get("/api/sessions")
    async def list_sessions():
        return {"sessions": [
            {"session_id": s.session_id,
             "comparison_set_path": s.comparison_set_path,
             "created_at": s.created_at,
             **s.progress()}
            for s in state.sessions.values()
        ]}

    @app.get("/api/sessions/{session_id}/next")
    async def get_next(session_id: str):
        session = state.get_session(session_id)
        with session.lock:
            comparison = next_unanswered(session.comparison_set, session.answered)
            if comparison is None:
                return {"status": "complete", "progress": session.progress()}
            return {
                "status": "comparison",
                "comparison": _comparison_payload(session, comparison),
                "progress": session.progress(),
            }

    @app.get("/api/sessions/{session_id}/comparisons/{comparison_id}")
    async def get_comparison(session_id: str, comparison_id: str):
        """One comparison in presentation orientation, with the recorded label
        (also presentation-oriented) if it has been answered; supports
        re-displaying incompatible comparisons from the results view."""
        session = state.get_session(session_id)
        try:
            comparison = session.comparison_set.by_id(comparison_id)
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"unknown comparison {comparison_id!r}") from None
        with session.lock:
            latest = latest_by_comparison(session.preferences)
        record = latest.get(comparison_id)
        label = None
        if record is not None:
            label = record.label
            if presentation_flip(session_id, comparison_id):
                label = mirror(label)
        return {
            "comparison": _comparison_payload(session, comparison),
            "label": label.value if label else None,
        }

    @app.post("/api/sessions/{session_id}/preferences")
    async def post_preference(session_id: str, request: Request):
        session = state.get_session(session_id)
        body = await request.json()
        comparison_id = body.get("comparison_id")
        label = parse_label(body.get("label", ""))
        if comparison_id not in session.comparison_set.ids():
            raise HTTPException(status_code=404,
                                detail=f"unknown comparison {comparison_id!r}")
        if presentation_flip(session_id, comparison_id):
            label = mirror(label)
        record = PreferenceRecord(
            comparison_id=comparison_id,
            label=label,
            source="human",
            elapsed_ms=body.get("elapsed_ms"),
            created_at=now_iso(),
        )
        with session.lock:
            append_preference(session.prefs_path, record)
            session.preferences.append(record)
            session.answered.add(comparison_id)
            return session.progress()

    @app.post("/api/sessions/{session_id}/learn")
    async def post_learn(session_id: str, request: Request):
        session = state.get_session(session_id)
        body = await request.json() if await request.body() else {}
        thresholds = CompatibilityThresholds.from_json_obj(body["thresholds"]) \
            if "thresholds" in body else config.thresholds
        grid = ParameterGrid.from_json_obj(body["grid"]) if "grid" in body else config.grid
        tabu_cfg = TabuConfig.from_json_obj(body["tabu"]) if "tabu" in body else TabuConfig()
        init = EvaluationFunction.from_json_obj(body["init_function"]) \
            if "init_function" in body else session.init_function
        with session.lock:
            if not session.answered:
                raise HTTPException(status_code=409,
                                    detail="no preferences recorded for this session")
            if session.running_job is not None:
                raise HTTPException(status_code=409,
                                    detail=f"learning job {session.running_job} already running")
            prefs = list(session.preferences)
            job = LearnJob(job_id="j-" + uuid.uuid4().hex[:10], session_id=session_id)
            session.running_job = job.job_id
        with state.lock:
            state.jobs[job.job_id] = job
        thread = threading.Thread(
            target=_run_learn_job,
            args=(state, session, job, init, thresholds, grid, tabu_cfg, prefs),
            daemon=True,
        )
        thread.start()
        return JSONResponse(status_code=202, content={"job_id": job.job_id})

    @app.get("/api/learn/{job_id}")
    async def get_learn(job_id: str):
        with state.lock:
            return state.get_job(job_id).to_json_obj()

    @app.get("/api/sessions/{session_id}/report")
    async def get_report(session_id: str, function: str = "initial"):
        session = state.get_session(session_id)
        if function not in ("initial", "learnt"):
            raise HTTPException(status_code=400,
                                detail="function must be 'initial' or 'learnt'")
        if function == "learnt":
            if session.learnt is None:
                raise HTTPException(status_code=409,
                                    detail="no completed learning job for this session")
            f = session.learnt.best.function
        else:
            f = session.init_function
        with session.lock:
            prefs = list(session.preferences)
        if not prefs:
            raise HTTPException(status_code=409, detail="no preferences recorded yet")
        return diagnose(session.comparison_set, prefs, f, config.thresholds).to_json_obj()

    @app.get("/api/sessions/{session_id}/function")
    async def get_function(session_id: str):
        session = state.get_session(session_id)
        return {
            "initial": session.init_function.to_json_obj(),
            "learnt": session.learnt.best.function.to_json_obj() if session.learnt else None,
        }

    if config.ui_dir and Path(config.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
