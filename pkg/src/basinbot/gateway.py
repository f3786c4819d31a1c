"""HTTP gateway: the chat backend plus operator endpoints.

Every non-2xx response carries a structured JSON body {code, message,
detail}. The evaluation endpoint can invoke paid providers, so it is gated
by a token env var and disabled when that var is unset.
"""

from __future__ import annotations

import os
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .agent import export_answer
from .config import Engine
from .errors import BasinbotError
from .evals import orchestrator_sut, run_evaluation

EVAL_TOKEN_ENV = "BASINBOT_EVAL_TOKEN"

STARTER_OPTIONS = [
    {
        "id": "limpopo_library",
        "label": "Limpopo Library",
        "seed_prompt": ("The user wants to explore the indexed document library "
                        "(reports, policies, assessments). Prefer the document "
                        "search tool and cite the documents used."),
    },
    {
        "id": "realtime_analysis",
        "label": "Limpopo Real-Time Analysis",
        "seed_prompt": ("The user wants real-time and historical hydrology: "
                        "rainfall, river flows, reservoir storage, environmental "
                        "flow alerts. Prefer the hydrology tools and cite the "
                        "datasets queried."),
    },
    {
        "id": "export_generate",
        "label": "Export/Generate Data",
        "seed_prompt": ("The user wants structured, exportable output. Prefer "
                        "tools that return tables, and keep answers concise so "
                        "they export cleanly."),
    },
    {
        "id": "new_conversation",
        "label": "New Conversation",
        "seed_prompt": "",
    },
]

_STATUS_BY_CODE = {
    "unknown_session": 404,
    "nothing_to_export": 409,
    "no_tabular_result": 409,
    "provider_failure": 502,
    "script_exhausted": 502,
}


class MessageIn(BaseModel):
    text: str
    option: str | None = None


class EvalIn(BaseModel):
    dataset_path: str
    through_agent: bool = False


def _error(status: int, code: str, message: str, detail: Any = None) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message, "detail": detail})


def create_app(engine: Engine, eval_token_env: str = EVAL_TOKEN_ENV) -> FastAPI:
    app = FastAPI(title="basinbot gateway", version=__version__)

    @app.exception_handler(BasinbotError)
    async def _basinbot_error(request: Request, exc: BasinbotError):
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return _error(status, exc.code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error(422, "validation_error", "request body failed validation",
                      exc.errors())

    @app.post("/sessions")
    def create_session() -> dict[str, str]:
        return {"session_id": engine.store.create()}

    @app.get("/options")
    def options() -> list[dict[str, str]]:
        return STARTER_OPTIONS

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageIn):
        if not body.text.strip():
            return _error(422, "empty_text", "message text must be non-empty")
        seed_prompt = None
        if body.option is not None:
            option = next((o for o in STARTER_OPTIONS if o["id"] == body.option), None)
            if option is None:
                return _error(422, "unknown_option",
                              f"unknown starter option {body.option!r}")
            seed_prompt = option["seed_prompt"] or None
        answer = engine.orchestrator.run_turn(session_id, body.text,
                                              seed_prompt=seed_prompt)
        return answer.to_json()

    @app.get("/sessions/{session_id}/transcript")
    def transcript(session_id: str):
        return engine.store.get(session_id).to_json()

    @app.get("/tools")
    def tools() -> list[dict[str, Any]]:
        return [d.to_schema() for d in engine.registry.descriptors()]

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, format: str = "markdown"):
        if format not in ("markdown", "csv", "json"):
            return _error(422, "bad_format",
                          "format must be markdown, csv or json")
        payload = export_answer(engine.store.get(session_id), format)
        media = {"markdown": "text/markdown", "csv": "text/csv",
                 "json": "application/json"}[format]
        return Response(content=payload, media_type=media)

    @app.post("/eval/run")
    def eval_run(body: EvalIn, request: Request):
        expected = os.environ.get(eval_token_env)
        if not expected:
            return _error(403, "eval_disabled",
                          f"set {eval_token_env} to enable the evaluation endpoint")
        token = request.headers.get("x-eval-token")
        if token != expected:
            return _error(401, "bad_eval_token", "missing or wrong evaluation token")
        sut = orchestrator_sut(engine.orchestrator, engine.store) \
            if body.through_agent else None
        report = run_evaluation(body.dataset_path, engine.judge, engine.embedder,
                                sut=sut)
        return report.to_json()

    @app.get("/healthz")
    def healthz() -> dict[str, Any]:
        return {
            "status": "ok",
            "version": __version__,
            "index": engine.index.stats(),
            "datasets": engine.data.counts(),
        }

    if engine.config.static_dir and engine.config.static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=str(engine.config.static_dir),
                                     html=True), name="ui")

    return app
