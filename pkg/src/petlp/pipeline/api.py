"""JSON-over-HTTP service for the interactive wizard.

The service is a thin session layer over the library: trees come from the
questionnaire definitions, verdicts from the engine, ledger views from the
document store. No rule logic lives here, so a wizard session and a direct
library call with the same inputs cannot disagree.

What-if evaluation is stateless by contract: it answers "what would the
endpoint be" without touching the recorded case.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Optional

import uvicorn
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from ..dpia.ledger import STAGE_ORDER, init_dpia
from ..errors import PetlpError
from ..policy import trees as treemod
from .case import PipelineCase


class CreateCaseBody(BaseModel):
    case_id: str = Field(min_length=1, max_length=120)
    title: str = ""
    author: str = ""
    pre_registration: Optional[dict[str, Any]] = None


class AnswerBody(BaseModel):
    node_id: str = Field(min_length=1)
    choice: str = Field(min_length=1)


class WhatifBody(BaseModel):
    node_id: str = Field(min_length=1)
    alternative: str = Field(min_length=1)


@dataclass
class ApiState:
    cases: dict[str, PipelineCase] = field(default_factory=dict)

    def get_case(self, case_id: str) -> PipelineCase:
        case = self.cases.get(case_id)
        if case is None:
            raise HTTPException(status_code=404, detail={"code": "unknown_case", "message": f"no case {case_id!r}"})
        return case


def _domain_error(exc: PetlpError) -> HTTPException:
    return HTTPException(status_code=400, detail={"code": exc.code, "message": str(exc)})


def create_app(state: Optional[ApiState] = None) -> FastAPI:
    app = FastAPI(title="petlp", version="0.1.0")
    # The wizard may be served from a static host separate from this API;
    # no credentials are involved, so a permissive policy is fine.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.petlp = state or ApiState()

    def _state() -> ApiState:
        return app.state.petlp

    @app.get("/trees")
    def get_trees() -> dict[str, Any]:
        return {"trees": [tree.to_dict() for tree in treemod.ALL_TREES.values()]}

    @app.post("/cases", status_code=201)
    def create_case(body: CreateCaseBody) -> dict[str, Any]:
        state = _state()
        if body.case_id in state.cases:
            raise HTTPException(
                status_code=409,
                detail={"code": "already_exists", "message": f"case {body.case_id!r} already exists"},
            )
        case = PipelineCase(case_id=body.case_id)
        if body.pre_registration is not None:
            try:
                case.dpia = init_dpia(body.case_id, body.pre_registration, author=body.author)
            except PetlpError as exc:
                raise _domain_error(exc)
        state.cases[body.case_id] = case
        return {"case_id": case.case_id}

    @app.get("/cases/{case_id}")
    def get_case(case_id: str) -> dict[str, Any]:
        return _state().get_case(case_id).to_dict()

    @app.post("/cases/{case_id}/answer")
    def answer_node(case_id: str, body: AnswerBody) -> dict[str, Any]:
        case = _state().get_case(case_id)
        try:
            tree = treemod.tree_for_node(body.node_id)
            answers = case.answers.setdefault(tree.id, {})
            step = treemod.answer(tree, answers, body.node_id, body.choice)
        except PetlpError as exc:
            raise _domain_error(exc)
        if step.kind == "verdict" and step.verdict is not None:
            case.verdicts[tree.id] = step.verdict.to_dict()
        return {"tree_id": tree.id, **step.to_dict()}

    @app.post("/cases/{case_id}/whatif")
    def whatif_node(case_id: str, body: WhatifBody) -> dict[str, Any]:
        case = _state().get_case(case_id)
        try:
            tree = treemod.tree_for_node(body.node_id)
            recorded = dict(case.answers.get(tree.id, {}))
            hypothetical = treemod.whatif(tree, recorded, body.node_id, body.alternative)
        except PetlpError as exc:
            raise _domain_error(exc)
        actual = case.verdicts.get(tree.id)
        hypo_dict = hypothetical.to_dict()
        changed = bool(
            actual
            and hypo_dict["kind"] == "verdict"
            and hypo_dict["verdict"]["verdict"] != actual["verdict"]
        )
        return {
            "tree_id": tree.id,
            "actual": actual,
            "hypothetical": hypo_dict,
            "changed": changed,
        }

    @app.get("/cases/{case_id}/dpia")
    def get_dpia(case_id: str) -> dict[str, Any]:
        case = _state().get_case(case_id)
        if case.dpia is None:
            return {
                "exists": False,
                "case_id": case_id,
                "stage_status": {stage.value: "missing" for stage in STAGE_ORDER},
                "versions": [],
            }
        return {"exists": True, **case.dpia.to_dict()}

    return app


@dataclass(frozen=True)
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8008
    log_level: str = "warning"


def serve_api(config: ApiConfig, state: Optional[ApiState] = None) -> uvicorn.Server:
    """Build the server; ``.run()`` blocks until shutdown."""
    app = create_app(state)
    return uvicorn.Server(
        uvicorn.Config(app, host=config.host, port=config.port, log_level=config.log_level)
    )


def start_in_thread(config: ApiConfig, state: Optional[ApiState] = None) -> tuple[uvicorn.Server, threading.Thread]:
    """Run the service on a daemon thread; set ``server.should_exit`` to stop."""
    server = serve_api(config, state)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    return server, thread
