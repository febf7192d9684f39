"""Stateless HTTP service exposing game solving, policy evaluation, and advice.

Artifacts (models, tables) are loaded once at startup and never mutated; every
request is served from immutable shared state, so concurrent calls behave as
if serialized.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..core import DomainError
from ..features import FEATURE_NAMES, build_feature_matrix, vector_from_values
from ..gametheory import KEEPER_ACTIONS, KICKER_ACTIONS, PayoffMatrix, solve_minimax
from ..records_io import read_csv, read_jsonl
from ..simulator import advise, available_policies, evaluate_policy
from .common import Artifacts, params_from_dict, policy_from_dict, profile_from_dict

SCHEMA_VERSION = 1
STATIC_DIR_NAME = "ui"


class ProfileBody(BaseModel):
    early_range: float
    late_range: Optional[float] = None
    p_late_correct_independent: float = 0.5
    p_late_correct_dependent: float = 0.5
    p_early_correct_dependent: float = 0.05
    start_offset: float = 0.0


class ParamsBody(BaseModel):
    mu: float = 0.7
    rho: float = 0.7


class SolveGameBody(BaseModel):
    payoff: list[list[float]] = Field(description="4x3 scoring probabilities, kicker rows")


class PolicyBody(BaseModel):
    kind: str
    offset: Optional[float] = None
    early_direction_mix: Optional[list[float]] = None
    gt_mix: Optional[list[float]] = None


class EvaluateBody(BaseModel):
    records_path: str = Field(description="server-readable CSV or JSONL record file")
    policy: PolicyBody
    profile: ProfileBody
    params: Optional[ParamsBody] = None
    seed: Optional[int] = None
    include_kicks: bool = False


class AdviseBody(BaseModel):
    profile: ProfileBody
    context: dict = Field(default_factory=dict, description="feature name -> value")
    seed: int
    policies: Optional[list[str]] = None
    gt_mix: Optional[list[float]] = None
    p_dependent: Optional[float] = None
    offset: Optional[float] = None


def create_app(artifact_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="keepersim service")
    artifacts = Artifacts.from_dir(artifact_dir) if artifact_dir else Artifacts()
    app.state.artifacts = artifacts

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        details = [
            {"field": ".".join(str(p) for p in err["loc"] if p != "body"), "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"errors": details})

    @app.exception_handler(DomainError)
    async def domain_handler(request: Request, exc: DomainError):
        return JSONResponse(status_code=400, content={"errors": [{"message": str(exc)}]})

    def require_models() -> Artifacts:
        art: Artifacts = app.state.artifacts
        missing = [
            name
            for name, value in (
                ("direction model", art.direction),
                ("distance model", art.distance),
                ("tables", art.tables),
            )
            if value is None
        ]
        if missing:
            raise HTTPException(status_code=503, detail=f"artifacts not loaded: {', '.join(missing)}")
        return art

    @app.get("/health")
    def health():
        art: Artifacts = app.state.artifacts
        return {
            "status": "ok",
            "artifacts": {
                "direction_model": art.direction is not None,
                "distance_model": art.distance is not None,
                "tables": art.tables is not None,
            },
        }

    @app.get("/schema")
    def schema():
        return {
            "version": SCHEMA_VERSION,
            "feature_names": list(FEATURE_NAMES),
            "kicker_actions": list(KICKER_ACTIONS),
            "keeper_actions": list(KEEPER_ACTIONS),
            "bodies": {
                "solve-game": SolveGameBody.model_json_schema(),
                "evaluate": EvaluateBody.model_json_schema(),
                "advise": AdviseBody.model_json_schema(),
            },
        }

    @app.post("/solve-game")
    def solve_game(body: SolveGameBody):
        values = np.asarray(body.payoff, dtype=float)
        if values.shape != (4, 3):
            raise DomainError(f"payoff must be 4x3, got {values.shape}")
        matrix = PayoffMatrix(values=values, counts=np.ones((4, 3), dtype=int))
        kicker, keeper, value = solve_minimax(matrix)
        return {
            "kicker_mix": kicker.as_dict(),
            "keeper_mix": keeper.as_dict(),
            "value": value,
        }

    @app.post("/evaluate")
    def evaluate(body: EvaluateBody):
        art = require_models()
        path = Path(body.records_path)
        if not path.exists():
            raise HTTPException(status_code=400, detail=f"records file not found: {path}")
        records = read_jsonl(path) if path.suffix == ".jsonl" else read_csv(path)
        matrix, ordered = build_feature_matrix(records)
        rng = np.random.default_rng(body.seed) if body.seed is not None else None
        result = evaluate_policy(
            ordered,
            policy_from_dict(body.policy.model_dump()),
            profile_from_dict(body.profile.model_dump(exclude_none=True)),
            params_from_dict(body.params.model_dump() if body.params else None),
            art.tables,
            models=art.models,
            feature_matrix=matrix,
            rng=rng,
        )
        payload = {"expected_save_fraction": result.expected_save_fraction, "n_kicks": len(result.kicks)}
        if body.include_kicks:
            payload["kicks"] = [
                {
                    "kick_id": e.kick_id,
                    "dive_timing_used": e.dive_timing_used,
                    "p_correct": e.p_correct,
                    "p_save_given_correct": e.p_save_given_correct,
                    "p_save": e.p_save,
                }
                for e in result.kicks
            ]
        return payload

    @app.post("/advise")
    def advise_endpoint(body: AdviseBody):
        art = require_models()
        gk = profile_from_dict(body.profile.model_dump(exclude_none=True))
        fv = vector_from_values(body.context)
        advice = advise(
            fv,
            gk,
            params_from_dict(None),
            art.tables,
            art.models,
            body.seed,
            policies=body.policies,
            gt_mix=tuple(body.gt_mix) if body.gt_mix else None,
            p_dependent=body.p_dependent,
            offset=body.offset,
        )
        return {
            "p_save": advice.p_save,
            "recommendation": advice.recommendation,
            "instruction": advice.instruction,
            "seed": advice.seed,
        }

    @app.get("/policies")
    def policies(
        early_range: float,
        late_range: Optional[float] = None,
        with_game_theoretic: bool = False,
    ):
        art: Artifacts = app.state.artifacts
        gk = profile_from_dict(
            {"early_range": early_range, **({"late_range": late_range} if late_range else {})}
        )
        kinds = available_policies(
            gk,
            art.direction is not None,
            art.distance is not None,
            gt_mix=(0.069, 0.871, 0.060) if with_game_theoretic else None,
        )
        return {"policies": kinds}

    static_dir = (artifact_dir / STATIC_DIR_NAME) if artifact_dir else None
    if static_dir and static_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
