"""HTTP JSON API over the annotation service.

Thin handlers: validation and state live in the service; every payload carries
a schema version field "v".
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles

from .service import SCHEMA_VERSION, AnnotationService


def create_app(service: AnnotationService, static_dir: Optional[str | Path] = None) -> FastAPI:
    app = FastAPI(title="annotation-service")

    def _require(payload: dict, *fields: str) -> None:
        missing = [f for f in fields if f not in payload]
        if missing:
            raise HTTPException(status_code=400, detail=f"missing fields: {missing}")

    @app.get("/survey/{survey_id}/next")
    def survey_next(survey_id: str, annotator: str = Query(...)):
        try:
            return service.next_assignment(survey_id, annotator)
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e))

    @app.post("/survey/{survey_id}/rating")
    def survey_rating(survey_id: str, payload: dict = Body(...)):
        _require(payload, "annotator", "question_id", "helpfulness", "naturalness")
        try:
            return service.submit_rating(
                survey_id,
                payload["annotator"],
                payload["question_id"],
                payload["helpfulness"],
                payload["naturalness"],
                category=payload.get("category"),
            )
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e))
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))

    @app.get("/pairwise/{task_id}/next")
    def pairwise_next(task_id: str, annotator: str = Query(...)):
        try:
            return service.next_pairwise(task_id, annotator)
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e))

    @app.post("/pairwise/{task_id}/vote")
    def pairwise_vote(task_id: str, payload: dict = Body(...)):
        _require(payload, "annotator", "item_id", "choice")
        try:
            return service.submit_vote(
                task_id, payload["annotator"], payload["item_id"], payload["choice"]
            )
        except KeyError as e:
            raise HTTPException(status_code=404, detail=str(e))
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))

    @app.get("/reports/ratings")
    def report_ratings(group_by: str = Query("lang,model")):
        fields = tuple(f for f in group_by.split(",") if f)
        try:
            rows = service.aggregate_ratings(group_by=fields)
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))
        return {"v": SCHEMA_VERSION, "rows": rows, "survey_stats": service.survey_stats()}

    @app.get("/reports/qe")
    def report_qe(by_system: bool = Query(False)):
        return {"v": SCHEMA_VERSION, "summary": service.qe_summary(by_system=by_system)}

    @app.get("/reports/pairwise")
    def report_pairwise():
        out = {}
        for task_id in sorted(service.tasks):
            out[task_id] = {
                "tallies": service.pairwise_tallies(task_id),
                "agreement": service.pairwise_agreement(task_id),
            }
        return {"v": SCHEMA_VERSION, "tasks": out}

    if static_dir is not None:
        # survey frontend bundle (index.html + dist/), mounted last so the API
        # routes above keep precedence
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="static")

    return app
