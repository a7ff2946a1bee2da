import json

import pytest
from fastapi.testclient import TestClient

from corpusforge.annotation import AnnotationService, PairwiseTask, SurveyConfig
from corpusforge.annotation.api import create_app
from test_annotation import pairwise_task, survey


@pytest.fixture
def client(tmp_path):
    svc = AnnotationService(
        tmp_path / "events.jsonl",
        surveys=[survey(n_questions=3)],
        pairwise_tasks=[pairwise_task(n_items=2)],
    )
    return TestClient(create_app(svc))


def test_survey_flow_over_http(client):
    posts = 0
    while True:
        r = client.get("/survey/s1/next", params={"annotator": "ann-9"})
        assert r.status_code == 200
        payload = r.json()
        assert payload["v"] == 1
        if payload["done"]:
            break
        assert "model" not in json.dumps(payload)
        body = {
            "v": 1,
            "annotator": "ann-9",
            "question_id": payload["question_id"],
            "helpfulness": 4,
            "naturalness": 3,
        }
        r = client.post("/survey/s1/rating", json=body)
        assert r.status_code == 200
        posts += 1
    assert posts == 3


def test_invalid_rating_is_400_with_field_name(client):
    r = client.post(
        "/survey/s1/rating",
        json={"annotator": "a", "question_id": "q000", "helpfulness": 9, "naturalness": 3},
    )
    assert r.status_code == 400
    assert "helpfulness" in r.json()["detail"]
    r = client.post("/survey/s1/rating", json={"annotator": "a"})
    assert r.status_code == 400
    assert "missing fields" in r.json()["detail"]


def test_unknown_survey_is_404(client):
    assert client.get("/survey/nope/next", params={"annotator": "a"}).status_code == 404


def test_pairwise_flow_over_http(client):
    r = client.get("/pairwise/t1/next", params={"annotator": "ann-2"})
    payload = r.json()
    assert payload["choices"] == ["left", "right", "tie"]
    assert "provenance" not in json.dumps(payload)
    r = client.post(
        "/pairwise/t1/vote",
        json={"annotator": "ann-2", "item_id": payload["item_id"], "choice": "tie"},
    )
    assert r.status_code == 200
    r = client.post(
        "/pairwise/t1/vote", json={"annotator": "ann-2", "item_id": "zzz", "choice": "left"}
    )
    assert r.status_code == 400


def test_accepted_payloads_match_shared_schemas(client):
    # the same JSON-schema fixtures the frontend validates its POSTs against
    import jsonschema
    from pathlib import Path

    schema_dir = Path(__file__).parent.parent / "schemas"
    rating_schema = json.loads((schema_dir / "rating_v1.schema.json").read_text())
    vote_schema = json.loads((schema_dir / "vote_v1.schema.json").read_text())
    rating = {"v": 1, "annotator": "a", "question_id": "q000", "helpfulness": 4, "naturalness": 3}
    jsonschema.validate(rating, rating_schema)
    assert client.post("/survey/s1/rating", json=rating).status_code == 200
    vote = {"v": 1, "annotator": "a", "item_id": "it000", "choice": "tie"}
    jsonschema.validate(vote, vote_schema)
    assert client.post("/pairwise/t1/vote", json=vote).status_code == 200
    # anything the schema rejects, the service rejects too
    bad = dict(rating, helpfulness=9)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, rating_schema)
    assert client.post("/survey/s1/rating", json=bad).status_code == 400


def test_report_endpoints(client):
    client.post(
        "/survey/s1/rating",
        json={"annotator": "a", "question_id": "q000", "helpfulness": 4, "naturalness": 4},
    )
    r = client.get("/reports/ratings", params={"group_by": "lang,model"})
    assert r.status_code == 200
    body = r.json()
    assert body["v"] == 1
    assert body["survey_stats"]["s1"]["answers_graded"] == 1
    assert client.get("/reports/ratings", params={"group_by": "annotator"}).status_code == 400
    assert client.get("/reports/qe").status_code == 200
    r = client.get("/reports/pairwise")
    assert r.status_code == 200
    assert "t1" in r.json()["tasks"]
