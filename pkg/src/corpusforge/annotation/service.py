"""Annotation service core: an append-only event log plus derived in-memory state.

Every mutation is one JSON-lines event; replaying the log reconstructs the
state byte-identically (timestamps live in the events, never regenerated).
Model identity is resolved server-side from the persisted assignment and is
never part of a client payload.
"""

from __future__ import annotations

import json
import math
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .. import jsonl
from ..sampler import _sub_rng

SCHEMA_VERSION = 1
SCALES = {"helpfulness": (1, 5), "naturalness": (1, 5)}
QE_SCALES = {"fluency": (1, 5), "consistency": (1, 5)}
INSTRUCTION_LOCALES = ("et", "ru")
VOTE_CHOICES = ("left", "right", "tie")
RATING_CATEGORIES = ("math", "reasoning", "writing", "general")


@dataclass
class SurveyConfig:
    survey_id: str
    lang: str
    instruction_locale: str
    models: list
    questions: list  # {"id", "text", optional "category"}
    answers: dict  # question_id -> model_id -> answer text
    seed: int = 0

    def validate(self) -> "SurveyConfig":
        if not self.models:
            raise ValueError("a survey needs at least one model")
        if not self.questions:
            raise ValueError("a survey needs at least one question")
        if self.instruction_locale not in INSTRUCTION_LOCALES:
            raise ValueError(f"instruction_locale must be one of {INSTRUCTION_LOCALES}")
        for q in self.questions:
            for m in self.models:
                if m not in self.answers.get(q["id"], {}):
                    raise ValueError(f"missing answer for question {q['id']!r} model {m!r}")
        return self

    @staticmethod
    def from_dict(d: Mapping) -> "SurveyConfig":
        return SurveyConfig(
            survey_id=d["survey_id"],
            lang=d["lang"],
            instruction_locale=d["instruction_locale"],
            models=list(d["models"]),
            questions=[dict(q) for q in d["questions"]],
            answers={k: dict(v) for k, v in d["answers"].items()},
            seed=d.get("seed", 0),
        ).validate()

    def question(self, question_id: str) -> dict:
        for q in self.questions:
            if q["id"] == question_id:
                return q
        raise KeyError(question_id)


@dataclass
class PairwiseTask:
    task_id: str
    items: list  # {"id", "text_a", "text_b", "provenance_a", "provenance_b"}
    seed: int = 0

    def validate(self) -> "PairwiseTask":
        if not self.items:
            raise ValueError("a pairwise task needs at least one item")
        return self

    @staticmethod
    def from_dict(d: Mapping) -> "PairwiseTask":
        return PairwiseTask(
            task_id=d["task_id"], items=[dict(i) for i in d["items"]], seed=d.get("seed", 0)
        ).validate()

    def item(self, item_id: str) -> dict:
        for it in self.items:
            if it["id"] == item_id:
                return it
        raise KeyError(item_id)


def _check_scale(name: str, value, scales: Mapping = SCALES) -> int:
    lo, hi = scales[name]
    if not isinstance(value, int) or isinstance(value, bool) or not lo <= value <= hi:
        raise ValueError(f"{name} must be an integer in {lo}..{hi}, got {value!r}")
    return value


class AnnotationService:
    """State over an event log; one serialized writer, concurrent-safe reads."""

    def __init__(
        self,
        log_path: str | Path,
        surveys: Sequence[SurveyConfig] = (),
        pairwise_tasks: Sequence[PairwiseTask] = (),
    ):
        self.log_path = Path(log_path)
        self.surveys = {s.validate().survey_id: s for s in surveys}
        self.tasks = {t.validate().task_id: t for t in pairwise_tasks}
        self._lock = threading.Lock()
        # derived state
        self.assignments: dict = {}  # (survey, annotator, question) -> model
        self.ratings: dict = {}  # (survey, annotator, question) -> rating event
        self.votes: dict = {}  # (task, annotator, item) -> vote event
        self.qe: dict = {}  # (lang, system, item, annotator) -> qe event
        if self.log_path.exists():
            for event in jsonl.read_jsonl(self.log_path):
                self._apply(event)

    # -- event plumbing -----------------------------------------------------

    def _apply(self, e: Mapping) -> None:
        etype = e["type"]
        if etype == "assignment":
            self.assignments[(e["survey"], e["annotator"], e["question"])] = e["model"]
        elif etype == "rating":
            self.ratings[(e["survey"], e["annotator"], e["question"])] = dict(e)
        elif etype == "vote":
            self.votes[(e["task"], e["annotator"], e["item"])] = dict(e)
        elif etype == "qe":
            self.qe[(e["lang"], e["system"], e["item"], e["annotator"])] = dict(e)
        else:
            raise ValueError(f"unknown event type {etype!r}")

    def _append(self, event: dict) -> None:
        with self._lock:
            jsonl.append_jsonl(self.log_path, event)
            self._apply(event)

    def snapshot_bytes(self) -> bytes:
        """Canonical serialization of the derived state, for replay audits."""
        state = {
            "assignments": {"|".join(k): v for k, v in sorted(self.assignments.items())},
            "ratings": {"|".join(k): v for k, v in sorted(self.ratings.items())},
            "votes": {"|".join(k): v for k, v in sorted(self.votes.items())},
            "qe": {"|".join(k): v for k, v in sorted(self.qe.items())},
        }
        return json.dumps(state, ensure_ascii=False, sort_keys=True).encode("utf-8")

    # -- survey flow ----------------------------------------------------------

    def _survey(self, survey_id: str) -> SurveyConfig:
        if survey_id not in self.surveys:
            raise KeyError(f"unknown survey {survey_id!r}")
        return self.surveys[survey_id]

    def assigned_model(self, survey_id: str, annotator: str, question_id: str) -> str:
        """Uniform random model per (annotator, question), persisted on first use."""
        survey = self._survey(survey_id)
        key = (survey_id, annotator, question_id)
        if key not in self.assignments:
            rng = _sub_rng(survey.seed, "assign", survey_id, annotator, question_id)
            model = survey.models[rng.randrange(len(survey.models))]
            self._append(
                {
                    "v": SCHEMA_VERSION,
                    "type": "assignment",
                    "survey": survey_id,
                    "annotator": annotator,
                    "question": question_id,
                    "model": model,
                }
            )
        return self.assignments[key]

    def next_assignment(self, survey_id: str, annotator: str) -> dict:
        """Next unanswered question with its assigned answer; never the model id."""
        survey = self._survey(survey_id)
        answered = sum(
            1 for q in survey.questions if (survey_id, annotator, q["id"]) in self.ratings
        )
        for q in survey.questions:
            if (survey_id, annotator, q["id"]) in self.ratings:
                continue
            model = self.assigned_model(survey_id, annotator, q["id"])
            return {
                "v": SCHEMA_VERSION,
                "done": False,
                "survey": survey_id,
                "question_id": q["id"],
                "question": q["text"],
                "answer": survey.answers[q["id"]][model],
                "locale": survey.instruction_locale,
                "scales": {k: list(v) for k, v in SCALES.items()},
                "progress": {"answered": answered, "total": len(survey.questions)},
            }
        return {"v": SCHEMA_VERSION, "done": True, "survey": survey_id}

    def submit_rating(
        self,
        survey_id: str,
        annotator: str,
        question_id: str,
        helpfulness: int,
        naturalness: int,
        category: Optional[str] = None,
        received_at: Optional[float] = None,
    ) -> dict:
        survey = self._survey(survey_id)
        question = survey.question(question_id)
        _check_scale("helpfulness", helpfulness)
        _check_scale("naturalness", naturalness)
        if category is not None and category not in RATING_CATEGORIES:
            raise ValueError(f"category must be one of {RATING_CATEGORIES}, got {category!r}")
        model = self.assigned_model(survey_id, annotator, question_id)
        key = (survey_id, annotator, question_id)
        overwrite = key in self.ratings
        self._append(
            {
                "v": SCHEMA_VERSION,
                "type": "rating",
                "survey": survey_id,
                "annotator": annotator,
                "question": question_id,
                "model": model,
                "helpfulness": helpfulness,
                "naturalness": naturalness,
                "category": category or question.get("category"),
                "received_at": time.time() if received_at is None else received_at,
                "overwrite": overwrite,
            }
        )
        return {"v": SCHEMA_VERSION, "status": "ok", "overwrite": overwrite}

    # -- aggregation ------------------------------------------------------------

    def aggregate_ratings(
        self,
        group_by: Sequence[str] = ("lang", "model"),
        metrics: Sequence[str] = ("helpfulness", "naturalness"),
    ) -> list:
        """Mean and standard error (sample sd / sqrt n) per group and metric."""
        allowed = {"lang", "model", "category"}
        bad = set(group_by) - allowed
        if bad:
            raise ValueError(f"cannot group by {sorted(bad)}; allowed: {sorted(allowed)}")
        groups: dict = {}
        for (survey_id, _annotator, _question), rating in self.ratings.items():
            survey = self.surveys.get(survey_id)
            values = {
                "lang": survey.lang if survey else "?",
                "model": rating["model"],
                "category": rating.get("category"),
            }
            key = tuple(values[g] for g in group_by)
            groups.setdefault(key, []).append(rating)
        rows = []
        for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
            ratings = groups[key]
            for metric in metrics:
                scores = [r[metric] for r in ratings]
                n = len(scores)
                mean = sum(scores) / n
                if n == 1:
                    stderr, flag = 0.0, "n=1"
                else:
                    var = sum((s - mean) ** 2 for s in scores) / (n - 1)
                    stderr, flag = math.sqrt(var) / math.sqrt(n), None
                row = {
                    "group": dict(zip(group_by, key)),
                    "metric": metric,
                    "mean": mean,
                    "stderr": stderr,
                    "n": n,
                }
                if flag:
                    row["flag"] = flag
                rows.append(row)
        return rows

    def survey_stats(self) -> dict:
        """Collection statistics per survey: submissions, graded answers,
        grades per question-slot (question x model)."""
        out = {}
        for survey_id, survey in sorted(self.surveys.items()):
            ratings = [
                r for (sid, _a, _q), r in self.ratings.items() if sid == survey_id
            ]
            annotators = {r["annotator"] for r in ratings}
            slots = len(survey.questions) * len(survey.models)
            out[survey_id] = {
                "lang": survey.lang,
                "surveys_submitted": len(annotators),
                "answers_graded": len(ratings),
                "question_slots": slots,
                "grades_per_question": len(ratings) / slots if slots else 0.0,
            }
        return out

    # -- pairwise ---------------------------------------------------------------

    def _task(self, task_id: str) -> PairwiseTask:
        if task_id not in self.tasks:
            raise KeyError(f"unknown pairwise task {task_id!r}")
        return self.tasks[task_id]

    def _presentation(self, task: PairwiseTask, item: Mapping) -> dict:
        """Seeded per-item side shuffle so provenance position is not constant."""
        swap = _sub_rng(task.seed, "pairwise", task.task_id, item["id"]).random() < 0.5
        left, right = ("b", "a") if swap else ("a", "b")
        return {
            "item_id": item["id"],
            "left": item[f"text_{left}"],
            "right": item[f"text_{right}"],
            "_left_provenance": item[f"provenance_{left}"],
            "_right_provenance": item[f"provenance_{right}"],
        }

    def next_pairwise(self, task_id: str, annotator: str) -> dict:
        task = self._task(task_id)
        voted = sum(1 for it in task.items if (task_id, annotator, it["id"]) in self.votes)
        for item in task.items:
            if (task_id, annotator, item["id"]) in self.votes:
                continue
            pres = self._presentation(task, item)
            return {
                "v": SCHEMA_VERSION,
                "done": False,
                "task": task_id,
                "item_id": pres["item_id"],
                "left": pres["left"],
                "right": pres["right"],
                "choices": list(VOTE_CHOICES),
                "progress": {"voted": voted, "total": len(task.items)},
            }
        return {"v": SCHEMA_VERSION, "done": True, "task": task_id}

    def submit_vote(
        self,
        task_id: str,
        annotator: str,
        item_id: str,
        choice: str,
        received_at: Optional[float] = None,
    ) -> dict:
        task = self._task(task_id)
        try:
            item = task.item(item_id)
        except KeyError:
            raise ValueError(f"vote on unknown item {item_id!r}")
        if choice not in VOTE_CHOICES:
            raise ValueError(f"choice must be one of {VOTE_CHOICES}, got {choice!r}")
        pres = self._presentation(task, item)
        resolved = (
            "tie" if choice == "tie" else pres[f"_{choice}_provenance"]
        )
        key = (task_id, annotator, item_id)
        overwrite = key in self.votes
        self._append(
            {
                "v": SCHEMA_VERSION,
                "type": "vote",
                "task": task_id,
                "annotator": annotator,
                "item": item_id,
                "side": choice,
                "choice": resolved,
                "received_at": time.time() if received_at is None else received_at,
                "overwrite": overwrite,
            }
        )
        return {"v": SCHEMA_VERSION, "status": "ok", "overwrite": overwrite}

    def pairwise_tallies(self, task_id: str) -> dict:
        task = self._task(task_id)
        tallies: dict = {"tie": 0}
        for item in task.items:
            tallies.setdefault(f"prefer_{item['provenance_a']}", 0)
            tallies.setdefault(f"prefer_{item['provenance_b']}", 0)
        for (tid, _a, _i), vote in self.votes.items():
            if tid != task_id:
                continue
            if vote["choice"] == "tie":
                tallies["tie"] += 1
            else:
                tallies[f"prefer_{vote['choice']}"] += 1
        return tallies

    def pairwise_agreement(self, task_id: str) -> dict:
        """Agreement between annotator pairs: fraction of commonly voted items
        with the identical resolved choice."""
        task = self._task(task_id)
        by_annotator: dict = {}
        for (tid, annotator, item_id), vote in self.votes.items():
            if tid == task_id:
                by_annotator.setdefault(annotator, {})[item_id] = vote["choice"]
        annotators = sorted(by_annotator)
        pairs = []
        for i, a in enumerate(annotators):
            for b in annotators[i + 1 :]:
                common = set(by_annotator[a]) & set(by_annotator[b])
                if not common:
                    continue
                same = sum(1 for item in common if by_annotator[a][item] == by_annotator[b][item])
                pairs.append(
                    {"annotators": [a, b], "items": len(common), "agreement": same / len(common)}
                )
        avg = sum(p["agreement"] for p in pairs) / len(pairs) if pairs else None
        return {"task": task_id, "pairs": pairs, "average": avg}

    # -- translation QE ----------------------------------------------------------

    def submit_qe(
        self,
        lang: str,
        item_id: str,
        fluency: int,
        consistency: int,
        incorrect_instruction: bool,
        annotator: str = "",
        system: str = "",
        received_at: Optional[float] = None,
    ) -> dict:
        _check_scale("fluency", fluency, QE_SCALES)
        _check_scale("consistency", consistency, QE_SCALES)
        self._append(
            {
                "v": SCHEMA_VERSION,
                "type": "qe",
                "lang": lang,
                "system": system,
                "item": item_id,
                "annotator": annotator,
                "fluency": fluency,
                "consistency": consistency,
                "incorrect_instruction": bool(incorrect_instruction),
                "received_at": time.time() if received_at is None else received_at,
            }
        )
        return {"v": SCHEMA_VERSION, "status": "ok"}

    def qe_summary(self, by_system: bool = False) -> dict:
        """Per-language QE aggregates. The acceptable bucket needs fluency >= 3
        AND consistency >= 3 AND a correct instruction."""
        groups: dict = {}
        for (lang, system, _item, _annot), e in self.qe.items():
            key = (lang, system) if by_system else lang
            groups.setdefault(key, []).append(e)
        out = {}
        for key in sorted(groups, key=str):
            events = groups[key]
            n = len(events)
            acceptable = sum(
                1
                for e in events
                if e["fluency"] >= 3 and e["consistency"] >= 3 and not e["incorrect_instruction"]
            )
            out[key if isinstance(key, str) else "/".join(key)] = {
                "n": n,
                "fluency_mean": sum(e["fluency"] for e in events) / n,
                "consistency_mean": sum(e["consistency"] for e in events) / n,
                "incorrect_pct": 100.0 * sum(e["incorrect_instruction"] for e in events) / n,
                "acceptable_pct": 100.0 * acceptable / n,
            }
        return out
