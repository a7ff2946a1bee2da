"""Delimited report exports for the annotation data, with optional figures
rendered next to the CSVs."""

from __future__ import annotations

import csv
from pathlib import Path

from .. import figures
from .service import AnnotationService


def write_ratings_csv(rows, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    group_fields = sorted({f for r in rows for f in r["group"]})
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(group_fields + ["metric", "mean", "stderr", "n"])
        for r in rows:
            w.writerow(
                [r["group"].get(g, "") for g in group_fields]
                + [r["metric"], f"{r['mean']:.6g}", f"{r['stderr']:.6g}", r["n"]]
            )


def write_survey_stats_csv(stats, path: str | Path) -> None:
    """Collection-statistics table: one column per survey, metric rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    surveys = sorted(stats)
    metrics = ["surveys_submitted", "answers_graded", "grades_per_question"]
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["metric"] + [stats[s]["lang"].upper() for s in surveys])
        for m in metrics:
            row = [m.replace("_", " ")]
            for s in surveys:
                v = stats[s][m]
                row.append(f"{v:.2g}" if isinstance(v, float) else v)
            w.writerow(row)


def write_qe_csv(summary, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["lang", "fluency", "consistency", "incorrect_pct", "acceptable_pct", "n"])
        for lang in sorted(summary):
            row = summary[lang]
            w.writerow(
                [
                    lang,
                    f"{row['fluency_mean']:.6g}",
                    f"{row['consistency_mean']:.6g}",
                    f"{row['incorrect_pct']:.6g}",
                    f"{row['acceptable_pct']:.6g}",
                    row["n"],
                ]
            )


def write_pairwise_csv(tasks, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["task", "tally", "count"])
        for task_id in sorted(tasks):
            for key in sorted(tasks[task_id]["tallies"]):
                w.writerow([task_id, key, tasks[task_id]["tallies"][key]])
        w.writerow([])
        w.writerow(["task", "annotator_a", "annotator_b", "items", "agreement"])
        for task_id in sorted(tasks):
            for p in tasks[task_id]["agreement"]["pairs"]:
                w.writerow(
                    [task_id, p["annotators"][0], p["annotators"][1], p["items"], f"{p['agreement']:.6g}"]
                )


def export_reports(
    service: AnnotationService,
    out_dir: str | Path,
    kinds=("ratings", "pairwise", "qe"),
    with_figures: bool = True,
) -> dict:
    """Write the requested report kinds under out_dir; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    if "ratings" in kinds:
        rows = service.aggregate_ratings(group_by=("lang", "model"))
        write_ratings_csv(rows, out_dir / "ratings.csv")
        write_survey_stats_csv(service.survey_stats(), out_dir / "survey_stats.csv")
        written["ratings"] = [str(out_dir / "ratings.csv"), str(out_dir / "survey_stats.csv")]
        if with_figures and rows:
            figures.save_ratings_figure(rows, out_dir / "ratings.png")
            written["ratings"].append(str(out_dir / "ratings.png"))
    if "pairwise" in kinds:
        tasks = {
            t: {"tallies": service.pairwise_tallies(t), "agreement": service.pairwise_agreement(t)}
            for t in sorted(service.tasks)
        }
        write_pairwise_csv(tasks, out_dir / "pairwise.csv")
        written["pairwise"] = [str(out_dir / "pairwise.csv")]
        if with_figures and tasks:
            figures.save_pairwise_figure(tasks, out_dir / "pairwise.png")
            written["pairwise"].append(str(out_dir / "pairwise.png"))
    if "qe" in kinds:
        summary = service.qe_summary()
        write_qe_csv(summary, out_dir / "qe.csv")
        written["qe"] = [str(out_dir / "qe.csv")]
        if with_figures and summary:
            figures.save_qe_figure(summary, out_dir / "qe.png")
            written["qe"].append(str(out_dir / "qe.png"))
    return written
