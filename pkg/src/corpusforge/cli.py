"""forge: one entry point wiring every pipeline stage.

Every subcommand is a thin wrapper over the library; logs go to stderr as
JSON lines, data goes to the paths you name. Exit code 0 only on full success.
"""

from __future__ import annotations

import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import jsonl, pipeline, sampler
from .annotation.reports import export_reports
from .annotation.service import AnnotationService, PairwiseTask, SurveyConfig
from .benchforge.align import align_flores_extensions
from .benchforge.cluster import fast_cluster, iterative_curation
from .benchforge.filtering import Conversation, MtBenchItem, filter_candidates, finalize_benchmark
from .corpus import DocumentStore
from .evalharness import bytetok
from .evalharness.bleu import SegmentPair, corpus_bleu
from .evalharness.judge import HttpJudge, MockJudge, judge_fallback
from .evalharness.metrics import accuracy_with_stderr, byte_ppl_by_lang, linear_cka
from .evalharness.prompts import render_eval_prompt
from .figures import save_allocation_figure
from .instructions import (
    ChatExample,
    ParallelPair,
    MixtureSpec,
    Turn,
    build_mixture,
    concat_sentences,
    filter_copied_translations,
    render_chat,
    render_translation,
)


class JsonLineFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {"level": record.levelname.lower(), "logger": record.name, "msg": record.getMessage()}
        for key in ("step", "index", "outputs", "error"):
            if hasattr(record, key):
                payload[key] = getattr(record, key)
        return json.dumps(payload, ensure_ascii=False)


def _setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonLineFormatter())
    root = logging.getLogger("corpusforge")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def _echo_json(data) -> None:
    click.echo(json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True))


@click.group()
@click.option("--verbose", is_flag=True, default=False)
def main(verbose: bool) -> None:
    _setup_logging(verbose)


# -- pipeline -------------------------------------------------------------


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def run_cmd(config_path: str, out_dir: str) -> None:
    """Execute a declared pipeline and write its run manifest."""
    try:
        manifest = pipeline.run_pipeline(config_path, out_dir)
    except (pipeline.PipelineError, ValueError) as e:
        raise click.ClickException(str(e))
    _echo_json({"manifest": str(Path(out_dir) / "manifest.json"), "steps": len(manifest["steps"])})


# -- corpus ----------------------------------------------------------------


@main.group()
def corpus() -> None:
    """Document store: ingest, statistics, held-out splits."""


@corpus.command("ingest")
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--store", required=True, type=click.Path())
def corpus_ingest(manifest: str, store: str) -> None:
    report = DocumentStore(store).ingest_manifest(manifest)
    _echo_json(report.to_dict())


@corpus.command("stats")
@click.option("--store", required=True, type=click.Path(exists=True))
@click.option("--by-source", is_flag=True, default=False)
def corpus_stats(store: str, by_source: bool) -> None:
    _echo_json(DocumentStore(store).stats().to_dict(by_source=by_source))


@corpus.command("heldout")
@click.option("--store", required=True, type=click.Path(exists=True))
@click.option("--lang", required=True)
@click.option("--n", required=True, type=int)
@click.option("--seed", required=True, type=int)
def corpus_heldout(store: str, lang: str, n: int, seed: int) -> None:
    try:
        split = DocumentStore(store).carve_heldout(lang, n, seed)
    except ValueError as e:
        raise click.ClickException(str(e))
    _echo_json({"lang": split.lang, "examples": split.examples, "characters": split.characters})


# -- sampler -----------------------------------------------------------------


@main.group(name="sampler")
def sampler_group() -> None:
    """Mixture planning, stream execution, packing."""


@sampler_group.command("plan")
@click.option("--mode", type=click.Choice(["unimax", "proportional"]), default="unimax")
@click.option("--n", "n_epochs", default="4", help="epoch cap (unimax)")
@click.option("--budget", required=True, type=int)
@click.option("--unit", type=click.Choice(["chars", "tokens", "sentences"]), default="chars")
@click.option("--available", "available_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--figure", "figure_path", type=click.Path(), default=None)
def sampler_plan(mode, n_epochs, budget, unit, available_path, out_path, figure_path) -> None:
    with open(available_path, "r", encoding="utf-8") as f:
        data = json.load(f)
    available = dict(data.get("available", data if "uncapped" not in data else {}))
    for key in data.get("uncapped", []):
        available[key] = sampler.UNCAPPED
    try:
        if mode == "unimax":
            alloc = sampler.unimax_allocate(available, budget, Fraction(n_epochs))
        else:
            alloc = sampler.proportional_allocate(available, budget)
    except ValueError as e:
        raise click.ClickException(str(e))
    report = alloc.to_report()
    report["unit"] = unit
    report["allocated_exact"] = {
        k: [e.allocated.numerator, e.allocated.denominator] for k, e in alloc.entries.items()
    }
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(report, f, ensure_ascii=False, sort_keys=True, indent=2)
        f.write("\n")
    if figure_path:
        save_allocation_figure(report, figure_path)
    _echo_json(report)


@sampler_group.command("run")
@click.option("--plan", "plan_path", required=True, type=click.Path(exists=True))
@click.option("--store", required=True, type=click.Path(exists=True))
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def sampler_run(plan_path, store, seed, out_path) -> None:
    with open(plan_path, "r", encoding="utf-8") as f:
        plan = json.load(f)
    st = DocumentStore(store)
    heldout = st.all_heldout_ids()
    entries = {
        key: sampler.KeyAllocation(None, Fraction(num, den))
        for key, (num, den) in plan["allocated_exact"].items()
    }
    alloc = sampler.Allocation(plan.get("mode", "unimax"), plan["budget"], None, entries)
    char_counts = {
        key: {i: c for i, c in st.char_counts_for_lang(key).items() if i not in heldout}
        for key in entries
    }
    try:
        stream, report = sampler.sample_allocation_stream(alloc, char_counts, seed)
    except ValueError as e:
        raise click.ClickException(str(e))
    jsonl.write_jsonl(out_path, ({"id": i} for i in stream))
    _echo_json(report.to_dict())


@sampler_group.command("pack")
@click.option("--tokens", "tokens_path", required=True, type=click.Path(exists=True),
              help="JSON-lines, one token-id array per document")
@click.option("--context", default=2048, type=int)
@click.option("--format", "fmt", type=click.Choice(["bin", "jsonl"]), default="bin")
@click.option("--out", "out_path", required=True, type=click.Path())
def sampler_pack(tokens_path, context, fmt, out_path) -> None:
    docs = (rec for rec in jsonl.read_jsonl(tokens_path))
    seqs = sampler.pack(docs, context, bytetok.EOD_ID)
    if fmt == "jsonl":
        n = sampler.write_packed_jsonl(seqs, out_path)
    else:
        n = sampler.write_packed_bin(seqs, out_path, str(out_path) + ".idx.json")
    _echo_json({"sequences": n, "context": context})


# -- instructions ---------------------------------------------------------------


@main.group()
def instr() -> None:
    """Instruction formatting, mixtures, and translation-data filters."""


@instr.command("render")
@click.option("--format", "fmt", type=click.Choice(["chat", "translate"]), required=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def instr_render(fmt, in_path, out_path) -> None:
    def rendered():
        for rec in jsonl.read_jsonl(in_path):
            if fmt == "chat":
                example = ChatExample(
                    turns=tuple(Turn(t["role"], t["text"]) for t in rec["turns"]),
                    source=rec.get("source", ""),
                    lang=rec.get("lang", ""),
                )
                yield render_chat(example).to_record()
            else:
                yield render_translation(ParallelPair.from_record(rec)).to_record()

    n = jsonl.write_jsonl(out_path, rendered())
    _echo_json({"rendered": n})


@instr.command("mix")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True),
              help="directory with one <source>.jsonl per dataset")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
def instr_mix(spec_path, data_dir, seed, out_path) -> None:
    spec = MixtureSpec.from_json(spec_path)
    if seed is not None:
        spec.seed = seed
    datasets = {}
    for source in spec.requests:
        path = Path(data_dir) / f"{source}.jsonl"
        if not path.exists():
            raise click.ClickException(f"dataset file not found: {path}")
        datasets[source] = list(jsonl.read_jsonl(path))
    try:
        examples, report = build_mixture(spec, datasets)
    except ValueError as e:
        raise click.ClickException(str(e))
    jsonl.write_jsonl(out_path, examples)
    _echo_json(report.to_dict())


@instr.command("filter-copies")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", default=70.0, type=float)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--dropped", "dropped_path", type=click.Path(), default=None)
def instr_filter_copies(in_path, threshold, out_path, dropped_path) -> None:
    pairs = [ParallelPair.from_record(r) for r in jsonl.read_jsonl(in_path)]
    kept, dropped = filter_copied_translations(pairs, threshold)
    jsonl.write_jsonl(out_path, (p.to_record() for p in kept))
    if dropped_path:
        jsonl.write_jsonl(dropped_path, (p.to_record() for p in dropped))
    _echo_json({"kept": len(kept), "dropped": len(dropped), "threshold": threshold})


@instr.command("concat")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--fraction", default=0.5, type=float)
@click.option("--min", "lo", default=2, type=int)
@click.option("--max", "hi", default=6, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def instr_concat(in_path, fraction, lo, hi, seed, out_path) -> None:
    pairs = [ParallelPair.from_record(r) for r in jsonl.read_jsonl(in_path)]
    merged = concat_sentences(pairs, fraction=fraction, chunk_range=(lo, hi), seed=seed)
    jsonl.write_jsonl(out_path, (p.to_record() for p in merged))
    _echo_json({"in": len(pairs), "out": len(merged)})


# -- benchmarks -------------------------------------------------------------------


@main.group()
def bench() -> None:
    """Benchmark construction: filter, cluster, curate, finalize, align."""


@bench.command("filter")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--max-user-tokens", default=50, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def bench_filter(in_path, max_user_tokens, out_path) -> None:
    convs = [
        Conversation(
            id=r["id"],
            turns=tuple((t["role"], t["text"]) for t in r["turns"]),
            redacted=r.get("redacted", False),
            moderation_flagged=r.get("moderation_flagged", False),
            user_token_counts=tuple(r["user_token_counts"]) if "user_token_counts" in r else None,
        )
        for r in jsonl.read_jsonl(in_path)
    ]
    try:
        kept = filter_candidates(convs, max_user_tokens)
    except ValueError as e:
        raise click.ClickException(str(e))
    jsonl.write_jsonl(out_path, ({"id": c.id} for c in kept))
    _echo_json({"in": len(convs), "kept": len(kept)})


def _read_embeddings(path) -> dict:
    return {rec["id"]: rec["vec"] for rec in jsonl.read_jsonl(path)}


@bench.command("cluster")
@click.option("--embeddings", "emb_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", default=0.85, type=float)
@click.option("--min-size", default=2, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def bench_cluster(emb_path, threshold, min_size, out_path) -> None:
    clusters = fast_cluster(_read_embeddings(emb_path), threshold, min_size)
    jsonl.write_jsonl(
        out_path,
        (
            {"representative": c.representative, "members": list(c.members), "threshold": c.threshold}
            for c in clusters
        ),
    )
    _echo_json({"clusters": len(clusters), "claimed": sum(c.size for c in clusters)})


@bench.command("curate")
@click.option("--embeddings", "emb_path", required=True, type=click.Path(exists=True))
@click.option("--thresholds", required=True, help="comma-separated, descending")
@click.option("--min-size", default=2, type=int)
@click.option("--texts", "texts_path", type=click.Path(exists=True), default=None,
              help="JSON-lines {id, text} for worklist display")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="review worklist TSV: cluster_id, representative_text, keep?")
def bench_curate(emb_path, thresholds, min_size, texts_path, out_path) -> None:
    tvals = [float(t) for t in thresholds.split(",")]
    texts = (
        {rec["id"]: rec["text"] for rec in jsonl.read_jsonl(texts_path)} if texts_path else None
    )
    try:
        rounds = iterative_curation(_read_embeddings(emb_path), tvals, min_size)
    except ValueError as e:
        raise click.ClickException(str(e))
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        f.write("round\tthreshold\tcluster_id\trepresentative_text\tkeep?\n")
        for i, rnd in enumerate(rounds):
            for row in rnd.worklist(texts):
                f.write(f"{i}\t{rnd.threshold}\t{row['cluster_id']}\t{row['representative_text']}\t\n")
    _echo_json(
        {
            "rounds": [
                {"threshold": r.threshold, "clusters": len(r.clusters), "pool_after": r.pool_after}
                for r in rounds
            ]
        }
    )


@bench.command("curate-apply")
@click.option("--worklist", "worklist_path", required=True, type=click.Path(exists=True),
              help="the curate TSV after human edits to the keep? column")
@click.option("--out", "out_path", required=True, type=click.Path())
def bench_curate_apply(worklist_path, out_path) -> None:
    kept = []
    with open(worklist_path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        try:
            id_col = header.index("cluster_id")
            keep_col = header.index("keep?")
        except ValueError:
            raise click.ClickException("worklist header must contain cluster_id and keep? columns")
        for line in f:
            cols = line.rstrip("\n").split("\t")
            if len(cols) <= max(id_col, keep_col):
                continue
            if cols[keep_col].strip().lower() in {"y", "yes", "true", "1", "keep"}:
                kept.append(cols[id_col])
    jsonl.write_jsonl(out_path, ({"id": i} for i in kept))
    _echo_json({"kept": len(kept)})


@bench.command("finalize")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--per-category", default=20, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def bench_finalize(in_path, per_category, out_path) -> None:
    items = [
        MtBenchItem(
            id=r["id"],
            category=r["category"],
            prompts=tuple(r["turns"]),
            translations=r.get("translations", {}),
        )
        for r in jsonl.read_jsonl(in_path)
    ]
    try:
        final, manifest = finalize_benchmark(items, per_category)
    except ValueError as e:
        raise click.ClickException(str(e))
    jsonl.write_jsonl(out_path, (it.to_record() for it in final))
    _echo_json(manifest)


@bench.command("align")
@click.option("--flores", "flores_path", required=True, type=click.Path(exists=True),
              help='JSON {"lang": {"sentence_id": text}}')
@click.option("--sib", "sib_path", required=True, type=click.Path(exists=True))
@click.option("--belebele", "belebele_path", required=True, type=click.Path(exists=True))
@click.option("--qa", "qa_path", required=True, type=click.Path(exists=True),
              help='JSON {"lang": {"item_id": {"question", "answers"}}}')
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
def bench_align(flores_path, sib_path, belebele_path, qa_path, out_dir) -> None:
    with open(flores_path, "r", encoding="utf-8") as f:
        flores = {
            lang: {int(k): v for k, v in by_id.items()} for lang, by_id in json.load(f).items()
        }
    with open(qa_path, "r", encoding="utf-8") as f:
        qa = json.load(f)
    sib = list(jsonl.read_jsonl(sib_path))
    belebele = list(jsonl.read_jsonl(belebele_path))
    try:
        bench_set = align_flores_extensions(flores, sib, belebele, qa)
    except ValueError as e:
        raise click.ClickException(str(e))
    out = Path(out_dir)
    jsonl.write_jsonl(out / "flores.jsonl", (i.to_record() for i in bench_set.flores))
    jsonl.write_jsonl(out / "sib.jsonl", (i.to_record() for i in bench_set.sib))
    jsonl.write_jsonl(out / "belebele.jsonl", (i.to_record() for i in bench_set.belebele))
    _echo_json(bench_set.counts())


# -- evaluation ---------------------------------------------------------------------


@main.group(name="eval")
def eval_group() -> None:
    """Metrics over model outputs and logprob dumps."""


@eval_group.command("bleu")
@click.option("--refs", "refs_path", required=True, type=click.Path(exists=True))
@click.option("--hyps", "hyps_path", required=True, type=click.Path(exists=True))
def eval_bleu(refs_path, hyps_path) -> None:
    refs = {r["item_id"]: r["output_text"] for r in jsonl.read_jsonl(refs_path)}
    hyps = {r["item_id"]: r["output_text"] for r in jsonl.read_jsonl(hyps_path)}
    missing = sorted(set(refs) ^ set(hyps))
    if missing:
        raise click.ClickException(f"item ids do not match between files: {missing[:5]}")
    segments = [SegmentPair(hyps[i], (refs[i],)) for i in sorted(refs)]
    result = corpus_bleu(segments)
    _echo_json(result.to_dict())


@eval_group.command("acc")
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--bootstrap", "iters", default=1000, type=int)
@click.option("--seed", default=7, type=int)
def eval_acc(scores_path, iters, seed) -> None:
    scores = [r["score"] if isinstance(r, dict) else r for r in jsonl.read_jsonl(scores_path)]
    report = accuracy_with_stderr(scores, bootstrap_iters=iters, seed=seed)
    _echo_json(report.to_dict())


@eval_group.command("ppl")
@click.option("--dump", "dump_path", required=True, type=click.Path(exists=True))
def eval_ppl(dump_path) -> None:
    try:
        _echo_json(byte_ppl_by_lang(jsonl.read_jsonl(dump_path)))
    except ValueError as e:
        raise click.ClickException(str(e))


@eval_group.command("cka")
@click.option("--x", "x_path", required=True, type=click.Path(exists=True))
@click.option("--y", "y_path", required=True, type=click.Path(exists=True))
def eval_cka(x_path, y_path) -> None:
    x = [r["vec"] for r in jsonl.read_jsonl(x_path)]
    y = [r["vec"] for r in jsonl.read_jsonl(y_path)]
    try:
        _echo_json({"cka": linear_cka(x, y)})
    except ValueError as e:
        raise click.ClickException(str(e))


@eval_group.command("prompts")
@click.option("--mode", type=click.Choice(["pretrained", "instruct"]), required=True)
@click.option("--task", type=click.Choice(["sib", "belebele", "flores"]), required=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def eval_prompts(mode, task, in_path, out_path) -> None:
    def rendered():
        for rec in jsonl.read_jsonl(in_path):
            rec.setdefault("kind", task)
            yield {"prompt": render_eval_prompt(rec, mode)}

    n = jsonl.write_jsonl(out_path, rendered())
    _echo_json({"prompts": n})


@eval_group.command("judge")
@click.option("--endpoint", default=None, help="HTTP endpoint: JSON {prompt} -> {text}")
@click.option("--mock", "mock_path", default=None, type=click.Path(exists=True),
              help="JSON list of scripted responses")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
def eval_judge(endpoint, mock_path, in_path) -> None:
    if (endpoint is None) == (mock_path is None):
        raise click.ClickException("pass exactly one of --endpoint / --mock")
    if mock_path:
        with open(mock_path, "r", encoding="utf-8") as f:
            judge = MockJudge(json.load(f))
    else:
        judge = HttpJudge(endpoint)
    outcome = judge_fallback(list(jsonl.read_jsonl(in_path)), judge)
    _echo_json(outcome.to_dict())


# -- annotation ---------------------------------------------------------------------


@main.group()
def annotate() -> None:
    """Human-evaluation service and report exports."""


def _load_service(config_path: str, log_path: str) -> AnnotationService:
    with open(config_path, "r", encoding="utf-8") as f:
        config = json.load(f)
    surveys = [SurveyConfig.from_dict(s) for s in config.get("surveys", [])]
    tasks = [PairwiseTask.from_dict(t) for t in config.get("pairwise_tasks", [])]
    return AnnotationService(log_path, surveys=surveys, pairwise_tasks=tasks)


@annotate.command("serve")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--port", default=8100, type=int)
@click.option("--host", default="127.0.0.1")
@click.option("--static", "static_dir", type=click.Path(exists=True), default=None,
              help="directory with the survey frontend bundle to serve at /")
def annotate_serve(config_path, log_path, port, host, static_dir) -> None:
    import uvicorn

    from .annotation.api import create_app

    app = create_app(_load_service(config_path, log_path), static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@annotate.command("report")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["ratings", "pairwise", "qe", "all"]), default="all")
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
@click.option("--figures/--no-figures", "with_figures", default=True)
def annotate_report(config_path, log_path, kind, out_dir, with_figures) -> None:
    service = _load_service(config_path, log_path)
    kinds = ("ratings", "pairwise", "qe") if kind == "all" else (kind,)
    written = export_reports(service, out_dir, kinds=kinds, with_figures=with_figures)
    _echo_json(written)


if __name__ == "__main__":
    main()
