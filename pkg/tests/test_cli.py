import json

import pytest
from click.testing import CliRunner

from corpusforge.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    result = runner.invoke(main, list(args), catch_exceptions=False)
    return result


def test_corpus_ingest_stats_heldout(runner, tmp_path):
    src = tmp_path / "liv.txt"
    src.write_text("\n".join(f"rānda {i}" for i in range(40)) + "\n", encoding="utf-8")
    manifest = tmp_path / "manifest.json"
    manifest.write_text(
        json.dumps([{"path": str(src), "lang": "liv", "source": "mini", "granularity": "sentence"}])
    )
    store = tmp_path / "store"
    result = invoke(runner, "corpus", "ingest", "--manifest", str(manifest), "--store", str(store))
    assert result.exit_code == 0
    assert json.loads(result.output)["documents"] == 40

    result = invoke(runner, "corpus", "stats", "--store", str(store))
    assert result.exit_code == 0
    assert json.loads(result.output)["liv"]["documents"] == 40

    result = invoke(runner, "corpus", "heldout", "--store", str(store), "--lang", "liv", "--n", "5", "--seed", "3")
    assert result.exit_code == 0
    assert json.loads(result.output)["examples"] == 5


def test_sampler_plan_and_figure(runner, tmp_path):
    avail = tmp_path / "avail.json"
    avail.write_text(json.dumps({"liv": 2_600_000, "vro": 14_000_000, "kpv": 578_900_000}))
    out = tmp_path / "plan.json"
    fig = tmp_path / "plan.png"
    result = invoke(
        runner, "sampler", "plan", "--mode", "unimax", "--n", "4",
        "--budget", "1500000000", "--unit", "chars",
        "--available", str(avail), "--out", str(out), "--figure", str(fig),
    )
    assert result.exit_code == 0
    plan = json.loads(out.read_text())
    assert plan["keys"]["liv"]["allocated"] == 10_400_000
    assert fig.exists() and fig.stat().st_size > 1000


def test_instr_render_translate(runner, tmp_path):
    pairs = tmp_path / "pairs.jsonl"
    pairs.write_text(
        json.dumps({"src_lang": "et", "tgt_lang": "vro", "src_text": "tere", "tgt_text": "tere"}) + "\n"
    )
    out = tmp_path / "rendered.jsonl"
    result = invoke(runner, "instr", "render", "--format", "translate", "--in", str(pairs), "--out", str(out))
    assert result.exit_code == 0
    rec = json.loads(out.read_text())
    assert rec["text"].startswith("<|system|>\nTranslate the following Estonian text into Võro.")


def test_instr_filter_copies(runner, tmp_path):
    pairs = tmp_path / "pairs.jsonl"
    rows = [
        {"src_lang": "et", "tgt_lang": "vro", "src_text": "üks kaks kolm neli viis", "tgt_text": "üks kaks kolm neli viis"},
        {"src_lang": "et", "tgt_lang": "vro", "src_text": "üks kaks kolm neli viis", "tgt_text": "a b c d e"},
    ]
    pairs.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows))
    out = tmp_path / "kept.jsonl"
    result = invoke(runner, "instr", "filter-copies", "--in", str(pairs), "--threshold", "70", "--out", str(out))
    assert result.exit_code == 0
    assert json.loads(result.output) == {"kept": 1, "dropped": 1, "threshold": 70.0}


def test_eval_bleu_and_acc(runner, tmp_path):
    refs = tmp_path / "refs.jsonl"
    hyps = tmp_path / "hyps.jsonl"
    refs.write_text(json.dumps({"item_id": "1", "output_text": "the cat sat on the mat"}) + "\n")
    hyps.write_text(json.dumps({"item_id": "1", "output_text": "the cat sat on the mat"}) + "\n")
    result = invoke(runner, "eval", "bleu", "--refs", str(refs), "--hyps", str(hyps))
    assert result.exit_code == 0
    assert json.loads(result.output)["score"] == 100.0

    scores = tmp_path / "scores.jsonl"
    scores.write_text("".join(json.dumps({"score": s}) + "\n" for s in [1, 1, 0, 1]))
    result = invoke(runner, "eval", "acc", "--scores", str(scores), "--bootstrap", "200", "--seed", "7")
    assert result.exit_code == 0
    assert json.loads(result.output)["score"] == 0.75


def test_eval_ppl_and_prompts(runner, tmp_path):
    import math

    dump = tmp_path / "dump.jsonl"
    lp = -8 * math.log(2)
    dump.write_text(
        json.dumps({"id": "d", "lang": "liv", "byte_count": 4, "token_logprobs": [lp] * 4}) + "\n"
    )
    result = invoke(runner, "eval", "ppl", "--dump", str(dump))
    assert result.exit_code == 0
    assert json.loads(result.output)["liv"] == 256.0

    items = tmp_path / "items.jsonl"
    items.write_text(json.dumps({"sentence": "Tere."}, ensure_ascii=False) + "\n")
    out = tmp_path / "prompts.jsonl"
    result = invoke(runner, "eval", "prompts", "--mode", "instruct", "--task", "sib", "--in", str(items), "--out", str(out))
    assert result.exit_code == 0
    assert "Is this a piece of news" in json.loads(out.read_text())["prompt"]


def test_eval_judge_with_mock_script(runner, tmp_path):
    script = tmp_path / "script.json"
    script.write_text(json.dumps(["Yes", "no way", "eh"]))
    items = tmp_path / "items.jsonl"
    items.write_text(
        "".join(
            json.dumps({"expected_class": "travel", "output_text": f"t{i}"}) + "\n" for i in range(3)
        )
    )
    result = invoke(runner, "eval", "judge", "--mock", str(script), "--in", str(items))
    assert result.exit_code == 0
    assert json.loads(result.output)["counts"] == {"yes": 1, "no": 1, "unparseable": 1}


def test_bench_cluster_cli(runner, tmp_path):
    emb = tmp_path / "emb.jsonl"
    emb.write_text(
        json.dumps({"id": "a", "vec": [1.0, 0.0]}) + "\n"
        + json.dumps({"id": "b", "vec": [1.0, 0.0]}) + "\n"
        + json.dumps({"id": "c", "vec": [0.0, 1.0]}) + "\n"
    )
    out = tmp_path / "clusters.jsonl"
    result = invoke(runner, "bench", "cluster", "--embeddings", str(emb), "--threshold", "0.9", "--min-size", "2", "--out", str(out))
    assert result.exit_code == 0
    assert json.loads(result.output) == {"clusters": 1, "claimed": 2}


def test_bench_curate_worklist_round_trip(runner, tmp_path):
    emb = tmp_path / "emb.jsonl"
    emb.write_text(
        "".join(
            json.dumps({"id": i, "vec": v}) + "\n"
            for i, v in [("a", [1.0, 0.0]), ("b", [1.0, 0.0]), ("c", [0.0, 1.0]), ("d", [0.0, 1.0])]
        )
    )
    texts = tmp_path / "texts.jsonl"
    texts.write_text(
        "".join(json.dumps({"id": i, "text": f"text {i}"}) + "\n" for i in "abcd")
    )
    worklist = tmp_path / "worklist.tsv"
    result = invoke(
        runner, "bench", "curate", "--embeddings", str(emb), "--thresholds", "0.9",
        "--texts", str(texts), "--out", str(worklist),
    )
    assert result.exit_code == 0
    lines = worklist.read_text().splitlines()
    assert lines[0] == "round\tthreshold\tcluster_id\trepresentative_text\tkeep?"
    assert len(lines) == 3  # two clusters found
    # a human keeps the first cluster only
    edited = [lines[0], lines[1] + "yes", lines[2] + "no"]
    worklist.write_text("\n".join(edited) + "\n")
    kept_path = tmp_path / "kept.jsonl"
    result = invoke(runner, "bench", "curate-apply", "--worklist", str(worklist), "--out", str(kept_path))
    assert result.exit_code == 0
    assert json.loads(result.output) == {"kept": 1}
    assert json.loads(kept_path.read_text())["id"] == "a"


def test_run_surfaces_validation_errors(runner, tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"steps": [{"step": "sample", "plan": "p", "store": "s", "out": "o"}]}))
    result = runner.invoke(main, ["run", "--config", str(config), "--out", str(tmp_path / "run")])
    assert result.exit_code != 0
    assert "seed" in result.output
