"""Config-driven pipeline orchestration with a content-hash run manifest.

A run executes the declared steps in order (ingest, heldout, plan, sample,
pack), writing outputs under the run directory. The manifest records the
config echo and a sha256 per output artifact; identical config plus identical
inputs reproduce identical hashes. Partial outputs of a failing step are kept
under quarantine/ for inspection.
"""

from __future__ import annotations

import hashlib
import json
import logging
import shutil
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import jsonl, sampler
from .corpus import DocumentStore, load_manifest
from .evalharness.bytetok import EOD_ID, byte_encode
from .figures import save_allocation_figure

logger = logging.getLogger("corpusforge.pipeline")

KNOWN_STEPS = ("ingest", "heldout", "plan", "sample", "pack")
SAMPLING_STEPS = ("heldout", "sample")


class PipelineError(RuntimeError):
    def __init__(self, step: str, cause: Exception):
        super().__init__(f"step {step!r} failed: {cause}")
        self.step = step
        self.cause = cause


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def load_config(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def validate_config(config: dict) -> None:
    steps = config.get("steps")
    if not steps:
        raise ValueError("config.steps must be a non-empty list")
    for i, step in enumerate(steps):
        name = step.get("step")
        if name not in KNOWN_STEPS:
            raise ValueError(f"steps[{i}].step: unknown step {name!r}")
        if name in SAMPLING_STEPS and step.get("seed", config.get("seed")) is None:
            raise ValueError(f"steps[{i}].seed: a seed is mandatory for sampling steps")


def _step_outputs(step: dict) -> list:
    return [step[k] for k in ("out", "index") if k in step]


class PipelineRun:
    def __init__(self, config: dict, config_dir: Path, out_dir: Path):
        validate_config(config)
        self.config = config
        self.config_dir = Path(config_dir)
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.produced: set = set()
        self.manifest: dict = {"v": 1, "config": config, "steps": []}

    def _resolve_in(self, rel: str) -> Path:
        if rel in self.produced:
            return self.out_dir / rel
        return self.config_dir / rel

    def _resolve_out(self, rel: str) -> Path:
        path = self.out_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def run(self) -> dict:
        for i, step in enumerate(self.config["steps"]):
            name = step["step"]
            logger.info("step start", extra={"step": name, "index": i})
            try:
                outputs = getattr(self, f"step_{name}")(step)
            except Exception as e:
                self._quarantine(step, name)
                logger.error("step failed", extra={"step": name, "error": str(e)})
                raise PipelineError(name, e) from e
            hashed = {}
            for rel in outputs:
                self.produced.add(rel)
                hashed[rel] = f"sha256:{sha256_file(self.out_dir / rel)}"
            self.manifest["steps"].append({"step": name, "index": i, "outputs": hashed})
            logger.info("step done", extra={"step": name, "outputs": list(hashed)})
        manifest_path = self.out_dir / "manifest.json"
        with open(manifest_path, "w", encoding="utf-8") as f:
            json.dump(self.manifest, f, ensure_ascii=False, sort_keys=True, indent=2)
            f.write("\n")
        return self.manifest

    def _quarantine(self, step: dict, name: str) -> None:
        qdir = self.out_dir / "quarantine" / name
        for rel in _step_outputs(step):
            src = self.out_dir / rel
            if src.exists():
                qdir.mkdir(parents=True, exist_ok=True)
                shutil.move(str(src), str(qdir / Path(rel).name))

    def _seed(self, step: dict) -> int:
        return step.get("seed", self.config.get("seed"))

    # -- steps ------------------------------------------------------------

    def step_ingest(self, step: dict) -> list:
        manifest_path = self._resolve_in(step["manifest"])
        # source paths are relative to the manifest location
        specs = [
            replace(s, path=str(manifest_path.parent / s.path))
            for s in load_manifest(manifest_path)
        ]
        store_rel = step["store"]
        store = DocumentStore(self.out_dir / store_rel)
        report = store.ingest(specs)
        self.produced.add(store_rel)
        rel = f"{store_rel}/documents.jsonl"
        report_rel = step.get("report", "ingest_report.json")
        with open(self._resolve_out(report_rel), "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, sort_keys=True, indent=2)
            f.write("\n")
        return [rel, report_rel]

    def step_heldout(self, step: dict) -> list:
        store = DocumentStore(self.out_dir / step["store"])
        split = store.carve_heldout(step["lang"], step["n"], self._seed(step))
        return [f"{step['store']}/heldout/{split.lang}.json"]

    def step_plan(self, step: dict) -> list:
        mode = step.get("mode", "unimax")
        budget = step["budget"]
        plan: dict = {"mode": mode, "budget": budget, "unit": step.get("unit", "characters")}
        if mode == "categorical":
            policy = sampler.CategoricalPolicy(step["weights"], step["budget"]).validate()
            plan["weights"] = dict(policy.weights)
        else:
            if "available_from_store" in step:
                store = DocumentStore(self.out_dir / step["available_from_store"])
                heldout = store.all_heldout_ids()
                available = {
                    lang: sum(
                        c
                        for i, c in store.char_counts_for_lang(lang).items()
                        if i not in heldout
                    )
                    for lang in step["langs"]
                }
            else:
                available = dict(step["available"])
            for key in step.get("uncapped", []):
                available[key] = sampler.UNCAPPED
            uniform = step.get("uniform")
            share = Fraction(str(uniform["share"])) if uniform else Fraction(1)
            primary_budget = int(budget * share)
            if mode == "unimax":
                alloc = sampler.unimax_allocate(available, primary_budget, step.get("n", 4))
            elif mode == "proportional":
                alloc = sampler.proportional_allocate(available, primary_budget)
            else:
                raise ValueError(f"unknown plan mode {mode!r}")
            plan["primary"] = alloc.to_report()
            exact = {k: [e.allocated.numerator, e.allocated.denominator] for k, e in alloc.entries.items()}
            if uniform:
                langs = list(uniform["langs"])
                per_lang = Fraction(budget) * (1 - share) / len(langs)
                plan["uniform"] = {
                    lang: int(per_lang) if per_lang.denominator == 1 else float(per_lang)
                    for lang in langs
                }
                for lang in langs:
                    exact[lang] = [per_lang.numerator, per_lang.denominator]
            plan["allocated_exact"] = exact
        out_rel = step["out"]
        with open(self._resolve_out(out_rel), "w", encoding="utf-8") as f:
            json.dump(plan, f, ensure_ascii=False, sort_keys=True, indent=2)
            f.write("\n")
        outputs = [out_rel]
        if step.get("figure") and "primary" in plan:
            save_allocation_figure(plan["primary"], self._resolve_out(step["figure"]))
            outputs.append(step["figure"])
        return outputs

    def step_sample(self, step: dict) -> list:
        with open(self._resolve_in(step["plan"]), "r", encoding="utf-8") as f:
            plan = json.load(f)
        store = DocumentStore(self.out_dir / step["store"])
        seed = self._seed(step)
        heldout = store.all_heldout_ids()
        if plan["mode"] == "categorical":
            ids_by_key = {
                lang: [i for i in store.ids_for_lang(lang) if i not in heldout]
                for lang in plan["weights"]
            }
            policy = sampler.CategoricalPolicy(plan["weights"], plan["budget"])
            stream, report = sampler.sample_categorical_stream(policy, ids_by_key, seed)
        else:
            entries = {
                key: sampler.KeyAllocation(None, Fraction(num, den))
                for key, (num, den) in plan["allocated_exact"].items()
            }
            alloc = sampler.Allocation(plan["mode"], plan["budget"], None, entries)
            char_counts = {
                key: {
                    i: c
                    for i, c in store.char_counts_for_lang(key).items()
                    if i not in heldout
                }
                for key in entries
            }
            stream, report = sampler.sample_allocation_stream(alloc, char_counts, seed)
        out_rel = step["out"]
        jsonl.write_jsonl(self._resolve_out(out_rel), ({"id": doc_id} for doc_id in stream))
        report_rel = step.get("report", "sample_report.json")
        with open(self._resolve_out(report_rel), "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, sort_keys=True, indent=2)
            f.write("\n")
        return [out_rel, report_rel]

    def step_pack(self, step: dict) -> list:
        store = DocumentStore(self.out_dir / step["store"])
        texts = {}
        for doc in store.documents():
            texts[doc.id] = doc.text
        token_docs = (
            byte_encode(texts[rec["id"]]) for rec in jsonl.read_jsonl(self._resolve_in(step["ids"]))
        )
        sequences = sampler.pack(token_docs, step.get("context", 2048), EOD_ID)
        out_rel = step["out"]
        if step.get("format", "bin") == "jsonl":
            sampler.write_packed_jsonl(sequences, self._resolve_out(out_rel))
            return [out_rel]
        index_rel = step.get("index", out_rel + ".idx.json")
        sampler.write_packed_bin(
            sequences, self._resolve_out(out_rel), self._resolve_out(index_rel)
        )
        return [out_rel, index_rel]


def run_pipeline(config_path: str | Path, out_dir: str | Path) -> dict:
    config_path = Path(config_path)
    run = PipelineRun(load_config(config_path), config_path.parent, Path(out_dir))
    return run.run()
