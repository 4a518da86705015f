"""End-to-end pipeline: transform, generate, validate, mix, stats, manifest.

Every artifact is written to a ``.partial`` file first and renamed into
place once complete, so an aborted run leaves only suffixed partials. The
manifest records seeds, input digests, and output digests but no wall-clock
values; two runs over the same inputs produce byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .config import PipelineConfig
from .errors import ToolkitError
from .generate import (
    GenParams,
    GenerationClient,
    GenerationReport,
    HttpGenerationClient,
    ReplayClient,
    SeedDialogue,
    generate_corpus,
    seed_from_doc,
    split_turn_samples,
)
from .mixer import (
    MixPlan,
    MixSource,
    dataset_stats,
    emit_jsonl,
    interleave,
    render_stats_table,
    stats_to_doc,
)
from .model import FunctionRegistry, InstructionSample, load_compact_registry, load_registry
from .react import dialogue_to_doc
from .rng import Xoshiro256StarStar, derive_seed
from .transforms import (
    build_fc_sample,
    fc_record_from_doc,
    mask_names,
    snips_record_from_doc,
    snips_to_dst,
)
from .validate import check_dialogue, error_rate_report, sample_for_review

log = logging.getLogger(__name__)


class StageError(ToolkitError):
    """A pipeline stage failed; carries the stage name and record index."""

    def __init__(self, stage: str, index: Optional[int], cause: Exception) -> None:
        self.stage = stage
        self.index = index
        self.cause = cause
        where = f"record {index}" if index is not None else "setup"
        super().__init__(f"stage {stage!r} failed at {where}: {cause}")


@dataclass
class PipelineResult:
    output_dir: str
    counts: Dict[str, int]
    manifest_path: str
    dataset_path: str


def _read_jsonl_docs(path: str | Path) -> List[Dict[str, Any]]:
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                docs.append(json.loads(line))
    return docs


def _sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


class _AtomicWriter:
    """Writes artifacts via .partial files, renaming on success."""

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = out_dir
        self.final_paths: List[Path] = []

    def write_text(self, name: str, content: str) -> Path:
        final = self.out_dir / name
        partial = self.out_dir / (name + ".partial")
        partial.write_text(content, encoding="utf-8")
        partial.replace(final)
        self.final_paths.append(final)
        return final

    def write_jsonl(self, name: str, docs: Sequence[Any]) -> Path:
        lines = "".join(json.dumps(doc, ensure_ascii=False) + "\n" for doc in docs)
        return self.write_text(name, lines)


def load_registry_file(path: str | Path, name: str = "") -> FunctionRegistry:
    """Load a registry from a tool-record JSON file or compact-signature text."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    ref = name or path.name
    if path.suffix == ".json":
        return load_registry(json.loads(text), name=ref)
    return load_compact_registry(text, name=ref)


def _build_client(config: PipelineConfig) -> GenerationClient:
    gen = config.generation
    if gen.replay_path:
        return ReplayClient.from_file(gen.replay_path)
    if gen.endpoint:
        import os

        return HttpGenerationClient(
            gen.endpoint,
            api_key=os.environ.get(gen.api_key_env),
            requests_per_minute=gen.requests_per_minute,
        )
    raise StageError("generate", None, ToolkitError("no generation client configured"))


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Run every stage and write the artifact set to the output directory."""
    config.validate()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    writer = _AtomicWriter(out_dir)
    counts: Dict[str, int] = {}

    registry = load_registry_file(config.registry_path)

    # -- transform: state tracking ------------------------------------------
    dst_samples: List[InstructionSample] = []
    if config.snips_path:
        for index, doc in enumerate(_read_jsonl_docs(config.snips_path)):
            try:
                dst_samples.append(snips_to_dst(snips_record_from_doc(doc)))
            except Exception as exc:
                raise StageError("transform-dst", index, exc) from exc
    counts["dst_samples"] = len(dst_samples)

    # -- transform: function calling ----------------------------------------
    fc_samples: List[InstructionSample] = []
    masked_records = 0
    if config.fc_path:
        for index, doc in enumerate(_read_jsonl_docs(config.fc_path)):
            try:
                record = fc_record_from_doc(doc)
                record_rng = Xoshiro256StarStar(derive_seed(config.mask_seed, index))
                mask = None
                if record_rng.uniform() < config.mask_probability:
                    _, mask = mask_names(record.tools, record_rng.next_u64())
                    masked_records += 1
                fc_samples.append(
                    build_fc_sample(
                        record.query,
                        record.tools,
                        record.calls,
                        mask=mask,
                        history=record.history,
                    )
                )
            except StageError:
                raise
            except Exception as exc:
                raise StageError("transform-fc", index, exc) from exc
    counts["fc_samples"] = len(fc_samples)
    counts["fc_masked_records"] = masked_records

    # -- generate -------------------------------------------------------------
    cra_samples: List[InstructionSample] = []
    dialogues = []
    gen_reports: List[GenerationReport] = []
    if config.seeds_path:
        seeds: List[SeedDialogue] = []
        for index, doc in enumerate(_read_jsonl_docs(config.seeds_path)):
            try:
                seeds.append(seed_from_doc(doc))
            except Exception as exc:
                raise StageError("generate", index, exc) from exc
        client = _build_client(config)
        params = GenParams(
            model_id=config.generation.model_id,
            temperature=config.generation.temperature,
            max_output_tokens=config.generation.max_output_tokens,
            timeout_s=config.generation.timeout_s,
            retries=config.generation.retries,
        )
        try:
            dialogues = generate_corpus(
                seeds,
                registry,
                client,
                params,
                concurrency=config.generation.concurrency,
                reports=gen_reports,
            )
        except ToolkitError as exc:
            seed_ids = [s.id for s in seeds]
            index = None
            failed_id = getattr(exc, "seed_id", None)
            if failed_id in seed_ids:
                index = seed_ids.index(failed_id)
            raise StageError("generate", index, exc) from exc
        for dialogue_index, dialogue in enumerate(dialogues):
            try:
                cra_samples.extend(split_turn_samples(dialogue, registry))
            except Exception as exc:
                raise StageError("generate", dialogue_index, exc) from exc
    counts["dialogues"] = len(dialogues)
    counts["cra_samples"] = len(cra_samples)

    # -- validate --------------------------------------------------------------
    reports = []
    sampled_ids: List[str] = []
    if dialogues:
        for index, dialogue in enumerate(dialogues):
            try:
                reports.append(check_dialogue(dialogue, registry))
            except Exception as exc:
                raise StageError("validate", index, exc) from exc
        sample_size = min(config.review_sample_size, len(dialogues))
        sampled_ids = sample_for_review(dialogues, sample_size, config.review_seed)
    counts["validation_flags"] = sum(len(r.flags) for r in reports)
    counts["review_sample"] = len(sampled_ids)

    # -- mix ---------------------------------------------------------------------
    plan = MixPlan(
        sources=(
            MixSource("dst"),
            MixSource("fc"),
            MixSource("cra"),
        ),
        shuffle_seed=config.shuffle_seed,
        dedup=config.dedup,
    )
    by_source = {"dst": dst_samples, "fc": fc_samples, "cra": cra_samples}
    try:
        mixed = interleave(plan, by_source)
    except Exception as exc:
        raise StageError("mix", None, exc) from exc
    counts["mixed_samples"] = len(mixed)

    stats = dataset_stats(by_source)

    # -- write artifacts ----------------------------------------------------------
    for name, samples in (
        ("dst_samples.jsonl", dst_samples),
        ("fc_samples.jsonl", fc_samples),
        ("cra_samples.jsonl", cra_samples),
        ("dataset.jsonl", mixed),
    ):
        emit_jsonl(samples, out_dir / (name + ".partial"))
        _finalize_emitted(out_dir, name)

    writer.write_jsonl("dialogues.jsonl", [dialogue_to_doc(d) for d in dialogues])
    writer.write_jsonl(
        "validation_reports.jsonl",
        [
            {
                "dialogue_id": r.dialogue_id,
                "auto_score": r.auto_score,
                "flags": [
                    {
                        "dimension": f.dimension.value,
                        "turn_index": f.turn_index,
                        "detail": f.detail,
                    }
                    for f in r.flags
                ],
            }
            for r in reports
        ],
    )
    writer.write_text(
        "review_sample.json", json.dumps({"ids": sampled_ids}, indent=2) + "\n"
    )
    stats_doc = stats_to_doc(stats)
    writer.write_text("stats.json", json.dumps(stats_doc, indent=2) + "\n")
    writer.write_text("stats.txt", render_stats_table(stats) + "\n")

    summary = error_rate_report(reports, [])
    manifest = {
        "seeds": {
            "mask": config.mask_seed,
            "shuffle": config.shuffle_seed,
            "review": config.review_seed,
        },
        "mask_probability": config.mask_probability,
        "inputs": {
            name: {"path": str(Path(p).name), "sha256": _sha256_file(p)}
            for name, p in (
                ("registry", config.registry_path),
                ("snips", config.snips_path),
                ("fc", config.fc_path),
                ("seeds", config.seeds_path),
            )
            if p
        },
        "generation": {
            "model_id": config.generation.model_id,
            "temperature": config.generation.temperature,
            "retries": config.generation.retries,
            "attempts": [
                {"seed_id": r.seed_id, "attempts": r.attempts} for r in gen_reports
            ],
        },
        "sources": [source.name for source in plan.sources],
        "counts": counts,
        "auto_error_rate": summary.auto_error_rate,
        "outputs": {
            name: _sha256_file(out_dir / name)
            for name in (
                "dst_samples.jsonl",
                "fc_samples.jsonl",
                "cra_samples.jsonl",
                "dataset.jsonl",
                "dialogues.jsonl",
                "validation_reports.jsonl",
                "stats.json",
            )
        },
    }
    manifest_path = writer.write_text(
        "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    log.info("pipeline complete: %s", counts)
    return PipelineResult(
        output_dir=str(out_dir),
        counts=counts,
        manifest_path=str(manifest_path),
        dataset_path=str(out_dir / "dataset.jsonl"),
    )


def _finalize_emitted(out_dir: Path, name: str) -> None:
    """Rename an emit_jsonl .partial pair into place."""
    partial = out_dir / (name + ".partial")
    partial.replace(out_dir / name)
    meta_partial = Path(str(partial) + ".meta.jsonl")
    if meta_partial.exists():
        meta_partial.replace(out_dir / (name + ".meta.jsonl"))
