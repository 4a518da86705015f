"""Command-line entry point.

One subcommand per pipeline stage plus `run` for the whole thing and
`serve` for the annotation backend. Every flag can also come from the
config file; explicit flags win over the file, which wins over defaults.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Tuple

import click

from .calls import DEFAULT_POLICY, CallMatchPolicy
from .config import ConfigError, PipelineConfig, apply_overrides, load_config
from .errors import ToolkitError
from .generate import GenParams, generate_corpus, seed_from_doc, split_turn_samples
from .metrics import evaluate_transcripts, read_eval_records
from .mixer import (
    MixIoError,
    MixPlan,
    MixSource,
    dataset_stats,
    emit_jsonl,
    interleave,
    read_jsonl,
    render_stats_table,
    stats_to_doc,
)
from .pipeline import StageError, load_registry_file, run_pipeline
from .react import dialogue_from_doc, dialogue_to_doc
from .rng import Xoshiro256StarStar, derive_seed
from .transforms import (
    build_fc_sample,
    fc_record_from_doc,
    mask_names,
    snips_record_from_doc,
    snips_to_dst,
)
from .validate import check_dialogue, error_rate_report


def _fail(exc: Exception) -> "click.ClickException":
    err = click.ClickException(str(exc))
    err.exit_code = 1
    return err


def _read_docs(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def _load_effective_config(config_path: Optional[str], **overrides) -> PipelineConfig:
    config = load_config(config_path) if config_path else PipelineConfig()
    return apply_overrides(config, overrides)


@click.group()
def main() -> None:
    """Dialogue instruction-dataset toolkit."""


@main.command("transform-dst")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
def transform_dst(input_path: str, output_path: str) -> None:
    """Convert slot-annotated utterances into state-tracking samples."""
    try:
        samples = [
            snips_to_dst(snips_record_from_doc(doc)) for doc in _read_docs(input_path)
        ]
        emit_jsonl(samples, output_path)
    except (ToolkitError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {len(samples)} samples to {output_path}")


@main.command("transform-fc")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--mask-seed", type=int, default=13, show_default=True)
@click.option("--mask-probability", type=float, default=0.5, show_default=True)
def transform_fc(
    input_path: str, output_path: str, mask_seed: int, mask_probability: float
) -> None:
    """Convert tool-call records into function-calling samples."""
    samples = []
    masked = 0
    try:
        for index, doc in enumerate(_read_docs(input_path)):
            record = fc_record_from_doc(doc)
            rng = Xoshiro256StarStar(derive_seed(mask_seed, index))
            mask = None
            if rng.uniform() < mask_probability:
                _, mask = mask_names(record.tools, rng.next_u64())
                masked += 1
            samples.append(
                build_fc_sample(
                    record.query,
                    record.tools,
                    record.calls,
                    mask=mask,
                    history=record.history,
                )
            )
        emit_jsonl(samples, output_path)
    except (ToolkitError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {len(samples)} samples ({masked} masked) to {output_path}")


@main.command("generate-cra")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seeds", "seeds_path", type=click.Path(exists=True))
@click.option("--registry", "registry_path", type=click.Path(exists=True))
@click.option("--replay", "replay_path", type=click.Path(exists=True))
@click.option("--endpoint", type=str)
@click.option("--model-id", type=str)
@click.option("--retries", type=int)
@click.option("--concurrency", type=int)
@click.option("--dialogues-out", type=click.Path(), default="dialogues.jsonl")
@click.option("--samples-out", type=click.Path(), default="cra_samples.jsonl")
def generate_cra(
    config_path: Optional[str],
    seeds_path: Optional[str],
    registry_path: Optional[str],
    replay_path: Optional[str],
    endpoint: Optional[str],
    model_id: Optional[str],
    retries: Optional[int],
    concurrency: Optional[int],
    dialogues_out: str,
    samples_out: str,
) -> None:
    """Generate reasoning dialogues from seed conversations via an LLM."""
    from .pipeline import _build_client

    try:
        config = _load_effective_config(
            config_path,
            seeds_path=seeds_path,
            registry_path=registry_path,
            replay_path=replay_path,
            endpoint=endpoint,
            model_id=model_id,
            retries=retries,
            concurrency=concurrency,
        )
        if not config.seeds_path or not config.registry_path:
            raise ConfigError("generate-cra needs --seeds and --registry (or a config)")
        registry = load_registry_file(config.registry_path)
        seeds = [seed_from_doc(doc) for doc in _read_docs(config.seeds_path)]
        client = _build_client(config)
        params = GenParams(
            model_id=config.generation.model_id,
            temperature=config.generation.temperature,
            max_output_tokens=config.generation.max_output_tokens,
            timeout_s=config.generation.timeout_s,
            retries=config.generation.retries,
        )
        dialogues = generate_corpus(
            seeds, registry, client, params, concurrency=config.generation.concurrency
        )
        with open(dialogues_out, "w", encoding="utf-8") as fh:
            for dialogue in dialogues:
                fh.write(json.dumps(dialogue_to_doc(dialogue), ensure_ascii=False) + "\n")
        samples = []
        for dialogue in dialogues:
            samples.extend(split_turn_samples(dialogue, registry))
        emit_jsonl(samples, samples_out)
    except (ToolkitError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    click.echo(
        f"generated {len(dialogues)} dialogues -> {dialogues_out}; "
        f"{len(samples)} samples -> {samples_out}"
    )


@main.command("validate")
@click.option("--dialogues", "dialogues_path", required=True, type=click.Path(exists=True))
@click.option("--registry", "registry_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", type=click.Path())
def validate_cmd(
    dialogues_path: str, registry_path: str, output_path: Optional[str]
) -> None:
    """Run the four-dimension automatic checks over generated dialogues."""
    try:
        registry = load_registry_file(registry_path)
        reports = [
            check_dialogue(dialogue_from_doc(doc), registry)
            for doc in _read_docs(dialogues_path)
        ]
    except (ToolkitError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    summary = error_rate_report(reports, [])
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            for report in reports:
                doc = {
                    "dialogue_id": report.dialogue_id,
                    "auto_score": report.auto_score,
                    "flags": [
                        {
                            "dimension": f.dimension.value,
                            "turn_index": f.turn_index,
                            "detail": f.detail,
                        }
                        for f in report.flags
                    ],
                }
                fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
    click.echo(
        f"checked {len(reports)} dialogues; auto error rate "
        f"{summary.auto_error_rate:.4f}"
    )
    for dimension, count in summary.dimension_counts.items():
        click.echo(f"  {dimension}: {count}")


def _parse_sources(pairs: Tuple[str, ...]):
    sources = []
    for pair in pairs:
        name, _, path = pair.partition("=")
        if not name or not path:
            raise ConfigError(f"--source must be name=path, got {pair!r}")
        sources.append((name, path))
    return sources


@main.command("mix")
@click.option("--source", "sources", multiple=True, required=True,
              help="name=path, repeatable; order fixes the pre-shuffle layout")
@click.option("--shuffle-seed", type=int, default=17, show_default=True)
@click.option("--dedup/--no-dedup", default=False, show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path())
def mix_cmd(
    sources: Tuple[str, ...], shuffle_seed: int, dedup: bool, output_path: str
) -> None:
    """Interleave per-source sample files into one training set."""
    try:
        named = _parse_sources(sources)
        by_source = {name: read_jsonl(path) for name, path in named}
        plan = MixPlan(
            sources=tuple(MixSource(name, path) for name, path in named),
            shuffle_seed=shuffle_seed,
            dedup=dedup,
        )
        mixed = interleave(plan, by_source)
        emit_jsonl(mixed, output_path)
    except (ToolkitError, ValueError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {len(mixed)} samples to {output_path}")


@main.command("stats")
@click.option("--source", "sources", multiple=True, required=True,
              help="name=path, repeatable")
@click.option("--json", "json_path", type=click.Path())
def stats_cmd(sources: Tuple[str, ...], json_path: Optional[str]) -> None:
    """Report per-source sample and token counts."""
    try:
        named = _parse_sources(sources)
        by_source = {name: read_jsonl(path) for name, path in named}
        stats = dataset_stats(by_source)
    except (ToolkitError, ValueError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    if json_path:
        Path(json_path).write_text(
            json.dumps(stats_to_doc(stats), indent=2) + "\n", encoding="utf-8"
        )
    click.echo(render_stats_table(stats))


@main.command("eval")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--registry", "registry_path", type=click.Path(exists=True))
@click.option("--name-case-insensitive", is_flag=True, default=False)
@click.option("--no-string-trim", is_flag=True, default=False)
@click.option("--output", "output_path", type=click.Path())
def eval_cmd(
    records_path: str,
    registry_path: Optional[str],
    name_case_insensitive: bool,
    no_string_trim: bool,
    output_path: Optional[str],
) -> None:
    """Score transcript records: state, call, text, and abstention metrics."""
    try:
        records = read_eval_records(records_path)
        registry = load_registry_file(registry_path) if registry_path else None
        policy = CallMatchPolicy(
            name_case_sensitive=not name_case_insensitive,
            string_trim=not no_string_trim,
            order_insensitive_sets=DEFAULT_POLICY.order_insensitive_sets,
        )
        report = evaluate_transcripts(records, policy=policy, registry=registry)
    except (ToolkitError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    rendered = json.dumps(report, indent=2, ensure_ascii=False)
    if output_path:
        Path(output_path).write_text(rendered + "\n", encoding="utf-8")
    click.echo(rendered)


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--run-dir", "run_dir", type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8321, show_default=True)
def serve_cmd(
    config_path: Optional[str], run_dir: Optional[str], host: str, port: int
) -> None:
    """Serve the annotation API over a finished pipeline run."""
    import uvicorn

    from .service import create_app

    try:
        config = _load_effective_config(config_path)
        directory = run_dir or config.output_dir
        app = create_app(directory, token=config.annotation_token)
    except (ToolkitError, OSError, ValueError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    uvicorn.run(app, host=host, port=port)


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--output-dir", type=click.Path())
@click.option("--mask-seed", type=int)
@click.option("--shuffle-seed", type=int)
@click.option("--review-seed", type=int)
@click.option("--mask-probability", type=float)
@click.option("--review-sample-size", type=int)
def run_cmd(
    config_path: str,
    output_dir: Optional[str],
    mask_seed: Optional[int],
    shuffle_seed: Optional[int],
    review_seed: Optional[int],
    mask_probability: Optional[float],
    review_sample_size: Optional[int],
) -> None:
    """Run the full pipeline: transform, generate, validate, mix, stats."""
    try:
        config = _load_effective_config(
            config_path,
            output_dir=output_dir,
            mask_seed=mask_seed,
            shuffle_seed=shuffle_seed,
            review_seed=review_seed,
            mask_probability=mask_probability,
            review_sample_size=review_sample_size,
        )
        result = run_pipeline(config)
    except StageError as exc:
        raise _fail(exc)
    except (ToolkitError, OSError, ValueError, json.JSONDecodeError) as exc:
        raise _fail(exc)
    click.echo(f"pipeline finished -> {result.output_dir}")
    for key, value in sorted(result.counts.items()):
        click.echo(f"  {key}: {value}")


if __name__ == "__main__":
    main(prog_name="dialokit")
