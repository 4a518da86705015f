import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from dialokit.cli import main
from dialokit.mixer import read_jsonl
from dialokit.model import DomainTag


@pytest.fixture()
def runner():
    return CliRunner()


def test_help_lists_subcommands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for command in ("transform-dst", "transform-fc", "generate-cra", "validate",
                    "mix", "stats", "eval", "serve", "run"):
        assert command in result.output


def test_transform_dst(runner, fixtures_dir, tmp_path):
    out = tmp_path / "dst.jsonl"
    result = runner.invoke(main, [
        "transform-dst",
        "--input", str(fixtures_dir / "snips.jsonl"),
        "--output", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert "wrote 5 samples" in result.output
    samples = read_jsonl(out)
    assert len(samples) == 5
    assert all(s.domain_tag is DomainTag.TOD for s in samples)


def test_transform_dst_bad_record_exits_nonzero(runner, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({"utterance": "x", "domain": "Nope"}) + "\n")
    result = runner.invoke(main, [
        "transform-dst", "--input", str(bad), "--output", str(tmp_path / "o.jsonl"),
    ])
    assert result.exit_code == 1
    assert "Nope" in result.output


def test_transform_fc_mask_flags(runner, fixtures_dir, tmp_path):
    out = tmp_path / "fc.jsonl"
    result = runner.invoke(main, [
        "transform-fc",
        "--input", str(fixtures_dir / "fc.jsonl"),
        "--output", str(out),
        "--mask-seed", "13",
        "--mask-probability", "0.5",
    ])
    assert result.exit_code == 0, result.output
    assert "wrote 3 samples (2 masked)" in result.output
    none_masked = runner.invoke(main, [
        "transform-fc",
        "--input", str(fixtures_dir / "fc.jsonl"),
        "--output", str(tmp_path / "fc2.jsonl"),
        "--mask-probability", "0",
    ])
    assert "(0 masked)" in none_masked.output


def test_transform_fc_matches_pipeline_artifact(runner, fixtures_dir, tmp_path,
                                                pipeline_run):
    out = tmp_path / "fc.jsonl"
    result = runner.invoke(main, [
        "transform-fc",
        "--input", str(fixtures_dir / "fc.jsonl"),
        "--output", str(out),
    ])
    assert result.exit_code == 0
    pipeline_file = Path(pipeline_run.output_dir) / "fc_samples.jsonl"
    assert out.read_bytes() == pipeline_file.read_bytes()


def test_generate_cra(runner, fixtures_dir, tmp_path):
    dialogues_out = tmp_path / "dialogues.jsonl"
    samples_out = tmp_path / "samples.jsonl"
    result = runner.invoke(main, [
        "generate-cra",
        "--seeds", str(fixtures_dir / "seeds.jsonl"),
        "--registry", str(fixtures_dir / "registry.json"),
        "--replay", str(fixtures_dir / "replay.jsonl"),
        "--dialogues-out", str(dialogues_out),
        "--samples-out", str(samples_out),
    ])
    assert result.exit_code == 0, result.output
    assert "generated 2 dialogues" in result.output
    assert len(dialogues_out.read_text().splitlines()) == 2
    assert len(read_jsonl(samples_out)) == 9


def test_generate_cra_requires_inputs(runner):
    result = runner.invoke(main, ["generate-cra"])
    assert result.exit_code == 1
    assert "--seeds" in result.output


def test_validate_command(runner, fixtures_dir, tmp_path, pipeline_run):
    reports_out = tmp_path / "reports.jsonl"
    result = runner.invoke(main, [
        "validate",
        "--dialogues", str(Path(pipeline_run.output_dir) / "dialogues.jsonl"),
        "--registry", str(fixtures_dir / "registry.json"),
        "--output", str(reports_out),
    ])
    assert result.exit_code == 0, result.output
    assert "checked 2 dialogues" in result.output
    assert "auto error rate 0.5000" in result.output
    assert "UndefinedFunctionCall" in result.output
    docs = [json.loads(l) for l in reports_out.read_text().splitlines()]
    assert [d["auto_score"] for d in docs] == [1, 0]


def test_mix_and_stats_commands(runner, pipeline_run, tmp_path):
    out_dir = Path(pipeline_run.output_dir)
    mixed_out = tmp_path / "mixed.jsonl"
    result = runner.invoke(main, [
        "mix",
        "--source", f"dst={out_dir / 'dst_samples.jsonl'}",
        "--source", f"fc={out_dir / 'fc_samples.jsonl'}",
        "--source", f"cra={out_dir / 'cra_samples.jsonl'}",
        "--shuffle-seed", "17",
        "--output", str(mixed_out),
    ])
    assert result.exit_code == 0, result.output
    assert "wrote 17 samples" in result.output
    # same plan as the pipeline -> byte-identical dataset
    assert mixed_out.read_bytes() == (out_dir / "dataset.jsonl").read_bytes()

    stats_json = tmp_path / "stats.json"
    stats = runner.invoke(main, [
        "stats",
        "--source", f"dst={out_dir / 'dst_samples.jsonl'}",
        "--source", f"fc={out_dir / 'fc_samples.jsonl'}",
        "--json", str(stats_json),
    ])
    assert stats.exit_code == 0, stats.output
    assert "total" in stats.output
    doc = json.loads(stats_json.read_text())
    assert doc["sources"]["dst"]["samples"] == 5
    assert doc["sources"]["fc"]["samples"] == 3


def test_mix_bad_source_spec(runner, tmp_path):
    result = runner.invoke(main, [
        "mix", "--source", "nameonly", "--output", str(tmp_path / "o.jsonl"),
    ])
    assert result.exit_code == 1
    assert "name=path" in result.output


def test_eval_command(runner, fixtures_dir, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(main, [
        "eval",
        "--records", str(fixtures_dir / "eval_records.jsonl"),
        "--registry", str(fixtures_dir / "registry.json"),
        "--output", str(out),
    ])
    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_text())
    assert doc == json.loads(result.output)
    assert doc["jga"] == 0.5
    assert doc["record_counts"]["abstain"] == 2


def test_eval_policy_flags_change_scores(runner, tmp_path):
    records = tmp_path / "records.jsonl"
    records.write_text(json.dumps({
        "id": "r", "kind": "calls",
        "gold": [{"name": "GetWeather", "arguments": {"city": "Paris"}}],
        "predicted": [{"name": "getweather", "arguments": {"city": "Paris"}}],
    }) + "\n")
    strict = runner.invoke(main, ["eval", "--records", str(records)])
    assert json.loads(strict.output)["ast_accuracy"] == 0.0
    lax = runner.invoke(main, [
        "eval", "--records", str(records), "--name-case-insensitive",
    ])
    assert json.loads(lax.output)["ast_accuracy"] == 1.0


def test_run_command(runner, fixtures_dir, tmp_path):
    out_dir = tmp_path / "run"
    result = runner.invoke(main, [
        "run",
        "--config", str(fixtures_dir / "config.json"),
        "--output-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    assert "pipeline finished" in result.output
    assert "mixed_samples: 17" in result.output
    assert (out_dir / "manifest.json").exists()


def test_run_command_missing_registry(runner, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"registry_path": "does-not-exist.json"}))
    result = runner.invoke(main, ["run", "--config", str(config)])
    assert result.exit_code == 1
    assert "does not exist" in result.output


def test_run_command_override_changes_shuffle(runner, fixtures_dir, tmp_path):
    base = tmp_path / "base"
    reshuffled = tmp_path / "reshuffled"
    runner.invoke(main, [
        "run", "--config", str(fixtures_dir / "config.json"),
        "--output-dir", str(base),
    ])
    runner.invoke(main, [
        "run", "--config", str(fixtures_dir / "config.json"),
        "--output-dir", str(reshuffled), "--shuffle-seed", "99",
    ])
    assert (base / "dataset.jsonl").read_bytes() != (
        reshuffled / "dataset.jsonl"
    ).read_bytes()
    # same pool, different order
    assert sorted((base / "dataset.jsonl").read_text().splitlines()) == sorted(
        (reshuffled / "dataset.jsonl").read_text().splitlines()
    )


def test_serve_command_wires_uvicorn(runner, pipeline_run, monkeypatch):
    captured = {}

    def fake_run(app, host, port):
        captured["app"] = app
        captured["host"] = host
        captured["port"] = port

    import uvicorn

    monkeypatch.setattr(uvicorn, "run", fake_run)
    result = runner.invoke(main, [
        "serve", "--run-dir", pipeline_run.output_dir, "--port", "9001",
    ])
    assert result.exit_code == 0, result.output
    assert captured["host"] == "127.0.0.1"
    assert captured["port"] == 9001
    assert captured["app"].title == "dialogue annotation service"


def test_serve_command_missing_run_dir(runner, tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    result = runner.invoke(main, ["serve", "--run-dir", str(empty)])
    assert result.exit_code == 1
