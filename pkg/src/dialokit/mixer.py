"""Dataset mixing: interleave, dedup, count, and emit instruction samples.

The reference tokenizer used for dataset statistics is deliberately simple
and implementation-independent: maximal runs of letters/digits count as one
token, and every other non-whitespace character counts as one token. The
shuffle runs on the package's seeded xoshiro generator so two runs (or two
implementations) produce identical files.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .errors import ToolkitError
from .model import DomainTag, InstructionSample
from .rng import Xoshiro256StarStar

log = logging.getLogger(__name__)


class MixIoError(ToolkitError):
    """A mix source could not be read or lacks required metadata."""


# Letter/digit runs (unicode-aware, underscore excluded) or single symbols.
_TOKEN = re.compile(r"[^\W_]+|[^\w\s]|_", re.UNICODE)


def tokenize(text: str) -> List[str]:
    """Reference tokenization: 'User: hi there' -> ['User', ':', 'hi', 'there']."""
    return _TOKEN.findall(text)


def count_tokens(sample: InstructionSample) -> int:
    return (
        len(tokenize(sample.instruction))
        + len(tokenize(sample.input))
        + len(tokenize(sample.output))
    )


@dataclass(frozen=True)
class MixSource:
    name: str
    path: str = ""
    domain_tag: DomainTag | None = None


@dataclass(frozen=True)
class MixPlan:
    sources: Tuple[MixSource, ...]
    shuffle_seed: int
    dedup: bool = False

    def __post_init__(self) -> None:
        names = [s.name for s in self.sources]
        if len(set(names)) != len(names):
            raise ValueError("mix sources must have unique names")


def interleave(
    plan: MixPlan,
    samples_by_source: Mapping[str, Sequence[InstructionSample]] | None = None,
) -> List[InstructionSample]:
    """Concatenate sources in plan order and globally shuffle with the seed.

    With ``dedup`` set, exact (instruction, input, output) duplicates are
    dropped, first occurrence kept, before shuffling. Sources may be handed
    in directly; otherwise each source's path is read as a sample file.
    """
    pool: List[InstructionSample] = []
    for source in plan.sources:
        if samples_by_source is not None:
            if source.name not in samples_by_source:
                raise MixIoError(f"no samples provided for source {source.name!r}")
            pool.extend(samples_by_source[source.name])
        else:
            try:
                pool.extend(read_jsonl(source.path, default_tag=source.domain_tag))
            except OSError as exc:
                raise MixIoError(f"cannot read source {source.name!r}: {exc}") from exc
    if plan.dedup:
        seen = set()
        unique: List[InstructionSample] = []
        for sample in pool:
            key = (sample.instruction, sample.input, sample.output)
            if key in seen:
                continue
            seen.add(key)
            unique.append(sample)
        pool = unique
    Xoshiro256StarStar(plan.shuffle_seed).shuffle(pool)
    return pool


@dataclass(frozen=True)
class SourceStats:
    name: str
    sample_count: int
    total_tokens: int
    avg_tokens: float


@dataclass(frozen=True)
class DatasetStats:
    per_source: Tuple[SourceStats, ...]
    total: SourceStats


def _stats_for(name: str, samples: Sequence[InstructionSample]) -> SourceStats:
    total = sum(count_tokens(s) for s in samples)
    if samples:
        avg = round(total / len(samples), 2)
    else:
        log.warning("source %r is empty; average token count reported as 0", name)
        avg = 0.0
    return SourceStats(name, len(samples), total, avg)


def dataset_stats(
    samples_by_source: Mapping[str, Sequence[InstructionSample]]
) -> DatasetStats:
    """Per-source and overall sample/token counts; averages to 2 decimals."""
    per_source = tuple(
        _stats_for(name, samples) for name, samples in samples_by_source.items()
    )
    all_samples: List[InstructionSample] = []
    for samples in samples_by_source.values():
        all_samples.extend(samples)
    return DatasetStats(per_source=per_source, total=_stats_for("total", all_samples))


def stats_to_doc(stats: DatasetStats) -> Dict[str, object]:
    def row(s: SourceStats) -> Dict[str, object]:
        return {
            "samples": s.sample_count,
            "total_tokens": s.total_tokens,
            "avg_tokens_per_sample": s.avg_tokens,
        }

    return {
        "sources": {s.name: row(s) for s in stats.per_source},
        "total": row(stats.total),
    }


def render_stats_table(stats: DatasetStats) -> str:
    rows = list(stats.per_source) + [stats.total]
    name_width = max(len("source"), *(len(r.name) for r in rows))
    header = f"{'source':<{name_width}}  {'samples':>10}  {'tokens':>14}  {'avg/sample':>12}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.name:<{name_width}}  {r.sample_count:>10}  {r.total_tokens:>14}  {r.avg_tokens:>12.2f}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# JSONL emit / read
# ---------------------------------------------------------------------------

def _sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".meta.jsonl")


def emit_jsonl(samples: Sequence[InstructionSample], path: str | Path) -> int:
    """Write samples as one JSON object per line, newline-terminated.

    Sample fields are instruction/input/output; the domain tag goes to a
    ``<path>.meta.jsonl`` sidecar in the same order, keeping the main file
    plain for trainers that expect exactly three fields.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(
                json.dumps(
                    {
                        "instruction": sample.instruction,
                        "input": sample.input,
                        "output": sample.output,
                    },
                    ensure_ascii=False,
                )
            )
            fh.write("\n")
    with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
        for i, sample in enumerate(samples):
            fh.write(json.dumps({"index": i, "domain_tag": sample.domain_tag.value}))
            fh.write("\n")
    return len(samples)


def read_jsonl(
    path: str | Path, default_tag: DomainTag | None = None
) -> List[InstructionSample]:
    """Read a sample file back, restoring domain tags from the sidecar.

    Files without a sidecar need ``default_tag``; otherwise the tags cannot
    be reconstructed and MixIoError is raised.
    """
    path = Path(path)
    tags: List[DomainTag] | None = None
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        tags = []
        with open(sidecar, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    tags.append(DomainTag(json.loads(line)["domain_tag"]))
    samples: List[InstructionSample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            doc = json.loads(line)
            if tags is not None:
                tag = tags[len(samples)]
            elif default_tag is not None:
                tag = default_tag
            else:
                raise MixIoError(
                    f"{path} has no sidecar metadata and no default tag was given"
                )
            samples.append(
                InstructionSample(doc["instruction"], doc["input"], doc["output"], tag)
            )
    return samples
