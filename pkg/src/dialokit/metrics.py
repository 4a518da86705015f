"""Transcript evaluation: overlap metrics, state accuracy, call matching.

All text metrics run on the reference tokenizer from the mixer module so
scores are reproducible without an external tokenizer dependency.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .calls import CallMatchPolicy, DEFAULT_POLICY, match_call_sets
from .errors import ToolkitError
from .mixer import tokenize
from .model import ApiCall, DialogueState, FunctionRegistry


class BadEvalRecord(ToolkitError):
    """An evaluation record mixes variants or has an unknown kind."""


EVAL_KINDS = ("calls", "state", "text", "abstain")


@dataclass(frozen=True)
class EvalRecord:
    """One evaluation pair. ``kind`` fixes the variant of gold/predicted:

    calls   -> lists of ApiCall
    state   -> DialogueState
    text    -> str
    abstain -> bool (True means the side produced no call)
    """

    id: str
    kind: str
    gold: Any
    predicted: Any
    level_tag: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in EVAL_KINDS:
            raise BadEvalRecord(f"unknown record kind {self.kind!r}")
        checks = {
            "calls": lambda v: isinstance(v, (list, tuple))
            and all(isinstance(c, ApiCall) for c in v),
            "state": lambda v: isinstance(v, DialogueState),
            "text": lambda v: isinstance(v, str),
            "abstain": lambda v: isinstance(v, bool),
        }
        ok = checks[self.kind]
        if not ok(self.gold) or not ok(self.predicted):
            raise BadEvalRecord(
                f"record {self.id!r}: gold and predicted must both be {self.kind}"
            )


# ---------------------------------------------------------------------------
# Overlap metrics
# ---------------------------------------------------------------------------

def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    # Classic O(len(a) * len(b)) dynamic program, one rolling row.
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge(pred: str, ref: str, variant: str = "L") -> float:
    """Rouge F1 (beta = 1). Variant 'L' uses LCS; '1' and '2' use n-grams.

    Either side tokenizing to nothing scores 0.0.
    """
    pred_tokens = tokenize(pred)
    ref_tokens = tokenize(ref)
    if not pred_tokens or not ref_tokens:
        return 0.0
    key = str(variant).upper()
    if key == "L":
        overlap = _lcs_length(pred_tokens, ref_tokens)
        return _f1(overlap / len(pred_tokens), overlap / len(ref_tokens))
    if key in ("1", "2"):
        n = int(key)
        pred_grams = _ngrams(pred_tokens, n)
        ref_grams = _ngrams(ref_tokens, n)
        pred_total = sum(pred_grams.values())
        ref_total = sum(ref_grams.values())
        if pred_total == 0 or ref_total == 0:
            return 0.0
        overlap = sum((pred_grams & ref_grams).values())
        return _f1(overlap / pred_total, overlap / ref_total)
    raise ValueError(f"unknown rouge variant {variant!r}")


def bleu4(pred: str, ref: str) -> float:
    """Sentence BLEU with 1-4 gram modified precisions and brevity penalty.

    Zero numerators (and empty n-gram sets on short predictions) get add-one
    smoothing so a single missing order does not zero the whole score.
    Identical nonempty strings score 1.0; an empty prediction scores 0.0.
    """
    pred_tokens = tokenize(pred)
    ref_tokens = tokenize(ref)
    if not pred_tokens:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        pred_grams = _ngrams(pred_tokens, n)
        ref_grams = _ngrams(ref_tokens, n)
        total = sum(pred_grams.values())
        matched = sum((pred_grams & ref_grams).values())
        if matched == 0:
            precision = (matched + 1) / (total + 1)
        else:
            precision = matched / total
        log_sum += math.log(precision)
    score = math.exp(log_sum / 4)
    if len(pred_tokens) < len(ref_tokens):
        score *= math.exp(1 - len(ref_tokens) / len(pred_tokens))
    return score


# ---------------------------------------------------------------------------
# Structured metrics
# ---------------------------------------------------------------------------

def _normalize_state(state: DialogueState) -> frozenset:
    def norm(value: str) -> str:
        return " ".join(value.split()).casefold()

    return frozenset((d, s, norm(v)) for d, s, v in state.triples())


def jga(pairs: Sequence[Tuple[DialogueState, DialogueState]]) -> float:
    """Joint goal accuracy: exact state-set match after value normalization
    (case fold, trim, collapse runs of whitespace). Empty input scores 0.0."""
    if not pairs:
        return 0.0
    hits = sum(
        1 for gold, pred in pairs if _normalize_state(gold) == _normalize_state(pred)
    )
    return hits / len(pairs)


def _fill_defaults(calls: Sequence[ApiCall], registry: FunctionRegistry) -> List[ApiCall]:
    filled = []
    for call in calls:
        schema = registry.get(call.name)
        if schema is None:
            filled.append(call)
            continue
        args = dict(call.args)
        for param in schema.params:
            if param.name not in args and param.has_default:
                args[param.name] = param.default
        filled.append(ApiCall(call.name, tuple(args.items())))
    return filled


@dataclass(frozen=True)
class MetricReport:
    metric: str
    aggregate: float
    per_record: Tuple[Tuple[str, float], ...] = ()


def ast_accuracy(
    records: Sequence[EvalRecord],
    policy: CallMatchPolicy = DEFAULT_POLICY,
    registry: FunctionRegistry | None = None,
) -> MetricReport:
    """Fraction of records whose predicted calls match gold structurally.

    With a registry, absent optional parameters are filled from schema
    defaults on both sides before comparison, so omitting a default-valued
    argument is not penalized.
    """
    scores: List[Tuple[str, float]] = []
    for record in records:
        if record.kind != "calls":
            raise BadEvalRecord(f"record {record.id!r} is not a calls record")
        gold, pred = list(record.gold), list(record.predicted)
        if registry is not None:
            gold = _fill_defaults(gold, registry)
            pred = _fill_defaults(pred, registry)
        scores.append((record.id, 1.0 if match_call_sets(pred, gold, policy) else 0.0))
    aggregate = sum(v for _, v in scores) / len(scores) if scores else 0.0
    return MetricReport("ast_accuracy", aggregate, tuple(scores))


def relevance_detection(
    records: Sequence[EvalRecord],
) -> Tuple[Optional[float], Optional[float]]:
    """(relevance accuracy, irrelevance accuracy).

    Gold abstain=True marks a record as gold-irrelevant. Relevance accuracy
    is the fraction of gold-relevant records where the model called;
    irrelevance accuracy the fraction of gold-irrelevant records where it
    abstained. A side with no records reports None.
    """
    relevant_total = relevant_hit = irrelevant_total = irrelevant_hit = 0
    for record in records:
        if record.kind != "abstain":
            raise BadEvalRecord(f"record {record.id!r} is not an abstain record")
        if record.gold:
            irrelevant_total += 1
            if record.predicted:
                irrelevant_hit += 1
        else:
            relevant_total += 1
            if not record.predicted:
                relevant_hit += 1
    relevance = relevant_hit / relevant_total if relevant_total else None
    irrelevance = irrelevant_hit / irrelevant_total if irrelevant_total else None
    return relevance, irrelevance


# ---------------------------------------------------------------------------
# Transcript files
# ---------------------------------------------------------------------------

def _calls_from_doc(doc: Any) -> List[ApiCall]:
    return [ApiCall(c["name"], tuple(c.get("arguments", {}).items())) for c in doc]


def _state_from_doc(doc: Any) -> DialogueState:
    domain = doc["domain"]
    return DialogueState(
        (domain, slot, value if isinstance(value, str) else json.dumps(value))
        for slot, value in doc.get("slot_values", {}).items()
    )


def eval_record_from_doc(doc: Mapping[str, Any]) -> EvalRecord:
    kind = doc.get("kind")
    if kind not in EVAL_KINDS:
        raise BadEvalRecord(f"record {doc.get('id')!r} has unknown kind {kind!r}")
    convert = {
        "calls": _calls_from_doc,
        "state": _state_from_doc,
        "text": str,
        "abstain": bool,
    }[kind]
    return EvalRecord(
        id=str(doc.get("id", "")),
        kind=kind,
        gold=convert(doc["gold"]),
        predicted=convert(doc["predicted"]),
        level_tag=doc.get("level"),
    )


def read_eval_records(path: str | Path) -> List[EvalRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(eval_record_from_doc(json.loads(line)))
    return records


def evaluate_transcripts(
    records: Sequence[EvalRecord],
    policy: CallMatchPolicy = DEFAULT_POLICY,
    registry: FunctionRegistry | None = None,
) -> Dict[str, Any]:
    """Run every applicable metric over a mixed record set.

    Text metrics also break out per level tag when tags are present.
    Returns a JSON-ready report document.
    """
    by_kind: Dict[str, List[EvalRecord]] = {k: [] for k in EVAL_KINDS}
    for record in records:
        by_kind[record.kind].append(record)
    report: Dict[str, Any] = {"record_counts": {k: len(v) for k, v in by_kind.items()}}

    if by_kind["state"]:
        pairs = [(r.gold, r.predicted) for r in by_kind["state"]]
        report["jga"] = jga(pairs)
    if by_kind["calls"]:
        report["ast_accuracy"] = ast_accuracy(by_kind["calls"], policy, registry).aggregate
    if by_kind["text"]:
        def text_scores(subset: Sequence[EvalRecord]) -> Dict[str, float]:
            n = len(subset)
            return {
                "rouge_l": sum(rouge(r.predicted, r.gold, "L") for r in subset) / n,
                "rouge_1": sum(rouge(r.predicted, r.gold, "1") for r in subset) / n,
                "rouge_2": sum(rouge(r.predicted, r.gold, "2") for r in subset) / n,
                "bleu_4": sum(bleu4(r.predicted, r.gold) for r in subset) / n,
            }

        report["text"] = text_scores(by_kind["text"])
        levels = sorted({r.level_tag for r in by_kind["text"] if r.level_tag})
        if levels:
            report["text_by_level"] = {
                level: text_scores([r for r in by_kind["text"] if r.level_tag == level])
                for level in levels
            }
    if by_kind["abstain"]:
        relevance, irrelevance = relevance_detection(by_kind["abstain"])
        report["relevance_detection"] = {
            "relevance": relevance,
            "irrelevance": irrelevance,
        }
    return report
