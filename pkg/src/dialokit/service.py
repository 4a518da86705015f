"""HTTP annotation backend.

Serves the review queue produced by the pipeline: sampled dialogues with
their automatic validation flags, an append-only score log, and a summary
that folds auto and human results together. JSON only; any UI is a separate
static bundle talking to this API.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

from fastapi import Depends, FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .errors import ToolkitError
from .model import ReactDialogue
from .react import dialogue_from_doc, dialogue_to_doc, render_history
from .validate import HumanScore, InvalidScore, ValidationFlag, ValidationReport
from .validate import ErrorDimension, error_rate_report


class DuplicateScore(ToolkitError):
    """The (dialogue, annotator) pair already has a recorded score."""


class ScoreStore:
    """Append-only JSONL score log; every write is flushed and fsynced."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._scores: List[HumanScore] = []
        self._seen: Set[Tuple[str, str]] = set()
        if self.path.exists():
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    doc = json.loads(line)
                    score = HumanScore(
                        dialogue_id=doc["dialogue_id"],
                        score=doc["score"],
                        annotator=doc["annotator"],
                        feedback=doc.get("feedback", ""),
                        timestamp=doc.get("timestamp", ""),
                    )
                    self._scores.append(score)
                    self._seen.add((score.dialogue_id, score.annotator))

    def append(self, score: HumanScore) -> int:
        """Record one score and return its position in the log."""
        key = (score.dialogue_id, score.annotator)
        with self._lock:
            if key in self._seen:
                raise DuplicateScore(
                    f"{score.annotator!r} already scored {score.dialogue_id!r}"
                )
            doc = {
                "dialogue_id": score.dialogue_id,
                "score": score.score,
                "annotator": score.annotator,
                "feedback": score.feedback,
                "timestamp": score.timestamp,
            }
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(doc, ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._scores.append(score)
            self._seen.add(key)
            return len(self._scores) - 1

    def scores(self) -> List[HumanScore]:
        with self._lock:
            return list(self._scores)

    def scored_by(self, annotator: str) -> Set[str]:
        with self._lock:
            return {s.dialogue_id for s in self._scores if s.annotator == annotator}

    def has(self, dialogue_id: str, annotator: str) -> bool:
        with self._lock:
            return (dialogue_id, annotator) in self._seen


def record_score(store: ScoreStore, score: HumanScore) -> int:
    """Append one human score; raises DuplicateScore on a repeat pair."""
    return store.append(score)


class ScoreIn(BaseModel):
    dialogue_id: str
    score: int = Field(ge=0, le=1)
    annotator: str = Field(min_length=1)
    feedback: str = ""
    timestamp: str = ""


def _flag_doc(flag: ValidationFlag) -> Dict[str, object]:
    return {
        "dimension": flag.dimension.value,
        "turn_index": flag.turn_index,
        "detail": flag.detail,
    }


def load_run_dir(run_dir: str | Path):
    """Read dialogues, reports, and the review sample from a pipeline run."""
    run_dir = Path(run_dir)
    dialogues: Dict[str, ReactDialogue] = {}
    with open(run_dir / "dialogues.jsonl", "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                dialogue = dialogue_from_doc(json.loads(line))
                dialogues[dialogue.id] = dialogue
    reports: Dict[str, ValidationReport] = {}
    with open(run_dir / "validation_reports.jsonl", "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            doc = json.loads(line)
            flags = tuple(
                ValidationFlag(
                    dimension=ErrorDimension(f["dimension"]),
                    turn_index=f["turn_index"],
                    detail=f["detail"],
                )
                for f in doc["flags"]
            )
            report = ValidationReport(dialogue_id=doc["dialogue_id"], flags=flags)
            reports[report.dialogue_id] = report
    sample_doc = json.loads((run_dir / "review_sample.json").read_text("utf-8"))
    queue: List[str] = list(sample_doc["ids"])
    return dialogues, reports, queue


def create_app(
    run_dir: str | Path,
    token: Optional[str] = None,
    score_log: Optional[str | Path] = None,
) -> FastAPI:
    """Build the annotation service over one pipeline output directory."""
    run_dir = Path(run_dir)
    dialogues, reports, queue = load_run_dir(run_dir)
    store = ScoreStore(score_log or run_dir / "scores.jsonl")

    app = FastAPI(title="dialogue annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.queue = queue

    if token:
        from fastapi import Header

        async def require_token(
            x_annotation_token: Optional[str] = Header(default=None),
        ):
            if x_annotation_token != token:
                raise HTTPException(status_code=401, detail="bad or missing token")

        guard = [Depends(require_token)]
    else:
        guard = []

    @app.get("/api/health", dependencies=guard)
    def health():
        return {"status": "ok", "sampled": len(queue)}

    @app.get("/api/samples/next", dependencies=guard)
    def next_sample(annotator: str = Query(min_length=1)):
        done = store.scored_by(annotator)
        for position, dialogue_id in enumerate(queue):
            if dialogue_id in done:
                continue
            dialogue = dialogues[dialogue_id]
            report = reports[dialogue_id]
            return {
                "dialogue_id": dialogue_id,
                "position": position,
                "total": len(queue),
                "scored": len(done),
                "trace": render_history(dialogue, len(dialogue.turns)),
                "auto_score": report.auto_score,
                "flags": [_flag_doc(f) for f in report.flags],
            }
        return Response(status_code=204)

    @app.post("/api/scores", status_code=201, dependencies=guard)
    def post_score(payload: ScoreIn):
        if payload.dialogue_id not in dialogues:
            raise HTTPException(status_code=404, detail="unknown dialogue id")
        try:
            score = HumanScore(
                dialogue_id=payload.dialogue_id,
                score=payload.score,
                annotator=payload.annotator,
                feedback=payload.feedback,
                timestamp=payload.timestamp,
            )
        except InvalidScore as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        try:
            position = record_score(store, score)
        except DuplicateScore as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return {"position": position, "dialogue_id": score.dialogue_id}

    @app.get("/api/summary", dependencies=guard)
    def summary():
        humans = store.scores()
        folded = error_rate_report(list(reports.values()), humans)
        annotators = sorted({s.annotator for s in humans})
        return {
            "sampled": len(queue),
            "scored": len(humans),
            "annotators": annotators,
            "auto_error_rate": folded.auto_error_rate,
            "human_error_rate": folded.human_error_rate,
            "dimension_counts": dict(folded.dimension_counts),
            "feedback": list(folded.feedback),
        }

    @app.get("/api/dialogues/{dialogue_id}", dependencies=guard)
    def dialogue_detail(dialogue_id: str):
        if dialogue_id not in dialogues:
            raise HTTPException(status_code=404, detail="unknown dialogue id")
        dialogue = dialogues[dialogue_id]
        report = reports[dialogue_id]
        return {
            "dialogue_id": dialogue_id,
            "trace": render_history(dialogue, len(dialogue.turns)),
            "doc": dialogue_to_doc(dialogue),
            "auto_score": report.auto_score,
            "flags": [_flag_doc(f) for f in report.flags],
        }

    return app
