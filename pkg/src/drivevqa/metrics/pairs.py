"""Prediction/reference pairs and the JSON-lines files they come from."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable


@dataclass(frozen=True)
class EvalPair:
    """One scored unit: a prediction against one or more references."""

    question_id: str
    category: str
    prediction: str
    references: tuple[str, ...]
    closed_form: bool = False
    question: str = ""

    def __post_init__(self) -> None:
        if not self.references:
            raise ValueError(f"pair {self.question_id}: references must be non-empty")


@dataclass
class JoinDiagnostics:
    """Question ids that failed to pair up across the two input files."""

    unmatched_predictions: list[str] = field(default_factory=list)
    unmatched_references: list[str] = field(default_factory=list)


def read_predictions(fp: IO[str]) -> dict[str, str]:
    """Read {"question_id", "prediction"} JSON-lines into an id -> text map."""
    out: dict[str, str] = {}
    for line in fp:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        out[str(obj["question_id"])] = obj["prediction"]
    return out


def read_references(fp: IO[str]) -> list[dict]:
    """Read reference JSON-lines; each object keeps its raw fields."""
    out = []
    for line in fp:
        line = line.strip()
        if not line:
            continue
        out.append(json.loads(line))
    return out


def join_pairs(
    predictions: dict[str, str],
    references: Iterable[dict],
    diagnostics: JoinDiagnostics | None = None,
) -> list[EvalPair]:
    """Join the two files on question_id, in reference-file order."""
    pairs = []
    seen = set()
    for ref in references:
        qid = str(ref["question_id"])
        seen.add(qid)
        if qid not in predictions:
            if diagnostics is not None:
                diagnostics.unmatched_references.append(qid)
            continue
        pairs.append(EvalPair(
            question_id=qid,
            category=ref.get("category", ""),
            prediction=predictions[qid],
            references=tuple(ref["references"]),
            closed_form=bool(ref.get("closed_form", False)),
            question=ref.get("question", ""),
        ))
    if diagnostics is not None:
        diagnostics.unmatched_predictions.extend(
            qid for qid in predictions if qid not in seen)
    return pairs
