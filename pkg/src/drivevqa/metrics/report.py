"""Corpus evaluation: closed-form accuracy, the weighted final score, and
the one-call runner that fills a full metric report."""

from __future__ import annotations

import string
from dataclasses import dataclass, field, fields
from typing import Mapping, Sequence

from ..spaces import CoordSpace
from .judge import JudgeClient, judge_scores
from .match import DEFAULT_MATCH_THRESHOLD_PX, match_score
from .pairs import EvalPair
from .text import (CIDER_SCALE, ROUGE_BETA, EmptyCorpus, bleu_scores,
                   cider_score, rouge_l_score)


class EmptySelection(ValueError):
    pass


class WeightMismatch(ValueError):
    pass


class AllMetricsFailed(RuntimeError):
    pass


def _normalize_choice(text: str) -> str:
    out = text.strip().lower()
    return out.rstrip(string.punctuation).strip()


def accuracy_score(pairs: Sequence[EvalPair]) -> float:
    """Exact-match rate on closed-form answers (choice letters, yes/no).

    Both sides are trimmed, lowercased and stripped of trailing punctuation
    before comparison, so "A." matches "a". A prediction is correct when it
    matches any reference.

    Raises:
        EmptySelection: if no pairs are given.
    """
    if not pairs:
        raise EmptySelection("no closed-form pairs to score")
    correct = sum(
        1 for p in pairs
        if _normalize_choice(p.prediction) in {_normalize_choice(r) for r in p.references})
    return correct / len(pairs)


DEFAULT_DIVISORS: Mapping[str, float] = {
    "accuracy": 1.0,
    "judge": 100.0,
    "bleu_1": 1.0,
    "bleu_2": 1.0,
    "bleu_3": 1.0,
    "bleu_4": 1.0,
    "rouge_l": 1.0,
    "cider": CIDER_SCALE,
    "match": 100.0,
    "language": 1.0,
}

# Approximate challenge convention; the official aggregation is not public.
DEFAULT_WEIGHTS: Mapping[str, float] = {
    "judge": 0.4,
    "accuracy": 0.2,
    "match": 0.2,
    "language": 0.2,
}


@dataclass(frozen=True)
class ScoreWeights:
    """Per-metric weights plus the divisor normalizing each metric to [0, 1]."""

    weights: Mapping[str, float]
    divisors: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_DIVISORS))

    def __post_init__(self) -> None:
        for name, w in self.weights.items():
            if w < 0:
                raise WeightMismatch(f"negative weight for {name}")
            if w > 0 and self.divisors.get(name, 0) <= 0:
                raise WeightMismatch(f"metric {name} needs a positive divisor")
        total = sum(self.weights.values())
        if abs(total - 1.0) > 1e-9:
            raise WeightMismatch(f"weights must sum to 1, got {total}")

    @classmethod
    def default(cls) -> ScoreWeights:
        return cls(dict(DEFAULT_WEIGHTS))

    @classmethod
    def without(cls, *names: str) -> ScoreWeights:
        """Default weights with some metrics dropped and the rest renormalized."""
        kept = {k: v for k, v in DEFAULT_WEIGHTS.items() if k not in names}
        total = sum(kept.values())
        if total <= 0:
            raise WeightMismatch(f"dropping {names} leaves no weighted metric")
        return cls({k: v / total for k, v in kept.items()})

    @classmethod
    def from_json(cls, obj: Mapping) -> ScoreWeights:
        divisors = dict(DEFAULT_DIVISORS)
        divisors.update(obj.get("divisors", {}))
        return cls(dict(obj["weights"]), divisors)

    def to_json(self) -> dict:
        return {"weights": dict(self.weights), "divisors": dict(self.divisors)}


_RANGES: Mapping[str, tuple[float, float]] = {
    "accuracy": (0.0, 1.0),
    "judge": (0.0, 100.0),
    "bleu_1": (0.0, 1.0),
    "bleu_2": (0.0, 1.0),
    "bleu_3": (0.0, 1.0),
    "bleu_4": (0.0, 1.0),
    "rouge_l": (0.0, 1.0),
    "cider": (0.0, float("inf")),
    "match": (0.0, 100.0),
    "language": (0.0, 1.0),
    "final": (0.0, 1.0),
}


@dataclass
class MetricReport:
    """Corpus scores; a None field means that metric did not run."""

    accuracy: float | None = None
    judge: float | None = None
    bleu_1: float | None = None
    bleu_2: float | None = None
    bleu_3: float | None = None
    bleu_4: float | None = None
    rouge_l: float | None = None
    cider: float | None = None
    match: float | None = None
    language: float | None = None
    final: float | None = None
    diagnostics: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        for name, (lo, hi) in _RANGES.items():
            value = getattr(self, name)
            if value is not None and not lo <= value <= hi:
                raise ValueError(f"{name}={value} outside [{lo}, {hi}]")

    def metric_values(self) -> dict[str, float | None]:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name != "diagnostics"}

    def to_json(self) -> dict:
        return {"metrics": self.metric_values(), "diagnostics": list(self.diagnostics)}


def aggregate_final_score(report: MetricReport, weights: ScoreWeights) -> float:
    """Dot product of the weighted, divisor-normalized metrics. No hidden terms.

    Raises:
        WeightMismatch: if a metric with positive weight is absent.
    """
    final = 0.0
    for name, weight in weights.weights.items():
        if weight == 0:
            continue
        value = getattr(report, name, None)
        if value is None:
            raise WeightMismatch(f"metric {name} has weight {weight} but was not computed")
        final += weight * (value / weights.divisors[name])
    return final


@dataclass
class EvalConfig:
    """What to run and how to aggregate it."""

    weights: ScoreWeights = field(default_factory=ScoreWeights.default)
    disabled: frozenset[str] = frozenset()
    judge_client: JudgeClient | None = None
    judge_retries: int = 2
    judge_jobs: int = 4
    match_threshold_px: float = DEFAULT_MATCH_THRESHOLD_PX
    match_space: CoordSpace | None = None
    rouge_beta: float = ROUGE_BETA
    cider_scale: float = CIDER_SCALE
    bleu_smooth_eps: float = 0.0


def evaluate_corpus(pairs: Sequence[EvalPair], config: EvalConfig | None = None) -> MetricReport:
    """Run every enabled metric over the corpus and aggregate the final score.

    Metric failures become diagnostics and leave the field None; only if
    every enabled metric fails does the call raise. With the stub judge the
    whole report is deterministic.

    Raises:
        EmptyCorpus: on an empty pair list.
        AllMetricsFailed: if nothing could be computed at all.
    """
    if not pairs:
        raise EmptyCorpus("no pairs to evaluate")
    config = config or EvalConfig()
    report = MetricReport()
    attempted = 0
    succeeded = 0

    def enabled(name: str) -> bool:
        return name not in config.disabled

    def run(name: str, compute) -> None:
        nonlocal attempted, succeeded
        attempted += 1
        try:
            compute()
            succeeded += 1
        except (ValueError, RuntimeError) as exc:
            report.diagnostics.append(f"{name}: {exc}")

    if enabled("accuracy"):
        closed = [p for p in pairs if p.closed_form]
        run("accuracy", lambda: setattr(report, "accuracy", accuracy_score(closed)))
    if enabled("bleu"):
        def compute_bleu() -> None:
            b1, b2, b3, b4 = bleu_scores(pairs, config.bleu_smooth_eps)
            report.bleu_1, report.bleu_2, report.bleu_3, report.bleu_4 = b1, b2, b3, b4
        run("bleu", compute_bleu)
    if enabled("rouge_l"):
        run("rouge_l", lambda: setattr(report, "rouge_l", rouge_l_score(pairs, config.rouge_beta)))
    if enabled("cider"):
        run("cider", lambda: setattr(report, "cider", cider_score(pairs, config.cider_scale)))
    if enabled("match"):
        run("match", lambda: setattr(report, "match", match_score(
            pairs, config.match_threshold_px, config.match_space, report.diagnostics)))
    if enabled("judge") and config.judge_client is not None:
        run("judge", lambda: setattr(report, "judge", judge_scores(
            pairs, config.judge_client, config.judge_retries, config.judge_jobs,
            report.diagnostics)))

    if attempted and not succeeded:
        raise AllMetricsFailed("; ".join(report.diagnostics))

    if report.bleu_4 is not None and report.rouge_l is not None and report.cider is not None:
        cider_unit = report.cider / weights_divisor(config.weights, "cider")
        report.language = (report.bleu_4 + report.rouge_l + cider_unit) / 3.0

    try:
        report.final = aggregate_final_score(report, config.weights)
    except WeightMismatch as exc:
        report.diagnostics.append(f"final: {exc}")
    return report


def weights_divisor(weights: ScoreWeights, name: str) -> float:
    return weights.divisors.get(name, DEFAULT_DIVISORS[name])
