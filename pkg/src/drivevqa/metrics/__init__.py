"""Scoring for prediction/reference corpora: text metrics, coordinate match,
judge grading and the weighted final score."""

from .judge import (HttpJudgeClient, JudgeClient, JudgeUnavailable,
                    StubJudgeClient, UnparsableVerdict, judge_scores, parse_verdict)
from .match import DEFAULT_MATCH_THRESHOLD_PX, NoReferenceTags, match_score
from .pairs import EvalPair, JoinDiagnostics, join_pairs, read_predictions, read_references
from .report import (AllMetricsFailed, EmptySelection, EvalConfig, MetricReport,
                     ScoreWeights, WeightMismatch, accuracy_score,
                     aggregate_final_score, evaluate_corpus)
from .text import (CIDER_SCALE, MAX_NGRAM_ORDER, ROUGE_BETA, DegenerateCorpusWarning,
                   EmptyCorpus, bleu_scores, cider_score, rouge_l_score, tokenize)

__all__ = [
    "AllMetricsFailed",
    "CIDER_SCALE",
    "DEFAULT_MATCH_THRESHOLD_PX",
    "DegenerateCorpusWarning",
    "EmptyCorpus",
    "EmptySelection",
    "EvalConfig",
    "EvalPair",
    "HttpJudgeClient",
    "JoinDiagnostics",
    "JudgeClient",
    "JudgeUnavailable",
    "MAX_NGRAM_ORDER",
    "MetricReport",
    "NoReferenceTags",
    "ROUGE_BETA",
    "ScoreWeights",
    "StubJudgeClient",
    "UnparsableVerdict",
    "WeightMismatch",
    "accuracy_score",
    "aggregate_final_score",
    "bleu_scores",
    "cider_score",
    "evaluate_corpus",
    "join_pairs",
    "judge_scores",
    "match_score",
    "parse_verdict",
    "read_predictions",
    "read_references",
    "rouge_l_score",
    "tokenize",
]
