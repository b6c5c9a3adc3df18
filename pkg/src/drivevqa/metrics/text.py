"""Corpus text metrics: BLEU-1..4, ROUGE-L and CIDEr.

All three share one tokenization: lowercase, every ASCII punctuation
character becomes its own token, whitespace separates the rest. Splitting
punctuation means "1043.2" contributes the tokens ("1043", ".", "2"), which
is what makes these metrics sensitive to the integer and decimal parts of
coordinate values separately.
"""

from __future__ import annotations

import math
import string
import warnings
from collections import Counter
from typing import Sequence

from .pairs import EvalPair

MAX_NGRAM_ORDER = 4
ROUGE_BETA = 1.2
CIDER_SCALE = 10.0


class EmptyCorpus(ValueError):
    pass


class DegenerateCorpusWarning(RuntimeWarning):
    """Every reference n-gram appears in every document, so all IDF weights
    vanish and CIDEr is 0 by definition."""


_PUNCT = frozenset(string.punctuation)


def tokenize(text: str) -> list[str]:
    """Lowercase, split punctuation into separate tokens, collapse whitespace."""
    tokens: list[str] = []
    word: list[str] = []
    for ch in text.lower():
        if ch.isspace() or ch in _PUNCT:
            if word:
                tokens.append("".join(word))
                word.clear()
            if ch in _PUNCT:
                tokens.append(ch)
        else:
            word.append(ch)
    if word:
        tokens.append("".join(word))
    return tokens


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1))


def _require_pairs(pairs: Sequence[EvalPair]) -> None:
    if not pairs:
        raise EmptyCorpus("no prediction/reference pairs to score")


def bleu_scores(pairs: Sequence[EvalPair], smooth_eps: float = 0.0) -> tuple[float, float, float, float]:
    """Corpus-level BLEU-1..4.

    Clipped n-gram matches and candidate counts are summed over the whole
    corpus; BLEU-n is the geometric mean of the order-1..n precisions times
    the brevity penalty exp(1 - r/c) when the candidate total c falls short
    of the reference total r (closest reference length per pair). Unsmoothed
    by default: any zero precision zeroes the score; ``smooth_eps`` adds a
    small count to both sides of each precision instead.
    """
    _require_pairs(pairs)
    matches = [0] * MAX_NGRAM_ORDER
    guesses = [0] * MAX_NGRAM_ORDER
    cand_len = 0
    ref_len = 0
    for pair in pairs:
        cand = tokenize(pair.prediction)
        refs = [tokenize(r) for r in pair.references]
        cand_len += len(cand)
        ref_len += min((abs(len(r) - len(cand)), len(r)) for r in refs)[1]
        for order in range(1, MAX_NGRAM_ORDER + 1):
            counts = _ngram_counts(cand, order)
            max_ref: Counter = Counter()
            for ref in refs:
                for ngram, count in _ngram_counts(ref, order).items():
                    max_ref[ngram] = max(max_ref[ngram], count)
            matches[order - 1] += sum(min(c, max_ref[g]) for g, c in counts.items())
            guesses[order - 1] += sum(counts.values())

    if cand_len == 0:
        return (0.0, 0.0, 0.0, 0.0)
    bp = math.exp(1.0 - ref_len / cand_len) if cand_len < ref_len else 1.0

    scores = []
    log_sum = 0.0
    dead = False
    for order in range(1, MAX_NGRAM_ORDER + 1):
        num = matches[order - 1] + smooth_eps
        den = guesses[order - 1] + smooth_eps
        if num <= 0.0 or den <= 0.0:
            dead = True
        else:
            log_sum += math.log(num / den)
        scores.append(0.0 if dead else bp * math.exp(log_sum / order))
    return tuple(scores)  # type: ignore[return-value]


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l_score(pairs: Sequence[EvalPair], beta: float = ROUGE_BETA) -> float:
    """Mean LCS F-score over the corpus.

    Per pair: P = LCS/|pred| and R = LCS/|ref|, each maximized over the
    references, then F = (1 + beta^2) P R / (R + beta^2 P); 0 whenever there
    is no common subsequence.
    """
    _require_pairs(pairs)
    total = 0.0
    for pair in pairs:
        cand = tokenize(pair.prediction)
        best_p = 0.0
        best_r = 0.0
        for ref_text in pair.references:
            ref = tokenize(ref_text)
            lcs = _lcs_length(cand, ref)
            if cand:
                best_p = max(best_p, lcs / len(cand))
            if ref:
                best_r = max(best_r, lcs / len(ref))
        if best_p > 0.0 and best_r > 0.0:
            total += (1 + beta ** 2) * best_p * best_r / (best_r + beta ** 2 * best_p)
    return total / len(pairs)


def cider_score(pairs: Sequence[EvalPair], scale: float = CIDER_SCALE) -> float:
    """Consensus TF-IDF n-gram similarity, averaged over n = 1..4 and scaled.

    IDF weights come from the reference side: an n-gram's document frequency
    is the number of pairs whose references mention it, and its weight is
    log(N / df). Per pair the prediction vector is compared against each
    reference vector by cosine similarity, averaged over references and over
    the four n-gram orders.
    """
    _require_pairs(pairs)
    if len(pairs) < 2:
        raise EmptyCorpus("document frequencies need at least 2 pairs")
    n_docs = len(pairs)

    doc_freq: list[Counter] = [Counter() for _ in range(MAX_NGRAM_ORDER)]
    for pair in pairs:
        seen: list[set] = [set() for _ in range(MAX_NGRAM_ORDER)]
        for ref_text in pair.references:
            ref = tokenize(ref_text)
            for order in range(1, MAX_NGRAM_ORDER + 1):
                seen[order - 1].update(_ngram_counts(ref, order))
        for order_seen, freq in zip(seen, doc_freq):
            for ngram in order_seen:
                freq[ngram] += 1

    def idf(order: int, ngram: tuple) -> float:
        # n-grams absent from every reference document count as df = 1.
        return math.log(n_docs / max(doc_freq[order - 1][ngram], 1))

    if all(idf(order, g) == 0.0 for order in range(1, MAX_NGRAM_ORDER + 1)
           for g in doc_freq[order - 1]):
        warnings.warn("all reference n-grams appear in every document; CIDEr is 0",
                      DegenerateCorpusWarning, stacklevel=2)
        return 0.0

    def vectorize(tokens: Sequence[str]) -> list[dict]:
        vecs = []
        for order in range(1, MAX_NGRAM_ORDER + 1):
            vecs.append({g: c * idf(order, g)
                         for g, c in _ngram_counts(tokens, order).items()})
        return vecs

    def cosine(u: dict, w: dict) -> float:
        nu = math.sqrt(sum(x * x for x in u.values()))
        nw = math.sqrt(sum(x * x for x in w.values()))
        if nu == 0.0 or nw == 0.0:
            return 0.0
        dot = sum(x * w[g] for g, x in u.items() if g in w)
        return dot / (nu * nw)

    total = 0.0
    for pair in pairs:
        cand_vecs = vectorize(tokenize(pair.prediction))
        ref_vec_sets = [vectorize(tokenize(r)) for r in pair.references]
        per_order = 0.0
        for order in range(MAX_NGRAM_ORDER):
            sim = sum(cosine(cand_vecs[order], rv[order]) for rv in ref_vec_sets)
            per_order += sim / len(ref_vec_sets)
        total += scale * per_order / MAX_NGRAM_ORDER
    return total / len(pairs)
