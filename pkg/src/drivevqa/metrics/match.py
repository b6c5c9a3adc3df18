"""The coordinate match metric: how many reference tags a prediction hits."""

from __future__ import annotations

import math
from typing import Sequence

from ..spaces import CoordSpace
from ..tags import KeyObjectTag, parse_key_object_tags
from .pairs import EvalPair

DEFAULT_MATCH_THRESHOLD_PX = 16.0


class NoReferenceTags(ValueError):
    pass


def match_score(
    pairs: Sequence[EvalPair],
    threshold_px: float = DEFAULT_MATCH_THRESHOLD_PX,
    space: CoordSpace | None = None,
    diagnostics: list[str] | None = None,
) -> float:
    """Percentage of reference tags matched by a predicted tag.

    Per pair, reference tags (taken from the first reference text) are
    matched greedily and one-to-one: each, in document order, claims the
    nearest still-unclaimed predicted tag on the same camera within
    ``threshold_px`` Euclidean distance. Both sides must already be in the
    same coordinate space; when ``space`` is given, out-of-bounds tags are
    reported to ``diagnostics`` but still allowed to match.

    Pairs whose references carry no tags contribute nothing.

    Raises:
        NoReferenceTags: if the whole corpus has zero reference tags.
    """
    matched = 0
    total = 0
    for pair in pairs:
        ref_tags = parse_key_object_tags(pair.references[0])
        if not ref_tags:
            continue
        pred_tags = parse_key_object_tags(pair.prediction)
        if space is not None and diagnostics is not None:
            for side, tags in (("reference", ref_tags), ("prediction", pred_tags)):
                for tag in tags:
                    if not space.contains(tag.x, tag.y):
                        diagnostics.append(
                            f"{pair.question_id}: {side} tag {tag.id} at "
                            f"({tag.x}, {tag.y}) outside {space.kind.value} bounds")
        total += len(ref_tags)
        matched += _greedy_matches(ref_tags, pred_tags, threshold_px)
    if total == 0:
        raise NoReferenceTags("no reference tags anywhere in the corpus")
    return 100.0 * matched / total


def _greedy_matches(
    ref_tags: Sequence[KeyObjectTag],
    pred_tags: Sequence[KeyObjectTag],
    threshold_px: float,
) -> int:
    used = [False] * len(pred_tags)
    hits = 0
    for ref in ref_tags:
        best = None
        best_dist = math.inf
        for i, pred in enumerate(pred_tags):
            if used[i] or pred.camera is not ref.camera:
                continue
            dist = math.hypot(pred.x - ref.x, pred.y - ref.y)
            if dist <= threshold_px and dist < best_dist:
                best = i
                best_dist = dist
        if best is not None:
            used[best] = True
            hits += 1
    return hits
