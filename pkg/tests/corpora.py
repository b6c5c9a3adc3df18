"""Fixture corpora shared by the metric tests and the acceptance suite."""

from __future__ import annotations

from drivevqa.metrics import EvalPair


def _pair(qid, pred, refs, closed=False, category="perception"):
    return EvalPair(question_id=qid, category=category, prediction=pred,
                    references=tuple(refs), closed_form=closed)


# Every prediction is its reference, verbatim. Sentences carry at least four
# tokens so every n-gram order is populated.
PERFECT = [
    _pair("p1", "There is a black sedan ahead of the ego vehicle.",
          ["There is a black sedan ahead of the ego vehicle."]),
    _pair("p2", "The pedestrian at <c2,CAM_BACK_LEFT,300.5,420.0> is crossing the road.",
          ["The pedestrian at <c2,CAM_BACK_LEFT,300.5,420.0> is crossing the road."]),
    _pair("p3", "Keep going at the same speed and watch the truck.",
          ["Keep going at the same speed and watch the truck."]),
    _pair("p4", "A", ["A"], closed=True),
    _pair("p5", "yes", ["yes"], closed=True),
    _pair("p6", "Slow down and stop before the crosswalk at <c1,CAM_FRONT,800.0,450.0>.",
          ["Slow down and stop before the crosswalk at <c1,CAM_FRONT,800.0,450.0>."]),
]

# Realistic outputs: paraphrases, near-miss coordinates, one multi-reference
# pair, and a small closed-form subset.
MIXED = [
    _pair("m1", "There is a black sedan to the front of the ego vehicle, "
                "located at <c1,CAM_FRONT,1043.2,82.4>.",
          ["There is a black sedan to the front of the ego vehicle, "
           "located at <c1,CAM_FRONT,1040.0,80.0>."]),
    _pair("m2", "The car is going ahead.", ["Going ahead."]),
    _pair("m3", "a.", ["A"], closed=True),
    _pair("m4", "no", ["Yes"], closed=True),
    _pair("m5", "The ego vehicle should keep going at the same speed.",
          ["Keep going at the same speed.",
           "The ego vehicle keeps going at the same speed because there is no safety issue."]),
    _pair("m6", "There is a pedestrian at <c2,CAM_BACK_LEFT,310.0,428.0> and "
                "a truck at <c3,CAM_BACK,790.0,455.0>.",
          ["There is a pedestrian at <c2,CAM_BACK_LEFT,300.5,420.0> and "
           "a truck at <c3,CAM_BACK,800.0,450.0>."]),
    _pair("m7", "Turn left at the next intersection.",
          ["The ego vehicle turns right at the intersection."]),
    _pair("m8", "The traffic light ahead is green.", ["The traffic light ahead is green."]),
    _pair("m9", "There are two cars at <c4,CAM_FRONT_RIGHT,500.0,300.0> and "
                "<c5,CAM_FRONT_RIGHT,520.0,300.0>.",
          ["There are two cars at <c4,CAM_FRONT_RIGHT,510.0,308.0> and "
           "<c5,CAM_FRONT_RIGHT,700.0,300.0>."]),
    _pair("m10", "B", ["B"], closed=True),
]

# Edge cases: empty prediction, disjoint vocabulary, token repetition, a
# length mismatch in both directions, tags that miss by camera or distance,
# and an exact-threshold hit.
ADVERSARIAL = [
    _pair("a1", "", ["The road is clear ahead of the ego vehicle."]),
    _pair("a2", "zebra quartz niche", ["The bus merges into the left lane."]),
    _pair("a3", "the the the the the", ["the car stopped at the red light"]),
    _pair("a4", "A very long prediction that keeps adding words well beyond "
                "the reference it is compared with.", ["Stopped."]),
    _pair("a5", "Stop.", ["The ego vehicle must come to a complete stop before "
                          "the marked line and wait."]),
    _pair("a6", "Object at <c1,CAM_BACK,100.0,100.0>.",
          ["Object at <c1,CAM_FRONT,100.0,100.0>."]),
    _pair("a7", "Object at <c1,CAM_FRONT,516.0,300.0>.",
          ["Object at <c1,CAM_FRONT,500.0,300.0>."]),
    _pair("a8", "Object at <c1,CAM_FRONT,530.0,300.0>.",
          ["Object at <c1,CAM_FRONT,500.0,300.0>."]),
    _pair("a9", "Tags only in the prediction <c9,CAM_BACK,10.0,20.0>.",
          ["No coordinates here at all."]),
    _pair("a10", "One pred tag <c1,CAM_FRONT,200.0,200.0> for two refs.",
          ["Two tags <c1,CAM_FRONT,200.0,200.0> and <c2,CAM_FRONT,205.0,200.0>."]),
    _pair("a11", "Punctuation, punctuation; punctuation!", ["Punctuation, punctuation."]),
    _pair("a12", "1043.2 looks numeric", ["1043.2 looks numeric indeed"]),
]

ALL_CORPORA = {"perfect": PERFECT, "mixed": MIXED, "adversarial": ADVERSARIAL}


def as_items(pairs):
    """Strip to (prediction, [references]) tuples for the oracle scripts."""
    return [(p.prediction, list(p.references)) for p in pairs]
