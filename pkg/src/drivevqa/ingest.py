"""Dataset normalization: adapters, per-frame QA compression, grounding QA
synthesis and training-sample assembly."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Mapping

from .cameras import CameraView
from .records import CATEGORIES, QARecord, QATurn
from .spaces import CoordSpace
from .stitch import CoordinatePolicy, StitchLayout, transform_tags_in_text
from .tags import DEFAULT_TAG_SPACE, KeyObjectTag, parse_key_object_tags, render_key_object_tag

# Instruction prepended to every training sample: it fixes the 3x2 view
# layout the stitched composite uses.
SYSTEM_PROMPT = (
    "You are an Autonomous Driving AI assistant. You receive an image that "
    "consists of six surrounding camera views. The layout is as follows: The "
    "first row contains three images: FRONT LEFT, FRONT, FRONT RIGHT. The "
    "second row contains three images: BACK LEFT, BACK, BACK RIGHT. Your "
    "task is to analyze these images and provide insights or actions based "
    "on the visual data."
)


class SchemaError(ValueError):
    """An input file node does not match the adapter's documented schema."""

    def __init__(self, location: str, expected: str, found: str) -> None:
        super().__init__(f"at {location}: expected {expected}, found {found}")
        self.location = location
        self.expected = expected
        self.found = found


class InvalidBBox(ValueError):
    pass


@dataclass(frozen=True)
class GroundingAnnotation:
    """A 2D box for one object in one camera frame, in original pixels."""

    frame_id: str
    camera: CameraView
    object_id: str
    bbox: tuple[float, float, float, float]
    category: str


@dataclass(frozen=True)
class TrainingSample:
    """One conversation ready for supervised training.

    ``answer_coord_spans[i]`` holds the character ranges, within turn i's
    answer text, that spell tag x/y values; the location loss masks exactly
    these substrings.
    """

    system_prompt: str
    image_ref: str
    conversation: tuple[QATurn, ...]
    answer_coord_spans: tuple[tuple[tuple[int, int], ...], ...]


# The four QA sections a DriveLM scene file may carry, in the order records
# are emitted per frame.
_DRIVELM_SECTIONS = ("perception", "prediction", "planning", "behavior")


def load_drivelm_records(
    fp: IO[str],
    source: str = "drivelm",
    space: CoordSpace = DEFAULT_TAG_SPACE,
) -> Iterator[QARecord]:
    """Normalize a DriveLM scene file into one record per QA pair.

    Expected schema (extra keys are ignored)::

        { "<scene_id>": { "key_frames": { "<frame_id>": { "QA": {
              "perception": [ {"Q": str, "A": str}, ... ],
              "prediction": [...], "planning": [...], "behavior": [...]
        }}}}}

    Records stream out as the document is walked; a SchemaError raised at a
    malformed node does not retract previously yielded records.
    """
    try:
        doc = json.load(fp)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", "valid JSON", str(exc)) from exc
    if not isinstance(doc, dict):
        raise SchemaError("$", "object of scenes", _type_name(doc))
    for scene_id, scene in doc.items():
        scene_loc = f"$.{scene_id}"
        if not isinstance(scene, dict):
            raise SchemaError(scene_loc, "object", _type_name(scene))
        frames = scene.get("key_frames")
        if not isinstance(frames, dict):
            raise SchemaError(f"{scene_loc}.key_frames", "object of frames", _type_name(frames))
        for frame_id, frame in frames.items():
            frame_loc = f"{scene_loc}.key_frames.{frame_id}"
            if not isinstance(frame, dict):
                raise SchemaError(frame_loc, "object", _type_name(frame))
            qa = frame.get("QA")
            if not isinstance(qa, dict):
                raise SchemaError(f"{frame_loc}.QA", "object of QA sections", _type_name(qa))
            for section in _DRIVELM_SECTIONS:
                items = qa.get(section, [])
                if not isinstance(items, list):
                    raise SchemaError(f"{frame_loc}.QA.{section}", "list", _type_name(items))
                for i, item in enumerate(items):
                    item_loc = f"{frame_loc}.QA.{section}[{i}]"
                    if not isinstance(item, dict):
                        raise SchemaError(item_loc, "object", _type_name(item))
                    question = item.get("Q")
                    if not isinstance(question, str):
                        raise SchemaError(f"{item_loc}.Q", "string", _type_name(question))
                    answer = item.get("A")
                    if not isinstance(answer, str):
                        raise SchemaError(f"{item_loc}.A", "string", _type_name(answer))
                    yield QARecord.build(scene_id, frame_id, section,
                                         [QATurn(question, answer)], source, space)


def _type_name(value: object) -> str:
    return "missing" if value is None else type(value).__name__


def compress_frame_qas(
    records: Iterable[QARecord],
    space: CoordSpace = DEFAULT_TAG_SPACE,
) -> Iterator[QARecord]:
    """Merge all records of one frame into a single multi-turn record.

    Turns keep their input order; the total turn count is conserved; tags
    are re-derived from the merged turn texts. Frames come out in
    first-appearance order. The merged record takes the category and source
    of the frame's first record.
    """
    groups: dict[tuple[str, str], list[QARecord]] = {}
    for rec in records:
        groups.setdefault(rec.frame_key, []).append(rec)
    for (scene_id, frame_id), group in groups.items():
        turns = [turn for rec in group for turn in rec.turns]
        yield QARecord.build(scene_id, frame_id, group[0].category, turns,
                             group[0].source, space)


DEFAULT_GROUNDING_TEMPLATES: Mapping[str, str] = {
    "center": "Where is the 2D center of the {category} {id} in {camera}?",
    "bbox": "What is the 2D bounding box of the {category} {id} in {camera}?",
}


def extract_grounding_qas(
    annotations: Iterable[GroundingAnnotation],
    templates: Mapping[str, str] | None = None,
    layout: StitchLayout = StitchLayout(),
    source: str = "grounding",
    precision: int = 1,
) -> Iterator[QARecord]:
    """Turn each 2D box into two localization QAs: center and bbox.

    The center answer embeds a key-object tag at the box midpoint, in the
    camera's original coordinates; the bbox answer lists the four corner
    values.

    Raises:
        InvalidBBox: if x1 >= x2, y1 >= y2, or the box leaves the native frame.
    """
    templates = dict(DEFAULT_GROUNDING_TEMPLATES) | dict(templates or {})
    for ann in annotations:
        x1, y1, x2, y2 = ann.bbox
        native_w, native_h = layout.native_dims[ann.camera]
        if not (x1 < x2 and y1 < y2):
            raise InvalidBBox(f"degenerate bbox {ann.bbox} for object {ann.object_id}")
        if not (0 <= x1 and x2 <= native_w and 0 <= y1 and y2 <= native_h):
            raise InvalidBBox(
                f"bbox {ann.bbox} exceeds the {native_w}x{native_h} frame of {ann.camera.value}")
        space = layout.original_space(ann.camera)
        fields = {"id": ann.object_id, "camera": ann.camera.canonical_name,
                  "category": ann.category}
        center_tag = KeyObjectTag(ann.object_id, ann.camera,
                                  (x1 + x2) / 2.0, (y1 + y2) / 2.0, space)
        center_answer = f"The center of {ann.object_id} is at {render_key_object_tag(center_tag, precision)}."
        corner_list = ", ".join(f"{v:.{precision}f}" for v in (x1, y1, x2, y2))
        bbox_answer = f"The bounding box of {ann.object_id} in {ann.camera.canonical_name} is [{corner_list}]."
        yield QARecord.build("", ann.frame_id, "grounding",
                             [QATurn(templates["center"].format(**fields), center_answer)],
                             source, space)
        yield QARecord.build("", ann.frame_id, "grounding",
                             [QATurn(templates["bbox"].format(**fields), bbox_answer)],
                             source, space)


def apply_policy_to_record(
    record: QARecord,
    policy: CoordinatePolicy,
    layout: StitchLayout = StitchLayout(),
    precision: int = 1,
) -> QARecord:
    """Rewrite every tag in the record's turns for the chosen coordinate
    policy; tags are re-derived in the target space. KEEP_ORIGINAL returns
    the record untouched."""
    if policy is CoordinatePolicy.KEEP_ORIGINAL:
        return record
    assumed = record.tags[0].space if record.tags else None
    turns = [QATurn(transform_tags_in_text(t.question, policy, layout, assumed, precision),
                    transform_tags_in_text(t.answer, policy, layout, assumed, precision))
             for t in record.turns]
    target = (CoordSpace.per_view() if policy is CoordinatePolicy.PER_VIEW_RESIZE
              else CoordSpace.concatenated())
    return QARecord.build(record.scene_id, record.frame_id, record.category,
                          turns, record.source, target)


def build_training_sample(
    record: QARecord,
    policy: CoordinatePolicy = CoordinatePolicy.KEEP_ORIGINAL,
    layout: StitchLayout = StitchLayout(),
    image_ref: str | None = None,
    precision: int = 1,
) -> TrainingSample:
    """Attach the system prompt, apply the coordinate policy to every turn,
    and record where each answer spells a coordinate value.
    """
    assumed = record.tags[0].space if record.tags else None
    conversation = []
    spans_per_turn = []
    for turn in record.turns:
        question = transform_tags_in_text(turn.question, policy, layout, assumed, precision)
        answer = transform_tags_in_text(turn.answer, policy, layout, assumed, precision)
        conversation.append(QATurn(question, answer))
        spans = []
        for tag in parse_key_object_tags(answer):
            spans.extend([tag.x_span, tag.y_span])
        spans_per_turn.append(tuple(spans))
    return TrainingSample(
        system_prompt=SYSTEM_PROMPT,
        image_ref=image_ref if image_ref is not None else record.frame_id,
        conversation=tuple(conversation),
        answer_coord_spans=tuple(spans_per_turn),
    )


@dataclass(frozen=True)
class DatasetSummary:
    pairs: int
    frames: int
    by_category: Mapping[str, int]
    by_source: Mapping[str, int]

    def to_json(self) -> dict:
        return {"pairs": self.pairs, "frames": self.frames,
                "by_category": dict(self.by_category), "by_source": dict(self.by_source)}


def summarize_dataset(records: Iterable[QARecord]) -> DatasetSummary:
    """Count QA pairs (turns) per category and source, and distinct frames."""
    by_category = {cat: 0 for cat in CATEGORIES}
    by_source: dict[str, int] = {}
    frames: set[tuple[str, str]] = set()
    pairs = 0
    for rec in records:
        n = len(rec.turns)
        pairs += n
        by_category[rec.category] += n
        by_source[rec.source] = by_source.get(rec.source, 0) + n
        frames.add(rec.frame_key)
    return DatasetSummary(pairs, len(frames),
                          {c: n for c, n in by_category.items() if n}, by_source)


def sample_records(
    records: Iterable[QARecord],
    rates: Mapping[str, float] | float = 1.0,
    seed: int = 0,
) -> Iterator[QARecord]:
    """Keep each record with a per-category probability (default: keep all)."""
    rng = random.Random(seed)
    for rec in records:
        rate = rates if isinstance(rates, (int, float)) else rates.get(rec.category, 1.0)
        if rate >= 1.0 or rng.random() < rate:
            yield rec
