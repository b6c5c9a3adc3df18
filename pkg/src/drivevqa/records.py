"""Normalized question/answer records and their JSON-lines serialization.

QARecord is the single interchange schema between dataset adapters, the
coordinate pipeline and the evaluator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .cameras import normalize_camera_name
from .spaces import CoordSpace
from .tags import DEFAULT_TAG_SPACE, KeyObjectTag, SkippedTag, parse_key_object_tags

SCHEMA_VERSION = 1

CATEGORIES = ("perception", "prediction", "planning", "behavior", "grounding")


@dataclass(frozen=True)
class QATurn:
    question: str
    answer: str


@dataclass(frozen=True)
class QARecord:
    """A normalized QA unit: one frame, one task category, >= 1 turns."""

    scene_id: str
    frame_id: str
    category: str
    turns: tuple[QATurn, ...]
    tags: tuple[KeyObjectTag, ...]
    source: str

    def __post_init__(self) -> None:
        if not self.turns:
            raise ValueError("QARecord.turns must be non-empty")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}, expected one of {CATEGORIES}")

    @property
    def frame_key(self) -> tuple[str, str]:
        return (self.scene_id, self.frame_id)

    def joined_text(self) -> str:
        """Concatenation of all turn texts (question then answer, in order).

        Tag src_spans index into this string.
        """
        return "".join(t.question + t.answer for t in self.turns)

    @classmethod
    def build(
        cls,
        scene_id: str,
        frame_id: str,
        category: str,
        turns: Iterable[QATurn],
        source: str,
        space: CoordSpace = DEFAULT_TAG_SPACE,
        diagnostics: list[SkippedTag] | None = None,
    ) -> QARecord:
        """Construct a record, deriving tags from the turn texts."""
        turns = tuple(turns)
        return cls(scene_id, frame_id, category, turns,
                   tuple(derive_tags(turns, space, diagnostics)), source)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scene_id": self.scene_id,
            "frame_id": self.frame_id,
            "category": self.category,
            "source": self.source,
            "turns": [{"question": t.question, "answer": t.answer} for t in self.turns],
            "tags": [_tag_to_json(t) for t in self.tags],
        }

    @classmethod
    def from_json(cls, obj: dict) -> QARecord:
        return cls(
            scene_id=obj["scene_id"],
            frame_id=obj["frame_id"],
            category=obj["category"],
            turns=tuple(QATurn(t["question"], t["answer"]) for t in obj["turns"]),
            tags=tuple(_tag_from_json(t) for t in obj.get("tags", [])),
            source=obj["source"],
        )


def derive_tags(
    turns: Iterable[QATurn],
    space: CoordSpace = DEFAULT_TAG_SPACE,
    diagnostics: list[SkippedTag] | None = None,
) -> list[KeyObjectTag]:
    """Parse tags from every turn, with spans offset into the joined text.

    Each question and answer is parsed on its own (a tag can never straddle
    two texts) and the resulting spans are shifted to index into
    ``QARecord.joined_text()``.
    """
    tags: list[KeyObjectTag] = []
    offset = 0
    for turn in turns:
        for text in (turn.question, turn.answer):
            for tag in parse_key_object_tags(text, space, diagnostics):
                tags.append(_shift_tag(tag, offset))
            offset += len(text)
    return tags


def _shift_tag(tag: KeyObjectTag, offset: int) -> KeyObjectTag:
    def shift(span: tuple[int, int] | None) -> tuple[int, int] | None:
        return None if span is None else (span[0] + offset, span[1] + offset)

    return KeyObjectTag(tag.id, tag.camera, tag.x, tag.y, tag.space,
                        shift(tag.src_span), shift(tag.x_span), shift(tag.y_span))


def _tag_to_json(tag: KeyObjectTag) -> dict:
    obj: dict = {
        "id": tag.id,
        "camera": tag.camera.canonical_name,
        "x": tag.x,
        "y": tag.y,
        "space": tag.space.to_json(),
    }
    for key, span in (("src_span", tag.src_span), ("x_span", tag.x_span), ("y_span", tag.y_span)):
        if span is not None:
            obj[key] = list(span)
    return obj


def _tag_from_json(obj: dict) -> KeyObjectTag:
    def span(key: str) -> tuple[int, int] | None:
        return tuple(obj[key]) if key in obj else None

    return KeyObjectTag(
        id=obj["id"],
        camera=normalize_camera_name(obj["camera"]),
        x=float(obj["x"]),
        y=float(obj["y"]),
        space=CoordSpace.from_json(obj["space"]),
        src_span=span("src_span"),
        x_span=span("x_span"),
        y_span=span("y_span"),
    )


def write_records(records: Iterable[QARecord], fp: IO[str]) -> int:
    """Write records as JSON-lines; returns the number written."""
    n = 0
    for rec in records:
        fp.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")
        n += 1
    return n


def read_records(fp: IO[str]) -> Iterator[QARecord]:
    """Stream records back from JSON-lines."""
    for line in fp:
        line = line.strip()
        if line:
            yield QARecord.from_json(json.loads(line))
