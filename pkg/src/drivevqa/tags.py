"""Key-object tag grammar: parse and render ``<id,CAM_NAME,x,y>`` references.

A tag points at one object in one camera view by pixel coordinate. The
parser is total: malformed tag-like substrings are skipped and reported
through an optional diagnostics list, never raised.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .cameras import CameraView, UnknownCamera, normalize_camera_name
from .spaces import CoordSpace

# Conventional native resolution of the source cameras; callers that know
# better pass their own space.
DEFAULT_TAG_SPACE = CoordSpace.original(1600, 900)

# Anything bracketed that could have been meant as a tag.
_CANDIDATE_RE = re.compile(r"<[^<>]*>")

# Strict grammar: "<" id "," camera "," number "," number ">" with optional
# spaces after commas only. Camera names may use spaces or underscores.
_TAG_RE = re.compile(
    r"<(?P<id>[A-Za-z0-9]+)"
    r", *(?P<cam>[A-Za-z](?:[A-Za-z_ ]*[A-Za-z])?)"
    r", *(?P<x>[0-9]+(?:\.[0-9]+)?)"
    r", *(?P<y>[0-9]+(?:\.[0-9]+)?)>"
)


@dataclass(frozen=True)
class SkippedTag:
    """A tag-like substring the parser rejected, with the reason."""

    span: tuple[int, int]
    text: str
    reason: str


@dataclass(frozen=True)
class KeyObjectTag:
    """One parsed key-object reference.

    Attributes:
        id: short alphanumeric label, e.g. "c1".
        camera: the view the coordinate belongs to.
        x, y: pixel coordinate in ``space``.
        space: coordinate space the values are expressed in.
        src_span: half-open character range of the whole tag in the source text.
        x_span, y_span: character ranges of just the numeric fields, used for
            byte-precise rewriting and for locating coordinate tokens.
    """

    id: str
    camera: CameraView
    x: float
    y: float
    space: CoordSpace
    src_span: tuple[int, int] | None = None
    x_span: tuple[int, int] | None = None
    y_span: tuple[int, int] | None = None

    def in_bounds(self, slack: float = 0.0) -> bool:
        """Whether the coordinate lies inside its space (never clamps)."""
        return self.space.contains(self.x, self.y, slack=slack)

    def with_coords(self, x: float, y: float, space: CoordSpace) -> KeyObjectTag:
        """Copy of this tag with a new coordinate, keeping identity and spans."""
        return KeyObjectTag(self.id, self.camera, x, y, space,
                            self.src_span, self.x_span, self.y_span)


def parse_key_object_tags(
    text: str,
    space: CoordSpace = DEFAULT_TAG_SPACE,
    diagnostics: list[SkippedTag] | None = None,
) -> list[KeyObjectTag]:
    """Extract every well-formed key-object tag from text, in document order.

    Malformed candidates (wrong field count, bad id, unknown camera, bad
    number syntax) are skipped; when ``diagnostics`` is given, a SkippedTag
    is appended for each. The function never raises on any Unicode input.
    """
    tags: list[KeyObjectTag] = []
    for cand in _CANDIDATE_RE.finditer(text):
        m = _TAG_RE.fullmatch(text, cand.start(), cand.end())
        if m is None:
            if diagnostics is not None:
                diagnostics.append(SkippedTag(cand.span(), cand.group(), "does not match tag grammar"))
            continue
        try:
            camera = normalize_camera_name(m.group("cam"))
        except UnknownCamera:
            if diagnostics is not None:
                diagnostics.append(SkippedTag(cand.span(), cand.group(),
                                              f"unknown camera {m.group('cam')!r}"))
            continue
        tags.append(KeyObjectTag(
            id=m.group("id"),
            camera=camera,
            x=float(m.group("x")),
            y=float(m.group("y")),
            space=space,
            src_span=m.span(),
            x_span=m.span("x"),
            y_span=m.span("y"),
        ))
    return tags


def render_key_object_tag(tag: KeyObjectTag, precision: int = 1) -> str:
    """Serialize a tag canonically: underscore camera name, no spaces,
    coordinates at a fixed number of decimal places (round-half-to-even).
    """
    if precision < 0:
        raise ValueError("precision must be >= 0")
    return (f"<{tag.id},{tag.camera.canonical_name},"
            f"{tag.x:.{precision}f},{tag.y:.{precision}f}>")


def format_coord(value: float, precision: int = 1) -> str:
    """Render one coordinate the way tags print it."""
    if precision < 0:
        raise ValueError("precision must be >= 0")
    return f"{value:.{precision}f}"
