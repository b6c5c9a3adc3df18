"""Compose six camera views into one 2688x896 grid and move coordinates
between the original, per-view and concatenated spaces.

Transforms carry full float precision; rounding only ever happens when a
tag is rendered back to text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import IO, Iterator, Mapping

from PIL import Image, UnidentifiedImageError

from .cameras import CameraView, normalize_camera_name
from .spaces import CoordSpace, SpaceKind
from .tags import SkippedTag, format_coord, parse_key_object_tags

DEFAULT_NATIVE_DIMS = MappingProxyType({view: (1600, 900) for view in CameraView})


class MissingCamera(ValueError):
    def __init__(self, view: CameraView) -> None:
        super().__init__(f"no image supplied for camera {view.value}")
        self.view = view


class DecodeError(ValueError):
    def __init__(self, path: str, cause: str) -> None:
        super().__init__(f"cannot decode image {path}: {cause}")
        self.path = path


class OutOfCell(ValueError):
    """A concatenated-space point does not fall in the stated camera's cell."""

    def __init__(self, point: tuple[float, float], view: CameraView) -> None:
        super().__init__(f"point {point} lies outside the {view.value} cell")
        self.point = point
        self.view = view


class CoordinatePolicy(Enum):
    """How tag coordinates are expressed relative to the stitched input."""

    KEEP_ORIGINAL = "original"
    PER_VIEW_RESIZE = "per-view"
    CONCATENATED_RESIZE = "concatenated"


@dataclass(frozen=True)
class StitchLayout:
    """The 3x2 grid of resized views plus the cameras' native resolutions."""

    cell_w: int = 896
    cell_h: int = 448
    cols: int = 3
    rows: int = 2
    native_dims: Mapping[CameraView, tuple[int, int]] = field(default=DEFAULT_NATIVE_DIMS)

    def __post_init__(self) -> None:
        missing = [v for v in CameraView if v not in self.native_dims]
        if missing:
            raise ValueError(f"native_dims missing cameras: {[v.value for v in missing]}")

    @property
    def width(self) -> int:
        return self.cols * self.cell_w

    @property
    def height(self) -> int:
        return self.rows * self.cell_h

    def slot(self, view: CameraView) -> tuple[int, int]:
        return view.slot

    def cell_origin(self, view: CameraView) -> tuple[int, int]:
        row, col = view.slot
        return (col * self.cell_w, row * self.cell_h)

    def original_space(self, view: CameraView) -> CoordSpace:
        w, h = self.native_dims[view]
        return CoordSpace.original(w, h)

    def with_native_dims(self, dims: tuple[int, int]) -> StitchLayout:
        """Same layout with one native resolution applied to all cameras."""
        return StitchLayout(self.cell_w, self.cell_h, self.cols, self.rows,
                            MappingProxyType({view: dims for view in CameraView}))


def load_image(path: str | Path) -> Image.Image:
    """Open a PNG/JPEG as 8-bit RGB (alpha dropped)."""
    try:
        with Image.open(path) as img:
            return img.convert("RGB")
    except FileNotFoundError:
        raise DecodeError(str(path), "file not found") from None
    except UnidentifiedImageError as exc:
        raise DecodeError(str(path), str(exc)) from None


def compose_views(images: Mapping[CameraView, Image.Image], layout: StitchLayout = StitchLayout()) -> Image.Image:
    """Resize each view to one grid cell (bilinear) and blit it in place.

    The output is always exactly ``layout.width x layout.height`` RGB,
    whatever the input sizes were.

    Raises:
        MissingCamera: if any of the six views is absent.
    """
    for view in CameraView:
        if view not in images:
            raise MissingCamera(view)
    canvas = Image.new("RGB", (layout.width, layout.height))
    for view in CameraView:
        cell = images[view].convert("RGB").resize(
            (layout.cell_w, layout.cell_h), Image.Resampling.BILINEAR)
        canvas.paste(cell, layout.cell_origin(view))
    return canvas


# 1 px of tolerance on bounds checks: generated text may slightly overshoot.
BOUNDS_SLACK = 1.0


def transform_point(
    p: tuple[float, float],
    camera: CameraView,
    src: CoordSpace,
    dst: CoordSpace,
    layout: StitchLayout = StitchLayout(),
) -> tuple[float, float]:
    """Map a point between coordinate spaces for the given camera.

    Original -> per-view scales by (896/native_w, 448/native_h); per-view ->
    concatenated adds the camera's cell offset. Every other pair composes
    through these primitives and their exact inverses.

    Raises:
        OutOfCell: for a concatenated-space source point more than 1 px
            outside the camera's cell.
    """
    x, y = float(p[0]), float(p[1])

    # Normalize to per-view coordinates.
    if src.kind is SpaceKind.ORIGINAL:
        x = x * layout.cell_w / src.width
        y = y * layout.cell_h / src.height
    elif src.kind is SpaceKind.CONCATENATED:
        ox, oy = layout.cell_origin(camera)
        x -= ox
        y -= oy
        if not (-BOUNDS_SLACK <= x <= layout.cell_w + BOUNDS_SLACK
                and -BOUNDS_SLACK <= y <= layout.cell_h + BOUNDS_SLACK):
            raise OutOfCell(p, camera)

    # Leave per-view coordinates for the destination space.
    if dst.kind is SpaceKind.ORIGINAL:
        x = x * dst.width / layout.cell_w
        y = y * dst.height / layout.cell_h
    elif dst.kind is SpaceKind.CONCATENATED:
        ox, oy = layout.cell_origin(camera)
        x += ox
        y += oy
    return (x, y)


def policy_space(policy: CoordinatePolicy, camera: CameraView, layout: StitchLayout) -> CoordSpace:
    """The coordinate space a policy expresses tags in, for one camera."""
    if policy is CoordinatePolicy.KEEP_ORIGINAL:
        return layout.original_space(camera)
    if policy is CoordinatePolicy.PER_VIEW_RESIZE:
        return CoordSpace.per_view()
    return CoordSpace.concatenated()


def transform_tags_in_text(
    text: str,
    policy: CoordinatePolicy,
    layout: StitchLayout = StitchLayout(),
    assumed_space: CoordSpace | None = None,
    precision: int = 1,
    diagnostics: list[SkippedTag] | None = None,
) -> str:
    """Rewrite the numeric fields of each tag for the chosen policy.

    KEEP_ORIGINAL returns the text unchanged byte-for-byte. The other
    policies replace only the x/y substrings of well-formed tags; all
    surrounding bytes (including the tags' ids, camera names and spacing)
    are preserved. Tags are assumed to be expressed in ``assumed_space``;
    when that space is of the original kind, each tag's native dimensions
    are taken from ``layout.native_dims`` for its camera.

    A tag whose transform fails (OutOfCell) is left unmodified and reported
    to ``diagnostics``.
    """
    if policy is CoordinatePolicy.KEEP_ORIGINAL:
        return text

    original_kind = assumed_space is None or assumed_space.kind is SpaceKind.ORIGINAL
    pieces: list[str] = []
    cursor = 0
    for tag in parse_key_object_tags(text, diagnostics=diagnostics):
        src = layout.original_space(tag.camera) if original_kind else assumed_space
        dst = policy_space(policy, tag.camera, layout)
        try:
            nx, ny = transform_point((tag.x, tag.y), tag.camera, src, dst, layout)
        except OutOfCell as exc:
            if diagnostics is not None:
                diagnostics.append(SkippedTag(tag.src_span, text[slice(*tag.src_span)], str(exc)))
            continue
        assert tag.x_span is not None and tag.y_span is not None
        pieces.append(text[cursor:tag.x_span[0]])
        pieces.append(format_coord(nx, precision))
        pieces.append(text[tag.x_span[1]:tag.y_span[0]])
        pieces.append(format_coord(ny, precision))
        cursor = tag.y_span[1]
    pieces.append(text[cursor:])
    return "".join(pieces)


@dataclass(frozen=True)
class FrameManifestEntry:
    frame_id: str
    images: Mapping[CameraView, str]


def read_frame_manifest(fp: IO[str]) -> Iterator[FrameManifestEntry]:
    """Stream a JSON-lines manifest: {"frame_id": ..., "images": {"CAM_FRONT": path, ...}}."""
    for line in fp:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        images = {normalize_camera_name(name): path for name, path in obj["images"].items()}
        yield FrameManifestEntry(frame_id=obj["frame_id"], images=images)


def stitch_frame(entry: FrameManifestEntry, layout: StitchLayout = StitchLayout()) -> Image.Image:
    """Load the six images of one manifest entry and compose them."""
    images: dict[CameraView, Image.Image] = {}
    for view in CameraView:
        if view not in entry.images:
            raise MissingCamera(view)
        images[view] = load_image(entry.images[view])
    return compose_views(images, layout)
