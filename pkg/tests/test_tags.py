"""Tag grammar, camera names and coordinate spaces."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drivevqa.cameras import CameraView, UnknownCamera, normalize_camera_name
from drivevqa.spaces import CoordSpace, SpaceKind
from drivevqa.tags import (KeyObjectTag, SkippedTag, parse_key_object_tags,
                           render_key_object_tag)


class TestCameras:
    def test_slots_cover_the_grid(self):
        slots = {view.slot for view in CameraView}
        assert slots == {(r, c) for r in range(2) for c in range(3)}

    def test_front_row_layout(self):
        assert CameraView.FRONT_LEFT.slot == (0, 0)
        assert CameraView.FRONT.slot == (0, 1)
        assert CameraView.FRONT_RIGHT.slot == (0, 2)

    def test_back_row_layout(self):
        assert CameraView.BACK_LEFT.slot == (1, 0)
        assert CameraView.BACK.slot == (1, 1)
        assert CameraView.BACK_RIGHT.slot == (1, 2)

    @pytest.mark.parametrize("raw,expected", [
        ("CAM FRONT", CameraView.FRONT),
        ("cam_back_right", CameraView.BACK_RIGHT),
        ("FRONT", CameraView.FRONT),
        ("Cam Back Left", CameraView.BACK_LEFT),
        ("front_right", CameraView.FRONT_RIGHT),
    ])
    def test_normalize_accepted_spellings(self, raw, expected):
        assert normalize_camera_name(raw) is expected

    def test_normalize_rejects_unknown(self):
        with pytest.raises(UnknownCamera):
            normalize_camera_name("CAM_TOP")


class TestSpaces:
    def test_fixed_dimensions(self):
        assert (CoordSpace.per_view().width, CoordSpace.per_view().height) == (896, 448)
        assert (CoordSpace.concatenated().width, CoordSpace.concatenated().height) == (2688, 896)

    def test_per_view_rejects_other_dims(self):
        with pytest.raises(ValueError):
            CoordSpace(SpaceKind.PER_VIEW, 100, 100)

    def test_original_requires_positive_dims(self):
        with pytest.raises(ValueError):
            CoordSpace.original(0, 900)

    def test_json_round_trip(self):
        space = CoordSpace.original(1600, 900)
        assert CoordSpace.from_json(space.to_json()) == space


class TestParse:
    def test_single_tag(self):
        tags = parse_key_object_tags("see <c1,CAM_FRONT,1043.2,82.4> ahead")
        assert len(tags) == 1
        tag = tags[0]
        assert tag.id == "c1"
        assert tag.camera is CameraView.FRONT
        assert tag.x == 1043.2
        assert tag.y == 82.4
        assert tag.src_span == (4, 30)

    def test_no_tags(self):
        assert parse_key_object_tags("no tags here") == []

    def test_adjacent_tags_order_and_normalization(self):
        tags = parse_key_object_tags("<C1, CAM BACK LEFT, 10, 20><c2,CAM_FRONT,5,6>")
        assert [t.id for t in tags] == ["C1", "c2"]
        assert tags[0].camera is CameraView.BACK_LEFT
        assert tags[1].camera is CameraView.FRONT
        assert (tags[0].x, tags[0].y) == (10.0, 20.0)
        assert (tags[1].x, tags[1].y) == (5.0, 6.0)

    def test_numeric_field_spans_slice_to_values(self):
        text = "go to <c1,CAM_FRONT,800.0,450.5> now"
        (tag,) = parse_key_object_tags(text)
        assert text[slice(*tag.x_span)] == "800.0"
        assert text[slice(*tag.y_span)] == "450.5"

    def test_malformed_candidates_are_skipped_with_diagnostics(self):
        diags: list[SkippedTag] = []
        tags = parse_key_object_tags(
            "<c1,CAM_FRONT,1,2> <oops> <c2,CAM_TOP,3,4> <c3,CAM_BACK,5,6>",
            diagnostics=diags)
        assert [t.id for t in tags] == ["c1", "c3"]
        assert len(diags) == 2
        assert diags[0].text == "<oops>"
        assert "CAM_TOP" in diags[1].reason

    def test_negative_numbers_are_not_tags(self):
        assert parse_key_object_tags("<c1,CAM_FRONT,-1,2>") == []

    def test_space_before_comma_is_malformed(self):
        assert parse_key_object_tags("<c1 ,CAM_FRONT,1,2>") == []

    def test_spans_are_disjoint_and_increasing(self):
        text = "a <c1,CAM_FRONT,1,2> b <c2,CAM_BACK,3,4> c <c3,CAM_FRONT,5,6>"
        tags = parse_key_object_tags(text)
        spans = [t.src_span for t in tags]
        assert all(s0[1] <= s1[0] for s0, s1 in zip(spans, spans[1:]))

    @settings(max_examples=300)
    @given(st.text(max_size=200))
    def test_parser_is_total(self, text):
        diags: list[SkippedTag] = []
        tags = parse_key_object_tags(text, diagnostics=diags)
        for tag in tags:
            assert text[slice(*tag.src_span)].startswith("<")
        spans = [t.src_span for t in tags]
        assert all(s0[1] <= s1[0] for s0, s1 in zip(spans, spans[1:]))


class TestRender:
    def test_canonical_form(self):
        tag = KeyObjectTag("c1", CameraView.FRONT, 448.0, 224.0, CoordSpace.per_view())
        assert render_key_object_tag(tag, precision=1) == "<c1,CAM_FRONT,448.0,224.0>"

    def test_round_half_to_even(self):
        tag = KeyObjectTag("c2", CameraView.BACK_LEFT, 10.25, 20.75,
                           CoordSpace.original(1600, 900))
        assert render_key_object_tag(tag, precision=1) == "<c2,CAM_BACK_LEFT,10.2,20.8>"

    def test_precision_zero(self):
        tag = KeyObjectTag("c1", CameraView.BACK, 10.6, 20.4, CoordSpace.original(1600, 900))
        assert render_key_object_tag(tag, precision=0) == "<c1,CAM_BACK,11,20>"

    def test_negative_precision_rejected(self):
        tag = KeyObjectTag("c1", CameraView.BACK, 1.0, 2.0, CoordSpace.original(1600, 900))
        with pytest.raises(ValueError):
            render_key_object_tag(tag, precision=-1)

    @given(
        ident=st.from_regex(r"[A-Za-z0-9]{1,6}", fullmatch=True),
        camera=st.sampled_from(list(CameraView)),
        x10=st.integers(min_value=0, max_value=26880),
        y10=st.integers(min_value=0, max_value=8960),
    )
    def test_parse_render_round_trip(self, ident, camera, x10, y10):
        # any tag with one decimal place survives render -> parse exactly
        tag = KeyObjectTag(ident, camera, x10 / 10.0, y10 / 10.0, CoordSpace.concatenated())
        rendered = render_key_object_tag(tag, precision=1)
        (parsed,) = parse_key_object_tags(rendered, space=CoordSpace.concatenated())
        assert parsed.id == tag.id
        assert parsed.camera is tag.camera
        assert parsed.x == pytest.approx(tag.x, abs=1e-9)
        assert parsed.y == pytest.approx(tag.y, abs=1e-9)
        # and the canonical string survives parse -> render byte-for-byte
        assert render_key_object_tag(parsed, precision=1) == rendered

    def test_in_bounds_flagging_without_clamping(self):
        tag = KeyObjectTag("c1", CameraView.FRONT, 2000.0, 100.0, CoordSpace.original(1600, 900))
        assert not tag.in_bounds()
        assert tag.x == 2000.0
