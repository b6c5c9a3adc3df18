"""Small fixture builders shared by the CLI and acceptance tests."""

from __future__ import annotations

import json
from pathlib import Path

from PIL import Image

from drivevqa.cameras import CameraView

# Distinct flat color per camera; deterministic pixels keep PNGs byte-stable.
VIEW_COLORS = {
    CameraView.FRONT_LEFT: (200, 30, 30),
    CameraView.FRONT: (30, 200, 30),
    CameraView.FRONT_RIGHT: (30, 30, 200),
    CameraView.BACK_LEFT: (200, 200, 30),
    CameraView.BACK: (30, 200, 200),
    CameraView.BACK_RIGHT: (200, 30, 200),
}


def write_camera_images(directory: Path, frame_id: str, size=(1600, 900)) -> dict[str, str]:
    """Write six solid-color views for one frame; returns the manifest mapping."""
    directory.mkdir(parents=True, exist_ok=True)
    images = {}
    for view, color in VIEW_COLORS.items():
        path = directory / f"{frame_id}_{view.value.lower()}.png"
        Image.new("RGB", size, color).save(path)
        images[view.canonical_name] = str(path)
    return images


def write_manifest(path: Path, image_dir: Path, frame_ids: list[str], size=(1600, 900)) -> Path:
    with open(path, "w", encoding="utf-8") as fp:
        for frame_id in frame_ids:
            images = write_camera_images(image_dir, frame_id, size)
            fp.write(json.dumps({"frame_id": frame_id, "images": images}) + "\n")
    return path


def write_corpus_files(pairs, directory: Path, stem: str = "corpus") -> tuple[Path, Path]:
    """Materialize EvalPairs as the predictions/references JSON-lines files."""
    pred_path = directory / f"{stem}.preds.jsonl"
    ref_path = directory / f"{stem}.refs.jsonl"
    with open(pred_path, "w", encoding="utf-8") as fp:
        for p in pairs:
            fp.write(json.dumps({"question_id": p.question_id,
                                 "prediction": p.prediction}) + "\n")
    with open(ref_path, "w", encoding="utf-8") as fp:
        for p in pairs:
            fp.write(json.dumps({"question_id": p.question_id,
                                 "references": list(p.references),
                                 "category": p.category,
                                 "closed_form": p.closed_form}) + "\n")
    return pred_path, ref_path


THREE_QA_ONE_FRAME = {
    "scene_x": {
        "key_frames": {
            "frame_1": {
                "QA": {
                    "perception": [
                        {"Q": "What is ahead?",
                         "A": "A car at <c1,CAM_FRONT,800.0,450.0>."},
                        {"Q": "Moving status of <c1,CAM_FRONT,800.0,450.0>?",
                         "A": "Going ahead."},
                    ],
                    "planning": [
                        {"Q": "What should the ego vehicle do?",
                         "A": "Keep going at the same speed."},
                    ],
                }
            }
        }
    }
}


def write_three_qa_fixture(path: Path) -> Path:
    path.write_text(json.dumps(THREE_QA_ONE_FRAME), encoding="utf-8")
    return path
