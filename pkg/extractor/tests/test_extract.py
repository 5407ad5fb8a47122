"""Feature extraction output format and determinism."""

import json

import numpy as np
import pytest

cv2 = pytest.importorskip("cv2")

from semlapse_extractor.config import ExtractionConfig
from semlapse_extractor.extract import (
    color_histogram,
    extract,
    write_feature_file,
)

from conftest import FACE_BURST, FACE_FRAMES


@pytest.fixture(scope="session")
def face_features(face_clip):
    return extract(face_clip, ExtractionConfig())


class TestColorHistogram:
    def test_unit_mass_and_channel_layout(self):
        frame = np.zeros((20, 20, 3), dtype=np.uint8)
        frame[..., 0] = 255  # saturated blue channel
        hist = color_histogram(frame, 32)
        assert hist.shape == (96,)
        assert hist.sum() == pytest.approx(1.0, abs=1e-12)
        # blue mass in the last bin of channel one, green/red in bin 0
        assert hist[31] == pytest.approx(1 / 3)
        assert hist[32] == pytest.approx(1 / 3)
        assert hist[64] == pytest.approx(1 / 3)


class TestExtract:
    def test_meta_and_record_schema(self, face_features):
        meta, records = face_features
        assert meta == {"width": 320, "height": 240, "fps": 30.0,
                        "frame_count": FACE_FRAMES}
        assert len(records) == FACE_FRAMES
        for rec in records[:5]:
            assert set(rec) == {"index", "detections", "foe", "flow_mag",
                                "histogram"}
            assert len(rec["histogram"]) == 96
        assert records[-1]["foe"] is None
        assert records[-1]["flow_mag"] is None
        assert all(rec["flow_mag"] is not None for rec in records[:-1])

    def test_detections_concentrate_in_burst(self, face_features):
        _, records = face_features
        inside = [r for r in records if FACE_BURST[0] <= r["index"] < FACE_BURST[1]]
        outside = [r for r in records
                   if not FACE_BURST[0] <= r["index"] < FACE_BURST[1]]
        hit_inside = sum(bool(r["detections"]) for r in inside) / len(inside)
        hit_outside = sum(bool(r["detections"]) for r in outside) / len(outside)
        assert hit_inside > 0.5
        assert hit_outside < 0.05
        confs = [d["confidence"] for r in inside for d in r["detections"]]
        assert confs
        assert all(0 < c < 200 for c in confs)

    def test_deterministic_output_bytes(self, face_clip, tmp_path):
        paths = []
        for name in ("a.jsonl", "b.jsonl"):
            meta, records = extract(face_clip, ExtractionConfig())
            path = tmp_path / name
            write_feature_file(meta, records, path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_stride_subsamples_frames_and_fps(self, static_clip):
        meta, records = extract(static_clip, ExtractionConfig(stride=2))
        assert meta["frame_count"] == 30
        assert meta["fps"] == 15.0
        assert [r["index"] for r in records] == list(range(30))

    def test_unreadable_video_raises(self, tmp_path):
        with pytest.raises(ValueError, match="cannot open video"):
            extract(tmp_path / "missing.avi", ExtractionConfig())

    def test_written_file_is_canonical_json_lines(self, static_clip, tmp_path):
        meta, records = extract(static_clip, ExtractionConfig())
        out = tmp_path / "static.jsonl"
        write_feature_file(meta, records, out)
        lines = out.read_text().splitlines()
        assert len(lines) == meta["frame_count"] + 1
        head = json.loads(lines[0])
        assert head == meta
        rec = json.loads(lines[1])
        assert rec["index"] == 0
        assert sum(rec["histogram"]) == pytest.approx(1.0, abs=1e-9)
