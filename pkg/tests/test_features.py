"""Feature file format: round-trips, validation, synthetic generator."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semlapse.features import (
    Detection,
    FeatureFormatError,
    FrameRecord,
    SynthScenario,
    VideoMeta,
    benchmark_scenario,
    load_features,
    plan_bursts,
    synth_features,
    write_features,
)

META = VideoMeta(width=1280, height=720, fps=30.0, frame_count=3)


def unit_hist(bins=96):
    h = np.ones(bins)
    return h / h.sum()


def make_records(n=3, bins=96):
    out = []
    for i in range(n):
        last = i == n - 1
        out.append(
            FrameRecord(
                index=i,
                detections=[Detection(x=10.0, y=20.0, w=50.0, h=60.0, confidence=80.0)],
                foe=None if last else (640.0, 360.0),
                flow_mag=None if last else 5.25,
                histogram=unit_hist(bins),
            )
        )
    return out


class TestRoundTrip:
    def test_well_formed_file_loads(self, tmp_path):
        path = tmp_path / "f.jsonl"
        write_features(META, make_records(), path)
        meta, records = load_features(path)
        assert meta == META
        assert meta.frame_count == 3
        assert len(records) == 3
        assert records[0].detections[0].confidence == 80.0
        assert records[2].foe is None and records[2].flow_mag is None

    def test_write_is_byte_stable(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_features(META, make_records(), a)
        write_features(META, make_records(), b)
        assert a.read_bytes() == b.read_bytes()

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_random_records_round_trip(self, tmp_path_factory, data):
        n = data.draw(st.integers(1, 6))
        bins = data.draw(st.sampled_from([3, 6, 96]))
        meta = VideoMeta(width=320, height=240, fps=24.0, frame_count=n)
        records = []
        for i in range(n):
            dets = []
            for _ in range(data.draw(st.integers(0, 3))):
                w = data.draw(st.floats(1.0, 100.0))
                h = data.draw(st.floats(1.0, 100.0))
                x = data.draw(st.floats(0.0, 320.0 - w))
                y = data.draw(st.floats(0.0, 240.0 - h))
                c = data.draw(st.floats(0.0, 200.0))
                dets.append(Detection(x=x, y=y, w=w, h=h, confidence=c))
            has_flow = i < n - 1 and data.draw(st.booleans())
            hist = np.array(
                [data.draw(st.floats(0.0, 5.0)) for _ in range(bins)]
            )
            if hist.sum() == 0:
                hist[0] = 1.0
            hist = hist / hist.sum()
            records.append(
                FrameRecord(
                    index=i,
                    detections=dets,
                    foe=(data.draw(st.floats(-50, 400)), data.draw(st.floats(-50, 300)))
                    if has_flow
                    else None,
                    flow_mag=data.draw(st.floats(0, 40)) if has_flow else None,
                    histogram=hist,
                )
            )
        path = tmp_path_factory.mktemp("rt") / "f.jsonl"
        write_features(meta, records, path)
        meta2, records2 = load_features(path)
        assert meta2 == meta
        for rec, rec2 in zip(records, records2):
            assert rec2.index == rec.index
            assert len(rec2.detections) == len(rec.detections)
            for d, d2 in zip(rec.detections, rec2.detections):
                for f in ("x", "y", "w", "h", "confidence"):
                    assert getattr(d2, f) == pytest.approx(getattr(d, f), abs=1e-9)
            if rec.foe is None:
                assert rec2.foe is None
            else:
                assert rec2.foe == pytest.approx(rec.foe, abs=1e-9)
            if rec.flow_mag is None:
                assert rec2.flow_mag is None
            else:
                assert rec2.flow_mag == pytest.approx(rec.flow_mag, abs=1e-9)
            np.testing.assert_allclose(rec2.histogram, rec.histogram, atol=1e-9)


class TestLoaderValidation:
    def write_lines(self, tmp_path, lines):
        path = tmp_path / "f.jsonl"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def frame_line(self, i, **overrides):
        obj = {
            "index": i,
            "detections": [],
            "foe": None,
            "flow_mag": None,
            "histogram": [0.5, 0.25, 0.25],
        }
        obj.update(overrides)
        return json.dumps(obj)

    def meta_line(self, frame_count):
        return json.dumps(
            {"width": 100, "height": 100, "fps": 30.0, "frame_count": frame_count}
        )

    def test_non_contiguous_index(self, tmp_path):
        path = self.write_lines(
            tmp_path, [self.meta_line(2), self.frame_line(0), self.frame_line(2)]
        )
        with pytest.raises(FeatureFormatError, match="non-contiguous index at frame 2"):
            load_features(path)

    def test_histogram_renormalized(self, tmp_path):
        path = self.write_lines(
            tmp_path,
            [self.meta_line(1), self.frame_line(0, histogram=[0.25, 0.15, 0.1])],
        )
        _, records = load_features(path)
        assert records[0].histogram.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(records[0].histogram, [0.5, 0.3, 0.2], atol=1e-12)

    def test_bad_json_reports_line(self, tmp_path):
        path = self.write_lines(tmp_path, [self.meta_line(1), "{not json"])
        with pytest.raises(FeatureFormatError, match="parse error at line 2"):
            load_features(path)

    def test_frame_count_mismatch(self, tmp_path):
        path = self.write_lines(tmp_path, [self.meta_line(5), self.frame_line(0)])
        with pytest.raises(FeatureFormatError, match="frame_count is 5"):
            load_features(path)

    def test_negative_flow_rejected(self, tmp_path):
        path = self.write_lines(
            tmp_path, [self.meta_line(1), self.frame_line(0, flow_mag=-1.0)]
        )
        with pytest.raises(FeatureFormatError, match="flow_mag"):
            load_features(path)

    def test_zero_mass_histogram_rejected(self, tmp_path):
        path = self.write_lines(
            tmp_path, [self.meta_line(1), self.frame_line(0, histogram=[0.0, 0.0, 0.0])]
        )
        with pytest.raises(FeatureFormatError, match="histogram"):
            load_features(path)

    def test_histogram_length_not_divisible_rejected(self, tmp_path):
        path = self.write_lines(
            tmp_path, [self.meta_line(1), self.frame_line(0, histogram=[0.5, 0.5])]
        )
        with pytest.raises(FeatureFormatError, match="divisible"):
            load_features(path)

    def test_inconsistent_histogram_lengths_rejected(self, tmp_path):
        path = self.write_lines(
            tmp_path,
            [
                self.meta_line(2),
                self.frame_line(0),
                self.frame_line(1, histogram=[0.1] * 6),
            ],
        )
        with pytest.raises(FeatureFormatError, match="differs"):
            load_features(path)

    def test_bbox_outside_frame_rejected(self, tmp_path):
        det = {"x": 90.0, "y": 0.0, "w": 20.0, "h": 10.0, "confidence": 50.0}
        path = self.write_lines(
            tmp_path, [self.meta_line(1), self.frame_line(0, detections=[det])]
        )
        with pytest.raises(FeatureFormatError, match="bbox"):
            load_features(path)

    def test_non_finite_confidence_rejected(self, tmp_path):
        det = {"x": 1.0, "y": 1.0, "w": 5.0, "h": 5.0, "confidence": float("nan")}
        path = self.write_lines(
            tmp_path, [self.meta_line(1), self.frame_line(0, detections=[det])]
        )
        with pytest.raises(FeatureFormatError, match="confidence"):
            load_features(path)


class TestWriterValidation:
    def test_empty_records_rejected(self, tmp_path):
        with pytest.raises(FeatureFormatError, match="frame_count must be positive"):
            write_features(
                VideoMeta(width=10, height=10, fps=30.0, frame_count=0),
                [],
                tmp_path / "f.jsonl",
            )

    def test_unnormalized_histogram_rejected(self, tmp_path):
        recs = make_records(1)
        recs[0].histogram = np.ones(96)
        meta = VideoMeta(width=1280, height=720, fps=30.0, frame_count=1)
        with pytest.raises(FeatureFormatError, match="sums to"):
            write_features(meta, recs, tmp_path / "f.jsonl")


class TestSynth:
    def test_faces_exactly_in_bursts(self):
        scn = SynthScenario(frame_count=100, bursts=((20, 40),), seed=3)
        _, records = synth_features(scn)
        for rec in records:
            if 20 <= rec.index < 40:
                assert rec.detections
            else:
                assert not rec.detections

    def test_zero_foe_noise_pins_foe_to_center(self):
        scn = SynthScenario(frame_count=10, foe_noise=0.0, seed=1)
        meta, records = synth_features(scn)
        for rec in records[:-1]:
            assert rec.foe == meta.center
        assert records[-1].foe is None

    def test_same_seed_identical(self, tmp_path):
        scn = SynthScenario(frame_count=50, bursts=((10, 30),), seed=7,
                            bg_cluster_rate=0.05, noise_rate=0.1, transient_rate=0.1)
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        meta1, recs1 = synth_features(scn)
        meta2, recs2 = synth_features(scn)
        write_features(meta1, recs1, a)
        write_features(meta2, recs2, b)
        assert a.read_bytes() == b.read_bytes()

    def test_output_passes_loader(self, tmp_path):
        scn = benchmark_scenario(seed=5, frame_count=400)
        meta, recs = synth_features(scn)
        path = tmp_path / "f.jsonl"
        write_features(meta, recs, path)
        meta2, recs2 = load_features(path)
        assert meta2.frame_count == 400
        assert len(recs2) == 400

    def test_burst_dropout_leaves_gaps(self):
        scn = SynthScenario(frame_count=200, bursts=((0, 200),), burst_dropout=0.3,
                            seed=11)
        _, records = synth_features(scn)
        empty = sum(1 for r in records if not r.detections)
        assert 0.15 * 200 < empty < 0.45 * 200

    def test_invalid_bursts_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            SynthScenario(frame_count=10, bursts=((5, 20),)).validate()
        with pytest.raises(ValueError, match="non-overlapping"):
            SynthScenario(frame_count=50, bursts=((5, 20), (10, 30))).validate()


class TestPlanBursts:
    def test_coverage_and_separation(self):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            bursts = plan_bursts(rng, 5000)
            total = sum(e - s for s, e in bursts)
            assert 0.2 * 5000 - 1 <= total <= 0.4 * 5000 + 1
            prev_end = None
            for s, e in bursts:
                assert 0 <= s < e <= 5000
                if prev_end is not None:
                    assert s - prev_end >= 60
                prev_end = e

    def test_deterministic(self):
        a = plan_bursts(np.random.default_rng(3), 5000)
        b = plan_bursts(np.random.default_rng(3), 5000)
        assert a == b
