import json

import numpy as np
import pytest

from posemetrics import (
    CameraLayout,
    KeypointSchema,
    SequenceSet,
    load_annotations,
    pose_report,
    save_annotations,
    save_camera_layout,
    track_report,
)
from posemetrics.cli import main
from posemetrics.model import FrameAnnotations, Keypoint, Pose, NUM_KEYPOINTS
from posemetrics.synth import perfect_predictions, random_scene

from conftest import relabel, with_poses


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def csv_rows(text: str) -> list[dict]:
    lines = [l for l in text.strip().splitlines() if l]
    headers = lines[0].split(",")
    return [dict(zip(headers, line.split(","))) for line in lines[1:]]


@pytest.fixture(scope="module")
def scene_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_scenes")
    rng = np.random.default_rng(1234)
    gt = random_scene(rng, "demo", n_tracks=3, n_frames=6, gap_prob=0.2)
    pred = perfect_predictions(gt)
    gt_path = root / "gt.jsonl"
    pred_path = root / "pred.jsonl"
    save_annotations(gt, gt_path, "ground_truth")
    save_annotations(pred, pred_path, "prediction")
    return gt, gt_path, pred_path


class TestEvalPose:
    def test_perfect_fixture_row(self, capsys, scene_files):
        _, gt_path, pred_path = scene_files
        code, out, _ = run_cli(
            capsys, "eval-pose", "--gt", str(gt_path), "--pred", str(pred_path), "--jobs", "1"
        )
        assert code == 0
        row = csv_rows(out)[-1]
        assert row["scene"] == "dataset"
        assert row["ospa_pose"] == "0.000"
        assert row["ap"] == "1.000" and row["ar"] == "1.000"

    def test_empty_predictions_give_total_one(self, capsys, tmp_path, scene_files):
        gt, gt_path, _ = scene_files
        empty = SequenceSet(gt.scene_name, ())
        empty_path = tmp_path / "empty.jsonl"
        save_annotations(empty, empty_path, "prediction")
        code, out, _ = run_cli(
            capsys, "eval-pose", "--gt", str(gt_path), "--pred", str(empty_path), "--jobs", "1"
        )
        assert code == 0
        row = csv_rows(out)[-1]
        assert row["ospa_pose"] == "1.000"
        assert row["ap"] == "0.000"

    def test_json_report_equals_library_api(self, capsys, scene_files):
        gt, gt_path, pred_path = scene_files
        code, out, _ = run_cli(
            capsys, "eval-pose", "--gt", str(gt_path), "--pred", str(pred_path),
            "--format", "json-report", "--jobs", "1",
        )
        assert code == 0
        from_cli = json.loads(out)
        schema = KeypointSchema.default()
        pred = load_annotations(pred_path, "prediction", schema)
        expected = pose_report([gt], [pred], schema)
        assert from_cli == json.loads(json.dumps(expected))

    def test_per_scene_rows(self, capsys, scene_files):
        _, gt_path, pred_path = scene_files
        code, out, _ = run_cli(
            capsys, "eval-pose", "--gt", str(gt_path), "--pred", str(pred_path),
            "--per-scene", "--jobs", "1",
        )
        rows = csv_rows(out)
        assert [r["scene"] for r in rows] == ["demo", "dataset"]

    def test_markdown_format(self, capsys, scene_files):
        _, gt_path, pred_path = scene_files
        code, out, _ = run_cli(
            capsys, "eval-pose", "--gt", str(gt_path), "--pred", str(pred_path),
            "--format", "markdown", "--jobs", "1",
        )
        assert code == 0
        assert out.startswith("| scene")

    def test_missing_file_is_error_exit(self, capsys, scene_files):
        _, gt_path, _ = scene_files
        code, _, err = run_cli(
            capsys, "eval-pose", "--gt", str(gt_path), "--pred", "/nonexistent.jsonl"
        )
        assert code == 2
        assert "error:" in err

    @pytest.mark.parametrize("bad", ["0", "1", "1.5", "-0.2"])
    def test_threshold_outside_unit_interval_refused(self, capsys, scene_files, bad):
        _, gt_path, pred_path = scene_files
        with pytest.raises(SystemExit) as exc:
            main(["eval-pose", "--gt", str(gt_path), "--pred", str(pred_path),
                  "--oks-threshold", bad])
        assert exc.value.code == 2
        capsys.readouterr()


class TestEvalTrack:
    def test_perfect_fixture(self, capsys, scene_files):
        _, gt_path, pred_path = scene_files
        code, out, _ = run_cli(
            capsys, "eval-track", "--gt", str(gt_path), "--pred", str(pred_path), "--jobs", "1"
        )
        assert code == 0
        row = csv_rows(out)[-1]
        assert row["mota"] == "1.000" and row["idsw"] == "0"
        assert row["ospa2"] == "0.000"
        assert row["idf1"] == "1.000"

    def test_split_id_shows_one_switch(self, capsys, tmp_path, scene_files):
        gt, gt_path, _ = scene_files
        pred = perfect_predictions(gt)

        first_gt_id = gt.frames[0].poses[0].track_id
        switch_at = 3

        def mutate(fid, poses):
            out = []
            for p in poses:
                if p.track_id == first_gt_id and fid >= switch_at:
                    out.append(relabel(p, 77))
                else:
                    out.append(p)
            return out

        split = with_poses(pred, mutate)
        split_path = tmp_path / "split.jsonl"
        save_annotations(split, split_path, "prediction")
        code, out, _ = run_cli(
            capsys, "eval-track", "--gt", str(gt_path), "--pred", str(split_path), "--jobs", "1"
        )
        assert code == 0
        row = csv_rows(out)[-1]
        assert row["idsw"] == "1"

    def test_json_report_equals_library_api(self, capsys, scene_files):
        gt, gt_path, pred_path = scene_files
        code, out, _ = run_cli(
            capsys, "eval-track", "--gt", str(gt_path), "--pred", str(pred_path),
            "--format", "json-report", "--jobs", "1",
        )
        from_cli = json.loads(out)
        schema = KeypointSchema.default()
        pred = load_annotations(pred_path, "prediction", schema)
        expected = track_report([gt], [pred], schema)
        assert from_cli == json.loads(json.dumps(expected))


class TestStats:
    def test_single_track_mean_printed(self, capsys, tmp_path):
        rng = np.random.default_rng(2)
        frames = tuple(
            FrameAnnotations(t, (Pose(
                tuple(Keypoint(100.0 + j, 50.0 + j, 2) for j in range(NUM_KEYPOINTS)),
                bbox=(90.0, 40.0, 40.0, 80.0), track_id=1,
            ),))
            for t in range(7)
        )
        path = tmp_path / "one.jsonl"
        save_annotations(SequenceSet("one", frames), path, "ground_truth")
        code, out, _ = run_cli(capsys, "stats", "--gt", str(path))
        assert code == 0
        assert "mean_track_length,7.000" in out
        assert "track_count,1" in out


class TestMerge:
    def test_two_view_merge_selects_higher_visibility(self, capsys, tmp_path):
        vis_a = [2] * NUM_KEYPOINTS
        vis_b = [1] * NUM_KEYPOINTS
        vis_a[5], vis_b[5] = 0, 2
        kp_a = tuple(Keypoint(10.0 + j, 60.0, vis_a[j]) for j in range(NUM_KEYPOINTS))
        kp_b = tuple(Keypoint(40.0 + j, 60.0, vis_b[j]) for j in range(NUM_KEYPOINTS))
        cam0 = SequenceSet("cam0", (FrameAnnotations(
            0, (Pose(kp_a, bbox=(0.0, 0.0, 80.0, 100.0), track_id=1),)),))
        cam1 = SequenceSet("cam1", (FrameAnnotations(
            0, (Pose(kp_b, bbox=(30.0, 0.0, 80.0, 100.0), track_id=1),)),))
        f0 = tmp_path / "cam0.jsonl"
        f1 = tmp_path / "cam1.jsonl"
        save_annotations(cam0, f0, "ground_truth")
        save_annotations(cam1, f1, "ground_truth")
        layout_path = tmp_path / "layout.txt"
        save_camera_layout(CameraLayout(offsets=(0.0, 1880.0)), layout_path)
        out_path = tmp_path / "merged.jsonl"
        code, out, _ = run_cli(
            capsys, "merge", "--cameras", str(f0), str(f1), "--kind", "ground_truth",
            "--layout", str(layout_path), "--out", str(out_path),
        )
        assert code == 0
        merged = load_annotations(out_path, "ground_truth")
        pose = merged.frames[0].poses[0]
        assert pose.keypoints[0].x == 10.0          # view A keeps joint 0
        assert pose.keypoints[5].x == 45.0 + 1880.0  # view B wins joint 5


class TestOracleCheck:
    def test_reports_pass_and_small_deviation(self, capsys):
        code, out, _ = run_cli(capsys, "oracle-check", "--trials", "40", "--seed", "3")
        assert code == 0
        assert out.count("PASS") == 3
        assert "FAIL" not in out


class TestParallelism:
    def test_jobs_do_not_change_output(self, capsys, tmp_path, fixture_dirs):
        gt_dir, pred_dir = fixture_dirs
        blobs = []
        for jobs in ("1", "3"):
            out = tmp_path / f"jobs{jobs}.json"
            code, _, _ = run_cli(
                capsys, "eval-pose", "--gt", str(gt_dir), "--pred", str(pred_dir),
                "--format", "json-report", "--jobs", jobs, "--out", str(out),
            )
            assert code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]

    def test_map_sweep_flag(self, capsys, scene_files):
        _, gt_path, pred_path = scene_files
        code, out, _ = run_cli(
            capsys, "eval-pose", "--gt", str(gt_path), "--pred", str(pred_path),
            "--map-sweep", "--format", "json-report", "--jobs", "1",
        )
        assert code == 0
        report = json.loads(out)
        assert report["dataset"]["map"] == 1.0  # perfect predictions at all thresholds
        assert len(report["dataset"]["map_thresholds"]) == 10


class TestDeterminism:
    def test_repeat_runs_byte_identical(self, capsys, scene_files, tmp_path):
        _, gt_path, pred_path = scene_files
        outputs = []
        for i in range(2):
            out_file = tmp_path / f"run{i}.json"
            code, _, _ = run_cli(
                capsys, "eval-pose", "--gt", str(gt_path), "--pred", str(pred_path),
                "--format", "json-report", "--out", str(out_file),
            )
            assert code == 0
            outputs.append(out_file.read_bytes())
        assert outputs[0] == outputs[1]
