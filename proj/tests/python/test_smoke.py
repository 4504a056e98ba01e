import math
import os

import pytest

import rbcscan

DATA_DIR = os.environ.get(
    "RBCSCAN_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data")
)


def test_analytic_model():
    cfg = rbcscan.ScanConfig(n_cells=64, t_scan_s=2.0, t_detect_s=0.2, ap=0.70)
    assert rbcscan.t1_analytic(cfg) == 65.0
    assert math.isclose(rbcscan.t2_analytic(cfg), 21.4, abs_tol=1e-12)
    ap, in_range = rbcscan.breakeven_ap(cfg)
    assert in_range
    assert math.isclose(ap, 0.01875, abs_tol=1e-12)


def test_simulation_is_deterministic_and_converges():
    cfg = rbcscan.ScanConfig()
    a = rbcscan.simulate_guided(cfg, seed=3, trials=200_000)
    b = rbcscan.simulate_guided(cfg, seed=3, trials=200_000, workers=2)
    assert a.mean_time_s == b.mean_time_s
    assert abs(a.mean_time_s - 21.4) <= 4 * a.stderr_s
    assert a.relative_error < 0.01
    multi = rbcscan.simulate_guided_multi(cfg, [5, 9], [9], seed=1, trials=10)
    assert math.isclose(multi.mean_time_s, 4.2)
    assert multi.analytic_time_s is None


def test_metrics():
    a = rbcscan.BBox(0, 0, 10, 10)
    assert rbcscan.iou(a, a) == 1.0
    assert math.isclose(rbcscan.iou(a, rbcscan.BBox(5, 0, 10, 10)), 1 / 3)
    assert math.isclose(
        rbcscan.average_precision([True, False, True], 2), (51 + 50 * 2 / 3) / 101
    )
    gts = [rbcscan.GroundTruthObject("img", rbcscan.BBox(10, 10, 40, 20))]
    dets = [rbcscan.Detection("img", rbcscan.BBox(10, 10, 40, 20), 0.9)]
    result = rbcscan.evaluate(dets, gts)
    assert len(result["ap_per_threshold"]) == 10
    assert result["map"] == 1.0
    flipped = rbcscan.flip_augment(gts[0], 1280)
    assert flipped.bbox == rbcscan.BBox(1230, 10, 40, 20)


def test_geometry():
    focal = rbcscan.calibrate_focal(14, 120, 124)
    cam = rbcscan.CameraModel(focal, 1280, 720)
    w, h = rbcscan.project_size(cam, 14, 7, 120, 640, 360)
    assert (round(w), round(h)) == (62, 31)
    assert rbcscan.is_detectable(30, 15)
    assert not rbcscan.is_detectable(28, 14)
    grid = rbcscan.CellGrid(8, 8, 1280, 720)
    assert rbcscan.cell_of_point(grid, 640, 360) == 36
    assert rbcscan.bbox_center(rbcscan.BBox(100, 200, 50, 30)) == (125, 215)


def test_profile_and_errors():
    profile = rbcscan.load_profile(
        os.path.join(DATA_DIR, "profiles", "digitized_from_figures", "mask_rcnn_smartphone.json")
    )
    assert rbcscan.ap_at(profile, 0.5) == 0.7
    mean = sum(rbcscan.ap_at(profile, t) for t in rbcscan.default_iou_thresholds()) / 10
    assert abs(mean - 0.5766) <= 1e-4
    with pytest.raises(rbcscan.DomainError):
        rbcscan.ap_at(profile, 0.3)
    with pytest.raises(rbcscan.UsageError):
        rbcscan.simulate_traditional(rbcscan.ScanConfig(), seed=1, trials=0)
    with pytest.raises(ValueError):
        rbcscan.calibrate_focal(0, 1, 1)
