import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stereo_lab.errors import FormatError, PreconditionError
from stereo_lab.geometry import (
    CameraRig,
    Point3D,
    backproject,
    depth_to_disparity,
    disparity_to_depth,
    project_to_stereo,
    read_calib,
    write_calib,
)


def test_formula_examples():
    assert disparity_to_depth(1.0, CameraRig(1.0, 1.0, 0, 0)) == 1.0
    r = CameraRig(100.0, 2.0, 0, 0)
    assert disparity_to_depth(4.0, r) == 50.0
    assert depth_to_disparity(50.0, r) == 4.0


def test_dense_zero_and_invalid_disparity_become_invalid(rig):
    d = np.array([[0.0, 4.0], [np.nan, -1.0]])
    z = disparity_to_depth(d, rig)
    assert z[0, 1] == pytest.approx(50.0)
    assert np.isnan(z[0, 0]) and np.isnan(z[1, 0]) and np.isnan(z[1, 1])
    assert np.isnan(depth_to_disparity(np.array([np.nan]), rig)[0])


@pytest.mark.parametrize("bad", [0.0, -2.0])
def test_scalar_domain_errors(rig, bad):
    with pytest.raises(PreconditionError):
        disparity_to_depth(bad, rig)
    with pytest.raises(PreconditionError):
        depth_to_disparity(bad, rig)


def test_rig_rejects_nonpositive():
    with pytest.raises(PreconditionError):
        CameraRig(0.0, 1.0, 0, 0)
    with pytest.raises(PreconditionError):
        CameraRig(1.0, -1.0, 0, 0)


def test_round_trip_fixed_value(rig):
    d = 7.25
    assert abs(depth_to_disparity(disparity_to_depth(d, rig), rig) - d) < 1e-9


@given(st.floats(min_value=1e-3, max_value=1e4))
def test_round_trip_relative(d):
    r = CameraRig(721.5, 0.54, 600.0, 180.0)
    back = depth_to_disparity(disparity_to_depth(d, r), r)
    assert abs(back - d) <= 1e-9 * d


def test_backproject_examples(rig):
    p = backproject(rig.cy, rig.cx, 10.0, rig)
    assert p == Point3D(0.0, 0.0, 10.0)
    # one focal length right of the principal point at unit depth
    p = backproject(rig.cy, rig.cx + rig.focal_px, 1.0, rig)
    assert p.x == pytest.approx(1.0) and p.y == pytest.approx(0.0) and p.z == 1.0


def test_on_axis_projection(rig):
    proj = project_to_stereo(Point3D(0.0, 0.0, 50.0), rig)
    assert proj.left_col == rig.cx
    assert proj.right_col == pytest.approx(rig.cx - 4.0)
    assert proj.disparity == pytest.approx(depth_to_disparity(50.0, rig))


def test_random_points_rectified(rig, rng):
    n = 1000
    z = rng.uniform(1.0, 80.0, n)
    rows = rng.uniform(0, 39, n)
    cols = rng.uniform(0, 63, n)
    p = backproject(rows, cols, z, rig)
    proj = project_to_stereo(p, rig)
    np.testing.assert_array_equal(proj.left_row, proj.right_row)
    np.testing.assert_allclose(proj.left_row, rows, atol=1e-6)
    np.testing.assert_allclose(proj.left_col, cols, atol=1e-6)
    np.testing.assert_allclose(proj.left_col - proj.right_col, depth_to_disparity(z, rig), atol=1e-6)


def test_out_of_frame_flag(rig):
    # disparity 40 px pushes the right projection left of column 0
    proj = project_to_stereo(backproject(10, 20, 5.0, rig), rig, shape=(40, 64))
    assert not proj.in_frame
    proj = project_to_stereo(backproject(10, 60, 50.0, rig), rig, shape=(40, 64))
    assert proj.in_frame


def test_project_rejects_behind_camera(rig):
    with pytest.raises(PreconditionError):
        project_to_stereo(Point3D(0.0, 0.0, -1.0), rig)


@settings(max_examples=50)
@given(st.floats(1.0, 2000.0), st.floats(0.01, 5.0), st.floats(-500, 500), st.floats(-500, 500))
def test_calib_round_trip(tmp_path_factory, f, b, cx, cy):
    path = tmp_path_factory.mktemp("calib") / "calib.txt"
    r = CameraRig(f, b, cx, cy)
    write_calib(r, path)
    assert read_calib(path) == r


def test_calib_parse_errors(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("focal_px=100\nbaseline_m=0.5\ncx=1\n")
    with pytest.raises(FormatError, match="missing"):
        read_calib(path)
    path.write_text("focal_px 100\n")
    with pytest.raises(FormatError):
        read_calib(path)
    path.write_text("# KITTI-ish\nfocal_px=721.5\nbaseline_m=0.54\ncx=609.6\ncy=172.9\n")
    assert read_calib(path).focal_px == 721.5
