import numpy as np
import pytest

from stereo_lab.geometry import CameraRig
from stereo_lab.synth import planted_shift_pair

_ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
    if detail:
        line += f"  ({detail})"
    _ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rig():
    return CameraRig(focal_px=100.0, baseline_m=2.0, cx=31.5, cy=19.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20251014)


@pytest.fixture(scope="session")
def planted_volume():
    """Census correlation of a noise pair with a planted 7 px shift."""
    from stereo_lab.cost_volume import build_correlation, featurize

    rng = np.random.default_rng(7)
    left, right = planted_shift_pair(rng, 40, 96, 7)
    cost = build_correlation(featurize(left, "census", 5), featurize(right, "census", 5))
    return cost, 7
