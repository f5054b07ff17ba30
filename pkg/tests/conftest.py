import json
import time
from pathlib import Path

import pytest

from minsym.cli import main as cli_main
from minsym.core import AttributeSpace, GameInstance, ObjectVector

# Color values: red=0, blue=1, green=2. Shape values: triangle=0, circle=1, square=2.
RED, BLUE, GREEN = 0, 1, 2
TRIANGLE, CIRCLE, SQUARE = 0, 1, 2

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): names an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker:
        _ACCEPTANCE_RESULTS.append((marker.args[0], report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}")


@pytest.fixture
def two_attribute_space():
    return AttributeSpace(num_attributes=2, num_values=3)


@pytest.fixture
def easy_instance(two_attribute_space):
    """Target (red, triangle) vs distractors sharing no attribute value: one symbol suffices."""
    return GameInstance(
        two_attribute_space,
        (
            ObjectVector((RED, TRIANGLE)),
            ObjectVector((BLUE, CIRCLE)),
            ObjectVector((GREEN, SQUARE)),
            ObjectVector((BLUE, SQUARE)),
        ),
        target_index=0,
    )


@pytest.fixture
def hard_instance(two_attribute_space):
    """Target (red, triangle); one distractor shares the color, one the shape: two symbols needed."""
    return GameInstance(
        two_attribute_space,
        (
            ObjectVector((RED, TRIANGLE)),
            ObjectVector((RED, CIRCLE)),
            ObjectVector((BLUE, TRIANGLE)),
        ),
        target_index=0,
    )


@pytest.fixture
def duplicate_instance(two_attribute_space):
    """A distractor identical to the target: no message can separate them."""
    return GameInstance(
        two_attribute_space,
        (ObjectVector((RED, TRIANGLE)), ObjectVector((RED, TRIANGLE))),
        target_index=0,
    )


# Shared full-scale dataset for the acceptance suite: 20 attributes, 4 values,
# 63 distractors, buckets {2, 3} with 1000 instances each. Sampled once
# through the CLI; criteria reuse it and record the elapsed time.
FULL_SCALE_SEED = 20250810


@pytest.fixture(scope="session")
def full_scale_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("fullscale") / "dataset"
    started = time.monotonic()
    code = cli_main(
        [
            "sample",
            "--out",
            str(out),
            "--buckets",
            "2,3",
            "--per-bucket",
            "1000",
            "--seed",
            str(FULL_SCALE_SEED),
        ]
    )
    elapsed = time.monotonic() - started
    assert code == 0
    return {"dir": out, "elapsed": elapsed, "seed": FULL_SCALE_SEED}


def write_instance_file(path: Path, instance: GameInstance) -> Path:
    payload = {
        "num_values": instance.space.num_values,
        "target_index": instance.target_index,
        "objects": [list(o.values) for o in instance.objects],
    }
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path
