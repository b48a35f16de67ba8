import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from nestcde.shapes import L_SHAPE, rectangle

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).resolve().parents[1] / "src" / "nestcde" / "data"

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def unit_square():
    return rectangle(1.0, 1.0)


@pytest.fixture
def l_shape():
    from nestcde.geom import SimplePolygon

    return SimplePolygon(L_SHAPE)


def bundled(name: str) -> dict:
    return json.loads((DATA / f"{name}.json").read_text())
