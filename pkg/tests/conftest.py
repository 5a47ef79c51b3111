"""
Shared fixtures for rng_audit tests
"""

import json
from pathlib import Path

import pytest


CASE_STUDY_TEXT = """\
layout M=1 P=1 E=1
H M0
CNOT M0 P0
H M0
success {0,1}
output m
"""


@pytest.fixture
def case_study_text():
    """Case-study circuit in canonical text form"""
    return CASE_STUDY_TEXT


@pytest.fixture
def case_study_file(tmp_path):
    """Case-study circuit written to a temporary file"""
    path = tmp_path / "case_study.circ"
    path.write_text(CASE_STUDY_TEXT, encoding="utf-8")
    return path


GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def golden():
    """Compare a JSON-serializable value with its recorded copy under tests/golden

    A missing file is written from the current value and the test is
    skipped; commit the file so later runs compare exactly.
    """
    def check(name, value):
        path = GOLDEN_DIR / f"{name}.json"
        if not path.exists():
            GOLDEN_DIR.mkdir(exist_ok=True)
            path.write_text(json.dumps(value, indent=2, sort_keys=True) + "\n", encoding="utf-8")
            pytest.skip(f"recorded {path.name}; rerun to compare")
        assert value == json.loads(path.read_text(encoding="utf-8"))
    return check
