import json
import os
import pathlib
import shutil

import pytest

REPO = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def schema():
    return json.loads((REPO / "docs" / "schema.json").read_text())


@pytest.fixture(scope="session")
def corescope_bin():
    path = os.environ.get("CORESCOPE_BIN") or shutil.which("corescope")
    if not path:
        pytest.skip("corescope executable not found (set CORESCOPE_BIN)")
    return path
