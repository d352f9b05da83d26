# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
import json
import os
import pytest

import numpy as np

from lipcert.zoo import catalog


@pytest.fixture(autouse=True)
def clean_lipcert_env(monkeypatch):
    """Keep a developer's LIPCERT_* settings out of the tests."""
    for name in list(os.environ):
        if name.startswith("LIPCERT_") or name in ("APP_VERSION", "APP_TIER"):
            monkeypatch.delenv(name, raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20250101)


@pytest.fixture
def zoo():
    return {spec.function_id: spec for spec in catalog()}


@pytest.fixture
def write_spec(tmp_path):
    def _write(document, name="fn.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)

    return _write


@pytest.fixture
def spec_dir(tmp_path, zoo):
    """Every catalog example written as <id>.json, the way `lipcert zoo --write-dir` does."""
    folder = tmp_path / "specs"
    folder.mkdir()
    for name, spec in zoo.items():
        (folder / f"{name}.json").write_text(json.dumps(spec.to_document()))
    return folder
