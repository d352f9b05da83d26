# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
import argparse
import pytest
from concurrent.futures import ThreadPoolExecutor
from unittest.mock import patch

from lipcert.base import Base
from lipcert.mixins.helpers import HelpersMixin


class FakeBase(HelpersMixin, Base):
    """Minimal class to test Base lifecycle without full mixin stack."""

    pass


def make_args(**kwargs):
    defaults = {"command": "zoo", "config": None, "debug": None, "workers": None}
    return argparse.Namespace(**{**defaults, **kwargs})


class TestInit:
    def test_reads_config_and_command(self):
        base = FakeBase(args=make_args())
        assert base.command == "zoo"
        assert base.workers == 4
        assert base.chunk_size == 4096
        assert base.executor is None

    def test_workers_argument_wins(self, monkeypatch):
        monkeypatch.setenv("LIPCERT_WORKERS", "8")
        assert FakeBase(args=make_args(workers=2)).workers == 2
        assert FakeBase(args=make_args()).workers == 8

    def test_debug_flag(self):
        with patch.object(FakeBase, "enable_debug") as enable_debug:
            FakeBase(args=make_args(debug=True))
        enable_debug.assert_called_once()

    def test_debug_from_env(self, monkeypatch):
        monkeypatch.setenv("LIPCERT_DEBUG", "true")
        with patch.object(FakeBase, "enable_debug") as enable_debug:
            FakeBase(args=make_args())
        enable_debug.assert_called_once()

    def test_no_debug_by_default(self):
        with patch.object(FakeBase, "enable_debug") as enable_debug:
            FakeBase(args=make_args())
        enable_debug.assert_not_called()


class TestContextManager:
    def test_executor_for_several_workers(self):
        with FakeBase(args=make_args(workers=3)) as base:
            executor = base.executor
            assert isinstance(executor, ThreadPoolExecutor)
            assert executor.submit(sum, [1, 2, 3]).result() == 6
        assert base.executor is None
        with pytest.raises(RuntimeError):
            executor.submit(sum, [1])

    def test_serial_for_one_worker(self):
        with FakeBase(args=make_args(workers=1)) as base:
            assert base.executor is None

    def test_executor_shut_down_on_error(self):
        base = FakeBase(args=make_args(workers=2))
        with pytest.raises(ValueError):
            with base:
                raise ValueError("boom")
        assert base.executor is None

    def test_elapsed_ms_grows(self):
        with FakeBase(args=make_args(workers=1)) as base:
            first = base.elapsed_ms()
            assert first >= 0.0
            assert base.elapsed_ms() >= first
