# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
import argparse
import json
import math
import pytest
from unittest.mock import MagicMock

import numpy as np

from lipcert.errors import ParseError, ValidationError
from lipcert.mixins.helpers import HelpersMixin
from lipcert.mixins.publish import PublishMixin, csv_cell, plain


class FakePublisher(HelpersMixin, PublishMixin):
    def __init__(self, command="ball", **args):
        self.config = {"version": "v0.1.0-test"}
        self.command = command
        self.args = argparse.Namespace(**{"format": "json", "out": None, **args})
        self.logger = MagicMock()

    def elapsed_ms(self):
        return 12.3456


class TestPlain:
    def test_non_finite_floats_become_strings(self):
        assert plain([math.inf, -math.inf, math.nan, 1.5]) == ["inf", "-inf", "nan", 1.5]

    def test_numpy_values_unwrapped(self):
        value = plain({"a": np.float64(2.0), "b": np.int64(3), "c": np.array([1.0, np.inf]), "d": np.bool_(True)})
        assert value == {"a": 2.0, "b": 3, "c": [1.0, "inf"], "d": True}
        assert type(value["b"]) is int
        assert type(value["d"]) is bool

    def test_csv_cells(self):
        assert csv_cell(None) == ""
        assert csv_cell(0.1) == "0.1"
        assert csv_cell(1e-17) == "1e-17"
        assert csv_cell(np.float64(1.0) / 3.0) == repr(1.0 / 3.0)
        assert csv_cell(math.inf) == "inf"


class TestBuildReport:
    def test_envelope(self):
        pub = FakePublisher()
        report = pub.build_report({"ball": {"center": [0.0], "radius": 1.0}}, {"certificate": {"L": math.inf}})
        assert report == {
            "schema_version": 1,
            "tool_version": "v0.1.0-test",
            "command": "ball",
            "inputs": {"ball": {"center": [0.0], "radius": 1.0}},
            "outputs": {"certificate": {"L": "inf"}},
            "timing_ms": 12.346,
        }
        assert pub.validate_report(report) == report

    def test_json_has_no_bare_infinity(self):
        pub = FakePublisher()
        text = pub.report_json(pub.build_report({}, {"value": math.nan}))
        assert text.endswith("\n")
        assert "NaN" not in text
        assert json.loads(text)["outputs"]["value"] == "nan"


class TestEmit:
    def test_writes_json_to_out(self, tmp_path):
        out = tmp_path / "report.json"
        pub = FakePublisher(out=str(out))
        pub.emit(pub.build_report({}, {"x": 1}))
        assert json.loads(out.read_text())["outputs"] == {"x": 1}
        pub.logger.info.assert_called_once()

    def test_writes_to_stdout(self, capsys):
        pub = FakePublisher()
        pub.emit(pub.build_report({}, {"x": 1}))
        assert json.loads(capsys.readouterr().out)["command"] == "ball"

    def test_csv_table(self, tmp_path):
        out = tmp_path / "rows.csv"
        pub = FakePublisher(command="certseq", format="csv", out=str(out))
        pub.emit(pub.build_report({}, {}), (("r", "L", "reference_bound"), [(10.0, 1.25, None), (100.0, 0.1, 2.0)]))
        assert out.read_text() == "r,L,reference_bound\n10.0,1.25,\n100.0,0.1,2.0\n"

    def test_csv_needs_a_table(self):
        pub = FakePublisher(command="ball", format="csv")
        with pytest.raises(ValidationError, match="only available for modulus and certseq") as err:
            pub.emit(pub.build_report({}, {}))
        assert err.value.path == "--format"

    def test_unwritable_out(self, tmp_path):
        pub = FakePublisher(out=str(tmp_path / "missing" / "report.json"))
        with pytest.raises(ValidationError, match="cannot write report"):
            pub.emit(pub.build_report({}, {}))


class TestReading:
    def test_stored_report_reads_back(self, tmp_path):
        pub = FakePublisher()
        path = tmp_path / "r.json"
        path.write_text(pub.report_json(pub.build_report({}, {"certificate": {"L": 1.0}})))
        assert pub.unwrap(pub.read_json_file(path, "certificate"), "certificate", ("ball",)) == {"L": 1.0}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError, match="cannot read report"):
            FakePublisher().read_json_file(tmp_path / "none.json", "report")

    def test_file_that_is_not_utf8(self, tmp_path):
        path = tmp_path / "cert.json"
        path.write_bytes(b'{"L": "\xff"}')
        with pytest.raises(ParseError, match="certificate .* is not valid UTF-8") as err:
            FakePublisher().read_json_file(path, "certificate")
        assert err.value.exit_code == 2

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError, match="not valid JSON"):
            FakePublisher().read_json_file(path, "certificate")

    def test_rejects_unknown_report_fields(self):
        pub = FakePublisher()
        report = {**pub.build_report({}, {}), "extra": True}
        with pytest.raises(ParseError):
            pub.validate_report(report)

    def test_rejects_other_schema_versions(self):
        pub = FakePublisher()
        with pytest.raises(ParseError) as err:
            pub.validate_report({**pub.build_report({}, {}), "schema_version": 2})
        assert err.value.path == "$.schema_version"

    def test_unwrap(self):
        pub = FakePublisher()
        report = pub.build_report({}, {"certificate": {"L": 2.0}})
        assert pub.unwrap(report, "certificate", ("ball", "tune")) == {"L": 2.0}
        assert pub.unwrap({"L": 2.0}, "certificate", ("ball",)) == {"L": 2.0}

    def test_unwrap_wrong_command(self):
        pub = FakePublisher(command="zoo")
        with pytest.raises(ParseError, match="a zoo report holds no certificate"):
            pub.unwrap(pub.build_report({}, {"functions": []}), "certificate", ("ball", "tune"))
