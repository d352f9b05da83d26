# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
import argparse
import pytest
from unittest.mock import MagicMock

from lipcert.errors import ConfigError, ParseError, ValidationError
from lipcert.mixins import helpers as helpers_module
from lipcert.mixins.helpers import DEFAULTS, HelpersMixin
from lipcert.geometry import Ball
from lipcert.zoo import EuclideanNorm, Logistic


class FakeHelpers(HelpersMixin):
    def __init__(self, **args):
        self.logger = MagicMock()
        self.args = argparse.Namespace(**args)
        self.config = {}


@pytest.fixture
def version_file(tmp_path, monkeypatch):
    path = tmp_path / "VERSION"
    path.write_text("v0.1.0\n")
    monkeypatch.setattr(helpers_module, "VERSION_FILE", path)
    return path


class TestLoadConfigFromFile:
    def test_loads_valid_config(self, tmp_path, version_file):
        config_file = tmp_path / "config.yaml"
        config_file.write_text("""
estimator:
  delta: 0.01
  alpha_grid: [3, 30]
  cover: shell
  shell_slack: 2.5
profile:
  rmin: 1
  rmax: 1000
  directions: 64
verification:
  pairs: 500
seed: 0
workers: 2
""")

        config = FakeHelpers().load_config(str(tmp_path))

        assert config["estimator"] == {"delta": 0.01, "alpha_grid": [3.0, 30.0], "cover": "shell", "shell_slack": 2.5}
        assert config["profile"]["rmin"] == 1.0
        assert config["profile"]["rmax"] == 1000.0
        assert config["profile"]["directions"] == 64
        assert config["profile"]["plateau_rel_tol"] == 0.01
        assert config["verification"]["pairs"] == 500
        assert config["verification"]["triples"] == 10000
        assert config["seed"] == 0
        assert config["workers"] == 2
        assert config["config_from"] == "file"
        assert config["config_path"] == str(tmp_path)
        assert config["version"] == "v0.1.0"

    def test_accepts_file_path(self, tmp_path, version_file):
        config_file = tmp_path / "custom.yaml"
        config_file.write_text("estimator:\n  alpha_grid: 2,4\n")

        config = FakeHelpers().load_config(str(config_file))

        assert config["estimator"]["alpha_grid"] == [2.0, 4.0]
        assert config["config_path"] == str(tmp_path)

    def test_env_var_points_at_config(self, tmp_path, monkeypatch, version_file):
        (tmp_path / "config.yaml").write_text("chunk_size: 128\n")
        monkeypatch.setenv("LIPCERT_CONFIG", str(tmp_path))

        config = FakeHelpers().load_config(None)

        assert config["chunk_size"] == 128
        assert config["config_from"] == "file"

    def test_defaults_are_not_mutated(self, tmp_path, version_file):
        (tmp_path / "config.yaml").write_text("estimator:\n  delta: 0.2\n")
        FakeHelpers().load_config(str(tmp_path))
        assert DEFAULTS["estimator"] == {}


class TestLoadConfigDefaults:
    def test_defaults_when_no_config(self, version_file):
        config = FakeHelpers().load_config(None)

        assert config["estimator"] == {"delta": 1e-3, "alpha_grid": [2.0, 5.0, 10.0, 50.0, 100.0], "cover": "cross", "shell_slack": 1.0}
        assert config["geometry"]["shell_max_grid_points"] == 60000
        assert config["profile"] == {
            "rmin": 10.0,
            "rmax": 1e6,
            "points_per_decade": 1,
            "directions": 512,
            "growth_factor_threshold": 10.0,
            "plateau_rel_tol": 0.01,
        }
        assert config["verification"]["containment_directions"] == 100000
        assert config["seed"] == 42
        assert config["workers"] == 4
        assert config["chunk_size"] == 4096
        assert config["debug"] is False
        assert config["config_from"] == "env"
        assert config["config_path"] is None

    def test_directory_without_file_falls_back(self, tmp_path, version_file):
        helpers = FakeHelpers()
        config = helpers.load_config(str(tmp_path))
        assert config["config_from"] == "env"
        helpers.logger.info.assert_called_once()

    def test_env_vars(self, monkeypatch, version_file):
        monkeypatch.setenv("LIPCERT_DELTA", "0.05")
        monkeypatch.setenv("LIPCERT_ALPHA_GRID", "4, 8")
        monkeypatch.setenv("LIPCERT_SEED", "7")
        monkeypatch.setenv("LIPCERT_DEBUG", "true")

        config = FakeHelpers().load_config(None)

        assert config["estimator"]["delta"] == 0.05
        assert config["estimator"]["alpha_grid"] == [4.0, 8.0]
        assert config["seed"] == 7
        assert config["debug"] is True

    def test_file_wins_over_env(self, tmp_path, monkeypatch, version_file):
        (tmp_path / "config.yaml").write_text("seed: 3\n")
        monkeypatch.setenv("LIPCERT_SEED", "7")
        assert FakeHelpers().load_config(str(tmp_path))["seed"] == 3

    def test_zero_in_file_is_kept(self, tmp_path, monkeypatch, version_file):
        (tmp_path / "config.yaml").write_text("profile:\n  directions: 0\nseed: 0\n")
        monkeypatch.setenv("LIPCERT_DIRECTIONS", "64")
        monkeypatch.setenv("LIPCERT_SEED", "7")
        config = FakeHelpers().load_config(str(tmp_path))
        assert config["profile"]["directions"] == 0
        assert config["seed"] == 0

    @pytest.mark.parametrize("body, expected", [("debug: false\n", False), ("debug: 'false'\n", False), ("debug: 'True'\n", True), ("debug: true\n", True)])
    def test_debug_flag_from_file(self, tmp_path, version_file, body, expected):
        (tmp_path / "config.yaml").write_text(body)
        assert FakeHelpers().load_config(str(tmp_path))["debug"] is expected

    def test_debug_false_in_file_beats_env(self, tmp_path, monkeypatch, version_file):
        (tmp_path / "config.yaml").write_text("debug: false\n")
        monkeypatch.setenv("LIPCERT_DEBUG", "true")
        assert FakeHelpers().load_config(str(tmp_path))["debug"] is False


class TestLoadConfigValidation:
    @pytest.mark.parametrize(
        "body, path",
        [
            ("estimator:\n  delta: 1.5\n", "estimator.delta"),
            ("estimator:\n  cover: hexagon\n", "estimator.cover"),
            ("estimator:\n  shell_slack: -1\n", "estimator.shell_slack"),
            ("estimator:\n  alpha_grid: two,three\n", "estimator.alpha_grid"),
            ("profile:\n  rmin: 100\n  rmax: 10\n", "profile"),
            ("profile:\n  directions: -4\n", "profile.directions"),
            ("verification:\n  pairs: -1\n", "verification.pairs"),
            ("workers: -2\n", "workers"),
            ("estimator: 5\n", "estimator"),
        ],
    )
    def test_bad_values(self, tmp_path, version_file, body, path):
        (tmp_path / "config.yaml").write_text(body)
        with pytest.raises(ConfigError) as err:
            FakeHelpers().load_config(str(tmp_path))
        assert err.value.path == path
        assert err.value.exit_code == 2

    def test_not_a_number(self, tmp_path, version_file):
        (tmp_path / "config.yaml").write_text("profile:\n  rmax: far\n")
        with pytest.raises(ConfigError, match="invalid configuration value"):
            FakeHelpers().load_config(str(tmp_path))

    def test_not_a_mapping(self, tmp_path, version_file):
        (tmp_path / "config.yaml").write_text("- just\n- a list\n")
        with pytest.raises(ConfigError, match="must hold a mapping"):
            FakeHelpers().load_config(str(tmp_path))

    def test_broken_yaml(self, tmp_path, version_file):
        (tmp_path / "config.yaml").write_text("estimator: [unclosed\n")
        with pytest.raises(ConfigError, match="failed to load"):
            FakeHelpers().load_config(str(tmp_path))


class TestLoadConfigVersion:
    def test_app_version_env_overrides_file(self, monkeypatch, version_file):
        monkeypatch.setenv("APP_VERSION", "v9.9.9")
        assert FakeHelpers().load_config(None)["version"] == "v9.9.9"

    def test_dev_tier_appends_suffix(self, monkeypatch, version_file):
        monkeypatch.setenv("APP_TIER", "dev")
        assert FakeHelpers().load_config(None)["version"] == "v0.1.0:DEV"

    def test_missing_version_file(self, tmp_path, monkeypatch):
        monkeypatch.setattr(helpers_module, "VERSION_FILE", tmp_path / "gone")
        assert FakeHelpers().load_config(None)["version"] == "dev"


class TestLoadConfigPathNotFound:
    def test_nonexistent_path_raises_config_error(self, tmp_path):
        """Config path that is neither file nor directory should raise ConfigError."""
        nonexistent = str(tmp_path / "does_not_exist")

        with pytest.raises(ConfigError, match="config path not found"):
            FakeHelpers().load_config(nonexistent)


class TestParsing:
    def test_parse_floats_from_text(self):
        assert FakeHelpers().parse_floats("1, 2.5,-3", "x") == [1.0, 2.5, -3.0]

    def test_parse_floats_from_list(self):
        assert FakeHelpers().parse_floats([1, 2], "x") == [1.0, 2.0]

    @pytest.mark.parametrize("value", ["", "1,a", "1,nan", "inf"])
    def test_parse_floats_rejects(self, value):
        with pytest.raises(ValidationError) as err:
            FakeHelpers().parse_floats(value, "--center")
        assert err.value.path == "--center"

    def test_parse_ball(self):
        ball = FakeHelpers().parse_ball("1,2", 3.0)
        assert ball.center.tolist() == [1.0, 2.0]
        assert ball.radius == 3.0


class TestOptions:
    def test_argument_wins(self):
        helpers = FakeHelpers(delta=0.5)
        helpers.config = {"estimator": {"delta": 0.1}}
        assert helpers.option("delta", "estimator", "delta") == 0.5

    def test_config_when_argument_missing(self):
        helpers = FakeHelpers(delta=None)
        helpers.config = {"estimator": {"delta": 0.1}, "seed": 42}
        assert helpers.option("delta", "estimator", "delta") == 0.1
        assert helpers.sample_seed() == 42

    def test_seed_zero_is_kept(self):
        helpers = FakeHelpers(seed=0)
        helpers.config = {"seed": 42}
        assert helpers.sample_seed() == 0


class TestFunctions:
    def test_load_function(self, write_spec):
        helpers = FakeHelpers(fn=write_spec({"kind": "logistic", "b": [3, 4]}))
        spec = helpers.load_function()
        assert isinstance(spec, Logistic)
        helpers.logger.debug.assert_called_once()

    def test_load_function_requires_path(self):
        with pytest.raises(ValidationError) as err:
            FakeHelpers(fn=None).load_function()
        assert err.value.path == "--fn"

    def test_load_function_bad_file(self, tmp_path):
        with pytest.raises(ParseError):
            FakeHelpers(fn=str(tmp_path / "missing.json")).load_function()

    def test_function_dim_from_spec(self, zoo):
        assert FakeHelpers(dim=None).function_dim(zoo["logistic34"]) == 2

    def test_function_dim_from_argument(self, zoo):
        assert FakeHelpers(dim=5).function_dim(EuclideanNorm()) == 5
        with pytest.raises(ValidationError, match="pass --dim"):
            FakeHelpers(dim=None).function_dim(EuclideanNorm())

    def test_function_dim_mismatch(self, zoo):
        with pytest.raises(ValidationError, match="has dimension 2"):
            FakeHelpers(dim=3).function_dim(zoo["logistic34"])

    def test_random_points_are_seeded(self):
        helpers = FakeHelpers()
        first = helpers.random_points_in(Ball([0.0, 0.0], 1.0), 10, seed=1)
        second = helpers.random_points_in(Ball([0.0, 0.0], 1.0), 10, seed=1)
        assert first.tolist() == second.tolist()
