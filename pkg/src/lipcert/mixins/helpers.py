# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
from __future__ import annotations

import copy
from deepmerge.merger import Merger
import logging
import math
import os
from pathlib import Path
import yaml
from typing import TYPE_CHECKING, Any, cast

import numpy as np

from lipcert.errors import ConfigError, ValidationError
from lipcert.geometry import Ball, Vector, as_vector
from lipcert.verification import sample_ball
from lipcert.zoo import FunctionSpec, load_function_spec

if TYPE_CHECKING:
    from lipcert.interface import LipCertProtocol as LipCert

VERSION_FILE = Path(__file__).resolve().parent.parent / "VERSION"

DEFAULTS: dict[str, Any] = {
    "estimator": {},
    "geometry": {},
    "profile": {},
    "verification": {},
}

MERGER = Merger(
    [(dict, "merge"), (list, "override"), (set, "union")],
    ["override"],
    ["override"],
)


def setting(value: Any, env: str, default: Any) -> Any:
    """The config file value unless it is missing, then the environment, then the default.

    Falsy file values such as `directions: 0` are kept.
    """
    return value if value is not None else os.getenv(env, default)


def truthy(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("true", "yes", "on", "1")


class HelpersMixin:

    # Utility functions ---------------------------------------------------------------------------

    def parse_floats(self: LipCert, value: Any, name: str) -> list[float]:
        """Comma separated text or a list of numbers."""
        items = [s.strip() for s in value.split(",") if s.strip()] if isinstance(value, str) else list(value)
        try:
            floats = [float(v) for v in items]
        except (TypeError, ValueError):
            raise ValidationError(f"expected comma separated numbers, got {value!r}", name)
        if not floats:
            raise ValidationError("expected at least one number", name)
        if not all(math.isfinite(v) for v in floats):
            raise ValidationError(f"numbers must be finite, got {value!r}", name)
        return floats

    def parse_vector(self: LipCert, value: Any, name: str) -> Vector:
        return as_vector(self.parse_floats(value, name), name)

    def parse_ball(self: LipCert, center: Any, radius: float) -> Ball:
        return Ball(self.parse_vector(center, "center"), radius)

    def option(self: LipCert, arg_name: str, section: str | None, key: str) -> Any:
        """The command line value when given, the configured one otherwise."""
        value = getattr(self.args, arg_name, None)
        if value is not None:
            return value
        return self.config[section][key] if section else self.config[key]

    def load_function(self: LipCert) -> FunctionSpec:
        path = getattr(self.args, "fn", None)
        if not path:
            raise ValidationError("a function spec file is required", "--fn")
        spec = load_function_spec(path)
        self.logger.debug(f"loaded {spec!r} from {path}")
        return spec

    def function_dim(self: LipCert, spec: FunctionSpec) -> int:
        dim = spec.dim if spec.dim is not None else getattr(self.args, "dim", None)
        if dim is None:
            raise ValidationError(f"{spec.function_id} works in any dimension, pass --dim", "--dim")
        if getattr(self.args, "dim", None) not in (None, dim):
            raise ValidationError(f"{spec.function_id} has dimension {dim}, got --dim {self.args.dim}", "--dim")
        if dim < 1:
            raise ValidationError(f"dimension must be positive, got {dim}", "--dim")
        return int(dim)

    def sample_seed(self: LipCert) -> int:
        return int(self.option("seed", None, "seed"))

    def enable_debug(self: LipCert) -> None:
        self.logger.setLevel(logging.DEBUG)
        for name in list(logging.root.manager.loggerDict):
            if name == "lipcert" or name.startswith("lipcert."):
                logging.getLogger(name).setLevel(logging.DEBUG)

    def random_points_in(self: LipCert, ball: Ball, count: int, seed: int) -> np.ndarray:
        return sample_ball(np.random.default_rng(seed), ball, count)

    # Configuration -------------------------------------------------------------------------------

    def _read_version_file(self: LipCert) -> str:
        try:
            return VERSION_FILE.read_text(encoding="utf-8").strip()
        except FileNotFoundError:
            return "dev"

    def load_config(self: LipCert, config_arg: Any | None) -> dict[str, Any]:
        version = os.getenv("APP_VERSION") or self._read_version_file()
        tier = os.getenv("APP_TIER", "prod")
        if tier == "dev":
            version += ":DEV"

        config_from = "env"
        loaded: dict[str, Any] = {}
        config_file: str | None = None

        # Determine config file path, none at all is fine
        config_path = config_arg or os.getenv("LIPCERT_CONFIG")
        if config_path:
            config_path = os.path.abspath(os.path.expanduser(config_path))
            if os.path.isdir(config_path):
                config_file = os.path.join(config_path, "config.yaml")
            elif os.path.isfile(config_path):
                config_file = config_path
                config_path = os.path.dirname(config_file)
            else:
                raise ConfigError(f"config path not found: {config_path}")

        if config_file and os.path.exists(config_file):
            try:
                with open(config_file, "r", encoding="utf-8") as f:
                    loaded = yaml.safe_load(f) or {}
                config_from = "file"
            except Exception as err:
                raise ConfigError(f"found {config_file} but failed to load: {err}")
            if not isinstance(loaded, dict):
                raise ConfigError(f"{config_file} must hold a mapping, got {type(loaded).__name__}")
        elif config_file:
            self.logger.info(f"config file not found at {config_file}, falling back to environment vars")

        merged = MERGER.merge(copy.deepcopy(DEFAULTS), loaded)
        for section in DEFAULTS:
            if not isinstance(merged.get(section), dict):
                raise ConfigError(f"`{section}` must be a mapping", section)
        estimator = cast(dict[str, Any], merged["estimator"])
        geometry = cast(dict[str, Any], merged["geometry"])
        profile = cast(dict[str, Any], merged["profile"])
        verification = cast(dict[str, Any], merged["verification"])

        try:
            # fmt: off
            estimator = {
                "delta":          float(str(setting(estimator.get("delta"),       "LIPCERT_DELTA", 1e-3))),
                "alpha_grid":     self.parse_floats(setting(estimator.get("alpha_grid"), "LIPCERT_ALPHA_GRID", "2,5,10,50,100"), "estimator.alpha_grid"),
                "cover":            str(setting(estimator.get("cover"),           "LIPCERT_COVER", "cross")),
                "shell_slack":    float(str(setting(estimator.get("shell_slack"), "LIPCERT_SHELL_SLACK", 1.0))),
            }
            geometry = {
                "shell_max_grid_points": int(str(setting(geometry.get("shell_max_grid_points"), "LIPCERT_SHELL_MAX_GRID_POINTS", 60000))),
            }
            profile = {
                "rmin":                    float(str(setting(profile.get("rmin"),                    "LIPCERT_RMIN", 10))),
                "rmax":                    float(str(setting(profile.get("rmax"),                    "LIPCERT_RMAX", 1e6))),
                "points_per_decade":         int(str(setting(profile.get("points_per_decade"),       "LIPCERT_POINTS_PER_DECADE", 1))),
                "directions":                int(str(setting(profile.get("directions"),              "LIPCERT_DIRECTIONS", 512))),
                "growth_factor_threshold": float(str(setting(profile.get("growth_factor_threshold"), "LIPCERT_GROWTH_FACTOR", 10))),
                "plateau_rel_tol":         float(str(setting(profile.get("plateau_rel_tol"),         "LIPCERT_PLATEAU_TOL", 0.01))),
            }
            verification = {
                "pairs":                  int(str(setting(verification.get("pairs"),                  "LIPCERT_PAIRS", 10000))),
                "triples":                int(str(setting(verification.get("triples"),                "LIPCERT_TRIPLES", 10000))),
                "containment_directions": int(str(setting(verification.get("containment_directions"), "LIPCERT_CONTAINMENT_DIRECTIONS", 100000))),
            }

            config = {
                "estimator":    estimator,
                "geometry":     geometry,
                "profile":      profile,
                "verification": verification,
                "seed":         int(str(setting(merged.get("seed"),       "LIPCERT_SEED", 42))),
                "workers":      int(str(setting(merged.get("workers"),    "LIPCERT_WORKERS", 4))),
                "chunk_size":   int(str(setting(merged.get("chunk_size"), "LIPCERT_CHUNK_SIZE", 4096))),
                "debug":       truthy(setting(merged.get("debug"),        "LIPCERT_DEBUG", False)),
                "config_from":  config_from,
                "config_path":  config_path,
                "version":      version,
            }
            # fmt: on
        except ValidationError as err:
            raise ConfigError(err.message, err.path)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"invalid configuration value: {err}")

        # Validate ranges
        if not 0.0 < config["estimator"]["delta"] < 1.0:
            raise ConfigError("must lie in (0, 1)", "estimator.delta")
        if config["estimator"]["cover"] not in ("cross", "simplex", "shell"):
            raise ConfigError(f"unknown cover {config['estimator']['cover']!r}, expected cross, simplex or shell", "estimator.cover")
        if config["estimator"]["shell_slack"] <= 0:
            raise ConfigError("must be positive", "estimator.shell_slack")
        if not 0 < config["profile"]["rmin"] < config["profile"]["rmax"]:
            raise ConfigError("need 0 < profile.rmin < profile.rmax", "profile")
        for key in ("workers", "chunk_size"):
            if config[key] < 1:
                raise ConfigError("must be positive", key)
        for section, key in (
            ("geometry", "shell_max_grid_points"),
            ("profile", "points_per_decade"),
            ("verification", "pairs"),
            ("verification", "triples"),
            ("verification", "containment_directions"),
        ):
            if config[section][key] < 1:
                raise ConfigError("must be positive", f"{section}.{key}")
        if config["profile"]["directions"] < 0:
            raise ConfigError("must not be negative", "profile.directions")

        return config
