# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
from __future__ import annotations


class LipcertError(Exception):
    """Base class for every error raised by lipcert. `exit_code` is what the CLI returns."""

    exit_code = 1


class ValidationError(LipcertError, ValueError):
    exit_code = 2

    def __init__(self, message: str, path: str | None = None) -> None:
        self.message = message
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParseError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class InvalidParams(ValidationError):
    pass


class DimensionUnsupported(ValidationError):
    pass


class EmptyPointSet(ValidationError):
    pass


class InsufficientProfile(ValidationError):
    pass


class NonFiniteValue(LipcertError):
    pass


class GradientUnavailable(LipcertError):
    pass


class CoverConstructionFailed(LipcertError):
    pass
