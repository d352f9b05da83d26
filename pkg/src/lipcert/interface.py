from argparse import Namespace
from concurrent.futures import ThreadPoolExecutor
from logging import Logger
from pathlib import Path
from typing import Protocol, Any, Sequence

import numpy as np

from lipcert.estimator import VerdictKind
from lipcert.geometry import Ball, Vector
from lipcert.zoo import FunctionSpec


class LipCertProtocol(Protocol):
    args: Namespace | None
    chunk_size: int
    command: str
    config: dict[str, Any]
    executor: ThreadPoolExecutor | None
    logger: Logger
    started: float
    workers: int

    def build_report(self, inputs: dict[str, Any], outputs: dict[str, Any]) -> dict[str, Any]: ...
    def elapsed_ms(self) -> float: ...
    def emit(self, report: dict[str, Any], table: tuple[Sequence[str], Sequence[Sequence[Any]]] | None = None) -> None: ...
    def enable_debug(self) -> None: ...
    def function_dim(self, spec: FunctionSpec) -> int: ...
    def load_config(self, config_arg: Any | None) -> dict[str, Any]: ...
    def load_function(self) -> FunctionSpec: ...
    def modulus_notes(self, spec: FunctionSpec, kind: VerdictKind, estimate: float | None, tolerance: float) -> list[str]: ...
    def option(self, arg_name: str, section: str | None, key: str) -> Any: ...
    def parse_ball(self, center: Any, radius: float) -> Ball: ...
    def parse_floats(self, value: Any, name: str) -> list[float]: ...
    def parse_vector(self, value: Any, name: str) -> Vector: ...
    def random_points_in(self, ball: Ball, count: int, seed: int) -> np.ndarray: ...
    def read_json_file(self, path: str | Path, what: str) -> Any: ...
    def report_json(self, report: dict[str, Any]) -> str: ...
    def rows_csv(self, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str: ...
    def run(self) -> int: ...
    def sample_seed(self) -> int: ...
    def unwrap(self, data: Any, key: str, commands: Sequence[str]) -> Any: ...
    def validate_report(self, data: Any) -> dict[str, Any]: ...
    def _read_version_file(self) -> str: ...

    def cmd_ball(self) -> int: ...
    def cmd_certseq(self) -> int: ...
    def cmd_classify(self) -> int: ...
    def cmd_constancy(self) -> int: ...
    def cmd_convexity(self) -> int: ...
    def cmd_cover(self) -> int: ...
    def cmd_modulus(self) -> int: ...
    def cmd_subgrad(self) -> int: ...
    def cmd_tune(self) -> int: ...
    def cmd_verify(self) -> int: ...
    def cmd_zoo(self) -> int: ...
