# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import Executor

import numpy as np
import numpy.typing as npt

from lipcert.errors import ValidationError

DEFAULT_CHUNK_SIZE = 4096


def map_rows(
    fn: Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]],
    rows: npt.NDArray[np.float64],
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> npt.NDArray[np.float64]:
    """Apply `fn` to fixed-size row blocks of `rows` and concatenate the results in order.

    Blocks are cut the same way with or without an executor, so serial and pooled runs
    produce bit-identical output.
    """
    if chunk_size < 1:
        raise ValidationError(f"must be positive, got {chunk_size}", "chunk_size")
    blocks = [rows[start : start + chunk_size] for start in range(0, len(rows), chunk_size)]
    if not blocks:
        return np.empty(0, dtype=np.float64)
    if executor is None or len(blocks) == 1:
        results = [fn(block) for block in blocks]
    else:
        results = list(executor.map(fn, blocks))
    return np.concatenate(results)
