# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
import argparse
import concurrent.futures
from json_logging import get_logger
import time
from types import TracebackType

from typing import Any, cast, Self

from lipcert.interface import LipCertProtocol as LipCert


class Base:
    def __init__(self: LipCert, args: argparse.Namespace | None = None, **kwargs: Any):
        super().__init__(**kwargs)

        self.args = args
        self.logger = get_logger(__name__)

        # now load self.config right away
        cfg_arg = getattr(args, "config", None)
        self.config = self.load_config(cfg_arg)

        # down in trenches if we have to
        if self.config.get("debug") or getattr(args, "debug", False):
            self.enable_debug()

        self.command = str(getattr(args, "command", None) or "")
        self.workers = int(self.option("workers", None, "workers"))
        self.chunk_size = int(self.config["chunk_size"])
        self.executor: concurrent.futures.ThreadPoolExecutor | None = None
        self.started = time.perf_counter()

    def __enter__(self: Self) -> LipCert:
        super_enter = getattr(super(), "__enter__", None)
        if callable(super_enter):
            super_enter()

        app = cast(Any, self)
        # numpy releases the GIL in the batch evaluations, so threads are enough
        if app.workers > 1:
            app.executor = concurrent.futures.ThreadPoolExecutor(max_workers=app.workers, thread_name_prefix="lipcert")
        app.started = time.perf_counter()
        app.logger.info(f"lipcert {app.config['version']} starting {app.command or 'no command'} (config from {app.config['config_from']})")

        return cast(LipCert, self)

    def __exit__(self: Self, exc_type: type[BaseException] | None, exc_val: BaseException | None, exc_tb: TracebackType | None) -> None:
        super_exit = getattr(super(), "__exit__", None)
        if callable(super_exit):
            super_exit(exc_type, exc_val, exc_tb)

        app = cast(Any, self)
        if app.executor is not None:
            app.executor.shutdown(wait=True, cancel_futures=True)
            app.executor = None
        app.logger.debug(f"{app.command} took {app.elapsed_ms():.1f} ms")

    def elapsed_ms(self: LipCert) -> float:
        return (time.perf_counter() - self.started) * 1000.0
