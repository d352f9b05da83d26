# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
"""`python -m lipcert`, the same entry point as the lipcert console script."""
import sys

from lipcert.app import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
