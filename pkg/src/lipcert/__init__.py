# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Jeff Culverhouse
"""Certified Lipschitz constants of convex functions from function values alone."""
