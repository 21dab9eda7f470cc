# SPDX-FileCopyrightText: 2026 The pcxai Authors
# SPDX-License-Identifier: Apache-2.0
"""Segment-level saliency maps for point-cloud classifiers."""

from ._pcxai import *  # noqa: F401,F403
from ._pcxai import synthetic  # noqa: F401

__version__ = "0.1.0"
