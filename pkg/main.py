#!/usr/bin/env python3
"""Compatibility facade for the ssplab command line."""

import sys

from core import log, PROJECT_ROOT, RunRecord, SspError, VERSION
from core.app import build_parser, main

__all__ = [
    "build_parser",
    "log",
    "main",
    "PROJECT_ROOT",
    "RunRecord",
    "SspError",
    "VERSION",
]


if __name__ == "__main__":
    sys.exit(main())
