"""ssplab core package."""

from .constants import PROJECT_ROOT, VERSION
from .errors import SspError
from .logging_setup import log
from .types import AttemptLog, Diagnostics, EpisodeLog, EpochLog, RunRecord

__version__ = VERSION

__all__ = [
    "AttemptLog",
    "Diagnostics",
    "EpisodeLog",
    "EpochLog",
    "log",
    "PROJECT_ROOT",
    "RunRecord",
    "SspError",
    "VERSION",
]
