"""
Utils module for various utility functions.
"""

from src.utils.settings import Settings

settings = Settings()

from src.utils.logger import get_logger, progress

__all__ = [
    "settings",
    "get_logger",
    "progress",
]
