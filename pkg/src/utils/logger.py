"""
Logging helpers.

Every component logs through a named logger and prefixes its messages with
its own name in brackets, e.g. ``[FISTAReconstructor] converged``.
"""

import logging
import sys

from tqdm import tqdm


_CONFIGURED = False


def _configure(level: str) -> None:
    global _CONFIGURED
    if _CONFIGURED:
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    root = logging.getLogger("ghostlab")
    root.addHandler(handler)
    root.setLevel(level.upper())
    root.propagate = False
    _CONFIGURED = True


class _PrefixAdapter(logging.LoggerAdapter):
    def process(self, msg, kwargs):
        return f"[{self.extra['component']}] {msg}", kwargs


def get_logger(component: str) -> logging.LoggerAdapter:
    """Return a logger whose messages carry ``[component]`` as prefix."""
    from src.utils import settings

    _configure(settings.LOG_LEVEL)
    logger = logging.getLogger(f"ghostlab.{component}")
    return _PrefixAdapter(logger, {"component": component})


def progress(iterable, desc: str, total: int | None = None):
    """tqdm wrapper that stays silent when the log level hides INFO."""
    quiet = not logging.getLogger("ghostlab").isEnabledFor(logging.INFO)
    return tqdm(iterable, desc=desc, total=total, disable=quiet, leave=False)


__all__ = ["get_logger", "progress"]
