import logging
import sys
from typing import Optional, Union

logger = logging.getLogger("cftp_communities")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _rebind_stream(handler: logging.StreamHandler, stream) -> None:
    # setStream() flushes the old stream first, which fails once it has been closed
    handler.acquire()
    try:
        handler.stream = stream
    finally:
        handler.release()


def set_logger(log_file: Optional[str] = None, level: Union[int, str] = logging.INFO):
    """Attach a single stderr (or file) handler to the library logger.

    Output on stdout is reserved for command results, so records never go there.
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.strip().upper())
        if not isinstance(level, int):
            level = logging.INFO
    logger.setLevel(level)

    if logger.handlers:
        for existing in logger.handlers:
            existing.setLevel(level)
            if not log_file and type(existing) is logging.StreamHandler and existing.stream is not sys.stderr:
                _rebind_stream(existing, sys.stderr)
        return logger

    if log_file:
        handler = logging.FileHandler(log_file)
    else:
        handler = logging.StreamHandler()  # stderr
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    return logger
