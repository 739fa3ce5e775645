import logging
import sys

from app.core.config import get_log_level

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Send log records to stderr so stdout only carries results."""
    logging.basicConfig(
        level=(level or get_log_level()),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )
