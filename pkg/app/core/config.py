import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

MIN_LEVELS = 2
MAX_LEVELS = 8


def get_out_dir() -> Path:
    # Default output root for archives, records and figure datasets
    return Path(os.getenv("QPF_OUT_DIR", "results"))


def get_log_level() -> str:
    return os.getenv("QPF_LOG_LEVEL", "INFO").upper()


def get_broker_url() -> str | None:
    # Unset means Celery tasks run eagerly inside the calling process
    return os.getenv("QPF_BROKER_URL") or None


def get_result_backend() -> str | None:
    return os.getenv("QPF_RESULT_BACKEND") or get_broker_url()
