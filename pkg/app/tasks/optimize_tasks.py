import logging

from celery import shared_task

from app.experiments.jobs import execute_restart
from app.schemas.jobs import RestartJob

logger = logging.getLogger(__name__)


@shared_task(name="qpf.run_restart")
def run_restart(job: dict) -> dict:
    """Worker entry point: run one restart described by a serialized RestartJob."""
    restart = RestartJob.model_validate(job)
    logger.info(f"Worker picked up restart {restart.restart_index} (d={restart.d}, T={restart.T:g})")
    return execute_restart(restart).model_dump(mode="json")
