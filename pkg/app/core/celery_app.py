from celery import Celery

from app.core.config import get_broker_url, get_result_backend

broker_url = get_broker_url()

# Without a broker every task runs eagerly in the calling process
celery_app = Celery(
    "qudit_qft_pulses",
    broker=broker_url or "memory://",
    backend=get_result_backend() or "cache+memory://",
    include=["app.tasks.optimize_tasks"],
)

celery_app.conf.update(
    task_serializer="json",
    result_serializer="json",
    accept_content=["json"],
    timezone="UTC",
    enable_utc=True,
    task_always_eager=broker_url is None,
    task_eager_propagates=True,
    # One restart is a long, CPU-bound job
    worker_prefetch_multiplier=1,
    task_acks_late=True,
    task_time_limit=12 * 60 * 60,
    result_expires=24 * 60 * 60,
)

if __name__ == "__main__":
    celery_app.start()
