import os
import traceback
from datetime import datetime

from elasticsearch import Elasticsearch

LOG_INDEX = "vmdg-harness-logs"
SERVICE_NAME = "vmdg-harness"

es = Elasticsearch(os.getenv("ELASTICSEARCH_HOST", "http://localhost:9200"))


def _elastic_disabled() -> bool:
    return os.getenv("VM_RKDG_DISABLE_ELASTIC_LOGS", "0").strip().lower() in {"1", "true", "yes", "y", "on"}


def log_event(level: str, event: str, message: str = "", **extra):
    doc = {
        "@timestamp": datetime.now().isoformat(),
        "level": level,
        "event": event,
        "message": message,
        "service": SERVICE_NAME,
    }

    doc.update(extra)

    trace = traceback.format_exc()
    if not trace.startswith("NoneType: None"):
        doc["traceback"] = trace

    if _elastic_disabled():
        print(f"[{level}] {event}: {message} {extra}")
        return doc

    try:
        es.index(index=LOG_INDEX, document=doc)
    except Exception:
        print(f"[{level}] {event}: {message} {extra}")
    return doc
