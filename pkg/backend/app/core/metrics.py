"""
Prometheus Metrics Configuration
Obrauer - Cyclotomic Oriented Brauer Engine
"""

from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, Info, generate_latest

REGISTRY = CollectorRegistry()

# ============== Rewriting Metrics ==============

NORMALIZATIONS_TOTAL = Counter(
    "obrauer_normalizations_total",
    "Planar diagrams brought to normal form (cache misses)",
    registry=REGISTRY,
)

CACHE_HITS_TOTAL = Counter(
    "obrauer_cache_hits_total",
    "Memo table hits",
    ["table"],
    registry=REGISTRY,
)

CORRECTIONS_TOTAL = Counter(
    "obrauer_corrections_total",
    "Lower-order terms produced while rewriting",
    ["kind"],
    registry=REGISTRY,
)

COMPOSITIONS_TOTAL = Counter(
    "obrauer_compositions_total",
    "Basis diagram pairs composed",
    registry=REGISTRY,
)

# ============== Command Metrics ==============

COMMAND_DURATION = Histogram(
    "obrauer_command_duration_seconds",
    "CLI command duration in seconds",
    ["command"],
    buckets=[0.01, 0.05, 0.1, 0.5, 1, 5, 10, 30, 60, 300],
    registry=REGISTRY,
)

BATCH_CASES_IN_PROGRESS = Gauge(
    "obrauer_batch_cases_in_progress",
    "Batch verification cases currently running",
    registry=REGISTRY,
)

APP_INFO = Info("obrauer", "Engine information", registry=REGISTRY)

APP_INFO.info({"name": "obrauer", "version": "1.0.0"})


def get_metrics() -> bytes:
    """Get all metrics in Prometheus format."""
    return generate_latest(REGISTRY)


def write_metrics(path: str) -> None:
    Path(path).write_bytes(get_metrics())
