from prometheus_client import Counter, Histogram, REGISTRY, write_to_textfile
import logging

logger = logging.getLogger(__name__)

# Metrics
SUBSETS_EXAMINED = Counter('pmc_subsets_examined_total', 'Candidate symmetric differences examined', ['mode'])
SEARCH_DURATION = Histogram('pmc_search_duration_seconds', 'Indistinguishable-pair search latency', ['mode'])
WITNESSES_FOUND = Counter('pmc_witnesses_found_total', 'Indistinguishable pairs returned by searches', ['conditional'])
CANDIDATES_DECODED = Counter('pmc_diagnosis_candidates_total', 'Candidate fault sets checked by the decoder')
CHECKS = Counter('pmc_checks_total', 'Verification checks run', ['status'])


def record_search(mode: str, subsets: int, seconds: float, witness_found: bool, conditional: bool) -> None:
    SUBSETS_EXAMINED.labels(mode=mode).inc(subsets)
    SEARCH_DURATION.labels(mode=mode).observe(seconds)
    if witness_found:
        WITNESSES_FOUND.labels(conditional=str(conditional).lower()).inc()


def export_metrics(path: str) -> None:
    """Write the registry in text exposition format."""
    try:
        write_to_textfile(path, REGISTRY)
        logger.info(f"Metrics written to {path}")
    except OSError as e:
        logger.error(f"Error writing metrics to {path}: {str(e)}")
        raise
