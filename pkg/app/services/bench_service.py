from typing import Dict, List
import logging
import time

from app.models.catalog import Split
from app.schemas.reports import BenchReport
from app.services.house_service import TIMED_STAGES, HouseJob, run_jobs

logger = logging.getLogger(__name__)


def _timed(root_seed: int, count: int, catalog_path: str, room_specs_path: str, split: Split, jobs: int):
    start = time.perf_counter()
    results = run_jobs(root_seed, range(count), catalog_path, room_specs_path, split, jobs)
    return results, time.perf_counter() - start


def summarize(results: List[HouseJob], jobs: int, wall_seconds: float) -> BenchReport:
    count = len(results)
    stage_seconds: Dict[str, float] = {name: 0.0 for name in TIMED_STAGES}
    for job in results:
        for name, seconds in job.timings.items():
            stage_seconds[name] = stage_seconds.get(name, 0.0) + seconds
    attempts = sum(job.attempts for job in results)
    failures = sum(1 for job in results if job.error is not None)
    accepted = count - failures
    return BenchReport(
        count=count,
        jobs=jobs,
        wall_seconds=wall_seconds,
        houses_per_second=count / wall_seconds if wall_seconds > 0 else 0.0,
        stage_seconds=stage_seconds,
        stage_houses_per_second={k: (count / v if v > 0 else 0.0) for k, v in stage_seconds.items()},
        attempts=attempts,
        retry_rate=(attempts - accepted) / attempts if attempts else 0.0,
        failures=failures,
    )


def run_bench(
    count: int,
    jobs: int,
    catalog_path: str,
    room_specs_path: str,
    root_seed: int = 0,
    split: Split = Split.ANY,
    baseline: bool = False,
) -> BenchReport:
    """Throughput of generation + validation; with `baseline` also times a serial run for speedup"""
    logger.info(f"Benchmarking {count} houses on {jobs} jobs")
    results, wall = _timed(root_seed, count, catalog_path, room_specs_path, split, jobs)
    report = summarize(results, jobs, wall)
    if baseline:
        if jobs <= 1:
            report.baseline_seconds = wall
        else:
            _, report.baseline_seconds = _timed(root_seed, count, catalog_path, room_specs_path, split, 1)
        report.speedup = report.baseline_seconds / wall if wall > 0 else None
    logger.info(f"{report.houses_per_second:.2f} houses/s, retry rate {report.retry_rate:.3f}")
    return report
