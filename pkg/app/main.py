import json
import logging
import os
import sys
import time
from functools import wraps

import click

from app.core.config import settings
from app.core.exceptions import EmptyRegistry, GenerationFailure, ParseError, SchemaError
from app.models.catalog import Split
from app.schemas.reports import DatasetStats, DatasetValidation
from app.services.bench_service import run_bench
from app.services.catalog_service import load_catalog
from app.services.house_service import generate_dataset, house_files, house_schema, load_house
from app.services.render_service import RenderOptions, render_svg
from app.services.roomspec_service import load_room_specs
from app.services.stats_service import compute_stats
from app.services.validate_service import ValidateService
from app.utils.helpers import canonical_json

logger = logging.getLogger("app")

EXIT_INVALID = 1
EXIT_INPUT = 2


def setup_logging() -> None:
    level = logging.DEBUG if settings.DEBUG else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def input_errors(fn):
    """Bad input files exit with code 2"""

    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ParseError, SchemaError, EmptyRegistry) as e:
            logger.error(str(e))
            click.echo(f"❌ {e}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def write_bytes(path: str, data: bytes) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(data)


@click.group()
@click.version_option(settings.APP_VERSION, prog_name=settings.APP_NAME)
def cli():
    """Procedural house generator"""
    setup_logging()


@cli.command()
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Root seed (PROCHOUSE_SEED wins)")
@click.option("--room-specs", "room_specs", type=click.Path(), default=settings.ROOM_SPECS_PATH)
@click.option("--catalog", type=click.Path(), default=settings.CATALOG_PATH)
@click.option("--split", type=click.Choice([s.value for s in Split]), default=Split.ANY.value, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=settings.JOBS, show_default=True)
@click.option("--no-material-rand", "no_material_rand", is_flag=True, default=False)
@input_errors
def gen(count, seed, room_specs, catalog, split, out_dir, jobs, no_material_rand):
    """Generate a dataset of houses plus its manifest"""
    root_seed = settings.SEED if settings.SEED is not None else seed
    # Fail fast on bad inputs before any worker starts
    load_catalog(catalog)
    load_room_specs(room_specs)
    manifest, failed = generate_dataset(
        root_seed,
        count,
        out_dir,
        catalog,
        room_specs,
        Split(split),
        jobs,
        False if no_material_rand else None,
    )
    click.echo(f"✅ {len(manifest.houses)} houses written to {out_dir}")
    if failed:
        click.echo(f"❌ {len(failed)} houses exhausted their retry budget", err=True)
        sys.exit(EXIT_INVALID)


@cli.command()
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--catalog", type=click.Path(), default=None, help="Enables catalog visibility points")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None, help="Write the validation report here")
@input_errors
def validate(in_path, catalog, json_path):
    """Check every house has enough reachable positions per room"""
    validator = ValidateService(load_catalog(catalog) if catalog else None)
    start = time.perf_counter()
    reports = {}
    for path in house_files(in_path):
        report = validator.validate_house(load_house(path))
        reports[os.path.basename(path)] = report
        if report.passed:
            click.echo(f"✅ {path}")
        else:
            click.echo(f"❌ {path}: {'; '.join(report.failures)}")
    result = DatasetValidation(
        passed=all(r.passed for r in reports.values()),
        houses=reports,
        seconds=time.perf_counter() - start,
    )
    if json_path:
        write_bytes(json_path, canonical_json(result.model_dump(mode="json", by_alias=True)))
        click.echo(f"✅ {json_path}")
    if not result.passed:
        sys.exit(EXIT_INVALID)


@cli.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), required=True)
@click.option("--scale", type=float, default=50.0, show_default=True, help="Pixels per meter")
@click.option("--no-objects", is_flag=True, default=False)
@input_errors
def render(in_path, svg_path, scale, no_objects):
    """Top-down SVG of one house"""
    svg = render_svg(load_house(in_path), RenderOptions(scale=scale, objects=not no_objects))
    write_bytes(svg_path, svg.encode("utf-8"))
    click.echo(f"✅ {svg_path}")


@cli.command()
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None)
@input_errors
def stats(in_path, json_path):
    """Area, room and object histograms over a dataset"""
    result: DatasetStats = compute_stats(load_house(p) for p in house_files(in_path))
    data = canonical_json(result.model_dump(mode="json", by_alias=True))
    if json_path:
        write_bytes(json_path, data)
        click.echo(f"✅ {json_path}")
    else:
        click.echo(data.decode("utf-8"), nl=False)


@cli.command()
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--jobs", type=int, default=settings.JOBS, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--room-specs", "room_specs", type=click.Path(), default=settings.ROOM_SPECS_PATH)
@click.option("--catalog", type=click.Path(), default=settings.CATALOG_PATH)
@click.option("--baseline", is_flag=True, default=False, help="Also time a serial run")
@input_errors
def bench(count, jobs, seed, room_specs, catalog, baseline):
    """Houses per second, overall and per stage"""
    root_seed = settings.SEED if settings.SEED is not None else seed
    report = run_bench(count, jobs, catalog, room_specs, root_seed, baseline=baseline)
    click.echo(json.dumps(report.model_dump(mode="json", by_alias=True), indent=2, sort_keys=True))


@cli.command()
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def schema(out_path):
    """House JSON schema"""
    data = house_schema()
    if out_path:
        write_bytes(out_path, data)
    else:
        click.echo(data.decode("utf-8"), nl=False)


def main():
    try:
        cli(standalone_mode=True)
    except GenerationFailure as e:
        click.echo(f"❌ {e}", err=True)
        sys.exit(EXIT_INVALID)


if __name__ == "__main__":
    main()
