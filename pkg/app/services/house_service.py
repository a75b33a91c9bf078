from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple, Union
import glob
import json
import logging
import os
import time

from pydantic import BaseModel, Field, ValidationError
from shapely.geometry import Polygon

from app.core.config import Settings, settings
from app.core.exceptions import RESAMPLE_ERRORS, ConnectivityInfeasible, GenerationFailure, ParseError, SchemaError
from app.core.rng import derive_seed, stage_streams, stream
from app.models.catalog import AssetCatalog, Split
from app.models.house import (
    ConnectionKind,
    House,
    HouseMetadata,
    Opening,
    PlacedObject,
    ProceduralParameters,
    RoomRecord,
)
from app.models.layout import GenParams
from app.models.roomspec import RoomSpec
from app.schemas.reports import Manifest, ManifestEntry, ValidationReport
from app.services.connectivity_service import ConnectivityService, wall_segments
from app.services.dressing_service import DressingService
from app.services.furnish_service import FurnishService
from app.services.layout_service import LayoutService
from app.services.catalog_service import load_catalog
from app.services.roomspec_service import load_room_specs, sample_room_spec
from app.services.validate_service import ValidateService
from app.utils.geometry import Rect, polygon_vertices
from app.utils.helpers import canonical_json, file_digest, read_json

logger = logging.getLogger(__name__)

TIMED_STAGES = ("layout", "connect", "furnish", "validate")
MANIFEST_FILE = "manifest.json"


class GenerationResult(BaseModel):
    house: House
    attempts: int
    timings: Dict[str, float] = Field(default_factory=dict, description="Seconds per stage, summed over attempts")
    report: ValidationReport


def emit_json(house: House, precision: Optional[int] = None) -> bytes:
    """Canonical bytes: camelCase keys sorted, floats at fixed precision"""
    doc = house.model_dump(mode="json", by_alias=True, exclude_none=True)
    return canonical_json(doc, precision or settings.JSON_PRECISION)


def parse_json(data: Union[bytes, str], source: str = "<house>") -> House:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(source, e.msg, e.lineno, e.colno) from e
    try:
        return House.model_validate(doc)
    except ValidationError as e:
        err = e.errors()[0]
        raise SchemaError(err["msg"], record=source, location="/".join(str(k) for k in err["loc"])) from e


class HouseService:
    """Runs every stage for one house and resamples until the validator accepts it"""

    def __init__(self, catalog: AssetCatalog, config: Settings = settings, material_randomization: Optional[bool] = None):
        self.catalog = catalog
        self.config = config
        self.material_randomization = config.MATERIAL_RANDOMIZATION if material_randomization is None else material_randomization
        self.layout = LayoutService(GenParams.from_settings(config))
        self.connectivity = ConnectivityService(catalog, config)
        self.dressing = DressingService(config)
        self.furnish = FurnishService(catalog, config)
        self.validator = ValidateService(catalog, config)

    def pick_spec(self, seed: int, registry: Sequence[RoomSpec]) -> RoomSpec:
        """Room spec for a house; fixed across its attempts"""
        return sample_room_spec(list(registry), stream(seed, "spec"))

    def generate_house(self, seed: int, spec: RoomSpec, split: Split = Split.ANY) -> GenerationResult:
        timings = {name: 0.0 for name in TIMED_STAGES}
        budget = self.config.HOUSE_RETRIES
        for attempt in range(budget):
            try:
                house = self._attempt(seed, attempt, spec, split, timings)
            except RESAMPLE_ERRORS as e:
                logger.warning(f"House {seed} attempt {attempt} resampled: {type(e).__name__}: {e}")
                continue
            start = time.perf_counter()
            report = self.validator.validate_house(house)
            timings["validate"] += time.perf_counter() - start
            if not report.passed:
                logger.warning(f"House {seed} attempt {attempt} failed validation: {report.failures}")
                continue
            house = parse_json(emit_json(house, self.config.JSON_PRECISION))
            logger.info(f"Generated house {seed} ({spec.id}, {len(house.rooms)} rooms) in {attempt + 1} attempts")
            return GenerationResult(house=house, attempts=attempt + 1, timings=timings, report=report)
        logger.error(f"House {seed} ({spec.id}) exhausted its retry budget")
        raise GenerationFailure(f"House {seed} with spec {spec.id} never validated", budget)

    def _attempt(self, seed: int, attempt: int, spec: RoomSpec, split: Split, timings: Dict[str, float]) -> House:
        rngs = stage_streams(seed, attempt)
        materials = self.catalog.materials

        plan, walls, pairs = self._connectable_plan(spec, rngs, timings)

        start = time.perf_counter()
        openings = self.connectivity.place_openings(plan, pairs, rngs["connect"], split, walls)
        exterior = self.connectivity.place_exterior_door(plan, rngs["connect"], split, walls, openings)
        openings = openings + [exterior]
        timings["connect"] += time.perf_counter() - start

        rng = rngs["dressing"]
        structure = self.dressing.sample_structure_materials(plan, materials, rng)
        ceiling_height = self.dressing.sample_ceiling_height(rng)
        skybox = self.dressing.sample_skybox(materials, rng)

        start = time.perf_counter()
        objects, windows, house_bias = self._furnish(plan, walls, openings, ceiling_height, split, rngs["furnish"])
        timings["furnish"] += time.perf_counter() - start

        swapped = self.furnish.randomize_appearance(objects, materials, rngs["appearance"], self.material_randomization)
        self.furnish.randomize_states(objects, rngs["states"])
        lighting = self.dressing.place_lights(plan, objects, ceiling_height, self.catalog, skybox)

        polygons = plan.polygons()
        rooms = [
            RoomRecord(
                id=r.room_id,
                room_type=r.room_type,
                floor_polygon=polygon_vertices(polygons[r.room_id]),
                floor_material=structure.floors[r.room_id],
                wall_material=structure.walls[r.room_id],
                area=float(polygons[r.room_id].area),
            )
            for r in plan.rooms
        ]
        metadata = HouseMetadata(
            seed=seed,
            room_spec_id=spec.id,
            split=split,
            schema_version=self.config.SCHEMA_VERSION,
            generator_version=self.config.APP_VERSION,
            attempts=attempt + 1,
            scale=plan.scale,
            boundary_size=(plan.boundary.x_size, plan.boundary.z_size),
            cuts=plan.boundary.cuts_applied,
        )
        return House(
            metadata=metadata,
            rooms=rooms,
            walls=walls,
            doors=[o for o in openings if o.kind != ConnectionKind.OPEN_WALL],
            open_walls=[o for o in openings if o.kind == ConnectionKind.OPEN_WALL],
            windows=windows,
            objects=objects,
            procedural_parameters=ProceduralParameters(
                ceiling_height=ceiling_height,
                ceiling_material=structure.ceiling,
                lights=lighting.point_lights,
                directional_light=lighting.directional_light,
                skybox_id=lighting.skybox_id,
                time_of_day=lighting.time_of_day,
                house_bias=house_bias,
                material_randomized=swapped,
            ),
            structure=structure,
        )

    def _connectable_plan(self, spec: RoomSpec, rngs, timings: Dict[str, float]):
        """Floor plan whose zones can be joined by doors; unconnectable plans are redrawn in place"""
        failure = None
        for draw in range(self.config.PLAN_ATTEMPTS):
            start = time.perf_counter()
            plan = self.layout.build(spec, rngs["layout"])
            timings["layout"] += time.perf_counter() - start

            start = time.perf_counter()
            walls = wall_segments(plan)
            try:
                pairs = self.connectivity.plan_connections(spec, plan, rngs["connect"], walls)
            except ConnectivityInfeasible as e:
                failure = e
                logger.debug(f"Plan {draw} for {spec.id} redrawn: {e}")
                continue
            finally:
                timings["connect"] += time.perf_counter() - start
            return plan, walls, pairs
        raise failure

    def _furnish(self, plan, walls, openings: List[Opening], ceiling_height: float, split: Split, rng) -> Tuple[List[PlacedObject], List[PlacedObject], float]:
        """Floor objects per room, then windows, televisions and paintings, then surface objects"""
        polygons: Dict[str, Polygon] = plan.polygons()
        all_walls = {w.id: w for w in walls}
        blocked = [Rect(*o.swing) for o in openings if o.swing] + [Rect(*c) for o in openings for c in o.clearance]

        floor: Dict[str, List[PlacedObject]] = {}
        for room in plan.rooms:
            floor[room.room_id] = self.furnish.place_floor_objects(
                room.room_id, room.room_type, polygons[room.room_id], blocked, split, rng
            )

        objects: List[PlacedObject] = []
        windows: List[PlacedObject] = []
        for room in plan.rooms:
            rid = room.room_id
            room_walls = [w for w in walls if w.room_a == rid]
            room_windows = self.furnish.place_windows(
                rid, room.room_type, room_walls, floor[rid], openings, all_walls, ceiling_height, split, rng
            )
            windows.extend(room_windows)
            space = self.furnish.wall_space(
                room_walls, floor[rid], openings, all_walls, low_height=self.config.PAINTING_OVER_OBJECT_MAX_HEIGHT, hung=room_windows
            )
            hung: List[PlacedObject] = []
            tv = self.furnish.place_televisions(rid, room.room_type, space, floor[rid], ceiling_height, split, rng)
            if tv is not None:
                hung.append(tv)
            hung.extend(self.furnish.place_paintings(rid, space, ceiling_height, split, rng))
            objects.extend(floor[rid])
            objects.extend(hung)

        house_bias = self.furnish.sample_house_bias(rng)
        self.furnish.place_surface_objects(objects, split, house_bias, rng)
        return objects, windows, house_bias


def generate_indexed(
    service: HouseService,
    root_seed: int,
    index: int,
    registry: Sequence[RoomSpec],
    split: Split = Split.ANY,
) -> Tuple[int, GenerationResult]:
    """House `index` of the dataset rooted at `root_seed`"""
    seed = derive_seed(root_seed, index)
    spec = service.pick_spec(seed, registry)
    return seed, service.generate_house(seed, spec, split)


# Dataset generation

class HouseJob(BaseModel):
    """Outcome of one house task, shipped back from a worker"""

    index: int
    seed: int
    room_spec_id: str
    data: Optional[bytes] = None
    attempts: int = 0
    timings: Dict[str, float] = Field(default_factory=dict)
    error: Optional[str] = None


_worker: Dict[str, object] = {}


def _init_worker(catalog_path: str, room_specs_path: str, material_randomization: Optional[bool]) -> None:
    # Catalog and registry are loaded once per process and only read afterwards
    catalog = load_catalog(catalog_path)
    _worker["service"] = HouseService(catalog, settings, material_randomization)
    _worker["registry"] = load_room_specs(room_specs_path)


def _run_task(task: Tuple[int, int, str]) -> HouseJob:
    root_seed, index, split = task
    service: HouseService = _worker["service"]  # type: ignore[assignment]
    registry: List[RoomSpec] = _worker["registry"]  # type: ignore[assignment]
    seed = derive_seed(root_seed, index)
    spec = service.pick_spec(seed, registry)
    try:
        result = service.generate_house(seed, spec, Split(split))
    except GenerationFailure as e:
        return HouseJob(index=index, seed=seed, room_spec_id=spec.id, attempts=e.attempts, error=str(e))
    return HouseJob(
        index=index,
        seed=seed,
        room_spec_id=spec.id,
        data=emit_json(result.house, service.config.JSON_PRECISION),
        attempts=result.attempts,
        timings=result.timings,
    )


def run_jobs(
    root_seed: int,
    indices: Sequence[int],
    catalog_path: str,
    room_specs_path: str,
    split: Split = Split.ANY,
    jobs: int = 1,
    material_randomization: Optional[bool] = None,
) -> List[HouseJob]:
    """Generate houses by index, in-process for one job, else over a process pool; results sorted by index"""
    tasks = [(root_seed, i, split.value) for i in indices]
    init_args = (catalog_path, room_specs_path, material_randomization)
    if jobs <= 1:
        _init_worker(*init_args)
        results = [_run_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=init_args) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=chunk))
    return sorted(results, key=lambda r: r.index)


def house_filename(index: int) -> str:
    return f"house_{index:05d}.json"


def generate_dataset(
    root_seed: int,
    count: int,
    out_dir: str,
    catalog_path: str,
    room_specs_path: str,
    split: Split = Split.ANY,
    jobs: int = 1,
    material_randomization: Optional[bool] = None,
    config: Settings = settings,
) -> Tuple[Manifest, List[HouseJob]]:
    """Write every house, the manifest and the house schema into `out_dir`; returns failed jobs too"""
    os.makedirs(out_dir, exist_ok=True)
    randomize = config.MATERIAL_RANDOMIZATION if material_randomization is None else material_randomization
    logger.info(f"Generating {count} houses (root seed {root_seed}, split {split.value}, {jobs} jobs) into {out_dir}")
    results = run_jobs(root_seed, range(count), catalog_path, room_specs_path, split, jobs, randomize)

    entries: List[ManifestEntry] = []
    failed: List[HouseJob] = []
    for job in results:
        if job.data is None:
            logger.error(f"House {job.index} (seed {job.seed}) failed: {job.error}")
            failed.append(job)
            continue
        name = house_filename(job.index)
        with open(os.path.join(out_dir, name), "wb") as fh:
            fh.write(job.data)
        entries.append(ManifestEntry(index=job.index, seed=job.seed, room_spec_id=job.room_spec_id, file=name, attempts=job.attempts))

    manifest = Manifest(
        root_seed=root_seed,
        count=count,
        split=split,
        schema_version=config.SCHEMA_VERSION,
        generator_version=config.APP_VERSION,
        catalog_sha256=file_digest(catalog_path),
        room_specs_sha256=file_digest(room_specs_path),
        material_randomization=randomize,
        houses=entries,
    )
    write_manifest(manifest, out_dir)
    with open(os.path.join(out_dir, "house.schema.json"), "wb") as fh:
        fh.write(house_schema())
    logger.info(f"Wrote {len(entries)} houses to {out_dir} ({len(failed)} failed)")
    return manifest, failed


def house_schema() -> bytes:
    return canonical_json(House.model_json_schema(by_alias=True))


def write_manifest(manifest: Manifest, out_dir: str) -> str:
    path = os.path.join(out_dir, MANIFEST_FILE)
    with open(path, "wb") as fh:
        fh.write(canonical_json(manifest.model_dump(mode="json", by_alias=True, exclude_none=True)))
    return path


def load_manifest(path: str) -> Manifest:
    doc = read_json(path)
    try:
        return Manifest.model_validate(doc)
    except ValidationError as e:
        raise SchemaError(e.errors()[0]["msg"], record=path) from e


def load_house(path: str) -> House:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except FileNotFoundError as e:
        raise ParseError(path, "file not found") from e
    return parse_json(data, path)


def house_files(path: str) -> List[str]:
    """A single house file, or every house file of a dataset directory in index order"""
    if os.path.isdir(path):
        return sorted(glob.glob(os.path.join(path, "house_*.json")))
    return [path]
