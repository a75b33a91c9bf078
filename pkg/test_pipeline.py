#!/usr/bin/env python3
"""
End-to-end tests: house generation, JSON output, datasets, rendering, stats and the CLI
"""

import json
import os
import tempfile

import numpy as np
from click.testing import CliRunner
from shapely.geometry import Polygon

from app.core.config import Settings, settings
from app.core.exceptions import GenerationFailure, ParseError, SchemaError
from app.main import cli
from app.models.catalog import Split
from app.models.house import ConnectionKind, PlacementKind
from app.schemas.reports import DatasetStats
from app.services.bench_service import summarize
from app.services.catalog_service import load_catalog
from app.services.house_service import (
    MANIFEST_FILE,
    HouseJob,
    HouseService,
    emit_json,
    generate_dataset,
    generate_indexed,
    house_files,
    load_house,
    load_manifest,
    parse_json,
    run_jobs,
)
from app.services.furnish_service import BACK_ROTATION, opening_span, rect_sides, touches_wall
from app.services.render_service import RenderOptions, render_svg
from app.services.roomspec_service import load_room_specs
from app.services.stats_service import compute_stats, house_stats
from app.services.validate_service import ValidateService
from app.utils.geometry import EPS, EXTERIOR, Rect, flood_fill

CATALOG = load_catalog(settings.CATALOG_PATH)
REGISTRY = load_room_specs(settings.ROOM_SPECS_PATH)


def spec_named(spec_id):
    return next(s for s in REGISTRY if s.id == spec_id)


def floor_members(house, room_id):
    """Pieces of a room's floor objects that rest on the floor"""
    tops = [o for o in house.objects if o.room_id == room_id and o.placement is not None]
    return [m for obj in tops for m in obj.walk() if m.bottom < EPS]


def spans_overlap(a, b, tol=1e-5):
    return a[0] < b[1] - tol and b[0] < a[1] - tol


def check_floor_clearances(house):
    blocked = [Rect(*o.swing) for o in house.openings() if o.swing] + [Rect(*c) for o in house.openings() for c in o.clearance]
    for room in house.rooms:
        outline = Polygon(room.floor_polygon).buffer(1e-6)
        clearances = [Rect(*o.clearance) for o in house.objects if o.room_id == room.id and o.placement is not None]
        for i, a in enumerate(clearances):
            assert outline.covers(a.to_polygon()), room.id
            assert not any(a.overlaps(b, 1e-6) for b in clearances[i + 1 :]), room.id
            assert not any(a.overlaps(b, 1e-6) for b in blocked), room.id


def check_back_against_wall(house):
    side_of = {rotation: side for side, rotation in BACK_ROTATION.items()}
    for obj in house.objects:
        if obj.sag_id is not None:
            continue
        assert obj.rotation in side_of, obj.id
        if obj.placement not in ("edge", "corner"):
            continue
        outline = Polygon(house.room(obj.room_id).floor_polygon).exterior.buffer(1e-4)
        assert outline.covers(rect_sides(obj.footprint())[side_of[obj.rotation]]), obj.id


def check_surface_children(house):
    for holder in house.all_objects():
        for child in holder.children:
            if child.placement_kind != PlacementKind.SURFACE:
                continue
            assert child.parent == holder.id
            assert holder.footprint().contains(child.footprint(), 1e-6), child.id
            assert abs(child.bottom - holder.top) < 1e-6, child.id


def check_wall_objects(house):
    hung = list(house.windows) + [o for o in house.objects if o.placement_kind == PlacementKind.WALL]
    for obj in hung:
        wall = house.wall(obj.parent)
        lo, hi = obj.wall_span
        assert lo >= -1e-5 and hi <= wall.length + 1e-5, obj.id
        for opening in house.openings():
            span = opening_span(opening, house.wall(opening.wall), wall)
            assert not (span and spans_overlap(span, obj.wall_span)), obj.id
        for other in hung:
            if other.id != obj.id and other.parent == obj.parent:
                assert not spans_overlap(other.wall_span, obj.wall_span), obj.id
        for member in floor_members(house, wall.room_a):
            span = touches_wall(wall, member.footprint(), settings.WALL_TOUCH_TOLERANCE)
            if span and spans_overlap(span, obj.wall_span):
                assert member.top <= obj.bottom + 1e-6, obj.id


def check_split(house, split):
    allowed = {split, Split.ANY}
    for obj in house.all_objects() + list(house.windows):
        assert CATALOG.instance(obj.asset_id).split in allowed, obj.asset_id
    for door in house.doors:
        if door.asset_instance:
            assert CATALOG.instance(door.asset_instance).split in allowed, door.asset_instance


def check_lamp_lights(house):
    objects = {o.id: o for o in house.all_objects()}
    for light in house.procedural_parameters.lights:
        if light.object_id is None:
            continue
        states = objects[light.object_id].states or {}
        if states.get("isToggled", True):
            assert light.intensity == settings.LAMP_LIGHT_INTENSITY
        else:
            assert light.intensity == 0.0


def test_same_seed_same_bytes():
    """Two services, one seed, identical output"""
    spec = spec_named("kitchen-living")
    a = HouseService(CATALOG).generate_house(11, spec)
    b = HouseService(CATALOG).generate_house(11, spec)
    assert emit_json(a.house) == emit_json(b.house)
    assert a.attempts == b.attempts == a.house.metadata.attempts


def test_json_round_trip():
    """Parsing emitted JSON gives back the same house"""
    _, result = generate_indexed(HouseService(CATALOG), 3, 0, REGISTRY)
    data = emit_json(result.house)
    again = parse_json(data)
    assert again == result.house
    assert emit_json(again) == data
    doc = json.loads(data)
    assert "proceduralParameters" in doc and "openWalls" in doc


def test_parse_errors():
    """Broken text and wrong shapes fail with distinct errors"""
    try:
        parse_json(b"{", "broken.json")
        assert False, "expected ParseError"
    except ParseError as e:
        assert e.path == "broken.json" and e.line == 1
    try:
        parse_json('{"metadata": 1}')
        assert False, "expected SchemaError"
    except SchemaError:
        pass


def test_single_bathroom():
    """The one-room bathroom spec has one front door and no windows"""
    result = HouseService(CATALOG).generate_house(5, spec_named("bathroom"))
    house = result.house
    assert len(house.rooms) == 1
    assert house.open_walls == [] and house.windows == []
    (door,) = house.doors
    assert door.kind == ConnectionKind.EXTERIOR_DOOR and door.room_b == EXTERIOR
    assert all(w.room_b == EXTERIOR for w in house.walls)
    x, z = house.metadata.boundary_size
    assert 2 <= x <= 3 and 2 <= z <= 3


def test_generated_houses_validate():
    """Accepted houses pass validation again and keep objects in their rooms"""
    service = HouseService(CATALOG)
    validator = ValidateService(CATALOG)
    for index in range(4):
        seed, result = generate_indexed(service, 21, index, REGISTRY)
        house = result.house
        assert house.metadata.seed == seed
        assert validator.validate_house(house).passed
        room_ids = {r.id for r in house.rooms}
        assert all(o.room_id in room_ids for o in house.all_objects())
        assert len(house.procedural_parameters.lights) >= len(house.rooms)
        assert sum(1 for d in house.doors if d.kind == ConnectionKind.EXTERIOR_DOOR) == 1


def test_spec_choice_is_per_seed():
    """The room spec depends only on the house seed"""
    service = HouseService(CATALOG)
    assert all(service.pick_spec(s, REGISTRY).id == service.pick_spec(s, REGISTRY).id for s in range(20))


def test_generation_failure():
    """A house that can never validate exhausts its retries"""
    strict = Settings(HOUSE_RETRIES=2, MIN_REACHABLE_PER_ROOM=10**6)
    try:
        HouseService(CATALOG, strict).generate_house(1, spec_named("studio"))
        assert False, "expected GenerationFailure"
    except GenerationFailure as e:
        assert e.attempts == 2


def test_render_svg():
    """The plan carries rooms, doors and labels"""
    house = HouseService(CATALOG).generate_house(8, spec_named("bedroom-bathroom")).house
    svg = render_svg(house)
    assert svg.startswith("<svg")
    assert 'class="room bathroom"' in svg and 'class="room bedroom"' in svg
    assert 'class="door"' in svg and 'class="label"' in svg
    bare = render_svg(house, RenderOptions(objects=False, labels=False))
    assert 'class="object"' not in bare and 'class="label"' not in bare


def test_stats_merge():
    """Per-house stats add up"""
    service = HouseService(CATALOG)
    houses = [generate_indexed(service, 4, i, REGISTRY)[1].house for i in range(2)]
    total = compute_stats(houses)
    parts = [house_stats(h) for h in houses]
    assert total.house_count == 2
    assert sum(total.rooms_per_house.values()) == 2
    assert abs(total.total_area - sum(p.total_area for p in parts)) < 1e-9
    assert sum(total.object_type_counts.values()) == sum(len(h.all_objects()) for h in houses)
    assert sum(total.room_type_counts.values()) == sum(len(h.rooms) for h in houses)
    try:
        parts[0].merge(DatasetStats(bucket_size=25.0))
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_dataset_is_reproducible():
    """A dataset regenerates byte for byte from its manifest inputs"""
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        manifest, failed = generate_dataset(7, 2, a, settings.CATALOG_PATH, settings.ROOM_SPECS_PATH)
        generate_dataset(7, 2, b, settings.CATALOG_PATH, settings.ROOM_SPECS_PATH)
        assert failed == []
        assert load_manifest(os.path.join(a, MANIFEST_FILE)) == manifest
        files = house_files(a)
        assert [os.path.basename(f) for f in files] == [e.file for e in manifest.houses]
        for entry, path in zip(manifest.houses, files):
            assert load_house(path).metadata.seed == entry.seed
            with open(path, "rb") as fa, open(os.path.join(b, entry.file), "rb") as fb:
                assert fa.read() == fb.read()
        assert os.path.exists(os.path.join(a, "house.schema.json"))


def test_bench_summary():
    """Throughput and retry rate from finished jobs"""
    jobs = [
        HouseJob(index=0, seed=1, room_spec_id="studio", data=b"{}", attempts=1, timings={"layout": 0.5}),
        HouseJob(index=1, seed=2, room_spec_id="studio", attempts=3, timings={"layout": 0.5, "furnish": 1.0}, error="boom"),
    ]
    report = summarize(jobs, jobs=1, wall_seconds=2.0)
    assert report.houses_per_second == 1.0
    assert report.stage_seconds["layout"] == 1.0
    assert report.stage_houses_per_second["connect"] == 0.0
    assert report.attempts == 4 and report.failures == 1
    assert report.retry_rate == 0.75


def test_generated_house_invariants():
    """Placement, split, lighting and reachability rules hold on houses from every split"""
    service = HouseService(CATALOG)
    validator = ValidateService(CATALOG)
    for split in (Split.TRAIN, Split.VAL, Split.TEST):
        for index in range(10):
            _, result = generate_indexed(service, 31, index, REGISTRY, split)
            house = result.house
            assert house.metadata.split == split
            check_floor_clearances(house)
            check_back_against_wall(house)
            check_surface_children(house)
            check_wall_objects(house)
            check_split(house, split)
            check_lamp_lights(house)
            nav = validator.reachable_positions(house)
            assert np.array_equal(nav.reachable, flood_fill(nav.free, nav.seed))


def test_parallel_matches_serial():
    """A process pool writes the same bytes as a single job"""
    serial = run_jobs(9, range(4), settings.CATALOG_PATH, settings.ROOM_SPECS_PATH, jobs=1)
    parallel = run_jobs(9, range(4), settings.CATALOG_PATH, settings.ROOM_SPECS_PATH, jobs=2)
    assert [j.index for j in parallel] == [0, 1, 2, 3]
    assert all(j.error is None for j in serial)
    assert [j.data for j in serial] == [j.data for j in parallel]
    assert [j.attempts for j in serial] == [j.attempts for j in parallel]


def test_retry_rate():
    """Fewer than one attempt in ten is thrown away over a fixed seed set"""
    results = run_jobs(5, range(200), settings.CATALOG_PATH, settings.ROOM_SPECS_PATH, jobs=2)
    report = summarize(results, jobs=2, wall_seconds=1.0)
    assert report.failures == 0
    assert report.retry_rate < 0.1, report.retry_rate


def test_cli():
    """gen, validate, render, stats and schema through the command line"""
    runner = CliRunner()
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "houses")
        result = runner.invoke(cli, ["gen", "--count", "1", "--seed", "2", "--out", out])
        assert result.exit_code == 0, result.output
        assert os.path.exists(os.path.join(out, MANIFEST_FILE))

        report_path = os.path.join(tmp, "report.json")
        result = runner.invoke(cli, ["validate", "--in", out, "--json", report_path])
        assert result.exit_code == 0, result.output
        with open(report_path) as fh:
            report = json.load(fh)
        assert report["passed"] is True and report["seconds"] >= 0
        house_report = report["houses"]["house_00000.json"]
        assert house_report["passed"] is True and sum(house_report["roomCounts"].values()) > 0

        svg = os.path.join(tmp, "house.svg")
        house = house_files(out)[0]
        assert runner.invoke(cli, ["render", "--in", house, "--svg", svg]).exit_code == 0
        assert os.path.exists(svg)

        result = runner.invoke(cli, ["stats", "--in", out])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["houseCount"] == 1

        result = runner.invoke(cli, ["schema"])
        assert result.exit_code == 0
        assert "properties" in json.loads(result.stdout)

        broken = os.path.join(tmp, "broken.json")
        with open(broken, "w") as fh:
            fh.write("{")
        assert runner.invoke(cli, ["validate", "--in", broken]).exit_code == 2

        empty = os.path.join(tmp, "empty_specs.json")
        with open(empty, "w") as fh:
            fh.write("[]")
        result = runner.invoke(cli, ["gen", "--room-specs", empty, "--out", os.path.join(tmp, "none")])
        assert result.exit_code == 2


if __name__ == "__main__":
    print("🚀 Testing House Pipeline")
    print("=" * 50)

    tests = [
        test_same_seed_same_bytes,
        test_json_round_trip,
        test_parse_errors,
        test_single_bathroom,
        test_generated_houses_validate,
        test_spec_choice_is_per_seed,
        test_generation_failure,
        test_render_svg,
        test_stats_merge,
        test_dataset_is_reproducible,
        test_bench_summary,
        test_generated_house_invariants,
        test_parallel_matches_serial,
        test_retry_rate,
        test_cli,
    ]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"✅ {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"❌ {test.__name__}: {e}")

    print(f"\n{'✅ All tests completed!' if not failed else f'❌ {failed} tests failed'}")
