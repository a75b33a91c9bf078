#!/usr/bin/env python3
"""
Tests for asset catalog loading, floor filtering and the spawn table
"""

import copy

from app.core.config import settings
from app.core.exceptions import SchemaError
from app.models.catalog import Split
from app.models.roomspec import RoomType
from app.models.sag import PlacementType
from app.services.catalog_service import (
    dump_catalog,
    filter_floor_assets,
    fits_footprint,
    load_catalog,
    parse_catalog,
    spawn_probability,
)
from app.utils.helpers import read_json

MATERIALS = {
    "solidColors": [[255, 255, 255]],
    "wallTextures": ["wall_a"],
    "floorMaterials": ["floor_a"],
    "skyboxes": {"midday": ["sky_a"]},
}


def minimal_doc():
    return {
        "schemaVersion": 1,
        "assetTypes": [
            {
                "name": "Crate",
                "placeableOnFloor": True,
                "placements": ["edge", "middle"],
                "roomWeights": {"kitchen": 2},
            }
        ],
        "assetInstances": [{"id": "Crate_1", "assetType": "Crate", "bbox": [1.0, 1.0, 1.0], "split": "train"}],
        "materials": copy.deepcopy(MATERIALS),
    }


def filter_doc():
    doc = minimal_doc()
    doc["assetTypes"] += [
        {"name": "Toilet", "placeableOnFloor": True, "placements": ["edge"], "roomWeights": {"bathroom": 3}},
        {"name": "Bench", "placeableOnFloor": True, "placements": ["edge"], "roomWeights": {"kitchen": 1}},
        {"name": "Cup"},
    ]
    doc["assetInstances"] += [
        {"id": "Toilet_1", "assetType": "Toilet", "bbox": [0.5, 0.8, 0.7], "split": "train"},
        {"id": "Bench_1", "assetType": "Bench", "bbox": [1.8, 0.5, 0.4], "split": "train"},
        {"id": "Bench_2", "assetType": "Bench", "bbox": [0.6, 0.5, 0.4], "split": "test"},
        {"id": "Cup_1", "assetType": "Cup", "bbox": [0.1, 0.1, 0.1]},
    ]
    doc["spawnTable"] = [{"receptacle": "Crate", "object": "Cup", "p": 0.3}]
    return doc


def test_shipped_catalog():
    """The shipped catalog loads and every type keeps the any-split rule"""
    catalog = load_catalog(settings.CATALOG_PATH)
    assert len(catalog.asset_types) > 50
    assert len(catalog.semantic_asset_groups) > 0
    for asset_type in catalog.asset_types:
        instances = catalog.instances_of(asset_type.name)
        if len(instances) > 5:
            assert all(i.split != Split.ANY for i in instances), asset_type.name
    for p in catalog.spawn_entries().values():
        assert 0.0 <= p <= 1.0


def test_minimal_catalog():
    """One type and one instance load as-is"""
    catalog = parse_catalog(minimal_doc())
    assert len(catalog.asset_types) == 1
    assert catalog.instance("Crate_1").asset_type == "Crate"
    # bbox face centers stand in for missing visibility points
    assert len(catalog.instance("Crate_1").visibility_points) == 6


def test_round_trip():
    """Dumping and re-parsing gives the same catalog"""
    catalog = parse_catalog(filter_doc())
    again = parse_catalog(dump_catalog(catalog))
    assert dump_catalog(again) == dump_catalog(catalog)


def test_shipped_catalog_round_trip():
    """Loading the shipped catalog keeps samplers as written and dumps to a fixed point"""
    source = read_json(settings.CATALOG_PATH)
    catalog = load_catalog(settings.CATALOG_PATH)
    dumped = dump_catalog(catalog)
    assert dump_catalog(parse_catalog(dumped)) == dumped
    written = {(g["id"], s["id"]): s for g in source["semanticAssetGroups"] for s in g["samplers"]}
    type_only = 0
    for sag in catalog.semantic_asset_groups:
        for sampler in sag.samplers:
            raw = written[(sag.id, sampler.id)]
            assert sampler.candidates == raw.get("candidates", [])
            assert sampler.asset_type == raw.get("assetType")
            if not sampler.candidates:
                type_only += 1
                expected = [i.id for i in catalog.instances_of(sampler.asset_type)]
                assert catalog.sampler_candidates(sampler) == expected
    assert type_only > 0


def test_any_split_limit():
    """split=any on a type with six instances is rejected"""
    doc = minimal_doc()
    doc["assetInstances"] = [
        {"id": f"Crate_{i}", "assetType": "Crate", "bbox": [1.0, 1.0, 1.0], "split": "any"} for i in range(6)
    ]
    try:
        parse_catalog(doc)
        assert False, "expected SchemaError"
    except SchemaError as e:
        assert e.record == "Crate_0"

    doc["assetInstances"] = doc["assetInstances"][:5]
    assert len(parse_catalog(doc).asset_instances) == 5


def test_room_weight_range():
    """Room weights outside {0,1,2,3} are rejected"""
    doc = minimal_doc()
    doc["assetTypes"][0]["roomWeights"] = {"kitchen": 4}
    try:
        parse_catalog(doc)
        assert False, "expected SchemaError"
    except SchemaError as e:
        assert "Room weight" in str(e)


def test_unknown_references():
    """Instances and spawn entries must point at declared types"""
    doc = minimal_doc()
    doc["assetInstances"].append({"id": "Ghost_1", "assetType": "Ghost", "bbox": [1.0, 1.0, 1.0]})
    try:
        parse_catalog(doc)
        assert False, "expected SchemaError"
    except SchemaError as e:
        assert e.record == "Ghost_1"

    doc = minimal_doc()
    doc["spawnTable"] = [{"receptacle": "Crate", "object": "Ghost", "p": 0.5}]
    try:
        parse_catalog(doc)
        assert False, "expected SchemaError"
    except SchemaError:
        pass


def test_fit_predicate():
    """Padded footprint fits in either orientation"""
    assert fits_footprint(1.0, 1.0, 2.0, 2.0, 0.5)
    assert fits_footprint(1.8, 0.4, 1.0, 2.4, 0.5)
    assert not fits_footprint(1.8, 0.4, 1.0, 2.2, 0.5)


def test_filter_floor_assets():
    """Room weight, placement, split and size all gate the result"""
    catalog = parse_catalog(filter_doc())
    kitchen = filter_floor_assets(catalog, RoomType.KITCHEN, PlacementType.EDGE, Split.TRAIN, (2.0, 2.0))
    ids = [i.id for i in kitchen]
    assert "Toilet_1" not in ids
    assert "Crate_1" in ids
    assert "Bench_2" not in ids
    assert ids == sorted(ids)

    rotated = filter_floor_assets(catalog, RoomType.KITCHEN, PlacementType.EDGE, Split.TRAIN, (1.0, 2.4))
    assert "Bench_1" in [i.id for i in rotated]

    middle = filter_floor_assets(catalog, RoomType.KITCHEN, PlacementType.MIDDLE, Split.ANY, (3.0, 3.0))
    assert [i.id for i in middle] == ["Crate_1"]

    bathroom = filter_floor_assets(catalog, RoomType.BATHROOM, PlacementType.EDGE, Split.ANY, (3.0, 3.0))
    assert [i.id for i in bathroom] == ["Toilet_1"]


def test_filter_rejects_empty_footprint():
    """A non-positive rectangle is a caller bug"""
    catalog = parse_catalog(filter_doc())
    try:
        filter_floor_assets(catalog, RoomType.KITCHEN, PlacementType.EDGE, Split.ANY, (0.0, 2.0))
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_spawn_probability():
    """Table lookups, 0 for absent pairs"""
    catalog = parse_catalog(filter_doc())
    assert spawn_probability(catalog, "Crate", "Cup") == 0.3
    assert spawn_probability(catalog, "Cup", "Crate") == 0.0
    assert spawn_probability(catalog, "Bench", "Cup") == 0.0
    assert catalog.spawnable_on("Crate") == ["Cup"]


if __name__ == "__main__":
    print("🚀 Testing Asset Catalog")
    print("=" * 50)

    tests = [
        test_shipped_catalog,
        test_minimal_catalog,
        test_round_trip,
        test_shipped_catalog_round_trip,
        test_any_split_limit,
        test_room_weight_range,
        test_unknown_references,
        test_fit_predicate,
        test_filter_floor_assets,
        test_filter_rejects_empty_footprint,
        test_spawn_probability,
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
