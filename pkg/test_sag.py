#!/usr/bin/env python3
"""
Tests for semantic asset group layout, rejection and combination counts
"""

import numpy as np

from app.core.config import settings
from app.core.exceptions import RejectionExhausted
from app.core.rng import stream
from app.models.catalog import Split
from app.models.sag import SagDef
from app.services.catalog_service import load_catalog, parse_catalog
from app.services.sag_service import SagService, count_combinations, member_rect, members_clip


def edge(parent, child, **extra):
    return {"parent": parent, "child": child, **extra}


def group_catalog():
    chairs = [{"id": f"Chair_{i:02d}", "assetType": "Chair", "bbox": [0.5, 0.9, 0.5], "split": "train"} for i in range(30)]
    return parse_catalog(
        {
            "assetTypes": [{"name": "Table"}, {"name": "Chair"}, {"name": "Bed"}, {"name": "Pillow"}],
            "assetInstances": [
                {"id": "Table_1", "assetType": "Table", "bbox": [1.0, 0.75, 1.0]},
                {"id": "Table_2", "assetType": "Table", "bbox": [2.0, 0.75, 1.0]},
                {"id": "Bed_1", "assetType": "Bed", "bbox": [1.6, 0.5, 2.0]},
                {"id": "Pillow_1", "assetType": "Pillow", "bbox": [0.6, 0.15, 0.4]},
            ]
            + chairs,
            "materials": {
                "solidColors": [[255, 255, 255]],
                "wallTextures": ["wall_a"],
                "floorMaterials": ["floor_a"],
                "skyboxes": {"midday": ["sky_a"]},
            },
            "semanticAssetGroups": [
                {
                    "id": "table_chair",
                    "samplers": [{"id": "table", "candidates": ["Table_1"]}, {"id": "chair", "assetType": "Chair"}],
                    "edges": [edge("table", "chair", anchorH="Right", pivotH="Left", rotation=90)],
                },
                {
                    "id": "four_chairs",
                    "samplers": [{"id": f"c{i}", "assetType": "Chair"} for i in range(4)],
                    "edges": [edge("c0", f"c{i}", anchorH="Right", pivotH="Left", offset=[float(i), 0.0]) for i in range(1, 4)],
                },
                {
                    "id": "matched_pair",
                    "samplers": [{"id": "a", "assetType": "Chair"}, {"id": "b", "assetType": "Chair"}],
                    "edges": [edge("a", "b", anchorH="Right", pivotH="Left", offset=[0.5, 0.0])],
                    "links": [["a", "b"]],
                },
                {
                    "id": "clipping",
                    "samplers": [{"id": "a", "assetType": "Chair"}, {"id": "b", "assetType": "Chair"}],
                    "edges": [edge("a", "b")],
                },
                {
                    "id": "tucked",
                    "samplers": [{"id": "table", "candidates": ["Table_1"]}, {"id": "chair", "assetType": "Chair"}],
                    "edges": [edge("table", "chair", anchorV="Top", pivotV="Top", offset=[0.0, 0.15], allowOverlap=True)],
                },
                {
                    "id": "bed_pillow",
                    "samplers": [{"id": "bed", "candidates": ["Bed_1"]}, {"id": "pillow", "candidates": ["Pillow_1"]}],
                    "edges": [edge("bed", "pillow", anchorV="Bottom", pivotV="Bottom", offset=[0.0, 0.1], stack=True)],
                },
            ],
        }
    )


CATALOG = group_catalog()
SERVICE = SagService(CATALOG)


def test_anchor_contact():
    """Chair's left middle touches the table's right middle"""
    sag = CATALOG.sag("table_chair")
    table, chair = SERVICE.layout(sag, {"table": "Table_1", "chair": "Chair_00"})
    assert table.center == (0.0, 0.0)
    assert chair.rotation == 90
    assert abs(member_rect(chair).min_x - member_rect(table).max_x) < 1e-9
    assert abs(chair.center[1] - table.center[1]) < 1e-9


def test_anchor_follows_parent_width():
    """A table twice as wide pushes the chair out by half the difference"""
    sag = CATALOG.sag("table_chair")
    _, narrow = SERVICE.layout(sag, {"table": "Table_1", "chair": "Chair_00"})
    table, wide = SERVICE.layout(sag, {"table": "Table_2", "chair": "Chair_00"})
    assert abs((wide.center[0] - narrow.center[0]) - 0.5) < 1e-9
    assert abs(member_rect(wide).min_x - member_rect(table).max_x) < 1e-9


def test_translation_equivariance():
    """Moving the group moves every member by the same amount"""
    group = SERVICE.instantiate_sag(CATALOG.sag("four_chairs"), Split.TRAIN, stream(1, "furnish"))
    a = [o for o in SERVICE.materialize(group, (2.0, 3.0), 0, "room|0", "g").walk()]
    b = [o for o in SERVICE.materialize(group, (5.5, -1.0), 0, "room|0", "g").walk()]
    for x, y in zip(a, b):
        assert abs((y.position.x - x.position.x) - 3.5) < 1e-9
        assert abs((y.position.z - x.position.z) + 4.0) < 1e-9
        assert x.rotation == y.rotation


def test_materialize_rotation():
    """A quarter turn swaps the group's extents in the world"""
    group = SERVICE.instantiate_sag(CATALOG.sag("table_chair"), Split.TRAIN, stream(2, "furnish"))
    root = SERVICE.materialize(group, (0.0, 0.0), 90, "room|0", "g")
    chair = root.children[0]
    assert root.rotation == 90 and chair.rotation == 180
    assert abs(chair.position.x) < 1e-9 and chair.position.z > root.position.z
    assert chair.parent == root.id and chair.sag_id == "table_chair"


def test_linked_samplers_match():
    """Linked samplers always draw the same instance"""
    sag = CATALOG.sag("matched_pair")
    rng = np.random.default_rng(3)
    for _ in range(200):
        group = SERVICE.instantiate_sag(sag, Split.TRAIN, rng)
        assert group.members[0].instance_id == group.members[1].instance_id


def test_rejection_exhausted():
    """Members that always clip exhaust the attempt budget"""
    try:
        SERVICE.instantiate_sag(CATALOG.sag("clipping"), Split.TRAIN, stream(0, "furnish"), max_attempts=5)
        assert False, "expected RejectionExhausted"
    except RejectionExhausted:
        pass


def test_tuck_under_allowed():
    """Marked edges may overlap without rejection"""
    group = SERVICE.instantiate_sag(CATALOG.sag("tucked"), Split.TRAIN, stream(0, "furnish"))
    table, chair = group.members
    assert members_clip(table, chair)
    assert group.attempts == 1


def test_stacked_member():
    """Stacked children start at the parent's top and hang off it"""
    group = SERVICE.instantiate_sag(CATALOG.sag("bed_pillow"), None, stream(0, "furnish"))
    bed, pillow = group.members
    assert pillow.bottom == bed.size[1]
    assert not members_clip(bed, pillow)
    root = SERVICE.materialize(group, (1.0, 1.0), 0, "room|0", "g")
    assert abs(root.children[0].bottom - 0.5) < 1e-9


def test_members_disjoint():
    """Accepted groups never clip outside marked edges"""
    for seed in range(50):
        group = SERVICE.instantiate_sag(CATALOG.sag("four_chairs"), Split.TRAIN, stream(seed, "furnish"))
        for i, a in enumerate(group.members):
            for b in group.members[i + 1 :]:
                assert not members_clip(a, b)


def test_count_combinations():
    """Free samplers multiply, links collapse, nothing counts once"""
    assert count_combinations(CATALOG.sag("four_chairs"), CATALOG) == 810_000
    assert count_combinations(CATALOG.sag("matched_pair"), CATALOG) == 30
    assert count_combinations(SagDef(id="empty"), CATALOG) == 1
    assert count_combinations(CATALOG.sag("table_chair"), CATALOG, Split.TEST) == 0


def test_deterministic():
    """Same stream, same group"""
    sag = CATALOG.sag("four_chairs")
    assert SERVICE.instantiate_sag(sag, Split.TRAIN, stream(5, "furnish")) == SERVICE.instantiate_sag(sag, Split.TRAIN, stream(5, "furnish"))


def test_shipped_groups():
    """Every shipped group instantiates for the train split"""
    catalog = load_catalog(settings.CATALOG_PATH)
    service = SagService(catalog)
    assert len(catalog.semantic_asset_groups) == 18
    for sag in catalog.semantic_asset_groups:
        assert count_combinations(sag, catalog, Split.TRAIN) > 0
        groups = []
        for seed in range(10):
            try:
                groups.append(service.instantiate_sag(sag, Split.TRAIN, stream(seed, sag.id)))
            except RejectionExhausted:
                continue
        assert groups, sag.id
        assert all(g.members[0].sampler_id == sag.root_id for g in groups)


if __name__ == "__main__":
    print("🚀 Testing Semantic Asset Groups")
    print("=" * 50)

    tests = [
        test_anchor_contact,
        test_anchor_follows_parent_width,
        test_translation_equivariance,
        test_materialize_rotation,
        test_linked_samplers_match,
        test_rejection_exhausted,
        test_tuck_under_allowed,
        test_stacked_member,
        test_members_disjoint,
        test_count_combinations,
        test_deterministic,
        test_shipped_groups,
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
