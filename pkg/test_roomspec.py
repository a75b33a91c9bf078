#!/usr/bin/env python3
"""
Tests for room-spec parsing and weighted spec sampling
"""

import os
import tempfile

import numpy as np

from app.core.config import settings
from app.core.exceptions import EmptyRegistry, SchemaError
from app.core.rng import stream
from app.models.roomspec import RoomType
from app.services.roomspec_service import load_room_specs, parse_room_spec, sample_room_spec, serialize_room_spec


def room(room_type, weight=1.0, **extra):
    return {"kind": "room", "roomType": room_type, "growthWeight": weight, **extra}


def four_room_doc():
    return {
        "id": "four-room",
        "root": {
            "kind": "zone",
            "children": [
                {"kind": "zone", "children": [room("bedroom"), room("bathroom", avoidDoorToParent=True)]},
                {"kind": "zone", "children": [room("kitchen"), room("living_room")]},
            ],
        },
    }


def test_single_leaf():
    """A lone leaf is a one-room spec"""
    spec = parse_room_spec({"id": "bath", "root": room("bathroom")})
    assert spec.room_count == 1
    assert spec.leaves[0].room_type == RoomType.BATHROOM
    assert spec.sampling_weight == 1.0


def test_four_room_tree():
    """Leaves come back in pre-order"""
    spec = parse_room_spec(four_room_doc())
    assert [leaf.room_type for leaf in spec.leaves] == [
        RoomType.BEDROOM,
        RoomType.BATHROOM,
        RoomType.KITCHEN,
        RoomType.LIVING_ROOM,
    ]
    assert spec.leaves[1].avoid_door_to_parent


def test_round_trip():
    """Serialize then parse gives the same spec"""
    spec = parse_room_spec(four_room_doc())
    again = parse_room_spec(serialize_room_spec(spec))
    assert again == spec


def test_degenerate_zone():
    """Zones with fewer than two children are rejected with a node path"""
    doc = {"id": "bad", "root": {"kind": "zone", "children": [room("bedroom")]}}
    try:
        parse_room_spec(doc)
        assert False, "expected SchemaError"
    except SchemaError as e:
        assert e.record == "bad"
        assert e.location.startswith("root")


def test_leaf_shape():
    """Leaves need a room type and no children"""
    for node in ({"kind": "room"}, {"kind": "room", "roomType": "bedroom", "children": [room("bathroom"), room("kitchen")]}):
        try:
            parse_room_spec({"id": "bad", "root": node})
            assert False, "expected SchemaError"
        except SchemaError:
            pass


def test_bad_weights():
    """Growth and sampling weights must be positive"""
    for doc in (
        {"id": "bad", "root": room("bedroom", weight=0)},
        {"id": "bad", "samplingWeight": -1, "root": room("bedroom")},
    ):
        try:
            parse_room_spec(doc)
            assert False, "expected SchemaError"
        except SchemaError:
            pass


def test_shipped_registry():
    """Sixteen specs covering one to ten rooms"""
    specs = load_room_specs(settings.ROOM_SPECS_PATH)
    assert len(specs) == 16
    counts = {s.room_count for s in specs}
    assert min(counts) == 1
    assert max(counts) == 10
    bathroom = next(s for s in specs if s.id == "bathroom")
    assert bathroom.override.x_range == (2, 3)


def test_sample_single():
    """A one-spec registry always yields that spec"""
    spec = parse_room_spec({"id": "bath", "root": room("bathroom")})
    rng = stream(1, "spec")
    assert all(sample_room_spec([spec], rng) is spec for _ in range(100))


def test_sample_weighted():
    """Frequencies follow sampling weights"""
    a = parse_room_spec({"id": "a", "samplingWeight": 3, "root": room("bedroom")})
    b = parse_room_spec({"id": "b", "samplingWeight": 1, "root": room("kitchen")})
    rng = np.random.default_rng(7)
    n = 100_000
    hits = sum(1 for _ in range(n) if sample_room_spec([a, b], rng) is a)
    assert abs(hits / n - 0.75) < 0.01

    c = parse_room_spec({"id": "c", "root": room("bedroom")})
    d = parse_room_spec({"id": "d", "root": room("kitchen")})
    hits = sum(1 for _ in range(n) if sample_room_spec([c, d], rng) is c)
    assert abs(hits / n - 0.5) < 0.01


def test_sample_empty():
    """Sampling from nothing raises EmptyRegistry"""
    try:
        sample_room_spec([], np.random.default_rng(0))
        assert False, "expected EmptyRegistry"
    except EmptyRegistry:
        pass


def test_load_empty_registry():
    """An empty room-spec file is rejected when loaded"""
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "room_specs.json")
        with open(path, "w") as fh:
            fh.write("[]")
        try:
            load_room_specs(path)
            assert False, "expected EmptyRegistry"
        except EmptyRegistry as e:
            assert "empty" in str(e)


if __name__ == "__main__":
    print("🚀 Testing Room Specs")
    print("=" * 50)

    tests = [
        test_single_leaf,
        test_four_room_tree,
        test_round_trip,
        test_degenerate_zone,
        test_leaf_shape,
        test_bad_weights,
        test_shipped_registry,
        test_sample_single,
        test_sample_weighted,
        test_sample_empty,
        test_load_empty_registry,
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
