from typing import Dict, List, Optional, Sequence, Set, Tuple
import logging

import numpy as np
from shapely.geometry import Polygon

from app.core.config import Settings, settings
from app.core.exceptions import ConnectivityInfeasible, PlacementExhausted
from app.models.catalog import AssetCatalog, AssetInstance, Split
from app.models.house import ConnectionKind, Opening, WallSegment
from app.models.layout import FloorPlan
from app.models.roomspec import NodeKind, RoomSpec, RoomType, SpecNode
from app.utils.geometry import EPS, EXTERIOR, Rect
from app.utils.helpers import sample_pmf

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]

DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))
OPEN_ROOM_TYPES = {RoomType.KITCHEN, RoomType.LIVING_ROOM}
EXTERIOR_DOOR_ROOM_TYPES = (RoomType.KITCHEN, RoomType.LIVING_ROOM)


def wall_segments(plan: FloorPlan) -> List[WallSegment]:
    """Per-room maximal collinear boundary runs, each facing a single neighbor"""
    labels = plan.label_grid()
    nx, nz = labels.shape
    s = plan.scale
    runs: Dict[Tuple[int, int, int, int, str], List[int]] = {}
    for idx, room in enumerate(plan.rooms):
        for x, z in room.cells:
            for dx, dz in DIRECTIONS:
                a, b = x + dx, z + dz
                other = int(labels[a, b]) if 0 <= a < nx and 0 <= b < nz else -1
                if other == idx:
                    continue
                neighbor = plan.rooms[other].room_id if other >= 0 else EXTERIOR
                if dx != 0:
                    line, pos = x + (1 if dx == 1 else 0), z
                else:
                    line, pos = z + (1 if dz == 1 else 0), x
                runs.setdefault((idx, dx, dz, line, neighbor), []).append(pos)

    walls: List[WallSegment] = []
    counters: Dict[int, int] = {}
    for key in sorted(runs):
        idx, dx, dz, line, neighbor = key
        positions = sorted(runs[key])
        start = prev = positions[0]
        for pos in positions[1:] + [None]:
            if pos is not None and pos == prev + 1:
                prev = pos
                continue
            room_id = plan.rooms[idx].room_id
            k = counters.get(idx, 0)
            counters[idx] = k + 1
            if dx != 0:
                p0, p1 = (line * s, start * s), (line * s, (prev + 1) * s)
                normal = (float(-dx), 0.0)
            else:
                p0, p1 = (start * s, line * s), ((prev + 1) * s, line * s)
                normal = (0.0, float(-dz))
            walls.append(WallSegment(id=f"wall|{room_id}|{k}", room_a=room_id, room_b=neighbor, start=p0, end=p1, normal=normal))
            if pos is not None:
                start = prev = pos
    return walls


def shared_walls(walls: Sequence[WallSegment], room_a: str, room_b: str, min_length: float = 0.0) -> List[WallSegment]:
    """Walls of room_a facing room_b that are at least `min_length` long"""
    return [w for w in walls if w.room_a == room_a and w.room_b == room_b and w.length >= min_length - EPS]


class ConnectivityService:
    def __init__(self, catalog: Optional[AssetCatalog] = None, config: Settings = settings):
        self.catalog = catalog
        self.config = config

    def door_instances(self, kind: ConnectionKind, split: Split = Split.ANY) -> List[AssetInstance]:
        if self.catalog is None:
            return []
        type_name = self.config.DOORFRAME_ASSET_TYPE if kind == ConnectionKind.DOOR_FRAME else self.config.DOOR_ASSET_TYPE
        return self.catalog.instances_of(type_name, split)

    def min_door_width(self) -> float:
        """Narrowest doorway or door frame in the catalog (0 without a catalog)"""
        widths = [i.width for k in (ConnectionKind.DOORWAY, ConnectionKind.DOOR_FRAME) for i in self.door_instances(k)]
        return min(widths) if widths else 0.0

    # Connection graph

    def plan_connections(self, spec: RoomSpec, plan: FloorPlan, rng: np.random.Generator, walls: Optional[List[WallSegment]] = None) -> List[Pair]:
        """Random spanning tree over every zone's children, honoring avoid_door_to_parent"""
        walls = walls if walls is not None else wall_segments(plan)
        min_width = self.min_door_width()
        leaf_room = {id(leaf): plan.room_by_leaf(i).room_id for i, leaf in enumerate(spec.leaves)}
        adjacent: Set[Pair] = {(w.room_a, w.room_b) for w in walls if w.room_b != EXTERIOR and w.length >= min_width - EPS}
        pairs: List[Pair] = []
        self._connect_zone(spec.root, leaf_room, adjacent, rng, pairs)
        logger.debug(f"Planned {len(pairs)} connections for {len(plan.rooms)} rooms")
        return pairs

    def _connect_zone(self, node: SpecNode, leaf_room: Dict[int, str], adjacent: Set[Pair], rng, pairs: List[Pair]) -> None:
        if node.kind == NodeKind.ROOM:
            return
        groups: List[List[str]] = []
        for child in node.children:
            self._connect_zone(child, leaf_room, adjacent, rng, pairs)
            eligible = []
            for leaf in child.leaves():
                direct = child.kind == NodeKind.ROOM
                if direct or not leaf.avoid_door_to_parent:
                    eligible.append(leaf_room[id(leaf)])
            groups.append(eligible)

        in_tree = {int(rng.integers(len(groups)))}
        while len(in_tree) < len(groups):
            candidates = [
                (a, b, j)
                for i in sorted(in_tree)
                for j in range(len(groups))
                if j not in in_tree
                for a in groups[i]
                for b in groups[j]
                if (a, b) in adjacent
            ]
            if not candidates:
                raise ConnectivityInfeasible("Zone children cannot be joined through shared walls")
            a, b, j = candidates[int(rng.integers(len(candidates)))]
            pairs.append((a, b))
            in_tree.add(j)

    # Connection kinds

    def choose_connection_kind(self, type_a: RoomType, type_b: RoomType, rng: np.random.Generator) -> ConnectionKind:
        """Kitchen and living room may be open or framed; every other pair gets a doorway"""
        if {type_a, type_b} == OPEN_ROOM_TYPES:
            return ConnectionKind(sample_pmf(self.config.KITCHEN_LIVING_KINDS, rng))
        return ConnectionKind.DOORWAY

    # Openings

    def place_openings(
        self,
        plan: FloorPlan,
        connections: List[Pair],
        rng: np.random.Generator,
        split: Split = Split.ANY,
        walls: Optional[List[WallSegment]] = None,
        kinds: Optional[Dict[Pair, ConnectionKind]] = None,
    ) -> List[Opening]:
        """One opening per connection; doorway swings stay inside their room and never collide"""
        walls = walls if walls is not None else wall_segments(plan)
        polygons = plan.polygons()
        types = {r.room_id: r.room_type for r in plan.rooms}
        swings: List[Rect] = []
        openings: List[Opening] = []
        for k, (a, b) in enumerate(connections):
            kind = (kinds or {}).get((a, b)) or self.choose_connection_kind(types[a], types[b], rng)
            if kind == ConnectionKind.OPEN_WALL:
                openings.append(self._open_wall(k, a, b, walls, rng))
                continue
            opening = self._door(k, a, b, kind, walls, polygons, swings, rng, split)
            if opening.swing is not None:
                swings.append(Rect(*opening.swing))
            openings.append(opening)
        return openings

    def _open_wall(self, k: int, a: str, b: str, walls: List[WallSegment], rng) -> Opening:
        segments = shared_walls(walls, a, b)
        if not segments:
            raise ConnectivityInfeasible(f"No shared wall between {a} and {b}")
        wall = segments[int(rng.integers(len(segments)))]
        pad = self.config.OPEN_WALL_CLEARANCE
        clearance = [wall.strip(0.0, wall.length, pad), wall.strip(0.0, wall.length, pad, flip=True)]
        return Opening(
            id=f"open|{k}",
            kind=ConnectionKind.OPEN_WALL,
            wall=wall.id,
            room_a=a,
            room_b=b,
            offset_along_wall=0.0,
            width=wall.length,
            clearance=[tuple(c) for c in clearance],
        )

    def _door(self, k, a, b, kind, walls, polygons: Dict[str, Polygon], swings: List[Rect], rng, split) -> Opening:
        instances = self.door_instances(kind, split)
        segments = shared_walls(walls, a, b)
        longest = max((w.length for w in segments), default=0.0)
        fitting = [i for i in instances if i.width <= longest + EPS]
        if not fitting:
            raise PlacementExhausted(f"No {kind.value} asset fits between {a} and {b} (longest wall {longest:.2f} m)")

        for _ in range(self.config.DOOR_REJECTION_ATTEMPTS):
            inst = fitting[int(rng.integers(len(fitting)))]
            options = [w for w in segments if w.length >= inst.width - EPS]
            wall = options[int(rng.integers(len(options)))]
            w = inst.width
            offset = float(rng.uniform(0.0, max(0.0, wall.length - w)))
            into_a = bool(rng.integers(2) == 0)
            side_a = wall.strip(offset, offset + w, w)
            side_b = wall.strip(offset, offset + w, w, flip=True)
            swing = None
            if kind == ConnectionKind.DOORWAY:
                swing = side_a if into_a else side_b
                room = polygons[a] if into_a else polygons[b]
                if not room.buffer(EPS).covers(swing.to_polygon()):
                    continue
                if any(swing.overlaps(other) for other in swings):
                    continue
            return Opening(
                id=f"door|{k}",
                kind=kind,
                wall=wall.id,
                room_a=a,
                room_b=b,
                asset_instance=inst.id,
                offset_along_wall=offset,
                width=w,
                height=inst.height,
                open_direction=(a if into_a else b) if kind == ConnectionKind.DOORWAY else None,
                swing=tuple(swing) if swing else None,
                clearance=[tuple(side_a), tuple(side_b)],
            )
        raise PlacementExhausted(f"Door between {a} and {b} collided {self.config.DOOR_REJECTION_ATTEMPTS} times")

    def place_exterior_door(
        self,
        plan: FloorPlan,
        rng: np.random.Generator,
        split: Split = Split.ANY,
        walls: Optional[List[WallSegment]] = None,
        openings: Sequence[Opening] = (),
    ) -> Opening:
        """Single closed door to the outside, kitchens and living rooms first"""
        walls = walls if walls is not None else wall_segments(plan)
        instances = self.door_instances(ConnectionKind.DOORWAY, split)
        if not instances:
            raise PlacementExhausted("Catalog has no door assets")
        narrowest = min(i.width for i in instances)
        exterior = [w for w in walls if w.room_b == EXTERIOR and w.length >= narrowest - EPS]
        if not exterior:
            raise PlacementExhausted("No exterior wall fits a door")
        types = {r.room_id: r.room_type for r in plan.rooms}
        rooms = sorted({w.room_a for w in exterior})
        preferred = [r for r in rooms if types[r] in EXTERIOR_DOOR_ROOM_TYPES]
        room_id = (preferred or rooms)[int(rng.integers(len(preferred or rooms)))]

        taken = [Rect(*o.swing) for o in openings if o.swing is not None]
        taken += [Rect(*c) for o in openings for c in o.clearance]
        segments = [w for w in exterior if w.room_a == room_id]
        for _ in range(self.config.DOOR_REJECTION_ATTEMPTS):
            wall = segments[int(rng.integers(len(segments)))]
            fitting = [i for i in instances if i.width <= wall.length + EPS]
            inst = fitting[int(rng.integers(len(fitting)))]
            offset = float(rng.uniform(0.0, max(0.0, wall.length - inst.width)))
            inside = wall.strip(offset, offset + inst.width, inst.width)
            if any(inside.overlaps(t) for t in taken):
                continue
            logger.debug(f"Exterior door in {room_id} on {wall.id} at {offset:.2f}")
            return Opening(
                id="door|exterior",
                kind=ConnectionKind.EXTERIOR_DOOR,
                wall=wall.id,
                room_a=room_id,
                room_b=EXTERIOR,
                asset_instance=inst.id,
                offset_along_wall=offset,
                width=inst.width,
                height=inst.height,
                clearance=[tuple(inside)],
                closed=True,
            )
        raise PlacementExhausted(f"Exterior door in {room_id} collided {self.config.DOOR_REJECTION_ATTEMPTS} times")


def connection_graph_connected(room_ids: Sequence[str], pairs: Sequence[Pair]) -> bool:
    """Reachability over the undirected connection graph"""
    if not room_ids:
        return True
    adj: Dict[str, Set[str]] = {r: set() for r in room_ids}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {room_ids[0]}, [room_ids[0]]
    while stack:
        for n in adj[stack.pop()]:
            if n not in seen:
                seen.add(n)
                stack.append(n)
    return len(seen) == len(room_ids)
