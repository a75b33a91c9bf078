from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from pydantic import Field

from app.models.base import CamelModel
from app.models.catalog import RGB, Split, TimeOfDay
from app.models.roomspec import RoomType
from app.utils.geometry import Rect

Point2 = Tuple[float, float]
Box = Tuple[float, float, float, float]


class Vec3(CamelModel):
    x: float
    y: float
    z: float


class ConnectionKind(str, Enum):
    DOORWAY = "doorway"
    DOOR_FRAME = "door_frame"
    OPEN_WALL = "open_wall"
    EXTERIOR_DOOR = "exterior_door"


class PlacementKind(str, Enum):
    FLOOR = "floor"
    WALL = "wall"
    SURFACE = "surface"
    SAG_MEMBER = "sag_member"


class MaterialRef(CamelModel):
    name: Optional[str] = Field(None, description="Texture material id")
    color: Optional[RGB] = Field(None, description="Solid paint color")


class WallSegment(CamelModel):
    """Maximal collinear piece of a room's boundary facing one neighbor"""

    id: str
    room_a: str
    room_b: str = Field(..., description="Neighbor room id or 'exterior'")
    start: Point2
    end: Point2
    normal: Point2 = Field(..., description="Unit normal pointing into room_a")

    @property
    def length(self) -> float:
        return abs(self.end[0] - self.start[0]) + abs(self.end[1] - self.start[1])

    @property
    def horizontal(self) -> bool:
        """Runs along x (constant z)"""
        return abs(self.end[1] - self.start[1]) < 1e-9

    def point_at(self, offset: float) -> Point2:
        if self.horizontal:
            return (min(self.start[0], self.end[0]) + offset, self.start[1])
        return (self.start[0], min(self.start[1], self.end[1]) + offset)

    def strip(self, lo: float, hi: float, depth: float, flip: bool = False) -> Rect:
        """Rectangle over offsets [lo, hi] reaching `depth` into room_a (into room_b when flipped)"""
        nx, nz = self.normal
        if flip:
            nx, nz = -nx, -nz
        if self.horizontal:
            x0, x1 = self.point_at(lo)[0], self.point_at(hi)[0]
            z = self.start[1]
            return Rect(x0, min(z, z + nz * depth), x1, max(z, z + nz * depth))
        z0, z1 = self.point_at(lo)[1], self.point_at(hi)[1]
        x = self.start[0]
        return Rect(min(x, x + nx * depth), z0, max(x, x + nx * depth), z1)

    def span_of(self, rect: Rect) -> Tuple[float, float]:
        """Interval of `rect` projected on the wall, in wall offsets"""
        if self.horizontal:
            base = min(self.start[0], self.end[0])
            return (rect.min_x - base, rect.max_x - base)
        base = min(self.start[1], self.end[1])
        return (rect.min_z - base, rect.max_z - base)


class Opening(CamelModel):
    id: str
    kind: ConnectionKind
    wall: str = Field(..., description="Wall id on room_a's side")
    room_a: str
    room_b: str
    asset_instance: Optional[str] = None
    offset_along_wall: float = 0.0
    width: float
    height: float = 0.0
    open_direction: Optional[str] = Field(None, description="Room the door swings into (doorways)")
    swing: Optional[Box] = None
    clearance: List[Box] = Field(default_factory=list, description="Floor zones kept free of furniture")
    closed: bool = False


class PlacedObject(CamelModel):
    id: str
    asset_id: str
    asset_type: str
    room_id: str
    position: Vec3 = Field(..., description="Bounding box center")
    rotation: int = Field(0, description="Degrees around the vertical axis")
    size: Vec3 = Field(..., description="Unrotated bounding box extents")
    placement_kind: PlacementKind
    parent: Optional[str] = Field(None, description="Room, wall or receptacle id")
    placement: Optional[str] = Field(None, description="edge / corner / middle for floor objects")
    clearance: Optional[Box] = Field(None, description="Footprint inflated by its margins")
    wall_span: Optional[Tuple[float, float]] = Field(None, description="Offsets covered on the parent wall")
    sag_id: Optional[str] = None
    kinematic: bool = False
    states: Optional[Dict[str, Union[bool, float]]] = None
    color: Optional[RGB] = None
    material: Optional[str] = None
    children: List["PlacedObject"] = Field(default_factory=list)

    def footprint(self) -> Rect:
        w, d = (self.size.z, self.size.x) if self.rotation % 180 == 90 else (self.size.x, self.size.z)
        return Rect.around((self.position.x, self.position.z), w, d)

    @property
    def bottom(self) -> float:
        return self.position.y - self.size.y / 2

    @property
    def top(self) -> float:
        return self.position.y + self.size.y / 2

    def walk(self) -> List["PlacedObject"]:
        out = [self]
        for child in self.children:
            out.extend(child.walk())
        return out


class RoomRecord(CamelModel):
    id: str
    room_type: RoomType
    floor_polygon: List[Point2] = Field(..., description="Counter-clockwise vertices in meters")
    floor_material: MaterialRef
    wall_material: MaterialRef
    area: float


class StructureMaterials(CamelModel):
    wall_same: bool
    floor_same: bool
    wall_solid: Dict[str, bool]
    walls: Dict[str, MaterialRef]
    floors: Dict[str, MaterialRef]
    ceiling: MaterialRef


class DirectionalLight(CamelModel):
    elevation: float
    azimuth: float
    intensity: float
    color: RGB


class PointLight(CamelModel):
    id: str
    position: Vec3
    room_id: str
    object_id: Optional[str] = None
    color: RGB
    intensity: float
    range: float


class Lighting(CamelModel):
    directional_light: DirectionalLight
    point_lights: List[PointLight]
    skybox_id: str
    time_of_day: TimeOfDay


class ProceduralParameters(CamelModel):
    ceiling_height: float
    ceiling_material: MaterialRef
    lights: List[PointLight]
    directional_light: DirectionalLight
    skybox_id: str
    time_of_day: TimeOfDay
    house_bias: float = 0.0
    material_randomized: bool = False


class HouseMetadata(CamelModel):
    seed: int
    room_spec_id: str
    split: Split
    schema_version: int
    generator_version: str
    attempts: int = Field(..., description="Generation attempts including the accepted one")
    scale: float
    boundary_size: Tuple[int, int]
    cuts: int = 0


class House(CamelModel):
    metadata: HouseMetadata
    rooms: List[RoomRecord]
    walls: List[WallSegment]
    doors: List[Opening]
    open_walls: List[Opening]
    windows: List[PlacedObject]
    objects: List[PlacedObject]
    procedural_parameters: ProceduralParameters
    structure: StructureMaterials

    def room(self, room_id: str) -> RoomRecord:
        return next(r for r in self.rooms if r.id == room_id)

    def wall(self, wall_id: str) -> WallSegment:
        return next(w for w in self.walls if w.id == wall_id)

    def openings(self) -> List[Opening]:
        return list(self.doors) + list(self.open_walls)

    def all_objects(self) -> List[PlacedObject]:
        out: List[PlacedObject] = []
        for obj in self.objects:
            out.extend(obj.walk())
        return out


PlacedObject.model_rebuild()
