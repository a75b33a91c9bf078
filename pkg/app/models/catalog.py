from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import Field, PrivateAttr, field_validator, model_validator

from app.models.base import CamelModel
from app.models.roomspec import RoomType
from app.models.sag import AssetSampler, PlacementType, SagDef
from app.utils.helpers import is_finite


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"
    ANY = "any"


class ObjectState(str, Enum):
    TOGGLEABLE = "toggleable"
    DIRTYABLE = "dirtyable"
    OPENABLE = "openable"


class TimeOfDay(str, Enum):
    MIDDAY = "midday"
    GOLDEN_HOUR = "golden_hour"
    BLUE_HOUR = "blue_hour"


Vector3 = Tuple[float, float, float]
RGB = Tuple[int, int, int]


class AssetType(CamelModel):
    name: str = Field(..., description="Object type identifier")
    placeable_on_floor: bool = False
    placements: List[PlacementType] = Field(default_factory=list)
    room_weights: Dict[RoomType, int] = Field(default_factory=dict)
    allow_duplicates_in_room: bool = True
    material_class: Optional[str] = Field(None, description="Semantic class for material swaps")
    color_randomizable: bool = False
    states: List[ObjectState] = Field(default_factory=list)
    object_bias: float = 0.0
    receptacle_bias: float = 0.2
    wall_mountable: bool = Field(False, description="Can hang on a wall (televisions)")
    emits_light: bool = Field(False, description="Carries a point light (lamps)")

    @field_validator("room_weights")
    @classmethod
    def validate_room_weights(cls, v):
        for room_type, weight in v.items():
            if weight not in (0, 1, 2, 3):
                raise ValueError(f"Room weight for {room_type.value} must be in {{0,1,2,3}}, got {weight}")
        return v

    @field_validator("object_bias", "receptacle_bias")
    @classmethod
    def validate_bias(cls, v):
        if not is_finite(v):
            raise ValueError("Bias must be finite")
        return v

    @model_validator(mode="after")
    def validate_placements(self):
        if self.placeable_on_floor and not self.placements:
            raise ValueError("Floor-placeable type needs at least one placement")
        if not self.placeable_on_floor and self.placements:
            raise ValueError("Placements are only allowed on floor-placeable types")
        return self

    def room_weight(self, room_type: RoomType) -> int:
        return self.room_weights.get(room_type, 0)


class AssetInstance(CamelModel):
    id: str
    asset_type: str
    bbox: Vector3 = Field(..., description="Extents (x, y, z) in meters")
    split: Split = Split.ANY
    is_receptacle: bool = False
    visibility_points: List[Vector3] = Field(default_factory=list, description="Bbox-centered local points")

    @field_validator("bbox")
    @classmethod
    def validate_bbox(cls, v):
        if any(not is_finite(e) or e <= 0 for e in v):
            raise ValueError("Bounding box extents must be positive")
        return v

    @field_validator("visibility_points")
    @classmethod
    def validate_visibility_points(cls, v):
        if len(v) > 6:
            raise ValueError("At most 6 visibility points")
        return v

    @model_validator(mode="after")
    def default_visibility_points(self):
        if not self.visibility_points:
            x, y, z = (e / 2 for e in self.bbox)
            self.visibility_points = [(x, 0.0, 0.0), (-x, 0.0, 0.0), (0.0, y, 0.0), (0.0, -y, 0.0), (0.0, 0.0, z), (0.0, 0.0, -z)]
        return self

    @property
    def width(self) -> float:
        return self.bbox[0]

    @property
    def height(self) -> float:
        return self.bbox[1]

    @property
    def depth(self) -> float:
        return self.bbox[2]


class MaterialCatalog(CamelModel):
    solid_colors: List[RGB]
    wall_textures: List[str]
    floor_materials: List[str]
    skyboxes: Dict[TimeOfDay, List[str]]
    object_materials: Dict[str, List[str]] = Field(default_factory=dict, description="Material class -> material ids")

    @field_validator("solid_colors")
    @classmethod
    def validate_colors(cls, v):
        for color in v:
            if any(c < 0 or c > 255 for c in color):
                raise ValueError(f"Color {color} is not 8-bit RGB")
        return v

    @model_validator(mode="after")
    def validate_nonempty(self):
        for name in ("solid_colors", "wall_textures", "floor_materials"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if not any(self.skyboxes.values()):
            raise ValueError("At least one skybox is required")
        return self

    def skybox_list(self) -> List[Tuple[str, TimeOfDay]]:
        """(skybox id, time of day) in a stable order"""
        out = []
        for tod in TimeOfDay:
            out.extend((sid, tod) for sid in sorted(self.skyboxes.get(tod, [])))
        return out


class SpawnEntry(CamelModel):
    receptacle: str
    object: str
    p: float = Field(..., ge=0.0, le=1.0, description="Count ratio: times on receptacle / receptacle appearances")


class AssetCatalog(CamelModel):
    schema_version: int = 1
    asset_types: List[AssetType]
    asset_instances: List[AssetInstance]
    materials: MaterialCatalog
    spawn_table: List[SpawnEntry] = Field(default_factory=list)
    semantic_asset_groups: List[SagDef] = Field(default_factory=list)

    _types: Dict[str, AssetType] = PrivateAttr(default_factory=dict)
    _instances: Dict[str, AssetInstance] = PrivateAttr(default_factory=dict)
    _by_type: Dict[str, List[AssetInstance]] = PrivateAttr(default_factory=dict)
    _spawn: Dict[Tuple[str, str], float] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        self._types = {t.name: t for t in self.asset_types}
        self._instances = {i.id: i for i in self.asset_instances}
        by_type: Dict[str, List[AssetInstance]] = {}
        for inst in sorted(self.asset_instances, key=lambda i: i.id):
            by_type.setdefault(inst.asset_type, []).append(inst)
        self._by_type = by_type
        self._spawn = {(e.receptacle, e.object): e.p for e in self.spawn_table}

    def asset_type(self, name: str) -> AssetType:
        return self._types[name]

    def has_type(self, name: str) -> bool:
        return name in self._types

    def instance(self, instance_id: str) -> AssetInstance:
        return self._instances[instance_id]

    def has_instance(self, instance_id: str) -> bool:
        return instance_id in self._instances

    def instances_of(self, type_name: str, split: Optional[Split] = None) -> List[AssetInstance]:
        """Instances of a type sorted by id, optionally filtered to a house split"""
        items = self._by_type.get(type_name, [])
        if split is None:
            return list(items)
        return [i for i in items if split_matches(i.split, split)]

    def spawn_entries(self) -> Dict[Tuple[str, str], float]:
        return dict(self._spawn)

    def spawn_p(self, receptacle_type: str, object_type: str) -> float:
        return self._spawn.get((receptacle_type, object_type), 0.0)

    def spawnable_on(self, receptacle_type: str) -> List[str]:
        """Object types with a table entry for the receptacle, sorted"""
        return sorted(o for (r, o) in self._spawn if r == receptacle_type)

    def sag(self, sag_id: str) -> SagDef:
        return next(s for s in self.semantic_asset_groups if s.id == sag_id)

    def sampler_candidates(self, sampler: AssetSampler) -> List[str]:
        """Declared candidates, or every instance of the sampler's type when none are listed"""
        if sampler.candidates:
            return list(sampler.candidates)
        if sampler.asset_type:
            return [i.id for i in self.instances_of(sampler.asset_type)]
        return []

    def sampler_type(self, sampler: AssetSampler) -> Optional[str]:
        if sampler.asset_type:
            return sampler.asset_type
        ids = self.sampler_candidates(sampler)
        return self.instance(ids[0]).asset_type if ids and self.has_instance(ids[0]) else None


def split_matches(instance_split: Split, house_split: Split) -> bool:
    return instance_split == Split.ANY or house_split == Split.ANY or instance_split == house_split
