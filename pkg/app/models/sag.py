from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import Field, field_validator, model_validator

from app.models.base import CamelModel
from app.models.roomspec import RoomType


class PlacementType(str, Enum):
    EDGE = "edge"
    CORNER = "corner"
    MIDDLE = "middle"


class Vertical(str, Enum):
    TOP = "Top"
    CENTER = "Center"
    BOTTOM = "Bottom"


class Horizontal(str, Enum):
    LEFT = "Left"
    CENTER = "Center"
    RIGHT = "Right"


class AssetSampler(CamelModel):
    id: str
    asset_type: Optional[str] = Field(None, description="Expands to every instance of the type when candidates is empty")
    candidates: List[str] = Field(default_factory=list, description="Candidate instance ids")


class SagEdge(CamelModel):
    """Child sampler placed relative to its parent: child pivot = parent anchor + offset"""

    parent: str
    child: str
    anchor_v: Vertical = Vertical.CENTER
    anchor_h: Horizontal = Horizontal.CENTER
    pivot_v: Vertical = Vertical.CENTER
    pivot_h: Horizontal = Horizontal.CENTER
    offset: Tuple[float, float] = (0.0, 0.0)
    rotation: int = Field(0, description="Child rotation relative to the group frame")
    stack: bool = Field(False, description="Child rests on top of the parent")
    allow_overlap: bool = Field(False, description="Parent/child footprints may overlap (tucked under)")

    @field_validator("rotation")
    @classmethod
    def validate_rotation(cls, v):
        if v % 90 != 0:
            raise ValueError("Rotation must be a multiple of 90")
        return v % 360


class SagDef(CamelModel):
    id: str
    samplers: List[AssetSampler] = Field(default_factory=list)
    edges: List[SagEdge] = Field(default_factory=list)
    links: List[List[str]] = Field(default_factory=list)
    placements: List[PlacementType] = Field(default_factory=list)
    room_weights: Dict[RoomType, int] = Field(default_factory=dict)

    @field_validator("room_weights")
    @classmethod
    def validate_room_weights(cls, v):
        for room_type, weight in v.items():
            if weight not in (0, 1, 2, 3):
                raise ValueError(f"Room weight for {room_type.value} must be in {{0,1,2,3}}")
        return v

    @model_validator(mode="after")
    def validate_tree(self):
        ids = [s.id for s in self.samplers]
        if len(set(ids)) != len(ids):
            raise ValueError("Duplicate sampler id")
        known = set(ids)
        parent_of: Dict[str, str] = {}
        for edge in self.edges:
            if edge.parent not in known or edge.child not in known:
                raise ValueError(f"Edge {edge.parent}->{edge.child} references an unknown sampler")
            if edge.child in parent_of:
                raise ValueError(f"Sampler {edge.child} has two parents")
            parent_of[edge.child] = edge.parent
        if self.samplers:
            roots = [i for i in ids if i not in parent_of]
            if len(roots) != 1:
                raise ValueError("Sampler graph must have exactly one root")
            # every sampler must reach the root
            for sid in ids:
                seen = set()
                while sid in parent_of:
                    if sid in seen:
                        raise ValueError("Sampler graph has a cycle")
                    seen.add(sid)
                    sid = parent_of[sid]
        linked = set()
        for group in self.links:
            for sid in group:
                if sid not in known:
                    raise ValueError(f"Link references unknown sampler {sid}")
                if sid in linked:
                    raise ValueError(f"Sampler {sid} is in two links")
                linked.add(sid)
        return self

    @property
    def root_id(self) -> Optional[str]:
        children = {e.child for e in self.edges}
        for s in self.samplers:
            if s.id not in children:
                return s.id
        return None

    def sampler(self, sampler_id: str) -> AssetSampler:
        return next(s for s in self.samplers if s.id == sampler_id)

    def edge_to(self, child: str) -> Optional[SagEdge]:
        return next((e for e in self.edges if e.child == child), None)

    def order(self) -> List[str]:
        """Samplers parents-first (breadth first from the root)"""
        root = self.root_id
        if root is None:
            return []
        out, queue = [], [root]
        while queue:
            sid = queue.pop(0)
            out.append(sid)
            queue.extend(e.child for e in self.edges if e.parent == sid)
        return out


class GroupMember(CamelModel):
    sampler_id: str
    instance_id: str
    asset_type: str
    center: Tuple[float, float] = Field(..., description="Group-frame (x, z) of the bbox center")
    bottom: float = Field(0.0, description="Height of the bbox bottom")
    rotation: int = 0
    size: Tuple[float, float, float] = Field(..., description="Unrotated bbox (x, y, z)")
    parent_sampler: Optional[str] = None


class PlacedGroup(CamelModel):
    sag_id: str
    root_instance: str
    members: List[GroupMember]
    footprint: Tuple[float, float, float, float] = Field(..., description="Group-frame (min_x, min_z, max_x, max_z)")
    attempts: int = 1

    @property
    def width(self) -> float:
        return self.footprint[2] - self.footprint[0]

    @property
    def depth(self) -> float:
        return self.footprint[3] - self.footprint[1]
