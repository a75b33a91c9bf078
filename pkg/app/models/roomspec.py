from enum import Enum
from typing import List, Optional, Tuple

from pydantic import Field, field_validator, model_validator

from app.models.base import CamelModel


class RoomType(str, Enum):
    BEDROOM = "bedroom"
    BATHROOM = "bathroom"
    KITCHEN = "kitchen"
    LIVING_ROOM = "living_room"


class NodeKind(str, Enum):
    ZONE = "zone"
    ROOM = "room"


class BoundaryOverride(CamelModel):
    """Inclusive integer bounds replacing the default boundary size sampling"""

    x_range: Optional[Tuple[int, int]] = Field(None, description="Inclusive (lo, hi) for the x size")
    z_range: Optional[Tuple[int, int]] = Field(None, description="Inclusive (lo, hi) for the z size")

    @field_validator("x_range", "z_range")
    @classmethod
    def validate_range(cls, v):
        if v is not None and not (2 <= v[0] <= v[1]):
            raise ValueError("Boundary range must satisfy 2 <= lo <= hi")
        return v


class SpecNode(CamelModel):
    kind: NodeKind = Field(..., description="zone or room leaf")
    room_type: Optional[RoomType] = Field(None, description="Room type (leaf only)")
    growth_weight: float = Field(1.0, gt=0, description="Relative area weight")
    children: List["SpecNode"] = Field(default_factory=list)
    avoid_door_to_parent: bool = Field(False, description="Only connect to siblings in the parent zone")
    boundary_override: Optional[BoundaryOverride] = None

    @model_validator(mode="after")
    def validate_shape(self):
        if self.kind == NodeKind.ROOM:
            if self.room_type is None:
                raise ValueError("Room leaf needs a roomType")
            if self.children:
                raise ValueError("Room leaf cannot have children")
        else:
            if len(self.children) < 2:
                raise ValueError("Zone needs at least 2 children")
            if self.room_type is not None:
                raise ValueError("Zone cannot have a roomType")
        return self

    def leaves(self) -> List["SpecNode"]:
        """Room leaves in pre-order"""
        if self.kind == NodeKind.ROOM:
            return [self]
        out: List[SpecNode] = []
        for child in self.children:
            out.extend(child.leaves())
        return out


class RoomSpec(CamelModel):
    id: str = Field(..., description="Spec identifier")
    sampling_weight: float = Field(1.0, gt=0)
    root: SpecNode
    boundary_override: Optional[BoundaryOverride] = None

    @property
    def leaves(self) -> List[SpecNode]:
        return self.root.leaves()

    @property
    def room_count(self) -> int:
        return len(self.leaves)

    @property
    def override(self) -> Optional[BoundaryOverride]:
        return self.boundary_override or self.root.boundary_override


SpecNode.model_rebuild()
