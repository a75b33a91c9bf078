from .roomspec import RoomSpec, SpecNode, RoomType, NodeKind, BoundaryOverride
from .sag import SagDef, SagEdge, AssetSampler, GroupMember, PlacedGroup, PlacementType, Vertical, Horizontal
from .catalog import AssetCatalog, AssetType, AssetInstance, MaterialCatalog, SpawnEntry, Split, ObjectState, TimeOfDay
from .layout import GenParams, InteriorBoundary, PlanRoom, FloorPlan
from .house import (
    House, HouseMetadata, RoomRecord, WallSegment, Opening, PlacedObject,
    ConnectionKind, PlacementKind, MaterialRef, StructureMaterials,
    DirectionalLight, PointLight, Lighting, ProceduralParameters, Vec3
)
from .navigation import NavGrid, EpisodeTargetState

__all__ = [
    "RoomSpec",
    "SpecNode",
    "RoomType",
    "NodeKind",
    "BoundaryOverride",
    "SagDef",
    "SagEdge",
    "AssetSampler",
    "GroupMember",
    "PlacedGroup",
    "PlacementType",
    "Vertical",
    "Horizontal",
    "AssetCatalog",
    "AssetType",
    "AssetInstance",
    "MaterialCatalog",
    "SpawnEntry",
    "Split",
    "ObjectState",
    "TimeOfDay",
    "GenParams",
    "InteriorBoundary",
    "PlanRoom",
    "FloorPlan",
    "House",
    "HouseMetadata",
    "RoomRecord",
    "WallSegment",
    "Opening",
    "PlacedObject",
    "ConnectionKind",
    "PlacementKind",
    "MaterialRef",
    "StructureMaterials",
    "DirectionalLight",
    "PointLight",
    "Lighting",
    "ProceduralParameters",
    "Vec3",
    "NavGrid",
    "EpisodeTargetState",
]
