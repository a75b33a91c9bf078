from typing import Any, Dict, List
import logging

import numpy as np
from pydantic import ValidationError

from app.core.exceptions import EmptyRegistry, SchemaError
from app.models.roomspec import RoomSpec
from app.utils.helpers import read_json

logger = logging.getLogger(__name__)


def _node_path(loc) -> str:
    """Human readable node path from a pydantic error location"""
    parts = []
    for key in loc:
        if isinstance(key, int):
            parts.append(f"[{key}]")
        else:
            parts.append(f".{key}")
    return "".join(parts).lstrip(".") or "<root>"


def parse_room_spec(doc: Dict[str, Any]) -> RoomSpec:
    """Validate one room-spec document"""
    try:
        return RoomSpec.model_validate(doc)
    except ValidationError as e:
        err = e.errors()[0]
        spec_id = doc.get("id") if isinstance(doc, dict) else None
        raise SchemaError(err["msg"], record=spec_id, location=_node_path(err["loc"])) from e


def serialize_room_spec(spec: RoomSpec) -> Dict[str, Any]:
    return spec.model_dump(mode="json", by_alias=True, exclude_none=True)


def load_room_specs(path: str) -> List[RoomSpec]:
    """Load the JSON array of room specs"""
    doc = read_json(path)
    if not isinstance(doc, list):
        raise SchemaError("Room-spec file must be a JSON array", record=path)
    if not doc:
        raise EmptyRegistry(f"Room spec registry {path} is empty")
    specs = [parse_room_spec(item) for item in doc]
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise SchemaError("Duplicate room spec id", record=next(i for i in ids if ids.count(i) > 1))
    logger.info(f"Loaded {len(specs)} room specs from {path}")
    return specs


def sample_room_spec(registry: List[RoomSpec], rng: np.random.Generator) -> RoomSpec:
    """Weighted draw proportional to sampling_weight"""
    if not registry:
        raise EmptyRegistry("Room spec registry is empty")
    weights = np.array([s.sampling_weight for s in registry], dtype=float)
    return registry[int(rng.choice(len(registry), p=weights / weights.sum()))]
