from typing import Any, Dict, List, Tuple
import logging

from pydantic import ValidationError

from app.core.exceptions import SchemaError
from app.models.catalog import AssetCatalog, AssetInstance, Split, split_matches
from app.models.roomspec import RoomType
from app.models.sag import PlacementType
from app.utils.helpers import read_json

logger = logging.getLogger(__name__)

SUPPORTED_SCHEMA_VERSIONS = {1}
MAX_ANY_SPLIT_INSTANCES = 5


def _record_id(doc: Any, loc: Tuple) -> str:
    """Best-effort id of the record a pydantic error location points into"""
    node = doc
    record = None
    for key in loc:
        try:
            node = node[key]
        except (KeyError, IndexError, TypeError):
            break
        if isinstance(node, dict):
            for field in ("id", "name"):
                if field in node:
                    record = str(node[field])
    return record or "/".join(str(k) for k in loc[:2])


def parse_catalog(doc: Dict[str, Any]) -> AssetCatalog:
    """Validate a catalog document and check cross-record invariants"""
    if isinstance(doc, dict) and doc.get("schemaVersion", doc.get("schema_version", 1)) not in SUPPORTED_SCHEMA_VERSIONS:
        raise SchemaError("Unsupported catalog schemaVersion", record="schemaVersion")
    try:
        catalog = AssetCatalog.model_validate(doc)
    except ValidationError as e:
        err = e.errors()[0]
        loc = tuple(err["loc"])
        raise SchemaError(err["msg"], record=_record_id(doc, loc), location="/".join(str(k) for k in loc)) from e

    _check_references(catalog)
    return catalog


def _check_references(catalog: AssetCatalog) -> None:
    names = [t.name for t in catalog.asset_types]
    if len(set(names)) != len(names):
        raise SchemaError("Duplicate asset type name", record=next(n for n in names if names.count(n) > 1))
    ids = [i.id for i in catalog.asset_instances]
    if len(set(ids)) != len(ids):
        raise SchemaError("Duplicate asset instance id", record=next(i for i in ids if ids.count(i) > 1))

    counts: Dict[str, int] = {}
    for inst in catalog.asset_instances:
        if not catalog.has_type(inst.asset_type):
            raise SchemaError(f"Unknown asset type {inst.asset_type}", record=inst.id)
        counts[inst.asset_type] = counts.get(inst.asset_type, 0) + 1
    for inst in catalog.asset_instances:
        if inst.split == Split.ANY and counts[inst.asset_type] > MAX_ANY_SPLIT_INSTANCES:
            raise SchemaError(
                f"split=any is only allowed for types with at most {MAX_ANY_SPLIT_INSTANCES} instances "
                f"({inst.asset_type} has {counts[inst.asset_type]})",
                record=inst.id,
            )

    for entry in catalog.spawn_table:
        for name in (entry.receptacle, entry.object):
            if not catalog.has_type(name):
                raise SchemaError(f"Spawn table references unknown type {name}", record=f"{entry.receptacle}/{entry.object}")

    for sag in catalog.semantic_asset_groups:
        for sampler in sag.samplers:
            candidates = catalog.sampler_candidates(sampler)
            if not candidates:
                raise SchemaError(f"Sampler {sampler.id} has no candidates", record=sag.id)
            types = set()
            for cid in candidates:
                if not catalog.has_instance(cid):
                    raise SchemaError(f"Sampler {sampler.id} references unknown instance {cid}", record=sag.id)
                types.add(catalog.instance(cid).asset_type)
            if len(types) != 1 or (sampler.asset_type and sampler.asset_type not in types):
                raise SchemaError(f"Sampler {sampler.id} mixes asset types {sorted(types)}", record=sag.id)
        for link in sag.links:
            link_types = {catalog.sampler_type(sag.sampler(sid)) for sid in link}
            if len(link_types) != 1:
                raise SchemaError(f"Linked samplers {link} do not share an asset type", record=sag.id)


def load_catalog(path: str) -> AssetCatalog:
    """Load and validate the asset catalog file"""
    try:
        doc = read_json(path)
        catalog = parse_catalog(doc)
        logger.info(
            f"Loaded catalog {path}: {len(catalog.asset_types)} types, "
            f"{len(catalog.asset_instances)} instances, {len(catalog.semantic_asset_groups)} groups"
        )
        return catalog
    except SchemaError as e:
        logger.error(f"Catalog {path} rejected: {e}")
        raise


def dump_catalog(catalog: AssetCatalog) -> Dict[str, Any]:
    return catalog.model_dump(mode="json", by_alias=True)


def fits_footprint(width: float, depth: float, rect_w: float, rect_h: float, pad: float) -> bool:
    """True when the padded footprint fits the rectangle in either orientation"""
    return (depth + pad <= rect_w and width + pad <= rect_h) or (depth + pad <= rect_h and width + pad <= rect_w)


def filter_floor_assets(
    catalog: AssetCatalog,
    room_type: RoomType,
    placement: PlacementType,
    split: Split,
    max_footprint: Tuple[float, float],
    pad: float = 0.5,
) -> List[AssetInstance]:
    """Floor instances that semantically and physically fit a rectangle, sorted by id"""
    rect_w, rect_h = max_footprint
    if rect_w <= 0 or rect_h <= 0:
        raise ValueError("max_footprint must be positive")
    out = []
    for asset_type in catalog.asset_types:
        if not asset_type.placeable_on_floor or placement not in asset_type.placements:
            continue
        if asset_type.room_weight(room_type) <= 0:
            continue
        for inst in catalog.instances_of(asset_type.name):
            if not split_matches(inst.split, split):
                continue
            if fits_footprint(inst.width, inst.depth, rect_w, rect_h, pad):
                out.append(inst)
    return sorted(out, key=lambda i: i.id)


def spawn_probability(catalog: AssetCatalog, receptacle_type: str, object_type: str) -> float:
    """Table entry for the pair, 0 when absent"""
    return catalog.spawn_p(receptacle_type, object_type)
