"""
Semantic asset group instantiation.

Members are laid out in a group frame: the root sits at the origin with
rotation 0 and the group's front faces +z. A child's pivot point lands on its
parent's anchor point plus the edge offset. Anchors and pivots pick one of a
3x3 grid of bounding-box points, Left/Right along x and Bottom/Top along z.
"""

from math import prod
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from app.core.config import Settings, settings
from app.core.exceptions import RejectionExhausted
from app.models.catalog import AssetCatalog, AssetInstance, Split
from app.models.house import PlacedObject, PlacementKind, Vec3
from app.models.sag import GroupMember, Horizontal, PlacedGroup, SagDef, SagEdge, Vertical
from app.utils.geometry import Rect, rotate_point, rotated_extents

logger = logging.getLogger(__name__)

H_SIGN = {Horizontal.LEFT: -1.0, Horizontal.CENTER: 0.0, Horizontal.RIGHT: 1.0}
V_SIGN = {Vertical.BOTTOM: -1.0, Vertical.CENTER: 0.0, Vertical.TOP: 1.0}


def grid_point(center: Tuple[float, float], extents: Tuple[float, float], h: Horizontal, v: Vertical) -> Tuple[float, float]:
    """Point of a footprint's 3x3 anchor grid"""
    return (center[0] + H_SIGN[h] * extents[0] / 2, center[1] + V_SIGN[v] * extents[1] / 2)


def child_center(parent: GroupMember, edge: SagEdge, child: AssetInstance) -> Tuple[float, float]:
    """Center that puts the child's pivot on the parent's anchor plus the offset"""
    p_ext = rotated_extents(parent.size[0], parent.size[2], parent.rotation)
    c_ext = rotated_extents(child.width, child.depth, edge.rotation)
    ax, az = grid_point(parent.center, p_ext, edge.anchor_h, edge.anchor_v)
    px, pz = grid_point((0.0, 0.0), c_ext, edge.pivot_h, edge.pivot_v)
    return (ax + edge.offset[0] - px, az + edge.offset[1] - pz)


def member_rect(member: GroupMember) -> Rect:
    w, d = rotated_extents(member.size[0], member.size[2], member.rotation)
    return Rect.around(member.center, w, d)


def members_clip(a: GroupMember, b: GroupMember, tol: float = 1e-6) -> bool:
    """3D bounding-box intersection with touching faces allowed"""
    if not member_rect(a).overlaps(member_rect(b), tol):
        return False
    a_lo, a_hi = a.bottom, a.bottom + a.size[1]
    b_lo, b_hi = b.bottom, b.bottom + b.size[1]
    return a_lo < b_hi - tol and b_lo < a_hi - tol


def _candidates(sag: SagDef, sampler_id: str, catalog: AssetCatalog, split: Optional[Split]) -> List[str]:
    sampler = sag.sampler(sampler_id)
    ids = sorted(catalog.sampler_candidates(sampler))
    if split is None:
        return ids
    allowed = {i.id for i in catalog.instances_of(catalog.sampler_type(sampler), split)}
    return [i for i in ids if i in allowed]


def count_combinations(sag: SagDef, catalog: AssetCatalog, split: Optional[Split] = None) -> int:
    """Distinct instance assignments; a link group counts its shared candidates once"""
    linked = {sid for group in sag.links for sid in group}
    free = [len(_candidates(sag, s.id, catalog, split)) for s in sag.samplers if s.id not in linked]
    groups = []
    for group in sag.links:
        shared = set(_candidates(sag, group[0], catalog, split))
        for sid in group[1:]:
            shared &= set(_candidates(sag, sid, catalog, split))
        groups.append(len(shared))
    return prod(free) * prod(groups)


class SagService:
    def __init__(self, catalog: AssetCatalog, config: Settings = settings):
        self.catalog = catalog
        self.config = config

    def _draw(self, sag: SagDef, split: Optional[Split], rng: np.random.Generator) -> Dict[str, str]:
        chosen: Dict[str, str] = {}
        for group in sag.links:
            shared = sorted(set.intersection(*(set(_candidates(sag, sid, self.catalog, split)) for sid in group)))
            if not shared:
                raise RejectionExhausted(f"Linked samplers {group} of {sag.id} share no candidate")
            pick = shared[int(rng.integers(len(shared)))]
            for sid in group:
                chosen[sid] = pick
        for sid in sag.order():
            if sid in chosen:
                continue
            options = _candidates(sag, sid, self.catalog, split)
            if not options:
                raise RejectionExhausted(f"Sampler {sid} of {sag.id} has no candidate in split {split}")
            chosen[sid] = options[int(rng.integers(len(options)))]
        return chosen

    def layout(self, sag: SagDef, chosen: Dict[str, str]) -> List[GroupMember]:
        """Member poses for a fixed instance assignment"""
        members: Dict[str, GroupMember] = {}
        for sid in sag.order():
            inst = self.catalog.instance(chosen[sid])
            edge = sag.edge_to(sid)
            if edge is None:
                center, rotation, bottom, parent = (0.0, 0.0), 0, 0.0, None
            else:
                p = members[edge.parent]
                center, rotation, parent = child_center(p, edge, inst), edge.rotation, edge.parent
                bottom = p.bottom + p.size[1] if edge.stack else 0.0
            members[sid] = GroupMember(
                sampler_id=sid,
                instance_id=inst.id,
                asset_type=inst.asset_type,
                center=center,
                bottom=bottom,
                rotation=rotation,
                size=inst.bbox,
                parent_sampler=parent,
            )
        return [members[sid] for sid in sag.order()]

    def _collides(self, sag: SagDef, members: List[GroupMember]) -> bool:
        exempt = {(e.parent, e.child) for e in sag.edges if e.allow_overlap}
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if (a.sampler_id, b.sampler_id) in exempt or (b.sampler_id, a.sampler_id) in exempt:
                    continue
                if members_clip(a, b):
                    return True
        return False

    def instantiate_sag(
        self,
        sag: SagDef,
        split: Optional[Split],
        rng: np.random.Generator,
        max_attempts: Optional[int] = None,
    ) -> PlacedGroup:
        """Draw instances and reject combinations whose boxes clip"""
        max_attempts = max_attempts or self.config.SAG_REJECTION_ATTEMPTS
        for attempt in range(1, max_attempts + 1):
            chosen = self._draw(sag, split, rng)
            members = self.layout(sag, chosen)
            if self._collides(sag, members):
                continue
            rects = [member_rect(m) for m in members]
            bounds = (
                min(r.min_x for r in rects),
                min(r.min_z for r in rects),
                max(r.max_x for r in rects),
                max(r.max_z for r in rects),
            )
            return PlacedGroup(sag_id=sag.id, root_instance=members[0].instance_id, members=members, footprint=bounds, attempts=attempt)
        raise RejectionExhausted(f"Group {sag.id} clipped on all {max_attempts} attempts")

    def materialize(self, group: PlacedGroup, center: Tuple[float, float], rotation: int, room_id: str, id_prefix: str) -> PlacedObject:
        """World-space objects for a group whose footprint is centered at `center` with `rotation`

        Stacked members become children of the member they rest on; the rest hang off the root.
        """
        fx, fz = ((group.footprint[0] + group.footprint[2]) / 2, (group.footprint[1] + group.footprint[3]) / 2)
        objects: Dict[str, PlacedObject] = {}
        for k, m in enumerate(group.members):
            dx, dz = rotate_point((m.center[0] - fx, m.center[1] - fz), rotation)
            objects[m.sampler_id] = PlacedObject(
                id=f"{id_prefix}|{k}",
                asset_id=m.instance_id,
                asset_type=m.asset_type,
                room_id=room_id,
                position=Vec3(x=center[0] + dx, y=m.bottom + m.size[1] / 2, z=center[1] + dz),
                rotation=(m.rotation + rotation) % 360,
                size=Vec3(x=m.size[0], y=m.size[1], z=m.size[2]),
                placement_kind=PlacementKind.FLOOR if m.parent_sampler is None else PlacementKind.SAG_MEMBER,
                sag_id=group.sag_id,
            )
        root_id = group.members[0].sampler_id
        for m in group.members[1:]:
            stacked = m.bottom > 0
            holder = objects[m.parent_sampler] if stacked else objects[root_id]
            child = objects[m.sampler_id]
            child.parent = holder.id
            holder.children.append(child)
        return objects[root_id]
