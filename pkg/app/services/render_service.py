from typing import Dict, Tuple
import logging

import svgwrite
from pydantic import BaseModel, Field

from app.models.house import House, Opening, PlacedObject, WallSegment
from app.models.roomspec import RoomType
from app.utils.geometry import FRONT

logger = logging.getLogger(__name__)

ROOM_COLORS: Dict[RoomType, str] = {
    RoomType.BEDROOM: "#f2c14e",
    RoomType.BATHROOM: "#5fa8d3",
    RoomType.KITCHEN: "#f78154",
    RoomType.LIVING_ROOM: "#4d9078",
}


class RenderOptions(BaseModel):
    scale: float = Field(50.0, description="Pixels per meter")
    margin: float = Field(20.0, description="Pixels around the house")
    objects: bool = True
    labels: bool = True
    precision: int = 2


class SvgCanvas:
    """Maps house meters to SVG pixels; z grows upward on the page"""

    def __init__(self, house: House, options: RenderOptions):
        self.options = options
        xs = [x for r in house.rooms for x, _ in r.floor_polygon]
        zs = [z for r in house.rooms for _, z in r.floor_polygon]
        self.max_x, self.max_z = max(xs), max(zs)
        self.width = self.px(self.max_x) + 2 * options.margin
        self.height = self.px(self.max_z) + 2 * options.margin

    def px(self, meters: float) -> float:
        return round(meters * self.options.scale, self.options.precision)

    def point(self, x: float, z: float) -> Tuple[float, float]:
        m = self.options.margin
        return (round(m + self.px(x), self.options.precision), round(m + self.px(self.max_z - z), self.options.precision))


def render_svg(house: House, options: RenderOptions = RenderOptions()) -> str:
    """Top-down plan: rooms by type, object footprints with a front tick, door and window markers"""
    canvas = SvgCanvas(house, options)
    dwg = svgwrite.Drawing(size=(canvas.width, canvas.height), profile="full", debug=False)
    dwg.add(dwg.rect(insert=(0, 0), size=(canvas.width, canvas.height), fill="white"))

    for room in house.rooms:
        dwg.add(
            dwg.polygon(
                [canvas.point(x, z) for x, z in room.floor_polygon],
                fill=ROOM_COLORS[room.room_type],
                stroke="black",
                stroke_width=2,
                class_=f"room {room.room_type.value}",
                id=room.id,
            )
        )

    if options.objects:
        for obj in house.all_objects():
            _draw_object(dwg, canvas, obj)

    walls = {w.id: w for w in house.walls}
    for opening in house.openings():
        _draw_opening(dwg, canvas, opening, walls[opening.wall])
    for window in house.windows:
        _draw_wall_item(dwg, canvas, window, walls[window.parent], "window", "#1b4965")

    if options.labels:
        for room in house.rooms:
            xs = [x for x, _ in room.floor_polygon]
            zs = [z for _, z in room.floor_polygon]
            dwg.add(
                dwg.text(
                    room.room_type.value.replace("_", " "),
                    insert=canvas.point(min(xs) + 0.15, max(zs) - 0.35),
                    font_size=12,
                    font_family="Arial",
                    class_="label",
                )
            )
    logger.debug(f"Rendered house {house.metadata.seed}: {len(house.rooms)} rooms")
    return dwg.tostring()


def _draw_object(dwg, canvas: SvgCanvas, obj: PlacedObject) -> None:
    rect = obj.footprint()
    left, top = canvas.point(rect.min_x, rect.max_z)
    dwg.add(
        dwg.rect(
            insert=(left, top),
            size=(canvas.px(rect.width), canvas.px(rect.depth)),
            fill="none" if obj.bottom > 1e-6 else "#ffffff",
            fill_opacity=0.6,
            stroke="#333333",
            stroke_width=1,
            class_="object",
            id=obj.id,
        )
    )
    fx, fz = FRONT[obj.rotation % 360]
    cx, cz = rect.center
    half = min(rect.width, rect.depth) / 2
    dwg.add(dwg.line(canvas.point(cx, cz), canvas.point(cx + fx * half, cz + fz * half), stroke="#333333", stroke_width=1, class_="front"))


def _draw_opening(dwg, canvas: SvgCanvas, opening: Opening, wall: WallSegment) -> None:
    lo = opening.offset_along_wall
    start, end = wall.point_at(lo), wall.point_at(lo + opening.width)
    kind = "open" if opening.kind.value == "open_wall" else "door"
    dwg.add(
        dwg.line(
            canvas.point(*start),
            canvas.point(*end),
            stroke="#ffffff" if kind == "open" else "#7b2d26",
            stroke_width=5,
            class_=kind,
            id=opening.id,
        )
    )


def _draw_wall_item(dwg, canvas: SvgCanvas, item: PlacedObject, wall: WallSegment, kind: str, color: str) -> None:
    lo, hi = item.wall_span
    dwg.add(dwg.line(canvas.point(*wall.point_at(lo)), canvas.point(*wall.point_at(hi)), stroke=color, stroke_width=4, class_=kind, id=item.id))
