"""SVG rendering of solution layouts."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .geom import SimplePolygon, transform_polygon
from .model import Instance, Layout, Solution

_ZONE_FILL = ["#d62728", "#ff7f0e", "#bcbd22", "#2ca02c", "#17becf"]


def _path(s: SimplePolygon) -> str:
    head, *rest = s.vertices
    return f"M {head.x!r} {head.y!r} " + " ".join(f"L {p.x!r} {p.y!r}" for p in rest) + " Z"


def layout_svg(lay: Layout, draw_surrogate: bool = False) -> str:
    box = lay.container.shape_original.aabb
    pad = 0.02 * max(box.width, box.height)
    w, h = box.width + 2 * pad, box.height + 2 * pad
    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        viewBox=f"{box.x_min - pad!r} {-(box.y_max + pad)!r} {w!r} {h!r}",
        width="800",
        height=f"{800 * h / w:.0f}",
    )
    # flip y so the drawing matches the usual math orientation
    g = ET.SubElement(root, "g", transform="scale(1,-1)")
    stroke = f"{0.002 * max(w, h)!r}"
    ET.SubElement(
        g, "path", d=_path(lay.container.shape_original), fill="none", stroke="black",
        **{"class": "container", "stroke-width": stroke},
    )
    for z in lay.container.zones:
        ET.SubElement(
            g, "path", d=_path(z.shape_original), fill=_ZONE_FILL[z.quality % len(_ZONE_FILL)],
            **{"class": "zone", "fill-opacity": "0.3", "data-quality": str(z.quality), "stroke-width": stroke},
        )
    for p in lay.placements:
        item = lay.items[p.item_id]
        shape = transform_polygon(item.shape_original, p.transformation)
        ET.SubElement(
            g, "path", d=_path(shape), fill="#4c72b0", stroke="#1f3a60",
            **{"class": "item", "fill-opacity": "0.7", "data-item": p.item_id, "stroke-width": stroke},
        )
    if draw_surrogate:
        for p in lay.placements:
            sur = lay.items[p.item_id].surrogate.transform(p.transformation)
            for (cx, cy), r in sur.poles:
                ET.SubElement(
                    g, "circle", cx=repr(cx), cy=repr(cy), r=repr(r), fill="none", stroke="#c44e52",
                    **{"class": "pole", "stroke-width": stroke},
                )
            for (x1, y1), (x2, y2) in sur.piers:
                ET.SubElement(
                    g, "line", x1=repr(x1), y1=repr(y1), x2=repr(x2), y2=repr(y2), stroke="#55a868",
                    **{"class": "pier", "stroke-width": stroke},
                )
    return ET.tostring(root, encoding="unicode")


def export_svg(sol: Solution, inst: Instance, draw_surrogate: bool = False) -> list[str]:
    """One SVG document per layout."""
    return [layout_svg(lay, draw_surrogate) for lay in sol.layouts]
