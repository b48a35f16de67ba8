"""Problem entities, instance ingestion, layouts and the independent feasibility audit."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Any, Union

import jsonschema

from .cde import CDEConfig, CDEngine, QueryShape
from .geom import EPS, InvalidPolygonError, SimplePolygon, Transformation, naive_collision, naive_inside, transform_polygon
from .hazard import Hazard, HazardFilter, HazardKind
from .simplify import SimplifyConfig, SimplifyMode, simplify_polygon
from .surrogate import Surrogate, SurrogateConfig, build_surrogate


class InstanceError(ValueError):
    """Instance document rejected."""


CONTINUOUS = "continuous"

_POLY = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
}
INSTANCE_SCHEMA: dict = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "items"],
    "properties": {
        "name": {"type": "string"},
        "strip_height": {"type": "number", "exclusiveMinimum": 0},
        "bins": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["shape", "cost"],
                "properties": {
                    "shape": _POLY,
                    "cost": {"type": "number", "minimum": 0},
                    "zones": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["quality", "shape"],
                            "properties": {"quality": {"type": "integer"}, "shape": _POLY},
                        },
                    },
                },
            },
        },
        "items": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "demand", "shape", "rotations"],
                "properties": {
                    "id": {"type": "string"},
                    "demand": {"type": "integer", "minimum": 1},
                    "shape": _POLY,
                    "rotations": {
                        "oneOf": [
                            {"type": "array", "items": {"type": "number"}, "minItems": 1},
                            {"const": CONTINUOUS},
                        ]
                    },
                    "min_quality": {"type": "integer"},
                    "allow_flip": {"type": "boolean"},
                },
            },
        },
    },
    "oneOf": [{"required": ["strip_height"]}, {"required": ["bins"]}],
}


@dataclass(frozen=True)
class ModelConfig:
    """How raw shapes are turned into engine-ready ones."""

    simplify_alpha: float = 0.001
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)
    quadtree_depth: int = 5

    def cde(self) -> CDEConfig:
        return CDEConfig(quadtree_depth=self.quadtree_depth, surrogate=self.surrogate)


@dataclass(frozen=True)
class Item:
    id: str
    demand: int
    shape_original: SimplePolygon
    shape_cde: SimplePolygon
    surrogate: Surrogate
    allowed_rotations: Union[tuple[float, ...], str]  # degrees, or CONTINUOUS
    min_quality: int | None = None
    allow_flip: bool = False

    @property
    def continuous(self) -> bool:
        return self.allowed_rotations == CONTINUOUS

    @property
    def filter(self) -> HazardFilter:
        return HazardFilter(min_quality=self.min_quality)

    def rotation_allowed(self, radians: float) -> bool:
        if self.continuous:
            return math.isfinite(radians)
        return any(math.radians(d) == radians for d in self.allowed_rotations)


@dataclass(frozen=True)
class QualityZone:
    quality: int
    shape_original: SimplePolygon
    shape_cde: SimplePolygon


@dataclass(frozen=True)
class StripKind:
    height: float


@dataclass(frozen=True)
class BinKind:
    cost: float


@dataclass(frozen=True)
class Container:
    id: str
    shape_original: SimplePolygon
    shape_cde: SimplePolygon
    zones: tuple[QualityZone, ...] = ()
    kind: Union[StripKind, BinKind] = StripKind(1.0)

    @classmethod
    def strip(cls, height: float, width: float) -> "Container":
        rect = SimplePolygon([(0.0, 0.0), (width, 0.0), (width, height), (0.0, height)])
        return cls("strip", rect, rect, (), StripKind(height))

    @property
    def width(self) -> float:
        return self.shape_original.aabb.width


@dataclass(frozen=True)
class Instance:
    name: str
    items: tuple[Item, ...]
    strip_height: float | None = None
    bins: tuple[Container, ...] = ()
    config: ModelConfig = field(default_factory=ModelConfig, compare=False)

    @property
    def is_strip(self) -> bool:
        return self.strip_height is not None

    def item(self, item_id: str) -> Item:
        for it in self.items:
            if it.id == item_id:
                return it
        raise KeyError(item_id)


@dataclass(frozen=True)
class Placement:
    item_id: str
    transformation: Transformation
    container_index: int = 0


# ---------------------------------------------------------------- ingestion


def _polygon(raw, what: str) -> SimplePolygon:
    pts = [tuple(float(c) for c in p) for p in raw]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    try:
        return SimplePolygon(pts)
    except InvalidPolygonError as exc:
        raise InstanceError(f"{what}: {exc}") from None


def _schema_error_context(doc: dict, err: jsonschema.ValidationError) -> str:
    path = list(err.absolute_path)
    if len(path) >= 2 and path[0] == "items" and isinstance(path[1], int):
        try:
            return f"item {doc['items'][path[1]]['id']!r}"
        except (KeyError, TypeError, IndexError):
            return f"item #{path[1]}"
    if len(path) >= 2 and path[0] == "bins":
        return f"bin #{path[1]}"
    return "instance"


def load_instance(doc: dict, config: ModelConfig = ModelConfig()) -> Instance:
    """Validate a JSON-like instance document and build engine-ready entities."""
    validator = jsonschema.Draft202012Validator(INSTANCE_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        if err.validator == "oneOf" and not err.absolute_path:
            raise InstanceError("instance: exactly one of 'strip_height' or 'bins' must be present")
        raise InstanceError(f"{_schema_error_context(doc, err)}: {err.message}")

    seen = set()
    items = []
    simp = SimplifyConfig(config.simplify_alpha)
    for raw in doc["items"]:
        iid = raw["id"]
        if iid in seen:
            raise InstanceError(f"item {iid!r}: duplicate id")
        seen.add(iid)
        shape = _polygon(raw["shape"], f"item {iid!r}")
        cde_shape = simplify_polygon(shape, SimplifyMode.INFLATE, simp)
        rot = raw["rotations"]
        rotations = CONTINUOUS if rot == CONTINUOUS else tuple(float(r) for r in rot)
        items.append(
            Item(
                iid,
                int(raw["demand"]),
                shape,
                cde_shape,
                build_surrogate(cde_shape, config.surrogate),
                rotations,
                raw.get("min_quality"),
                bool(raw.get("allow_flip", False)),
            )
        )

    bins = []
    for b, raw in enumerate(doc.get("bins", ())):
        shape = _polygon(raw["shape"], f"bin #{b}")
        zones = []
        for z, zraw in enumerate(raw.get("zones", ())):
            zs = _polygon(zraw["shape"], f"bin #{b} zone #{z}")
            zones.append(QualityZone(int(zraw["quality"]), zs, simplify_polygon(zs, SimplifyMode.INFLATE, simp)))
        bins.append(
            Container(
                f"bin{b}",
                shape,
                simplify_polygon(shape, SimplifyMode.DEFLATE, simp),
                tuple(zones),
                BinKind(float(raw["cost"])),
            )
        )
    height = doc.get("strip_height")
    return Instance(doc["name"], tuple(items), None if height is None else float(height), tuple(bins), config)


def instance_to_document(inst: Instance) -> dict:
    doc: dict[str, Any] = {"name": inst.name}
    if inst.is_strip:
        doc["strip_height"] = inst.strip_height
    else:
        doc["bins"] = [
            {
                "shape": c.shape_original.to_list(),
                "cost": c.kind.cost,
                "zones": [{"quality": z.quality, "shape": z.shape_original.to_list()} for z in c.zones],
            }
            for c in inst.bins
        ]
    items = []
    for it in inst.items:
        d = {
            "id": it.id,
            "demand": it.demand,
            "shape": it.shape_original.to_list(),
            "rotations": CONTINUOUS if it.continuous else list(it.allowed_rotations),
        }
        if it.min_quality is not None:
            d["min_quality"] = it.min_quality
        if it.allow_flip:
            d["allow_flip"] = True
        items.append(d)
    doc["items"] = items
    return doc


# ---------------------------------------------------------------- layouts

CONTAINER_ID = "container"


def zone_id(k: int) -> str:
    return f"zone{k}"


class Layout:
    """One container, its engine and the items placed in it."""

    def __init__(self, container: Container, items: dict[str, Item], index: int = 0, config: ModelConfig = ModelConfig()):
        self.container = container
        self.items = items
        self.index = index
        self.config = config
        self.placements: list[Placement] = []
        self.keys: list[str] = []
        self._serial = 0
        bounds = container.shape_cde.aabb
        for z in container.zones:
            bounds = bounds.union(z.shape_cde.aabb)
        margin = 0.01 * math.hypot(bounds.width, bounds.height) + 1e-6
        self.engine = CDEngine(bounds.inflated(margin), config.cde())
        self.engine.register(Hazard(CONTAINER_ID, HazardKind.EXTERIOR, container.shape_cde))
        for k, z in enumerate(container.zones):
            self.engine.register(Hazard(zone_id(k), HazardKind.INTERIOR, z.shape_cde, quality=z.quality))

    def __len__(self) -> int:
        return len(self.placements)

    def query(self, item: Item, t: Transformation) -> QueryShape:
        return QueryShape.place(item.shape_cde, item.surrogate, t)

    def feasible(self, item: Item, t: Transformation) -> bool:
        return not self.engine.collision(self.query(item, t), item.filter)

    def __deepcopy__(self, memo):
        # items and polygons are immutable; share them
        memo[id(self.items)] = self.items
        clone = Layout.__new__(Layout)
        memo[id(self)] = clone
        for k, v in self.__dict__.items():
            setattr(clone, k, copy.deepcopy(v, memo))
        return clone


class PlacementRejected(ValueError):
    pass


def place_item(layout: Layout, p: Placement) -> str:
    """Place ``p`` if it is collision-free, returning the new hazard id."""
    item = layout.items[p.item_id]
    if not item.rotation_allowed(p.transformation.rotation):
        raise PlacementRejected(f"rotation not allowed for item {p.item_id!r}")
    if p.transformation.flip and not item.allow_flip:
        raise PlacementRejected(f"flip not allowed for item {p.item_id!r}")
    q = layout.query(item, p.transformation)
    if layout.engine.collision(q, item.filter):
        raise PlacementRejected(f"item {p.item_id!r} collides at {p.transformation}")
    key = f"{p.item_id}#{layout._serial}"
    layout._serial += 1
    layout.engine.register(Hazard(key, HazardKind.INTERIOR, q.shape))
    layout.placements.append(p)
    layout.keys.append(key)
    return key


def remove_item(layout: Layout, ref: Union[int, str]) -> Placement:
    """Remove a placement by list index or hazard id."""
    idx = layout.keys.index(ref) if isinstance(ref, str) else ref
    key = layout.keys.pop(idx)
    p = layout.placements.pop(idx)
    layout.engine.deregister(key)
    return p


def snapshot(layout: Layout) -> Layout:
    return copy.deepcopy(layout)


def restore(snap: Layout) -> Layout:
    return copy.deepcopy(snap)


# ---------------------------------------------------------------- solutions


@dataclass
class Solution:
    layouts: list[Layout]
    objective: float
    metadata: dict = field(default_factory=dict)
    unplaced: list[str] = field(default_factory=list)

    @property
    def placements(self) -> list[Placement]:
        return [p for lay in self.layouts for p in lay.placements]


def strip_width(layouts) -> float:
    """Max x-extent over placed original shapes."""
    best = 0.0
    for lay in layouts:
        for p in lay.placements:
            best = max(best, transform_polygon(lay.items[p.item_id].shape_original, p.transformation).aabb.x_max)
    return best


def _layout_doc(lay: Layout, strip: bool) -> dict:
    d: dict[str, Any] = {"container_index": lay.index}
    if strip:
        d["width"] = lay.container.width
    d["placements"] = [
        {
            "item_id": p.item_id,
            "container_index": p.container_index,
            "rotation_rad": p.transformation.rotation,
            "flip": p.transformation.flip,
            "translation": list(p.transformation.translation),
        }
        for p in lay.placements
    ]
    return d


def solution_to_document(sol: Solution, inst: Instance) -> dict:
    return {
        "instance": inst.name,
        "kind": "strip" if inst.is_strip else "bins",
        "objective": sol.objective,
        "layouts": [_layout_doc(lay, inst.is_strip) for lay in sol.layouts],
        "unplaced": list(sol.unplaced),
        "metadata": sol.metadata,
    }


def placements_from_document(doc: dict) -> list[Placement]:
    out = []
    for lay in doc["layouts"]:
        for p in lay["placements"]:
            t = Transformation(float(p["rotation_rad"]), bool(p["flip"]), tuple(float(v) for v in p["translation"]))
            out.append(Placement(p["item_id"], t, int(p["container_index"])))
    return out


def layout_for(inst: Instance, index: int, width: float | None = None) -> Layout:
    items = {it.id: it for it in inst.items}
    if inst.is_strip:
        return Layout(Container.strip(inst.strip_height, width), items, index, inst.config)
    return Layout(inst.bins[index], items, index, inst.config)


# ---------------------------------------------------------------- audit


# Half the engine's contact distance: a placement the engine accepted sits at
# least EPS away from everything, so rounding near that threshold cannot turn
# into a reported violation, while any genuine contact (distance 0) still does.
AUDIT_TOL = EPS / 2


@dataclass(frozen=True)
class Violation:
    kind: str  # "overlap" | "container" | "zone" | "rotation" | "demand" | "unknown_item"
    subjects: tuple
    container_index: int

    def __str__(self) -> str:
        return f"{self.kind} in container {self.container_index}: {', '.join(map(str, self.subjects))}"


def audit_solution(sol: Union[Solution, dict], inst: Instance) -> list[Violation]:
    """Check every placement against the ORIGINAL shapes with the naive pairwise test."""
    if isinstance(sol, Solution):
        placements = sol.placements
        widths = {lay.index: lay.container.width for lay in sol.layouts}
    else:
        placements = placements_from_document(sol)
        widths = {lay["container_index"]: lay.get("width") for lay in sol["layouts"]}
    items = {it.id: it for it in inst.items}
    report: list[Violation] = []
    groups: dict[int, list[tuple[str, SimplePolygon]]] = {}
    counts: dict[str, int] = {}
    for n, p in enumerate(placements):
        ci = p.container_index
        item = items.get(p.item_id)
        if item is None:
            report.append(Violation("unknown_item", (p.item_id,), ci))
            continue
        counts[p.item_id] = counts.get(p.item_id, 0) + 1
        label = f"{p.item_id}[{n}]"
        t = p.transformation
        if not item.rotation_allowed(t.rotation) or (t.flip and not item.allow_flip):
            report.append(Violation("rotation", (label,), ci))
        shape = transform_polygon(item.shape_original, t)
        if inst.is_strip:
            # a strip is open to the right; without a recorded width only x > 0 matters
            width = widths.get(ci) or 2.0 * max(shape.aabb.x_max, 1.0)
            container = Container.strip(inst.strip_height, width)
        else:
            container = inst.bins[ci]
        if not naive_inside(shape, container.shape_original, AUDIT_TOL):
            report.append(Violation("container", (label,), ci))
        for k, z in enumerate(container.zones):
            if item.min_quality is not None and z.quality < item.min_quality and naive_collision(shape, z.shape_original, tol=AUDIT_TOL):
                report.append(Violation("zone", (label, zone_id(k)), ci))
        groups.setdefault(ci, []).append((label, shape))
    for ci, placed in groups.items():
        for i in range(len(placed)):
            for j in range(i + 1, len(placed)):
                if naive_collision(placed[i][1], placed[j][1], tol=AUDIT_TOL):
                    report.append(Violation("overlap", (placed[i][0], placed[j][0]), ci))
    for iid, c in counts.items():
        if iid in items and c > items[iid].demand:
            report.append(Violation("demand", (iid,), -1))
    return report
