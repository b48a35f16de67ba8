"""Hazards: forbidden regions induced by items, containers and quality zones."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable

from .geom import SimplePolygon


class HazardKind(Enum):
    INTERIOR = "interior"  # the entity's interior is forbidden
    EXTERIOR = "exterior"  # everything outside the entity is forbidden


@dataclass(frozen=True, eq=False)
class Hazard:
    id: Hashable
    kind: HazardKind
    shape: SimplePolygon
    quality: int | None = None
    active: bool = True

    @property
    def aabb(self):
        return self.shape.aabb


@dataclass(frozen=True)
class HazardFilter:
    """Per-query relevance rule.

    A hazard with a quality level is only relevant to items whose required
    ``min_quality`` exceeds it. Hazards without a quality always apply.
    """

    ignored_ids: frozenset = field(default_factory=frozenset)
    min_quality: int | None = None

    def is_relevant(self, h: Hazard) -> bool:
        if not h.active or h.id in self.ignored_ids:
            return False
        if h.quality is None:
            return True
        if self.min_quality is None:
            return False
        return h.quality < self.min_quality


NO_FILTER = HazardFilter()


def relevant_hazards(hazards: Iterable[Hazard], f: HazardFilter = NO_FILTER) -> list[Hazard]:
    return [h for h in hazards if f.is_relevant(h)]
