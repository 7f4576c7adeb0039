"""Layout representation and the aesthetic energy function.

A layout is a set of element boxes over a canvas: persons and objects from
the photoshoot image are fixed, logo and text placements are movable. Its
quality is the weighted sum of four penalty terms (misalignment, overlap,
closeness, horizontal asymmetry); lower is better. Infeasible layouts
(size bounds or canvas violated) are flagged rather than penalized.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .annotations import BBox

MOVABLE_KINDS = ("logo", "text")
FIXED_KINDS = ("person", "object")
ELEMENT_KINDS = MOVABLE_KINDS + FIXED_KINDS

# Pairs closer than this fraction of the canvas diagonal are penalized.
DISTANCE_CUTOFF_FRACTION = 0.25

# Left-edge alignment is preferred: its deviation counts at half weight.
LEFT_ALIGN_DISCOUNT = 0.5


@dataclass(frozen=True)
class ElementBox:
    """One design element on the canvas.

    Logo and text elements are movable (the optimizer owns their
    coordinates); person and object elements are fixed background content.
    A fixed person may carry its face box, which stands in for the body in
    the closeness penalty so elements keep clear of faces specifically.
    """

    kind: str
    box: BBox
    face_box: BBox | None = None

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")

    @property
    def movable(self) -> bool:
        return self.kind in MOVABLE_KINDS

    def proximity_box(self) -> BBox:
        """Box used for the distance term: the face when a person has one."""
        if self.kind == "person" and self.face_box is not None:
            return self.face_box
        return self.box


@dataclass(frozen=True)
class Layout:
    """A canvas plus all fixed and movable element boxes."""

    canvas_width: float
    canvas_height: float
    elements: tuple[ElementBox, ...] = ()

    def movable_elements(self) -> list[ElementBox]:
        return [e for e in self.elements if e.movable]

    def fixed_elements(self) -> list[ElementBox]:
        return [e for e in self.elements if not e.movable]

    def mirrored(self) -> "Layout":
        """Horizontal mirror image about the vertical canvas axis."""
        w = self.canvas_width

        def flip(b: BBox) -> BBox:
            return BBox(w - b.x_right, b.y_top, w - b.x_left, b.y_bottom)

        return Layout(
            canvas_width=self.canvas_width,
            canvas_height=self.canvas_height,
            elements=tuple(
                ElementBox(e.kind, flip(e.box), flip(e.face_box) if e.face_box else None)
                for e in self.elements
            ),
        )


@dataclass(frozen=True)
class EnergyWeights:
    """Non-negative weights for the four penalty terms; at least one positive."""

    w_align: float = 1.0
    w_overlap: float = 4.0
    w_dist: float = 1.0
    w_sym: float = 1.0

    def __post_init__(self):
        vals = (self.w_align, self.w_overlap, self.w_dist, self.w_sym)
        if any(v < 0 for v in vals):
            raise ValueError(f"weights must be non-negative, got {vals}")
        if not any(v > 0 for v in vals):
            raise ValueError("at least one weight must be positive")

    def to_json(self) -> str:
        return json.dumps({
            "w_align": self.w_align, "w_overlap": self.w_overlap,
            "w_dist": self.w_dist, "w_sym": self.w_sym,
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: bytes | str) -> "EnergyWeights":
        doc = json.loads(data)
        return cls(
            w_align=float(doc["w_align"]), w_overlap=float(doc["w_overlap"]),
            w_dist=float(doc["w_dist"]), w_sym=float(doc["w_sym"]),
        )


# Feasibility slack in pixels: absorbs the ulp-level error of rebuilding a
# box as (x, y, x + w, y + h) without relaxing any visible constraint.
FEASIBILITY_EPS = 1e-6


@dataclass(frozen=True)
class SizeRange:
    """Buffer region for one element kind: allowed width/height in pixels."""

    min_width: float
    max_width: float
    min_height: float
    max_height: float

    def __post_init__(self):
        if not (0 < self.min_width <= self.max_width and 0 < self.min_height <= self.max_height):
            raise ValueError(f"invalid size range {self}")

    def contains(self, width: float, height: float) -> bool:
        eps = FEASIBILITY_EPS
        return (self.min_width - eps <= width <= self.max_width + eps
                and self.min_height - eps <= height <= self.max_height + eps)


@dataclass(frozen=True)
class SizeBounds:
    """Per-kind size ranges; kinds without an entry are unconstrained."""

    ranges: dict[str, SizeRange] = field(default_factory=dict)

    def for_kind(self, kind: str) -> SizeRange | None:
        return self.ranges.get(kind)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-term scores, their weighted total, and the feasibility flag."""

    e_align: float
    e_overlap: float
    e_dist: float
    e_sym: float
    total: float
    feasible: bool

    def as_dict(self) -> dict:
        return {
            "e_align": self.e_align, "e_overlap": self.e_overlap,
            "e_dist": self.e_dist, "e_sym": self.e_sym,
            "total": self.total, "feasible": self.feasible,
        }


# ---------------------------------------------------------------------------
# pairwise geometry
# ---------------------------------------------------------------------------

def overlap_fraction(a: BBox, b: BBox) -> float:
    """Overlap of two boxes as intersection area over union area, in [0, 1]."""
    inter = a.intersection_area(b)
    if inter <= 0.0:
        return 0.0
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def center_distance(a: BBox, b: BBox) -> float:
    """Euclidean distance between box centers, in pixels."""
    (ax, ay), (bx, by) = a.center, b.center
    return math.hypot(ax - bx, ay - by)


def horizontal_asymmetry(box: BBox, layout_width: float) -> float:
    """|2 * x_center - layout_width|: zero iff the box is horizontally centered."""
    return abs(box.x_left + box.x_right - layout_width)


def _scored_pairs(layout: Layout) -> list[tuple[ElementBox, ElementBox]]:
    """All unordered element pairs except fixed-fixed ones.

    Fixed background content is given; only pairs with at least one movable
    element can be improved by the optimizer, so only those are scored.
    """
    els = layout.elements
    return [
        (els[i], els[j])
        for i in range(len(els))
        for j in range(i + 1, len(els))
        if els[i].movable or els[j].movable
    ]


# ---------------------------------------------------------------------------
# energy terms (each normalized, >= 0, lower is better)
# ---------------------------------------------------------------------------

def overlap_energy(layout: Layout) -> float:
    """Mean pairwise overlap fraction over all scored pairs."""
    pairs = _scored_pairs(layout)
    if not pairs:
        return 0.0
    return sum(overlap_fraction(a.box, b.box) for a, b in pairs) / len(pairs)


def distance_energy(layout: Layout) -> float:
    """Closeness penalty: mean of max(0, 1 - d/d_ref) over scored pairs.

    d_ref is a quarter of the canvas diagonal; pairs at least that far
    apart contribute nothing. Fixed persons are represented by their face
    box when one is annotated.
    """
    pairs = _scored_pairs(layout)
    if not pairs:
        return 0.0
    d_ref = DISTANCE_CUTOFF_FRACTION * math.hypot(layout.canvas_width, layout.canvas_height)
    if d_ref <= 0.0:
        return 0.0
    total = 0.0
    for a, b in pairs:
        d = center_distance(a.proximity_box(), b.proximity_box())
        total += max(0.0, 1.0 - d / d_ref)
    return total / len(pairs)


def symmetry_energy(layout: Layout) -> float:
    """Mean horizontal asymmetry of movable elements, normalized by canvas width."""
    movables = layout.movable_elements()
    if not movables or layout.canvas_width <= 0:
        return 0.0
    total = sum(horizontal_asymmetry(e.box, layout.canvas_width) for e in movables)
    return total / (len(movables) * layout.canvas_width)


def misalignment_energy(layout: Layout) -> float:
    """Mean alignment deviation over movable pairs, clamped to [0, 1].

    For each pair the deviation is the cheapest of three x-axis alignment
    candidates, each normalized by canvas width: shared left edge (at half
    penalty, implementing the preference for left alignment), shared
    center, or shared right edge.
    """
    movables = layout.movable_elements()
    if len(movables) < 2 or layout.canvas_width <= 0:
        return 0.0
    w = layout.canvas_width
    total = 0.0
    n_pairs = 0
    for i in range(len(movables)):
        for j in range(i + 1, len(movables)):
            a, b = movables[i].box, movables[j].box
            d_left = abs(a.x_left - b.x_left) / w
            d_center = abs((a.x_left + a.x_right) - (b.x_left + b.x_right)) / (2 * w)
            d_right = abs(a.x_right - b.x_right) / w
            total += min(LEFT_ALIGN_DISCOUNT * d_left, d_center, d_right)
            n_pairs += 1
    return min(1.0, total / n_pairs)


def feasible(layout: Layout, bounds: SizeBounds) -> bool:
    """True iff every movable element is fully on-canvas with in-range dimensions."""
    eps = FEASIBILITY_EPS
    for e in layout.movable_elements():
        b = e.box
        if (b.x_left < -eps or b.y_top < -eps
                or b.x_right > layout.canvas_width + eps
                or b.y_bottom > layout.canvas_height + eps):
            return False
        rng = bounds.for_kind(e.kind)
        if rng is not None and not rng.contains(b.width, b.height):
            return False
    return True


def total_energy(layout: Layout, weights: EnergyWeights, bounds: SizeBounds) -> EnergyBreakdown:
    """Weighted sum of the four terms plus the feasibility flag.

    The total is reported for infeasible layouts too; callers treat the
    flag as a rejection marker rather than folding it into the score.
    """
    e_align = misalignment_energy(layout)
    e_overlap = overlap_energy(layout)
    e_dist = distance_energy(layout)
    e_sym = symmetry_energy(layout)
    total = (weights.w_align * e_align + weights.w_overlap * e_overlap
             + weights.w_dist * e_dist + weights.w_sym * e_sym)
    return EnergyBreakdown(
        e_align=e_align, e_overlap=e_overlap, e_dist=e_dist, e_sym=e_sym,
        total=total, feasible=feasible(layout, bounds),
    )


__all__ = [
    "MOVABLE_KINDS", "FIXED_KINDS", "ELEMENT_KINDS",
    "DISTANCE_CUTOFF_FRACTION", "LEFT_ALIGN_DISCOUNT", "FEASIBILITY_EPS",
    "ElementBox", "Layout", "EnergyWeights", "SizeRange", "SizeBounds",
    "EnergyBreakdown", "overlap_fraction", "center_distance",
    "horizontal_asymmetry", "overlap_energy", "distance_energy",
    "symmetry_energy", "misalignment_energy", "feasible", "total_energy",
]
