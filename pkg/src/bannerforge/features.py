"""Fixed-schema banner features for CTR modeling.

Every banner becomes one flat vector: positions and areas of the dominant
person/face/article/text boxes, people counts by gender, category and scene
one-hots, text-over-content overlap fractions, and text-quadrant flags.
Precomputed external features (a 4096-d image embedding and a scalar
aesthetic score) can be appended; the schema fingerprint tracks exactly
which slots a model was trained on.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

from .annotations import (
    BBox, FASHION_CATEGORIES, ImageAnnotation, dominant_article, dominant_index, union_area,
)
from .energy import Layout

VGG_DIM = 4096
DEFAULT_K_SCENE = 16

POSITION_COMPONENTS = ("person", "face", "article", "text")
QUADRANT_NAMES = ("text_q_tl", "text_q_tr", "text_q_bl", "text_q_br")
ABSENT = -1.0


class SchemaMismatchError(ValueError):
    """Raised when a vector does not match the schema a consumer expects."""


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered slot names plus the frozen scene vocabulary behind the one-hots."""

    slots: tuple[str, ...]
    k_scene: int
    scene_categories: tuple[str, ...]
    scene_attributes: tuple[str, ...]

    @property
    def fingerprint(self) -> str:
        digest = hashlib.sha256("|".join(self.slots).encode("utf-8")).hexdigest()
        return digest[:16]

    def __len__(self) -> int:
        return len(self.slots)

    def to_json(self) -> str:
        return json.dumps({
            "slots": list(self.slots),
            "k_scene": self.k_scene,
            "scene_categories": list(self.scene_categories),
            "scene_attributes": list(self.scene_attributes),
        }, indent=2)

    @classmethod
    def from_json(cls, data: bytes | str) -> "FeatureSchema":
        doc = json.loads(data)
        return cls(
            slots=tuple(doc["slots"]),
            k_scene=int(doc["k_scene"]),
            scene_categories=tuple(doc["scene_categories"]),
            scene_attributes=tuple(doc["scene_attributes"]),
        )


@dataclass(frozen=True)
class FeatureVector:
    """One banner's features; externals are tracked in the fingerprint."""

    schema_fingerprint: str
    values: tuple[float, ...]
    vgg: tuple[float, ...] | None = None
    nima: float | None = None

    @property
    def full_fingerprint(self) -> str:
        fp = self.schema_fingerprint
        if self.vgg is not None:
            fp += "+vgg"
        if self.nima is not None:
            fp += "+nima"
        return fp

    def full_values(self) -> tuple[float, ...]:
        out = self.values
        if self.vgg is not None:
            out = out + self.vgg
        if self.nima is not None:
            out = out + (self.nima,)
        return out


def _top_k_labels(label_sets: list[frozenset[str]], k: int) -> tuple[str, ...]:
    counts: dict[str, int] = {}
    for labels in label_sets:
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
    ranked = sorted(counts, key=lambda lab: (-counts[lab], lab))
    return tuple(ranked[:k])


def build_schema(corpus: list[ImageAnnotation], k_scene: int = DEFAULT_K_SCENE) -> FeatureSchema:
    """Freeze the slot layout; scene one-hots use the corpus's k most frequent labels.

    Frequency ties break lexicographically. When the corpus has fewer than
    k distinct labels the remaining slots are reserved and always encode 0,
    so the schema length is independent of the corpus.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    cats = _top_k_labels([ann.scene.categories for ann in corpus], k_scene)
    attrs = _top_k_labels([ann.scene.attributes for ann in corpus], k_scene)

    slots: list[str] = []
    for comp in POSITION_COMPONENTS:
        slots.extend(f"pos_{comp}_{c}" for c in ("x_left", "y_top", "x_right", "y_bottom"))
    slots.extend(["area_person", "area_article", "area_text"])
    slots.extend(["n_women", "n_men", "n_people"])
    slots.extend(f"cat_{c}" for c in FASHION_CATEGORIES)
    slots.append("env_outdoor")
    for i in range(k_scene):
        slots.append(f"scene_cat_{cats[i]}" if i < len(cats) else f"scene_cat_unused_{i}")
    for i in range(k_scene):
        slots.append(f"scene_attr_{attrs[i]}" if i < len(attrs) else f"scene_attr_unused_{i}")
    slots.extend(["overlap_text_face", "overlap_text_person", "overlap_text_article"])
    slots.extend(QUADRANT_NAMES)

    return FeatureSchema(
        slots=tuple(slots), k_scene=k_scene,
        scene_categories=cats, scene_attributes=attrs,
    )


def _norm_box(box: BBox | None, w: float, h: float) -> list[float]:
    if box is None:
        return [ABSENT] * 4
    return [box.x_left / w, box.y_top / h, box.x_right / w, box.y_bottom / h]


def _summed_overlap(text_boxes: list[BBox], targets: list[BBox]) -> float:
    """Sum over (text, target) pairs of intersection over the target area, capped at 1.

    Dividing by the covered component's area makes a fully hidden face score
    1 regardless of how large the covering text box is.
    """
    total = 0.0
    for target in targets:
        if target.area <= 0:
            continue
        for text in text_boxes:
            total += text.intersection_area(target) / target.area
    return min(1.0, total)


def extract(ann: ImageAnnotation, layout: Layout, schema: FeatureSchema) -> FeatureVector:
    """Fill every schema slot from the annotation and the banner layout.

    Position slots describe the dominant (largest-area) box per component,
    normalized by the canvas, with -1 when the component is absent. Text
    boxes come from the layout; everything else from the annotation.
    """
    w, h = layout.canvas_width, layout.canvas_height
    if int(round(w)) != ann.width or int(round(h)) != ann.height:
        raise SchemaMismatchError(
            f"annotation canvas {ann.width}x{ann.height} does not match "
            f"layout canvas {w}x{h}"
        )

    person_boxes = list(ann.persons)
    face_boxes = [f.box for f in ann.faces]
    text_boxes = [e.box for e in layout.movable_elements() if e.kind == "text"]

    idx = dominant_index(person_boxes)
    dom_person = person_boxes[idx] if idx is not None else None
    idx = dominant_index(face_boxes)
    dom_face = face_boxes[idx] if idx is not None else None
    dom_art = dominant_article(ann)
    dom_article = dom_art[1] if dom_art is not None else None
    idx = dominant_index(text_boxes)
    dom_text = text_boxes[idx] if idx is not None else None

    values: list[float] = []
    values.extend(_norm_box(dom_person, w, h))
    values.extend(_norm_box(dom_face, w, h))
    values.extend(_norm_box(dom_article, w, h))
    values.extend(_norm_box(dom_text, w, h))

    canvas_area = w * h
    values.append(dom_person.area / canvas_area if dom_person else 0.0)
    values.append(dom_article.area / canvas_area if dom_article else 0.0)
    clipped_text = [c for t in text_boxes if (c := t.clip(w, h)) is not None]
    values.append(union_area(clipped_text) / canvas_area if clipped_text else 0.0)

    values.append(float(sum(1 for f in ann.faces if f.gender == "female")))
    values.append(float(sum(1 for f in ann.faces if f.gender == "male")))
    values.append(float(len(ann.persons)))

    present = {a.category for a in ann.articles}
    values.extend(1.0 if cat in present else 0.0 for cat in FASHION_CATEGORIES)
    values.append(1.0 if ann.scene.environment == "outdoor" else 0.0)
    for i in range(schema.k_scene):
        label = schema.scene_categories[i] if i < len(schema.scene_categories) else None
        values.append(1.0 if label is not None and label in ann.scene.categories else 0.0)
    for i in range(schema.k_scene):
        label = schema.scene_attributes[i] if i < len(schema.scene_attributes) else None
        values.append(1.0 if label is not None and label in ann.scene.attributes else 0.0)

    values.append(_summed_overlap(text_boxes, face_boxes))
    values.append(_summed_overlap(text_boxes, person_boxes))
    values.append(_summed_overlap(text_boxes, [a.box for a in ann.articles]))

    quadrants = [0.0, 0.0, 0.0, 0.0]
    for t in text_boxes:
        cx, cy = t.center
        q = (0 if cx < w / 2 else 1) + (0 if cy < h / 2 else 2)
        quadrants[q] = 1.0
    values.extend(quadrants)

    assert len(values) == len(schema.slots)
    return FeatureVector(schema_fingerprint=schema.fingerprint, values=tuple(values))


def attach_external(
    vec: FeatureVector,
    vgg: list[float] | tuple[float, ...] | None = None,
    nima: float | None = None,
) -> FeatureVector:
    """Append precomputed external features; attaching nothing is the identity."""
    out = vec
    if vgg is not None:
        if out.vgg is not None:
            raise ValueError("vgg features already attached")
        if len(vgg) != VGG_DIM:
            raise ValueError(f"vgg embedding must have length {VGG_DIM}, got {len(vgg)}")
        out = replace(out, vgg=tuple(float(v) for v in vgg))
    if nima is not None:
        if out.nima is not None:
            raise ValueError("nima score already attached")
        if not math.isfinite(nima):
            raise ValueError("nima score must be finite")
        out = replace(out, nima=float(nima))
    return out


def parse_external_features(data: bytes | str) -> dict[str, dict]:
    """Sidecar file: {banner_id: {"vgg": [...4096...], "nima": float}}, both optional."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    doc = json.loads(data)
    if not isinstance(doc, dict):
        raise ValueError("external feature sidecar must be a JSON object keyed by banner id")
    return doc


__all__ = [
    "VGG_DIM", "DEFAULT_K_SCENE", "ABSENT", "QUADRANT_NAMES",
    "SchemaMismatchError", "FeatureSchema", "FeatureVector",
    "build_schema", "extract", "attach_external", "parse_external_features",
]
