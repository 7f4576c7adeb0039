"""Structured image annotations: parsing, validation, and catalog filtering.

Detector outputs (people, faces, fashion articles, scene tags, text regions)
arrive as JSON files, one per photoshoot image. This module defines the data
model, checks its invariants, and selects images for a generation request.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

FASHION_CATEGORIES = ("topwear", "bottomwear", "shoes", "watches", "bags", "headgear", "other")
GENDERS = ("male", "female", "unknown")
ENVIRONMENTS = ("indoor", "outdoor")


class AnnotationError(ValueError):
    """Raised when an annotation document cannot be parsed.

    ``path`` names the offending field, e.g. ``"articles[2].box"``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in pixel coordinates, origin top-left.

    Stored as [x_left, y_top, x_right, y_bottom]. Geometric invariants
    (x_left < x_right, y_top < y_bottom, non-negative) are checked by
    :func:`validate`, not at construction, so malformed detector output
    can be reported as data rather than crashing the parser.
    """

    x_left: float
    y_top: float
    x_right: float
    y_bottom: float

    @property
    def width(self) -> float:
        return self.x_right - self.x_left

    @property
    def height(self) -> float:
        return self.y_bottom - self.y_top

    @property
    def area(self) -> float:
        return max(0.0, self.width) * max(0.0, self.height)

    @property
    def center(self) -> tuple[float, float]:
        return (self.x_left + self.x_right) / 2.0, (self.y_top + self.y_bottom) / 2.0

    def intersection(self, other: "BBox") -> "BBox | None":
        l = max(self.x_left, other.x_left)
        t = max(self.y_top, other.y_top)
        r = min(self.x_right, other.x_right)
        b = min(self.y_bottom, other.y_bottom)
        if l >= r or t >= b:
            return None
        return BBox(l, t, r, b)

    def intersection_area(self, other: "BBox") -> float:
        w = min(self.x_right, other.x_right) - max(self.x_left, other.x_left)
        h = min(self.y_bottom, other.y_bottom) - max(self.y_top, other.y_top)
        return max(0.0, w) * max(0.0, h)

    def translate(self, dx: float, dy: float) -> "BBox":
        return BBox(self.x_left + dx, self.y_top + dy, self.x_right + dx, self.y_bottom + dy)

    def clip(self, width: float, height: float) -> "BBox | None":
        """Clip to a width x height frame; None if nothing remains."""
        l = max(0.0, min(self.x_left, width))
        t = max(0.0, min(self.y_top, height))
        r = max(0.0, min(self.x_right, width))
        b = max(0.0, min(self.y_bottom, height))
        if l >= r or t >= b:
            return None
        return BBox(l, t, r, b)

    def as_list(self) -> list[float]:
        return [self.x_left, self.y_top, self.x_right, self.y_bottom]


@dataclass(frozen=True)
class FaceAnnotation:
    box: BBox
    gender: str = "unknown"


@dataclass(frozen=True)
class ArticleAnnotation:
    """One detected fashion article: its category, box, and detector confidence."""

    category: str
    box: BBox
    confidence: float = 1.0


@dataclass(frozen=True)
class SceneInfo:
    """Background scene tags: indoor/outdoor plus free-form labels."""

    environment: str = "indoor"
    categories: frozenset[str] = frozenset()
    attributes: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ImageAnnotation:
    """All annotations for one photoshoot image."""

    image_id: str
    width: int
    height: int
    brand: str = ""
    season: str = ""
    persons: tuple[BBox, ...] = ()
    faces: tuple[FaceAnnotation, ...] = ()
    articles: tuple[ArticleAnnotation, ...] = ()
    scene: SceneInfo = field(default_factory=SceneInfo)
    text_regions: tuple[BBox, ...] = ()


@dataclass(frozen=True)
class LogoEntry:
    brand: str
    path: str


@dataclass(frozen=True)
class Callout:
    text: str
    themes: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ElementLibrary:
    """Reusable design elements: brand logos and text callouts with theme tags."""

    logos: tuple[LogoEntry, ...] = ()
    callouts: tuple[Callout, ...] = ()

    def logo_for(self, brand: str) -> LogoEntry | None:
        for entry in self.logos:
            if entry.brand == brand:
                return entry
        return None

    def callouts_for(self, theme: str | None) -> list[Callout]:
        if theme is None:
            return list(self.callouts)
        return [c for c in self.callouts if theme in c.themes]


@dataclass(frozen=True)
class FilterCriteria:
    """Catalog filter; None fields are ignored.

    ``category`` matches when any annotated article carries that category.
    ``gender`` requires at least one face tagged with that gender.
    """

    brand: str | None = None
    category: str | None = None
    environment: str | None = None
    gender: str | None = None
    max_text_area_fraction: float = 0.10


@dataclass(frozen=True)
class Violation:
    """One invariant breach found by :func:`validate`."""

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _want(doc: dict, key: str, kind, path: str):
    if key not in doc:
        raise AnnotationError(f"{path}{key}" if path else key, "missing mandatory field")
    return _typed(doc[key], kind, f"{path}{key}" if path else key)


def _typed(value, kind, path: str):
    if kind is int and isinstance(value, bool):
        raise AnnotationError(path, f"expected int, got bool")
    if not isinstance(value, kind):
        raise AnnotationError(path, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_box(value, path: str) -> BBox:
    if not isinstance(value, list) or len(value) != 4:
        raise AnnotationError(path, "expected [x_left, y_top, x_right, y_bottom]")
    coords = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise AnnotationError(f"{path}[{i}]", f"expected number, got {type(v).__name__}")
        coords.append(float(v))
    return BBox(*coords)


def _parse_box_list(value, path: str) -> tuple[BBox, ...]:
    if not isinstance(value, list):
        raise AnnotationError(path, f"expected list, got {type(value).__name__}")
    return tuple(_parse_box(b, f"{path}[{i}]") for i, b in enumerate(value))


def _parse_enum(value, allowed: tuple[str, ...], path: str) -> str:
    v = _typed(value, str, path)
    if v not in allowed:
        raise AnnotationError(path, f"expected one of {allowed}, got {v!r}")
    return v


def _parse_str_set(value, path: str) -> frozenset[str]:
    if not isinstance(value, list):
        raise AnnotationError(path, f"expected list, got {type(value).__name__}")
    return frozenset(_typed(v, str, f"{path}[{i}]") for i, v in enumerate(value))


def parse_annotation(data: bytes | str) -> ImageAnnotation:
    """Parse one annotation document (JSON bytes or text).

    Mandatory fields: image_id, width, height. Everything else defaults to
    empty; unknown fields are ignored. Raises :class:`AnnotationError` with
    the offending field path on malformed syntax, missing mandatory fields,
    or type mismatches.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise AnnotationError("<document>", f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise AnnotationError("<document>", "top-level value must be an object")

    image_id = _want(doc, "image_id", str, "")
    if not image_id:
        raise AnnotationError("image_id", "must be non-empty")
    width = _want(doc, "width", int, "")
    height = _want(doc, "height", int, "")

    faces = []
    raw_faces = doc.get("faces", [])
    if not isinstance(raw_faces, list):
        raise AnnotationError("faces", f"expected list, got {type(raw_faces).__name__}")
    for i, f in enumerate(raw_faces):
        if not isinstance(f, dict):
            raise AnnotationError(f"faces[{i}]", "expected object with box/gender")
        box = _parse_box(f.get("box"), f"faces[{i}].box") if "box" in f else None
        if box is None:
            raise AnnotationError(f"faces[{i}].box", "missing mandatory field")
        gender = _parse_enum(f.get("gender", "unknown"), GENDERS, f"faces[{i}].gender")
        faces.append(FaceAnnotation(box=box, gender=gender))

    articles = []
    raw_articles = doc.get("articles", [])
    if not isinstance(raw_articles, list):
        raise AnnotationError("articles", f"expected list, got {type(raw_articles).__name__}")
    for i, a in enumerate(raw_articles):
        if not isinstance(a, dict):
            raise AnnotationError(f"articles[{i}]", "expected object with category/box")
        if "category" not in a:
            raise AnnotationError(f"articles[{i}].category", "missing mandatory field")
        if "box" not in a:
            raise AnnotationError(f"articles[{i}].box", "missing mandatory field")
        category = _parse_enum(a["category"], FASHION_CATEGORIES, f"articles[{i}].category")
        box = _parse_box(a["box"], f"articles[{i}].box")
        conf = a.get("confidence", 1.0)
        if isinstance(conf, bool) or not isinstance(conf, (int, float)):
            raise AnnotationError(f"articles[{i}].confidence", "expected number")
        articles.append(ArticleAnnotation(category=category, box=box, confidence=float(conf)))

    scene = SceneInfo()
    if "scene" in doc:
        raw_scene = doc["scene"]
        if not isinstance(raw_scene, dict):
            raise AnnotationError("scene", f"expected object, got {type(raw_scene).__name__}")
        scene = SceneInfo(
            environment=_parse_enum(raw_scene.get("environment", "indoor"), ENVIRONMENTS, "scene.environment"),
            categories=_parse_str_set(raw_scene.get("categories", []), "scene.categories"),
            attributes=_parse_str_set(raw_scene.get("attributes", []), "scene.attributes"),
        )

    return ImageAnnotation(
        image_id=image_id,
        width=width,
        height=height,
        brand=_typed(doc.get("brand", ""), str, "brand"),
        season=_typed(doc.get("season", ""), str, "season"),
        persons=_parse_box_list(doc.get("persons", []), "persons"),
        faces=tuple(faces),
        articles=tuple(articles),
        scene=scene,
        text_regions=_parse_box_list(doc.get("text_regions", []), "text_regions"),
    )


def serialize_annotation(ann: ImageAnnotation) -> str:
    """Serialize to the same JSON schema parse_annotation reads (round-trip safe)."""
    doc = {
        "image_id": ann.image_id,
        "width": ann.width,
        "height": ann.height,
        "brand": ann.brand,
        "season": ann.season,
        "persons": [b.as_list() for b in ann.persons],
        "faces": [{"box": f.box.as_list(), "gender": f.gender} for f in ann.faces],
        "articles": [
            {"category": a.category, "box": a.box.as_list(), "confidence": a.confidence}
            for a in ann.articles
        ],
        "scene": {
            "environment": ann.scene.environment,
            "categories": sorted(ann.scene.categories),
            "attributes": sorted(ann.scene.attributes),
        },
        "text_regions": [b.as_list() for b in ann.text_regions],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _check_box(box: BBox, ann: ImageAnnotation, path: str, out: list[Violation]):
    if box.x_left >= box.x_right or box.y_top >= box.y_bottom:
        out.append(Violation(path, "degenerate box (zero or negative extent)"))
        return
    if box.x_left < 0 or box.y_top < 0 or box.x_right > ann.width or box.y_bottom > ann.height:
        out.append(Violation(path, f"box {box.as_list()} outside image {ann.width}x{ann.height}"))


def validate(ann: ImageAnnotation) -> list[Violation]:
    """Check every type invariant; return the (possibly empty) violation list.

    Violations are data, not failures: a bad box yields a report entry
    naming its field path rather than an exception.
    """
    out: list[Violation] = []
    if not ann.image_id:
        out.append(Violation("image_id", "must be non-empty"))
    if ann.width <= 0 or ann.height <= 0:
        out.append(Violation("width/height", f"must be positive, got {ann.width}x{ann.height}"))
        return out
    for i, box in enumerate(ann.persons):
        _check_box(box, ann, f"persons[{i}]", out)
    for i, f in enumerate(ann.faces):
        _check_box(f.box, ann, f"faces[{i}].box", out)
        if f.gender not in GENDERS:
            out.append(Violation(f"faces[{i}].gender", f"unknown gender {f.gender!r}"))
    for i, a in enumerate(ann.articles):
        _check_box(a.box, ann, f"articles[{i}].box", out)
        if a.category not in FASHION_CATEGORIES:
            out.append(Violation(f"articles[{i}].category", f"unknown category {a.category!r}"))
        if not 0.0 <= a.confidence <= 1.0:
            out.append(Violation(f"articles[{i}].confidence", f"{a.confidence} outside [0, 1]"))
    if ann.scene.environment not in ENVIRONMENTS:
        out.append(Violation("scene.environment", f"unknown environment {ann.scene.environment!r}"))
    for i, box in enumerate(ann.text_regions):
        _check_box(box, ann, f"text_regions[{i}]", out)
    return out


# ---------------------------------------------------------------------------
# catalog queries
# ---------------------------------------------------------------------------

def dominant_index(boxes: list[BBox] | tuple[BBox, ...]) -> int | None:
    """Index of the largest-area box; ties broken by lowest (y_top, x_left), then input order."""
    best = None
    best_key = None
    for i, box in enumerate(boxes):
        key = (-box.area, box.y_top, box.x_left, i)
        if best_key is None or key < best_key:
            best, best_key = i, key
    return best


def dominant_article(ann: ImageAnnotation) -> tuple[str, BBox] | None:
    """The article with the largest bounding-box area, or None when there are none."""
    idx = dominant_index([a.box for a in ann.articles])
    if idx is None:
        return None
    art = ann.articles[idx]
    return art.category, art.box


def union_area(boxes: list[BBox] | tuple[BBox, ...]) -> float:
    """Exact area of the union of axis-aligned boxes (coordinate compression)."""
    boxes = [b for b in boxes if b.width > 0 and b.height > 0]
    if not boxes:
        return 0.0
    xs = sorted({b.x_left for b in boxes} | {b.x_right for b in boxes})
    ys = sorted({b.y_top for b in boxes} | {b.y_bottom for b in boxes})
    total = 0.0
    for i in range(len(xs) - 1):
        x0, x1 = xs[i], xs[i + 1]
        for j in range(len(ys) - 1):
            y0, y1 = ys[j], ys[j + 1]
            for b in boxes:
                if b.x_left <= x0 and b.x_right >= x1 and b.y_top <= y0 and b.y_bottom >= y1:
                    total += (x1 - x0) * (y1 - y0)
                    break
    return total


def text_area_fraction(ann: ImageAnnotation) -> float:
    """Fraction of the image covered by the union of text regions, in [0, 1].

    Regions are clipped to the image frame first, so stray detector boxes
    cannot push the fraction above 1.
    """
    clipped = [c for b in ann.text_regions if (c := b.clip(ann.width, ann.height)) is not None]
    if not clipped:
        return 0.0
    return union_area(clipped) / (ann.width * ann.height)


def filter_images(catalog: list[ImageAnnotation], crit: FilterCriteria) -> list[str]:
    """Image ids matching every present criterion, in catalog order."""
    out = []
    for ann in catalog:
        if crit.brand is not None and ann.brand != crit.brand:
            continue
        if crit.category is not None and not any(a.category == crit.category for a in ann.articles):
            continue
        if crit.environment is not None and ann.scene.environment != crit.environment:
            continue
        if crit.gender is not None and not any(f.gender == crit.gender for f in ann.faces):
            continue
        if text_area_fraction(ann) > crit.max_text_area_fraction:
            continue
        out.append(ann.image_id)
    return out


def parse_element_library(data: bytes | str) -> ElementLibrary:
    """Parse the element-library manifest: logo paths by brand plus tagged callouts."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise AnnotationError("<library>", f"malformed JSON: {exc}") from exc
    logos = []
    seen_brands = set()
    for i, entry in enumerate(doc.get("logos", [])):
        brand = _typed(entry.get("brand", ""), str, f"logos[{i}].brand")
        path = _typed(entry.get("path", ""), str, f"logos[{i}].path")
        if brand in seen_brands:
            raise AnnotationError(f"logos[{i}].brand", f"duplicate brand {brand!r}")
        seen_brands.add(brand)
        logos.append(LogoEntry(brand=brand, path=path))
    callouts = []
    for i, entry in enumerate(doc.get("callouts", [])):
        text = _typed(entry.get("text", ""), str, f"callouts[{i}].text")
        if not text:
            raise AnnotationError(f"callouts[{i}].text", "must be non-empty")
        themes = _parse_str_set(entry.get("themes", []), f"callouts[{i}].themes")
        callouts.append(Callout(text=text, themes=themes))
    return ElementLibrary(logos=tuple(logos), callouts=tuple(callouts))


__all__ = [
    "FASHION_CATEGORIES", "GENDERS", "ENVIRONMENTS",
    "AnnotationError", "BBox", "FaceAnnotation", "ArticleAnnotation", "SceneInfo",
    "ImageAnnotation", "LogoEntry", "Callout", "ElementLibrary", "FilterCriteria",
    "Violation", "parse_annotation", "serialize_annotation", "validate",
    "dominant_index", "dominant_article", "union_area", "text_area_fraction",
    "filter_images", "parse_element_library",
]
