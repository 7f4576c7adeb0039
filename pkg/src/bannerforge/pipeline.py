"""End-to-end orchestration: filter, crop, optimize, compose, rank, persist.

The pipeline walks the annotated catalog, runs the layout GA per image,
composes the top layouts into banner PNGs with sidecar metadata, and
orders the manifest by predicted CTR (ascending energy when no model is
configured). All randomness is derived from the run seed plus stable ids,
so reruns are byte-identical and images are independent of one another.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .annotations import (
    BBox, ElementLibrary, FilterCriteria, ImageAnnotation,
    filter_images, parse_annotation, parse_element_library, validate,
)
from .compositor import ComposeOptions, compose, crop_roi
from .energy import ElementBox, EnergyBreakdown, EnergyWeights, Layout, SizeBounds, SizeRange, total_energy
from .features import FeatureSchema, FeatureVector, build_schema, extract
from .ga import GAConfig, LayoutProblem, MovableSpec, evolve
from .ranking import TrainedModel, fingerprint_of_names, model_from_json, predict_ctr
from .raster import Raster, encode_png, read_png


class PipelineError(RuntimeError):
    """A run-level failure (bad config, empty filter result, missing logo)."""


@dataclass(frozen=True)
class ElementSizing:
    """Movable-element dimensions as fractions of the crop canvas."""

    width: float
    height: float
    min_width: float
    max_width: float
    min_height: float
    max_height: float


DEFAULT_SIZING = {
    "logo": ElementSizing(width=0.22, height=0.12, min_width=0.15, max_width=0.32,
                          min_height=0.08, max_height=0.18),
    "text": ElementSizing(width=0.42, height=0.16, min_width=0.30, max_width=0.60,
                          min_height=0.10, max_height=0.28),
}


@dataclass(frozen=True)
class PipelineConfig:
    annotation_dir: str
    image_dir: str
    element_library: str
    output_dir: str
    weights_file: str | None = None
    schema_file: str | None = None
    model_file: str | None = None
    brand: str | None = None
    category: str | None = None
    environment: str | None = None
    gender: str | None = None
    max_text_area_fraction: float = 0.10
    theme: str | None = None
    target_aspect: float = 2.0
    top_k: int = 3
    k_scene: int = 16
    ga: GAConfig = field(default_factory=GAConfig)
    compose_options: ComposeOptions = field(default_factory=ComposeOptions)
    sizing: dict = field(default_factory=lambda: dict(DEFAULT_SIZING))
    seed: int = 0

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.target_aspect <= 0:
            raise ValueError("target_aspect must be positive")


@dataclass(frozen=True)
class BannerEntry:
    banner_id: str
    image_id: str
    output_path: str
    energy: dict
    predicted_ctr: float | None
    callout: str
    logo_brand: str
    layout: dict


@dataclass(frozen=True)
class FailureEntry:
    image_id: str
    error: str


@dataclass(frozen=True)
class BannerManifest:
    entries: tuple[BannerEntry, ...]
    failures: tuple[FailureEntry, ...]
    seed: int

    def to_json(self) -> str:
        return json.dumps({
            "seed": self.seed,
            "banners": [entry.__dict__ for entry in self.entries],
            "failures": [f.__dict__ for f in self.failures],
        }, indent=2, sort_keys=True)

    def digest(self) -> str:
        """Location-independent content hash (output paths reduced to names)."""
        doc = json.loads(self.to_json())
        for banner in doc["banners"]:
            banner["output_path"] = Path(banner["output_path"]).name
        payload = json.dumps(doc, sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()


# ---------------------------------------------------------------------------
# config / layout serialization
# ---------------------------------------------------------------------------

def _sizing_from_dict(doc: dict) -> ElementSizing:
    return ElementSizing(
        width=float(doc["width"]), height=float(doc["height"]),
        min_width=float(doc["min_width"]), max_width=float(doc["max_width"]),
        min_height=float(doc["min_height"]), max_height=float(doc["max_height"]),
    )


def config_from_json(data: bytes | str, base_dir: str | Path = ".") -> PipelineConfig:
    """Load a pipeline config file; relative paths resolve against base_dir."""
    doc = json.loads(data if isinstance(data, str) else data.decode("utf-8"))
    base = Path(base_dir)

    def path_of(key, default=None):
        raw = doc.get(key, default)
        return str(base / raw) if raw is not None else None

    request = doc.get("request", {})
    ga = GAConfig(**doc.get("ga", {}))
    comp = doc.get("compose", {})
    options = ComposeOptions(
        target_aspect=float(request.get("target_aspect", 2.0)),
        gradient_enabled=bool(comp.get("gradient_enabled", True)),
        gradient_strength=float(comp.get("gradient_strength", 0.25)),
        min_font=int(comp.get("min_font", 8)),
        text_alignment=str(comp.get("text_alignment", "left")),
    )
    sizing = dict(DEFAULT_SIZING)
    for kind, sdoc in doc.get("elements", {}).items():
        sizing[kind] = _sizing_from_dict(sdoc)
    return PipelineConfig(
        annotation_dir=path_of("annotation_dir"),
        image_dir=path_of("image_dir"),
        element_library=path_of("element_library"),
        output_dir=path_of("output_dir", "out"),
        weights_file=path_of("weights_file"),
        schema_file=path_of("schema_file"),
        model_file=path_of("model_file"),
        brand=request.get("brand"),
        category=request.get("category"),
        environment=request.get("environment"),
        gender=request.get("gender"),
        max_text_area_fraction=float(request.get("max_text_area_fraction", 0.10)),
        theme=request.get("theme"),
        target_aspect=float(request.get("target_aspect", 2.0)),
        top_k=int(request.get("top_k", 3)),
        k_scene=int(request.get("k_scene", 16)),
        ga=ga,
        compose_options=options,
        sizing=sizing,
        seed=int(doc.get("seed", 0)),
    )


def layout_to_dict(layout: Layout) -> dict:
    return {
        "canvas_width": layout.canvas_width,
        "canvas_height": layout.canvas_height,
        "elements": [
            {
                "kind": e.kind,
                "box": e.box.as_list(),
                **({"face_box": e.face_box.as_list()} if e.face_box else {}),
            }
            for e in layout.elements
        ],
    }


def layout_from_dict(doc: dict) -> Layout:
    return Layout(
        canvas_width=float(doc["canvas_width"]),
        canvas_height=float(doc["canvas_height"]),
        elements=tuple(
            ElementBox(
                kind=e["kind"], box=BBox(*e["box"]),
                face_box=BBox(*e["face_box"]) if e.get("face_box") else None,
            )
            for e in doc["elements"]
        ),
    )


def problem_from_dict(doc: dict) -> LayoutProblem:
    ranges = {
        kind: SizeRange(
            min_width=float(r["min_width"]), max_width=float(r["max_width"]),
            min_height=float(r["min_height"]), max_height=float(r["max_height"]),
        )
        for kind, r in doc.get("bounds", {}).items()
    }
    weights = EnergyWeights(**doc["weights"]) if "weights" in doc else EnergyWeights()
    return LayoutProblem(
        canvas_width=float(doc["canvas_width"]),
        canvas_height=float(doc["canvas_height"]),
        fixed_elements=tuple(
            ElementBox(
                kind=e["kind"], box=BBox(*e["box"]),
                face_box=BBox(*e["face_box"]) if e.get("face_box") else None,
            )
            for e in doc.get("fixed", [])
        ),
        movable_specs=tuple(
            MovableSpec(kind=m["kind"], width=float(m["width"]), height=float(m["height"]))
            for m in doc["movable"]
        ),
        bounds=SizeBounds(ranges=ranges),
        weights=weights,
    )


def write_atomic(path: str | Path, data: bytes) -> None:
    """Write via a temp file and rename, so failures never corrupt outputs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _derived_seed(*parts) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


# ---------------------------------------------------------------------------
# pipeline steps
# ---------------------------------------------------------------------------

def transform_annotation(ann: ImageAnnotation, dx: float, dy: float,
                         width: int, height: int) -> ImageAnnotation:
    """Map an annotation into a crop frame: shift, clip, drop what falls out."""

    def move(box: BBox) -> BBox | None:
        return box.translate(dx, dy).clip(width, height)

    persons = tuple(b for p in ann.persons if (b := move(p)) is not None)
    faces = tuple(
        type(f)(box=b, gender=f.gender) for f in ann.faces if (b := move(f.box)) is not None
    )
    articles = tuple(
        type(a)(category=a.category, box=b, confidence=a.confidence)
        for a in ann.articles if (b := move(a.box)) is not None
    )
    texts = tuple(b for t in ann.text_regions if (b := move(t)) is not None)
    return ImageAnnotation(
        image_id=ann.image_id, width=width, height=height,
        brand=ann.brand, season=ann.season,
        persons=persons, faces=faces, articles=articles,
        scene=ann.scene, text_regions=texts,
    )


def build_problem(ann: ImageAnnotation, canvas_w: int, canvas_h: int,
                  sizing: dict, weights: EnergyWeights) -> LayoutProblem:
    """Fixed elements from the (crop-frame) annotation plus logo/text specs."""
    fixed: list[ElementBox] = []
    for person in ann.persons:
        face = None
        for f in ann.faces:
            cx, cy = f.box.center
            if person.x_left <= cx <= person.x_right and person.y_top <= cy <= person.y_bottom:
                face = f.box
                break
        fixed.append(ElementBox(kind="person", box=person, face_box=face))
    for article in ann.articles:
        fixed.append(ElementBox(kind="object", box=article.box))

    ranges = {}
    specs = []
    for kind in ("logo", "text"):
        s: ElementSizing = sizing[kind]
        ranges[kind] = SizeRange(
            min_width=s.min_width * canvas_w, max_width=s.max_width * canvas_w,
            min_height=s.min_height * canvas_h, max_height=s.max_height * canvas_h,
        )
        specs.append(MovableSpec(kind=kind, width=s.width * canvas_w, height=s.height * canvas_h))

    return LayoutProblem(
        canvas_width=float(canvas_w), canvas_height=float(canvas_h),
        fixed_elements=tuple(fixed), movable_specs=tuple(specs),
        bounds=SizeBounds(ranges=ranges), weights=weights,
    )


def load_catalog(annotation_dir: str | Path) -> tuple[list[ImageAnnotation], list[FailureEntry]]:
    """Parse and validate every *.json annotation, in sorted filename order."""
    catalog = []
    failures = []
    paths = sorted(Path(annotation_dir).glob("*.json"))
    if not paths:
        raise PipelineError(f"no annotation files in {annotation_dir}")
    for path in paths:
        try:
            ann = parse_annotation(path.read_bytes())
        except ValueError as exc:
            failures.append(FailureEntry(image_id=path.stem, error=f"parse: {exc}"))
            continue
        violations = validate(ann)
        if violations:
            failures.append(FailureEntry(
                image_id=ann.image_id,
                error="invalid annotation: " + "; ".join(str(v) for v in violations),
            ))
            continue
        catalog.append(ann)
    return catalog, failures


def run_pipeline(cfg: PipelineConfig) -> BannerManifest:
    """Generate, score, and persist banners for every matching catalog image.

    Per-image failures become manifest entries instead of aborting the run;
    outputs are written atomically so a failure never leaves a truncated
    file behind.
    """
    catalog, failures = load_catalog(cfg.annotation_dir)
    crit = FilterCriteria(
        brand=cfg.brand, category=cfg.category, environment=cfg.environment,
        gender=cfg.gender, max_text_area_fraction=cfg.max_text_area_fraction,
    )
    selected = set(filter_images(catalog, crit))
    if not selected:
        raise PipelineError("no catalog image matches the filter criteria")

    library = parse_element_library(Path(cfg.element_library).read_bytes())
    if cfg.brand is not None and library.logo_for(cfg.brand) is None:
        raise PipelineError(f"element library has no logo for brand {cfg.brand!r}")
    callout_pool = library.callouts_for(cfg.theme)
    if not callout_pool:
        raise PipelineError(f"element library has no callout for theme {cfg.theme!r}")

    weights = EnergyWeights()
    if cfg.weights_file is not None and Path(cfg.weights_file).exists():
        weights = EnergyWeights.from_json(Path(cfg.weights_file).read_text())

    schema = None
    if cfg.schema_file is not None and Path(cfg.schema_file).exists():
        schema = FeatureSchema.from_json(Path(cfg.schema_file).read_text())
    if schema is None:
        schema = build_schema(catalog, k_scene=cfg.k_scene)
        if cfg.schema_file is not None:
            write_atomic(cfg.schema_file, schema.to_json().encode("utf-8"))

    model: TrainedModel | None = None
    if cfg.model_file is not None:
        model = model_from_json(Path(cfg.model_file).read_bytes())
        expected_fp = fingerprint_of_names(schema.slots)
        if model.fingerprint != expected_fp:
            raise PipelineError(
                f"model fingerprint {model.fingerprint} does not match schema {expected_fp}"
            )

    out_dir = Path(cfg.output_dir)
    banner_dir = out_dir / "banners"
    logo_cache: dict[str, Raster] = {}
    entries: list[BannerEntry] = []

    for ann in catalog:
        if ann.image_id not in selected:
            continue
        try:
            entries.extend(_process_image(
                ann, cfg, library, weights, schema, model, banner_dir, logo_cache, callout_pool,
            ))
        except (ValueError, OSError, PipelineError) as exc:
            failures.append(FailureEntry(image_id=ann.image_id, error=str(exc)))

    if model is not None:
        entries.sort(key=lambda e: (-e.predicted_ctr, e.banner_id))
    else:
        entries.sort(key=lambda e: (e.energy["total"], e.banner_id))

    manifest = BannerManifest(entries=tuple(entries), failures=tuple(failures), seed=cfg.seed)
    write_atomic(out_dir / "manifest.json", manifest.to_json().encode("utf-8"))
    return manifest


def _process_image(
    ann: ImageAnnotation,
    cfg: PipelineConfig,
    library: ElementLibrary,
    weights: EnergyWeights,
    schema: FeatureSchema,
    model: TrainedModel | None,
    banner_dir: Path,
    logo_cache: dict[str, Raster],
    callout_pool,
) -> list[BannerEntry]:
    brand = cfg.brand if cfg.brand is not None else ann.brand
    logo_entry = library.logo_for(brand)
    if logo_entry is None:
        raise PipelineError(f"no logo for brand {brand!r}")
    if brand not in logo_cache:
        logo_path = Path(logo_entry.path)
        if not logo_path.is_absolute():
            logo_path = Path(cfg.element_library).parent / logo_path
        logo_cache[brand] = read_png(logo_path)
    logo = logo_cache[brand]

    image = read_png(Path(cfg.image_dir) / f"{ann.image_id}.png")
    crop = crop_roi(image, ann, cfg.target_aspect)
    canvas_w, canvas_h = crop.raster.width, crop.raster.height
    local_ann = transform_annotation(ann, crop.offset[0], crop.offset[1], canvas_w, canvas_h)

    problem = build_problem(local_ann, canvas_w, canvas_h, cfg.sizing, weights)
    ga_cfg = GAConfig(**{
        **{f: getattr(cfg.ga, f) for f in cfg.ga.__dataclass_fields__},
        "rng_seed": _derived_seed(cfg.seed, ann.image_id, "ga"),
    })
    run = evolve(problem, ga_cfg, top_k=cfg.top_k)

    options = ComposeOptions(
        target_aspect=cfg.target_aspect,
        gradient_enabled=cfg.compose_options.gradient_enabled,
        gradient_strength=cfg.compose_options.gradient_strength,
        min_font=cfg.compose_options.min_font,
        text_alignment=cfg.compose_options.text_alignment,
    )
    names_fp = fingerprint_of_names(schema.slots)

    entries = []
    for k, (layout, _) in enumerate(run.top_layouts):
        banner_id = f"{ann.image_id}_L{k}"
        rng = random.Random(_derived_seed(cfg.seed, banner_id, "callout"))
        callout = callout_pool[rng.randrange(len(callout_pool))].text

        banner = compose(image, ann, layout, logo, callout, options)
        breakdown = total_energy(layout, weights, problem.bounds)

        vec = extract(local_ann, layout, schema)
        predicted = None
        if model is not None:
            inlined = FeatureVector(schema_fingerprint=names_fp, values=vec.full_values())
            predicted = predict_ctr(model, inlined)

        out_path = banner_dir / f"{banner_id}.png"
        write_atomic(out_path, encode_png(banner))
        sidecar = {
            "banner_id": banner_id,
            "image_id": ann.image_id,
            "layout": layout_to_dict(layout),
            "energy": breakdown.as_dict(),
            "predicted_ctr": predicted,
            "callout": callout,
            "logo_brand": brand,
            "crop_offset": list(crop.offset),
            "options": options.as_dict(),
            "features": list(vec.values),
        }
        write_atomic(banner_dir / f"{banner_id}.json",
                     json.dumps(sidecar, indent=2, sort_keys=True).encode("utf-8"))
        entries.append(BannerEntry(
            banner_id=banner_id, image_id=ann.image_id, output_path=str(out_path),
            energy=breakdown.as_dict(), predicted_ctr=predicted,
            callout=callout, logo_brand=brand, layout=layout_to_dict(layout),
        ))
    return entries


__all__ = [
    "PipelineError", "ElementSizing", "DEFAULT_SIZING", "PipelineConfig",
    "BannerEntry", "FailureEntry", "BannerManifest",
    "config_from_json", "layout_to_dict", "layout_from_dict", "problem_from_dict",
    "write_atomic", "transform_annotation", "build_problem", "load_catalog",
    "run_pipeline",
]
