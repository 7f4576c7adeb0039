#!/usr/bin/env python3
"""Regenerate the committed demo corpus (images, annotations, logos, library).

Deterministic: running it twice produces identical bytes. The corpus is
small enough to commit, so the full pipeline runs out of the box with no
external data.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from bannerforge.annotations import serialize_annotation, parse_annotation, validate
from bannerforge.compositor import TextStyle, golden_line_height, measure_line, render_text
from bannerforge.annotations import (
    ArticleAnnotation, BBox, FaceAnnotation, ImageAnnotation, SceneInfo,
)
from bannerforge.raster import Raster, write_png

DEMO_DIR = Path(__file__).resolve().parent.parent / "demo"
WIDTH, HEIGHT = 600, 400

PALETTES = [
    ((34, 49, 63), (120, 140, 160)),
    ((250, 235, 215), (180, 160, 130)),
    ((22, 60, 40), (110, 180, 140)),
    ((70, 30, 80), (190, 150, 210)),
    ((240, 240, 245), (140, 140, 155)),
    ((40, 40, 45), (90, 90, 100)),
]

CATEGORIES = ["topwear", "bottomwear", "shoes", "watches", "bags", "headgear"]
SCENES = [
    ("indoor", ["studio", "boutique"], ["warm", "man-made"]),
    ("outdoor", ["street", "rooftop"], ["natural-light", "open-area"]),
    ("outdoor", ["garden", "beach"], ["natural-light", "warm"]),
    ("indoor", ["restaurant", "studio"], ["man-made", "cluttered"]),
]


def gradient_background(rng, palette):
    top = np.array(palette[0], dtype=np.float64)
    bottom = np.array(palette[1], dtype=np.float64)
    t = np.linspace(0.0, 1.0, HEIGHT)[:, None, None]
    rgb = top[None, None, :] * (1 - t) + bottom[None, None, :] * t
    # low-frequency mottling, upscaled: photo-like but PNG-friendly
    coarse = rng.normal(0.0, 10.0, size=(-(-HEIGHT // 16), -(-WIDTH // 16), 3))
    noise = np.repeat(np.repeat(coarse, 16, axis=0), 16, axis=1)[:HEIGHT, :WIDTH]
    arr = np.clip(rgb + noise, 0, 255).astype(np.uint8)
    out = np.empty((HEIGHT, WIDTH, 4), dtype=np.uint8)
    out[..., :3] = arr
    out[..., 3] = 255
    return out


def fill_rect(arr, box, color):
    x0, y0, x1, y1 = (int(v) for v in box)
    arr[y0:y1, x0:x1, :3] = color


def fill_ellipse(arr, box, color):
    x0, y0, x1, y1 = (int(v) for v in box)
    cy, cx = (y0 + y1) / 2, (x0 + x1) / 2
    ry, rx = max((y1 - y0) / 2, 1), max((x1 - x0) / 2, 1)
    ys, xs = np.ogrid[:arr.shape[0], :arr.shape[1]]
    mask = ((ys - cy) / ry) ** 2 + ((xs - cx) / rx) ** 2 <= 1.0
    arr[mask, :3] = color


def make_image(i: int, rng) -> tuple[np.ndarray, ImageAnnotation]:
    brand = "aurora" if i < 7 else "brio"
    palette = PALETTES[i % len(PALETTES)]
    arr = gradient_background(rng, palette)

    # a person on one side, clothing and face tones tied to the palette
    person_w = rng.integers(110, 170)
    person_h = rng.integers(220, 320)
    px = int(rng.integers(30, WIDTH - person_w - 30))
    py = int(rng.integers(30, HEIGHT - person_h - 10))
    person = (px, py, px + int(person_w), py + int(person_h))
    clothing = tuple(int(c) for c in rng.integers(40, 210, size=3))
    fill_rect(arr, person, clothing)

    face_w = int(person_w * 0.4)
    face_h = int(face_w * 1.25)
    fx = px + (int(person_w) - face_w) // 2
    fy = py + 8
    face = (fx, fy, fx + face_w, fy + face_h)
    fill_ellipse(arr, face, (224, 172, 105))

    # one fashion article near the person
    art_w, art_h = int(rng.integers(60, 120)), int(rng.integers(40, 90))
    ax = int(np.clip(px + int(person_w) + 10, 0, WIDTH - art_w - 1))
    ay = int(rng.integers(HEIGHT // 2, HEIGHT - art_h - 5))
    article = (ax, ay, ax + art_w, ay + art_h)
    fill_rect(arr, article, tuple(int(c) for c in rng.integers(30, 225, size=3)))

    env, cats, attrs = SCENES[i % len(SCENES)]
    text_regions = ()
    if i == 5:  # one catalog image carries heavy baked-in text, to be filtered
        text_regions = (BBox(40, 40, 560, 360),)
        fill_rect(arr, (40, 40, 560, 360), (250, 250, 250))

    ann = ImageAnnotation(
        image_id=f"img{i + 1:02d}",
        width=WIDTH, height=HEIGHT,
        brand=brand,
        season="ss" if i % 2 == 0 else "aw",
        persons=(BBox(*person),),
        faces=(FaceAnnotation(BBox(*face), "female" if i % 3 else "male"),),
        articles=(ArticleAnnotation(CATEGORIES[i % len(CATEGORIES)], BBox(*article),
                                    confidence=round(0.7 + 0.02 * i, 2)),),
        scene=SceneInfo(env, frozenset(cats), frozenset(attrs)),
        text_regions=text_regions,
    )
    return arr, ann


def make_logo(brand: str, box_color) -> Raster:
    canvas = Raster.new(180, 90, (0, 0, 0, 0))
    canvas.pixels[10:80, 5:175] = (*box_color, 255)
    name = brand.upper()
    font_height = 28
    while measure_line(name, font_height) > 160:
        font_height -= 2
    style = TextStyle(font_height=font_height,
                      line_height=golden_line_height(font_height),
                      color=(255, 255, 255, 255), alignment="center")
    return render_text(canvas, [name], style, BBox(10, 22, 170, 70))


def main():
    rng = np.random.default_rng(2024)
    ann_dir = DEMO_DIR / "annotations"
    img_dir = DEMO_DIR / "images"
    logo_dir = DEMO_DIR / "logos"
    for d in (ann_dir, img_dir, logo_dir):
        d.mkdir(parents=True, exist_ok=True)

    for i in range(12):
        arr, ann = make_image(i, rng)
        assert validate(ann) == [], validate(ann)
        write_png(Raster(arr), img_dir / f"{ann.image_id}.png")
        (ann_dir / f"{ann.image_id}.json").write_text(serialize_annotation(ann))
        assert parse_annotation(serialize_annotation(ann)) == ann

    write_png(make_logo("aurora", (178, 34, 52)), logo_dir / "aurora.png")
    write_png(make_logo("brio", (20, 90, 50)), logo_dir / "brio.png")

    library = {
        "logos": [
            {"brand": "aurora", "path": "logos/aurora.png"},
            {"brand": "brio", "path": "logos/brio.png"},
        ],
        "callouts": [
            {"text": "MEGA SALE", "themes": ["sale"]},
            {"text": "FLAT 50% OFF", "themes": ["sale"]},
            {"text": "NEW DROP", "themes": ["launch"]},
            {"text": "JUST LANDED", "themes": ["launch"]},
            {"text": "ICONIC STYLE", "themes": ["brand"]},
            {"text": "OWN THE SEASON", "themes": ["brand", "sale"]},
        ],
    }
    (DEMO_DIR / "library.json").write_text(json.dumps(library, indent=2))

    config = {
        "annotation_dir": "annotations",
        "image_dir": "images",
        "element_library": "library.json",
        "output_dir": "out",
        "request": {
            "brand": "aurora",
            "theme": "sale",
            "target_aspect": 2.0,
            "top_k": 2,
            "max_text_area_fraction": 0.10,
        },
        "ga": {"population_size": 60, "generations": 60, "rng_seed": 0},
        "compose": {"gradient_enabled": True, "gradient_strength": 0.25},
        "seed": 7,
    }
    (DEMO_DIR / "config.json").write_text(json.dumps(config, indent=2))
    print(f"demo corpus written to {DEMO_DIR}")


if __name__ == "__main__":
    main()
