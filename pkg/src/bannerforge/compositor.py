"""Banner assembly: ROI cropping, gradients, text formatting, and overlays.

Turns a photoshoot image plus a layout into a finished banner. Cropping
honors annotated people and the dominant article (the center-crop baseline
ignores them); text is wrapped at golden-ratio line height and rendered
from the embedded bitmap font; logos are letterboxed into their layout box
and alpha-composited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .annotations import BBox, ImageAnnotation, dominant_article
from .energy import Layout
from .font5x7 import GLYPH_HEIGHT, GLYPH_WIDTH, glyph_rows
from .raster import Raster, blend_color, composite_over, scale_nearest

GOLDEN_RATIO = 1.618
MIN_FONT_HEIGHT = 8
WHITE = (255, 255, 255, 255)
NEAR_BLACK = (16, 16, 16, 255)
MIN_CONTRAST = 4.5
DEFAULT_GRADIENT_STRENGTH = 0.25


class TextOverflowError(ValueError):
    """Raised when a callout cannot fit its box even at the minimum font size."""


def golden_line_height(font_height: int) -> int:
    return int(GOLDEN_RATIO * font_height + 0.5)


@dataclass(frozen=True)
class TextStyle:
    """Type settings for one rendered block: golden-ratio leading enforced."""

    font_height: int
    line_height: int
    color: tuple[int, int, int, int] = WHITE
    alignment: str = "left"

    def __post_init__(self):
        if self.font_height < MIN_FONT_HEIGHT:
            raise ValueError(f"font_height must be >= {MIN_FONT_HEIGHT}")
        if self.line_height != golden_line_height(self.font_height):
            raise ValueError(
                f"line_height {self.line_height} violates the golden-ratio rule "
                f"for font_height {self.font_height}"
            )
        if self.alignment not in ("left", "center"):
            raise ValueError(f"alignment must be left or center, got {self.alignment!r}")


@dataclass(frozen=True)
class CropResult:
    """A crop plus the (dx, dy) that maps source coordinates into it.

    crop_x = source_x + dx. ``aspect_fallback`` marks crops where the
    requested region could not fit and the maximal centered rectangle was
    used instead.
    """

    raster: Raster
    offset: tuple[int, int]
    aspect_fallback: bool = False


@dataclass(frozen=True)
class ComposeOptions:
    """Knobs for :func:`compose`; defaults reproduce the standard pipeline."""

    target_aspect: float | None = None
    gradient_enabled: bool = True
    gradient_strength: float = DEFAULT_GRADIENT_STRENGTH
    min_font: int = MIN_FONT_HEIGHT
    text_alignment: str = "left"

    def as_dict(self) -> dict:
        return {
            "target_aspect": self.target_aspect,
            "gradient_enabled": self.gradient_enabled,
            "gradient_strength": self.gradient_strength,
            "min_font": self.min_font,
            "text_alignment": self.text_alignment,
        }


# ---------------------------------------------------------------------------
# geometry helpers
# ---------------------------------------------------------------------------

def _int_rect(box: BBox) -> tuple[int, int, int, int]:
    return (int(round(box.x_left)), int(round(box.y_top)),
            int(round(box.x_right)), int(round(box.y_bottom)))


def max_rect_with_aspect(width: int, height: int, aspect: float) -> tuple[int, int]:
    """Largest (w, h) with w <= width, h <= height and |w - aspect*h| <= 0.5."""
    if aspect <= 0:
        raise ValueError("aspect must be positive")
    h = min(height, int(math.ceil((width + 0.5) / aspect)) - 1)
    h = max(1, h)
    w = int(round(aspect * h))
    while w > width and h > 1:
        h -= 1
        w = int(round(aspect * h))
    return max(1, min(w, width)), h


def crop_roi(image: Raster, ann: ImageAnnotation, target_aspect: float) -> CropResult:
    """Smallest crop of the target aspect covering people and the key article.

    The seed region is the union of person boxes with the dominant article
    box (all articles if there are no seeds, the full image as last
    resort). The aspect-correct window is centered on it, then slid, not
    shrunk, to stay inside the image; shrinking only happens when the
    window cannot fit at all, which sets ``aspect_fallback``.
    """
    if target_aspect <= 0:
        raise ValueError("target_aspect must be positive")
    w_img, h_img = image.width, image.height

    seeds = [b for p in ann.persons if (b := p.clip(w_img, h_img)) is not None]
    dom = dominant_article(ann)
    if dom is not None and (b := dom[1].clip(w_img, h_img)) is not None:
        seeds.append(b)
    if not seeds:
        seeds = [b for a in ann.articles if (b := a.box.clip(w_img, h_img)) is not None]
    if not seeds:
        seeds = [BBox(0, 0, w_img, h_img)]

    # Snap the ROI outward to the pixel grid so an integer window origin can
    # always contain it exactly.
    roi_l = int(math.floor(min(b.x_left for b in seeds)))
    roi_t = int(math.floor(min(b.y_top for b in seeds)))
    roi_r = int(math.ceil(max(b.x_right for b in seeds)))
    roi_b = int(math.ceil(max(b.y_bottom for b in seeds)))
    roi_w, roi_h = roi_r - roi_l, roi_b - roi_t

    h_crop = max(1, roi_h, math.ceil(roi_w / target_aspect - 1e-9))
    w_crop = int(round(target_aspect * h_crop))
    while w_crop < roi_w:
        h_crop += 1
        w_crop = int(round(target_aspect * h_crop))

    if w_crop > w_img or h_crop > h_img:
        w_crop, h_crop = max_rect_with_aspect(w_img, h_img, target_aspect)
        x0 = (w_img - w_crop) // 2
        y0 = (h_img - h_crop) // 2
        return CropResult(
            raster=image.crop(x0, y0, x0 + w_crop, y0 + h_crop),
            offset=(-x0, -y0),
            aspect_fallback=True,
        )

    # Center the window on the ROI, then slide it only as far as containment
    # and the image frame allow (both intervals are non-empty by the size
    # computation above).
    cx, cy = (roi_l + roi_r) / 2.0, (roi_t + roi_b) / 2.0
    x0 = int(round(cx - w_crop / 2.0))
    y0 = int(round(cy - h_crop / 2.0))
    x0 = min(max(x0, roi_r - w_crop, 0), roi_l, w_img - w_crop)
    y0 = min(max(y0, roi_b - h_crop, 0), roi_t, h_img - h_crop)
    return CropResult(
        raster=image.crop(x0, y0, x0 + w_crop, y0 + h_crop),
        offset=(-x0, -y0),
        aspect_fallback=False,
    )


def center_crop_baseline(image: Raster, target_aspect: float) -> Raster:
    """The baseline: maximal centered rectangle of the target aspect."""
    if target_aspect <= 0:
        raise ValueError("target_aspect must be positive")
    w, h = max_rect_with_aspect(image.width, image.height, target_aspect)
    x0 = (image.width - w) // 2
    y0 = (image.height - h) // 2
    return image.crop(x0, y0, x0 + w, y0 + h)


# ---------------------------------------------------------------------------
# post-processing
# ---------------------------------------------------------------------------

def apply_gradient(raster: Raster, region: BBox, strength: float) -> Raster:
    """Darken the region linearly from full brightness at its top edge.

    The scale factor ramps to (1 - strength) at the bottom row; alpha is
    untouched. strength 0 is a byte-level identity.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError("strength must be in [0, 1]")
    x0, y0, x1, y1 = _int_rect(region)
    if not (0 <= x0 < x1 <= raster.width and 0 <= y0 < y1 <= raster.height):
        raise ValueError(f"region {region.as_list()} outside raster {raster.width}x{raster.height}")
    out = raster.copy()
    if strength == 0.0:
        return out
    h = y1 - y0
    t = np.arange(h, dtype=np.float64) / max(h - 1, 1)
    factors = 1.0 - strength * t
    block = out.pixels[y0:y1, x0:x1, :3].astype(np.float64)
    out.pixels[y0:y1, x0:x1, :3] = np.clip(
        np.floor(block * factors[:, None, None] + 0.5), 0, 255
    ).astype(np.uint8)
    return out


_SRGB_TO_LINEAR = np.array([
    (c / 255.0) / 12.92 if (c / 255.0) <= 0.04045 else ((c / 255.0 + 0.055) / 1.055) ** 2.4
    for c in range(256)
])


def relative_luminance(color) -> float:
    """Rec. 709 relative luminance of one RGB(A) color, channels linearized."""
    r, g, b = (_SRGB_TO_LINEAR[int(color[i])] for i in range(3))
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def contrast_ratio(lum_a: float, lum_b: float) -> float:
    lighter, darker = max(lum_a, lum_b), min(lum_a, lum_b)
    return (lighter + 0.05) / (darker + 0.05)


def region_luminance(raster: Raster, region: BBox) -> float:
    x0, y0, x1, y1 = _int_rect(region)
    if not (0 <= x0 < x1 <= raster.width and 0 <= y0 < y1 <= raster.height):
        raise ValueError(f"region {region.as_list()} outside raster {raster.width}x{raster.height}")
    block = raster.pixels[y0:y1, x0:x1, :3]
    lin = _SRGB_TO_LINEAR[block]
    return float((0.2126 * lin[..., 0] + 0.7152 * lin[..., 1] + 0.0722 * lin[..., 2]).mean())


def choose_text_color(raster: Raster, region: BBox) -> tuple[int, int, int, int]:
    """White on dark regions, near-black on light ones, contrast-checked.

    The luminance rule picks the candidate; if it cannot reach a 4.5:1
    contrast ratio against the region mean, the opposite extreme is forced
    (or, when neither reaches it, whichever contrasts more).
    """
    lum = region_luminance(raster, region)
    primary, other = (WHITE, NEAR_BLACK) if lum < 0.5 else (NEAR_BLACK, WHITE)
    c_primary = contrast_ratio(relative_luminance(primary), lum)
    if c_primary >= MIN_CONTRAST:
        return primary
    c_other = contrast_ratio(relative_luminance(other), lum)
    if c_other >= MIN_CONTRAST:
        return other
    if c_other > c_primary:
        return other
    if c_primary > c_other:
        return primary
    return WHITE


# ---------------------------------------------------------------------------
# text
# ---------------------------------------------------------------------------

def _glyph_metrics(font_height: int) -> tuple[int, int, int]:
    """(glyph_width, spacing, advance) in pixels at a given font height."""
    glyph_w = max(1, int(round(GLYPH_WIDTH * font_height / GLYPH_HEIGHT)))
    spacing = max(1, int(round(font_height / GLYPH_HEIGHT)))
    return glyph_w, spacing, glyph_w + spacing


def measure_line(text: str, font_height: int) -> int:
    """Rendered pixel width of one line (the font is monospaced)."""
    if not text:
        return 0
    glyph_w, spacing, advance = _glyph_metrics(font_height)
    return len(text) * advance - spacing


def _wrap_words(words: list[str], box_width: int, font_height: int) -> list[str] | None:
    """Greedy word wrap; None when some word alone exceeds the box width."""
    lines: list[str] = []
    current = ""
    for word in words:
        if measure_line(word, font_height) > box_width:
            return None
        candidate = word if not current else f"{current} {word}"
        if measure_line(candidate, font_height) <= box_width:
            current = candidate
        else:
            lines.append(current)
            current = word
    if current:
        lines.append(current)
    return lines


def layout_text(text: str, box: BBox, min_font: int = MIN_FONT_HEIGHT) -> tuple[list[str], TextStyle]:
    """Wrap text at the largest font that fits the box, golden-ratio leading.

    Searches font heights downward from the box height; a candidate fits
    when every wrapped line fits the box width and the stacked line heights
    fit the box height. Raises :class:`TextOverflowError` when even the
    minimum font overflows.
    """
    words = text.split()
    if not words:
        raise ValueError("text must be non-empty")
    box_w = int(box.width)
    box_h = int(box.height)
    floor_font = max(min_font, MIN_FONT_HEIGHT)
    for font_height in range(box_h, floor_font - 1, -1):
        line_height = golden_line_height(font_height)
        if line_height > box_h:
            continue
        lines = _wrap_words(words, box_w, font_height)
        if lines is None:
            continue
        if len(lines) * line_height <= box_h:
            return lines, TextStyle(font_height=font_height, line_height=line_height)
    raise TextOverflowError(
        f"text ({len(words)} words) overflows {box_w}x{box_h} box even at font {floor_font}"
    )


def _glyph_mask(char: str, glyph_w: int, glyph_h: int) -> np.ndarray:
    rows = glyph_rows(char)
    bitmap = np.array(
        [[(row >> (GLYPH_WIDTH - 1 - c)) & 1 for c in range(GLYPH_WIDTH)] for row in rows],
        dtype=bool,
    )
    rr = (np.arange(glyph_h) * GLYPH_HEIGHT) // glyph_h
    cc = (np.arange(glyph_w) * GLYPH_WIDTH) // glyph_w
    return bitmap[rr][:, cc]


def render_text(raster: Raster, lines: list[str], style: TextStyle, box: BBox) -> Raster:
    """Alpha-blend the wrapped lines into the box; pixels outside it never change."""
    out = raster.copy()
    if not lines:
        return out
    bx0, by0, bx1, by1 = _int_rect(box)
    bx0, by0 = max(bx0, 0), max(by0, 0)
    bx1, by1 = min(bx1, raster.width), min(by1, raster.height)
    if bx0 >= bx1 or by0 >= by1:
        return out
    glyph_w, spacing, advance = _glyph_metrics(style.font_height)
    leading = (style.line_height - style.font_height) // 2
    mask = np.zeros((raster.height, raster.width), dtype=bool)
    for i, line in enumerate(lines):
        y = by0 + i * style.line_height + leading
        if style.alignment == "center":
            x = bx0 + ((bx1 - bx0) - measure_line(line, style.font_height)) // 2
        else:
            x = bx0
        for char in line:
            if char != " ":
                gmask = _glyph_mask(char, glyph_w, style.font_height)
                gy0, gx0 = y, x
                gy1, gx1 = y + style.font_height, x + glyph_w
                cy0, cx0 = max(gy0, by0), max(gx0, bx0)
                cy1, cx1 = min(gy1, by1), min(gx1, bx1)
                if cy0 < cy1 and cx0 < cx1:
                    mask[cy0:cy1, cx0:cx1] |= gmask[cy0 - gy0:cy1 - gy0, cx0 - gx0:cx1 - gx0]
            x += advance
    out.pixels = blend_color(out.pixels, style.color, mask)
    return out


# ---------------------------------------------------------------------------
# overlays
# ---------------------------------------------------------------------------

def paste(base: Raster, overlay: Raster, box: BBox) -> Raster:
    """Letterbox the overlay into the box (aspect preserved, centered), source-over."""
    bx0, by0, bx1, by1 = _int_rect(box)
    if not (0 <= bx0 < bx1 <= base.width and 0 <= by0 < by1 <= base.height):
        raise ValueError(f"box {box.as_list()} outside raster {base.width}x{base.height}")
    bw, bh = bx1 - bx0, by1 - by0
    factor = min(bw / overlay.width, bh / overlay.height)
    new_w = min(bw, max(1, int(round(overlay.width * factor))))
    new_h = min(bh, max(1, int(round(overlay.height * factor))))
    scaled = scale_nearest(overlay, new_w, new_h)
    x0 = bx0 + (bw - new_w) // 2
    y0 = by0 + (bh - new_h) // 2
    out = base.copy()
    region = out.pixels[y0:y0 + new_h, x0:x0 + new_w]
    out.pixels[y0:y0 + new_h, x0:x0 + new_w] = composite_over(region, scaled.pixels)
    return out


def compose(
    image: Raster,
    ann: ImageAnnotation,
    layout: Layout,
    logo: Raster,
    callout: str,
    options: ComposeOptions = ComposeOptions(),
) -> Raster:
    """Full banner assembly for one image and one layout.

    Steps: ROI crop (when a target aspect is set), darkening gradient over
    each text box, per-box text color choice, golden-ratio wrap, bitmap
    render, then the logo paste. Deterministic for identical inputs.
    """
    if options.target_aspect is not None:
        crop = crop_roi(image, ann, options.target_aspect)
        canvas = crop.raster
    else:
        canvas = image.copy()
    if (layout.canvas_width, layout.canvas_height) != (canvas.width, canvas.height):
        raise ValueError(
            f"layout canvas {layout.canvas_width}x{layout.canvas_height} does not match "
            f"cropped image {canvas.width}x{canvas.height}"
        )

    text_boxes = [e.box for e in layout.movable_elements() if e.kind == "text"]
    logo_boxes = [e.box for e in layout.movable_elements() if e.kind == "logo"]
    if len(logo_boxes) != 1 or not text_boxes:
        raise ValueError("layout must carry exactly one logo and at least one text element")

    out = canvas
    if options.gradient_enabled and options.gradient_strength > 0:
        for box in text_boxes:
            x0, y0, x1, y1 = _int_rect(box)
            if x0 < x1 and y0 < y1:
                out = apply_gradient(out, BBox(x0, y0, x1, y1), options.gradient_strength)

    if callout.strip():
        for box in text_boxes:
            x0, y0, x1, y1 = _int_rect(box)
            if x0 >= x1 or y0 >= y1:
                continue
            color = choose_text_color(out, BBox(x0, y0, x1, y1))
            lines, style = layout_text(callout, BBox(x0, y0, x1, y1), options.min_font)
            style = replace(style, color=color, alignment=options.text_alignment)
            out = render_text(out, lines, style, BBox(x0, y0, x1, y1))

    return paste(out, logo, logo_boxes[0])


__all__ = [
    "GOLDEN_RATIO", "MIN_FONT_HEIGHT", "WHITE", "NEAR_BLACK", "MIN_CONTRAST",
    "DEFAULT_GRADIENT_STRENGTH", "TextOverflowError", "TextStyle", "CropResult",
    "ComposeOptions", "golden_line_height", "max_rect_with_aspect", "crop_roi",
    "center_crop_baseline", "apply_gradient", "relative_luminance",
    "contrast_ratio", "region_luminance", "choose_text_color", "measure_line",
    "layout_text", "render_text", "paste", "compose",
]
