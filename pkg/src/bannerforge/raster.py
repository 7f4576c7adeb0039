"""RGBA raster type, PNG round-tripping, and low-level pixel primitives.

Rasters are row-major uint8 (height, width, 4) arrays. Every public
operation treats them as values: inputs are never mutated. PNG is the only
file format (lossless, alpha-preserving); Pillow handles the codec while
all pixel math lives here.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image


class Raster:
    """An RGBA pixel grid, 8 bits per channel."""

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels)
        if arr.ndim != 3 or arr.shape[2] != 4 or arr.dtype != np.uint8:
            raise ValueError(f"expected (h, w, 4) uint8 array, got {arr.shape} {arr.dtype}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("raster must be at least 1x1")
        self.pixels = arr

    @classmethod
    def new(cls, width: int, height: int, color=(0, 0, 0, 0)) -> "Raster":
        arr = np.empty((height, width, 4), dtype=np.uint8)
        arr[:, :] = color
        return cls(arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def copy(self) -> "Raster":
        return Raster(self.pixels.copy())

    def same_pixels(self, other: "Raster") -> bool:
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def crop(self, x0: int, y0: int, x1: int, y1: int) -> "Raster":
        if not (0 <= x0 < x1 <= self.width and 0 <= y0 < y1 <= self.height):
            raise ValueError(f"crop rect ({x0},{y0},{x1},{y1}) outside raster {self.width}x{self.height}")
        return Raster(self.pixels[y0:y1, x0:x1].copy())


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5)


def scale_nearest(raster: Raster, new_width: int, new_height: int) -> Raster:
    """Nearest-neighbor resample; deterministic and alpha-preserving."""
    if new_width < 1 or new_height < 1:
        raise ValueError("scaled dimensions must be positive")
    rows = (np.arange(new_height) * raster.height) // new_height
    cols = (np.arange(new_width) * raster.width) // new_width
    return Raster(raster.pixels[rows][:, cols].copy())


def composite_over(base: np.ndarray, overlay: np.ndarray) -> np.ndarray:
    """Source-over alpha compositing of two equally shaped RGBA uint8 blocks."""
    if base.shape != overlay.shape:
        raise ValueError("composite requires equal shapes")
    a_s = overlay[..., 3:4].astype(np.float64) / 255.0
    a_b = base[..., 3:4].astype(np.float64) / 255.0
    out_a = a_s + a_b * (1.0 - a_s)
    rgb = (overlay[..., :3] * a_s + base[..., :3] * a_b * (1.0 - a_s))
    safe = np.where(out_a > 0, out_a, 1.0)
    out_rgb = _round_half_up(rgb / safe)
    out = np.empty_like(base)
    out[..., :3] = np.clip(out_rgb, 0, 255).astype(np.uint8)
    out[..., 3] = np.clip(_round_half_up(out_a[..., 0] * 255.0), 0, 255).astype(np.uint8)
    return out


def blend_color(base: np.ndarray, color, mask: np.ndarray) -> np.ndarray:
    """Source-over blend of a flat RGBA color into `base` where `mask` is true."""
    out = base.copy()
    if not mask.any():
        return out
    overlay = np.zeros_like(base)
    overlay[mask] = color
    blended = composite_over(base, overlay)
    out[mask] = blended[mask]
    return out


def pixel_digest(raster: Raster) -> str:
    """Content hash over dimensions and raw RGBA bytes (encoder independent)."""
    import hashlib

    h = hashlib.sha256()
    h.update(f"{raster.width}x{raster.height}:".encode())
    h.update(raster.pixels.tobytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# PNG round-trip
# ---------------------------------------------------------------------------

def encode_png(raster: Raster) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(raster.pixels, mode="RGBA").save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> Raster:
    with Image.open(io.BytesIO(data)) as img:
        return Raster(np.asarray(img.convert("RGBA"), dtype=np.uint8).copy())


def read_png(path) -> Raster:
    with open(path, "rb") as fh:
        return decode_png(fh.read())


def write_png(raster: Raster, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_png(raster))


__all__ = [
    "Raster", "scale_nearest", "composite_over", "blend_color", "pixel_digest",
    "encode_png", "decode_png", "read_png", "write_png",
]
