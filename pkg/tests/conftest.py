"""Shared oracles and fixtures.

The oracles here are deliberately naive (pixel rasterization, O(n^2) pair
counting, explicit normal equations) and independent of the library code
paths they check.
"""

from __future__ import annotations

import numpy as np
import pytest

from bannerforge.annotations import BBox


def rasterized_union_area(boxes, width: int, height: int) -> int:
    """Pixel-count oracle for the union area of integer-coordinate boxes."""
    grid = np.zeros((height, width), dtype=bool)
    for b in boxes:
        x0, y0 = max(0, int(b.x_left)), max(0, int(b.y_top))
        x1, y1 = min(width, int(b.x_right)), min(height, int(b.y_bottom))
        if x0 < x1 and y0 < y1:
            grid[y0:y1, x0:x1] = True
    return int(grid.sum())


def rasterized_iou(a: BBox, b: BBox, size: int = 64) -> float:
    """Pixel-count oracle for intersection-over-union of integer boxes."""
    ga = np.zeros((size, size), dtype=bool)
    gb = np.zeros((size, size), dtype=bool)
    ga[int(a.y_top):int(a.y_bottom), int(a.x_left):int(a.x_right)] = True
    gb[int(b.y_top):int(b.y_bottom), int(b.x_left):int(b.x_right)] = True
    inter = int((ga & gb).sum())
    union = int((ga | gb).sum())
    return inter / union if union else 0.0


def pairwise_auc(scores, labels) -> float:
    """O(n^2) AUC oracle: count concordant positive/negative pairs directly."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def random_int_box(rng, max_coord: int = 64) -> BBox:
    x0, x1 = sorted(rng.sample(range(max_coord + 1), 2))
    y0, y1 = sorted(rng.sample(range(max_coord + 1), 2))
    return BBox(float(x0), float(y0), float(x1), float(y1))


@pytest.fixture
def tmp_out(tmp_path):
    return tmp_path
