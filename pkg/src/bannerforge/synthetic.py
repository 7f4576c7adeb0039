"""Synthetic corpora with planted, analytically known click signal.

Real banner/CTR data is proprietary, so model and calibration tests run on
generated annotations whose click probability is a known monotone function
of one feature: the fraction of the face covered by the text box. The
generator also reports the Bayes-optimal AUC of the planted model, giving
every learned model a computable ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annotations import ArticleAnnotation, BBox, FaceAnnotation, ImageAnnotation, SceneInfo
from .calibration import HistoricalBannerRecord
from .energy import ElementBox, Layout
from .features import FeatureSchema, build_schema, extract
from .ranking import DataRow, Dataset

PLANTED_FEATURE = "overlap_text_face"
SIGNAL_STEEPNESS = 12.0

_BRANDS = ("aurora", "brio", "cresta")
_SCENE_CATS = ("garden", "street", "studio", "beach", "restaurant", "rooftop")
_SCENE_ATTRS = ("natural-light", "man-made", "warm", "cluttered", "open-area")


@dataclass(frozen=True)
class SyntheticData:
    """One generated corpus: raw annotations, calibration records, model dataset."""

    annotations: list[ImageAnnotation]
    layouts: list[Layout]
    records: list[HistoricalBannerRecord]
    dataset: Dataset
    schema: FeatureSchema
    bayes_auc: float
    planted_feature: str = PLANTED_FEATURE


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    ez = np.exp(z)
    return float(ez / (1.0 + ez))


def expected_auc(probs: np.ndarray) -> float:
    """Bayes AUC when item i is clicked with probability probs[i].

    Scoring items by their true probability, a random clicked/unclicked
    pair is correctly ordered with probability
    sum_i sum_j p_i (1-p_j) [1(p_i > p_j) + 0.5 * 1(p_i = p_j)]
    normalized by total positive and negative mass. Computed exactly by a
    sweep over tie groups in ascending probability order.
    """
    order = np.argsort(probs, kind="stable")
    p = probs[order]
    total_pos = float(p.sum())
    total_neg = float((1.0 - p).sum())
    if total_pos == 0 or total_neg == 0:
        return 0.5
    auc = 0.0
    neg_below = 0.0
    i = 0
    n = len(p)
    while i < n:
        j = i
        while j + 1 < n and p[j + 1] == p[i]:
            j += 1
        group = p[i:j + 1]
        pos_g = float(group.sum())
        neg_g = float((1.0 - group).sum())
        auc += pos_g * (neg_below + neg_g / 2.0)
        neg_below += neg_g
        i = j + 1
    return auc / (total_pos * total_neg)


def _synthesize_banner(i: int, rng: np.random.Generator, width: int, height: int):
    """One face-portrait annotation plus a layout whose text box covers a
    chosen fraction of the face."""
    u = float(rng.uniform(0.0, 1.0))

    face_w = float(rng.uniform(36, 70))
    face_h = float(rng.uniform(36, 70))
    face_x = float(rng.uniform(30, width - face_w - 30))
    face_y = float(rng.uniform(face_h + 44, height - face_h - 10))
    face = BBox(face_x, face_y, face_x + face_w, face_y + face_h)

    # Text spans the face horizontally with independent margins and slides
    # down over it so that exactly the top fraction u of the face is covered.
    # Its height is drawn independently of u, keeping the box size and area
    # uninformative; only the overlap feature carries the signal cleanly.
    margin_l = float(rng.uniform(4, min(26, face_x)))
    margin_r = float(rng.uniform(4, min(26, width - face_x - face_w)))
    text_h = float(rng.uniform(face_h + 2, face_h + 38))
    text_bottom = face_y + u * face_h
    text = BBox(face_x - margin_l, text_bottom - text_h,
                face_x + face_w + margin_r, text_bottom)

    logo_w, logo_h = float(rng.uniform(40, 90)), float(rng.uniform(20, 45))
    logo_x = float(rng.uniform(0, width - logo_w))
    logo_y = float(rng.uniform(0, height - logo_h))

    art_w, art_h = float(rng.uniform(30, 80)), float(rng.uniform(30, 80))
    art_x = float(rng.uniform(0, width - art_w))
    art_y = float(rng.uniform(0, height - art_h))
    category = ("topwear", "bottomwear", "shoes", "watches", "bags", "headgear", "other")[
        int(rng.integers(0, 7))
    ]

    n_cats = int(rng.integers(1, 4))
    n_attrs = int(rng.integers(1, 4))
    scene = SceneInfo(
        environment="outdoor" if rng.random() < 0.5 else "indoor",
        categories=frozenset(rng.choice(_SCENE_CATS, size=n_cats, replace=False).tolist()),
        attributes=frozenset(rng.choice(_SCENE_ATTRS, size=n_attrs, replace=False).tolist()),
    )

    ann = ImageAnnotation(
        image_id=f"synth{i:05d}",
        width=width,
        height=height,
        brand=_BRANDS[i % len(_BRANDS)],
        season="aw" if i % 2 else "ss",
        faces=(FaceAnnotation(box=face, gender="female" if rng.random() < 0.5 else "male"),),
        articles=(ArticleAnnotation(category=category,
                                    box=BBox(art_x, art_y, art_x + art_w, art_y + art_h),
                                    confidence=float(rng.uniform(0.5, 1.0))),),
        scene=scene,
    )
    layout = Layout(
        canvas_width=float(width), canvas_height=float(height),
        elements=(
            ElementBox(kind="text", box=text),
            ElementBox(kind="logo", box=BBox(logo_x, logo_y, logo_x + logo_w, logo_y + logo_h)),
        ),
    )
    return ann, layout, u


def generate_synthetic(
    size: int,
    signal_strength: float,
    seed: int,
    *,
    n_records: int = 500,
    record_coeffs: tuple[float, float, float, float] = (0.0, 0.05, 0.0, 0.0),
    record_noise: float = 0.001,
    record_base_ctr: float = 0.2,
    canvas: tuple[int, int] = (400, 300),
) -> SyntheticData:
    """Build annotations, weight-calibration records, and a labeled dataset.

    Click probability is sigmoid(steepness * signal_strength * (0.5 - u))
    where u is the planted face-coverage fraction; strength 0 makes labels
    pure coin flips. Calibration records follow
    ctr = base - sum(coeffs * term_scores) + N(0, noise). Everything is a
    pure function of (size, signal_strength, seed, keyword knobs).
    """
    if size < 1:
        raise ValueError("size must be positive")
    ss = np.random.SeedSequence(seed)
    rng_banners, rng_labels, rng_records = (np.random.default_rng(s) for s in ss.spawn(3))
    width, height = canvas

    annotations: list[ImageAnnotation] = []
    layouts: list[Layout] = []
    coverage: list[float] = []
    for i in range(size):
        ann, layout, u = _synthesize_banner(i, rng_banners, width, height)
        annotations.append(ann)
        layouts.append(layout)
        coverage.append(u)

    schema = build_schema(annotations)
    probs = np.array([
        _sigmoid(SIGNAL_STEEPNESS * signal_strength * (0.5 - u)) for u in coverage
    ])
    clicks = rng_labels.random(size) < probs

    rows = []
    for ann, layout, p, clicked in zip(annotations, layouts, probs, clicks):
        vec = extract(ann, layout, schema)
        rows.append(DataRow(
            banner_id=ann.image_id, features=vec,
            is_clicked=int(clicked), ctr=float(p),
        ))
    dataset = Dataset(rows=tuple(rows), feature_names=schema.slots)

    records = []
    for i in range(n_records):
        scores = rng_records.uniform(0.0, 1.0, size=4)
        ctr = record_base_ctr - float(np.dot(record_coeffs, scores))
        ctr += float(rng_records.normal(0.0, record_noise))
        records.append(HistoricalBannerRecord(
            banner_id=f"hist{i:05d}",
            e_align=float(scores[0]), e_overlap=float(scores[1]),
            e_dist=float(scores[2]), e_sym=float(scores[3]),
            ctr=min(1.0, max(0.0, ctr)),
        ))

    return SyntheticData(
        annotations=annotations, layouts=layouts, records=records,
        dataset=dataset, schema=schema, bayes_auc=expected_auc(probs),
    )


__all__ = ["PLANTED_FEATURE", "SIGNAL_STEEPNESS", "SyntheticData", "expected_auc", "generate_synthetic"]
