"""Fit energy-term weights from historical banners' term scores and CTR.

Ordinary least squares of CTR on the standardized per-term penalty scores:
a term that hurts CTR gets a negative coefficient, which becomes a positive
penalty weight. Coefficients are floored at a small epsilon so every term
stays a penalty, then rescaled to mean 1 (the optimizer's argmin is scale
invariant, so only relative magnitudes matter).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .energy import EnergyWeights

TERM_NAMES = ("e_align", "e_overlap", "e_dist", "e_sym")
WEIGHT_FLOOR = 0.01
MIN_RECORDS = 8


@dataclass(frozen=True)
class HistoricalBannerRecord:
    """Per-term penalty scores and observed CTR for one historical banner."""

    banner_id: str
    e_align: float
    e_overlap: float
    e_dist: float
    e_sym: float
    ctr: float

    def term_scores(self) -> tuple[float, float, float, float]:
        return (self.e_align, self.e_overlap, self.e_dist, self.e_sym)


@dataclass(frozen=True)
class CalibrationResult:
    weights: EnergyWeights
    r_squared: float
    n_records: int


class CalibrationError(ValueError):
    pass


def fit_weights(records: list[HistoricalBannerRecord]) -> CalibrationResult:
    """OLS-calibrate the four energy weights from historical records.

    Raises :class:`CalibrationError` on fewer than 8 records, non-finite
    inputs, or a rank-deficient design matrix (e.g. a constant or duplicated
    term column). A constant CTR column is not an error: it yields floor
    weights with r_squared 0.
    """
    if len(records) < MIN_RECORDS:
        raise CalibrationError(f"need at least {MIN_RECORDS} records, got {len(records)}")

    x = np.array([r.term_scores() for r in records], dtype=float)
    y = np.array([r.ctr for r in records], dtype=float)
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise CalibrationError("non-finite term scores or CTR values")
    if np.any(x < 0):
        raise CalibrationError("term scores must be non-negative")
    if np.any((y < 0) | (y > 1)):
        raise CalibrationError("ctr values must lie in [0, 1]")

    means = x.mean(axis=0)
    stds = x.std(axis=0, ddof=0)
    if np.any(stds == 0):
        flat = [TERM_NAMES[i] for i in np.flatnonzero(stds == 0)]
        raise CalibrationError(f"rank-deficient design: constant column(s) {flat}")
    z = (x - means) / stds

    design = np.column_stack([np.ones(len(records)), z])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise CalibrationError("rank-deficient design: collinear term columns")

    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ beta
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # variance at accumulated-rounding scale means a constant target
    tiny = 1e-18 * len(y) * max(1.0, float(np.abs(y).max()) ** 2)
    r_squared = 0.0 if ss_tot <= tiny else 1.0 - ss_res / ss_tot

    # Higher penalty -> lower CTR -> negative coefficient -> positive weight.
    raw = np.maximum(-beta[1:], WEIGHT_FLOOR)
    scaled = raw / raw.mean()
    weights = EnergyWeights(
        w_align=float(scaled[0]), w_overlap=float(scaled[1]),
        w_dist=float(scaled[2]), w_sym=float(scaled[3]),
    )
    return CalibrationResult(weights=weights, r_squared=r_squared, n_records=len(records))


def parse_records_csv(data: bytes | str) -> list[HistoricalBannerRecord]:
    """Read the calibration CSV: banner_id, e_align, e_overlap, e_dist, e_sym, ctr."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.DictReader(io.StringIO(data))
    required = {"banner_id", *TERM_NAMES, "ctr"}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        missing = sorted(required - set(reader.fieldnames or []))
        raise CalibrationError(f"records CSV missing column(s): {missing}")
    records = []
    for row in reader:
        records.append(HistoricalBannerRecord(
            banner_id=row["banner_id"],
            e_align=float(row["e_align"]), e_overlap=float(row["e_overlap"]),
            e_dist=float(row["e_dist"]), e_sym=float(row["e_sym"]),
            ctr=float(row["ctr"]),
        ))
    return records


def records_to_csv(records: list[HistoricalBannerRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["banner_id", *TERM_NAMES, "ctr"])
    for r in records:
        writer.writerow([r.banner_id, *(repr(v) for v in r.term_scores()), repr(r.ctr)])
    return buf.getvalue()


__all__ = [
    "TERM_NAMES", "WEIGHT_FLOOR", "MIN_RECORDS",
    "HistoricalBannerRecord", "CalibrationResult", "CalibrationError",
    "fit_weights", "parse_records_csv", "records_to_csv",
]
