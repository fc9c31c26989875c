"""Growth summaries along measure families.

A single finite atomic measure always has a finite box ratio and a finite
inequality constant, so Carleson-ness is only observable as growth along a
family mu_1, mu_2, ... . Families are summarised by the least-squares slope
of log2(value) against the family index.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DIVERGENT = "divergent"
BOUNDED = "bounded"

# expected slopes: 0 for bounded families, >= 1/4 for the divergent corpora used here
DEFAULT_SLOPE_THRESHOLD = 0.1


@dataclass(frozen=True)
class Trend:
    index: list[float]
    values: list[float]
    slope: float
    classification: str

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "values": self.values,
            "log2_slope": self.slope,
            "classification": self.classification,
        }


def log2_slope(index: Sequence[float], values: Sequence[float]) -> float:
    x = np.asarray(index, dtype=float)
    y = np.asarray(values, dtype=float)
    ok = y > 0
    if ok.sum() < 2:
        return 0.0
    return float(np.polyfit(x[ok], np.log2(y[ok]), 1)[0])


def fit_trend(values: Sequence[float], index: Sequence[float] | None = None,
              threshold: float = DEFAULT_SLOPE_THRESHOLD, power: float = 1.0) -> Trend:
    """Classify by the log2 slope of values**power.

    Inequality constants c satisfy c**q ~ box ratio, so their trends are fitted
    with power=q to put every exponent on the box-ratio scale.
    """
    values = [float(v) for v in values]
    if index is None:
        index = range(1, len(values) + 1)
    index = [float(k) for k in index]
    slope = power * log2_slope(index, values)
    return Trend(index, values, slope, DIVERGENT if slope > threshold else BOUNDED)
