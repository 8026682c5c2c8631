"""Distribution-shift checks between two dataset snapshots.

Numeric columns get a two-sample Kolmogorov-Smirnov test; categorical
columns get a total-variation distance on category frequencies (advisory,
no p-value); columns present on only one side, or whose dtype changed,
are reported as structural changes with no test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInput
from .tabular import MISSING, Dataset

CATEGORICAL_TVD_THRESHOLD = 0.1   # advisory flag level, no significance test

# lambda below which the asymptotic survival function is 1.0 to well
# under 1e-12, and where the truncated alternating series misbehaves
SMALL_LAMBDA = 0.2

_MAX_TERMS = 100
_TERM_EPS = 1e-12


@dataclass(frozen=True)
class KsResult:
    column: str
    n1: int
    n2: int
    d_stat: float
    p_value: float
    drifted: bool
    alpha: float

    def to_json(self) -> dict:
        return {"kind": "ks", "column": self.column, "n1": self.n1,
                "n2": self.n2, "d_stat": self.d_stat, "p_value": self.p_value,
                "drifted": self.drifted, "alpha": self.alpha}


@dataclass(frozen=True)
class CategoricalDrift:
    column: str
    n1: int
    n2: int
    tvd: float
    threshold: float
    drifted: bool

    def to_json(self) -> dict:
        return {"kind": "categorical", "column": self.column, "n1": self.n1,
                "n2": self.n2, "tvd": self.tvd, "threshold": self.threshold,
                "drifted": self.drifted}


@dataclass(frozen=True)
class StructuralChange:
    column: str
    reason: str

    def to_json(self) -> dict:
        return {"kind": "structural", "column": self.column,
                "reason": self.reason}


def ks_statistic(x, y) -> float:
    """sup_t |F_x(t) - F_y(t)| over right-continuous empirical CDFs.

    Merged two-pointer sweep over the sorted samples; at tied values both
    ECDFs advance past the tie before the gap is measured.
    """
    xs = sorted(float(v) for v in x)
    ys = sorted(float(v) for v in y)
    if not xs or not ys:
        raise InvalidInput("ks_statistic needs at least one value per sample")
    if not (math.isfinite(xs[0]) and math.isfinite(xs[-1])
            and math.isfinite(ys[0]) and math.isfinite(ys[-1])):
        raise InvalidInput("ks_statistic samples must be finite")
    n1, n2 = len(xs), len(ys)
    i = j = 0
    d = 0.0
    while i < n1 and j < n2:
        v = xs[i] if xs[i] <= ys[j] else ys[j]
        while i < n1 and xs[i] == v:
            i += 1
        while j < n2 and ys[j] == v:
            j += 1
        gap = abs(i / n1 - j / n2)
        if gap > d:
            d = gap
    return d


def ks_pvalue(d_stat: float, n1: int, n2: int) -> float:
    """Asymptotic two-sample p-value with small-sample continuity correction.

    lambda = (sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) * D with n_e = n1*n2/(n1+n2),
    p = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2), truncated when a term
    drops below 1e-12 (100-term cap), clamped to [0,1].  Below lambda = 0.2
    the survival function is 1.0 to more than twelve decimal places while the
    truncated series oscillates, so 1.0 is returned directly.
    """
    if n1 < 1 or n2 < 1:
        raise InvalidInput("ks_pvalue needs n1, n2 >= 1")
    if not 0.0 <= d_stat <= 1.0:
        raise InvalidInput("d_stat must lie in [0, 1]")
    n_e = n1 * n2 / (n1 + n2)
    root = math.sqrt(n_e)
    lam = (root + 0.12 + 0.11 / root) * d_stat
    if lam < SMALL_LAMBDA:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, _MAX_TERMS + 1):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        sign = -sign
        if term < _TERM_EPS:
            break
    p = 2.0 * total
    return min(1.0, max(0.0, p))


def _observed_floats(ds: Dataset, col: str) -> list[float]:
    return [float(v) for v in ds.column_values(col) if v is not MISSING]


def _category_freqs(ds: Dataset, col: str) -> tuple[dict, int]:
    counts: dict = {}
    for v in ds.column_values(col):
        if v is MISSING:
            continue
        counts[v] = counts.get(v, 0) + 1
    return counts, sum(counts.values())


def total_variation_distance(p_counts: dict, q_counts: dict) -> float:
    np_, nq = sum(p_counts.values()), sum(q_counts.values())
    keys = set(p_counts) | set(q_counts)
    return 0.5 * sum(abs(p_counts.get(k, 0) / np_ - q_counts.get(k, 0) / nq)
                     for k in keys)


def drift_report(before: Dataset, after: Dataset, alpha: float = 0.05) -> list:
    """Per-column drift entries; raises when the snapshots share no columns."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInput("alpha must lie in (0, 1)")
    before_types = {c.name: c.dtype for c in before.columns}
    after_types = {c.name: c.dtype for c in after.columns}
    if not set(before_types) & set(after_types):
        raise InvalidInput("snapshots share no columns; nothing to compare")

    entries: list = []
    for schema in before.columns:
        col = schema.name
        if col not in after_types:
            entries.append(StructuralChange(col, "column absent after"))
            continue
        if after_types[col] != schema.dtype:
            entries.append(StructuralChange(
                col, f"dtype changed from {schema.dtype} to {after_types[col]}"))
            continue
        if schema.dtype in ("numeric", "timestamp"):
            xs = _observed_floats(before, col)
            ys = _observed_floats(after, col)
            if not xs or not ys:
                entries.append(StructuralChange(col, "no observed values"))
                continue
            d = ks_statistic(xs, ys)
            p = ks_pvalue(d, len(xs), len(ys))
            entries.append(KsResult(column=col, n1=len(xs), n2=len(ys),
                                    d_stat=d, p_value=p,
                                    drifted=p < alpha, alpha=alpha))
        else:
            p_counts, np_ = _category_freqs(before, col)
            q_counts, nq = _category_freqs(after, col)
            if np_ == 0 or nq == 0:
                entries.append(StructuralChange(col, "no observed values"))
                continue
            tvd = total_variation_distance(p_counts, q_counts)
            entries.append(CategoricalDrift(
                column=col, n1=np_, n2=nq, tvd=tvd,
                threshold=CATEGORICAL_TVD_THRESHOLD,
                drifted=tvd > CATEGORICAL_TVD_THRESHOLD))
    for schema in after.columns:
        if schema.name not in before_types:
            entries.append(StructuralChange(schema.name, "column absent before"))
    return entries
