"""Shared fixture builders for the test suite."""

from __future__ import annotations

import numpy as np

from dqsteer.tabular import ColumnSchema, Dataset

CATEGORIES = ("alpha", "beta", "gamma", "delta")


def random_dataset(seed: int, n_rows: int = 40, missing_rate: float = 0.15,
                   dup_rate: float = 0.1, label: str | None = None) -> Dataset:
    """Mixed-dtype dataset with injected duplicates and missing cells."""
    rng = np.random.default_rng(seed)
    columns = (ColumnSchema("n1", "numeric"), ColumnSchema("n2", "numeric"),
               ColumnSchema("c1", "categorical"), ColumnSchema("b1", "boolean"))
    rows = []
    for _ in range(n_rows):
        rows.append([
            float(np.round(rng.normal(), 3)),
            float(np.round(rng.uniform(0.0, 10.0), 3)),
            CATEGORIES[int(rng.integers(0, len(CATEGORIES)))],
            bool(rng.integers(0, 2)),
        ])
    n_dups = int(dup_rate * n_rows)
    for _ in range(n_dups):
        src = int(rng.integers(0, n_rows))
        dst = int(rng.integers(0, n_rows))
        rows[dst] = list(rows[src])
    for i in range(n_rows):
        for j in range(len(columns)):
            if rng.random() < missing_rate:
                rows[i][j] = None
    return Dataset(columns=columns, rows=tuple(tuple(r) for r in rows),
                   label_column=label)


def two_cluster_csv(n_per_class: int = 30, seed: int = 11) -> str:
    """Linearly separable 2-D classification CSV with a 'y' label."""
    rng = np.random.default_rng(seed)
    lines = ["x1,x2,y"]
    for cls, (cx, cy) in enumerate(((-3.0, -3.0), (3.0, 3.0))):
        for _ in range(n_per_class):
            lines.append(f"{cx + rng.normal(0, 0.5):.4f},"
                         f"{cy + rng.normal(0, 0.5):.4f},{cls}")
    return "\n".join(lines) + "\n"
