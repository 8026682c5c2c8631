"""Duplicate-record removal: exact rows and fuzzy key-column matching.

Fuzzy grouping is the transitive closure of pairwise matches under the
normalized edit-distance similarity, averaged over the key columns; the
first row of each group survives.
"""

from __future__ import annotations

from ..errors import InvalidInput, InvalidSpec
from ..tabular import MISSING, Dataset


def exact_duplicate_groups(ds: Dataset) -> list[list[int]]:
    """Groups of identical rows (missing == missing), each sorted by index."""
    seen: dict = {}
    for i, row in enumerate(ds.rows):
        seen.setdefault(row, []).append(i)
    return [idxs for idxs in seen.values() if len(idxs) > 1]


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance (insert/delete/substitute, unit costs)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def string_similarity(a: str, b: str) -> float:
    """1 - levenshtein/max_len; two empty strings are identical (1.0)."""
    m = max(len(a), len(b))
    if m == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / m


def _pair_similarity(row_a, row_b, key_idx) -> float:
    sims = []
    for j in key_idx:
        va, vb = row_a[j], row_b[j]
        if va is MISSING and vb is MISSING:
            sims.append(1.0)
        elif va is MISSING or vb is MISSING:
            sims.append(0.0)
        else:
            sims.append(string_similarity(va, vb))
    return sum(sims) / len(sims)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def fuzzy_duplicate_groups(ds: Dataset, key_cols, threshold: float) -> list[list[int]]:
    """Transitive closure of pairwise key-similarity matches at the threshold."""
    if not (0.0 < threshold <= 1.0):
        raise InvalidSpec(f"similarity threshold must be in (0, 1], got {threshold}")
    if not key_cols:
        raise InvalidSpec("fuzzy dedup needs at least one key column")
    key_idx = []
    for c in key_cols:
        if ds.schema(c).dtype not in ("categorical", "text"):
            raise InvalidInput(f"fuzzy dedup key column {c!r} must be a text column")
        key_idx.append(ds.column_index(c))

    uf = _UnionFind(ds.n_rows)
    for i in range(ds.n_rows):
        for j in range(i + 1, ds.n_rows):
            if _pair_similarity(ds.rows[i], ds.rows[j], key_idx) >= threshold:
                uf.union(i, j)
    groups: dict = {}
    for i in range(ds.n_rows):
        groups.setdefault(uf.find(i), []).append(i)
    return [idxs for idxs in groups.values() if len(idxs) > 1]


def dedup(ds: Dataset, mode: str, params: dict):
    """Drop duplicate rows, keeping the first of each group."""
    if mode == "exact":
        groups = exact_duplicate_groups(ds)
    elif mode == "fuzzy":
        groups = fuzzy_duplicate_groups(
            ds, params.get("key_cols") or [],
            float(params.get("similarity_threshold", 1.0)))
    else:
        raise InvalidSpec(f"unknown dedup mode {mode!r}")

    drop = set()
    for g in groups:
        drop.update(g[1:])
    survivors = tuple(i for i in range(ds.n_rows) if i not in drop)
    out = ds.derive(rows=tuple(ds.rows[i] for i in survivors))
    return out, survivors, {"mode": mode,
                            "groups": [sorted(g) for g in groups],
                            "removed_rows": sorted(drop)}
