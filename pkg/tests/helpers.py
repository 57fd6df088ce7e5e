"""Shared test helpers: cached graph/measure construction and small oracles."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from synthcost import (
    ConstraintParams,
    MarkovMeasure,
    SpectralData,
    TransferGraph,
    build_graph,
    build_measure,
    compute_spectral,
)


@lru_cache(maxsize=None)
def graph_for(r: int, k: int) -> TransferGraph:
    return build_graph(ConstraintParams(r, k))


@lru_cache(maxsize=None)
def spectral_for(r: int, k: int) -> SpectralData:
    return compute_spectral(graph_for(r, k))


@lru_cache(maxsize=None)
def measure_for(r: int, k: int) -> MarkovMeasure:
    return build_measure(spectral_for(r, k), graph_for(r, k))


def max_run_length(word) -> int:
    """Longest block of equal consecutive symbols (0 for the empty word)."""
    best = run = 0
    prev = object()
    for s in word:
        run = run + 1 if s == prev else 1
        best = max(best, run)
        prev = s
    return best


def enumerate_words_numpy(r: int, n: int) -> np.ndarray:
    """All r**n words of length n as an (r**n, n) array (n >= 1)."""
    count = r**n
    idx = np.arange(count)
    cols = [(idx // r**(n - 1 - j)) % r for j in range(n)]
    return np.stack(cols, axis=1).astype(np.int8)


def count_admissible_by_enumeration(r: int, k: int, n: int) -> int:
    """Exhaustive-filter word count, independent of the graph-based counter."""
    if n == 0:
        return 1
    words = enumerate_words_numpy(r, n)
    if n == 1:
        return r
    run = np.ones(words.shape[0], dtype=np.int32)
    ok = np.ones(words.shape[0], dtype=bool)
    for t in range(1, n):
        same = words[:, t] == words[:, t - 1]
        run = np.where(same, run + 1, 1)
        ok &= run <= k
    return int(ok.sum())
