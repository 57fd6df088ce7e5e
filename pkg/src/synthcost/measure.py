"""Entropy-maximizing Markov measure on the transfer graph, plus batch sampling.

The transition matrix is the standard eigenvector twist of the adjacency
matrix: Q[i, j] = phi[j] / (lam * phi[i]) on edges, which is row-stochastic
because phi is the dominant right eigenvector.  Its stationary law is
phi * xi with the left eigenvector scaled so the product sums to one.  The
chain's entropy rate equals the capacity of the constraint, which is what
makes this the measure worth sampling strands from.

Internally the matrix is stored label-indexed: label_probs[i, c] is the
probability of emitting symbol c from state i (0 when that edge is absent).
This keeps sampling and pattern probabilities vectorized without sparse
lookups in the hot loop.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .constraints import ConstraintParams, TransferGraph, lsb_run
from .errors import InvalidParams, NumericalFailure, SymbolOutOfRange
from .spectral import SpectralData

_MAX_SEED = 2**64

_ROW_SUM_TOL = 1e-12
_STATIONARY_TOL = 1e-8


def default_thread_count() -> int:
    """Worker threads for batch sampling; SYNTHCOST_THREADS overrides, default 1."""
    raw = os.environ.get("SYNTHCOST_THREADS", "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidParams(f"SYNTHCOST_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InvalidParams(f"SYNTHCOST_THREADS must be >= 1, got {value}")
    return value


@dataclass
class MarkovMeasure:
    """Row-stochastic transition structure over transfer-graph states."""

    params: ConstraintParams
    graph: TransferGraph
    lam: float
    pi: np.ndarray
    label_probs: np.ndarray  # (n_states, r); column c = prob of emitting c
    cum_label: np.ndarray = field(repr=False)
    cum_pi: np.ndarray = field(repr=False)

    @property
    def n_states(self) -> int:
        return self.params.state_count

    @property
    def Q(self) -> sparse.csr_matrix:
        """Transition matrix in state-by-state sparse form."""
        p = self.params
        n = self.n_states
        states = np.arange(n)
        shifts = (states % p.r ** (p.k - 1)) * p.r
        targets = shifts[:, None] + np.arange(p.r)[None, :]
        mask = self.label_probs > 0.0
        rows = np.repeat(states, mask.sum(axis=1))
        cols = targets[mask]
        data = self.label_probs[mask]
        return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))

    def transition_prob(self, u: int, v: int) -> float:
        """Q[u, v]; zero when the graph has no such edge."""
        if not (0 <= u < self.n_states and 0 <= v < self.n_states):
            raise InvalidParams(f"state out of range: ({u}, {v})")
        if not self.graph.has_edge(u, v):
            return 0.0
        return float(self.label_probs[u, v % self.params.r])


def build_measure(spectral: SpectralData, graph: TransferGraph) -> MarkovMeasure:
    """Construct the max-entropy chain from solved spectral data.

    Verifies row sums and stationarity of phi * xi; a residual above 1e-8
    means the eigen data was bad and raises NumericalFailure.
    """
    if spectral.params != graph.params:
        raise InvalidParams("spectral data and graph disagree on (r, k)")
    p = graph.params
    n = graph.n_states
    r = p.r
    lam, phi, xi = spectral.lam, spectral.phi, spectral.xi

    states = np.arange(n)
    shifts = (states % r ** (p.k - 1)) * r
    targets = shifts[:, None] + np.arange(r)[None, :]  # (n, r)
    valid = targets != states[:, None]  # self-successor = forbidden run
    label_probs = np.where(valid, phi[targets] / (lam * phi[:, None]), 0.0)

    # the eigenvector entries are O(1) but evaluating them forms terms up to
    # lam**(k-1), so that is the roundoff scale the checks must allow for
    cond = max(1.0, lam ** (p.k - 1) / (r - 1))
    row_err = np.max(np.abs(label_probs.sum(axis=1) - 1.0))
    if row_err > _ROW_SUM_TOL * cond:
        raise NumericalFailure(f"row sums deviate from 1 by {row_err:.3g}")

    pi = phi * xi
    if abs(pi.sum() - 1.0) > _ROW_SUM_TOL * cond:
        raise NumericalFailure(f"stationary vector sums to {pi.sum()!r}")
    pi_next = np.zeros(n)
    np.add.at(pi_next, targets.ravel(), (pi[:, None] * label_probs).ravel())
    stat_err = np.max(np.abs(pi_next - pi))
    if stat_err > _STATIONARY_TOL:
        raise NumericalFailure(f"stationarity residual {stat_err:.3g} above tolerance")

    cum_label = np.cumsum(label_probs, axis=1)
    cum_label[:, -1] = 1.0
    cum_pi = np.cumsum(pi)
    cum_pi[-1] = 1.0
    return MarkovMeasure(
        params=p,
        graph=graph,
        lam=lam,
        pi=pi,
        label_probs=label_probs,
        cum_label=cum_label,
        cum_pi=cum_pi,
    )


def entropy_rate(measure: MarkovMeasure) -> float:
    """Shannon entropy rate of the chain in base-r units; equals the capacity."""
    p = measure.label_probs
    plogp = np.where(p > 0.0, p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    return float(-(measure.pi @ plogp.sum(axis=1)) / math.log(measure.params.r))


def pattern_probability(measure: MarkovMeasure, word) -> float:
    """Stationary probability that the chain emits ``word`` at a fixed position.

    Tracks every start state in parallel down the unique label-determined
    path; inadmissible words come out exactly 0.
    """
    word = list(word)
    if len(word) < 1:
        raise InvalidParams("pattern must have at least one symbol")
    p = measure.params
    for s in word:
        if not 0 <= s < p.r:
            raise SymbolOutOfRange(f"symbol {s} outside alphabet of size {p.r}")
    shift_mod = p.r ** (p.k - 1)
    cur = np.arange(measure.n_states)
    weight = measure.pi.copy()
    for c in word:
        weight = weight * measure.label_probs[cur, c]
        cur = (cur % shift_mod) * p.r + c
    return float(weight.sum())


def run_probability_table(measure: MarkovMeasure, max_i: int) -> np.ndarray:
    """Probabilities of the patterns a b^i for i = 1..max_i (a != b).

    By symbol symmetry the value is the same for every ordered pair; the
    table is computed for (0, 1) and cross-checked against all other pairs.
    """
    k = measure.params.k
    if not 1 <= max_i <= k:
        raise InvalidParams(f"max_i must be in 1..k={k}, got {max_i}")
    r = measure.params.r
    table = np.array(
        [pattern_probability(measure, (0,) + (1,) * i) for i in range(1, max_i + 1)]
    )
    for a in range(r):
        for b in range(r):
            if a == b:
                continue
            other = [pattern_probability(measure, (a,) + (b,) * i) for i in range(1, max_i + 1)]
            if np.max(np.abs(np.asarray(other) - table)) > 1e-11:
                raise NumericalFailure(
                    f"pattern probabilities for pair ({a},{b}) break symbol symmetry"
                )
    return table


def transitions_favor_short_runs(measure: MarkovMeasure) -> bool:
    """True when every state assigns strictly more mass to successors with shorter runs."""
    p = measure.params
    runs = [lsb_run(i, p) for i in range(measure.n_states)]
    for i, row in enumerate(measure.graph.succ):
        for j in row:
            for t in row:
                if runs[j] < runs[t]:
                    if not measure.label_probs[i, j % p.r] > measure.label_probs[i, t % p.r]:
                        return False
    return True


@dataclass
class Batch:
    """A sampled set of strands, reproducible from (params, n, seed) alone."""

    params: ConstraintParams
    n: int
    seed: int
    strands: np.ndarray  # (M, n) int16 symbols
    start_states: np.ndarray  # (M,) hidden initial window, drawn from pi

    @property
    def size(self) -> int:
        return int(self.strands.shape[0])


def _walk_block(measure: MarkovMeasure, n: int, seed: int, lo: int, hi: int,
                out: np.ndarray, starts: np.ndarray) -> None:
    """Sample strands lo..hi-1 into preallocated arrays."""
    m = hi - lo
    p = measure.params
    shift_mod = p.r ** (p.k - 1)
    u = np.empty((m, n + 1))
    for row, j in enumerate(range(lo, hi)):
        u[row] = np.random.default_rng(seed ^ j).random(n + 1)
    states = np.searchsorted(measure.cum_pi, u[:, 0], side="right")
    starts[lo:hi] = states
    cum = measure.cum_label
    for t in range(n):
        c = np.sum(cum[states] <= u[:, t + 1, None], axis=1)
        states = (states % shift_mod) * p.r + c
        out[lo:hi, t] = c


def sample_batch(
    measure: MarkovMeasure,
    n: int,
    size: int,
    seed: int,
    threads: int | None = None,
) -> Batch:
    """Draw ``size`` independent strands of length n from the chain.

    Strand j consumes only the substream seeded by seed XOR j, so any
    thread count (and any batch size reading the same strand index) yields
    bit-identical strands.
    """
    if n < 1:
        raise InvalidParams(f"strand length must be >= 1, got {n}")
    if size < 1:
        raise InvalidParams(f"batch size must be >= 1, got {size}")
    if not 0 <= seed < _MAX_SEED:
        raise InvalidParams(f"seed must be in [0, 2**64), got {seed}")
    if threads is None:
        threads = default_thread_count()

    out = np.empty((size, n), dtype=np.int16)
    starts = np.empty(size, dtype=np.int64)
    if threads == 1 or size < 2 * threads:
        _walk_block(measure, n, seed, 0, size, out, starts)
    else:
        bounds = np.linspace(0, size, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_walk_block, measure, n, seed, int(lo), int(hi), out, starts)
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for f in futures:
                f.result()
    return Batch(params=measure.params, n=n, seed=seed, strands=out, start_states=starts)
