"""Run-length constrained words over an r-ary alphabet and their transfer graph.

A word over {0, ..., r-1} is admissible when no symbol repeats more than k
times in a row.  The admissible words of a given length are exactly the label
sequences of paths in a de Bruijn-style transfer graph whose states are the
last k symbols seen; this module builds that graph and provides the word-level
helpers (admissibility, exact counting, the difference transform) that the
spectral and sampling layers sit on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InadmissibleWord, InvalidParams, SymbolOutOfRange, TooLarge

# states are k-digit base-r integers; digit 0 (least significant) is the
# most recent symbol, digit k-1 the oldest
_MAX_STATE_COUNT = 2**63 - 1


@dataclass(frozen=True)
class ConstraintParams:
    """Alphabet size r and maximum run length k."""

    r: int
    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.r, int) or isinstance(self.r, bool):
            raise InvalidParams(f"r must be an integer, got {self.r!r}")
        if not isinstance(self.k, int) or isinstance(self.k, bool):
            raise InvalidParams(f"k must be an integer, got {self.k!r}")
        if self.r < 2:
            raise InvalidParams(f"r must be >= 2, got {self.r}")
        if self.k < 1:
            raise InvalidParams(f"k must be >= 1, got {self.k}")
        if self.r**self.k > _MAX_STATE_COUNT:
            raise InvalidParams(
                f"state space r**k = {self.r}**{self.k} exceeds native integer range"
            )

    @property
    def state_count(self) -> int:
        return self.r**self.k


def word_to_state(word: Sequence[int], params: ConstraintParams) -> int:
    """Encode the last k symbols of ``word`` (chronological order) as a state."""
    if len(word) < params.k:
        raise InvalidParams(f"need at least k={params.k} symbols, got {len(word)}")
    state = 0
    for s in word[-params.k:]:
        if not 0 <= s < params.r:
            raise SymbolOutOfRange(f"symbol {s} outside alphabet of size {params.r}")
        state = state * params.r + int(s)
    return state


def state_to_word(state: int, params: ConstraintParams) -> tuple[int, ...]:
    """Decode a state into its k symbols, oldest first."""
    digits = []
    x = state
    for _ in range(params.k):
        digits.append(x % params.r)
        x //= params.r
    return tuple(reversed(digits))


def state_label(state: int, params: ConstraintParams) -> int:
    """Most recent symbol of a state (the label of every edge into it)."""
    return state % params.r


def lsb_run(state: int, params: ConstraintParams) -> int:
    """Length of the current run: how many trailing base-r digits agree.

    Ranges over 1..k; equals k exactly for the r constant-digit states.
    """
    if not 0 <= state < params.state_count:
        raise InvalidParams(f"state {state} out of range for r={params.r}, k={params.k}")
    r = params.r
    last = state % r
    x = state // r
    run = 1
    while run < params.k and x % r == last:
        run += 1
        x //= r
    return run


def constant_states(params: ConstraintParams) -> list[int]:
    """States whose k digits are all equal; the only states missing a self-successor."""
    unit = (params.state_count - 1) // (params.r - 1)  # 1 + r + ... + r^(k-1)
    return [a * unit for a in range(params.r)]


@dataclass
class TransferGraph:
    """Transfer graph of the constraint: one state per k-window, edges append a symbol.

    ``succ[i]`` lists the successor states of i in increasing order.  State
    j = shift(i)*r + c is reachable from i for every symbol c except that the
    r constant-digit states drop their self-loop (that step would create a
    forbidden run of k+1).
    """

    params: ConstraintParams
    succ: list[list[int]]
    _succ_padded: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_states(self) -> int:
        return self.params.state_count

    @property
    def edge_count(self) -> int:
        return sum(len(row) for row in self.succ)

    def successors(self, state: int) -> list[int]:
        return self.succ[state]

    def has_edge(self, u: int, v: int) -> bool:
        p = self.params
        if not (0 <= u < self.n_states and 0 <= v < self.n_states):
            return False
        return v != u and (u % p.r ** (p.k - 1)) * p.r <= v < (u % p.r ** (p.k - 1)) * p.r + p.r

    def succ_padded(self) -> np.ndarray:
        """(n_states, r) successor array, rows padded with -1 at constant states."""
        if self._succ_padded is None:
            pad = np.full((self.n_states, self.params.r), -1, dtype=np.int64)
            for i, row in enumerate(self.succ):
                pad[i, : len(row)] = row
            self._succ_padded = pad
        return self._succ_padded

    def dense(self) -> np.ndarray:
        """0/1 adjacency matrix; refuse absurd sizes."""
        n = self.n_states
        if n > 2**14:
            raise TooLarge(f"dense export of {n}x{n} adjacency refused")
        a = np.zeros((n, n), dtype=np.int64)
        for i, row in enumerate(self.succ):
            a[i, row] = 1
        return a

    def triples(self) -> list[tuple[int, int, int]]:
        """Sparse export: (row, col, 1) per edge, row-major order."""
        return [(i, j, 1) for i, row in enumerate(self.succ) for j in row]

    def to_sparse(self):
        from scipy import sparse

        n = self.n_states
        indptr = np.zeros(n + 1, dtype=np.int64)
        for i, row in enumerate(self.succ):
            indptr[i + 1] = indptr[i] + len(row)
        indices = np.fromiter(
            (j for row in self.succ for j in row), dtype=np.int64, count=indptr[-1]
        )
        data = np.ones(indptr[-1], dtype=np.float64)
        return sparse.csr_matrix((data, indices, indptr), shape=(n, n))


def build_graph(params: ConstraintParams) -> TransferGraph:
    """Materialize the transfer graph for the given alphabet and run bound."""
    r, k = params.r, params.k
    n = params.state_count
    if n * r > 10**8:
        raise InvalidParams(
            f"r**k * r = {n * r} edges; graph too large to materialize"
        )
    shift_mod = r ** (k - 1)
    constant = set(constant_states(params))
    succ = []
    for i in range(n):
        base = (i % shift_mod) * r
        row = [base + c for c in range(r)]
        if i in constant:
            row.remove(i)  # extending the run to k+1 is forbidden
        succ.append(row)
    return TransferGraph(params=params, succ=succ)


def _check_symbols(word: Iterable[int], r: int) -> None:
    for s in word:
        if not 0 <= s < r:
            raise SymbolOutOfRange(f"symbol {s} outside alphabet of size {r}")


def is_admissible(word: Sequence[int], params: ConstraintParams) -> bool:
    """True when no symbol occurs more than k consecutive times."""
    _check_symbols(word, params.r)
    run = 0
    prev = None
    for s in word:
        run = run + 1 if s == prev else 1
        if run > params.k:
            return False
        prev = s
    return True


def count_words(n: int, params: ConstraintParams) -> int:
    """Exact number of admissible words of length n (arbitrary precision).

    Words of length <= k are all admissible.  Longer words correspond
    one-to-one to paths of length n-k in the transfer graph starting from
    the state spelled by their first k symbols, so the count is a vector
    iteration with exact integers.
    """
    if n < 0:
        raise InvalidParams(f"word length must be >= 0, got {n}")
    if n <= params.k:
        return params.r**n
    graph = build_graph(params)
    counts = [1] * graph.n_states
    for _ in range(n - params.k):
        nxt = [0] * graph.n_states
        for i, row in enumerate(graph.succ):
            c = counts[i]
            for j in row:
                nxt[j] += c
        counts = nxt
    return sum(counts)


def check_irreducible(graph: TransferGraph) -> bool:
    """Strong connectivity via forward and backward reachability from state 0."""
    n = graph.n_states
    if any(len(row) == 0 for row in graph.succ):
        return False

    def reach(succ: Sequence[Sequence[int]]) -> int:
        seen = bytearray(n)
        seen[0] = 1
        stack = [0]
        total = 1
        while stack:
            u = stack.pop()
            for v in succ[u]:
                if not seen[v]:
                    seen[v] = 1
                    total += 1
                    stack.append(v)
        return total

    if reach(graph.succ) != n:
        return False
    pred: list[list[int]] = [[] for _ in range(n)]
    for i, row in enumerate(graph.succ):
        for j in row:
            pred[j].append(i)
    return reach(pred) == n


def to_rll_word(word: Sequence[int], params: ConstraintParams) -> tuple[int, ...]:
    """Cyclic difference transform: x_i = (w_{i+1} - w_i) mod r.

    Maps an admissible word of length n to a word of length n-1 in which
    zeros mark repeats, so runs of zeros are capped at k-1.
    """
    if len(word) < 1:
        raise InadmissibleWord("transform needs a nonempty word")
    if not is_admissible(word, params):
        raise InadmissibleWord("word violates the run-length constraint")
    r = params.r
    return tuple((word[i + 1] - word[i]) % r for i in range(len(word) - 1))


def from_rll_word(first: int, diffs: Sequence[int], params: ConstraintParams) -> tuple[int, ...]:
    """Invert :func:`to_rll_word` given the original first symbol."""
    _check_symbols([first], params.r)
    _check_symbols(diffs, params.r)
    out = [first]
    for d in diffs:
        out.append((out[-1] + d) % params.r)
    return tuple(out)
