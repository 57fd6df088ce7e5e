"""Synthesis-cost model: greedy embedding of strands into a reference machine.

A reference is a fixed symbol stream (optional finite prefix followed by an
optional repeating cycle).  The machine scans the reference once, and a
strand is synthesized by printing each of its symbols at the earliest
reference position after the previous one; the cost of a batch is the number
of reference positions consumed until every strand is finished.  The module
also provides the per-edge cost of the underlying state chain, its expected
cost rate under a measure, and an exact shortest-common-supersequence solver
for comparison at small sizes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .constraints import ConstraintParams
from .errors import (
    InvalidParams,
    NoSuchEdge,
    NotASupersequence,
    SymbolOutOfRange,
    TooLarge,
)
from .measure import Batch, MarkovMeasure
from .strandio import decode_word, detect_format, encode_word


@dataclass(frozen=True)
class ReferenceSeq:
    """A reference stream: ``prefix`` printed once, then ``cycle`` repeated forever.

    An empty cycle makes the reference finite.  A nonempty cycle must
    contain every symbol of the alphabet, because otherwise some strands can
    never finish; pass incomplete_ok=True to build such a reference anyway.
    """

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]
    r: int
    incomplete_ok: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if self.r < 2:
            raise InvalidParams(f"r must be >= 2, got {self.r}")
        for s in (*self.prefix, *self.cycle):
            if not 0 <= s < self.r:
                raise SymbolOutOfRange(f"symbol {s} outside alphabet of size {self.r}")
        if not self.prefix and not self.cycle:
            raise InvalidParams("reference must have a prefix, a cycle, or both")
        if self.cycle and not self.incomplete_ok:
            missing = sorted(set(range(self.r)) - set(self.cycle))
            if missing:
                raise InvalidParams(
                    f"cycle never emits symbols {missing}; strands containing them "
                    "would never finish (pass incomplete_ok=True to override)"
                )

    @property
    def is_periodic(self) -> bool:
        return bool(self.cycle)

    def describe(self) -> str:
        if self.is_periodic and not self.prefix:
            return "periodic:" + encode_word(self.cycle, "digits")
        if not self.is_periodic:
            return "finite:" + encode_word(self.prefix, "digits")
        return (
            "finite:" + encode_word(self.prefix, "digits")
            + "+periodic:" + encode_word(self.cycle, "digits")
        )

    @cached_property
    def _prefix_next(self) -> list[list[int]]:
        # _prefix_next[p][s]: first position >= p holding s, or -1
        P = len(self.prefix)
        table = [[-1] * self.r for _ in range(P + 1)]
        for p in range(P - 1, -1, -1):
            row = table[p + 1].copy()
            row[self.prefix[p]] = p
            table[p] = row
        return table

    @cached_property
    def _cycle_ahead(self) -> list[list[int]]:
        # _cycle_ahead[o][s]: smallest d >= 0 with cycle[(o+d) % L] == s, or -1
        L = len(self.cycle)
        table = [[-1] * self.r for _ in range(L)]
        for o in range(L):
            for d in range(L):
                s = self.cycle[(o + d) % L]
                if table[o][s] == -1:
                    table[o][s] = d
        return table

    def symbol_at(self, pos: int) -> int:
        """Symbol printed at 0-based position ``pos`` of the stream."""
        if pos < 0:
            raise InvalidParams(f"position must be >= 0, got {pos}")
        if pos < len(self.prefix):
            return self.prefix[pos]
        if not self.cycle:
            raise InvalidParams(f"position {pos} beyond the finite reference")
        return self.cycle[(pos - len(self.prefix)) % len(self.cycle)]

    def next_pos(self, symbol: int, after: int) -> int:
        """Smallest 0-based position > ``after`` printing ``symbol``."""
        if not 0 <= symbol < self.r:
            raise SymbolOutOfRange(f"symbol {symbol} outside alphabet of size {self.r}")
        P = len(self.prefix)
        start = after + 1
        if start < P:
            q = self._prefix_next[start][symbol]
            if q != -1:
                return q
            start = P
        if not self.cycle:
            raise NotASupersequence(
                f"finite reference exhausted before finding symbol {symbol}"
            )
        d = self._cycle_ahead[(start - P) % len(self.cycle)][symbol]
        if d == -1:
            raise NotASupersequence(f"cycle never emits symbol {symbol}")
        return start + d


def canonical_reference(r: int) -> ReferenceSeq:
    """The plain periodic reference 0 1 ... r-1 repeated."""
    return ReferenceSeq(prefix=(), cycle=tuple(range(r)), r=r)


def parse_reference(
    text: str,
    r: int | None = None,
    fmt: str | None = None,
    incomplete_ok: bool = False,
) -> ReferenceSeq:
    """Parse a reference description string.

    Accepted forms: ``canonical`` (needs r), ``periodic:<word>`` and
    ``finite:<word>``.  Words are digit strings, or nucleotide letters when
    fmt='acgt' (or when the word only contains ACGT letters).
    """
    text = text.strip()
    if text == "canonical":
        if r is None:
            raise InvalidParams("reference 'canonical' needs an explicit alphabet size r")
        return canonical_reference(r)
    for head, periodic in (("periodic:", True), ("finite:", False)):
        if text.startswith(head):
            body = text[len(head):]
            if not body:
                raise InvalidParams(f"empty reference body in {text!r}")
            word_fmt = fmt or detect_format(body)
            word = decode_word(body, word_fmt, r)
            rr = r if r is not None else (4 if word_fmt == "acgt" else max(word) + 1)
            if periodic:
                return ReferenceSeq((), word, rr, incomplete_ok=incomplete_ok)
            return ReferenceSeq(word, (), rr, incomplete_ok=incomplete_ok)
    raise InvalidParams(
        f"cannot parse reference {text!r}; expected 'canonical', 'periodic:...' or 'finite:...'"
    )


def greedy_embed(strand: Sequence[int], reference: ReferenceSeq) -> list[int]:
    """Leftmost embedding positions (1-based) of a strand into the reference.

    The greedy choice is optimal: no embedding finishes earlier than the
    leftmost one.
    """
    if len(strand) == 0:
        raise InvalidParams("strand must be nonempty")
    pos = -1
    out = []
    for s in strand:
        pos = reference.next_pos(int(s), pos)
        out.append(pos + 1)
    return out


def _strand_rows(strands) -> list[Sequence[int]]:
    if isinstance(strands, Batch):
        return list(strands.strands)
    if isinstance(strands, np.ndarray):
        return list(strands)
    return list(strands)


def batch_final_positions(strands, reference: ReferenceSeq) -> np.ndarray:
    """1-based final embedding position per strand (0 for empty strands).

    Rectangular batches against a pure-cycle complete reference run fully
    vectorized; everything else falls back to per-strand greedy embedding.
    """
    if isinstance(strands, Batch):
        strands = strands.strands
    fast = (
        isinstance(strands, np.ndarray)
        and strands.ndim == 2
        and reference.is_periodic
        and not reference.prefix
        and not set(range(reference.r)) - set(reference.cycle)
    )
    if fast:
        m, n = strands.shape
        if n == 0:
            return np.zeros(m, dtype=np.int64)
        if strands.min() < 0 or strands.max() >= reference.r:
            raise SymbolOutOfRange("batch contains symbols outside the alphabet")
        L = len(reference.cycle)
        ahead = np.asarray(reference._cycle_ahead, dtype=np.int64)
        # step[o, s]: distance from offset o to the next s strictly ahead
        step = ahead[(np.arange(L) + 1) % L] + 1
        q = np.full(m, -1, dtype=np.int64)
        cols = strands.astype(np.int64, copy=False)
        for t in range(n):
            q += step[q % L, cols[:, t]]
        return q + 1
    out = np.empty(len(_strand_rows(strands)), dtype=np.int64)
    for i, row in enumerate(_strand_rows(strands)):
        out[i] = greedy_embed(row, reference)[-1] if len(row) else 0
    return out


def batch_cost(strands, reference: ReferenceSeq) -> int:
    """Reference positions consumed to synthesize the whole batch (0 if empty)."""
    rows = strands.strands if isinstance(strands, Batch) else strands
    if len(rows) == 0:
        return 0
    return int(batch_final_positions(strands, reference).max())


@dataclass
class CostReport:
    """Embedding positions and total cost of one batch under one reference."""

    reference: str
    batch_cost: int
    per_strand_tau: list[list[int]] | None = None


def cost_report(strands, reference: ReferenceSeq, include_tau: bool = True) -> CostReport:
    rows = _strand_rows(strands)
    taus = [greedy_embed(row, reference) if len(row) else [] for row in rows]
    total = max((t[-1] for t in taus if t), default=0)
    return CostReport(
        reference=reference.describe(),
        batch_cost=total,
        per_strand_tau=taus if include_tau else None,
    )


def step_cost(u: int, v: int, params: ConstraintParams) -> int:
    """Machine cycles spent moving along edge u -> v of the transfer graph.

    Equals the cyclic gap from the last symbol of u to that of v in the
    canonical cycle; printing the same symbol again costs a full turn r.
    """
    r, k = params.r, params.k
    n = params.state_count
    if not (0 <= u < n and 0 <= v < n):
        raise NoSuchEdge(f"state out of range: ({u}, {v})")
    base = (u % r ** (k - 1)) * r
    if v == u or not base <= v < base + r:
        raise NoSuchEdge(f"no transition from state {u} to state {v}")
    return (v % r - u % r - 1) % r + 1


def expected_cost_rate(measure: MarkovMeasure) -> float:
    """Stationary expected machine cycles per printed symbol under the measure."""
    r = measure.params.r
    labels = np.arange(measure.n_states) % r
    gaps = (np.arange(r)[None, :] - labels[:, None] - 1) % r + 1  # (n, r)
    return float(measure.pi @ (measure.label_probs * gaps).sum(axis=1))


def batch_step_costs(batch: Batch) -> np.ndarray:
    """Per-symbol machine cycles (M, n) for a sampled batch, start state included."""
    r = batch.params.r
    prev = np.concatenate(
        [(batch.start_states % r)[:, None], batch.strands[:, :-1]], axis=1
    )
    return (batch.strands - prev - 1) % r + 1


def is_subsequence(sub: Sequence[int], sup: Sequence[int]) -> bool:
    it = iter(sup)
    return all(any(s == x for x in it) for s in sub)


def shortest_common_supersequence(
    strands: Iterable[Sequence[int]],
    max_strands: int = 4,
    max_product: int = 10**8,
) -> tuple[int, tuple[int, ...]]:
    """Exact minimum-length common supersequence via breadth-first search.

    State = per-strand progress pointers; every BFS layer prints one symbol
    that advances at least one strand, so the first time all pointers reach
    the end is optimal.  Guarded by max_strands and the pointer-space size.
    """
    words = [tuple(int(x) for x in s) for s in strands]
    words = [w for w in words if w]
    if not words:
        return 0, ()
    if len(words) > max_strands:
        raise TooLarge(f"{len(words)} strands exceed the exact-solver limit {max_strands}")
    dims = [len(w) + 1 for w in words]
    product = 1
    for d in dims:
        product *= d
    if product > max_product:
        raise TooLarge(f"pointer space {product} exceeds limit {max_product}")

    m = len(words)
    strides = [1] * m
    for i in range(m - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    goal = sum((dims[i] - 1) * strides[i] for i in range(m))

    visited = bytearray(product)
    visited[0] = 1
    parent: dict[int, tuple[int, int]] = {}
    queue = deque([0])
    while queue:
        code = queue.popleft()
        if code == goal:
            break
        ptrs = [(code // strides[i]) % dims[i] for i in range(m)]
        heads = sorted({words[i][ptrs[i]] for i in range(m) if ptrs[i] < dims[i] - 1})
        for c in heads:
            nxt = code
            for i in range(m):
                if ptrs[i] < dims[i] - 1 and words[i][ptrs[i]] == c:
                    nxt += strides[i]
            if not visited[nxt]:
                visited[nxt] = 1
                parent[nxt] = (code, c)
                queue.append(nxt)
    symbols = []
    code = goal
    while code != 0:
        code, c = parent[code]
        symbols.append(c)
    witness = tuple(reversed(symbols))
    assert all(is_subsequence(w, witness) for w in words)
    return len(witness), witness


def compare_references(strands, references: Sequence[ReferenceSeq]) -> list[dict]:
    """Batch cost under each reference, annotated with its rank (1 = cheapest)."""
    costs = [batch_cost(strands, ref) for ref in references]
    return [
        {
            "reference": ref.describe(),
            "batch_cost": cost,
            "rank": 1 + sum(other < cost for other in costs),
        }
        for ref, cost in zip(references, costs)
    ]
