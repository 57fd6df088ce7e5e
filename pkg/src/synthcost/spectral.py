"""Spectral data of the transfer graph: growth rate, capacity, eigenvectors.

The adjacency spectrum of the run-length transfer graph is governed by a
small characteristic polynomial, so the dominant eigenvalue comes from
bisection rather than a matrix solve, and the dominant right eigenvector has
a closed form indexed by the current run length of each state.  A second,
independent route builds the same eigenvector by extending the span-1 vector
one span at a time; keeping both routes (plus plain power iteration) lets the
test suite cross-check them against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .constraints import ConstraintParams, TransferGraph, build_graph, lsb_run
from .errors import InvalidParams, NoBracket, NoConvergence, NumericalFailure, ShapeMismatch

_BISECT_MAX_ITER = 200
_POWER_MAX_ITER = 200_000


def char_poly(z: float, params: ConstraintParams) -> float:
    """z**k - (r-1) * (z**(k-1) + ... + z + 1), evaluated by Horner."""
    r, k = params.r, params.k
    acc = 1.0
    for _ in range(k):
        acc = acc * z - (r - 1)
    return acc


def _char_poly_with_derivative(z: float, params: ConstraintParams) -> tuple[float, float]:
    """Value and derivative of the characteristic polynomial, shared Horner pass."""
    r, k = params.r, params.k
    acc, d = 1.0, 0.0
    for _ in range(k):
        d = d * z + acc
        acc = acc * z - (r - 1)
    return acc, d


def eigvec_poly(z: float, m: int, params: ConstraintParams) -> float:
    """Polynomial family whose values at the growth rate fill the eigenvector.

    m indexes one past the current run length.  m=1 gives the constant
    1/(r-1); for m >= 2 the value is z**(m-1)/(r-1) minus the geometric block
    z + z**2 + ... + z**(m-2).
    """
    if m < 1:
        raise InvalidParams(f"m must be >= 1, got {m}")
    r = params.r
    if m == 1:
        return 1.0 / (r - 1)
    head = z ** (m - 1) / (r - 1)
    tail = sum(z**i for i in range(1, m - 1))
    return head - tail


def perron_eigenvalue(params: ConstraintParams, tol: float = 1e-12) -> float:
    """Dominant adjacency eigenvalue, by bisection on the characteristic polynomial.

    For k = 1 the value is exactly r - 1.  Otherwise the unique root in
    (r - 1/k, r) is bracketed and bisected until the interval is below tol.
    """
    if tol <= 0:
        raise InvalidParams(f"tol must be positive, got {tol}")
    r, k = params.r, params.k
    if k == 1:
        return float(r - 1)
    lo, hi = r - 1.0 / k, float(r)
    f_lo, f_hi = char_poly(lo, params), char_poly(hi, params)
    if not (f_lo < 0.0 < f_hi):
        raise NoBracket(
            f"no sign change on [{lo}, {hi}] (f={f_lo:.3g}, {f_hi:.3g})"
        )
    for _ in range(_BISECT_MAX_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if char_poly(mid, params) < 0.0:
            lo = mid
        else:
            hi = mid
    # Newton polish: bisection leaves ~tol/2 of root error, which the
    # eigenvector polynomials amplify by O(k * lam**k); a few Newton steps
    # push the root to machine precision so downstream row sums stay tight.
    z = 0.5 * (lo + hi)
    for _ in range(4):
        f, df = _char_poly_with_derivative(z, params)
        if df == 0.0:
            break
        step = f / df
        z_new = min(max(z - step, lo), hi)
        if z_new == z:
            break
        z = z_new
    return z


def capacity(params: ConstraintParams, tol: float = 1e-12) -> float:
    """Exponential growth rate of admissible words, in base-r digits per symbol."""
    return math.log(perron_eigenvalue(params, tol)) / math.log(params.r)


def right_eigvec_closed_form(params: ConstraintParams, lam: float | None = None) -> np.ndarray:
    """Dominant right eigenvector, one entry per state, from the run-length rule.

    A state whose current run is already at the maximum k gets entry 1; a
    state with run length l < k gets eigvec_poly(lam, l + 1).
    """
    if lam is None:
        lam = perron_eigenvalue(params)
    by_run = [0.0] * (params.k + 1)
    for l in range(1, params.k):
        by_run[l] = eigvec_poly(lam, l + 1, params)
    by_run[params.k] = 1.0
    phi = np.empty(params.state_count, dtype=np.float64)
    for i in range(params.state_count):
        phi[i] = by_run[lsb_run(i, params)]
    return phi


def _recognize_entries(x: np.ndarray, params: ConstraintParams, tol: float = 1e-6) -> list[int]:
    """Classify each entry of a span-k eigenvector by the run length it encodes.

    Returns per-entry run lengths; raises ShapeMismatch when an entry is not
    (within tol) one of the admissible values at the current growth rate.
    """
    k = params.k
    lam = perron_eigenvalue(params)
    candidates: list[tuple[int, float]] = [(k, 1.0)]
    candidates += [(l, eigvec_poly(lam, l + 1, params)) for l in range(1, k)]
    tokens = []
    for idx, value in enumerate(np.asarray(x, dtype=np.float64)):
        hits = [l for l, v in candidates if abs(value - v) <= tol]
        if len(hits) != 1:
            raise ShapeMismatch(
                f"entry {idx} = {value!r} does not match a unique eigenvector value"
            )
        tokens.append(hits[0])
    return tokens


def extend_eigvec(x: np.ndarray, params: ConstraintParams, lam_next: float) -> np.ndarray:
    """One extension step: span-k eigenvector -> span-(k+1) eigenvector.

    The input entries are re-expressed at the next growth rate, the vector is
    repeated once per symbol, and in copy a every constant-state position
    belonging to a different symbol is promoted to the new maximal-run value.
    Input entries at those positions must be exactly the 1-entries, otherwise
    the vector was not in eigenvector form and ShapeMismatch is raised.
    """
    r, k = params.r, params.k
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.state_count,):
        raise ShapeMismatch(
            f"expected a vector of length r**k = {params.state_count}, got shape {x.shape}"
        )
    tokens = _recognize_entries(x, params)
    next_params = ConstraintParams(params.r, k + 1)
    re_evaluated = np.empty_like(x)
    for i, l in enumerate(tokens):
        re_evaluated[i] = 1.0 if l == k else eigvec_poly(lam_next, l + 1, params)
    promoted = eigvec_poly(lam_next, k + 1, params)
    unit = (params.state_count - 1) // (r - 1)
    blocks = []
    for a in range(r):
        block = re_evaluated.copy()
        for j in range(r):
            if j == a:
                continue
            pos = j * unit
            if tokens[pos] != k:
                raise ShapeMismatch(
                    f"position {pos} must hold the maximal-run entry before promotion"
                )
            block[pos] = promoted
        blocks.append(block)
    out = np.concatenate(blocks)
    assert out.shape == (next_params.state_count,)
    return out


def right_eigvec_by_extension(params: ConstraintParams) -> np.ndarray:
    """Build the dominant right eigenvector by iterating the extension step from span 1."""
    x = np.ones(params.r, dtype=np.float64)
    for span in range(1, params.k):
        lam_next = perron_eigenvalue(ConstraintParams(params.r, span + 1))
        x = extend_eigvec(x, ConstraintParams(params.r, span), lam_next)
    return x


def _power_iterate(a: sparse.csr_matrix, tol: float, max_iter: int) -> tuple[np.ndarray, float]:
    """Power iteration on a + I with all-ones start; returns (vector, eigenvalue of a).

    The +I shift keeps the iteration convergent on periodic graphs (k = 1)
    without changing the eigenvectors.
    """
    n = a.shape[0]
    v = np.ones(n, dtype=np.float64)
    av = a @ v
    for _ in range(max_iter):
        w = av + v
        w_norm = np.max(np.abs(w))
        if w_norm == 0.0:
            raise NoConvergence("iteration collapsed to the zero vector")
        w /= w_norm
        av = a @ w
        lam_est = float(w @ av) / float(w @ w)
        if np.max(np.abs(av - lam_est * w)) <= tol * np.max(np.abs(w)):
            return w, lam_est
        v = w
    raise NoConvergence(f"power iteration did not converge in {max_iter} steps")


def right_eigvec_power(graph: TransferGraph, tol: float = 1e-11) -> tuple[np.ndarray, float]:
    """Dominant right eigenvector by plain power iteration (independent of the closed form)."""
    return _power_iterate(graph.to_sparse(), tol, _POWER_MAX_ITER)


def left_eigvec_numeric(
    graph: TransferGraph,
    lam: float,
    tol: float = 1e-9,
    phi: np.ndarray | None = None,
) -> np.ndarray:
    """Dominant left eigenvector by power iteration on the transpose.

    Scaled so that sum(xi * phi) = 1, which makes phi * xi a probability
    vector; the residual against the supplied eigenvalue must meet tol.
    """
    a = graph.to_sparse()
    xi, _ = _power_iterate(sparse.csr_matrix(a.T), min(tol, 1e-11), _POWER_MAX_ITER)
    resid = np.max(np.abs(a.T @ xi - lam * xi))
    if resid > tol * np.max(np.abs(xi)):
        raise NoConvergence(f"left eigenvector residual {resid:.3g} above tol")
    if phi is None:
        phi = right_eigvec_closed_form(graph.params, lam)
    scale = float(xi @ phi)
    if scale <= 0:
        raise NumericalFailure("left/right eigenvector product is not positive")
    return xi / scale


@dataclass
class SpectralData:
    """Growth rate plus the dominant eigenpair, ready for measure construction."""

    params: ConstraintParams
    lam: float
    phi: np.ndarray
    xi: np.ndarray
    capacity: float


def compute_spectral(graph: TransferGraph, tol: float = 1e-12) -> SpectralData:
    """Solve the eigen-structure of a transfer graph and sanity-check residuals."""
    params = graph.params
    lam = perron_eigenvalue(params, tol)
    phi = right_eigvec_closed_form(params, lam)
    a = graph.to_sparse()
    resid = np.max(np.abs(a @ phi - lam * phi))
    if resid > 1e-9 * np.max(np.abs(phi)):
        raise NumericalFailure(f"right eigenvector residual {resid:.3g} out of tolerance")
    xi = left_eigvec_numeric(graph, lam, phi=phi)
    return SpectralData(
        params=params,
        lam=lam,
        phi=phi,
        xi=xi,
        capacity=math.log(lam) / math.log(params.r),
    )
