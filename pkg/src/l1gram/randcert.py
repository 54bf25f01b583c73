"""Random matrix ensembles and spectral statistics.

Samples hollow Rademacher matrices W (symmetric, +-1 off the diagonal, zero
diagonal) and the shifted family T = -(sqrt(n)/4) I + W, measures extreme
eigenvalues, and bounds the spectral norms of principal submatrices up to a
given size, either exhaustively or by Monte Carlo subset sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .linalg import GramMatrix, as_matrix_array, max_eigenvalue
from .rng import Rng

EXHAUSTIVE_SUBSET_CAP = 10**6


@dataclass(frozen=True)
class RandomEnsembleSpec:
    """Which matrix to draw: kind, size and seed.

    kind is one of rademacher_W, shifted_T, wishart, all_ones, diagonal;
    wishart uses ``p`` columns (default n), diagonal uses the entries ``d``.
    """

    kind: str
    n: int
    seed: int
    p: Optional[int] = None
    d: Optional[tuple] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "wishart" and self.p is not None and self.p < 1:
            raise ValueError("wishart p must be >= 1")


def sample_W(n: int, rng: Rng) -> GramMatrix:
    """Hollow symmetric +-1 matrix, deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = np.zeros((n, n))
    if n > 1:
        iu = np.triu_indices(n, 1)
        vals = rng.rademacher(iu[0].size)
        a[iu] = vals
        a.T[iu] = vals
    return GramMatrix._wrap(a)


def shift_to_T(W) -> GramMatrix:
    """Attach the -(sqrt(n)/4) diagonal to a hollow matrix."""
    w = as_matrix_array(W)
    n = w.shape[0]
    a = w - (math.sqrt(n) / 4.0) * np.eye(n)
    return GramMatrix._wrap(a)


def build_T(n: int, rng: Rng) -> GramMatrix:
    """Sample W and shift: diagonal -(sqrt(n)/4), off-diagonal +-1."""
    return shift_to_T(sample_W(n, rng))


def sample_wishart(n: int, rng: Rng, p: Optional[int] = None) -> GramMatrix:
    """G G^T for an n x p standard normal G (PSD, full rank a.s. for p >= n)."""
    p = n if p is None else p
    g = rng.normal(n * p).reshape(n, p)
    a = g @ g.T
    return GramMatrix._wrap((a + a.T) / 2.0)


def all_ones(n: int) -> GramMatrix:
    return GramMatrix._wrap(np.ones((n, n)))


def diagonal(d) -> GramMatrix:
    return GramMatrix._wrap(np.diag(np.asarray(d, dtype=np.float64)))


def circulant_small_offdiag(n: int, eps: Optional[float] = None) -> GramMatrix:
    """Circulant with unit diagonal and eps on the two wrapped off-diagonals."""
    if eps is None:
        eps = 1.0 / (2.0 * n)
    a = np.eye(n)
    if n > 1:
        idx = np.arange(n)
        a[idx, (idx + 1) % n] += eps
        a[(idx + 1) % n, idx] += eps
    return GramMatrix._wrap((a + a.T) / 2.0)


def make_ensemble(spec: RandomEnsembleSpec) -> GramMatrix:
    rng = Rng(spec.seed)
    if spec.kind == "rademacher_W":
        return sample_W(spec.n, rng)
    if spec.kind == "shifted_T":
        return build_T(spec.n, rng)
    if spec.kind == "wishart":
        return sample_wishart(spec.n, rng, spec.p)
    if spec.kind == "all_ones":
        return all_ones(spec.n)
    if spec.kind == "diagonal":
        if spec.d is None:
            raise ValueError("diagonal ensemble requires entries d")
        return diagonal(spec.d)
    raise ValueError(f"unknown ensemble kind {spec.kind!r}")


@dataclass
class BaiYinSummary:
    """Sample statistics of lambda_max(W) / sqrt(n)."""

    n: int
    trials: int
    values: np.ndarray
    mean: float
    min: float
    max: float


def bai_yin_stat(n: int, trials: int, rng: Rng) -> BaiYinSummary:
    """Top-eigenvalue statistics over fresh W draws (one child seed each)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    vals = np.empty(trials)
    root = math.sqrt(n)
    for t in range(trials):
        w = sample_W(n, rng.child(t))
        vals[t] = max_eigenvalue(w) / root
    return BaiYinSummary(
        n=n, trials=trials, values=vals,
        mean=float(vals.mean()), min=float(vals.min()), max=float(vals.max()),
    )


@dataclass
class SubsetNormEstimate:
    """Max spectral norm over size-k principal submatrices.

    Exhaustive mode scans all C(n, k) subsets and is the true maximum over
    subsets of size <= k (the norm is monotone under taking supersets);
    monte_carlo is a lower estimate from sampled subsets.
    """

    k: int
    mode: str  # "exhaustive" | "monte_carlo"
    samples: Optional[int]
    value: float
    normalized: float


def _spectral_norm_sub(a: np.ndarray, idx) -> float:
    sub = a[np.ix_(idx, idx)]
    lam = np.linalg.eigvalsh(sub)
    return float(max(abs(lam[0]), abs(lam[-1])))


def _exhaustive_norm(a: np.ndarray, k: int) -> float:
    n = a.shape[0]
    if k == 1:
        return float(np.abs(np.diag(a)).max())
    if k == 2:
        # closed-form 2x2 symmetric spectral norm over all index pairs
        iu, ju = np.triu_indices(n, 1)
        mid = (a[iu, iu] + a[ju, ju]) / 2.0
        rad = np.sqrt(((a[iu, iu] - a[ju, ju]) / 2.0) ** 2 + a[iu, ju] ** 2)
        return float((np.abs(mid) + rad).max())
    best = 0.0
    for idx in combinations(range(n), k):
        best = max(best, _spectral_norm_sub(a, list(idx)))
    return best


def max_restricted_norm(W, k: int, mode: str = "auto",
                        samples: int = 1000,
                        rng: Optional[Rng] = None) -> SubsetNormEstimate:
    """Max ||W_S|| over principal submatrices with |S| = k."""
    a = as_matrix_array(W)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    n_subsets = math.comb(n, k)
    if mode == "auto":
        mode = "exhaustive" if (k <= 2 or n_subsets <= EXHAUSTIVE_SUBSET_CAP) \
            else "monte_carlo"
    if mode == "exhaustive":
        if k > 2 and n_subsets > EXHAUSTIVE_SUBSET_CAP:
            raise ValueError(
                f"C({n},{k}) = {n_subsets} subsets exceeds the exhaustive cap "
                f"{EXHAUSTIVE_SUBSET_CAP}; use monte_carlo mode"
            )
        best = _exhaustive_norm(a, k)
        return SubsetNormEstimate(k, "exhaustive", None, best, best / math.sqrt(n))
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("monte_carlo mode requires an rng")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    best = 0.0
    for _ in range(samples):
        idx = rng.subset(n, k)
        best = max(best, _spectral_norm_sub(a, idx))
    return SubsetNormEstimate(k, "monte_carlo", samples, best, best / math.sqrt(n))


@dataclass
class KappaEstimate:
    """Largest subset fraction alpha with restricted norm <= beta * sqrt(n).

    ``degenerate`` marks the regime beta * sqrt(n) < 1 where already every
    pair of indices violates the bound (any 2x2 principal submatrix of a
    hollow +-1 matrix has norm 1), so alpha < 2/n.  ``exhaustive`` says every
    probed size was scanned exhaustively (so alpha itself is exact);
    ``restricted_exhaustive`` says the norm at the returned k is exact, which
    is what certifies bounds built from (alpha, restricted_norm).
    """

    alpha: float
    k: int
    beta: float
    exhaustive: bool
    degenerate: bool
    restricted_norm: float
    restricted_exhaustive: bool = False


def estimate_kappa_for(W, beta: float, rng: Rng, budget: int = 2000) -> KappaEstimate:
    """Find the largest k with max-restricted-norm(k) <= beta * sqrt(n).

    Gallops k upward from 1 (size 1 always qualifies on a hollow diagonal)
    and then bisects the bracket; the restricted norm is monotone in k so the
    qualifying set is a prefix.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    a = as_matrix_array(W)
    n = a.shape[0]
    if np.abs(np.diag(a)).max() != 0.0:
        raise ValueError("expected a hollow (zero-diagonal) matrix")
    target = beta * math.sqrt(n)

    cache = {}

    def norm_at(k):
        if k not in cache:
            cache[k] = max_restricted_norm(W, k, mode="auto", samples=budget,
                                           rng=rng.child(k))
        return cache[k]

    lo, hi = 1, None
    while hi is None:
        nxt = min(2 * lo, n)
        if nxt == lo:
            hi = lo  # reached n with every size qualifying
        elif norm_at(nxt).value <= target:
            lo = nxt
        else:
            hi = nxt
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if norm_at(mid).value <= target:
            lo = mid
        else:
            hi = mid
    est = norm_at(lo)
    all_exhaustive = all(e.mode == "exhaustive" for e in cache.values())
    degenerate = n >= 2 and target < 1.0
    return KappaEstimate(
        alpha=lo / n,
        k=lo,
        beta=beta,
        exhaustive=all_exhaustive,
        degenerate=degenerate,
        restricted_norm=est.value,
        restricted_exhaustive=est.mode == "exhaustive",
    )


def estimate_kappa(n: int, beta: float, rng: Rng, budget: int = 2000) -> KappaEstimate:
    """Sample a fresh W and estimate the admissible subset fraction."""
    w = sample_W(n, rng.child(0))
    return estimate_kappa_for(w, beta, rng.child(1), budget)


def tail_bound_curve(alpha: float, n: int) -> float:
    """Failure-probability bound 4 exp(-alpha log(1/alpha) n) for the
    restricted-norm event; vacuous (-> 4) as alpha -> 1."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return 4.0 * math.exp(-alpha * math.log(1.0 / alpha) * n)
